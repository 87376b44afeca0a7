//! Self-contained SVG line and stacked-area charts.

use std::fmt::Write as _;

use crate::{Error, Result};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    #[default]
    Line,
    /// Cumulative bands on a fixed `[0, 1]` axis, for shares.
    Stacked,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Series {
            name: name.into(),
            values,
        }
    }
}

/// Series sharing one x axis (years or horizons).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSet {
    pub title: String,
    pub x_label: String,
    pub x: Vec<f64>,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn c(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Step from 1, 2, 5 x 10^k giving at most `max_ticks` intervals.
fn nice_step(span: f64, max_ticks: usize) -> f64 {
    let raw = span / max_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn tick_label(v: f64, step: f64) -> String {
    let dp = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    crate::report::format::fixed(v, dp)
}

/// Plot-range for the y axis. A flat series gets symmetric padding so it
/// sits at mid-height.
fn y_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let span = hi - lo;
    if span <= 1e-12 * lo.abs().max(hi.abs()).max(1.0) {
        let pad = lo.abs().max(1.0) * 0.1;
        (lo - pad, hi + pad)
    } else {
        (lo - 0.05 * span, hi + 0.05 * span)
    }
}

pub fn emit_figure(set: &SeriesSet, style: Style) -> Result<String> {
    if set.series.is_empty() || set.x.is_empty() {
        return Err(Error::EmptySeriesSet);
    }
    let n = set.x.len();
    for s in &set.series {
        if s.values.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "series `{}` has {} points, x axis has {n}",
                s.name,
                s.values.len()
            )));
        }
        if let Some(i) = s.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                name: s.name.clone(),
                year: set.x[i] as i32,
            });
        }
    }

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let (x0, x1) = (set.x[0], set.x[n - 1]);
    let x_span = if x1 > x0 { x1 - x0 } else { 1.0 };
    let px = |x: f64| LEFT + (x - x0) / x_span * plot_w;

    let (y0, y1) = match style {
        Style::Line => y_range(set.series.iter().flat_map(|s| s.values.iter().copied())),
        Style::Stacked => (0.0, 1.0),
    };
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(svg, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"30\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        c(LEFT + plot_w / 2.0),
        escape(&set.title)
    );

    // axes
    let _ = writeln!(
        svg,
        "<g stroke=\"black\" stroke-width=\"1\"><line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\"/><line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\"/></g>",
        l = c(LEFT),
        r = c(LEFT + plot_w),
        t = c(TOP),
        b = c(TOP + plot_h)
    );
    let mut ticks = String::new();
    let x_step = nice_step(x_span, 10).max(1.0);
    let mut xt = (x0 / x_step).ceil() * x_step;
    while xt <= x1 + 1e-9 {
        let x = px(xt);
        let _ = write!(
            ticks,
            "<line x1=\"{x}\" y1=\"{b}\" x2=\"{x}\" y2=\"{b5}\" stroke=\"black\"/><text x=\"{x}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{lab}</text>",
            x = c(x),
            b = c(TOP + plot_h),
            b5 = c(TOP + plot_h + 5.0),
            ty = c(TOP + plot_h + 20.0),
            lab = tick_label(xt, x_step)
        );
        ticks.push('\n');
        xt += x_step;
    }
    let y_step = nice_step(y1 - y0, 8);
    let mut yt = (y0 / y_step).ceil() * y_step;
    while yt <= y1 + 1e-9 * y_step {
        let y = py(yt);
        let _ = write!(
            ticks,
            "<line x1=\"{l5}\" y1=\"{y}\" x2=\"{l}\" y2=\"{y}\" stroke=\"black\"/><text x=\"{tx}\" y=\"{yl}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{lab}</text>",
            l5 = c(LEFT - 5.0),
            l = c(LEFT),
            y = c(y),
            tx = c(LEFT - 8.0),
            yl = c(y + 4.0),
            lab = tick_label(yt, y_step)
        );
        ticks.push('\n');
        yt += y_step;
    }
    svg.push_str(&ticks);
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        c(LEFT + plot_w / 2.0),
        c(HEIGHT - 15.0),
        escape(&set.x_label)
    );

    match style {
        Style::Line => {
            for (i, s) in set.series.iter().enumerate() {
                let pts: Vec<String> = set
                    .x
                    .iter()
                    .zip(&s.values)
                    .map(|(x, y)| format!("{},{}", c(px(*x)), c(py(*y))))
                    .collect();
                let _ = writeln!(
                    svg,
                    "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>",
                    PALETTE[i % PALETTE.len()],
                    pts.join(" ")
                );
            }
        }
        Style::Stacked => {
            let mut lower = vec![0.0; n];
            for (i, s) in set.series.iter().enumerate() {
                let upper: Vec<f64> = lower.iter().zip(&s.values).map(|(a, b)| a + b).collect();
                let mut pts: Vec<String> = set
                    .x
                    .iter()
                    .zip(&upper)
                    .map(|(x, y)| format!("{},{}", c(px(*x)), c(py(*y))))
                    .collect();
                pts.extend(
                    set.x
                        .iter()
                        .zip(&lower)
                        .rev()
                        .map(|(x, y)| format!("{},{}", c(px(*x)), c(py(*y)))),
                );
                let _ = writeln!(
                    svg,
                    "<polygon fill=\"{}\" fill-opacity=\"0.8\" stroke=\"none\" points=\"{}\"/>",
                    PALETTE[i % PALETTE.len()],
                    pts.join(" ")
                );
                lower = upper;
            }
        }
    }

    for (i, s) in set.series.iter().enumerate() {
        let y = TOP + 10.0 + 22.0 * i as f64;
        let x = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            "<rect x=\"{}\" y=\"{}\" width=\"18\" height=\"10\" fill=\"{}\"/><text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            c(x),
            c(y - 9.0),
            PALETTE[i % PALETTE.len()],
            c(x + 24.0),
            c(y),
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(series: Vec<Series>, n: usize) -> SeriesSet {
        SeriesSet {
            title: "t".into(),
            x_label: "year".into(),
            x: (0..n).map(|i| 1980.0 + i as f64).collect(),
            series,
        }
    }

    fn polyline_ys(svg: &str) -> Vec<f64> {
        let start = svg.find("<polyline").unwrap();
        let pts = &svg[start..];
        let pts = &pts[pts.find("points=\"").unwrap() + 8..];
        let pts = &pts[..pts.find('"').unwrap()];
        pts.split(' ').map(|p| p.split(',').nth(1).unwrap().parse().unwrap()).collect()
    }

    #[test]
    fn empty_set_rejected() {
        assert!(matches!(emit_figure(&set(vec![], 3), Style::Line), Err(Error::EmptySeriesSet)));
    }

    #[test]
    fn constant_series_at_mid_canvas() {
        let svg = emit_figure(&set(vec![Series::new("c", vec![3.0; 10])], 10), Style::Line).unwrap();
        let mid = TOP + (HEIGHT - TOP - BOTTOM) / 2.0;
        assert!(polyline_ys(&svg).iter().all(|y| (*y - mid).abs() < 0.01));
    }

    #[test]
    fn stacked_reaches_full_height() {
        let a = Series::new("a", vec![1.0, 0.6, 0.5]);
        let b = Series::new("b", vec![0.0, 0.4, 0.5]);
        let svg = emit_figure(&set(vec![a, b], 3), Style::Stacked).unwrap();
        let last = svg.rfind("<polygon").unwrap();
        let pts = &svg[last..];
        let pts = &pts[pts.find("points=\"").unwrap() + 8..];
        let pts = &pts[..pts.find('"').unwrap()];
        let ys: Vec<f64> = pts.split(' ').take(3).map(|p| p.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert!(ys.iter().all(|y| (*y - TOP).abs() < 0.01));
    }

    #[test]
    fn deterministic_and_escaped() {
        let s = set(vec![Series::new("a<b", vec![1.0, 2.0, 1.5])], 3);
        let one = emit_figure(&s, Style::Line).unwrap();
        assert_eq!(one, emit_figure(&s, Style::Line).unwrap());
        assert!(one.contains("a&lt;b"));
        assert!(one.starts_with("<svg") && one.contains("width=\"800\" height=\"600\""));
    }

    #[test]
    fn length_mismatch() {
        let mut s = set(vec![Series::new("a", vec![1.0, 2.0])], 3);
        s.series[0].values.push(1.0);
        s.series.push(Series::new("b", vec![1.0]));
        assert!(matches!(emit_figure(&s, Style::Line), Err(Error::DimensionMismatch(_))));
    }
}
