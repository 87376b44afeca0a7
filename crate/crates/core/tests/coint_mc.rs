use macrots::coint::{johansen_trace, trace_statistics, vecm_fit};
use macrots::dataset::{DataTable, TimeSeries};
use macrots::rng::Lcg64;
use macrots::stats::JohansenCase;

const T: usize = 400;
const DRIFT: f64 = 0.2;

fn table(a: Vec<f64>, b: Vec<f64>) -> DataTable {
    DataTable::new(vec![
        TimeSeries::new("y1", 1600, a, "").unwrap(),
        TimeSeries::new("y2", 1600, b, "").unwrap(),
    ])
    .unwrap()
}

fn drifting_walk(g: &mut Lcg64, n: usize) -> Vec<f64> {
    let mut level = 0.0;
    (0..n)
        .map(|_| {
            level += DRIFT + g.next_normal();
            level
        })
        .collect()
}

/// `y1` a drifting random walk, `y2 = y1 + u` with `u` a stationary AR(1).
fn rank_one(seed: u64) -> DataTable {
    let mut g = Lcg64::new(seed);
    let y1 = drifting_walk(&mut g, T);
    let mut u = 0.0;
    let y2 = y1
        .iter()
        .map(|v| {
            u = 0.5 * u + g.next_normal();
            v + u
        })
        .collect();
    table(y1, y2)
}

fn rank_zero(seed: u64) -> DataTable {
    let mut g = Lcg64::new(seed);
    let a = drifting_walk(&mut g, T);
    let b = drifting_walk(&mut g, T);
    table(a, b)
}

fn decision_rate(make: fn(u64) -> DataTable, expected: usize) -> f64 {
    let hits = (0..200u64)
        .filter(|&s| {
            let r = johansen_trace(&make(10_000 + s), 2, JohansenCase::UnrestrictedConstant).unwrap();
            r.rank_decision == expected
        })
        .count();
    hits as f64 / 200.0
}

#[test]
fn rank_one_systems_detected() {
    let rate = decision_rate(rank_one, 1);
    eprintln!("rank-1 correct: {rate:.3}");
    assert!(rate >= 0.90, "{rate}");
}

#[test]
fn independent_walks_have_rank_zero() {
    let rate = decision_rate(rank_zero, 0);
    eprintln!("rank-0 correct: {rate:.3}");
    assert!(rate >= 0.85, "{rate}");
}

#[test]
fn result_invariants_hold() {
    for s in 0..20 {
        let r = johansen_trace(&rank_one(s), 2, JohansenCase::UnrestrictedConstant).unwrap();
        assert!(r.eigenvalues.iter().all(|l| *l > 0.0 && *l < 1.0));
        assert!(r.eigenvalues.windows(2).all(|w| w[0] > w[1]));
        assert!(r.trace_stats.windows(2).all(|w| w[0] > w[1]));
        let again = trace_statistics(&r.eigenvalues, r.effective_t);
        for (a, b) in again.iter().zip(&r.trace_stats) {
            assert!((a - b).abs() <= 1e-8 * b.abs());
        }
        assert_eq!(r.effective_t, T - 2);
    }
}

#[test]
fn seeded_beta_recovery() {
    let m = vecm_fit(&rank_one(3), 1, 2, JohansenCase::UnrestrictedConstant).unwrap();
    assert_eq!(m.beta[(0, 0)], 1.0);
    assert!((m.beta[(1, 0)] + 1.0).abs() < 0.05, "{}", m.beta);
    assert_eq!(m.alpha.shape(), (2, 1));
    assert_eq!(m.gamma.len(), 1);
}
