//! Deterministic number formatting.

/// Rounds the shortest round-trip decimal form of `x` to `dp` places with
/// ties to even. Non-finite values render as `+inf`, `-inf` or `NA`.
pub fn fixed(x: f64, dp: usize) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "+inf".into() } else { "-inf".into() };
    }
    let repr = format!("{}", x.abs());
    let (int_part, frac_part) = repr.split_once('.').unwrap_or((&repr, ""));
    let mut digits: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).map(|b| b - b'0').collect();
    let int_len = int_part.len();
    let keep = int_len + dp;
    if digits.len() > keep {
        let rest = &digits[keep..];
        let first = rest[0];
        let beyond = rest[1..].iter().any(|&d| d != 0);
        let last_odd = keep > 0 && digits[keep - 1] % 2 == 1;
        let round_up = first > 5 || (first == 5 && (beyond || last_odd));
        digits.truncate(keep);
        if round_up {
            let mut i = keep;
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
    } else {
        digits.resize(keep, 0);
    }
    let int_len = digits.len() - dp;
    let mut out = String::new();
    let zero = digits.iter().all(|&d| d == 0);
    if x < 0.0 && !zero {
        out.push('-');
    }
    if int_len == 0 {
        out.push('0');
    }
    for (i, d) in digits.iter().enumerate() {
        if i == int_len {
            out.push('.');
        }
        out.push((b'0' + d) as char);
    }
    out
}

/// `sig` significant figures in fixed notation (EViews style, e.g.
/// `146.1710`, `4.653819`).
pub fn significant(x: f64, sig: usize) -> String {
    if !x.is_finite() || x == 0.0 {
        return fixed(x, sig.saturating_sub(1));
    }
    let mag = x.abs().log10().floor() as i64;
    let dp = (sig as i64 - 1 - mag).max(0) as usize;
    let s = fixed(x, dp);
    // rounding may carry into a new digit (9.9999 -> 10.0000)
    let digits = s.bytes().filter(u8::is_ascii_digit).skip_while(|&b| b == b'0').count();
    if digits > sig && dp > 0 {
        fixed(x, dp - 1)
    } else {
        s
    }
}

/// Scientific notation with `dp` mantissa decimals, e.g. `2.30e-10`.
pub fn scientific(x: f64, dp: usize) -> String {
    if !x.is_finite() {
        return fixed(x, 0);
    }
    format!("{x:.dp$e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_even() {
        assert_eq!(fixed(0.0365, 3), "0.036");
        assert_eq!(fixed(0.0375, 3), "0.038");
        assert_eq!(fixed(2.5, 0), "2");
        assert_eq!(fixed(3.5, 0), "4");
        assert_eq!(fixed(0.03651, 3), "0.037");
        assert_eq!(fixed(-2.167, 3), "-2.167");
        assert_eq!(fixed(9.9996, 3), "10.000");
        assert_eq!(fixed(-0.0004, 3), "0.000");
        assert_eq!(fixed(12.0, 2), "12.00");
        assert_eq!(fixed(1e-10, 3), "0.000");
        assert_eq!(fixed(f64::INFINITY, 3), "+inf");
        assert_eq!(fixed(f64::NAN, 3), "NA");
    }

    #[test]
    fn sig_figs() {
        assert_eq!(significant(146.17100, 7), "146.1710");
        assert_eq!(significant(4.6538191, 7), "4.653819");
        assert_eq!(significant(-17.107123, 7), "-17.10712");
        assert_eq!(significant(0.955945, 6), "0.955945");
        assert_eq!(significant(99.999999, 7), "100.0000");
    }

    #[test]
    fn sci() {
        assert_eq!(scientific(2.3e-10, 2), "2.30e-10");
        assert_eq!(scientific(4.8149e-11, 2), "4.81e-11");
    }
}
