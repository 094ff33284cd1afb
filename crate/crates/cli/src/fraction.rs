//! Recognition of small-denominator fractions in computed probabilities.

pub const MAX_DENOMINATOR: u64 = 10_000;
pub const MATCH_TOL: f64 = 1e-13;

/// Best continued-fraction convergent n/d of `x` with d ≤ `max_den`, if it
/// matches within `tol`.
pub fn recognize(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut r = x.abs();
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1u64, 0u64);
    for _ in 0..64 {
        let a = r.floor();
        if a > i64::MAX as f64 / 2.0 {
            break;
        }
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = (ai as u64).checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x.abs()).abs() <= tol {
            return Some((sign * h1, k1));
        }
        let frac = r - a;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// "n/d", "n" for integers, or an empty string when not recognized.
pub fn exact_string(x: f64) -> String {
    match recognize(x, MAX_DENOMINATOR, MATCH_TOL) {
        Some((n, 1)) => n.to_string(),
        Some((n, d)) => format!("{n}/{d}"),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_fractions() {
        assert_eq!(exact_string(1.0 / 6.0), "1/6");
        assert_eq!(exact_string(0.0), "0");
        assert_eq!(exact_string(1.0), "1");
        assert_eq!(exact_string(7.0 / 48.0), "7/48");
        assert_eq!(exact_string(-3.0 / 8.0), "-3/8");
        assert_eq!(exact_string(2f64.sqrt() / 3.0), "");
    }
}
