//! Small numerical helpers shared by the planners.

/// Relative window inside which a real is treated as sitting on an integer.
pub const INTEGER_SNAP: f64 = 1e-9;

/// Relative slack used when comparing a computed fidelity against `1 - ε`.
///
/// Exact test counts land on boundaries where the fidelity equals the target
/// in exact arithmetic; double rounding must not push them across.
pub const FIDELITY_SLACK: f64 = 1e-12;

/// `λ^k` evaluated as `exp(k ln λ)`, with `0^0 = 1`.
pub fn pow_int(base: f64, k: u64) -> f64 {
    if k == 0 {
        1.0
    } else if base == 0.0 {
        0.0
    } else {
        (k as f64 * base.ln()).exp()
    }
}

/// `x ln(1/x)`, continuous at zero.
pub fn xlog_inv(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

fn snapped(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= INTEGER_SNAP * x.abs().max(1.0)).then_some(r)
}

/// Ceiling that treats values within [`INTEGER_SNAP`] of an integer as that
/// integer. Callers still verify the defining inequality.
pub fn ceil_guarded(x: f64) -> f64 {
    snapped(x).unwrap_or_else(|| x.ceil())
}

/// Floor counterpart of [`ceil_guarded`].
pub fn floor_guarded(x: f64) -> f64 {
    snapped(x).unwrap_or_else(|| x.floor())
}

/// Converts a nonnegative finite real to `u64`, saturating.
pub fn to_count(x: f64) -> u64 {
    if x.is_nan() || x <= 0.0 {
        0
    } else if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x as u64
    }
}

/// `f >= target` up to [`FIDELITY_SLACK`].
pub fn meets(f: f64, target: f64) -> bool {
    f >= target - FIDELITY_SLACK * target.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guarded_rounding() {
        assert_eq!(ceil_guarded(62.000000000001), 62.0);
        assert_eq!(ceil_guarded(61.5), 62.0);
        assert_eq!(floor_guarded(2.9999999999999), 3.0);
        assert_eq!(floor_guarded(2.5), 2.0);
    }

    #[test]
    fn powers() {
        assert_eq!(pow_int(0.0, 0), 1.0);
        assert_eq!(pow_int(0.0, 3), 0.0);
        assert!((pow_int(0.5, 10) - 0.5f64.powi(10)).abs() < 1e-15);
    }

    #[test]
    fn xlog_peak_at_inverse_e() {
        let e = std::f64::consts::E;
        assert!((xlog_inv(1.0 / e) - 1.0 / e).abs() < 1e-15);
        assert!(xlog_inv(0.3) < xlog_inv(1.0 / e));
        assert!(xlog_inv(0.4) < xlog_inv(1.0 / e));
        assert_eq!(xlog_inv(0.0), 0.0);
    }
}
