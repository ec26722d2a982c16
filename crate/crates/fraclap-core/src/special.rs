//! Special-function helpers shared by the kernel formulas.

/// Gamma function on the positive axis (and via reflection elsewhere).
///
/// Backed by `libm::tgamma`, which is accurate to a few ulp over the range
/// the kernel constants need, `(0, 20]`.
#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Surface measure of the unit sphere `S^{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * core::f64::consts::PI,
        3 => 4.0 * core::f64::consts::PI,
        _ => unreachable!("dimension restricted to 1..=3"),
    }
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: usize) -> f64 {
    sphere_area(n) / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_PI: f64 = 1.772_453_850_905_515_9;

    #[test]
    fn gamma_reference_values() {
        assert!((gamma(0.5) - SQRT_PI).abs() < 1e-14);
        assert!((gamma(1.0) - 1.0).abs() < 1e-15);
        assert!((gamma(1.5) - 0.5 * SQRT_PI).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        // Recurrence x*Gamma(x) = Gamma(x+1) across the range used by kernels.
        let mut x = 0.05;
        while x < 19.0 {
            let lhs = x * gamma(x);
            let rhs = gamma(x + 1.0);
            assert!(
                (lhs - rhs).abs() <= 1e-12 * rhs.abs(),
                "recurrence failed at {x}"
            );
            x += 0.173;
        }
    }

    #[test]
    fn sphere_and_ball_measures() {
        assert_eq!(sphere_area(1), 2.0);
        assert!((ball_volume(2) - core::f64::consts::PI).abs() < 1e-15);
        assert!((ball_volume(3) - 4.0 * core::f64::consts::PI / 3.0).abs() < 1e-15);
    }
}
