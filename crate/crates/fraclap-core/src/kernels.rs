//! Closed-form kernels of the unit ball and the operator constants.
//!
//! Contents: the operator normalization `C_{n,s}` (reciprocal of the defining
//! integral), the Poisson kernel of the unit ball with its derivative
//! recursion, the Riesz kernel with a calibrated constant, and the bulk
//! profile `g0`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{Exterior, Field, Grid};
use crate::params::FracParams;
use crate::point::Point;
use crate::quad::{geometric_panels, ray_ball_interval, AngularRule, GaussLegendre, QuadSpec};
use crate::special::{ball_volume, gamma};

/// The four scalar constants every other module consumes.
///
/// `riesz_const` is calibrated numerically (see [`KernelConstants::compute`])
/// because the operator normalization and the fundamental-solution constant
/// are distinct quantities; it is only defined when `n > 2s`.
#[derive(Clone, Copy, Debug)]
pub struct KernelConstants {
    n: usize,
    s: f64,
    c_ns: f64,
    poisson_const: f64,
    g0_const: f64,
    riesz_const: f64,
}

impl KernelConstants {
    /// Compute all constants for the given parameters.
    ///
    /// `c_ns` comes from the defining integral at relative accuracy
    /// `quad.tol`. When `n > 2s`, `riesz_const` is calibrated as the unique
    /// scalar making the fractional Laplacian of the unit-ball potential of
    /// `f = 1` equal one at the origin; otherwise it is left undefined and
    /// [`KernelConstants::riesz`] reports the failure.
    pub fn compute(params: &FracParams, quad: &QuadSpec) -> Result<Self> {
        let n = params.dim();
        let s = params.s();
        let c_ns = normalization_constant(params, quad)?;
        let riesz_const = if params.riesz_permitted() {
            calibrate_riesz(params, c_ns, quad)?
        } else {
            f64::NAN
        };
        Ok(Self {
            n,
            s,
            c_ns,
            poisson_const: poisson_normalization(n, s),
            g0_const: g0_normalization(n, s),
            riesz_const,
        })
    }

    #[inline]
    pub fn c_ns(&self) -> f64 {
        self.c_ns
    }

    #[inline]
    pub fn poisson(&self) -> f64 {
        self.poisson_const
    }

    #[inline]
    pub fn g0(&self) -> f64 {
        self.g0_const
    }

    pub fn riesz(&self) -> Result<f64> {
        if self.riesz_const.is_finite() {
            Ok(self.riesz_const)
        } else {
            Err(Error::RieszInvalid {
                n: self.n as u32,
                s: self.s,
            })
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.s
    }
}

/// Poisson-kernel normalization `Gamma(n/2) sin(pi s) / pi^{n/2+1}`.
pub fn poisson_normalization(n: usize, s: f64) -> f64 {
    gamma(n as f64 / 2.0) * libm::sin(PI * s) / libm::pow(PI, n as f64 / 2.0 + 1.0)
}

/// Bulk-profile normalization `2^{-2s} Gamma(n/2) / (Gamma((n+2s)/2) Gamma(1+s))`.
pub fn g0_normalization(n: usize, s: f64) -> f64 {
    libm::pow(2.0, -2.0 * s) * gamma(n as f64 / 2.0)
        / (gamma((n as f64 + 2.0 * s) / 2.0) * gamma(1.0 + s))
}

/// Operator normalization `C_{n,s}`: reciprocal of
/// `I(n,s) = ∫_{R^n} (1 - cos z_1) / |z|^{n+2s} dz`.
///
/// The orthogonal coordinates integrate out exactly
/// (`∫_{R^{n-1}} (1+|t|^2)^{-(n+2s)/2} dt = pi^{(n-1)/2} Gamma((2s+1)/2) / Gamma((n+2s)/2)`),
/// leaving the one-dimensional integral, which is split at 1: a Taylor core
/// handles the `z = 0` singularity, oscillation-resolving panels carry the
/// middle range, and a four-term integration-by-parts expansion closes the
/// tail. Refinement at two rule orders supplies the convergence check.
pub fn normalization_constant(params: &FracParams, quad: &QuadSpec) -> Result<f64> {
    let n = params.dim();
    let s = params.s();
    let reduction = if n == 1 {
        1.0
    } else {
        libm::pow(PI, (n as f64 - 1.0) / 2.0) * gamma((2.0 * s + 1.0) / 2.0)
            / gamma((n as f64 + 2.0 * s) / 2.0)
    };
    let coarse = one_dim_defining_integral(s, quad.gl_order.max(6) as usize);
    let fine = one_dim_defining_integral(s, quad.gl_order.max(6) as usize + 6);
    let integral = reduction * fine;
    let diff = reduction * (fine - coarse).abs();
    if diff > quad.tol * integral.abs() {
        return Err(Error::QuadratureNotConverged {
            estimate: diff / integral.abs(),
            tol: quad.tol,
        });
    }
    Ok(1.0 / integral)
}

/// `2 ∫_0^∞ (1 - cos t) / t^{1+2s} dt`.
fn one_dim_defining_integral(s: f64, order: usize) -> f64 {
    let a = 1.0 + 2.0 * s;
    let eps = 1e-4;
    let big = 1200.0;
    // Taylor core on [0, eps]: 1 - cos t = t^2/2 - t^4/24 + t^6/720 - ...
    let core = libm::pow(eps, 2.0 - 2.0 * s) / (2.0 * (2.0 - 2.0 * s))
        - libm::pow(eps, 4.0 - 2.0 * s) / (24.0 * (4.0 - 2.0 * s))
        + libm::pow(eps, 6.0 - 2.0 * s) / (720.0 * (6.0 - 2.0 * s));
    let gl = GaussLegendre::new(order);
    let mut mid = 0.0;
    for (lo, hi) in geometric_panels(eps, 1.0, 24, &[]) {
        mid += gl.integrate(lo, hi, |t| (1.0 - libm::cos(t)) / libm::pow(t, a));
    }
    // Oscillation-resolving panels on [1, big].
    let mut t0 = 1.0;
    while t0 < big {
        let t1 = (t0 + PI / 2.0).min(big);
        mid += gl.integrate(t0, t1, |t| (1.0 - libm::cos(t)) / libm::pow(t, a));
        t0 = t1;
    }
    // Tail: ∫_R^∞ t^{-a} dt - ∫_R^∞ cos t · t^{-a} dt, the second by two
    // rounds of integration by parts (remainder O(R^{-a-4})).
    let r = big;
    let plain = libm::pow(r, -2.0 * s) / (2.0 * s);
    let (sr, cr) = (libm::sin(r), libm::cos(r));
    let c2 = -sr * libm::pow(r, -a - 2.0) + (a + 2.0) * cr * libm::pow(r, -a - 3.0);
    let cos_tail = -sr * libm::pow(r, -a) + a * cr * libm::pow(r, -a - 1.0)
        - a * (a + 1.0) * c2;
    2.0 * (core + mid + plain - cos_tail)
}

/// Poisson kernel of the unit ball.
///
/// Zero for `|y| <= 1`; requires `|x| < 1`.
pub fn poisson_kernel(x: Point, y: Point, params: &FracParams) -> Result<f64> {
    let xn = x.norm();
    if xn >= 1.0 {
        return Err(Error::Domain("poisson kernel needs |x| < 1"));
    }
    let yn_sq = y.norm_sq();
    if yn_sq <= 1.0 {
        return Ok(0.0);
    }
    let n = params.dim();
    let s = params.s();
    let c = poisson_normalization(n, s);
    let ratio = (1.0 - xn * xn) / (yn_sq - 1.0);
    Ok(c * libm::pow(ratio, s) / libm::pow(x.dist(&y), n as f64))
}

/// Vector factor `F(x, y)` with `∇_x P = F · P`:
/// `F_i = -2s x_i / (1 - |x|^2) - n (x_i - y_i) / |x - y|^2`.
pub fn poisson_gradient_factor(x: Point, y: Point, params: &FracParams) -> Result<Point> {
    if x.norm() >= 1.0 || y.norm() <= 1.0 {
        return Err(Error::Domain("factor needs |x| < 1 < |y|"));
    }
    let n = params.dim();
    let s = params.s();
    let a = 1.0 / (1.0 - x.norm_sq());
    let z = x - y;
    let b = 1.0 / z.norm_sq();
    let mut f = Point::zero(n);
    for i in 0..n {
        f.set(i, -2.0 * s * x.get(i) * a - n as f64 * z.get(i) * b);
    }
    Ok(f)
}

/// Pointwise bound on the factor from the triangle inequality:
/// `|F| <= 2s|x|/(1-|x|^2) + n/|x-y|`.
pub fn poisson_factor_bound(x: Point, y: Point, params: &FracParams) -> f64 {
    let s = params.s();
    let n = params.dim() as f64;
    2.0 * s * x.norm() / (1.0 - x.norm_sq()) + n / x.dist(&y)
}

/// Derivative `D^beta_x P(x, y)` for `|beta| <= 3`, computed by the product
/// rule on the factor formula. `beta` lists per-axis orders.
pub fn poisson_derivative(
    x: Point,
    y: Point,
    beta: &[u32],
    params: &FracParams,
) -> Result<f64> {
    let ratio = poisson_derivative_factor(x, y, beta, params)?;
    Ok(ratio * poisson_kernel(x, y, params)?)
}

/// The ratio `D^beta P / P`, which stays well-scaled even where the kernel
/// itself is tiny.
pub fn poisson_derivative_factor(
    x: Point,
    y: Point,
    beta: &[u32],
    params: &FracParams,
) -> Result<f64> {
    let n = params.dim();
    if beta.len() != n {
        return Err(Error::Domain("multi-index length must match dimension"));
    }
    if x.norm() >= 0.5 || y.norm() <= 1.0 {
        return Err(Error::Domain("derivatives need |x| < 1/2 < 1 < |y|"));
    }
    let order: u32 = beta.iter().sum();
    if order > 3 {
        return Err(Error::UnsupportedOrder { order, max: 3 });
    }
    let mut axes = Vec::new();
    for (ax, reps) in beta.iter().enumerate() {
        for _ in 0..*reps {
            axes.push(ax);
        }
    }
    let s = params.s();
    let nf = n as f64;
    let a = 1.0 / (1.0 - x.norm_sq());
    let z = x - y;
    let b = 1.0 / z.norm_sq();
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let f = |j: usize| -2.0 * s * x.get(j) * a - nf * z.get(j) * b;
    let df = |j: usize, k: usize| {
        -2.0 * s * (d(j, k) * a + 2.0 * x.get(j) * x.get(k) * a * a)
            - nf * (d(j, k) * b - 2.0 * z.get(j) * z.get(k) * b * b)
    };
    let ddf = |j: usize, k: usize, l: usize| {
        -2.0 * s
            * (2.0 * d(j, k) * x.get(l) * a * a
                + 2.0 * (d(j, l) * x.get(k) + d(k, l) * x.get(j)) * a * a
                + 8.0 * x.get(j) * x.get(k) * x.get(l) * a * a * a)
            - nf * (-2.0 * d(j, k) * z.get(l) * b * b
                - 2.0 * (d(j, l) * z.get(k) + d(k, l) * z.get(j)) * b * b
                + 8.0 * z.get(j) * z.get(k) * z.get(l) * b * b * b)
    };
    Ok(match axes.as_slice() {
        [] => 1.0,
        [j] => f(*j),
        [j, k] => df(*j, *k) + f(*j) * f(*k),
        [j, k, l] => {
            ddf(*j, *k, *l)
                + df(*j, *k) * f(*l)
                + df(*j, *l) * f(*k)
                + df(*k, *l) * f(*j)
                + f(*j) * f(*k) * f(*l)
        }
        _ => unreachable!(),
    })
}

/// Riesz (fundamental-solution) kernel `riesz_const * |x-y|^{2s-n}`.
pub fn riesz_kernel(
    x: Point,
    y: Point,
    params: &FracParams,
    consts: &KernelConstants,
) -> Result<f64> {
    params.require_riesz()?;
    let d = x.dist(&y);
    if d == 0.0 {
        return Err(Error::Singular);
    }
    Ok(consts.riesz()? * libm::pow(d, 2.0 * params.s() - params.dim() as f64))
}

/// Bulk profile `g0(x) = g0_const * (1 - |x|^2)_+^s`.
pub fn bulk_solution_g0(x: Point, params: &FracParams) -> f64 {
    let r_sq = x.norm_sq();
    if r_sq >= 1.0 {
        0.0
    } else {
        g0_normalization(params.dim(), params.s()) * libm::pow(1.0 - r_sq, params.s())
    }
}

/// `g0` sampled on a symmetric box with zero exterior.
pub fn g0_field(params: &FracParams, half: f64, nodes: usize) -> Result<Field> {
    let grid = Grid::sample_symmetric(params.dim(), half, nodes, |p| bulk_solution_g0(p, params))?;
    Field::new(grid, Exterior::Zero, true, params)
}

/// Unit-ball potential of `f = 1` with unit kernel constant:
/// `q(x) = ∫_{B_1} |x-y|^{2s-n} dy = (1/2s) ∫_{S^{n-1}} (t_+^{2s} - t_-^{2s}) dσ(θ)`
/// where `[t_-, t_+]` is the ray-ball intersection. The polar reduction
/// removes the singularity entirely.
pub(crate) fn unit_ball_unit_potential(x: Point, s: f64, ang: &AngularRule) -> f64 {
    let mut acc = 0.0;
    for (dir, w) in ang.dirs.iter().zip(&ang.weights) {
        if let Some((t0, t1)) = ray_ball_interval(x, *dir, 1.0) {
            acc += w * (libm::pow(t1, 2.0 * s) - libm::pow(t0, 2.0 * s));
        }
    }
    acc / (2.0 * s)
}

/// Calibrate the fundamental-solution constant: the scalar `A` for which
/// `(-Δ)^s [A q] = 1` at the origin, `q` the unit-kernel potential above.
fn calibrate_riesz(params: &FracParams, c_ns: f64, quad: &QuadSpec) -> Result<f64> {
    let n = params.dim();
    let s = params.s();
    let ang = AngularRule::new(n, 48.max(quad.ang_order as usize));
    let q = |z: Point| unit_ball_unit_potential(z, s, &ang);
    // Far field: q(z) -> vol(B_1) |z|^{2s-n} up to O(|z|^{-2}) corrections.
    let far = Exterior::RadialPower {
        coeff: ball_volume(n),
        exponent: 2.0 * s - n as f64,
    };
    let x0 = Point::zero(n);
    // Hessian trace of q at 0 by central differences.
    let fd = 1e-3;
    let mut tr = 0.0;
    for ax in 0..n {
        let e = Point::axis(n, ax, fd);
        tr += (q(x0 + e) - 2.0 * q(x0) + q(x0 - e)) / (fd * fd);
    }
    let mut spec = quad.clone();
    spec.r_min = spec.r_min.min(1e-4);
    spec.n_panels = spec.n_panels.max(32);
    spec.radial_breaks.push(1.0);
    let out = crate::operator::fractional_apply(&q, &far, 24.0, x0, n, s, c_ns, &spec, tr);
    let d = out.value;
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::QuadratureNotConverged {
            estimate: out.error_estimate,
            tol: quad.tol,
        });
    }
    Ok(1.0 / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadSpec {
        QuadSpec::default_for_spacing(0.01)
    }

    #[test]
    fn normalization_one_dim_half() {
        // For n = 1, s = 1/2 the defining integral is pi.
        let params = FracParams::new(1, 0.5, None, None).unwrap();
        let c = normalization_constant(&params, &quad()).unwrap();
        assert!(
            (c - 1.0 / PI).abs() < 1e-8,
            "C(1, 1/2) = {c}, want {}",
            1.0 / PI
        );
    }

    #[test]
    fn normalization_positive_everywhere() {
        for n in 1..=3u32 {
            for s in [0.2, 0.5, 0.8] {
                let params = FracParams::new(n, s, None, None).unwrap();
                let c = normalization_constant(&params, &quad()).unwrap();
                assert!(c > 0.0, "C({n},{s}) = {c}");
            }
        }
    }

    #[test]
    fn poisson_kernel_values() {
        // Inside the ball the kernel vanishes.
        let params = FracParams::new(1, 0.5, None, None).unwrap();
        assert_eq!(
            poisson_kernel(Point::d1(0.0), Point::d1(0.5), &params).unwrap(),
            0.0
        );
        // n = 1, s = 1/2, x = 0, y = 2: (1/pi) (1/3)^{1/2} (1/2).
        let v = poisson_kernel(Point::d1(0.0), Point::d1(2.0), &params).unwrap();
        let want = 1.0 / (2.0 * libm::sqrt(3.0) * PI);
        assert!((v - want).abs() < 1e-14, "{v} vs {want}");
        // Positive whenever |x| < 1 < |y|.
        let params2 = FracParams::new(2, 0.7, None, None).unwrap();
        let v = poisson_kernel(Point::d2(0.3, -0.4), Point::d2(1.2, 0.9), &params2).unwrap();
        assert!(v > 0.0);
        assert!(poisson_kernel(Point::d1(1.0), Point::d1(2.0), &params).is_err());
    }

    #[test]
    fn gradient_factor_at_origin() {
        // x = 0 gives F_i = n y_i / |y|^2.
        let params = FracParams::new(2, 0.6, None, None).unwrap();
        let y = Point::d2(2.0, 0.0);
        let f = poisson_gradient_factor(Point::zero(2), y, &params).unwrap();
        assert!((f.get(0) - 1.0).abs() < 1e-15);
        assert!(f.get(1).abs() < 1e-15);
        let y = Point::d2(1.5, -1.0);
        let f = poisson_gradient_factor(Point::zero(2), y, &params).unwrap();
        let scale = 2.0 / y.norm_sq();
        assert!((f.get(0) - scale * y.get(0)).abs() < 1e-14);
        assert!((f.get(1) - scale * y.get(1)).abs() < 1e-14);
    }

    #[test]
    fn factor_bound_holds_exactly() {
        let params = FracParams::new(2, 0.6, None, None).unwrap();
        let mut rng = crate::rng::Rng::new(0x5EED);
        for _ in 0..10_000 {
            let x = Point::d2(rng.range(-0.35, 0.35), rng.range(-0.35, 0.35));
            let y = Point::d2(rng.range(-10.0, 10.0), rng.range(-10.0, 10.0));
            if x.norm() >= 0.5 || y.norm() <= 1.0 {
                continue;
            }
            let f = poisson_gradient_factor(x, y, &params).unwrap();
            assert!(f.norm() <= poisson_factor_bound(x, y, &params));
        }
    }

    #[test]
    fn derivative_zeroth_and_first_consistency() {
        let params = FracParams::new(2, 0.6, None, None).unwrap();
        let x = Point::d2(0.2, 0.0);
        let y = Point::d2(1.5, 0.5);
        let p = poisson_kernel(x, y, &params).unwrap();
        assert_eq!(poisson_derivative(x, y, &[0, 0], &params).unwrap(), p);
        let f = poisson_gradient_factor(x, y, &params).unwrap();
        for ax in 0..2 {
            let mut beta = [0u32; 2];
            beta[ax] = 1;
            let d = poisson_derivative(x, y, &beta, &params).unwrap();
            let expect = f.get(ax) * p;
            assert!(
                (d - expect).abs() <= 1e-12 * expect.abs().max(1e-300),
                "axis {ax}"
            );
        }
        assert!(matches!(
            poisson_derivative(x, y, &[4, 0], &params),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // Central differences with Richardson extrapolation.
        let params = FracParams::new(2, 0.6, None, None).unwrap();
        let x = Point::d2(0.2, 0.0);
        let y = Point::d2(1.5, 0.5);
        let pk = |x: Point| poisson_kernel(x, y, &params).unwrap();
        let fd_first = |ax: usize, h: f64| {
            let e = Point::axis(2, ax, h);
            (pk(x + e) - pk(x - e)) / (2.0 * h)
        };
        for ax in 0..2 {
            let mut beta = [0u32; 2];
            beta[ax] = 1;
            let exact = poisson_derivative(x, y, &beta, &params).unwrap();
            let d1 = fd_first(ax, 1e-4);
            let d2 = fd_first(ax, 5e-5);
            let richardson = (4.0 * d2 - d1) / 3.0;
            assert!(
                (exact - richardson).abs() <= 1e-6 * exact.abs().max(1.0),
                "axis {ax}: {exact} vs {richardson}"
            );
        }
        // Second derivative d^2/dx1^2.
        let exact = poisson_derivative(x, y, &[2, 0], &params).unwrap();
        let h = 1e-3;
        let e = Point::axis(2, 0, h);
        let fd = (pk(x + e) - 2.0 * pk(x) + pk(x - e)) / (h * h);
        let e2 = Point::axis(2, 0, h / 2.0);
        let fd2 = (pk(x + e2) - 2.0 * pk(x) + pk(x - e2)) / (h * h / 4.0);
        let rich = (4.0 * fd2 - fd) / 3.0;
        assert!(
            (exact - rich).abs() <= 1e-6 * exact.abs().max(1.0),
            "{exact} vs {rich}"
        );
    }

    #[test]
    fn g0_values() {
        // n = 1, s = 1/2: the constant collapses to exactly 1.
        let params = FracParams::new(1, 0.5, None, None).unwrap();
        assert!((bulk_solution_g0(Point::d1(0.0), &params) - 1.0).abs() < 1e-14);
        assert_eq!(bulk_solution_g0(Point::d1(1.0), &params), 0.0);
        assert_eq!(bulk_solution_g0(Point::d1(-2.5), &params), 0.0);
    }

    #[test]
    fn riesz_kernel_symmetry_and_errors() {
        let params = FracParams::new(3, 0.5, None, None).unwrap();
        let consts = KernelConstants::compute(&params, &quad()).unwrap();
        let x = Point::d3(0.1, 0.2, -0.3);
        let y = Point::d3(1.0, -0.5, 0.4);
        let a = riesz_kernel(x, y, &params, &consts).unwrap();
        let b = riesz_kernel(y, x, &params, &consts).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            riesz_kernel(x, x, &params, &consts),
            Err(Error::Singular)
        ));
        // |x - y| = 2 gives riesz_const * 2^{2s-3} = riesz_const / 4 at s = 1/2.
        let y2 = Point::d3(2.1, 0.2, -0.3);
        let v = riesz_kernel(x, y2, &params, &consts).unwrap();
        let want = consts.riesz().unwrap() * libm::pow(2.0, 2.0 * 0.5 - 3.0);
        assert!((v - want).abs() < 1e-14 * want);
        // n = 1, s = 3/4 must refuse.
        let bad = FracParams::new(1, 0.75, None, None).unwrap();
        let bad_consts = KernelConstants::compute(&bad, &quad()).unwrap();
        assert!(matches!(
            riesz_kernel(Point::d1(0.0), Point::d1(1.0), &bad, &bad_consts),
            Err(Error::RieszInvalid { .. })
        ));
    }

    #[test]
    fn unit_potential_polar_reduction() {
        // n = 1 has the closed form q(r) = ((1-r)^{2s} + (1+r)^{2s}) / 2s inside.
        let s = 0.25;
        let ang = AngularRule::new(1, 8);
        for r in [0.0, 0.3, 0.7] {
            let q = unit_ball_unit_potential(Point::d1(r), s, &ang);
            let want =
                (libm::pow(1.0 - r, 2.0 * s) + libm::pow(1.0 + r, 2.0 * s)) / (2.0 * s);
            assert!((q - want).abs() < 1e-12, "r={r}: {q} vs {want}");
        }
        // And outside: ((r+1)^{2s} - (r-1)^{2s}) / 2s.
        let q = unit_ball_unit_potential(Point::d1(2.0), s, &ang);
        let want = (libm::pow(3.0, 2.0 * s) - libm::pow(1.0, 2.0 * s)) / (2.0 * s);
        assert!((q - want).abs() < 1e-12);
    }
}
