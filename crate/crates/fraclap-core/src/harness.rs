//! Experiment layer: measured regularity ratios across solution families,
//! the blow-up rescaling procedure with its inequality audit, far-field tail
//! mass, and decay certificates on unbounded domains.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Exterior, Field, Grid};
use crate::kernels::KernelConstants;
use crate::norms::{
    derivative_grid, dini_modulus, full_norm, holder_seminorm, multi_indices, Region,
};
use crate::operator::{evaluate, rescale_field};
use crate::params::{holder_class, FracParams, HolderClass, INTEGER_DETECTION_TOL};
use crate::point::Point;
use crate::potentials::poisson_extend;
use crate::quad::{geometric_panels, AngularRule, GaussLegendre, QuadSpec};
use crate::rng::Rng;
use crate::special::sphere_area;

/// Which interior estimate a ratio experiment measures: bounded data, Hölder
/// data, or Dini-modulated data at an integer target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateKind {
    Holder,
    Schauder,
    DiniSchauder,
}

/// `LHS / RHS` of the interior estimate: the measured norm of `u` on
/// `B_{1/2}` in the class given by the target exponent, against the data
/// norm on `B_1` plus the local sup of `u`.
pub fn regularity_ratio(
    u: &Field,
    f: &Field,
    params: &FracParams,
    kind: EstimateKind,
) -> Result<f64> {
    if !u.nonneg() {
        return Err(Error::SignViolation);
    }
    let s = params.s();
    let class = match kind {
        EstimateKind::Holder => holder_class(s, None)?,
        EstimateKind::Schauder => {
            let alpha = params
                .alpha()
                .ok_or(Error::ClassMismatch("Hölder data needs alpha"))?;
            holder_class(s, Some(alpha))?
        }
        EstimateKind::DiniSchauder => {
            let alpha = params
                .alpha()
                .ok_or(Error::ClassMismatch("Dini data needs alpha"))?;
            let t = 2.0 * s + alpha;
            let nearest = libm::round(t);
            if (t - nearest).abs() > INTEGER_DETECTION_TOL {
                return Err(Error::ClassMismatch(
                    "integer-target estimate needs 2s + alpha integer",
                ));
            }
            HolderClass::DiniTarget { k: nearest as u32 }
        }
    };
    let half = Region::Ball {
        center: Point::zero(params.dim()),
        radius: 0.5,
    };
    let unit = Region::Ball {
        center: Point::zero(params.dim()),
        radius: 1.0,
    };
    let lhs = full_norm(u.grid(), class, half)?.total();

    let f_sup = sup_over(f.grid(), unit)?;
    let f_norm = match kind {
        EstimateKind::Holder => f_sup,
        EstimateKind::Schauder => {
            let alpha = params.alpha().unwrap();
            f_sup + holder_seminorm(f.grid(), None, alpha, unit)?.0
        }
        EstimateKind::DiniSchauder => {
            let alpha = params.alpha().unwrap();
            f_sup + dini_modulus(f.grid(), None, unit, Some(alpha))?.integral_alpha
        }
    };
    let u_sup = sup_over(u.grid(), unit)?;
    let rhs = f_norm + u_sup;
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / rhs)
}

fn sup_over(g: &Grid, region: Region) -> Result<f64> {
    let mut sup = f64::NEG_INFINITY;
    for flat in 0..g.len() {
        let p = g.node(g.unflatten(flat));
        if region.contains(p) {
            sup = sup.max(g.values()[flat].abs());
        }
    }
    if sup.is_finite() {
        Ok(sup)
    } else {
        Err(Error::EmptyRegion)
    }
}

/// One row of the refined-versus-global experiment.
#[derive(Clone, Copy, Debug)]
pub struct TrialRow {
    pub trial: u32,
    pub mass: f64,
    /// Measured interior-estimate ratio; invariant under the mass multiplier.
    pub regularity_ratio: f64,
    /// `sup_{R^n} u / sup_{B_1} u`: how wasteful a global-norm bound is.
    pub global_local_ratio: f64,
    pub sup_global: f64,
    pub sup_local: f64,
    pub null: bool,
}

/// Random compactly supported spiky shell data on `2 < |y| < 4`: a few
/// narrow triangular bumps, padded with zero knots so the model vanishes
/// outside the support. The piecewise-linear shell table represents the sum
/// of triangles exactly.
pub fn random_far_shell_data(rng: &mut Rng) -> Exterior {
    let spikes = 2 + rng.index(3);
    let mut tris: Vec<(f64, f64, f64)> = Vec::new();
    for _ in 0..spikes {
        let center = rng.range(2.2, 3.8);
        let width = rng.range(0.01, 0.05);
        let height = rng.range(0.3, 1.0);
        tris.push((center, width, height));
    }
    let mut radii: Vec<f64> = vec![1.5, 2.0, 4.0];
    for &(c, w, _) in &tris {
        radii.push(c - w);
        radii.push(c);
        radii.push(c + w);
    }
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let values: Vec<f64> = radii
        .iter()
        .map(|&r| {
            tris.iter()
                .map(|&(c, w, h)| {
                    let t = 1.0 - (r - c).abs() / w;
                    if t > 0.0 {
                        h * t
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect();
    Exterior::shell_table(radii, values).expect("knots are sorted and positive")
}

/// Seeded family of s-harmonic extensions of far-concentrated data, compared
/// at several mass multipliers.
///
/// By linearity the extension scales with the multiplier, so the regularity
/// ratio is invariant per trial, while the global/local sup ratio exposes how
/// large the global norm is relative to the local one.
pub fn refined_vs_global_experiment(
    seed: u64,
    count: u32,
    multipliers: &[f64],
    params: &FracParams,
    quad: &QuadSpec,
    nodes: usize,
) -> Result<Vec<TrialRow>> {
    let n = params.dim();
    let mut rows = Vec::new();
    for trial in 0..count {
        let mut rng = Rng::stream(seed, trial as u64);
        let data = random_far_shell_data(&mut rng);
        // Sample the extension over a box covering B_1.
        let grid = Grid::sample_symmetric(n, 1.02, nodes, |p| {
            if p.norm() < 1.0 - 1e-12 {
                poisson_extend(&data, p, params, quad)
                    .map(|v| v.max(0.0))
                    .unwrap_or(0.0)
            } else {
                data.eval(p)
            }
        })?;
        let base = Field::new(grid, data.clone(), true, params)?;
        let f_zero = Field::new(
            Grid::sample_symmetric(n, 1.02, 9, |_| 0.0)?,
            Exterior::Zero,
            true,
            params,
        )?;
        let data_sup = match &data {
            Exterior::ShellTable { values, .. } => {
                values.iter().fold(0.0f64, |m, v| m.max(*v))
            }
            _ => 0.0,
        };
        for &m in multipliers {
            if m == 0.0 {
                rows.push(TrialRow {
                    trial,
                    mass: m,
                    regularity_ratio: 0.0,
                    global_local_ratio: 0.0,
                    sup_global: 0.0,
                    sup_local: 0.0,
                    null: true,
                });
                continue;
            }
            let u = base.scaled(m, params)?;
            let ratio = regularity_ratio(&u, &f_zero, params, EstimateKind::Schauder)?;
            let unit = Region::Ball {
                center: Point::zero(n),
                radius: 1.0,
            };
            let sup_local = sup_over(u.grid(), unit)?;
            let sup_global = sup_local.max(m * data_sup);
            rows.push(TrialRow {
                trial,
                mass: m,
                regularity_ratio: ratio,
                global_local_ratio: sup_global / sup_local,
                sup_global,
                sup_local,
                null: false,
            });
        }
    }
    Ok(rows)
}

/// Grid argmax of `S(x) = w(x) (r_k - |x - x_k|)^exponent` over the closed
/// ball, ties broken by the lowest flat (lexicographic) index.
pub fn auxiliary_max(
    weights: &Grid,
    x_k: Point,
    r_k: f64,
    exponent: f64,
) -> Result<(Point, f64)> {
    if !(r_k > weights.min_spacing()) {
        return Err(Error::EmptyBall);
    }
    let mut best: Option<(f64, usize)> = None;
    for flat in 0..weights.len() {
        let p = weights.node(weights.unflatten(flat));
        let d = p.dist(&x_k);
        if d > r_k {
            continue;
        }
        let w = weights.values()[flat];
        if w <= 0.0 {
            return Err(Error::NotPositive { value: w });
        }
        let s_val = w * libm::pow(r_k - d, exponent);
        // Strictly-greater keeps the lowest flat index on ties.
        if best.map_or(true, |(b, _)| s_val > b) {
            best = Some((s_val, flat));
        }
    }
    match best {
        Some((value, flat)) => Ok((weights.node(weights.unflatten(flat)), value)),
        None => Err(Error::EmptyBall),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupMode {
    Plain,
    Gradient,
}

/// Model nonlinearity driving the rescaled equation.
#[derive(Clone, Copy, Debug)]
pub enum Nonlinearity {
    /// `f(x, t) = coeff * t^p`.
    Power { coeff: f64 },
    /// `coeff * t^p` plus a gradient term `b |∇u|^q`.
    PowerWithGradient { coeff: f64, b: f64, q: f64 },
}

/// One audited inequality: measured slack (positive = violated by that
/// much) and whether it passed within the grid allowance.
#[derive(Clone, Copy, Debug)]
pub struct Audit {
    pub slack: f64,
    pub allowance: f64,
    pub pass: bool,
}

impl Audit {
    fn check(slack: f64, allowance: f64) -> Self {
        Self {
            slack,
            allowance,
            pass: slack <= allowance,
        }
    }
}

/// Full record of one rescaling step.
#[derive(Clone, Debug)]
pub struct BlowupTrace {
    pub k: u32,
    pub mode: BlowupMode,
    pub x_k: Point,
    /// Distance from `x_k` to the boundary of the sampled box.
    pub d_k: f64,
    pub r_k: f64,
    pub a_k: Point,
    pub lambda_k: f64,
    pub v: Field,
    pub v_at_zero: f64,
    /// `2k λ_k <= r_k - |a_k - x_k|`.
    pub audit_a: Audit,
    /// `r_k - |a_k - x_k| <= 2 (r_k - |x - x_k|)` on `B_{k λ_k}(a_k)`.
    pub audit_b: Audit,
    /// `v <= 2^{2s/(p-1)}` on `B_k(0)` (plain) or the gradient-mode bound.
    pub audit_c: Audit,
    /// Normalization at the origin.
    pub audit_d: Audit,
    /// Tail mass at R in {8, 16, 32}.
    pub tail_b: Vec<(f64, f64)>,
    pub pde_residual: f64,
}

/// One step of the rescaling procedure with its inequality audit.
///
/// The audited inequalities are exact consequences of the maximization; the
/// grid argmax is the only error source, so each audit carries an allowance
/// of two grid cells' worth of perturbation.
#[allow(clippy::too_many_arguments)]
pub fn blowup_step(
    u: &Field,
    model: &Nonlinearity,
    x_k: Point,
    k: u32,
    params: &FracParams,
    consts: &KernelConstants,
    quad: &QuadSpec,
    mode: BlowupMode,
) -> Result<BlowupTrace> {
    let p = params.require_p()?;
    let s = params.s();
    let n = params.dim();
    let e = 2.0 * s / (p - 1.0);
    let grid = u.grid();
    let h_u = grid.min_spacing();
    let cell = 2.0 * h_u * libm::sqrt(n as f64);

    let u_xk = u.eval(x_k);
    if !(u_xk > 0.0) {
        return Err(Error::NotPositive { value: u_xk });
    }

    // Gradient-mode machinery.
    let mut grad_norm_grid: Option<Grid> = None;
    if mode == BlowupMode::Gradient {
        if s <= 0.5 {
            return Err(Error::GradientUnavailable("gradient mode needs s > 1/2"));
        }
        if let Nonlinearity::PowerWithGradient { q, .. } = model {
            let q_bound = 2.0 * s * p / (2.0 * s + p - 1.0);
            if !(*q > 0.0 && *q < q_bound) {
                return Err(Error::Supercritical {
                    p: *q,
                    bound: q_bound,
                });
            }
        }
        let mut norm_grid = grid.clone();
        let mut comps = Vec::new();
        for mi in multi_indices(n, 1) {
            comps.push(derivative_grid(grid, &mi)?);
        }
        for flat in 0..norm_grid.len() {
            let mut sq = 0.0;
            let mut ok = true;
            for (dg, mask) in &comps {
                if !mask[flat] {
                    ok = false;
                    break;
                }
                sq += dg.values()[flat] * dg.values()[flat];
            }
            // Boundary cells fall back to zero gradient; the maximization
            // ball must stay clear of them anyway.
            norm_grid.values_mut()[flat] = if ok { libm::sqrt(sq) } else { 0.0 };
        }
        grad_norm_grid = Some(norm_grid);
    }

    // M(x) and the auxiliary weight grid.
    let m_of = |u_val: f64, g_val: f64| -> f64 {
        match mode {
            BlowupMode::Plain => u_val,
            BlowupMode::Gradient => {
                libm::pow(u_val, (p - 1.0) / (2.0 * s))
                    + libm::pow(g_val, (p - 1.0) / (2.0 * s + p - 1.0))
            }
        }
    };
    let m_xk = match mode {
        BlowupMode::Plain => u_xk,
        BlowupMode::Gradient => {
            let g = grad_norm_grid.as_ref().unwrap();
            let gv = if g.contains(x_k) { g.interpolate(x_k) } else { 0.0 };
            m_of(u_xk, gv)
        }
    };

    let r_k = match mode {
        BlowupMode::Plain => 2.0 * k as f64 * libm::pow(u_xk, -(p - 1.0) / (2.0 * s)),
        BlowupMode::Gradient => 2.0 * k as f64 / m_xk,
    };
    // Distance to the sampled boundary plays the role of d_k.
    let lo = grid.min_corner();
    let hi = grid.max_corner();
    let mut d_k = f64::INFINITY;
    for ax in 0..n {
        d_k = d_k
            .min(x_k.get(ax) - lo.get(ax))
            .min(hi.get(ax) - x_k.get(ax));
    }
    if r_k >= d_k {
        return Err(Error::Margin("maximization ball exceeds the sampled box"));
    }

    let weight_grid = match mode {
        BlowupMode::Plain => grid.clone(),
        BlowupMode::Gradient => {
            let g = grad_norm_grid.as_ref().unwrap();
            let mut w = grid.clone();
            for flat in 0..w.len() {
                let m = m_of(grid.values()[flat], g.values()[flat]);
                w.values_mut()[flat] = libm::pow(m, e);
            }
            w
        }
    };
    let (a_k, _s_val) = auxiliary_max(&weight_grid, x_k, r_k, e)?;
    let u_ak = u.eval(a_k);
    let m_ak = match mode {
        BlowupMode::Plain => u_ak,
        BlowupMode::Gradient => {
            let g = grad_norm_grid.as_ref().unwrap();
            m_of(u_ak, g.interpolate(a_k))
        }
    };
    let lambda_k = match mode {
        BlowupMode::Plain => libm::pow(u_ak, -(p - 1.0) / (2.0 * s)),
        BlowupMode::Gradient => 1.0 / m_ak,
    };

    // v(x) = u(lambda x + a) / normalizer, with exact division on the grid.
    let normalizer = match mode {
        BlowupMode::Plain => u_ak,
        BlowupMode::Gradient => libm::pow(m_ak, e),
    };
    let rescaled = rescale_field(u, lambda_k, a_k, params)?;
    let mut v_grid = rescaled.grid().clone();
    for val in v_grid.values_mut() {
        *val /= normalizer;
    }
    let v_ext = rescaled.exterior().scaled(1.0 / normalizer);
    let v = Field::new(v_grid, v_ext, u.nonneg(), params)?;
    let v_at_zero = v.eval(Point::zero(n));

    // Audit A: 2k lambda <= r_k - |a_k - x_k|.
    let reach = r_k - a_k.dist(&x_k);
    let audit_a = Audit::check(2.0 * k as f64 * lambda_k - reach, cell);

    // Audit B over the grid points of B_{k lambda}(a_k).
    let mut slack_b = f64::NEG_INFINITY;
    for flat in 0..grid.len() {
        let x = grid.node(grid.unflatten(flat));
        if x.dist(&a_k) > k as f64 * lambda_k {
            continue;
        }
        slack_b = slack_b.max(reach - 2.0 * (r_k - x.dist(&x_k)));
    }
    let audit_b = Audit::check(
        if slack_b.is_finite() { slack_b } else { 0.0 },
        2.0 * cell,
    );

    // Audit C: bound on v over B_k(0), with an allowance of two v-cells of
    // measured steepness.
    let h_v = v.grid().min_spacing();
    let mut v_lip = 0.0f64;
    let mut slack_c = f64::NEG_INFINITY;
    let bound_c = match mode {
        BlowupMode::Plain => libm::pow(2.0, e),
        BlowupMode::Gradient => libm::pow(2.0, e),
    };
    let vg = v.grid();
    for flat in 0..vg.len() {
        let x = vg.node(vg.unflatten(flat));
        if x.norm() > k as f64 {
            continue;
        }
        let val = match mode {
            BlowupMode::Plain => vg.values()[flat],
            BlowupMode::Gradient => {
                // (v^{(p-1)/2s} + |∇v|^{(p-1)/(2s+p-1)})^{2s/(p-1)} <= 2^e.
                let gv = v_gradient_norm(&v, x);
                libm::pow(
                    libm::pow(vg.values()[flat].max(0.0), (p - 1.0) / (2.0 * s))
                        + libm::pow(gv, (p - 1.0) / (2.0 * s + p - 1.0)),
                    e,
                )
            }
        };
        slack_c = slack_c.max(val - bound_c);
        let idx = vg.unflatten(flat);
        for ax in 0..n {
            if idx[ax] + 1 < vg.shape()[ax] {
                let mut up = idx;
                up[ax] += 1;
                v_lip = v_lip.max(
                    (vg.value_at(up) - vg.values()[flat]).abs() / vg.spacing()[ax],
                );
            }
        }
    }
    let audit_c = Audit::check(
        if slack_c.is_finite() { slack_c } else { 0.0 },
        2.0 * h_v * v_lip * libm::sqrt(n as f64) + 1e-12,
    );

    // Audit D: normalization at the origin.
    let audit_d = match mode {
        BlowupMode::Plain => Audit {
            slack: (v_at_zero - 1.0).abs(),
            allowance: 0.0,
            pass: v_at_zero == 1.0,
        },
        BlowupMode::Gradient => {
            let gv = v_gradient_norm(&v, Point::zero(n));
            let combo = libm::pow(v_at_zero, (p - 1.0) / (2.0 * s))
                + libm::pow(gv, (p - 1.0) / (2.0 * s + p - 1.0));
            Audit::check((combo - 1.0).abs(), 1e-9)
        }
    };

    // Tail masses over increasing truncation radii.
    let mut tails = Vec::new();
    for r in [8.0, 16.0, 32.0] {
        tails.push((r, tail_mass(&v, r, params, consts)));
    }

    // Residual of the rescaled equation at interior check points.
    let mut residual = 0.0f64;
    let offs = 0.5f64.min(k as f64 * 0.25);
    let mut pts = vec![Point::zero(n)];
    for ax in 0..n {
        pts.push(Point::axis(n, ax, offs));
        pts.push(Point::axis(n, ax, -offs));
    }
    for pt in pts {
        if v.grid().margin_cells(pt) < 2.0 {
            continue;
        }
        let lhs = evaluate(&v, pt, params, consts, quad)?.value;
        let rhs = rescaled_rhs(&v, pt, model, lambda_k, params, mode);
        residual = residual.max((lhs - rhs).abs());
    }

    Ok(BlowupTrace {
        k,
        mode,
        x_k,
        d_k,
        r_k,
        a_k,
        lambda_k,
        v,
        v_at_zero,
        audit_a,
        audit_b,
        audit_c,
        audit_d,
        tail_b: tails,
        pde_residual: residual,
    })
}

fn v_gradient_norm(v: &Field, x: Point) -> f64 {
    let n = v.dim();
    let mut sq = 0.0;
    for ax in 0..n {
        let h = v.grid().spacing()[ax];
        let e = Point::axis(n, ax, h);
        let d = (v.eval(x + e) - v.eval(x - e)) / (2.0 * h);
        sq += d * d;
    }
    libm::sqrt(sq)
}

/// Right-hand side of the rescaled equation at a point.
fn rescaled_rhs(
    v: &Field,
    x: Point,
    model: &Nonlinearity,
    lambda: f64,
    params: &FracParams,
    mode: BlowupMode,
) -> f64 {
    let p = params.p().unwrap_or(2.0);
    let s = params.s();
    let vv = v.eval(x).max(0.0);
    match (model, mode) {
        (Nonlinearity::Power { coeff }, _) => coeff * libm::pow(vv, p),
        (Nonlinearity::PowerWithGradient { coeff, b, q }, BlowupMode::Gradient) => {
            let grad = v_gradient_norm(v, x);
            let scale = libm::pow(
                lambda,
                (2.0 * s * p - (2.0 * s + p - 1.0) * q) / (p - 1.0),
            );
            scale * b * libm::pow(grad, *q) + coeff * libm::pow(vv, p)
        }
        (Nonlinearity::PowerWithGradient { coeff, .. }, BlowupMode::Plain) => {
            coeff * libm::pow(vv, p)
        }
    }
}

/// `C_{n,s} ∫_{|x|>R} v(x)/|x|^{n+2s} dx`, evaluated from the exterior model.
pub fn tail_mass(v: &Field, r: f64, params: &FracParams, consts: &KernelConstants) -> f64 {
    let n = params.dim();
    let s = params.s();
    let omega = sphere_area(n);
    let ext = v.exterior();
    if let Some(sup) = ext.support_radius() {
        if sup <= r {
            return 0.0;
        }
    }
    if let Exterior::Constant(c) = ext {
        return consts.c_ns() * c * omega * libm::pow(r, -2.0 * s) / (2.0 * s);
    }
    let ang = AngularRule::new(n, 16);
    let gl = GaussLegendre::new(8);
    let r_cut = if ext.is_oscillatory() { (r * 128.0).max(4096.0) } else { 1e6 };
    let mut total = 0.0;
    let mut a = r;
    while a < r_cut {
        let b = (a * 2.0).min(r_cut);
        let panels = if ext.is_oscillatory() {
            let count = libm::ceil((b - a) / (core::f64::consts::PI / 2.0)) as usize;
            let w = (b - a) / count as f64;
            (0..count).map(|i| (a + i as f64 * w, a + (i + 1) as f64 * w)).collect()
        } else {
            geometric_panels(a, b, 6, &ext.break_radii())
        };
        for (lo, hi) in panels {
            total += gl.integrate(lo, hi, |t| {
                let mut sum = 0.0;
                for (dir, w) in ang.dirs.iter().zip(&ang.weights) {
                    sum += w * ext.eval(*dir * t);
                }
                sum * libm::pow(t, -1.0 - 2.0 * s)
            });
        }
        a = b;
    }
    // Power closing.
    let growth = ext.growth_exponent();
    if !ext.is_oscillatory() && growth > f64::NEG_INFINITY && 2.0 * s - growth > 0.0 {
        let mut sum = 0.0;
        for (dir, w) in ang.dirs.iter().zip(&ang.weights) {
            sum += w * ext.eval(*dir * r_cut);
        }
        total += sum * libm::pow(r_cut, -2.0 * s) / (2.0 * s - growth);
    }
    consts.c_ns() * total
}

/// Domains for the decay certificates, described through their boundary
/// distance.
#[derive(Clone, Copy, Debug)]
pub enum DomainDesc {
    WholeSpace,
    /// `{ |x| > radius }`; certificates sample `|x| >= 2 radius`.
    ExteriorOf { radius: f64 },
    /// `B_radius \ {0}`; certificates sample `0 < |x| < radius / 2`.
    PuncturedBall { radius: f64 },
    Ball { radius: f64 },
    /// `{ x_axis > 0 }`.
    HalfSpace { axis: usize },
    /// `{ |x_axis| < half_width }`.
    Slab { axis: usize, half_width: f64 },
}

impl DomainDesc {
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            DomainDesc::WholeSpace => true,
            DomainDesc::ExteriorOf { radius } => p.norm() > radius,
            DomainDesc::PuncturedBall { radius } => {
                let r = p.norm();
                r > 0.0 && r < radius
            }
            DomainDesc::Ball { radius } => p.norm() < radius,
            DomainDesc::HalfSpace { axis } => p.get(axis) > 0.0,
            DomainDesc::Slab { axis, half_width } => p.get(axis).abs() < half_width,
        }
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        match *self {
            DomainDesc::WholeSpace => f64::INFINITY,
            DomainDesc::ExteriorOf { radius } => p.norm() - radius,
            DomainDesc::PuncturedBall { radius } => p.norm().min(radius - p.norm()),
            DomainDesc::Ball { radius } => radius - p.norm(),
            DomainDesc::HalfSpace { axis } => p.get(axis),
            DomainDesc::Slab { axis, half_width } => half_width - p.get(axis).abs(),
        }
    }
}

/// Measured decay constant: the weighted sup realizing the a-priori bound on
/// the given domain.
#[derive(Clone, Debug)]
pub struct DecayCertificate {
    pub domain: DomainDesc,
    pub exponent: f64,
    pub constant: f64,
    pub attained_at: Point,
    pub gradient_mode: bool,
}

/// Weighted sup of `u` (optionally `u + |∇u|^{2s/(2s+p-1)}`) over the domain
/// samples, with the weight the domain case dictates.
pub fn decay_certificate(
    u: &Field,
    domain: DomainDesc,
    params: &FracParams,
    gradient_mode: bool,
) -> Result<DecayCertificate> {
    if !u.nonneg() {
        return Err(Error::SignViolation);
    }
    let p = params.require_p()?;
    let s = params.s();
    let e = 2.0 * s / (p - 1.0);
    let grid = u.grid();
    let n = params.dim();

    let grad_grids = if gradient_mode {
        let mut comps = Vec::new();
        for mi in multi_indices(n, 1) {
            comps.push(derivative_grid(grid, &mi)?);
        }
        Some(comps)
    } else {
        None
    };

    let mut best: Option<(f64, Point)> = None;
    for flat in 0..grid.len() {
        let x = grid.node(grid.unflatten(flat));
        let keep = match domain {
            DomainDesc::WholeSpace => true,
            DomainDesc::ExteriorOf { radius } => x.norm() >= 2.0 * radius,
            DomainDesc::PuncturedBall { radius } => {
                let r = x.norm();
                r > 0.0 && r < radius / 2.0
            }
            _ => domain.contains(x),
        };
        if !keep {
            continue;
        }
        let mut value = grid.values()[flat];
        if let Some(comps) = &grad_grids {
            let mut sq = 0.0;
            let mut ok = true;
            for (dg, mask) in comps {
                if !mask[flat] {
                    ok = false;
                    break;
                }
                sq += dg.values()[flat] * dg.values()[flat];
            }
            if !ok {
                continue;
            }
            value += libm::pow(libm::sqrt(sq), 2.0 * s / (2.0 * s + p - 1.0));
        }
        let weight = match domain {
            DomainDesc::WholeSpace => 1.0,
            DomainDesc::ExteriorOf { .. } | DomainDesc::PuncturedBall { .. } => {
                libm::pow(x.norm(), e)
            }
            _ => libm::pow(domain.boundary_distance(x).min(1.0), e),
        };
        let weighted = value * weight;
        if best.map_or(true, |(b, _)| weighted > b) {
            best = Some((weighted, x));
        }
    }
    let (constant, attained_at) = best.ok_or(Error::EmptyRegion)?;
    Ok(DecayCertificate {
        domain,
        exponent: e,
        constant,
        attained_at,
        gradient_mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_with_p(n: u32, s: f64, p: f64) -> FracParams {
        FracParams::new(n, s, None, Some(p)).unwrap()
    }

    #[test]
    fn auxiliary_max_constant_field() {
        // Constant weights: the distance factor peaks at the center.
        let g = Grid::sample_symmetric(2, 2.0, 41, |_| 1.0).unwrap();
        let r_k = 1.0;
        let (a, val) = auxiliary_max(&g, Point::zero(2), r_k, 1.5).unwrap();
        assert!(a.norm() < 1e-12);
        assert!((val - libm::pow(r_k, 1.5)).abs() < 1e-14);
    }

    #[test]
    fn auxiliary_max_matches_brute_force() {
        let mut rng = Rng::new(9);
        let g = Grid::sample_symmetric(2, 2.0, 31, |p| {
            1.0 + 0.5 * libm::sin(3.0 * p.get(0)) * libm::cos(2.0 * p.get(1))
                + 0.01 * rng.uniform()
        })
        .unwrap();
        let x_k = Point::d2(0.1, -0.2);
        let r_k = 1.2;
        let e = 1.1;
        let (a, val) = auxiliary_max(&g, x_k, r_k, e).unwrap();
        // Independent brute-force scan in flat order.
        let mut best = f64::NEG_INFINITY;
        let mut best_p = Point::zero(2);
        for flat in 0..g.len() {
            let p = g.node(g.unflatten(flat));
            let d = p.dist(&x_k);
            if d > r_k {
                continue;
            }
            let s_val = g.values()[flat] * libm::pow(r_k - d, e);
            if s_val > best {
                best = s_val;
                best_p = p;
            }
        }
        assert_eq!(val, best);
        assert_eq!(a.coords(), best_p.coords());
    }

    #[test]
    fn auxiliary_max_rejects_nonpositive() {
        let g = Grid::sample_symmetric(1, 1.0, 11, |p| p.get(0)).unwrap();
        assert!(matches!(
            auxiliary_max(&g, Point::d1(0.0), 0.5, 1.0),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn decay_certificate_exact_cancellation() {
        let params = params_with_p(2, 0.75, 2.0);
        let e = 2.0 * 0.75 / (2.0 - 1.0);
        // Exterior domain: u = |x|^{-e} against weight |x|^{e}.
        let grid = Grid::sample_symmetric(2, 6.0, 61, |p| {
            let r = p.norm();
            if r >= 1.0 {
                libm::pow(r, -e)
            } else {
                1.0
            }
        })
        .unwrap();
        let u = Field::new(
            grid,
            Exterior::RadialPower {
                coeff: 1.0,
                exponent: -e,
            },
            true,
            &params,
        )
        .unwrap();
        let cert = decay_certificate(
            &u,
            DomainDesc::ExteriorOf { radius: 1.5 },
            &params,
            false,
        )
        .unwrap();
        assert!((cert.constant - 1.0).abs() < 1e-10, "{}", cert.constant);

        // Whole space: constant field gives its sup.
        let grid = Grid::sample_symmetric(2, 2.0, 21, |_| 0.7).unwrap();
        let u = Field::new(grid, Exterior::Constant(0.7), true, &params).unwrap();
        let cert = decay_certificate(&u, DomainDesc::WholeSpace, &params, false).unwrap();
        assert!((cert.constant - 0.7).abs() < 1e-15);
    }

    #[test]
    fn decay_certificate_slab_distance_weight() {
        let params = params_with_p(2, 0.75, 2.0);
        let e = 1.5;
        let dom = DomainDesc::Slab {
            axis: 0,
            half_width: 1.0,
        };
        let grid = Grid::sample_symmetric(2, 0.99, 41, |p| {
            let d = 1.0 - p.get(0).abs();
            libm::pow(d, -e)
        })
        .unwrap();
        let u = Field::new(
            grid,
            Exterior::Constant(1.0),
            true,
            &params,
        )
        .unwrap();
        let cert = decay_certificate(&u, dom, &params, false).unwrap();
        assert!((cert.constant - 1.0).abs() < 1e-10, "{}", cert.constant);
    }

    #[test]
    fn tail_mass_of_constant_one() {
        let params = FracParams::new(1, 0.5, None, None).unwrap();
        let quad = QuadSpec::default_for_spacing(0.05);
        let consts = KernelConstants::compute(&params, &quad).unwrap();
        let grid = Grid::sample_symmetric(1, 2.0, 41, |_| 1.0).unwrap();
        let v = Field::new(grid, Exterior::Constant(1.0), true, &params).unwrap();
        for r in [8.0, 16.0, 32.0] {
            let got = tail_mass(&v, r, &params, &consts);
            let want = 2.0 / (core::f64::consts::PI * r);
            assert!((got - want).abs() < 1e-12, "R={r}: {got} vs {want}");
        }
    }

    #[test]
    fn tail_mass_nonneg_and_monotone() {
        let params = FracParams::new(2, 0.6, None, None).unwrap();
        let quad = QuadSpec::default_for_spacing(0.05);
        let consts = KernelConstants::compute(&params, &quad).unwrap();
        let grid = Grid::sample_symmetric(2, 2.0, 21, |_| 1.0).unwrap();
        let v = Field::new(
            grid,
            Exterior::RadialPower {
                coeff: 0.8,
                exponent: -0.4,
            },
            true,
            &params,
        )
        .unwrap();
        let mut prev = f64::INFINITY;
        for r in [8.0, 16.0, 32.0] {
            let t = tail_mass(&v, r, &params, &consts);
            assert!(t >= 0.0);
            assert!(t <= prev + 1e-8, "not monotone at R={r}");
            prev = t;
        }
        // Compactly supported exterior: zero once R passes the support.
        let grid = Grid::sample_symmetric(2, 2.0, 21, |_| 1.0).unwrap();
        let v = Field::new(grid, Exterior::Zero, true, &params).unwrap();
        assert_eq!(tail_mass(&v, 8.0, &params, &consts), 0.0);
    }

    #[test]
    fn blowup_constant_field_audits_pass() {
        let params = params_with_p(2, 0.75, 2.0);
        let quad = QuadSpec::default_for_spacing(0.1).with_tol(1e-2);
        let consts = KernelConstants::compute(&params, &quad).unwrap();
        let c = 1.3;
        let grid = Grid::sample_symmetric(2, 6.0, 61, |_| c).unwrap();
        let u = Field::new(grid, Exterior::Constant(c), true, &params).unwrap();
        let trace = blowup_step(
            &u,
            &Nonlinearity::Power { coeff: 1.0 },
            Point::zero(2),
            1,
            &params,
            &consts,
            &quad,
            BlowupMode::Plain,
        )
        .unwrap();
        // Constant field: a_k = x_k, v = 1 everywhere, exact normalization.
        assert!(trace.a_k.dist(&trace.x_k) < 1e-12);
        assert_eq!(trace.v_at_zero, 1.0);
        assert!(trace.audit_a.pass, "A slack {}", trace.audit_a.slack);
        assert!(trace.audit_b.pass, "B slack {}", trace.audit_b.slack);
        assert!(trace.audit_c.pass, "C slack {}", trace.audit_c.slack);
        assert!(trace.audit_d.pass);
        // lambda = c^{-(p-1)/2s}, r_k = 2 lambda for k=1.
        let lam = libm::pow(c, -(2.0 - 1.0) / 1.5);
        assert!((trace.lambda_k - lam).abs() < 1e-12);
    }

    #[test]
    fn regularity_ratio_scaling_invariance() {
        let params = FracParams::new(2, 0.3, Some(0.25), None).unwrap();
        let grid = Grid::sample_symmetric(2, 1.02, 41, |p| 1.0 + 0.3 * libm::cos(p.get(0)))
            .unwrap();
        let u = Field::new(grid, Exterior::Constant(1.0), true, &params).unwrap();
        let f = Field::new(
            Grid::sample_symmetric(2, 1.02, 9, |_| 0.0).unwrap(),
            Exterior::Zero,
            true,
            &params,
        )
        .unwrap();
        let r1 = regularity_ratio(&u, &f, &params, EstimateKind::Schauder).unwrap();
        for t in [0.1, 10.0] {
            let ut = u.scaled(t, &params).unwrap();
            let ft = f.scaled(t, &params).unwrap();
            let rt = regularity_ratio(&ut, &ft, &params, EstimateKind::Schauder).unwrap();
            assert!(
                (rt - r1).abs() <= 1e-12 * r1.abs().max(1e-300),
                "t={t}: {rt} vs {r1}"
            );
        }
    }

    #[test]
    fn regularity_ratio_requires_sign() {
        let params = FracParams::new(2, 0.3, Some(0.25), None).unwrap();
        let grid = Grid::sample_symmetric(2, 1.02, 21, |p| p.get(0)).unwrap();
        let u = Field::new(grid, Exterior::Zero, false, &params).unwrap();
        let f = Field::new(
            Grid::sample_symmetric(2, 1.02, 9, |_| 0.0).unwrap(),
            Exterior::Zero,
            true,
            &params,
        )
        .unwrap();
        assert!(matches!(
            regularity_ratio(&u, &f, &params, EstimateKind::Schauder),
            Err(Error::SignViolation)
        ));
        // Missing alpha is a class mismatch.
        let params_no_alpha = FracParams::new(2, 0.3, None, None).unwrap();
        let g = Grid::sample_symmetric(2, 1.02, 21, |_| 1.0).unwrap();
        let u = Field::new(g, Exterior::Constant(1.0), true, &params_no_alpha).unwrap();
        assert!(matches!(
            regularity_ratio(&u, &f, &params_no_alpha, EstimateKind::Schauder),
            Err(Error::ClassMismatch(_))
        ));
    }

    #[test]
    fn constant_extension_ratio_is_one() {
        // u = 1 (s-harmonic, f = 0): sup norm 1, seminorms 0, ratio 1.
        let params = FracParams::new(2, 0.3, Some(0.25), None).unwrap();
        let grid = Grid::sample_symmetric(2, 1.02, 41, |_| 1.0).unwrap();
        let u = Field::new(grid, Exterior::Constant(1.0), true, &params).unwrap();
        let f = Field::new(
            Grid::sample_symmetric(2, 1.02, 9, |_| 0.0).unwrap(),
            Exterior::Zero,
            true,
            &params,
        )
        .unwrap();
        let r = regularity_ratio(&u, &f, &params, EstimateKind::Schauder).unwrap();
        assert!((r - 1.0).abs() < 1e-12, "ratio {r}");
    }
}
