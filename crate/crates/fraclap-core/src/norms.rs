//! Discrete estimators for the norms the interior estimates use: sup norms,
//! Hölder and Ln-Lipschitz seminorms with attaining pairs, Dini moduli with
//! their integrals, and finite-difference derivative grids.
//!
//! All pair scans are exhaustive up to [`EXACT_SCAN_LIMIT`] points; larger
//! regions are thinned by a deterministic per-axis stride (plus all
//! nearest-neighbor pairs of the full set), so every value is a lower bound
//! of the continuum quantity and reruns are bit-identical.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Grid;
use crate::params::HolderClass;
use crate::point::Point;

/// Regions a norm is measured over.
#[derive(Clone, Copy, Debug)]
pub enum Region {
    Ball { center: Point, radius: f64 },
    WholeGrid,
}

impl Region {
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Region::Ball { center, radius } => p.dist(center) <= *radius,
            Region::WholeGrid => true,
        }
    }
}

/// Pair of points attaining a seminorm maximum.
#[derive(Clone, Copy, Debug)]
pub struct AttainingPair {
    pub x: Point,
    pub y: Point,
}

/// Dyadic modulus-of-continuity table with its Dini integrals.
#[derive(Clone, Debug)]
pub struct DiniTable {
    /// Dyadic radii, ascending.
    pub radii: Vec<f64>,
    /// Monotone envelope of the modulus at those radii.
    pub omega: Vec<f64>,
    /// `∫_0^diam omega(r)/r dr` (power-law extrapolated below resolution).
    pub integral: f64,
    /// `∫_0^diam omega(r)/r^{1+alpha} dr`; infinite when the observed slope
    /// does not beat `alpha`.
    pub integral_alpha: f64,
    /// Power-law slope fitted on the two finest bins, used for the
    /// sub-resolution extrapolation.
    pub slope: f64,
    pub alpha: f64,
}

/// Full measured norm over a region.
#[derive(Clone, Debug)]
pub struct NormReport {
    pub region: Region,
    pub class: HolderClass,
    /// Sup of |derivatives| per order `0..=k`.
    pub deriv_sups: Vec<f64>,
    pub holder: Option<(f64, AttainingPair)>,
    pub lnl: Option<(f64, AttainingPair)>,
    pub dini: Option<DiniTable>,
}

impl NormReport {
    /// Standard total: sup norms plus the class seminorm.
    pub fn total(&self) -> f64 {
        let sups: f64 = self.deriv_sups.iter().sum();
        let semi = self
            .holder
            .map(|(v, _)| v)
            .or_else(|| self.lnl.map(|(v, _)| v))
            .unwrap_or(0.0);
        sups + semi
    }

    pub fn sup(&self) -> f64 {
        self.deriv_sups[0]
    }
}

/// Exhaustive pair scans up to this many points; thinned above.
pub const EXACT_SCAN_LIMIT: usize = 10_000;

struct Sample {
    point: Point,
    value: f64,
    flat: usize,
}

fn collect(g: &Grid, valid: Option<&[bool]>, region: Region) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    for flat in 0..g.len() {
        if let Some(mask) = valid {
            if !mask[flat] {
                continue;
            }
        }
        let p = g.node(g.unflatten(flat));
        if region.contains(p) {
            out.push(Sample {
                point: p,
                value: g.values()[flat],
                flat,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyRegion);
    }
    Ok(out)
}

/// Visit pairs: all pairs of the (possibly stride-thinned) sample set, plus
/// every axis-neighbor pair of the full set.
fn scan_pairs<F: FnMut(&Sample, &Sample)>(g: &Grid, samples: &[Sample], mut visit: F) {
    let n = samples.len();
    if n <= EXACT_SCAN_LIMIT {
        for i in 0..n {
            for j in (i + 1)..n {
                visit(&samples[i], &samples[j]);
            }
        }
        return;
    }
    // Deterministic stratification: per-axis stride on the grid index.
    let dim = g.dim();
    let q = libm::ceil(libm::pow(n as f64 / EXACT_SCAN_LIMIT as f64, 1.0 / dim as f64)) as usize;
    let q = q.max(2);
    let thinned: Vec<usize> = (0..n)
        .filter(|&i| {
            let idx = g.unflatten(samples[i].flat);
            (0..dim).all(|ax| idx[ax] % q == 0)
        })
        .collect();
    for (a, &i) in thinned.iter().enumerate() {
        for &j in thinned.iter().skip(a + 1) {
            visit(&samples[i], &samples[j]);
        }
    }
    // Nearest neighbors of the full set capture the fine-scale quotients.
    let mut by_flat = vec![usize::MAX; g.len()];
    for (i, s) in samples.iter().enumerate() {
        by_flat[s.flat] = i;
    }
    for (i, s) in samples.iter().enumerate() {
        let idx = g.unflatten(s.flat);
        for ax in 0..dim {
            if idx[ax] + 1 < g.shape()[ax] {
                let mut nb = idx;
                nb[ax] += 1;
                let j = by_flat[g.flatten(nb)];
                if j != usize::MAX {
                    visit(&samples[i], &samples[j]);
                }
            }
        }
    }
}

/// Discrete Hölder seminorm `sup |g(x)-g(y)| / |x-y|^beta` with its
/// attaining pair.
pub fn holder_seminorm(
    g: &Grid,
    valid: Option<&[bool]>,
    beta: f64,
    region: Region,
) -> Result<(f64, AttainingPair)> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
        });
    }
    let samples = collect(g, valid, region)?;
    let mut best = 0.0f64;
    let mut pair = AttainingPair {
        x: samples[0].point,
        y: samples[0].point,
    };
    scan_pairs(g, &samples, |a, b| {
        let d = a.point.dist(&b.point);
        if d == 0.0 {
            return;
        }
        let quot = (a.value - b.value).abs() / libm::pow(d, beta);
        if quot > best {
            best = quot;
            pair = AttainingPair {
                x: a.point,
                y: b.point,
            };
        }
    });
    Ok((best, pair))
}

/// Ln-Lipschitz seminorm `sup |g(x)-g(y)| / (|x-y| |ln min(|x-y|, 1/2)|)`.
pub fn lnl_seminorm(
    g: &Grid,
    valid: Option<&[bool]>,
    region: Region,
) -> Result<(f64, AttainingPair)> {
    let samples = collect(g, valid, region)?;
    let mut best = 0.0f64;
    let mut pair = AttainingPair {
        x: samples[0].point,
        y: samples[0].point,
    };
    scan_pairs(g, &samples, |a, b| {
        let d = a.point.dist(&b.point);
        if d == 0.0 {
            return;
        }
        let quot = (a.value - b.value).abs() / (d * libm::log(d.min(0.5)).abs());
        if quot > best {
            best = quot;
            pair = AttainingPair {
                x: a.point,
                y: b.point,
            };
        }
    });
    Ok((best, pair))
}

/// Dini integrals of a modulus table (ascending radii): integrates the
/// log-linear interpolant exactly piece by piece and extrapolates the
/// sub-resolution part by the slope of the two finest bins.
///
/// Returns `(I_omega, I_omega_alpha, slope)`.
pub fn dini_integrals_from_table(radii: &[f64], omega: &[f64], alpha: f64) -> (f64, f64, f64) {
    assert_eq!(radii.len(), omega.len());
    assert!(radii.len() >= 2);
    let piece = |r0: f64, w0: f64, r1: f64, w1: f64, a: f64| -> f64 {
        // ∫_{r0}^{r1} w(r) r^{-1-a} dr with w log-linear: w = w0 (r/r0)^m.
        if w0 <= 0.0 || w1 <= 0.0 {
            // Degenerate piece: linear interpolation, midpoint rule.
            let mid = 0.5 * (r0 + r1);
            let wm = 0.5 * (w0 + w1);
            return wm * libm::pow(mid, -1.0 - a) * (r1 - r0);
        }
        let m = libm::log(w1 / w0) / libm::log(r1 / r0);
        if (m - a).abs() < 1e-12 {
            w0 * libm::pow(r0, -a) * libm::log(r1 / r0)
        } else {
            w0 * libm::pow(r0, -m)
                * (libm::pow(r1, m - a) - libm::pow(r0, m - a))
                / (m - a)
        }
    };
    let mut int0 = 0.0;
    let mut int_a = 0.0;
    for w in radii.windows(2).zip(omega.windows(2)) {
        let (r, o) = w;
        int0 += piece(r[0], o[0], r[1], o[1], 0.0);
        int_a += piece(r[0], o[0], r[1], o[1], alpha);
    }
    // Sub-resolution tail from the two finest bins.
    let (r0, w0, r1, w1) = (radii[0], omega[0], radii[1], omega[1]);
    let slope = if w0 > 0.0 && w1 > 0.0 {
        libm::log(w1 / w0) / libm::log(r1 / r0)
    } else {
        f64::INFINITY
    };
    if w0 > 0.0 {
        int0 += if slope > 1e-12 {
            w0 / slope
        } else {
            f64::INFINITY
        };
        int_a += if slope > alpha + 1e-12 {
            w0 * libm::pow(r0, -alpha) / (slope - alpha)
        } else if slope.is_infinite() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    (int0, int_a, slope)
}

/// Measure the modulus of continuity on dyadic radii and its Dini integrals.
pub fn dini_modulus(
    g: &Grid,
    valid: Option<&[bool]>,
    region: Region,
    alpha: Option<f64>,
) -> Result<DiniTable> {
    let samples = collect(g, valid, region)?;
    // Diameter of the bounding box of the sample set.
    let mut lo = samples[0].point;
    let mut hi = samples[0].point;
    for s in &samples {
        for ax in 0..g.dim() {
            lo.set(ax, lo.get(ax).min(s.point.get(ax)));
            hi.set(ax, hi.get(ax).max(s.point.get(ax)));
        }
    }
    let diam = hi.dist(&lo);
    if diam <= 0.0 {
        return Err(Error::EmptyRegion);
    }
    let levels = libm::floor(libm::log2(diam / g.min_spacing())).max(2.0) as usize;
    // raw[j] collects pairs whose dyadic level is exactly j (smaller radius
    // for larger j); omega is then the suffix maximum.
    let mut raw = vec![0.0f64; levels + 1];
    scan_pairs(g, &samples, |a, b| {
        let d = a.point.dist(&b.point);
        if d <= 0.0 {
            return;
        }
        let j = libm::floor(libm::log2(diam / d)).max(0.0) as usize;
        let j = j.min(levels);
        let diff = (a.value - b.value).abs();
        if diff > raw[j] {
            raw[j] = diff;
        }
    });
    let mut omega_desc = vec![0.0f64; levels + 1];
    let mut running = 0.0f64;
    for j in (0..=levels).rev() {
        running = running.max(raw[j]);
        omega_desc[j] = running;
    }
    // Ascending radii.
    let mut radii = Vec::with_capacity(levels + 1);
    let mut omega = Vec::with_capacity(levels + 1);
    for j in (0..=levels).rev() {
        radii.push(diam * libm::pow(2.0, -(j as f64)));
        omega.push(omega_desc[j]);
    }
    let a = alpha.unwrap_or(0.0);
    let all_zero = omega.iter().all(|w| *w == 0.0);
    let (integral, integral_alpha, slope) = if all_zero {
        (0.0, 0.0, f64::INFINITY)
    } else {
        dini_integrals_from_table(&radii, &omega, a)
    };
    Ok(DiniTable {
        radii,
        omega,
        integral,
        integral_alpha,
        slope,
        alpha: a,
    })
}

/// Central-difference derivative grid for `|multi_index| <= 2`.
///
/// Returns the derivative samples plus a validity mask; boundary cells that
/// lack a full stencil are marked invalid rather than filled one-sided.
pub fn derivative_grid(g: &Grid, multi_index: &[u32]) -> Result<(Grid, Vec<bool>)> {
    let order: u32 = multi_index.iter().sum();
    if order > 2 {
        return Err(Error::UnsupportedOrder { order, max: 2 });
    }
    if multi_index.len() != g.dim() {
        return Err(Error::Domain("multi-index length must match dimension"));
    }
    let mut values = g.clone();
    let mut valid = vec![true; g.len()];
    for ax in 0..g.dim() {
        match multi_index[ax] {
            0 => {}
            1 => apply_stencil(&mut values, &mut valid, ax, StencilKind::First)?,
            2 => apply_stencil(&mut values, &mut valid, ax, StencilKind::Second)?,
            _ => unreachable!(),
        }
    }
    Ok((values, valid))
}

enum StencilKind {
    First,
    Second,
}

fn apply_stencil(
    g: &mut Grid,
    valid: &mut [bool],
    ax: usize,
    kind: StencilKind,
) -> Result<()> {
    if g.shape()[ax] < 3 {
        return Err(Error::Margin("axis too short for a central stencil"));
    }
    let h = g.spacing()[ax];
    let old = g.values().to_vec();
    let old_valid = valid.to_vec();
    for flat in 0..old.len() {
        let idx = g.unflatten(flat);
        if idx[ax] == 0 || idx[ax] == g.shape()[ax] - 1 {
            valid[flat] = false;
            continue;
        }
        let mut up = idx;
        up[ax] += 1;
        let mut dn = idx;
        dn[ax] -= 1;
        let (fu, fd) = (g.flatten(up), g.flatten(dn));
        if !old_valid[fu] || !old_valid[fd] || !old_valid[flat] {
            valid[flat] = false;
            continue;
        }
        g.values_mut()[flat] = match kind {
            StencilKind::First => (old[fu] - old[fd]) / (2.0 * h),
            StencilKind::Second => (old[fu] - 2.0 * old[flat] + old[fd]) / (h * h),
        };
    }
    Ok(())
}

/// All multi-indices of total order `m` in dimension `n`.
pub fn multi_indices(n: usize, m: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    match m {
        0 => out.push(vec![0; n]),
        1 => {
            for ax in 0..n {
                let mut b = vec![0; n];
                b[ax] = 1;
                out.push(b);
            }
        }
        2 => {
            for ax in 0..n {
                for bx in ax..n {
                    let mut b = vec![0; n];
                    b[ax] += 1;
                    b[bx] += 1;
                    out.push(b);
                }
            }
        }
        _ => unreachable!("orders above 2 unsupported"),
    }
    out
}

/// Measure the full norm of `g` over `region` in the given class:
/// derivative sup norms up to the class order plus the class seminorm on the
/// top-order derivatives (none for the integer class). The modulus table is
/// always attached for reporting.
pub fn full_norm(g: &Grid, class: HolderClass, region: Region) -> Result<NormReport> {
    let k = class.order();
    let mut deriv_sups = Vec::with_capacity(k as usize + 1);
    let base = collect(g, None, region)?;
    deriv_sups.push(base.iter().fold(0.0f64, |m, s| m.max(s.value.abs())));
    // Keep top-order derivative grids for the seminorm.
    let mut top: Vec<(Grid, Vec<bool>)> = Vec::new();
    for order in 1..=k {
        let mut sup = 0.0f64;
        let mut grids = Vec::new();
        for mi in multi_indices(g.dim(), order) {
            let (dg, mask) = derivative_grid(g, &mi)?;
            let pts = collect(&dg, Some(&mask), region)?;
            sup = sup.max(pts.iter().fold(0.0f64, |m, s| m.max(s.value.abs())));
            grids.push((dg, mask));
        }
        deriv_sups.push(sup);
        if order == k {
            top = grids;
        }
    }
    if k == 0 {
        top = vec![(g.clone(), vec![true; g.len()])];
    }

    let mut holder = None;
    let mut lnl = None;
    match class {
        HolderClass::Classical { beta, .. } => {
            let mut best: Option<(f64, AttainingPair)> = None;
            for (dg, mask) in &top {
                let (v, pair) = holder_seminorm(dg, Some(mask), beta, region)?;
                if best.map_or(true, |(b, _)| v > b) {
                    best = Some((v, pair));
                }
            }
            holder = best;
        }
        HolderClass::LnLipschitz { .. } => {
            let mut best: Option<(f64, AttainingPair)> = None;
            for (dg, mask) in &top {
                let (v, pair) = lnl_seminorm(dg, Some(mask), region)?;
                if best.map_or(true, |(b, _)| v > b) {
                    best = Some((v, pair));
                }
            }
            lnl = best;
        }
        HolderClass::DiniTarget { .. } => {}
    }
    let alpha = match class {
        HolderClass::Classical { beta, .. } => Some(beta),
        _ => None,
    };
    let dini = dini_modulus(g, None, region, alpha).ok();

    Ok(NormReport {
        region,
        class,
        deriv_sups,
        holder,
        lnl,
        dini,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_grid(nodes: usize, f: impl FnMut(Point) -> f64) -> Grid {
        Grid::sample_symmetric(1, 1.0, nodes, f).unwrap()
    }

    #[test]
    fn holder_of_constant_and_linear() {
        let g = line_grid(101, |_| 4.2);
        let (v, _) = holder_seminorm(&g, None, 0.5, Region::WholeGrid).unwrap();
        assert_eq!(v, 0.0);
        // g = a x with beta = 1 gives |a| attained on neighbors.
        let a = -2.5;
        let g = line_grid(101, |p| a * p.get(0));
        let (v, _) = holder_seminorm(&g, None, 1.0, Region::WholeGrid).unwrap();
        assert!((v - a.abs()).abs() < 1e-12);
    }

    #[test]
    fn holder_of_root_singularity() {
        // |x|^beta has seminorm 1 attained against the origin.
        let beta = 0.5;
        let g = line_grid(257, |p| libm::pow(p.get(0).abs(), beta));
        let (v, pair) = holder_seminorm(&g, None, beta, Region::WholeGrid).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "v = {v}");
        assert!(pair.x.norm() < 1e-12 || pair.y.norm() < 1e-12);
    }

    #[test]
    fn lnl_of_linear() {
        // Quotient 1/|ln min(d, 1/2)| is maximized once d >= 1/2.
        let g = line_grid(101, |p| p.get(0));
        let (v, pair) = lnl_seminorm(&g, None, Region::WholeGrid).unwrap();
        let want = 1.0 / libm::log(2.0);
        assert!((v - want).abs() < 1e-12, "v = {v}");
        assert!(pair.x.dist(&pair.y) >= 0.5);
    }

    #[test]
    fn lnl_of_xlnx_stable_under_refinement() {
        // t |ln t| is the borderline modulus; one-sided limit 0 at the node 0.
        let f = |p: Point| {
            let x = p.get(0);
            if x == 0.0 {
                0.0
            } else {
                x * libm::log(x.abs())
            }
        };
        let (c1, _) = lnl_seminorm(&line_grid(513, f), None, Region::WholeGrid).unwrap();
        let (c2, _) = lnl_seminorm(&line_grid(1025, f), None, Region::WholeGrid).unwrap();
        assert!(c1.is_finite() && c2.is_finite());
        assert!((c1 - c2).abs() <= 0.1 * c1.max(c2), "{c1} vs {c2}");
    }

    #[test]
    fn dini_synthetic_power_table() {
        // omega(r) = r^beta on dyadic radii: the log-linear integrator is
        // exact, I^alpha = D^{beta-alpha}/(beta-alpha).
        let beta = 0.8;
        let alpha = 0.5;
        let d: f64 = 2.0;
        let mut radii = Vec::new();
        for j in (0..=20).rev() {
            radii.push(d * libm::pow(2.0, -(j as f64)));
        }
        let omega: Vec<f64> = radii.iter().map(|r| libm::pow(*r, beta)).collect();
        let (i0, ia, slope) = dini_integrals_from_table(&radii, &omega, alpha);
        let want_a = libm::pow(d, beta - alpha) / (beta - alpha);
        let want_0 = libm::pow(d, beta) / beta;
        assert!((ia - want_a).abs() < 1e-10 * want_a, "{ia} vs {want_a}");
        assert!((i0 - want_0).abs() < 1e-10 * want_0);
        assert!((slope - beta).abs() < 1e-12);
    }

    #[test]
    fn dini_modulus_of_constant_and_power() {
        let g = line_grid(65, |_| 1.0);
        let t = dini_modulus(&g, None, Region::WholeGrid, Some(0.3)).unwrap();
        assert_eq!(t.integral, 0.0);
        assert_eq!(t.integral_alpha, 0.0);

        // |x|^beta: integrals finite for alpha < beta, omega nondecreasing.
        let beta = 0.8;
        let g = line_grid(1025, |p| libm::pow(p.get(0).abs(), beta));
        let t = dini_modulus(&g, None, Region::WholeGrid, Some(0.5)).unwrap();
        assert!(t.integral_alpha.is_finite());
        for w in t.omega.windows(2) {
            assert!(w[1] >= w[0] - 1e-15);
        }
        // Recomputing from the returned table reproduces the integrals.
        let (i0, ia, _) = dini_integrals_from_table(&t.radii, &t.omega, t.alpha);
        assert!((i0 - t.integral).abs() <= 1e-10 * t.integral.abs().max(1.0));
        assert!((ia - t.integral_alpha).abs() <= 1e-10 * t.integral_alpha.abs().max(1.0));
    }

    #[test]
    fn derivatives_exact_on_polynomials() {
        let g = Grid::sample_symmetric(2, 1.0, 21, |p| p.get(0) * p.get(0)).unwrap();
        let (d2, mask) = derivative_grid(&g, &[2, 0]).unwrap();
        for flat in 0..d2.len() {
            if mask[flat] {
                assert!((d2.values()[flat] - 2.0).abs() < 1e-10);
            }
        }
        let g = Grid::sample_symmetric(2, 1.0, 21, |p| 3.0 * p.get(0) - p.get(1)).unwrap();
        let (dx, mask) = derivative_grid(&g, &[1, 0]).unwrap();
        for flat in 0..dx.len() {
            if mask[flat] {
                assert!((dx.values()[flat] - 3.0).abs() < 1e-10);
            }
        }
        assert!(matches!(
            derivative_grid(&g, &[2, 1]),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn derivative_convergence_order() {
        // Error of the central stencil on sin is O(h^2): halving h should
        // shrink the max error by at least 1.9 orders of 2.
        let err_at = |nodes: usize| {
            let g = Grid::sample_symmetric(1, 1.0, nodes, |p| libm::sin(p.get(0))).unwrap();
            let (d, mask) = derivative_grid(&g, &[1]).unwrap();
            let mut worst = 0.0f64;
            for flat in 0..d.len() {
                if mask[flat] {
                    let x = d.node(d.unflatten(flat)).get(0);
                    worst = worst.max((d.values()[flat] - libm::cos(x)).abs());
                }
            }
            worst
        };
        let e1 = err_at(101);
        let e2 = err_at(201);
        let order = libm::log2(e1 / e2);
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn full_norm_of_linear_field() {
        // Class C^{0,1/2}: sup = max |x|, seminorm = sqrt(diam).
        let g = line_grid(101, |p| p.get(0));
        let report = full_norm(
            &g,
            HolderClass::Classical { k: 0, beta: 0.5 },
            Region::WholeGrid,
        )
        .unwrap();
        assert!((report.sup() - 1.0).abs() < 1e-12);
        let (semi, _) = report.holder.unwrap();
        assert!((semi - libm::sqrt(2.0)).abs() < 1e-12, "semi = {semi}");
        // Brute-force oracle over all pairs.
        let mut brute = 0.0f64;
        let h = 0.02;
        for i in 0..101 {
            for j in (i + 1)..101 {
                let d = (j - i) as f64 * h;
                brute = brute.max(d / libm::sqrt(d));
            }
        }
        assert!((semi - brute).abs() < 1e-12);
    }

    #[test]
    fn zero_field_reports_zero() {
        let g = line_grid(41, |_| 0.0);
        let report = full_norm(
            &g,
            HolderClass::LnLipschitz { k: 0 },
            Region::WholeGrid,
        )
        .unwrap();
        assert_eq!(report.total(), 0.0);
    }

    #[test]
    fn estimators_monotone_under_region_inclusion() {
        let g = Grid::sample_symmetric(2, 1.0, 41, |p| libm::sin(3.0 * p.get(0)) * p.get(1))
            .unwrap();
        let small = Region::Ball {
            center: Point::zero(2),
            radius: 0.4,
        };
        let large = Region::Ball {
            center: Point::zero(2),
            radius: 0.9,
        };
        let (vs, _) = holder_seminorm(&g, None, 0.6, small).unwrap();
        let (vl, _) = holder_seminorm(&g, None, 0.6, large).unwrap();
        assert!(vs <= vl + 1e-12);
        let (ls, _) = lnl_seminorm(&g, None, small).unwrap();
        let (ll, _) = lnl_seminorm(&g, None, large).unwrap();
        assert!(ls <= ll + 1e-12);
    }

    #[test]
    fn scale_equivariance_exact() {
        let g = Grid::sample_symmetric(1, 1.0, 101, |p| libm::cos(2.0 * p.get(0))).unwrap();
        let mut g3 = g.clone();
        for v in g3.values_mut() {
            *v *= 3.0;
        }
        let (a, _) = holder_seminorm(&g, None, 0.7, Region::WholeGrid).unwrap();
        let (b, _) = holder_seminorm(&g3, None, 0.7, Region::WholeGrid).unwrap();
        assert!((b - 3.0 * a).abs() <= 1e-14 * b.abs());
    }

    #[test]
    fn empty_region_is_an_error() {
        let g = line_grid(11, |_| 1.0);
        let far = Region::Ball {
            center: Point::d1(50.0),
            radius: 0.1,
        };
        assert!(matches!(
            holder_seminorm(&g, None, 0.5, far),
            Err(Error::EmptyRegion)
        ));
    }
}
