//! Sampled fields: a uniform interior grid plus an analytic exterior model.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::SourceExpr;
use crate::params::FracParams;
use crate::point::Point;
use crate::quad::{geometric_panels, AngularRule, GaussLegendre, QuadSpec};

/// Uniform grid samples over an axis-aligned box, row-major with the last
/// axis fastest.
#[derive(Clone, Debug)]
pub struct Grid {
    origin: Point,
    spacing: [f64; 3],
    shape: [usize; 3],
    dim: usize,
    values: Vec<f64>,
}

impl Grid {
    pub fn new(origin: Point, spacing: &[f64], shape: &[usize], values: Vec<f64>) -> Result<Self> {
        let dim = origin.dim();
        if spacing.len() != dim || shape.len() != dim {
            return Err(Error::BadGrid("spacing/shape length must match dimension"));
        }
        let mut sp = [1.0; 3];
        let mut sh = [1usize; 3];
        let mut count = 1usize;
        for i in 0..dim {
            if !(spacing[i] > 0.0) || !spacing[i].is_finite() {
                return Err(Error::BadGrid("spacing must be positive and finite"));
            }
            if shape[i] < 3 {
                return Err(Error::BadGrid("need at least 3 nodes per axis"));
            }
            sp[i] = spacing[i];
            sh[i] = shape[i];
            count = count
                .checked_mul(shape[i])
                .ok_or(Error::BadGrid("shape overflow"))?;
        }
        if values.len() != count {
            return Err(Error::BadGrid("value count does not match shape"));
        }
        if !origin.is_finite() {
            return Err(Error::BadGrid("origin must be finite"));
        }
        Ok(Self {
            origin,
            spacing: sp,
            shape: sh,
            dim,
            values,
        })
    }

    /// Sample `f` on the grid.
    pub fn from_fn<F: FnMut(Point) -> f64>(
        origin: Point,
        spacing: &[f64],
        shape: &[usize],
        mut f: F,
    ) -> Result<Self> {
        let mut grid = Self::new(
            origin,
            spacing,
            shape,
            alloc::vec![0.0; shape.iter().product()],
        )?;
        for flat in 0..grid.values.len() {
            let idx = grid.unflatten(flat);
            let p = grid.node(idx);
            grid.values[flat] = f(p);
        }
        Ok(grid)
    }

    /// Symmetric box `[-half, half]^n` with `nodes` samples per axis.
    pub fn sample_symmetric<F: FnMut(Point) -> f64>(
        dim: usize,
        half: f64,
        nodes: usize,
        f: F,
    ) -> Result<Self> {
        let h = 2.0 * half / (nodes - 1) as f64;
        let origin = Point::new(&alloc::vec![-half; dim]);
        Self::from_fn(origin, &alloc::vec![h; dim], &alloc::vec![nodes; dim], f)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn shape(&self) -> &[usize] {
        &self.shape[..self.dim]
    }

    #[inline]
    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    #[inline]
    pub fn origin(&self) -> Point {
        self.origin
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn min_spacing(&self) -> f64 {
        let mut h = f64::INFINITY;
        for i in 0..self.dim {
            h = h.min(self.spacing[i]);
        }
        h
    }

    pub fn min_corner(&self) -> Point {
        self.origin
    }

    pub fn max_corner(&self) -> Point {
        let mut p = self.origin;
        for i in 0..self.dim {
            p.set(i, p.get(i) + self.spacing[i] * (self.shape[i] - 1) as f64);
        }
        p
    }

    /// Radius of the smallest origin-centered ball containing the box.
    pub fn circumradius(&self) -> f64 {
        let lo = self.min_corner();
        let hi = self.max_corner();
        let mut sq = 0.0;
        for i in 0..self.dim {
            let m = lo.get(i).abs().max(hi.get(i).abs());
            sq += m * m;
        }
        libm::sqrt(sq)
    }

    #[inline]
    pub fn flatten(&self, idx: [usize; 3]) -> usize {
        ((idx[0] * self.shape[1]) + idx[1]) * self.shape[2] + idx[2]
    }

    #[inline]
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let i2 = flat % self.shape[2];
        let rest = flat / self.shape[2];
        let i1 = rest % self.shape[1];
        let i0 = rest / self.shape[1];
        [i0, i1, i2]
    }

    #[inline]
    pub fn node(&self, idx: [usize; 3]) -> Point {
        let mut p = self.origin;
        for i in 0..self.dim {
            p.set(i, p.get(i) + idx[i] as f64 * self.spacing[i]);
        }
        p
    }

    #[inline]
    pub fn value_at(&self, idx: [usize; 3]) -> f64 {
        self.values[self.flatten(idx)]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Is `z` inside the sampled box (inclusive, with rounding slack)?
    pub fn contains(&self, z: Point) -> bool {
        for i in 0..self.dim {
            let t = (z.get(i) - self.origin.get(i)) / self.spacing[i];
            if !(t >= -1e-9 && t <= (self.shape[i] - 1) as f64 + 1e-9) {
                return false;
            }
        }
        true
    }

    /// Number of whole cells between `z` and the nearest box face.
    pub fn margin_cells(&self, z: Point) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.dim {
            let t = (z.get(i) - self.origin.get(i)) / self.spacing[i];
            m = m.min(t).min((self.shape[i] - 1) as f64 - t);
        }
        m
    }

    /// Tensor-product local cubic interpolation (4-point Lagrange per axis).
    ///
    /// Coordinates within `1e-9` cells of a node snap to the node, so node
    /// queries reproduce stored samples bit-exactly. The caller must ensure
    /// `z` lies inside the box.
    pub fn interpolate(&self, z: Point) -> f64 {
        // Per-axis stencil: starting index plus up to 4 weights.
        let mut starts = [0usize; 3];
        let mut weights = [[0.0f64; 4]; 3];
        let mut counts = [1usize; 3];
        for ax in 0..self.dim {
            let m = self.shape[ax];
            let mut t = (z.get(ax) - self.origin.get(ax)) / self.spacing[ax];
            t = t.max(0.0).min((m - 1) as f64);
            let nearest = libm::round(t);
            if (t - nearest).abs() < 1e-9 {
                starts[ax] = nearest as usize;
                weights[ax][0] = 1.0;
                counts[ax] = 1;
                continue;
            }
            let cell = libm::floor(t) as usize;
            if m >= 4 {
                let start = cell.saturating_sub(1).min(m - 4);
                let u = t - start as f64;
                weights[ax] = lagrange4(u);
                starts[ax] = start;
                counts[ax] = 4;
            } else {
                // 3-node axis: quadratic interpolation.
                let u = t;
                weights[ax] = [
                    0.5 * (u - 1.0) * (u - 2.0),
                    -u * (u - 2.0),
                    0.5 * u * (u - 1.0),
                    0.0,
                ];
                starts[ax] = 0;
                counts[ax] = 3;
            }
        }
        let mut acc = 0.0;
        for a in 0..counts[0] {
            let wa = weights[0][a];
            if wa == 0.0 {
                continue;
            }
            let ia = starts[0] + a;
            if self.dim == 1 {
                acc += wa * self.values[ia];
                continue;
            }
            for b in 0..counts[1] {
                let wb = wa * weights[1][b];
                if wb == 0.0 {
                    continue;
                }
                let ib = starts[1] + b;
                if self.dim == 2 {
                    acc += wb * self.value_at([ia, ib, 0]);
                    continue;
                }
                for c in 0..counts[2] {
                    let wc = wb * weights[2][c];
                    if wc != 0.0 {
                        acc += wc * self.value_at([ia, ib, starts[2] + c]);
                    }
                }
            }
        }
        acc
    }
}

/// 4-point Lagrange weights at nodes `0,1,2,3` for position `u`.
#[inline]
fn lagrange4(u: f64) -> [f64; 4] {
    let a = u;
    let b = u - 1.0;
    let c = u - 2.0;
    let d = u - 3.0;
    [
        -b * c * d / 6.0,
        a * c * d / 2.0,
        -a * b * d / 2.0,
        a * b * c / 6.0,
    ]
}

/// Analytic model of a field outside its sampled box.
#[derive(Clone, Debug)]
pub enum Exterior {
    Zero,
    Constant(f64),
    /// `coeff * |z|^exponent`.
    RadialPower { coeff: f64, exponent: f64 },
    /// Radial table: linear interpolation in `|z|` between shells, linear
    /// extrapolation below the first shell, power tail beyond the last.
    ShellTable {
        radii: Vec<f64>,
        values: Vec<f64>,
        tail_coeff: f64,
        tail_exponent: f64,
    },
    /// Analytic expression with a declared growth exponent (the expression
    /// itself cannot be inspected for decay).
    Expression { expr: SourceExpr, growth: f64 },
    /// `value_scale * inner(arg_scale * z + arg_shift)`; produced by field
    /// rescaling so transforms stay exact. The shift is stored padded so it
    /// applies to any dimension.
    Transformed {
        value_scale: f64,
        arg_scale: f64,
        arg_shift: [f64; 3],
        inner: Box<Exterior>,
    },
}

impl Exterior {
    pub fn shell_table(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::shell_table_with_tail(radii, values, 0.0, f64::NEG_INFINITY)
    }

    pub fn shell_table_with_tail(
        radii: Vec<f64>,
        values: Vec<f64>,
        tail_coeff: f64,
        tail_exponent: f64,
    ) -> Result<Self> {
        if radii.is_empty() || radii.len() != values.len() {
            return Err(Error::BadGrid("shell table needs matching radii/values"));
        }
        for w in radii.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::BadGrid("shell radii must increase strictly"));
            }
        }
        if !(radii[0] > 0.0) {
            return Err(Error::BadGrid("shell radii must be positive"));
        }
        Ok(Exterior::ShellTable {
            radii,
            values,
            tail_coeff,
            tail_exponent,
        })
    }

    pub fn expression(source: &str, growth: f64) -> Result<Self> {
        Ok(Exterior::Expression {
            expr: SourceExpr::parse(source)?,
            growth,
        })
    }

    pub fn eval(&self, z: Point) -> f64 {
        match self {
            Exterior::Zero => 0.0,
            Exterior::Constant(c) => *c,
            Exterior::RadialPower { coeff, exponent } => {
                if *coeff == 0.0 {
                    0.0
                } else {
                    coeff * libm::pow(z.norm(), *exponent)
                }
            }
            Exterior::ShellTable {
                radii,
                values,
                tail_coeff,
                tail_exponent,
            } => {
                let r = z.norm();
                let last = radii.len() - 1;
                if r >= radii[last] {
                    if *tail_coeff == 0.0 {
                        return 0.0;
                    }
                    return tail_coeff * libm::pow(r, *tail_exponent);
                }
                if r <= radii[0] {
                    if radii.len() == 1 {
                        return values[0];
                    }
                    let slope = (values[1] - values[0]) / (radii[1] - radii[0]);
                    return values[0] + slope * (r - radii[0]);
                }
                let mut lo = 0;
                let mut hi = last;
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if radii[mid] <= r {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let t = (r - radii[lo]) / (radii[hi] - radii[lo]);
                values[lo] + t * (values[hi] - values[lo])
            }
            Exterior::Expression { expr, .. } => expr.eval(z),
            Exterior::Transformed {
                value_scale,
                arg_scale,
                arg_shift,
                inner,
            } => {
                let mut w = z * *arg_scale;
                for i in 0..w.dim() {
                    w.set(i, w.get(i) + arg_shift[i]);
                }
                value_scale * inner.eval(w)
            }
        }
    }

    /// Declared growth exponent at infinity (`-inf` for compactly supported
    /// or vanishing models). Admissibility requires this to stay below `2s`.
    pub fn growth_exponent(&self) -> f64 {
        match self {
            Exterior::Zero => f64::NEG_INFINITY,
            Exterior::Constant(c) => {
                if *c == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            }
            Exterior::RadialPower { coeff, exponent } => {
                if *coeff == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    *exponent
                }
            }
            Exterior::ShellTable {
                tail_coeff,
                tail_exponent,
                ..
            } => {
                if *tail_coeff == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    *tail_exponent
                }
            }
            Exterior::Expression { growth, .. } => *growth,
            Exterior::Transformed { inner, .. } => inner.growth_exponent(),
        }
    }

    /// Radii where the model is non-smooth, useful as quadrature breaks.
    /// Shifted transforms lose the radial structure, so only unshifted
    /// transforms propagate breaks.
    pub fn break_radii(&self) -> Vec<f64> {
        match self {
            Exterior::ShellTable { radii, .. } => radii.clone(),
            Exterior::Transformed {
                arg_scale,
                arg_shift,
                inner,
                ..
            } => {
                if arg_shift.iter().all(|c| *c == 0.0) {
                    inner
                        .break_radii()
                        .iter()
                        .map(|r| r / arg_scale)
                        .collect()
                } else {
                    Vec::new()
                }
            }
            _ => Vec::new(),
        }
    }

    /// Largest radius outside which the model vanishes identically, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Exterior::Zero => Some(0.0),
            Exterior::Constant(c) => (*c == 0.0).then_some(0.0),
            Exterior::RadialPower { coeff, .. } => (*coeff == 0.0).then_some(0.0),
            Exterior::ShellTable {
                radii, tail_coeff, ..
            } => (*tail_coeff == 0.0).then(|| *radii.last().unwrap()),
            Exterior::Expression { .. } => None,
            Exterior::Transformed {
                value_scale,
                arg_scale,
                arg_shift,
                inner,
            } => {
                if *value_scale == 0.0 {
                    return Some(0.0);
                }
                let shift = libm::sqrt(
                    arg_shift[0] * arg_shift[0]
                        + arg_shift[1] * arg_shift[1]
                        + arg_shift[2] * arg_shift[2],
                );
                inner.support_radius().map(|r| (r + shift) / arg_scale)
            }
        }
    }

    /// Radius below which the model is identically zero (shell tables with a
    /// leading run of zero values are zero there by linear interpolation).
    pub fn inner_support_radius(&self) -> f64 {
        match self {
            Exterior::Zero => f64::INFINITY,
            Exterior::Constant(c) => {
                if *c == 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Exterior::ShellTable { radii, values, .. } => {
                if values[0] != 0.0 {
                    return 0.0;
                }
                let mut r = radii[0];
                for (rad, val) in radii.iter().zip(values) {
                    if *val == 0.0 {
                        r = *rad;
                    } else {
                        break;
                    }
                }
                r
            }
            Exterior::Transformed {
                arg_scale,
                arg_shift,
                inner,
                ..
            } => {
                let shift = libm::sqrt(
                    arg_shift[0] * arg_shift[0]
                        + arg_shift[1] * arg_shift[1]
                        + arg_shift[2] * arg_shift[2],
                );
                ((inner.inner_support_radius() - shift) / arg_scale).max(0.0)
            }
            _ => 0.0,
        }
    }

    /// Expression-backed models may oscillate, so far-field quadrature must
    /// resolve periods instead of trusting a power law.
    pub fn is_oscillatory(&self) -> bool {
        match self {
            Exterior::Expression { .. } => true,
            Exterior::Transformed { inner, .. } => inner.is_oscillatory(),
            _ => false,
        }
    }

    /// Wrap in a value-scale, flattening nested transforms.
    pub fn scaled(&self, factor: f64) -> Exterior {
        match self {
            Exterior::Zero => Exterior::Zero,
            Exterior::Constant(c) => Exterior::Constant(c * factor),
            Exterior::RadialPower { coeff, exponent } => Exterior::RadialPower {
                coeff: coeff * factor,
                exponent: *exponent,
            },
            Exterior::ShellTable {
                radii,
                values,
                tail_coeff,
                tail_exponent,
            } => Exterior::ShellTable {
                radii: radii.clone(),
                values: values.iter().map(|v| v * factor).collect(),
                tail_coeff: tail_coeff * factor,
                tail_exponent: *tail_exponent,
            },
            Exterior::Transformed {
                value_scale,
                arg_scale,
                arg_shift,
                inner,
            } => Exterior::Transformed {
                value_scale: value_scale * factor,
                arg_scale: *arg_scale,
                arg_shift: *arg_shift,
                inner: inner.clone(),
            },
            other => Exterior::Transformed {
                value_scale: factor,
                arg_scale: 1.0,
                arg_shift: [0.0; 3],
                inner: Box::new(other.clone()),
            },
        }
    }
}

/// A real field on `R^n`: interior grid samples plus an exterior model.
///
/// Inside the sampled box the field interpolates its samples; outside it
/// follows the exterior model. Construction enforces integrability against
/// the weight `(1 + |x|^{n+2s})^{-1}` (growth exponent strictly below `2s`)
/// and, when flagged, nonnegativity of every sample.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    exterior: Exterior,
    nonneg: bool,
}

impl Field {
    pub fn new(grid: Grid, exterior: Exterior, nonneg: bool, params: &FracParams) -> Result<Self> {
        if grid.dim() != params.dim() {
            return Err(Error::BadGrid("grid dimension does not match parameters"));
        }
        let growth = exterior.growth_exponent();
        let bound = 2.0 * params.s();
        if growth >= bound {
            return Err(Error::InadmissibleExterior {
                exponent: growth,
                bound,
            });
        }
        if nonneg {
            for (i, v) in grid.values().iter().enumerate() {
                if *v < 0.0 {
                    return Err(Error::NegativeSample { index: i, value: *v });
                }
            }
        }
        Ok(Self {
            grid,
            exterior,
            nonneg,
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn exterior(&self) -> &Exterior {
        &self.exterior
    }

    #[inline]
    pub fn nonneg(&self) -> bool {
        self.nonneg
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Field value anywhere: grid interpolation inside the box, exterior
    /// model outside.
    #[inline]
    pub fn eval(&self, z: Point) -> f64 {
        if self.grid.contains(z) {
            self.grid.interpolate(z)
        } else {
            self.exterior.eval(z)
        }
    }

    /// Pointwise scaling `c * u` (exact on samples and exterior model).
    pub fn scaled(&self, c: f64, params: &FracParams) -> Result<Field> {
        let mut grid = self.grid.clone();
        for v in grid.values_mut() {
            *v *= c;
        }
        Field::new(
            grid,
            self.exterior.scaled(c),
            self.nonneg && c >= 0.0,
            params,
        )
    }

    /// Trace of the Laplacian estimated by second-order central differences
    /// of the interpolant around `x`.
    pub fn laplacian_estimate(&self, x: Point) -> f64 {
        let mut acc = 0.0;
        for ax in 0..self.dim() {
            let h = self.grid.spacing()[ax];
            let e = Point::axis(self.dim(), ax, h);
            acc += (self.eval(x + e) - 2.0 * self.eval(x) + self.eval(x - e)) / (h * h);
        }
        acc
    }
}

/// Weighted integral `∫ |u(x)| / (1 + |x|^{n+2s}) dx`.
///
/// Interior part by trapezoid weights on the grid; exterior part by an
/// angular rule crossed with geometric radial panels along each ray from the
/// origin (starting where the ray leaves the box), closed by an analytic
/// power tail.
pub fn l2s_norm(u: &Field, params: &FracParams, quad: &QuadSpec) -> f64 {
    let n = params.dim();
    let npow = n as f64 + 2.0 * params.s();
    let grid = u.grid();

    // Interior: trapezoid product weights.
    let mut interior = 0.0;
    let mut cell = 1.0;
    for ax in 0..n {
        cell *= grid.spacing()[ax];
    }
    for flat in 0..grid.len() {
        let idx = grid.unflatten(flat);
        let mut w = cell;
        for ax in 0..n {
            if idx[ax] == 0 || idx[ax] == grid.shape()[ax] - 1 {
                w *= 0.5;
            }
        }
        let p = grid.node(idx);
        interior += w * grid.values()[flat].abs() / (1.0 + libm::pow(p.norm(), npow));
    }

    // Exterior: rays from the origin.
    let rule = AngularRule::new(n, quad.ang_order as usize);
    let gl = GaussLegendre::new(quad.gl_order as usize);
    let lo = grid.min_corner();
    let hi = grid.max_corner();
    let origin_inside = grid.contains(Point::zero(n));
    let r_far: f64 = 1e6;
    let breaks = u.exterior().break_radii();
    let mut exterior = 0.0;
    for (dir, wd) in rule.dirs.iter().zip(&rule.weights) {
        let start = if origin_inside {
            crate::quad::ray_box_exit(Point::zero(n), *dir, lo, hi)
        } else {
            0.0
        }
        .max(1e-8);
        if start >= r_far {
            continue;
        }
        let mut ray = 0.0;
        for (a, b) in geometric_panels(start, r_far, (quad.n_panels * 2).max(40), &breaks) {
            ray += gl.integrate(a, b, |t| {
                let z = *dir * t;
                let v = if grid.contains(z) {
                    grid.interpolate(z)
                } else {
                    u.exterior().eval(z)
                };
                v.abs() * libm::pow(t, (n - 1) as f64) / (1.0 + libm::pow(t, npow))
            });
        }
        // Tail beyond r_far under the declared growth exponent:
        // integrand ~ m (t/R)^g t^{-1-2s}, so the remainder is m R^{-2s}/(2s-g).
        let growth = u.exterior().growth_exponent();
        if growth > f64::NEG_INFINITY {
            let m = u.exterior().eval(*dir * r_far).abs();
            let decay = 2.0 * params.s() - growth;
            if decay > 0.0 && m > 0.0 {
                ray += m * libm::pow(r_far, -2.0 * params.s()) / decay;
            }
        }
        exterior += wd * ray;
    }

    interior + exterior
}
