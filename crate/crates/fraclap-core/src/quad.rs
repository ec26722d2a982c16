//! Quadrature building blocks: Gauss-Legendre rules, geometric radial panel
//! ladders, angular rules on `S^{n-1}`, and ray/box intersection helpers.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::point::Point;

/// Configuration of the singular-integral quadrature.
///
/// Radial panels are laid out geometrically between `r_min` and the
/// truncation radius, densest near the singularity; each panel carries a
/// Gauss-Legendre rule of `gl_order` points. `ang_order` controls the angular
/// resolution (points on the circle for n = 2; polar order of the product
/// rule for n = 3, with `2*ang_order` azimuthal points).
#[derive(Clone, Debug)]
pub struct QuadSpec {
    pub r_min: f64,
    pub n_panels: u32,
    pub gl_order: u32,
    pub ang_order: u32,
    pub truncation: f64,
    pub tol: f64,
    /// Extra radii at which a panel boundary is forced (kinks of the data).
    pub radial_breaks: Vec<f64>,
}

impl QuadSpec {
    pub fn new(
        r_min: f64,
        n_panels: u32,
        gl_order: u32,
        ang_order: u32,
        truncation: f64,
        tol: f64,
    ) -> Result<Self> {
        if !(r_min > 0.0) {
            return Err(Error::OutOfRange {
                name: "r_min",
                value: r_min,
            });
        }
        if !(truncation > r_min) {
            return Err(Error::OutOfRange {
                name: "truncation",
                value: truncation,
            });
        }
        if !(tol > 0.0) {
            return Err(Error::OutOfRange {
                name: "tol",
                value: tol,
            });
        }
        if gl_order < 2 || ang_order < 2 || n_panels < 2 {
            return Err(Error::OutOfRange {
                name: "rule order",
                value: gl_order.min(ang_order).min(n_panels) as f64,
            });
        }
        Ok(Self {
            r_min,
            n_panels,
            gl_order,
            ang_order,
            truncation,
            tol,
            radial_breaks: Vec::new(),
        })
    }

    /// Defaults tuned for desk-scale runs; `r_min` is half the grid spacing.
    pub fn default_for_spacing(h: f64) -> Self {
        Self {
            r_min: 0.5 * h,
            n_panels: 24,
            gl_order: 8,
            ang_order: 16,
            truncation: 32.0,
            tol: 1e-6,
            radial_breaks: Vec::new(),
        }
    }

    pub fn with_breaks(mut self, breaks: &[f64]) -> Self {
        self.radial_breaks = breaks.to_vec();
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes by Newton iteration on the Legendre recurrence; deterministic for a
/// given order.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            // Tricomi-style initial guess, then Newton.
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            weights[i] = w;
            nodes[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
            let (_, d) = legendre(n, 0.0);
            weights[n / 2] = 2.0 / (d * d);
        }
        Self { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Geometric panel ladder on `[a, b]` with `count` panels, refined toward `a`,
/// split additionally at every break radius falling strictly inside.
pub fn geometric_panels(a: f64, b: f64, count: u32, breaks: &[f64]) -> Vec<(f64, f64)> {
    debug_assert!(b > a && a > 0.0);
    let ratio = libm::pow(b / a, 1.0 / count as f64);
    let mut edges: Vec<f64> = Vec::with_capacity(count as usize + 1 + breaks.len());
    let mut r = a;
    edges.push(a);
    for _ in 0..count - 1 {
        r *= ratio;
        edges.push(r);
    }
    edges.push(b);
    for &brk in breaks {
        if brk > a * (1.0 + 1e-12) && brk < b * (1.0 - 1e-12) {
            edges.push(brk);
        }
    }
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs());
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Dyadic ladder on `[a, b]` graded toward the left endpoint: edges at
/// `a + (b - a) 2^{-k}`. Used where an endpoint singularity at `a` needs
/// geometric refinement with ratio 2.
pub fn dyadic_ladder_down(a: f64, b: f64) -> Vec<(f64, f64)> {
    debug_assert!(b > a);
    let span = b - a;
    let mut edges = vec![b];
    for k in 1..=70 {
        let e = a + span * libm::pow(0.5, k as f64);
        if e - a <= span * 1e-18 || e <= a {
            break;
        }
        edges.push(e);
    }
    edges.push(a);
    edges.reverse();
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Quadrature rule on the unit sphere `S^{n-1}`: directions and weights
/// summing to the sphere area.
///
/// n = 1: the two points. n = 2: uniform angles (trapezoid; spectrally
/// accurate for periodic integrands). n = 3: Gauss-Legendre in the polar
/// cosine crossed with uniform azimuth.
#[derive(Clone, Debug)]
pub struct AngularRule {
    pub dirs: Vec<Point>,
    pub weights: Vec<f64>,
}

impl AngularRule {
    pub fn new(dim: usize, order: usize) -> Self {
        match dim {
            1 => Self {
                dirs: vec![Point::d1(1.0), Point::d1(-1.0)],
                weights: vec![1.0, 1.0],
            },
            2 => {
                let m = order.max(4);
                let w = 2.0 * PI / m as f64;
                let mut dirs = Vec::with_capacity(m);
                for j in 0..m {
                    let th = (j as f64 + 0.5) * 2.0 * PI / m as f64;
                    dirs.push(Point::d2(libm::cos(th), libm::sin(th)));
                }
                Self {
                    dirs,
                    weights: vec![w; m],
                }
            }
            3 => {
                let np = order.max(4);
                let na = 2 * np;
                let gl = GaussLegendre::new(np);
                let mut dirs = Vec::with_capacity(np * na);
                let mut weights = Vec::with_capacity(np * na);
                let wa = 2.0 * PI / na as f64;
                for (t, wt) in gl.nodes.iter().zip(&gl.weights) {
                    let st = libm::sqrt((1.0 - t * t).max(0.0));
                    for j in 0..na {
                        let ph = (j as f64 + 0.5) * 2.0 * PI / na as f64;
                        dirs.push(Point::d3(st * libm::cos(ph), st * libm::sin(ph), *t));
                        weights.push(wt * wa);
                    }
                }
                Self { dirs, weights }
            }
            _ => unreachable!("dimension restricted to 1..=3"),
        }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }
}

/// Parameter interval `t in [t0, t1]` for which `x + t*dir` lies in the ball
/// `B_radius(0)`, restricted to `t >= 0`. `None` when the ray misses the ball.
pub fn ray_ball_interval(x: Point, dir: Point, radius: f64) -> Option<(f64, f64)> {
    // |x + t d|^2 = r^2 with |d| = 1.
    let b = x.dot(&dir);
    let c = x.norm_sq() - radius * radius;
    let disc = b * b - c;
    if disc <= 0.0 {
        return None;
    }
    let sq = libm::sqrt(disc);
    let t0 = (-b - sq).max(0.0);
    let t1 = -b + sq;
    if t1 <= t0 {
        None
    } else {
        Some((t0, t1))
    }
}

/// Distance along `dir` from interior point `x` to the boundary of the box
/// `[lo, hi]` (axis-aligned). `x` must lie inside.
pub fn ray_box_exit(x: Point, dir: Point, lo: Point, hi: Point) -> f64 {
    let mut t = f64::INFINITY;
    for i in 0..x.dim() {
        let d = dir.get(i);
        if d > 1e-300 {
            t = t.min((hi.get(i) - x.get(i)) / d);
        } else if d < -1e-300 {
            t = t.min((lo.get(i) - x.get(i)) / d);
        }
    }
    t.max(0.0)
}
