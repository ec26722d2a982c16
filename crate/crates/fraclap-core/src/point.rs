//! Small fixed-capacity point type for dimensions 1 through 3.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

/// A point (or vector) in `R^n` with `n` in `{1, 2, 3}`.
///
/// Unused coordinates are kept at zero so that norms and dot products can run
/// over the full backing array without branching on the dimension.
#[derive(Copy, Clone, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: u8,
}

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        assert!(
            !coords.is_empty() && coords.len() <= 3,
            "point dimension must be 1..=3"
        );
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Self {
            coords: c,
            dim: coords.len() as u8,
        }
    }

    pub fn zero(dim: usize) -> Self {
        assert!((1..=3).contains(&dim));
        Self {
            coords: [0.0; 3],
            dim: dim as u8,
        }
    }

    pub fn d1(x: f64) -> Self {
        Self::new(&[x])
    }

    pub fn d2(x: f64, y: f64) -> Self {
        Self::new(&[x, y])
    }

    pub fn d3(x: f64, y: f64, z: f64) -> Self {
        Self::new(&[x, y, z])
    }

    /// Unit vector along axis `i`, scaled by `v`.
    pub fn axis(dim: usize, i: usize, v: f64) -> Self {
        let mut p = Self::zero(dim);
        p.coords[i] = v;
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        debug_assert!(i < self.dim as usize);
        self.coords[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: f64) {
        debug_assert!(i < self.dim as usize);
        self.coords[i] = v;
    }

    #[inline]
    pub fn dot(&self, rhs: &Point) -> f64 {
        self.coords[0] * rhs.coords[0]
            + self.coords[1] * rhs.coords[1]
            + self.coords[2] * rhs.coords[2]
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    #[inline]
    pub fn dist(&self, rhs: &Point) -> f64 {
        (*self - *rhs).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        Point {
            coords: [
                self.coords[0] + rhs.coords[0],
                self.coords[1] + rhs.coords[1],
                self.coords[2] + rhs.coords[2],
            ],
            dim: self.dim,
        }
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        Point {
            coords: [
                self.coords[0] - rhs.coords[0],
                self.coords[1] - rhs.coords[1],
                self.coords[2] - rhs.coords[2],
            ],
            dim: self.dim,
        }
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, rhs: f64) -> Point {
        Point {
            coords: [
                self.coords[0] * rhs,
                self.coords[1] * rhs,
                self.coords[2] * rhs,
            ],
            dim: self.dim,
        }
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        self * -1.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_norms() {
        let a = Point::d2(3.0, 4.0);
        assert_eq!(a.norm(), 5.0);
        let b = Point::d2(1.0, 1.0);
        assert_eq!((a - b).coords(), &[2.0, 3.0]);
        assert_eq!((a + b).coords(), &[4.0, 5.0]);
        assert_eq!((a * 2.0).coords(), &[6.0, 8.0]);
        assert_eq!(a.dot(&b), 7.0);
    }

    #[test]
    fn unused_coordinates_stay_zero() {
        let a = Point::d1(2.0);
        assert_eq!(a.norm(), 2.0);
        assert_eq!(a.dim(), 1);
    }
}
