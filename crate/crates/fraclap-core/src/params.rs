//! Operator parameters and smoothness-class bookkeeping.

use crate::error::{Error, Result};

/// Validated parameter set: dimension `n`, order `s`, optional Hölder
/// exponent `alpha` for the data, optional supercritical exponent `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracParams {
    n: u32,
    s: f64,
    alpha: Option<f64>,
    p: Option<f64>,
    riesz_permitted: bool,
}

impl FracParams {
    /// Validate `(n, s, alpha, p)`.
    ///
    /// `s` and `alpha` must lie in `(0, 1)`; `p`, when present, in
    /// `(1, (n+2s)/(n-2s))`. Whether Riesz-kernel operations are permitted
    /// (`n > 2s`) is recorded rather than enforced here; operations that need
    /// the kernel call [`FracParams::require_riesz`].
    pub fn new(n: u32, s: f64, alpha: Option<f64>, p: Option<f64>) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::OutOfRange {
                name: "n",
                value: n as f64,
            });
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::OutOfRange { name: "s", value: s });
        }
        if let Some(a) = alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::OutOfRange {
                    name: "alpha",
                    value: a,
                });
            }
        }
        let riesz_permitted = (n as f64) > 2.0 * s;
        if let Some(p) = p {
            // The subcritical window only exists when n > 2s.
            if !riesz_permitted {
                return Err(Error::RieszInvalid { n, s });
            }
            let bound = (n as f64 + 2.0 * s) / (n as f64 - 2.0 * s);
            if !(p > 1.0 && p < bound) {
                return Err(Error::Supercritical { p, bound });
            }
        }
        Ok(Self {
            n,
            s,
            alpha,
            p,
            riesz_permitted,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.s
    }

    #[inline]
    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    #[inline]
    pub fn p(&self) -> Option<f64> {
        self.p
    }

    #[inline]
    pub fn riesz_permitted(&self) -> bool {
        self.riesz_permitted
    }

    pub fn require_riesz(&self) -> Result<()> {
        if self.riesz_permitted {
            Ok(())
        } else {
            Err(Error::RieszInvalid { n: self.n, s: self.s })
        }
    }

    pub fn require_p(&self) -> Result<f64> {
        self.p.ok_or(Error::OutOfRange {
            name: "p",
            value: f64::NAN,
        })
    }

    /// Target smoothness exponent: `2s` alone, `2s + alpha` with data.
    pub fn target_exponent(&self) -> f64 {
        2.0 * self.s + self.alpha.unwrap_or(0.0)
    }
}

/// Smoothness class reached by the interior estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HolderClass {
    /// `C^{k,beta}` with `beta` in `(0,1)`.
    Classical { k: u32, beta: f64 },
    /// `C^{k,ln L}`: Lipschitz with a logarithmic correction at order `k`.
    LnLipschitz { k: u32 },
    /// Integer `C^k` norm (Dini-continuous data at an integer target).
    DiniTarget { k: u32 },
}

impl HolderClass {
    /// Highest derivative order the class measures.
    pub fn order(&self) -> u32 {
        match *self {
            HolderClass::Classical { k, .. } => k,
            HolderClass::LnLipschitz { k } => k,
            HolderClass::DiniTarget { k } => k,
        }
    }
}

/// Tolerance for deciding whether the target exponent is an integer;
/// floating-point exponent arithmetic makes exact hits unreliable.
pub const INTEGER_DETECTION_TOL: f64 = 1e-12;

/// Classify the target exponent `t = 2s (+ alpha)`.
///
/// Non-integer `t` yields `Classical(floor t, frac t)`; integer `t` is the
/// borderline case and yields `LnLipschitz(t - 1)`.
pub fn holder_class(s: f64, alpha: Option<f64>) -> Result<HolderClass> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OutOfRange { name: "s", value: s });
    }
    if let Some(a) = alpha {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: a,
            });
        }
    }
    let t = 2.0 * s + alpha.unwrap_or(0.0);
    let nearest = libm::round(t);
    if (t - nearest).abs() <= INTEGER_DETECTION_TOL && nearest >= 1.0 {
        Ok(HolderClass::LnLipschitz {
            k: nearest as u32 - 1,
        })
    } else {
        let k = libm::floor(t) as u32;
        Ok(HolderClass::Classical { k, beta: t - k as f64 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_ranges() {
        let p = FracParams::new(2, 0.75, Some(0.3), None).unwrap();
        assert!(p.riesz_permitted()); // 2 > 1.5
        assert!(matches!(
            FracParams::new(2, 1.2, None, None),
            Err(Error::OutOfRange { name: "s", .. })
        ));
        assert!(matches!(
            FracParams::new(2, 0.75, Some(1.0), None),
            Err(Error::OutOfRange { name: "alpha", .. })
        ));
        // n = 1, s = 0.75: Riesz-dependent operations must be refused.
        let p = FracParams::new(1, 0.75, None, None).unwrap();
        assert!(!p.riesz_permitted());
        assert!(matches!(p.require_riesz(), Err(Error::RieszInvalid { .. })));
    }

    #[test]
    fn subcritical_window() {
        // n = 3, s = 0.5: bound = 4/2 = 2.
        assert!(FracParams::new(3, 0.5, None, Some(1.5)).is_ok());
        assert!(matches!(
            FracParams::new(3, 0.5, None, Some(2.5)),
            Err(Error::Supercritical { .. })
        ));
        assert!(matches!(
            FracParams::new(1, 0.75, None, Some(1.5)),
            Err(Error::RieszInvalid { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            holder_class(0.3, Some(0.2)).unwrap(),
            HolderClass::Classical { k: 0, beta: 0.8 }
        );
        assert_eq!(
            holder_class(0.75, Some(0.5)).unwrap(),
            HolderClass::LnLipschitz { k: 1 }
        );
        assert_eq!(
            holder_class(0.5, None).unwrap(),
            HolderClass::LnLipschitz { k: 0 }
        );
        match holder_class(0.8, None).unwrap() {
            HolderClass::Classical { k, beta } => {
                assert_eq!(k, 1);
                assert!((beta - 0.6).abs() < 1e-12);
            }
            other => panic!("unexpected class {other:?}"),
        }
    }

    #[test]
    fn classification_matches_enumeration() {
        // Brute-force oracle over a 1e-3 grid of exponents.
        let mut i = 1;
        while i < 1000 {
            let s = i as f64 * 1e-3;
            for aj in [None, Some(0.25), Some(0.5), Some(0.999)] {
                let t = 2.0 * s + aj.unwrap_or(0.0);
                let got = holder_class(s, aj).unwrap();
                let nearest = libm::round(t);
                let expected = if (t - nearest).abs() <= 1e-12 && nearest >= 1.0 {
                    HolderClass::LnLipschitz {
                        k: nearest as u32 - 1,
                    }
                } else {
                    let k = libm::floor(t) as u32;
                    HolderClass::Classical { k, beta: t - k as f64 }
                };
                assert_eq!(got, expected, "s={s} alpha={aj:?}");
            }
            i += 1;
        }
    }
}
