//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors produced by parameter validation, field construction, quadrature,
/// and the experiment layer.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter fell outside its admissible open interval.
    OutOfRange { name: &'static str, value: f64 },
    /// Supercriticality exponent `p` outside `(1, (n+2s)/(n-2s))`.
    Supercritical { p: f64, bound: f64 },
    /// A Riesz-kernel operation was requested with `n <= 2s`.
    RieszInvalid { n: u32, s: f64 },
    /// A field flagged nonnegative carries a negative sample.
    NegativeSample { index: usize, value: f64 },
    /// Exterior decay exponent too large for the defining integral to converge.
    InadmissibleExterior { exponent: f64, bound: f64 },
    /// Grid geometry violates an invariant (spacing, shape, value count).
    BadGrid(&'static str),
    /// Successive quadrature refinements disagree beyond the requested tolerance.
    QuadratureNotConverged { estimate: f64, tol: f64 },
    /// Evaluation point too close to the grid boundary.
    Margin(&'static str),
    /// Argument outside the domain of a kernel or comparison.
    Domain(&'static str),
    /// Derivative order beyond what the kernel recursion supports.
    UnsupportedOrder { order: u32, max: u32 },
    /// Kernel evaluated on the diagonal `x = y`.
    Singular,
    /// Neither exponent condition of the gradient formula holds.
    RegularityPrecondition,
    /// A norm estimator was given a region containing no grid points.
    EmptyRegion,
    /// The auxiliary-maximum ball contains no grid points.
    EmptyBall,
    /// A strictly positive field is required but a sample is not.
    NotPositive { value: f64 },
    /// Gradient-mode machinery unavailable under the given parameters.
    GradientUnavailable(&'static str),
    /// Field class inconsistent with the requested estimate.
    ClassMismatch(&'static str),
    /// Nonnegativity assertion missing or violated on the input field.
    SignViolation,
    /// Rescaling produced an unrepresentable grid.
    Resample(&'static str),
    /// Text input (expression or model string) failed to parse.
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfRange { name, value } => {
                write!(f, "parameter {name} = {value} out of range")
            }
            Error::Supercritical { p, bound } => {
                write!(f, "exponent p = {p} outside (1, {bound})")
            }
            Error::RieszInvalid { n, s } => {
                write!(f, "Riesz kernel requires n > 2s, got n = {n}, s = {s}")
            }
            Error::NegativeSample { index, value } => {
                write!(f, "nonnegative field has sample {value} at index {index}")
            }
            Error::InadmissibleExterior { exponent, bound } => {
                write!(f, "exterior growth exponent {exponent} >= {bound} diverges")
            }
            Error::BadGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::QuadratureNotConverged { estimate, tol } => {
                write!(f, "quadrature not converged: estimate {estimate} > tol {tol}")
            }
            Error::Margin(msg) => write!(f, "insufficient grid margin: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::UnsupportedOrder { order, max } => {
                write!(f, "derivative order {order} unsupported (max {max})")
            }
            Error::Singular => write!(f, "kernel evaluated at x = y"),
            Error::RegularityPrecondition => {
                write!(f, "gradient formula needs 2s > 1, or Hölder data with 2s + alpha > 1")
            }
            Error::EmptyRegion => write!(f, "region contains no grid points"),
            Error::EmptyBall => write!(f, "ball contains no grid points"),
            Error::NotPositive { value } => {
                write!(f, "strictly positive field required, found {value}")
            }
            Error::GradientUnavailable(msg) => write!(f, "gradient mode unavailable: {msg}"),
            Error::ClassMismatch(msg) => write!(f, "class mismatch: {msg}"),
            Error::SignViolation => write!(f, "field is not flagged nonnegative"),
            Error::Resample(msg) => write!(f, "rescale failed: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
