//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the core math runs on.
///
/// The tolerance hooks scale the fixed double-precision thresholds to the
/// precision of the implementing type, so `f32` instances run the same code
/// with looser acceptance bands.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Tolerance for identities that hold exactly up to rounding.
    fn exact_tol() -> Self;
    /// Tolerance for optimization-derived quantities.
    fn opt_tol() -> Self;
    /// Target for the inner solver's duality-gap certificate.
    fn solver_tol() -> Self;

    /// Lossy conversion from a literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn exact_tol() -> Self {
        1e-12
    }
    fn opt_tol() -> Self {
        1e-6
    }
    fn solver_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn exact_tol() -> Self {
        1e-5
    }
    fn opt_tol() -> Self {
        1e-3
    }
    fn solver_tol() -> Self {
        1e-6
    }
}

/// `ln(Σ exp(v))`, returning `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let values: Vec<T> = values.into_iter().collect();
    let top = values.iter().copied().fold(T::neg_infinity(), T::max);
    if top == T::neg_infinity() {
        return top;
    }
    let acc: T = values.iter().map(|&v| (v - top).exp()).sum();
    top + acc.ln()
}

/// Relative-or-absolute closeness: `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close<T: Scalar>(a: T, b: T, tol: T) -> bool {
    if a == b {
        return true;
    }
    let scale = T::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= tol * scale
}
