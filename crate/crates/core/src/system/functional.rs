use serde::{Deserialize, Serialize};

use super::Potential;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which dual space a functional lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Functionals on `L^∞(X, m)`: null atoms are invisible.
    #[default]
    Essential,
    /// Functionals on bounded measurable functions: null atoms are visible.
    Full,
}

/// A linear functional on potentials, stored as one weight per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional<T> {
    weights: Vec<T>,
    mode: Mode,
}

impl<T: Scalar> Functional<T> {
    pub fn new(weights: Vec<T>, mode: Mode) -> Result<Self> {
        if let Some(i) = weights.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { weights, mode })
    }

    pub fn essential(weights: Vec<T>) -> Result<Self> {
        Self::new(weights, Mode::Essential)
    }

    pub fn full(weights: Vec<T>) -> Result<Self> {
        Self::new(weights, Mode::Full)
    }

    /// Point mass at `atom`.
    pub fn dirac(len: usize, atom: usize, mode: Mode) -> Self {
        let mut weights = vec![T::zero(); len];
        weights[atom] = T::one();
        Self { weights, mode }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `μ[f] = Σ_x w(x) f(x)`.
    pub fn pair(&self, f: &Potential<T>) -> T {
        self.pair_slice(f.values())
    }

    pub fn pair_slice(&self, f: &[T]) -> T {
        assert_eq!(self.weights.len(), f.len(), "functional length mismatch");
        self.weights.iter().zip(f).map(|(&w, &v)| w * v).sum()
    }

    /// `μ[1]`.
    pub fn total(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn is_positive(&self, tol: T) -> bool {
        self.weights.iter().all(|&w| w >= -tol)
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.total() - T::one()).abs() <= tol
    }

    /// `(1 - t) μ + t ν`, keeping the mode of `self`.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        assert_eq!(self.len(), other.len(), "functional length mismatch");
        Self {
            weights: self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(&a, &b)| (T::one() - t) * a + t * b)
                .collect(),
            mode: self.mode,
        }
    }

    /// Convex combination `Σ_i θ_i μ_i`.
    pub fn mixture(parts: &[Self], coefficients: &[T]) -> Self {
        assert!(!parts.is_empty());
        let len = parts[0].len();
        let mut weights = vec![T::zero(); len];
        for (part, &c) in parts.iter().zip(coefficients) {
            for (w, &v) in weights.iter_mut().zip(&part.weights) {
                *w = *w + c * v;
            }
        }
        Self {
            weights,
            mode: parts[0].mode,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_and_normalization() {
        let mu = Functional::essential(vec![0.25f64, 0.75]).unwrap();
        let f = Potential::new(vec![4.0, 0.0]).unwrap();
        assert_eq!(mu.pair(&f), 1.0);
        assert!(mu.is_normalized(1e-12));
        assert!(mu.is_positive(0.0));
        let nu = Functional::essential(vec![2.0f64 / 3.0, 2.0 / 3.0, -1.0 / 3.0]).unwrap();
        assert!(!nu.is_positive(1e-12));
    }

    #[test]
    fn mode_serializes_lowercase() {
        assert_eq!(serde_json::to_string(&Mode::Full).unwrap(), "\"full\"");
        assert_eq!(Mode::default(), Mode::Essential);
    }
}
