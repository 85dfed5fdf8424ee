use std::ops::{Add, Index, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A real value per atom: a bounded measurable function on the atom set.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<T> {
    values: Vec<T>,
}

impl<T: Scalar> Potential<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self::constant(len, T::zero())
    }

    pub fn constant(len: usize, c: T) -> Self {
        Self { values: vec![c; len] }
    }

    /// Indicator of a set of atoms.
    pub fn indicator(len: usize, atoms: &[usize]) -> Self {
        let mut values = vec![T::zero(); len];
        for &a in atoms {
            values[a] = T::one();
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn shift(&self, c: T) -> Self {
        self.map(|v| v + c)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        self.zip(other, |a, b| (T::one() - t) * a + t * b)
    }

    pub fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.len(), other.len(), "potential length mismatch");
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Pointwise `self >= other`.
    pub fn dominates(&self, other: &Self) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a >= b)
    }
}

impl<T> Index<usize> for Potential<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.values[i]
    }
}

impl<T: Scalar> Add for &Potential<T> {
    type Output = Potential<T>;
    fn add(self, rhs: Self) -> Potential<T> {
        self.zip(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &Potential<T> {
    type Output = Potential<T>;
    fn sub(self, rhs: Self) -> Potential<T> {
        self.zip(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Neg for &Potential<T> {
    type Output = Potential<T>;
    fn neg(self) -> Potential<T> {
        self.map(|v| -v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_values() {
        assert_eq!(Potential::new(vec![0.0, f64::NAN]), Err(Error::NonFinite(1)));
        assert!(Potential::new(vec![1.0f64, -2.0]).is_ok());
    }

    #[test]
    fn arithmetic() {
        let a = Potential::new(vec![1.0f64, 2.0]).unwrap();
        let b = Potential::new(vec![0.5f64, -1.0]).unwrap();
        assert_eq!((&a + &b).values(), &[1.5, 1.0]);
        assert_eq!((&a - &b).values(), &[0.5, 3.0]);
        assert_eq!(a.lerp(&b, 0.5).values(), &[0.75, 0.5]);
        assert_eq!((&a - &b).sup_norm(), 3.0);
        assert!(a.dominates(&b));
    }
}
