use rand::Rng;

use super::Potential;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite family of nonnegative per-atom vectors summing pointwise to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity<T> {
    members: Vec<Vec<T>>,
}

impl<T: Scalar> PartitionOfUnity<T> {
    pub fn new(members: Vec<Vec<T>>, atoms: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidPartition("no members".into()));
        }
        for (k, g) in members.iter().enumerate() {
            if g.len() != atoms {
                return Err(Error::LengthMismatch {
                    what: "partition member",
                    expected: atoms,
                    got: g.len(),
                });
            }
            if let Some(x) = g.iter().position(|&v| !(v >= T::zero()) || !v.is_finite()) {
                return Err(Error::InvalidPartition(format!(
                    "member {k} is negative or not finite at atom {x}"
                )));
            }
        }
        let tol = T::exact_tol();
        for x in 0..atoms {
            let s: T = members.iter().map(|g| g[x]).sum();
            if (s - T::one()).abs() > tol {
                return Err(Error::InvalidPartition(format!(
                    "members sum to {s} at atom {x}"
                )));
            }
        }
        Ok(Self { members })
    }

    /// Indicators of single atoms.
    pub fn atomic(atoms: usize) -> Self {
        let members = (0..atoms)
            .map(|a| Potential::<T>::indicator(atoms, &[a]).into_values())
            .collect();
        Self { members }
    }

    /// The one-member partition `{1}`.
    pub fn trivial(atoms: usize) -> Self {
        Self {
            members: vec![vec![T::one(); atoms]],
        }
    }

    /// Indicators of the given disjoint blocks; the blocks must cover every atom.
    pub fn from_blocks(atoms: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let members = blocks
            .iter()
            .map(|b| Potential::<T>::indicator(atoms, b).into_values())
            .collect();
        Self::new(members, atoms)
    }

    /// `k` rows of a random nonnegative matrix, normalized columnwise.
    pub fn random_soft<R: Rng + ?Sized>(rng: &mut R, atoms: usize, k: usize) -> Self {
        assert!(k >= 1);
        let mut members = vec![vec![T::zero(); atoms]; k];
        for x in 0..atoms {
            let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = raw.iter().sum();
            for (g, r) in members.iter_mut().zip(&raw) {
                g[x] = T::lit(r / s);
            }
        }
        Self { members }
    }

    pub fn members(&self) -> &[Vec<T>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn atoms(&self) -> usize {
        self.members[0].len()
    }
}
