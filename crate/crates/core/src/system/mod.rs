//! Finite measurable dynamical systems `(X, m, α)` and the objects living on them.
//!
//! Atoms are indexed `0..N`; labels are carried for display only. The space is
//! the full power set of atoms, so every bounded functional is a weight vector.

mod functional;
mod partition;
mod potential;

use std::collections::HashSet;

pub use functional::{Functional, Mode};
pub use partition::PartitionOfUnity;
pub use potential::Potential;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite set of atoms with a base measure and a total self-map.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSystem<T> {
    labels: Vec<String>,
    measure: Vec<T>,
    map: Vec<usize>,
}

/// A null atom that receives mass from a supported atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportViolation {
    pub atom: usize,
    pub preimage: usize,
}

/// Outcome of checking the boundedness hypothesis `m(α⁻¹G) ≤ C m(G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T> {
    /// Smallest admissible boundedness constant.
    pub constant: T,
    pub support_closed: bool,
    pub violations: Vec<SupportViolation>,
}

impl<T> ValidationReport<T> {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Cycle and tail structure of the functional graph of `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    /// Each cycle starts at its smallest atom and follows `α`; sorted by that atom.
    pub cycles: Vec<Vec<usize>>,
    /// Cycle id for atoms lying on a cycle.
    pub cycle_of: Vec<Option<usize>>,
    /// Cycle every atom eventually falls into.
    pub terminal: Vec<usize>,
    /// Steps needed to reach the terminal cycle.
    pub entry_time: Vec<usize>,
    /// Whether each cycle lies inside `supp m`.
    pub supported: Vec<bool>,
}

impl CycleDecomposition {
    pub fn supported_cycles(&self) -> impl Iterator<Item = &Vec<usize>> + '_ {
        self.cycles
            .iter()
            .zip(&self.supported)
            .filter_map(|(c, &s)| s.then_some(c))
    }

    /// Least common multiple of the supported cycle lengths.
    pub fn supported_period(&self) -> usize {
        self.supported_cycles()
            .map(Vec::len)
            .fold(1, |acc, l| acc / gcd(acc, l) * l)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Result of the invariance test for a functional.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport<T> {
    pub invariant: bool,
    /// `max_y |μ(α⁻¹{y}) − μ({y})|`.
    pub worst_violation: T,
    pub worst_atom: usize,
    pub positive: bool,
    pub normalized: bool,
}

impl<T: Scalar> FiniteSystem<T> {
    /// Builds a system, checking the structural invariants.
    ///
    /// The support-closure hypothesis is not enforced here; [`validate`](Self::validate)
    /// reports it.
    pub fn new(labels: Vec<String>, measure: Vec<T>, map: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if measure.len() != n {
            return Err(Error::LengthMismatch {
                what: "measure",
                expected: n,
                got: measure.len(),
            });
        }
        if map.len() != n {
            return Err(Error::LengthMismatch {
                what: "map",
                expected: n,
                got: map.len(),
            });
        }
        if let Some((atom, &target)) = map.iter().enumerate().find(|(_, &t)| t >= n) {
            return Err(Error::MapOutOfRange { atom, target, len: n });
        }
        if let Some(i) = measure.iter().position(|&v| !(v >= T::zero()) || !v.is_finite()) {
            return Err(Error::BadMeasure(i));
        }
        if measure.iter().copied().sum::<T>() <= T::zero() {
            return Err(Error::ZeroMass);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels, measure, map })
    }

    /// Builds a system with labels `"0"`, `"1"`, ….
    pub fn from_parts(measure: Vec<T>, map: Vec<usize>) -> Result<Self> {
        let labels = (0..measure.len()).map(|i| i.to_string()).collect();
        Self::new(labels, measure, map)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn measure(&self) -> &[T] {
        &self.measure
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.map[x]
    }

    #[inline]
    pub fn mass(&self, x: usize) -> T {
        self.measure[x]
    }

    #[inline]
    pub fn is_supported(&self, x: usize) -> bool {
        self.measure[x] > T::zero()
    }

    pub fn supported_atoms(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.is_supported(x)).collect()
    }

    pub fn null_atoms(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| !self.is_supported(x)).collect()
    }

    pub fn has_null_atoms(&self) -> bool {
        self.measure.iter().any(|&m| m == T::zero())
    }

    /// `αⁿ(x)`.
    pub fn iterate_atom(&self, mut x: usize, n: usize) -> usize {
        for _ in 0..n {
            x = self.map[x];
        }
        x
    }

    /// The map `αⁿ` as an index vector.
    pub fn power_map(&self, n: usize) -> Vec<usize> {
        (0..self.len()).map(|x| self.iterate_atom(x, n)).collect()
    }

    /// `f ∘ α`.
    pub fn compose(&self, f: &Potential<T>) -> Potential<T> {
        self.check_len(f.len());
        Potential::new(self.map.iter().map(|&y| f[y]).collect()).expect("finite")
    }

    /// `S_nφ = φ + φ∘α + ⋯ + φ∘α^{n−1}`.
    pub fn birkhoff(&self, phi: &Potential<T>, n: usize) -> Result<Potential<T>> {
        if n == 0 {
            return Err(Error::NonPositiveIterate);
        }
        self.check_len(phi.len());
        let sums = (0..self.len())
            .map(|x| {
                let mut y = x;
                let mut acc = T::zero();
                for _ in 0..n {
                    acc = acc + phi[y];
                    y = self.map[y];
                }
                acc
            })
            .collect();
        Potential::new(sums)
    }

    /// `m(α⁻¹{y})`.
    pub fn preimage_mass(&self, y: usize) -> T {
        (0..self.len())
            .filter(|&x| self.map[x] == y)
            .map(|x| self.measure[x])
            .sum()
    }

    /// Checks the boundedness hypothesis and support closure.
    pub fn validate(&self) -> ValidationReport<T> {
        let mut constant = T::zero();
        let mut violations = Vec::new();
        for y in 0..self.len() {
            let pre = self.preimage_mass(y);
            if self.is_supported(y) {
                constant = constant.max(pre / self.measure[y]);
            } else {
                violations.extend(
                    (0..self.len())
                        .filter(|&x| self.map[x] == y && self.is_supported(x))
                        .map(|x| SupportViolation { atom: y, preimage: x }),
                );
            }
        }
        ValidationReport {
            constant,
            support_closed: violations.is_empty(),
            violations,
        }
    }

    /// Errors with the first support-closure violation, if any.
    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().violations.first() {
            Some(v) => Err(Error::SupportClosure {
                atom: v.atom,
                preimage: v.preimage,
            }),
            None => Ok(()),
        }
    }

    pub fn cycles(&self) -> CycleDecomposition {
        let n = self.len();
        // 0 = unvisited, 1 = on current walk, 2 = done
        let mut state = vec![0u8; n];
        let mut cycle_of = vec![None; n];
        let mut raw_cycles: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut walk = Vec::new();
            let mut x = start;
            while state[x] == 0 {
                state[x] = 1;
                walk.push(x);
                x = self.map[x];
            }
            if state[x] == 1 {
                let pos = walk.iter().position(|&w| w == x).expect("on walk");
                let mut cyc = walk[pos..].to_vec();
                let min_pos = cyc
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &a)| a)
                    .map(|(i, _)| i)
                    .expect("nonempty");
                cyc.rotate_left(min_pos);
                raw_cycles.push(cyc);
            }
            for w in walk {
                state[w] = 2;
            }
        }
        raw_cycles.sort_by_key(|c| c[0]);
        for (id, c) in raw_cycles.iter().enumerate() {
            for &a in c {
                cycle_of[a] = Some(id);
            }
        }
        let mut terminal = vec![usize::MAX; n];
        let mut entry_time = vec![usize::MAX; n];
        for x in 0..n {
            if let Some(id) = cycle_of[x] {
                terminal[x] = id;
                entry_time[x] = 0;
            }
        }
        for x in 0..n {
            if terminal[x] != usize::MAX {
                continue;
            }
            let mut path = Vec::new();
            let mut y = x;
            while terminal[y] == usize::MAX {
                path.push(y);
                y = self.map[y];
            }
            let (id, mut t) = (terminal[y], entry_time[y]);
            for &p in path.iter().rev() {
                t += 1;
                terminal[p] = id;
                entry_time[p] = t;
            }
        }
        let supported = raw_cycles
            .iter()
            .map(|c| c.iter().all(|&a| self.is_supported(a)))
            .collect();
        CycleDecomposition {
            cycles: raw_cycles,
            cycle_of,
            terminal,
            entry_time,
            supported,
        }
    }

    /// Checks `μ(α⁻¹{y}) = μ({y})` for every atom, plus positivity and normalization.
    pub fn is_invariant(&self, mu: &Functional<T>) -> InvarianceReport<T> {
        self.check_len(mu.len());
        let w = mu.weights();
        let mut pulled = vec![T::zero(); self.len()];
        for x in 0..self.len() {
            pulled[self.map[x]] = pulled[self.map[x]] + w[x];
        }
        let (worst_atom, worst_violation) = pulled
            .iter()
            .zip(w)
            .map(|(&p, &v)| (p - v).abs())
            .enumerate()
            .fold((0, T::zero()), |best, (y, d)| if d > best.1 { (y, d) } else { best });
        let tol = T::exact_tol();
        let mut positive = mu.is_positive(tol);
        if mu.mode() == Mode::Essential {
            positive &= (0..self.len()).all(|x| self.is_supported(x) || w[x] == T::zero());
        }
        let normalized = mu.is_normalized(tol);
        InvarianceReport {
            invariant: worst_violation <= tol && positive && normalized,
            worst_violation,
            worst_atom,
            positive,
            normalized,
        }
    }

    /// Uniform measures on the supported cycles: the vertices of the invariant polytope.
    pub fn invariant_vertices(&self) -> Vec<Functional<T>> {
        self.cycles()
            .supported_cycles()
            .map(|c| {
                let mut w = vec![T::zero(); self.len()];
                let share = T::one() / T::from_count(c.len());
                for &a in c {
                    w[a] = share;
                }
                Functional::essential(w).expect("finite")
            })
            .collect()
    }

    /// Subsystem on `supp m`. Atom `i` of the result is atom `support_indices()[i]`.
    pub fn restrict_to_support(&self) -> Result<Self> {
        self.ensure_valid()?;
        let kept = self.supported_atoms();
        let mut new_index = vec![usize::MAX; self.len()];
        for (i, &a) in kept.iter().enumerate() {
            new_index[a] = i;
        }
        Self::new(
            kept.iter().map(|&a| self.labels[a].clone()).collect(),
            kept.iter().map(|&a| self.measure[a]).collect(),
            kept.iter().map(|&a| new_index[self.map[a]]).collect(),
        )
    }

    pub fn support_indices(&self) -> Vec<usize> {
        self.supported_atoms()
    }

    /// Same measure, map replaced by `αⁿ`.
    pub fn power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NonPositiveIterate);
        }
        Self::new(self.labels.clone(), self.measure.clone(), self.power_map(n))
    }

    /// Errors unless `mu` has the right length and, in essential mode, vanishes on null atoms.
    pub fn check_functional(&self, mu: &Functional<T>) -> Result<()> {
        if mu.len() != self.len() {
            return Err(Error::LengthMismatch {
                what: "functional",
                expected: self.len(),
                got: mu.len(),
            });
        }
        if mu.mode() == Mode::Essential {
            if let Some(x) = (0..self.len()).find(|&x| !self.is_supported(x) && mu.weights()[x] != T::zero()) {
                return Err(Error::EssentialNullCharge(x));
            }
        }
        Ok(())
    }

    pub fn check_potential(&self, phi: &Potential<T>) -> Result<()> {
        if phi.len() != self.len() {
            return Err(Error::LengthMismatch {
                what: "potential",
                expected: self.len(),
                got: phi.len(),
            });
        }
        Ok(())
    }

    fn check_len(&self, len: usize) {
        assert_eq!(len, self.len(), "vector length does not match atom count");
    }
}
