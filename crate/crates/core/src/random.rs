//! Seeded generators for systems, potentials and functionals.

use rand::Rng;

use crate::scalar::Scalar;
use crate::system::{FiniteSystem, Functional, Mode, Potential};

/// A random valid system on `atoms` atoms.
///
/// Masses are drawn in `[0.5, 2)`. With probability `null_prob` an atom is made
/// null; closure is then repaired by zeroing every mass that feeds a null atom.
/// If that empties the support the draw is repeated.
pub fn system<T: Scalar, R: Rng + ?Sized>(rng: &mut R, atoms: usize, null_prob: f64) -> FiniteSystem<T> {
    assert!(atoms >= 1);
    loop {
        let map: Vec<usize> = (0..atoms).map(|_| rng.random_range(0..atoms)).collect();
        let mut measure: Vec<f64> = (0..atoms)
            .map(|_| {
                if rng.random::<f64>() < null_prob {
                    0.0
                } else {
                    rng.random_range(0.5..2.0)
                }
            })
            .collect();
        loop {
            let mut changed = false;
            for x in 0..atoms {
                if measure[x] > 0.0 && measure[map[x]] == 0.0 {
                    measure[x] = 0.0;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if measure.iter().any(|&m| m > 0.0) {
            let measure = measure.into_iter().map(T::lit).collect();
            return FiniteSystem::from_parts(measure, map).expect("well formed");
        }
    }
}

/// Potential with entries uniform in `[-bound, bound]`.
pub fn potential<T: Scalar, R: Rng + ?Sized>(rng: &mut R, atoms: usize, bound: f64) -> Potential<T> {
    Potential::new((0..atoms).map(|_| T::lit(rng.random_range(-bound..=bound))).collect())
        .expect("finite")
}

/// Random point of the invariant polytope: Dirichlet-like weights on the vertices.
pub fn polytope_measure<T: Scalar, R: Rng + ?Sized>(rng: &mut R, sys: &FiniteSystem<T>) -> Functional<T> {
    let vertices = sys.invariant_vertices();
    let raw: Vec<f64> = (0..vertices.len()).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    let theta: Vec<T> = raw.iter().map(|r| T::lit(r / s)).collect();
    Functional::mixture(&vertices, &theta)
}

/// Arbitrary functional with weights in `[-1, 1]`; null atoms stay zero in essential mode.
pub fn functional<T: Scalar, R: Rng + ?Sized>(rng: &mut R, sys: &FiniteSystem<T>, mode: Mode) -> Functional<T> {
    let w = (0..sys.len())
        .map(|x| {
            if mode == Mode::Essential && !sys.is_supported(x) {
                T::zero()
            } else {
                T::lit(rng.random_range(-1.0..=1.0))
            }
        })
        .collect();
    Functional::new(w, mode).expect("finite")
}

/// Positive normalized functional on the supported atoms, generally not invariant.
pub fn probability<T: Scalar, R: Rng + ?Sized>(rng: &mut R, sys: &FiniteSystem<T>) -> Functional<T> {
    let raw: Vec<f64> = (0..sys.len())
        .map(|x| if sys.is_supported(x) { rng.random::<f64>() + 1e-3 } else { 0.0 })
        .collect();
    let s: f64 = raw.iter().sum();
    Functional::essential(raw.iter().map(|r| T::lit(r / s)).collect()).expect("finite")
}

/// Full-mode functional charging at least one null atom. `None` if the system has none.
pub fn null_charging<T: Scalar, R: Rng + ?Sized>(rng: &mut R, sys: &FiniteSystem<T>) -> Option<Functional<T>> {
    let nulls = sys.null_atoms();
    if nulls.is_empty() {
        return None;
    }
    let base = polytope_measure(rng, sys);
    let atom = nulls[rng.random_range(0..nulls.len())];
    let charge = rng.random_range(0.1..1.0);
    let point = Functional::dirac(sys.len(), atom, Mode::Full);
    Some(base.with_mode(Mode::Full).lerp(&point, T::lit(charge)))
}

/// Nonnegative `f` with `‖f‖_{L¹(m)} = 1`; zero on null atoms. Signs are irrelevant to every
/// quantity built from `|f|`.
pub fn unit_l1<T: Scalar, R: Rng + ?Sized>(rng: &mut R, sys: &FiniteSystem<T>) -> Vec<T> {
    let raw: Vec<f64> = (0..sys.len())
        .map(|x| if sys.is_supported(x) { rng.random::<f64>() } else { 0.0 })
        .collect();
    let norm: f64 = raw
        .iter()
        .enumerate()
        .map(|(x, r)| r * sys.mass(x).to_f64_lossy())
        .sum();
    raw.iter().map(|r| T::lit(r / norm)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_systems_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let atoms = rng.random_range(1..=8);
            let sys = system::<f64, _>(&mut rng, atoms, 0.3);
            assert!(sys.validate().is_valid());
        }
    }

    #[test]
    fn polytope_samples_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let sys = system::<f64, _>(&mut rng, 6, 0.2);
            let mu = polytope_measure(&mut rng, &sys);
            assert!(sys.is_invariant(&mu).invariant);
            assert!(sys.check_functional(&mu).is_ok());
        }
    }
}
