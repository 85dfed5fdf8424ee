//! Young's inequality, the spectral variational principle and the witnesses for
//! `inf (λ − μ) = -inf`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random;
use crate::scalar::Scalar;
use crate::spectral;
use crate::system::{FiniteSystem, Functional, Mode, PartitionOfUnity, Potential};
use crate::tentropy::{self, InnerSolution};

/// Why a functional lies outside the invariant polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Defect {
    NullCharge,
    Negativity,
    Normalization,
    NonInvariance,
}

impl Defect {
    pub fn as_str(self) -> &'static str {
        match self {
            Defect::NullCharge => "null_charge",
            Defect::Negativity => "negativity",
            Defect::Normalization => "normalization",
            Defect::NonInvariance => "non_invariance",
        }
    }
}

/// A ray `t ↦ t·direction` along which `λ − μ` decreases at least like `-rate·t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceWitness<T> {
    pub defect: Defect,
    pub direction: Potential<T>,
    pub rate: T,
    /// Atom responsible for the defect (none for a normalization defect).
    pub atom: Option<usize>,
}

/// Ray parameters used to test a witness.
pub const RAY_STEPS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

/// `λ(φ) − μ[φ]`.
pub fn dual_objective<T: Scalar>(sys: &FiniteSystem<T>, mu: &Functional<T>, phi: &Potential<T>) -> T {
    spectral::spectral_potential(sys, phi) - mu.pair(phi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayCheck<T> {
    /// `(t, λ(t·d) − μ[t·d])`.
    pub values: Vec<(T, T)>,
    /// Largest `value + rate·t`; at most `1e-9` for a valid witness.
    pub worst_excess: T,
    pub holds: bool,
}

impl<T: Scalar> DivergenceWitness<T> {
    pub fn check_ray(&self, sys: &FiniteSystem<T>, mu: &Functional<T>) -> RayCheck<T> {
        let values: Vec<(T, T)> = RAY_STEPS
            .iter()
            .map(|&t| {
                let t = T::lit(t);
                (t, dual_objective(sys, mu, &self.direction.scale(t)))
            })
            .collect();
        let worst_excess = values
            .iter()
            .map(|&(t, f)| f + self.rate * t)
            .fold(T::neg_infinity(), T::max);
        RayCheck {
            values,
            worst_excess,
            holds: worst_excess <= T::lit(1e-9),
        }
    }
}

/// Finds the first defect in the order null charge, negativity, normalization,
/// non-invariance. Errors with [`Error::NotDivergent`] on invariant probability measures.
pub fn divergence_witness<T: Scalar>(sys: &FiniteSystem<T>, mu: &Functional<T>) -> Result<DivergenceWitness<T>> {
    sys.check_functional(mu)?;
    let tol = T::exact_tol();
    let w = mu.weights();
    let len = sys.len();

    if mu.mode() == Mode::Full {
        let charged = sys
            .null_atoms()
            .into_iter()
            .filter(|&x| w[x].abs() > tol)
            .max_by(|&a, &b| w[a].abs().partial_cmp(&w[b].abs()).unwrap().then(b.cmp(&a)));
        if let Some(x) = charged {
            let sign = if w[x] > T::zero() { T::one() } else { -T::one() };
            return Ok(DivergenceWitness {
                defect: Defect::NullCharge,
                direction: Potential::indicator(len, &[x]).scale(sign),
                rate: w[x].abs(),
                atom: Some(x),
            });
        }
    }

    let negative = (0..len)
        .filter(|&x| w[x] < -tol)
        .min_by(|&a, &b| w[a].partial_cmp(&w[b]).unwrap().then(a.cmp(&b)));
    if let Some(x) = negative {
        return Ok(DivergenceWitness {
            defect: Defect::Negativity,
            direction: Potential::indicator(len, &[x]).scale(-T::one()),
            rate: w[x].abs(),
            atom: Some(x),
        });
    }

    let excess = mu.total() - T::one();
    if excess.abs() > tol {
        let sign = if excess > T::zero() { T::one() } else { -T::one() };
        return Ok(DivergenceWitness {
            defect: Defect::Normalization,
            direction: Potential::constant(len, sign),
            rate: excess.abs(),
            atom: None,
        });
    }

    // δ_y = μ(α⁻¹y) − μ(y); ties go to a positive δ, then to the lowest atom
    let mut pre = vec![T::zero(); len];
    for x in 0..len {
        pre[sys.image(x)] = pre[sys.image(x)] + w[x];
    }
    let mut worst: Option<(usize, T)> = None;
    for y in 0..len {
        let d = pre[y] - w[y];
        let better = match worst {
            None => true,
            Some((_, b)) => d.abs() > b.abs() || (d.abs() == b.abs() && d > T::zero() && b < T::zero()),
        };
        if better {
            worst = Some((y, d));
        }
    }
    match worst {
        Some((y, d)) if d.abs() > tol => {
            let sign = if d > T::zero() { T::one() } else { -T::one() };
            let ind = Potential::indicator(len, &[y]);
            let direction = (&sys.compose(&ind) - &ind).scale(sign);
            Ok(DivergenceWitness {
                defect: Defect::NonInvariance,
                direction,
                rate: d.abs(),
                atom: Some(y),
            })
        }
        _ => Err(Error::NotDivergent),
    }
}

/// `λ(φ) − μ[φ] − τ(μ)` for an invariant measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoungCheck<T> {
    pub lambda: T,
    pub pairing: T,
    pub tau: T,
    pub slack: T,
    pub holds: bool,
    /// The slack vanishes, so `μ` is a subgradient of `λ` at `φ`.
    pub equality: bool,
}

pub fn young_check<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>, mu: &Functional<T>) -> Result<YoungCheck<T>> {
    sys.check_potential(phi)?;
    let inv = sys.is_invariant(mu);
    if !(inv.invariant && inv.positive && inv.normalized) {
        return Err(Error::NotInvariant(inv.worst_violation.to_f64_lossy()));
    }
    let tau = tentropy::tau_dual(sys, mu)?.value;
    let lambda = spectral::spectral_potential(sys, phi);
    let pairing = mu.pair(phi);
    let slack = lambda - pairing - tau;
    let tol = T::lit(1e-9);
    Ok(YoungCheck {
        lambda,
        pairing,
        tau,
        slack,
        holds: slack >= -tol,
        equality: slack.abs() <= tol,
    })
}

/// `λ(φ) = max_μ (τ(μ) + μ[φ])` with the maximizing face.
#[derive(Debug, Clone, PartialEq)]
pub struct VPCertificate<T> {
    pub phi: Potential<T>,
    pub lambda_value: T,
    pub maximizer: Functional<T>,
    /// All invariant vertices attaining the maximum, in cycle order.
    pub face: Vec<Functional<T>>,
    /// `λ(φ) − τ(μ*) − μ*[φ]`.
    pub gap: T,
}

pub fn vp_spectral<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>) -> Result<VPCertificate<T>> {
    sys.ensure_valid()?;
    sys.check_potential(phi)?;
    let vertices = sys.invariant_vertices();
    let values: Vec<T> = vertices.iter().map(|v| v.pair(phi)).collect();
    let best = values.iter().copied().fold(T::neg_infinity(), T::max);
    let tie = T::exact_tol() * best.abs().max(T::one());
    let face: Vec<Functional<T>> = vertices
        .into_iter()
        .zip(&values)
        .filter(|(_, &v)| best - v <= tie)
        .map(|(u, _)| u)
        .collect();
    let maximizer = face[0].clone();
    let lambda_value = spectral::spectral_potential(sys, phi);
    let tau = tentropy::tau_dual(sys, &maximizer)?.value;
    let gap = lambda_value - tau - maximizer.pair(phi);
    Ok(VPCertificate {
        phi: phi.clone(),
        lambda_value,
        maximizer,
        face,
        gap,
    })
}

/// A subgradient of `λ` at `φ`: the first vertex of the maximizing face.
pub fn subgradient<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>) -> Result<Functional<T>> {
    Ok(vp_spectral(sys, phi)?.maximizer)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgradientCheck<T> {
    /// `min_ψ (λ(ψ) − λ(φ) − μ[ψ − φ])` over the sample.
    pub worst_slack: T,
    /// `|τ(μ) − (λ(φ) − μ[φ])|`.
    pub identity_residual: T,
    pub draws: usize,
    pub holds: bool,
}

/// Tests the subgradient inequality on `draws` random `ψ` with `|ψ| ≤ bound`.
pub fn verify_subgradient<T: Scalar, R: Rng + ?Sized>(
    sys: &FiniteSystem<T>,
    phi: &Potential<T>,
    mu: &Functional<T>,
    rng: &mut R,
    draws: usize,
    bound: f64,
) -> Result<SubgradientCheck<T>> {
    let lam_phi = spectral::spectral_potential(sys, phi);
    let mut worst_slack = T::infinity();
    for _ in 0..draws {
        let psi: Potential<T> = random::potential(rng, sys.len(), bound);
        let slack = spectral::spectral_potential(sys, &psi) - lam_phi - mu.pair(&(&psi - phi));
        worst_slack = worst_slack.min(slack);
    }
    let tau = tentropy::tau_dual(sys, mu)?.value;
    let identity_residual = (tau - (lam_phi - mu.pair(phi))).abs();
    let tol = T::lit(1e-9);
    Ok(SubgradientCheck {
        worst_slack,
        identity_residual,
        draws,
        holds: worst_slack >= -tol && identity_residual <= tol,
    })
}

/// Both sides of the null-set statement: a partition with `τ_n = -inf` and a ray
/// along which `λ − μ → -inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma11Report<T> {
    /// Null atoms carrying charge.
    pub charged: Vec<usize>,
    /// `{g, 1 − g}` with `g` the indicator of the charged null atoms.
    pub partition: PartitionOfUnity<T>,
    pub inner: InnerSolution<T>,
    pub witness: DivergenceWitness<T>,
    pub ray: RayCheck<T>,
    pub holds: bool,
}

pub fn lemma11_check<T: Scalar>(sys: &FiniteSystem<T>, mu: &Functional<T>) -> Result<Lemma11Report<T>> {
    sys.check_functional(mu)?;
    let charged: Vec<usize> = if mu.mode() == Mode::Full {
        sys.null_atoms()
            .into_iter()
            .filter(|&x| mu.weights()[x].abs() > T::exact_tol())
            .collect()
    } else {
        Vec::new()
    };
    if charged.is_empty() {
        return Err(Error::NoNullCharge);
    }
    let rest: Vec<usize> = (0..sys.len()).filter(|x| !charged.contains(x)).collect();
    let partition = PartitionOfUnity::from_blocks(sys.len(), &[charged.clone(), rest])?;
    let inner = tentropy::solve_inner(&tentropy::inner_problem(sys, &partition, mu, 1)?);
    let witness = divergence_witness(sys, mu)?;
    let ray = witness.check_ray(sys, mu);
    let holds = inner.value == T::neg_infinity() && witness.defect == Defect::NullCharge && ray.holds;
    Ok(Lemma11Report {
        charged,
        partition,
        inner,
        witness,
        ray,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ess(w: &[f64]) -> Functional<f64> {
        Functional::essential(w.to_vec()).unwrap()
    }

    fn pot(v: &[f64]) -> Potential<f64> {
        Potential::new(v.to_vec()).unwrap()
    }

    #[test]
    fn young_examples() {
        let c3 = fixtures::cycle3::<f64>();
        let y = young_check(&c3, &pot(&[2f64.ln(), 0.0, 0.0]), &ess(&[1.0 / 3.0; 3])).unwrap();
        assert!(y.slack.abs() < 1e-12 && y.equality);
        let two = fixtures::twocyc::<f64>();
        let y = young_check(&two, &pot(&[1.0, 1.0, 0.0, 0.0]), &ess(&[0.0, 0.0, 0.5, 0.5])).unwrap();
        assert!((y.slack - 1.0).abs() < 1e-12 && !y.equality);
        for (_, sys) in fixtures::all::<f64>() {
            for v in sys.invariant_vertices() {
                assert_eq!(young_check(&sys, &Potential::zeros(sys.len()), &v).unwrap().slack, 0.0);
            }
        }
        assert!(young_check(&c3, &Potential::zeros(3), &ess(&[1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn vp_examples() {
        let two = fixtures::twocyc::<f64>();
        let v = vp_spectral(&two, &pot(&[1.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(v.lambda_value, 1.0);
        assert_eq!(v.maximizer.weights(), &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(v.face.len(), 1);
        assert!(v.gap.abs() < 1e-12);
        let v = vp_spectral(&two, &Potential::constant(4, 1.0)).unwrap();
        assert_eq!(v.face.len(), 2);
        assert_eq!(v.maximizer.weights(), &[0.5, 0.5, 0.0, 0.0]);
        let c3 = fixtures::cycle3::<f64>();
        let phi = pot(&[0.3, -1.0, 2.5]);
        let v = vp_spectral(&c3, &phi).unwrap();
        assert!((v.lambda_value - 0.6).abs() < 1e-12);
        for &w in v.maximizer.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn subgradient_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let two = fixtures::twocyc::<f64>();
        for phi in [pot(&[1.0, 1.0, 0.0, 0.0]), Potential::constant(4, 1.0)] {
            let mu = subgradient(&two, &phi).unwrap();
            assert_eq!(mu.weights(), &[0.5, 0.5, 0.0, 0.0]);
            let c = verify_subgradient(&two, &phi, &mu, &mut rng, 1000, 3.0).unwrap();
            assert!(c.holds, "{c:?}");
        }
        // a non-subgradient fails the inequality somewhere
        let phi = pot(&[1.0, 1.0, 0.0, 0.0]);
        let c = verify_subgradient(&two, &phi, &ess(&[0.0, 0.0, 0.5, 0.5]), &mut rng, 1000, 3.0).unwrap();
        assert!(!c.holds);
    }

    #[test]
    fn witness_examples() {
        let c3 = fixtures::cycle3::<f64>();
        let mu = ess(&[1.0, 0.0, 0.0]);
        let w = divergence_witness(&c3, &mu).unwrap();
        assert_eq!(w.defect, Defect::NonInvariance);
        assert_eq!(w.atom, Some(1));
        assert_eq!(w.direction.values(), &[1.0, -1.0, 0.0]);
        assert_eq!(w.rate, 1.0);
        assert!(w.check_ray(&c3, &mu).holds);
        let mu = ess(&[2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0]);
        let w = divergence_witness(&c3, &mu).unwrap();
        assert_eq!((w.defect, w.atom), (Defect::Negativity, Some(2)));
        assert!(w.check_ray(&c3, &mu).holds);
        let null = fixtures::null::<f64>();
        let mu = Functional::full(vec![0.0, 1.0]).unwrap();
        let w = divergence_witness(&null, &mu).unwrap();
        assert_eq!((w.defect, w.atom, w.rate), (Defect::NullCharge, Some(1), 1.0));
        assert!(w.check_ray(&null, &mu).holds);
        for total in [0.5, 2.0] {
            let mu = ess(&[total / 3.0; 3]);
            let w = divergence_witness(&c3, &mu).unwrap();
            assert_eq!(w.defect, Defect::Normalization);
            assert!((w.rate - (total - 1.0).abs()).abs() < 1e-15);
            assert!(w.check_ray(&c3, &mu).holds);
        }
        assert_eq!(divergence_witness(&c3, &ess(&[1.0 / 3.0; 3])), Err(Error::NotDivergent));
    }

    #[test]
    fn random_witness_rays_decay() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let atoms = rng.random_range(1..=7);
            let sys = random::system::<f64, _>(&mut rng, atoms, 0.3);
            let mode = if rng.random::<bool>() { Mode::Full } else { Mode::Essential };
            let mu = random::functional(&mut rng, &sys, mode);
            if let Ok(w) = divergence_witness(&sys, &mu) {
                assert!(w.check_ray(&sys, &mu).holds, "{w:?}");
            }
        }
    }

    #[test]
    fn lemma11_examples() {
        let null = fixtures::null::<f64>();
        for w in [vec![0.0, 1.0], vec![0.5, 0.5]] {
            let r = lemma11_check(&null, &Functional::full(w).unwrap()).unwrap();
            assert!(r.holds);
            assert_eq!(r.charged, vec![1]);
        }
        let plain = FiniteSystem::from_parts(vec![1.0, 1.0], vec![0, 1]).unwrap();
        assert_eq!(
            lemma11_check(&plain, &Functional::full(vec![0.5, 0.5]).unwrap()),
            Err(Error::NoNullCharge)
        );
    }
}
