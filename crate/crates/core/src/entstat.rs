//! Empirical measures and the entropy statistic estimate
//! `∫_{X_n(O(μ))} |f∘αⁿ| dm ≤ C(ε, μ) e^{n(τ(μ)+ε)} ‖f‖`.
//!
//! The left side is a convex function of `f` bounded by `Σ_y p_y LHS(y, n)` with
//! `p_y = |f(y)| m(y)`, so it suffices to test the normalized indicators `1_y / m(y)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral;
use crate::system::{FiniteSystem, Functional, Potential};
use crate::tentropy;
use crate::varprin::{self, Defect};

/// `δ_{x,n}`: mass `1/n` at each of `x, α(x), …, α^{n−1}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure<T> {
    pub x: usize,
    pub n: usize,
    pub weights: Vec<T>,
}

impl<T: Scalar> EmpiricalMeasure<T> {
    pub fn pair(&self, f: &Potential<T>) -> T {
        self.weights.iter().zip(f.values()).map(|(&w, &v)| w * v).sum()
    }

    /// As a functional on all bounded functions.
    pub fn functional(&self) -> Functional<T> {
        Functional::full(self.weights.clone()).expect("finite weights")
    }

    /// Total-variation distance `½ Σ |δ(a) − ν(a)|`.
    pub fn tv_distance(&self, nu: &Functional<T>) -> T {
        self.weights
            .iter()
            .zip(nu.weights())
            .map(|(&a, &b)| (a - b).abs())
            .sum::<T>()
            / T::lit(2.0)
    }
}

pub fn empirical<T: Scalar>(sys: &FiniteSystem<T>, x: usize, n: usize) -> Result<EmpiricalMeasure<T>> {
    if n == 0 {
        return Err(Error::NonPositiveIterate);
    }
    if x >= sys.len() {
        return Err(Error::MapOutOfRange {
            atom: x,
            target: x,
            len: sys.len(),
        });
    }
    let share = T::one() / T::from_count(n);
    let mut weights = vec![T::zero(); sys.len()];
    let mut a = x;
    for _ in 0..n {
        weights[a] = weights[a] + share;
        a = sys.image(a);
    }
    Ok(EmpiricalMeasure { x, n, weights })
}

/// `O(μ) = {δ : λ(φ) − δ[φ] < threshold}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceNeighborhood<T> {
    pub phi: Potential<T>,
    pub threshold: T,
    /// `λ(φ)`.
    pub lambda: T,
    pub tau: T,
    pub eps: T,
    /// Ray parameter used when `τ(μ) = -inf`.
    pub ray_t: Option<T>,
    pub defect: Option<Defect>,
}

impl<T: Scalar> HalfspaceNeighborhood<T> {
    pub fn contains_pairing(&self, pairing: T) -> bool {
        self.lambda - pairing < self.threshold
    }

    pub fn contains(&self, delta: &Functional<T>) -> bool {
        self.contains_pairing(delta.pair(&self.phi))
    }
}

const RAY_FIRST: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
const RAY_RETRY: [f64; 3] = [1e4, 1e5, 1e6];

/// The half-space around `μ` used for the estimate.
///
/// For `τ(μ) = 0` the potential is `0` with threshold `ε/2`. For `τ(μ) = -inf` it is
/// `t·d` along the dual witness `d`, with the smallest tested `t` for which
/// `λ(t d) − μ[t d] < −1/ε − ε/2`, and that value as threshold.
pub fn build_neighborhood<T: Scalar>(
    sys: &FiniteSystem<T>,
    mu: &Functional<T>,
    eps: T,
) -> Result<HalfspaceNeighborhood<T>> {
    if !(eps > T::zero()) {
        return Err(Error::NonPositiveEpsilon);
    }
    let half = eps / T::lit(2.0);
    let dual = tentropy::tau_dual(sys, mu)?;
    if dual.value > T::neg_infinity() {
        let phi = Potential::zeros(sys.len());
        return Ok(HalfspaceNeighborhood {
            lambda: spectral::spectral_potential(sys, &phi),
            phi,
            threshold: dual.value + half,
            tau: dual.value,
            eps,
            ray_t: None,
            defect: None,
        });
    }
    let direction = dual.dual_witness.expect("a divergent dual result carries a witness");
    let threshold = -T::one() / eps - half;
    for &t in RAY_FIRST.iter().chain(&RAY_RETRY) {
        let t = T::lit(t);
        let phi = direction.scale(t);
        if varprin::dual_objective(sys, mu, &phi) < threshold {
            return Ok(HalfspaceNeighborhood {
                lambda: spectral::spectral_potential(sys, &phi),
                phi,
                threshold,
                tau: dual.value,
                eps,
                ray_t: Some(t),
                defect: dual.defect,
            });
        }
    }
    Err(Error::NeighborhoodUnreachable)
}

/// `X_n(O) = {x : δ_{x,n} ∈ O} = {x : S_nφ(x) > n(λ(φ) − threshold)}`, over all atoms.
pub fn x_n_set<T: Scalar>(sys: &FiniteSystem<T>, nb: &HalfspaceNeighborhood<T>, n: usize) -> Result<Vec<usize>> {
    let s = sys.birkhoff(&nb.phi, n)?;
    let bar = T::from_count(n) * (nb.lambda - nb.threshold);
    Ok((0..sys.len()).filter(|&x| s[x] > bar).collect())
}

/// `C` with `‖A_φⁿ‖ ≤ C e^{n(λ(φ)+ε/2)}` for every `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CConstant<T> {
    pub log_c: T,
    pub c: T,
    /// Where the maximum of `‖A_φⁿ‖ e^{−n(λ+ε/2)}` was attained.
    pub achieved_n: usize,
    /// Number of iterates scanned.
    pub horizon: usize,
    /// lcm of the supported cycle lengths.
    pub period: usize,
}

/// Scans `n ≤ max(n_max, N + 2L)` where `N` is the atom count and `L` the lcm of the
/// supported cycle lengths. For `n ≥ N`, `α^{n+L} = αⁿ` on preimages and the extra
/// Birkhoff terms average at most `λ`, so the ratio falls by `e^{−Lε/2}` every `L`
/// steps; this is verified on `[N, N+L)` before the maximum is trusted.
pub fn c_constant<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>, eps: T, n_max: usize) -> Result<CConstant<T>> {
    if !(eps > T::zero()) {
        return Err(Error::NonPositiveEpsilon);
    }
    sys.check_potential(phi)?;
    let lambda = spectral::spectral_potential(sys, phi);
    let rate = lambda + eps / T::lit(2.0);
    let period = sys.cycles().supported_period();
    let start = sys.len().max(1);
    let mut horizon = n_max.max(start + 2 * period);
    for attempt in 0..2 {
        let seq = spectral::log_norm_sequence(sys, phi, horizon);
        let ratio = |n: usize| seq[n - 1] - T::from_count(n) * rate;
        let tol = T::lit(1e-9) * T::one().max(phi.sup_norm() * T::from_count(horizon));
        let decays = (start..start + period).all(|n| ratio(n + period) <= ratio(n) + tol);
        if decays {
            let (achieved_n, log_c) = (1..=horizon)
                .map(|n| (n, ratio(n)))
                .fold((0, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
            return Ok(CConstant {
                log_c,
                c: log_c.exp(),
                achieved_n,
                horizon,
                period,
            });
        }
        if attempt == 0 {
            horizon *= 2;
        }
    }
    Err(Error::NonDecay(horizon))
}

/// `Σ_{x ∈ set, αⁿx = y} m(x)` for every atom `y`.
fn restricted_preimage_mass<T: Scalar>(sys: &FiniteSystem<T>, set: &[usize], n: usize) -> Vec<T> {
    let pos = sys.power_map(n);
    let mut mass = vec![T::zero(); sys.len()];
    for &x in set {
        mass[pos[x]] = mass[pos[x]] + sys.mass(x);
    }
    mass
}

/// `∫_{set} |f∘αⁿ| dm` for an arbitrary `f`.
pub fn restricted_integral<T: Scalar>(sys: &FiniteSystem<T>, set: &[usize], n: usize, f: &[T]) -> T {
    let pos = sys.power_map(n);
    set.iter().map(|&x| f[pos[x]].abs() * sys.mass(x)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRow<T> {
    pub n: usize,
    pub y: usize,
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
    pub x_n_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport<T> {
    pub neighborhood: HalfspaceNeighborhood<T>,
    pub constant: CConstant<T>,
    /// Exponent of the right side: `τ(μ) + ε`, or `−1/ε` when `τ(μ) = -inf`.
    pub exponent: T,
    pub rows: Vec<EstimateRow<T>>,
    /// Index into `rows` of the largest `lhs / rhs`.
    pub worst: usize,
    pub violations: usize,
    /// Rows whose `X_n ∩ α^{−n}(y)` carries no mass.
    pub empty_rows: usize,
    pub holds: bool,
}

impl<T: Scalar> EstimateReport<T> {
    pub fn worst_row(&self) -> &EstimateRow<T> {
        &self.rows[self.worst]
    }
}

/// Checks the estimate for `n = 1..=n_max` and each supported `y`.
pub fn verify_estimate<T: Scalar>(
    sys: &FiniteSystem<T>,
    mu: &Functional<T>,
    eps: T,
    n_max: usize,
) -> Result<EstimateReport<T>> {
    if n_max == 0 {
        return Err(Error::NonPositiveIterate);
    }
    let neighborhood = build_neighborhood(sys, mu, eps)?;
    let constant = c_constant(sys, &neighborhood.phi, eps, n_max.max(10))?;
    let exponent = if neighborhood.tau == T::neg_infinity() {
        -T::one() / eps
    } else {
        neighborhood.tau + eps
    };
    let slack = T::one() + T::lit(1e-9);
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let set = x_n_set(sys, &neighborhood, n)?;
        let mass = restricted_preimage_mass(sys, &set, n);
        let rhs = (constant.log_c + T::from_count(n) * exponent).exp();
        for y in sys.supported_atoms() {
            let lhs = mass[y] / sys.mass(y);
            rows.push(EstimateRow {
                n,
                y,
                lhs,
                rhs,
                ratio: lhs / rhs,
                x_n_size: set.len(),
            });
        }
    }
    let worst = (0..rows.len())
        .fold(0, |b, i| if rows[i].ratio > rows[b].ratio { i } else { b });
    let violations = rows.iter().filter(|r| r.lhs > r.rhs * slack).count();
    let empty_rows = rows.iter().filter(|r| r.lhs == T::zero()).count();
    Ok(EstimateReport {
        neighborhood,
        constant,
        exponent,
        holds: violations == 0,
        rows,
        worst,
        violations,
        empty_rows,
    })
}
