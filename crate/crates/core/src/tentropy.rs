//! t-entropy from its definition and as the conjugate of the spectral potential.
//!
//! For `‖f‖ = 1` put `p_y = |f(y)| m(y)`. Then
//! `∫ g |f∘αⁿ| dm = Σ_y p_y c[g,y]` with `c[g,y] = Σ_{αⁿx=y} g(x) m(x) / m(y)`,
//! and `f ↦ p` maps the unit sphere onto the simplex over supported atoms. The
//! inner supremum defining `τ_n(μ, D)` is therefore a concave program on the
//! simplex, solved by [`crate::solver`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp;
use crate::random;
use crate::scalar::Scalar;
use crate::solver::{self, SolverOptions};
use crate::spectral;
use crate::system::{FiniteSystem, Functional, PartitionOfUnity, Potential};
use crate::varprin::{self, Defect};

/// The reduced form of the inner supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProblem<T> {
    /// `c[g][j]` for member `g` and the `j`-th supported atom.
    pub c: Vec<Vec<T>>,
    /// Supported atoms, in column order.
    pub columns: Vec<usize>,
    /// `μ[g]` per member.
    pub mu_weights: Vec<T>,
    pub n: usize,
}

impl<T: Scalar> InnerProblem<T> {
    /// `Σ_y p_y c[g,y]` for every member.
    pub fn integrals(&self, p: &[T]) -> Vec<T> {
        self.c
            .iter()
            .map(|row| row.iter().zip(p).map(|(&c, &q)| c * q).sum())
            .collect()
    }

    /// Members entering the objective (`μ[g] > 0`).
    pub fn charged(&self) -> Vec<usize> {
        (0..self.mu_weights.len()).filter(|&g| self.mu_weights[g] > T::zero()).collect()
    }

    /// The objective `Σ_{μ[g]>0} μ[g] ln(Σ_y p_y c[g,y] / μ[g])`.
    pub fn objective(&self, p: &[T]) -> T {
        let charged = self.charged();
        let rows: Vec<Vec<T>> = charged.iter().map(|&g| self.c[g].clone()).collect();
        let w: Vec<T> = charged.iter().map(|&g| self.mu_weights[g]).collect();
        solver::objective(&rows, &w, p)
    }
}

/// Optimal point of the inner problem and the limits `C_n(μ, g, D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution<T> {
    /// `τ_n(μ, D)`, possibly `-inf`.
    pub value: T,
    /// Optimal `p` over the supported atoms (same order as `InnerProblem::columns`).
    pub p_star: Vec<T>,
    pub columns: Vec<usize>,
    /// `C_n[g] = Σ_y p*_y c[g,y]` for every member.
    pub c_n: Vec<T>,
    /// Duality-gap certificate of the solver.
    pub gap: T,
}

impl<T: Scalar> InnerSolution<T> {
    /// Certified upper bound on `τ_n(μ, D)`.
    pub fn upper_bound(&self) -> T {
        if self.value == T::neg_infinity() {
            self.value
        } else {
            self.value + self.gap.max(T::zero())
        }
    }
}

pub fn inner_problem<T: Scalar>(
    sys: &FiniteSystem<T>,
    d: &PartitionOfUnity<T>,
    mu: &Functional<T>,
    n: usize,
) -> Result<InnerProblem<T>> {
    if n == 0 {
        return Err(Error::NonPositiveIterate);
    }
    sys.ensure_valid()?;
    if d.atoms() != sys.len() {
        return Err(Error::InvalidPartition(format!(
            "partition has {} atoms, system has {}",
            d.atoms(),
            sys.len()
        )));
    }
    sys.check_functional(mu)?;
    let columns = sys.supported_atoms();
    let mut col_of = vec![usize::MAX; sys.len()];
    for (j, &y) in columns.iter().enumerate() {
        col_of[y] = j;
    }
    let pos = sys.power_map(n);
    let c = d
        .members()
        .iter()
        .map(|g| {
            let mut row = vec![T::zero(); columns.len()];
            for x in 0..sys.len() {
                if sys.is_supported(x) {
                    let j = col_of[pos[x]];
                    row[j] = row[j] + g[x] * sys.mass(x);
                }
            }
            for (j, &y) in columns.iter().enumerate() {
                row[j] = row[j] / sys.mass(y);
            }
            row
        })
        .collect();
    let mu_weights = d.members().iter().map(|g| mu.pair_slice(g)).collect();
    Ok(InnerProblem { c, columns, mu_weights, n })
}

/// Solves an already reduced inner problem.
pub fn solve_inner<T: Scalar>(problem: &InnerProblem<T>) -> InnerSolution<T> {
    let charged = problem.charged();
    let rows: Vec<Vec<T>> = charged.iter().map(|&g| problem.c[g].clone()).collect();
    let w: Vec<T> = charged.iter().map(|&g| problem.mu_weights[g]).collect();
    let cols = problem.columns.len();
    match solver::maximize(&rows, &w, SolverOptions::default()) {
        Some(sol) => InnerSolution {
            value: sol.value,
            c_n: problem.integrals(&sol.p),
            p_star: sol.p,
            columns: problem.columns.clone(),
            gap: sol.gap,
        },
        None => {
            let p = vec![T::one() / T::from_count(cols); cols];
            InnerSolution {
                value: T::neg_infinity(),
                c_n: problem.integrals(&p),
                p_star: p,
                columns: problem.columns.clone(),
                gap: T::zero(),
            }
        }
    }
}

/// `τ_n(μ, D)` with an optimal point. `μ` must be positive and normalized.
pub fn tau_n<T: Scalar>(
    sys: &FiniteSystem<T>,
    mu: &Functional<T>,
    d: &PartitionOfUnity<T>,
    n: usize,
) -> Result<InnerSolution<T>> {
    ensure_probability(mu)?;
    Ok(solve_inner(&inner_problem(sys, d, mu, n)?))
}

fn ensure_probability<T: Scalar>(mu: &Functional<T>) -> Result<()> {
    let tol = T::exact_tol();
    if mu.is_positive(tol) && mu.is_normalized(tol) {
        Ok(())
    } else {
        Err(Error::NotProbability)
    }
}

/// `sup_{‖f‖=1} Σ_{μ[g]>0} μ[g] ∫g|f∘αⁿ|dm / C_n[g]`, which is linear in `p` and so
/// equals the largest column value. Errors if it exceeds `1 + 1e-6`.
pub fn lemma5_check<T: Scalar>(
    sys: &FiniteSystem<T>,
    mu: &Functional<T>,
    d: &PartitionOfUnity<T>,
    n: usize,
    solution: &InnerSolution<T>,
) -> Result<T> {
    if solution.value == T::neg_infinity() {
        return Err(Error::InfiniteInnerValue);
    }
    let problem = inner_problem(sys, d, mu, n)?;
    let charged = problem.charged();
    let sup = (0..problem.columns.len())
        .map(|j| {
            charged
                .iter()
                .map(|&g| problem.mu_weights[g] * problem.c[g][j] / solution.c_n[g])
                .sum::<T>()
        })
        .fold(T::neg_infinity(), T::max);
    if sup > T::one() + T::opt_tol() {
        return Err(Error::NotOptimal(sup.to_f64_lossy()));
    }
    Ok(sup)
}

/// Level sets of `S_nφ` of width `eps` over the supported atoms, plus the null atoms
/// as one extra member.
pub fn oscillation_partition<T: Scalar>(
    sys: &FiniteSystem<T>,
    phi: &Potential<T>,
    n: usize,
    eps: T,
) -> Result<PartitionOfUnity<T>> {
    if !(eps > T::zero()) {
        return Err(Error::NonPositiveEpsilon);
    }
    let s = sys.birkhoff(phi, n)?;
    let supported = sys.supported_atoms();
    let lo = supported.iter().map(|&x| s[x]).fold(T::infinity(), T::min);
    let hi = supported.iter().map(|&x| s[x]).fold(T::neg_infinity(), T::max);
    let mut blocks: Vec<(usize, Vec<usize>)> = Vec::new();
    for &x in &supported {
        let k = if hi - lo <= eps {
            0
        } else {
            ((s[x] - lo) / eps).floor().to_usize().unwrap_or(0)
        };
        match blocks.iter_mut().find(|(b, _)| *b == k) {
            Some((_, atoms)) => atoms.push(x),
            None => blocks.push((k, vec![x])),
        }
    }
    blocks.sort_by_key(|(k, _)| *k);
    let mut sets: Vec<Vec<usize>> = blocks.into_iter().map(|(_, a)| a).collect();
    let nulls = sys.null_atoms();
    if !nulls.is_empty() {
        sets.push(nulls);
    }
    PartitionOfUnity::from_blocks(sys.len(), &sets)
}

/// Both sides of `ε + ln‖A_φⁿ‖/n ≥ μ[φ] + τ_n(μ, D)/n` for the oscillation partition.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungLocal<T> {
    pub lhs: T,
    pub rhs: T,
    pub slack: T,
    pub holds: bool,
    pub partition: PartitionOfUnity<T>,
}

pub fn young_local_check<T: Scalar>(
    sys: &FiniteSystem<T>,
    phi: &Potential<T>,
    mu: &Functional<T>,
    n: usize,
    eps: T,
) -> Result<YoungLocal<T>> {
    let inv = sys.is_invariant(mu);
    if !inv.invariant {
        return Err(Error::NotInvariant(inv.worst_violation.to_f64_lossy()));
    }
    let count = T::from_count(n);
    let partition = oscillation_partition(sys, phi, n, eps * count)?;
    let sol = tau_n(sys, mu, &partition, n)?;
    let lhs = eps + spectral::log_op_norm(sys, phi, n)? / count;
    let rhs = mu.pair(phi) + sol.upper_bound() / count;
    let slack = lhs - rhs;
    Ok(YoungLocal {
        lhs,
        rhs,
        slack,
        holds: slack >= -T::lit(1e-8),
        partition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Direct,
    Dual,
}

/// A value of `τ(μ)` together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct TauResult<T> {
    pub value: T,
    pub route: Route,
    pub achieving_n: Option<usize>,
    pub achieving_partition: Option<PartitionOfUnity<T>>,
    /// Dual route: the potential attaining (value 0) or driving (value `-inf`) the infimum.
    pub dual_witness: Option<Potential<T>>,
    /// Dual route, `-inf` case: the defect found, if the functional is not a measure.
    pub defect: Option<Defect>,
    /// Decay rate of `λ − μ` along the witness ray.
    pub rate: Option<T>,
    /// Dual route: best value of `λ(φ) − μ[φ]` reached by subgradient descent.
    pub descent_value: Option<T>,
    /// Direct route: number of `(n, D)` pairs evaluated.
    pub evaluated: usize,
}

/// Partition family searched by [`tau_direct`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionSearch {
    /// Oscillation partitions of random potentials, per `n`.
    pub oscillation: usize,
    /// Random soft partitions, per `n`.
    pub soft: usize,
    pub seed: u64,
}

impl Default for PartitionSearch {
    fn default() -> Self {
        Self {
            oscillation: 3,
            soft: 8,
            seed: 0,
        }
    }
}

/// `min_{n ≤ n_max, D ∈ family} τ_n(μ, D)/n`, an upper bound on `τ(μ)`.
pub fn tau_direct<T: Scalar>(
    sys: &FiniteSystem<T>,
    mu: &Functional<T>,
    n_max: usize,
    search: PartitionSearch,
) -> Result<TauResult<T>> {
    if n_max == 0 {
        return Err(Error::NonPositiveIterate);
    }
    ensure_probability(mu)?;
    sys.ensure_valid()?;
    sys.check_functional(mu)?;
    let atoms = sys.len();
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut best: Option<(T, usize, PartitionOfUnity<T>)> = None;
    let mut evaluated = 0;
    for n in 1..=n_max {
        let mut family = vec![PartitionOfUnity::atomic(atoms), PartitionOfUnity::trivial(atoms)];
        if sys.has_null_atoms() {
            let nulls = sys.null_atoms();
            family.push(PartitionOfUnity::from_blocks(atoms, &[nulls.clone(), sys.supported_atoms()])?);
        }
        for _ in 0..search.oscillation {
            let phi = random::potential::<T, _>(&mut rng, atoms, 2.0);
            let width = T::lit(rng.random_range(0.1..1.0)) * T::from_count(n);
            family.push(oscillation_partition(sys, &phi, n, width)?);
        }
        for _ in 0..search.soft {
            let k = rng.random_range(2..=atoms + 1);
            family.push(PartitionOfUnity::random_soft(&mut rng, atoms, k));
        }
        for d in family {
            let sol = solve_inner(&inner_problem(sys, &d, mu, n)?);
            evaluated += 1;
            let v = sol.upper_bound() / T::from_count(n);
            if v == T::neg_infinity() {
                return Ok(TauResult {
                    value: v,
                    route: Route::Direct,
                    achieving_n: Some(n),
                    achieving_partition: Some(d),
                    dual_witness: None,
                    defect: None,
                    rate: None,
                    descent_value: None,
                    evaluated,
                });
            }
            if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                best = Some((v, n, d));
            }
        }
    }
    let (value, n, d) = best.expect("family is nonempty");
    Ok(TauResult {
        value,
        route: Route::Direct,
        achieving_n: Some(n),
        achieving_partition: Some(d),
        dual_witness: None,
        defect: None,
        rate: None,
        descent_value: None,
        evaluated,
    })
}

/// `max μ[φ] − max_c u_c[φ]` over `|φ| ≤ 1`, where `u_c` are the invariant vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Separation<T> {
    /// Zero (up to rounding) exactly when `μ` lies in the invariant polytope.
    pub value: T,
    pub potential: Potential<T>,
}

/// Separation between `μ` and the invariant polytope, via a small LP.
///
/// With `ψ = φ + 1 ∈ [0, 2]` and `s = s⁺ − s⁻` the LP reads
/// `max μ[ψ] − s⁺ + s⁻  s.t.  u_c[ψ] − s⁺ + s⁻ ≤ 1,  ψ ≤ 2`, whose optimum exceeds the
/// separation by `μ[1]`.
pub fn polytope_separation<T: Scalar>(sys: &FiniteSystem<T>, mu: &Functional<T>) -> Result<Separation<T>> {
    let n = sys.len();
    let vertices = sys.invariant_vertices();
    let mut c: Vec<T> = mu.weights().to_vec();
    c.push(-T::one());
    c.push(T::one());
    let mut a = Vec::new();
    let mut b = Vec::new();
    for u in &vertices {
        let mut row = u.weights().to_vec();
        row.push(-T::one());
        row.push(T::one());
        a.push(row);
        b.push(T::one());
    }
    for i in 0..n {
        let mut row = vec![T::zero(); n + 2];
        row[i] = T::one();
        a.push(row);
        b.push(T::lit(2.0));
    }
    let sol = lp::maximize(&c, &a, &b)?;
    let potential = Potential::new(sol.x[..n].iter().map(|&v| v - T::one()).collect())?;
    let lam = spectral::spectral_potential(sys, &potential);
    Ok(Separation {
        value: mu.pair(&potential) - lam,
        potential,
    })
}

/// Membership threshold for [`polytope_separation`].
pub fn membership_tol<T: Scalar>() -> T {
    T::lit(1e-9).max(T::exact_tol())
}

/// Subgradient descent on `φ ↦ λ(φ) − μ[φ]` from `φ = 0` with steps `h_k = k³`.
///
/// The iterate is `−Σ h_k (u_k − μ)`, so the chosen vertices `u_k` run a Frank–Wolfe
/// projection of `μ` onto the invariant polytope while the scale grows like `k⁴`.
/// Returns the smallest value seen; stops early once it drops below `-1e3`.
pub fn dual_descent<T: Scalar>(sys: &FiniteSystem<T>, mu: &Functional<T>, iterations: usize) -> T {
    let vertices_of = |phi: &Potential<T>| spectral::spectral_potential_with_witness(sys, phi);
    let objective = |phi: &Potential<T>| spectral::spectral_potential(sys, phi) - mu.pair(phi);
    let mut phi = Potential::zeros(sys.len());
    let mut best = objective(&phi);
    for k in 1..=iterations {
        let step = T::from_count(k).powi(3);
        let (_, cycle) = vertices_of(&phi);
        let share = T::one() / T::from_count(cycle.len());
        let mut g: Vec<T> = mu.weights().iter().map(|&w| -w).collect();
        for &a in &cycle {
            g[a] = g[a] + share;
        }
        if g.iter().all(|v| v.abs() <= T::epsilon()) {
            break;
        }
        phi = Potential::new(phi.values().iter().zip(&g).map(|(&p, &gi)| p - step * gi).collect())
            .expect("finite");
        best = best.min(objective(&phi));
        if best < T::lit(-1e3) {
            break;
        }
    }
    best
}

/// `inf_φ (λ(φ) − μ[φ])`: `0` on the invariant polytope, `-inf` elsewhere.
pub fn tau_dual<T: Scalar>(sys: &FiniteSystem<T>, mu: &Functional<T>) -> Result<TauResult<T>> {
    sys.ensure_valid()?;
    sys.check_functional(mu)?;
    let descent_value = Some(dual_descent(sys, mu, 500));
    let base = TauResult {
        value: T::zero(),
        route: Route::Dual,
        achieving_n: None,
        achieving_partition: None,
        dual_witness: None,
        defect: None,
        rate: None,
        descent_value,
        evaluated: 0,
    };
    match varprin::divergence_witness(sys, mu) {
        Ok(w) => {
            return Ok(TauResult {
                value: T::neg_infinity(),
                dual_witness: Some(w.direction),
                defect: Some(w.defect),
                rate: Some(w.rate),
                ..base
            })
        }
        Err(Error::NotDivergent) => {}
        Err(e) => return Err(e),
    }
    let sep = polytope_separation(sys, mu)?;
    if sep.value <= membership_tol() {
        Ok(TauResult {
            dual_witness: Some(Potential::zeros(sys.len())),
            ..base
        })
    } else {
        Ok(TauResult {
            value: T::neg_infinity(),
            rate: Some(sep.value),
            dual_witness: Some(sep.potential),
            ..base
        })
    }
}

/// `φ_ε = (1/n) ln(Σ_{μ[g]>0} (μ[g]/C_n[g]) g + Σ_{μ[g]=0} ε g)`; null atoms get `ln(ε)/n`.
pub fn phi_eps<T: Scalar>(
    sys: &FiniteSystem<T>,
    mu: &Functional<T>,
    d: &PartitionOfUnity<T>,
    n: usize,
    eps: T,
    solution: &InnerSolution<T>,
) -> Result<Potential<T>> {
    if solution.value == T::neg_infinity() {
        return Err(Error::InfiniteInnerValue);
    }
    if !(eps > T::zero()) {
        return Err(Error::NonPositiveEpsilon);
    }
    if n == 0 {
        return Err(Error::NonPositiveIterate);
    }
    let count = T::from_count(n);
    let coef: Vec<T> = d
        .members()
        .iter()
        .zip(&solution.c_n)
        .map(|(g, &cn)| {
            let w = mu.pair_slice(g);
            if w > T::zero() {
                w / cn
            } else {
                eps
            }
        })
        .collect();
    let values = (0..sys.len())
        .map(|x| {
            if !sys.is_supported(x) {
                return Ok(eps.ln() / count);
            }
            let bracket: T = d.members().iter().zip(&coef).map(|(g, &k)| k * g[x]).sum();
            if bracket > T::zero() {
                Ok(bracket.ln() / count)
            } else {
                Err(Error::VanishingBracket(x))
            }
        })
        .collect::<Result<Vec<T>>>()?;
    Potential::new(values)
}

/// The two estimates satisfied by `φ_ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEpsBounds<T> {
    /// `n λ(φ_ε)`.
    pub scaled_lambda: T,
    /// `ln ‖e^{nφ_ε} Aⁿ‖`, the middle term of the chain.
    pub weighted_log_norm: T,
    /// `ε ‖Aⁿ‖`.
    pub norm_bound: T,
    /// `ε‖Aⁿ‖ − nλ(φ_ε)`.
    pub slack_lambda: T,
    /// `μ[nφ_ε]`.
    pub pairing: T,
    /// `μ[nφ_ε] + τ_n(μ, D)`.
    pub slack_pairing: T,
    pub holds: bool,
}

pub fn phi_eps_bounds<T: Scalar>(
    sys: &FiniteSystem<T>,
    mu: &Functional<T>,
    n: usize,
    eps: T,
    phi: &Potential<T>,
    solution: &InnerSolution<T>,
) -> Result<PhiEpsBounds<T>> {
    let count = T::from_count(n);
    let scaled = phi.scale(count);
    let scaled_lambda = count * spectral::spectral_potential(sys, phi);
    let weighted_log_norm = spectral::log_op_norm(&sys.power(n)?, &scaled, 1)?;
    let norm_bound = eps * spectral::op_norm(sys, &Potential::zeros(sys.len()), n)?;
    let pairing = mu.pair(&scaled);
    let slack_lambda = norm_bound - scaled_lambda;
    let slack_pairing = pairing + solution.value;
    let tol = T::lit(1e-8);
    Ok(PhiEpsBounds {
        scaled_lambda,
        weighted_log_norm,
        norm_bound,
        slack_lambda,
        pairing,
        slack_pairing,
        holds: slack_lambda >= -tol && slack_pairing >= -tol,
    })
}
