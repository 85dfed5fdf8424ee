//! The weighted shift `A_φ f = e^φ · (f ∘ α)` on `L¹(X, m)`, its operator norms and
//! the spectral potential `λ(φ) = lim (1/n) ln ‖A_φⁿ‖`.
//!
//! On a finite functional graph `λ(φ)` equals the largest mean of `φ` over a
//! supported cycle. That closed form is the primary route; the normalized log
//! norm sequence is kept alongside it as a check.

use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, Scalar};
use crate::system::{FiniteSystem, Potential};

/// An element of `L¹(X, m)`. Values at null atoms are stored as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Vector<T> {
    values: Vec<T>,
}

impl<T: Scalar> L1Vector<T> {
    pub fn new(sys: &FiniteSystem<T>, mut values: Vec<T>) -> Result<Self> {
        sys.check_potential(&Potential::new(values.clone())?)?;
        for (x, v) in values.iter_mut().enumerate() {
            if !sys.is_supported(x) {
                *v = T::zero();
            }
        }
        Ok(Self { values })
    }

    /// `1_y / m(y)`, an extreme point of the unit ball.
    pub fn normalized_indicator(sys: &FiniteSystem<T>, y: usize) -> Self {
        assert!(sys.is_supported(y));
        let mut values = vec![T::zero(); sys.len()];
        values[y] = T::one() / sys.mass(y);
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `Σ_x |f(x)| m(x)`.
    pub fn norm(&self, sys: &FiniteSystem<T>) -> T {
        self.values
            .iter()
            .zip(sys.measure())
            .map(|(&v, &m)| v.abs() * m)
            .sum()
    }

    /// Largest componentwise difference.
    pub fn max_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}

/// `λ(φ)` with its witness cycle and the log-norm sequence used to check it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult<T> {
    pub lambda: T,
    pub witness_cycle: Vec<usize>,
    /// `(1/n) ln ‖A_φⁿ‖` for `n = 1..=n_max`.
    pub norm_sequence: Vec<T>,
    /// `|norm_sequence[n_max] − λ|`.
    pub convergence_gap: T,
    /// Whether every term of the sequence stays above `λ − 1e-9`.
    pub from_above: bool,
}

/// `[A_φ f](x) = e^{φ(x)} f(α(x))`.
pub fn apply<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>, f: &L1Vector<T>) -> L1Vector<T> {
    let values = (0..sys.len())
        .map(|x| {
            if sys.is_supported(x) {
                phi[x].exp() * f.values[sys.image(x)]
            } else {
                T::zero()
            }
        })
        .collect();
    L1Vector { values }
}

/// `A_φⁿ f` computed by repeated application, with the closed form `e^{S_nφ} · (f ∘ αⁿ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterated<T> {
    pub value: L1Vector<T>,
    pub closed_form: L1Vector<T>,
    /// Largest relative difference between the two.
    pub residual: T,
}

pub fn iterate<T: Scalar>(
    sys: &FiniteSystem<T>,
    phi: &Potential<T>,
    f: &L1Vector<T>,
    n: usize,
) -> Result<Iterated<T>> {
    if n == 0 {
        return Err(Error::NonPositiveIterate);
    }
    let mut value = f.clone();
    for _ in 0..n {
        value = apply(sys, phi, &value);
    }
    let s = sys.birkhoff(phi, n)?;
    let closed_form = L1Vector {
        values: (0..sys.len())
            .map(|x| {
                if sys.is_supported(x) {
                    s[x].exp() * f.values[sys.iterate_atom(x, n)]
                } else {
                    T::zero()
                }
            })
            .collect(),
    };
    let residual = value
        .values
        .iter()
        .zip(&closed_form.values)
        .fold(T::zero(), |acc, (&a, &b)| {
            acc.max((a - b).abs() / T::one().max(a.abs()).max(b.abs()))
        });
    Ok(Iterated {
        value,
        closed_form,
        residual,
    })
}

/// `ln ‖A_φⁿ‖` from per-atom Birkhoff sums `sums[x] = S_nφ(x)` and positions `pos[x] = αⁿ(x)`.
fn log_norm_from<T: Scalar>(sys: &FiniteSystem<T>, sums: &[T], pos: &[usize]) -> T {
    let n = sys.len();
    let mut buckets: Vec<Vec<T>> = vec![Vec::new(); n];
    for x in 0..n {
        if sys.is_supported(x) {
            buckets[pos[x]].push(sums[x] + sys.mass(x).ln());
        }
    }
    (0..n)
        .filter(|&y| sys.is_supported(y))
        .map(|y| log_sum_exp(buckets[y].iter().copied()) - sys.mass(y).ln())
        .fold(T::neg_infinity(), T::max)
}

/// `ln ‖A_φⁿ‖`, computed in log space.
///
/// For `‖f‖ = 1` write `p_y = |f(y)| m(y)`; then
/// `‖A_φⁿ f‖ = Σ_y p_y · w_y / m(y)` with `w_y = Σ_{αⁿx = y} e^{S_nφ(x)} m(x)`,
/// so the norm is `max_y w_y / m(y)` over supported `y`.
pub fn log_op_norm<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::NonPositiveIterate);
    }
    let sums = sys.birkhoff(phi, n)?;
    Ok(log_norm_from(sys, sums.values(), &sys.power_map(n)))
}

/// `‖A_φⁿ‖` on `L¹(X, m)`.
pub fn op_norm<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>, n: usize) -> Result<T> {
    log_op_norm(sys, phi, n).map(T::exp)
}

/// `ln ‖A_φⁿ‖` for `n = 1..=n_max`, in `O(N · n_max)`.
pub fn log_norm_sequence<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>, n_max: usize) -> Vec<T> {
    let mut sums = vec![T::zero(); sys.len()];
    let mut pos: Vec<usize> = (0..sys.len()).collect();
    (1..=n_max)
        .map(|_| {
            for x in 0..sys.len() {
                sums[x] = sums[x] + phi[pos[x]];
                pos[x] = sys.image(pos[x]);
            }
            log_norm_from(sys, &sums, &pos)
        })
        .collect()
}

/// Largest supported cycle mean and the index of the first cycle attaining it.
pub fn spectral_potential_with_witness<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>) -> (T, Vec<usize>) {
    let cycles = sys.cycles();
    let mut best: Option<(T, &Vec<usize>)> = None;
    for c in cycles.supported_cycles() {
        let mean = c.iter().map(|&a| phi[a]).sum::<T>() / T::from_count(c.len());
        if best.is_none_or(|(b, _)| mean > b) {
            best = Some((mean, c));
        }
    }
    let (lambda, cycle) = best.expect("a valid system has a supported cycle");
    (lambda, cycle.clone())
}

/// `λ(φ)` by the cycle-mean formula.
pub fn spectral_potential<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>) -> T {
    spectral_potential_with_witness(sys, phi).0
}

/// `λ(φ)` with witness cycle and log-norm sequence up to `n_max`.
pub fn lambda<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>, n_max: usize) -> SpectralResult<T> {
    let (lambda, witness_cycle) = spectral_potential_with_witness(sys, phi);
    let norm_sequence: Vec<T> = log_norm_sequence(sys, phi, n_max)
        .into_iter()
        .enumerate()
        .map(|(i, l)| l / T::from_count(i + 1))
        .collect();
    let convergence_gap = norm_sequence.last().map_or(T::zero(), |&v| (v - lambda).abs());
    let from_above = norm_sequence.iter().all(|&v| v >= lambda - T::lit(1e-9));
    SpectralResult {
        lambda,
        witness_cycle,
        norm_sequence,
        convergence_gap,
        from_above,
    }
}

/// The system `(X, m, αⁿ)`.
pub fn power_system<T: Scalar>(sys: &FiniteSystem<T>, n: usize) -> Result<FiniteSystem<T>> {
    sys.power(n)
}

/// Both sides of `n λ(φ, A) ≤ λ(nφ, Aⁿ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma4Gap<T> {
    pub scaled: T,
    pub power: T,
    pub gap: T,
    pub holds: bool,
}

pub fn lemma4_gap<T: Scalar>(sys: &FiniteSystem<T>, phi: &Potential<T>, n: usize) -> Result<Lemma4Gap<T>> {
    let powered = power_system(sys, n)?;
    let count = T::from_count(n);
    let scaled = count * spectral_potential(sys, phi);
    let power = spectral_potential(&powered, &phi.scale(count));
    Ok(Lemma4Gap {
        scaled,
        power,
        gap: power - scaled,
        holds: scaled <= power + T::exact_tol(),
    })
}

/// Violation amounts for the five structural properties of `λ`. Each entry is
/// `≤ 0` (or tiny) when the property holds; `None` when its hypothesis fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma6Residuals<T> {
    /// `λ(ψ) − λ(φ)`, checked only when `φ ≥ ψ`.
    pub monotone: Option<T>,
    /// `|λ(φ + t) − λ(φ) − t|`.
    pub shift: T,
    /// `|λ(φ) − λ(ψ)| − sup|φ − ψ|`.
    pub lipschitz: T,
    /// `λ((1−t)φ + tψ) − (1−t)λ(φ) − tλ(ψ)`, checked only for `t ∈ [0, 1]`.
    pub convex: Option<T>,
    /// `|λ(φ + ψ∘α) − λ(φ + ψ)|`.
    pub shift_invariant: T,
}

impl<T: Scalar> Lemma6Residuals<T> {
    pub fn worst(&self) -> T {
        [
            self.monotone.unwrap_or(T::neg_infinity()),
            self.shift,
            self.lipschitz,
            self.convex.unwrap_or(T::neg_infinity()),
            self.shift_invariant,
        ]
        .into_iter()
        .fold(T::neg_infinity(), T::max)
    }

    pub fn holds(&self, tol: T) -> bool {
        self.worst() <= tol
    }
}

pub fn lemma6_check<T: Scalar>(
    sys: &FiniteSystem<T>,
    phi: &Potential<T>,
    psi: &Potential<T>,
    t: T,
) -> Lemma6Residuals<T> {
    let lam = |p: &Potential<T>| spectral_potential(sys, p);
    let (lp, lq) = (lam(phi), lam(psi));
    let monotone = phi.dominates(psi).then(|| lq - lp);
    let shift = (lam(&phi.shift(t)) - lp - t).abs();
    // sup is taken over supported atoms: λ does not see null atoms
    let sup_diff = sys
        .supported_atoms()
        .into_iter()
        .fold(T::zero(), |acc, x| acc.max((phi[x] - psi[x]).abs()));
    let lipschitz = (lp - lq).abs() - sup_diff;
    let convex = (t >= T::zero() && t <= T::one())
        .then(|| lam(&phi.lerp(psi, t)) - ((T::one() - t) * lp + t * lq));
    let shift_invariant = (lam(&(phi + &sys.compose(psi))) - lam(&(phi + psi))).abs();
    Lemma6Residuals {
        monotone,
        shift,
        lipschitz,
        convex,
        shift_invariant,
    }
}
