//! Maximization of `Σ_g w_g ln((Cp)_g / w_g)` over the probability simplex.
//!
//! The gradient component `r_y = Σ_g w_g C[g,y] / (Cp)_g` satisfies
//! `Σ_y p_y r_y = Σ_g w_g`, so `max_y r_y − Σ_g w_g` is the Frank–Wolfe duality
//! gap: the value at `p` is within that gap of the optimum. The solver runs
//! multiplicative updates `p_y ← p_y r_y / Σ w`, which keep `p` on the simplex,
//! and polishes with Newton steps on the active face until the gap falls below
//! tolerance.

use crate::linalg;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    pub tolerance: T,
    pub max_iterations: usize,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::solver_tol(),
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSolution<T> {
    pub value: T,
    pub p: Vec<T>,
    /// `Cp`, one entry per row.
    pub z: Vec<T>,
    /// Frank–Wolfe gap at `p`; `value + max(gap, 0)` bounds the optimum.
    pub gap: T,
    pub iterations: usize,
}

impl<T: Scalar> SimplexSolution<T> {
    pub fn upper_bound(&self) -> T {
        self.value + self.gap.max(T::zero())
    }
}

/// Objective at `p`; `-inf` if some weighted row has `(Cp)_g = 0`.
pub fn objective<T: Scalar>(rows: &[Vec<T>], weights: &[T], p: &[T]) -> T {
    rows.iter()
        .zip(weights)
        .map(|(row, &w)| {
            let z: T = row.iter().zip(p).map(|(&c, &q)| c * q).sum();
            if z > T::zero() {
                w * (z / w).ln()
            } else {
                T::neg_infinity()
            }
        })
        .sum()
}

struct State<T> {
    z: Vec<T>,
    r: Vec<T>,
}

fn evaluate<T: Scalar>(rows: &[Vec<T>], weights: &[T], p: &[T]) -> State<T> {
    let z: Vec<T> = rows
        .iter()
        .map(|row| row.iter().zip(p).map(|(&c, &q)| c * q).sum())
        .collect();
    let cols = p.len();
    let mut r = vec![T::zero(); cols];
    for ((row, &w), &zg) in rows.iter().zip(weights).zip(&z) {
        let f = w / zg;
        for (ry, &c) in r.iter_mut().zip(row) {
            *ry = *ry + f * c;
        }
    }
    State { z, r }
}

fn gap_of<T: Scalar>(r: &[T], total: T) -> T {
    r.iter().copied().fold(T::neg_infinity(), T::max) - total
}

fn renormalize<T: Scalar>(p: &mut [T]) {
    let s: T = p.iter().copied().sum();
    for v in p.iter_mut() {
        *v = *v / s;
    }
}

/// Newton ascent restricted to the face `{y : p_y > 0}`. Returns the number of steps taken.
fn newton_polish<T: Scalar>(rows: &[Vec<T>], weights: &[T], p: &mut [T], max_steps: usize) -> usize {
    let mut steps = 0;
    for _ in 0..max_steps {
        let active: Vec<usize> = (0..p.len()).filter(|&y| p[y] > T::zero()).collect();
        let k = active.len();
        if k <= 1 {
            break;
        }
        let st = evaluate(rows, weights, p);
        let mut h = vec![vec![T::zero(); k + 1]; k + 1];
        for ((row, &w), &zg) in rows.iter().zip(weights).zip(&st.z) {
            let f = w / (zg * zg);
            for (i, &yi) in active.iter().enumerate() {
                let ci = row[yi];
                if ci == T::zero() {
                    continue;
                }
                for (j, &yj) in active.iter().enumerate() {
                    h[i][j] = h[i][j] - f * ci * row[yj];
                }
            }
        }
        let diag = (0..k).fold(T::zero(), |acc, i| acc.max(h[i][i].abs()));
        let reg = T::lit(1e-10) * (T::one() + diag);
        for i in 0..k {
            h[i][i] = h[i][i] - reg;
            h[i][k] = -T::one();
            h[k][i] = T::one();
        }
        let mut rhs: Vec<T> = active.iter().map(|&y| -st.r[y]).collect();
        rhs.push(T::zero());
        let Some(sol) = linalg::solve(h, rhs) else { break };
        let d = &sol[..k];
        let ascent: T = d.iter().zip(&active).map(|(&di, &y)| di * st.r[y]).sum();
        if !(ascent > T::epsilon() * T::epsilon()) {
            break;
        }
        let mut t = T::one();
        for (&di, &y) in d.iter().zip(&active) {
            if di < T::zero() {
                t = t.min(-p[y] / di);
            }
        }
        let f0 = objective(rows, weights, p);
        let mut candidate = p.to_vec();
        let mut accepted = false;
        for _ in 0..40 {
            for (&di, &y) in d.iter().zip(&active) {
                candidate[y] = (p[y] + t * di).max(T::zero());
            }
            // entries driven to (numerical) zero leave the face
            for (&di, &y) in d.iter().zip(&active) {
                if di < T::zero() && candidate[y] <= p[y] * T::epsilon() {
                    candidate[y] = T::zero();
                }
            }
            if objective(rows, weights, &candidate) >= f0 {
                accepted = true;
                break;
            }
            t = t * T::lit(0.5);
        }
        if !accepted {
            break;
        }
        renormalize(&mut candidate);
        p.copy_from_slice(&candidate);
        steps += 1;
    }
    steps
}

/// Maximizes the objective over the simplex on `rows[0].len()` columns.
///
/// Rows with zero weight must be dropped by the caller. Returns `None` when
/// some row is identically zero (the objective is `-inf` everywhere).
pub fn maximize<T: Scalar>(rows: &[Vec<T>], weights: &[T], opts: SolverOptions<T>) -> Option<SimplexSolution<T>> {
    assert_eq!(rows.len(), weights.len());
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.iter().all(|&c| c == T::zero())) {
        return None;
    }
    let total: T = weights.iter().copied().sum();
    if rows.is_empty() {
        let p = vec![T::one() / T::from_count(cols.max(1)); cols];
        return Some(SimplexSolution {
            value: T::zero(),
            p,
            z: Vec::new(),
            gap: T::zero(),
            iterations: 0,
        });
    }
    let useful: Vec<bool> = (0..cols)
        .map(|y| rows.iter().any(|row| row[y] > T::zero()))
        .collect();
    let count = useful.iter().filter(|&&u| u).count();
    let mut p: Vec<T> = useful
        .iter()
        .map(|&u| if u { T::one() / T::from_count(count) } else { T::zero() })
        .collect();

    let mut iterations = 0;
    let mut st = evaluate(rows, weights, &p);
    let mut gap = gap_of(&st.r, total);
    const EM_BLOCK: usize = 50;
    while gap > opts.tolerance && iterations < opts.max_iterations {
        for _ in 0..EM_BLOCK {
            for (py, &ry) in p.iter_mut().zip(&st.r) {
                *py = *py * ry / total;
            }
            renormalize(&mut p);
            st = evaluate(rows, weights, &p);
            iterations += 1;
            gap = gap_of(&st.r, total);
            if gap <= opts.tolerance {
                break;
            }
        }
        if gap <= opts.tolerance {
            break;
        }
        // drop coordinates EM is shrinking toward zero, polish, then re-admit any
        // column whose gradient still beats the face
        let top = p.iter().copied().fold(T::zero(), T::max);
        let mut trial: Vec<T> = p
            .iter()
            .zip(&st.r)
            .map(|(&v, &ry)| if v < T::lit(1e-9) * top && ry < total { T::zero() } else { v })
            .collect();
        renormalize(&mut trial);
        iterations += newton_polish(rows, weights, &mut trial, 50);
        let trial_state = evaluate(rows, weights, &trial);
        let trial_gap = gap_of(&trial_state.r, total);
        if objective(rows, weights, &trial) >= objective(rows, weights, &p) || trial_gap < gap {
            p = trial;
            st = trial_state;
            gap = trial_gap;
        }
        if gap > opts.tolerance {
            let mut revived = false;
            for y in 0..cols {
                if useful[y] && p[y] == T::zero() && st.r[y] > total + opts.tolerance {
                    p[y] = T::lit(1e-6);
                    revived = true;
                }
            }
            if revived {
                renormalize(&mut p);
                st = evaluate(rows, weights, &p);
                gap = gap_of(&st.r, total);
            }
        }
    }
    let value = objective(rows, weights, &p);
    Some(SimplexSolution {
        value,
        p,
        z: st.z,
        gap,
        iterations,
    })
}
