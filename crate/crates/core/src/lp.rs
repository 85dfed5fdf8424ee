//! Dense primal simplex for `max cᵀx  s.t.  Ax ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! The origin is feasible, so no phase one is needed. Bland's rule keeps the
//! method finite on degenerate problems; the instances solved here have at most
//! a few dozen rows.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub value: T,
}

pub fn maximize<T: Scalar>(c: &[T], a: &[Vec<T>], b: &[T]) -> Result<LpSolution<T>> {
    let n = c.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::Lp("dimension mismatch"));
    }
    if b.iter().any(|&v| v < T::zero()) {
        return Err(Error::Lp("origin infeasible"));
    }
    let eps = T::epsilon() * T::lit(64.0);
    let width = n + m + 1;
    let mut tab: Vec<Vec<T>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
            r.push(b[i]);
            r
        })
        .collect();
    let mut obj: Vec<T> = c.iter().map(|&v| -v).collect();
    obj.resize(width, T::zero());
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_pivots = 50 * (n + m + 1);
    for _ in 0..max_pivots {
        let Some(enter) = (0..n + m).find(|&j| obj[j] < -eps) else {
            let mut x = vec![T::zero(); n];
            for (i, &var) in basis.iter().enumerate() {
                if var < n {
                    x[var] = tab[i][width - 1];
                }
            }
            let value = c.iter().zip(&x).map(|(&ci, &xi)| ci * xi).sum();
            return Ok(LpSolution { x, value });
        };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            let coef = tab[i][enter];
            if coef > eps {
                let ratio = tab[i][width - 1] / coef;
                let better = match leave {
                    None => true,
                    Some((l, r)) => ratio < r || (ratio == r && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (row, _) = leave.ok_or(Error::Lp("unbounded"))?;
        let piv = tab[row][enter];
        for v in tab[row].iter_mut() {
            *v = *v / piv;
        }
        let pivot_row = tab[row].clone();
        for (i, r) in tab.iter_mut().enumerate() {
            if i != row {
                let f = r[enter];
                if f != T::zero() {
                    for (v, &p) in r.iter_mut().zip(&pivot_row) {
                        *v = *v - f * p;
                    }
                }
            }
        }
        let f = obj[enter];
        for (v, &p) in obj.iter_mut().zip(&pivot_row) {
            *v = *v - f * p;
        }
        basis[row] = enter;
    }
    Err(Error::Lp("pivot limit reached"))
}
