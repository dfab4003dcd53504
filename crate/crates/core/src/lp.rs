//! Exact two-phase simplex method over the rationals.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0`. Pivoting follows Bland's
//! smallest-index rule, so the method terminates and is deterministic.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug)]
pub(crate) struct LinearProgram {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry is minus the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland pivots over columns `< allowed`. Returns false if unbounded.
    fn optimise(&mut self, allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

pub(crate) fn solve(lp: &LinearProgram) -> LpOutcome {
    let m = lp.a.len();
    let n = lp.c.len();
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, b)) in lp.a.iter().zip(&lp.b).enumerate() {
        let flip = b.is_negative();
        let mut r: Vec<Rational> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        r.resize(width, Rational::zero());
        r[n + i] = Rational::from_integer(1.into());
        r.push(if flip { -b } else { b.clone() });
        rows.push(r);
    }
    // Phase one: minimise the sum of artificials.
    let mut obj = vec![Rational::zero(); width + 1];
    for r in &rows {
        for j in 0..n {
            obj[j] -= &r[j];
        }
        obj[width] -= &r[width];
    }
    let mut t = Tableau { rows, obj, basis: (n..n + m).collect(), width };
    t.optimise(n);
    if !t.obj[width].is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    // Phase two.
    let mut obj = vec![Rational::zero(); width + 1];
    obj[..n].clone_from_slice(&lp.c);
    for (r, &bv) in t.rows.iter().zip(&t.basis) {
        let cb = &lp.c[bv];
        if cb.is_zero() {
            continue;
        }
        for j in 0..=width {
            if !r[j].is_zero() {
                obj[j] -= cb * &r[j];
            }
        }
    }
    t.obj = obj;
    if !t.optimise(n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        x[bv] = t.rhs(i).clone();
    }
    let value = -t.obj[width].clone();
    LpOutcome::Optimal { x, value }
}
