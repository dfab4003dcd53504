//! Dense integer matrices and exact solving of `M x = b` over the integers.
//!
//! Solvability is decided by reducing `M` to column-style Hermite normal form
//! `H = M U` with `U` unimodular, then solving the triangular system `H y = b`
//! with divisibility checks and mapping back through `x = U y`. Large sparse
//! systems first lose their unit pivots in [`sparse_solve`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(*v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.cols, "shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| Rational::from_integer(v.clone())).collect())
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for i in rank + 1..self.rows {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = &a[i][c] / &a[rank][c];
                for k in c..self.cols {
                    let d = &f * &a[rank][k];
                    a[i][k] -= d;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Stacks `self` over `other`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "shape mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Places `self` left of `other`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| -v).collect() }
    }

    fn col_axpy(&mut self, dst: usize, a: &BigInt, src: usize) {
        // dst += a * src
        for i in 0..self.rows {
            let v = self.get(i, src);
            if !v.is_zero() {
                let d = a * v;
                self.data[i * self.cols + dst] += d;
            }
        }
    }

    /// Replaces columns `(p, q)` by `(s p + t q, u p + v q)`.
    fn col_mix(&mut self, p: usize, q: usize, [s, t, u, v]: [&BigInt; 4]) {
        for i in 0..self.rows {
            let a = self.get(i, p).clone();
            let b = self.get(i, q).clone();
            if a.is_zero() && b.is_zero() {
                continue;
            }
            self.data[i * self.cols + p] = s * &a + t * &b;
            self.data[i * self.cols + q] = u * &a + v * &b;
        }
    }

    fn col_negate(&mut self, c: usize) {
        for i in 0..self.rows {
            let idx = i * self.cols + c;
            if !self.data[idx].is_zero() {
                self.data[idx] = -&self.data[idx];
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Column-style Hermite normal form `H = M U`.
#[derive(Clone, Debug)]
pub struct ColumnHermite {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// `(row, column)` of each pivot; pivot entries are positive, columns
    /// right of the last pivot are zero.
    pub pivots: Vec<(usize, usize)>,
}

pub fn column_hermite(m: &IntMatrix) -> ColumnHermite {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.cols);
    let mut pivots = Vec::new();
    let mut p = 0;
    for r in 0..h.rows {
        if p == h.cols {
            break;
        }
        // Euclid across columns p.. until only column p is nonzero in row r.
        loop {
            let nonzero: Vec<usize> = (p..h.cols).filter(|&c| !h.get(r, c).is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let best = *nonzero.iter().min_by_key(|&&c| h.get(r, c).abs()).unwrap();
            h.swap_cols(p, best);
            u.swap_cols(p, best);
            if nonzero.len() == 1 {
                break;
            }
            for c in p + 1..h.cols {
                if h.get(r, c).is_zero() {
                    continue;
                }
                let (a, b) = (h.get(r, p).clone(), h.get(r, c).clone());
                let eg = a.extended_gcd(&b);
                let (g, s, t) = (eg.gcd, eg.x, eg.y);
                let (ap, bp) = (&a / &g, &b / &g);
                let neg_bp = -&bp;
                // det [[s, -b'], [t, a']] = s a' + t b' = 1
                h.col_mix(p, c, [&s, &t, &neg_bp, &ap]);
                u.col_mix(p, c, [&s, &t, &neg_bp, &ap]);
            }
        }
        if h.get(r, p).is_zero() {
            continue;
        }
        if h.get(r, p).is_negative() {
            h.col_negate(p);
            u.col_negate(p);
        }
        // Reduce entries left of the pivot into [0, pivot).
        let piv = h.get(r, p).clone();
        for c in 0..p {
            let q = h.get(r, c).div_floor(&piv);
            if !q.is_zero() {
                let nq = -q;
                h.col_axpy(c, &nq, p);
                u.col_axpy(c, &nq, p);
            }
        }
        pivots.push((r, p));
        p += 1;
    }
    ColumnHermite { h, u, pivots }
}

/// A linear Diophantine system `M x = b`.
#[derive(Clone, Debug)]
pub struct DiophantineSystem {
    pub matrix: IntMatrix,
    pub rhs: Vec<BigInt>,
    pub labels: Vec<String>,
}

impl DiophantineSystem {
    pub fn new(matrix: IntMatrix, rhs: Vec<BigInt>) -> Self {
        let labels = (0..matrix.cols()).map(|i| format!("x{i}")).collect();
        DiophantineSystem { matrix, rhs, labels }
    }

    pub fn is_solution(&self, x: &[BigInt]) -> bool {
        x.len() == self.matrix.cols() && self.matrix.apply(x) == self.rhs
    }

    pub fn solve(&self) -> Option<Vec<BigInt>> {
        smith_solve(&self.matrix, &self.rhs)
    }
}

/// An integer solution of `m x = b`, or `None` when none exists.
pub fn smith_solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(m.rows(), b.len(), "rhs length mismatch");
    if m.cols() == 0 {
        return b.iter().all(Zero::is_zero).then(Vec::new);
    }
    let hnf = column_hermite(m);
    let mut y = vec![BigInt::zero(); m.cols()];
    let mut next = 0;
    for r in 0..m.rows() {
        let known = next;
        let mut residual = b[r].clone();
        for (c, yc) in y.iter().enumerate().take(known) {
            let a = hnf.h.get(r, c);
            if !a.is_zero() {
                residual -= a * yc;
            }
        }
        if next < hnf.pivots.len() && hnf.pivots[next].0 == r {
            let c = hnf.pivots[next].1;
            let piv = hnf.h.get(r, c);
            let (q, rem) = residual.div_rem(piv);
            if !rem.is_zero() {
                return None;
            }
            y[c] = q;
            next += 1;
        } else if !residual.is_zero() {
            return None;
        }
    }
    let x = hnf.u.apply(&y);
    debug_assert_eq!(&m.apply(&x), b);
    Some(x)
}

/// Sparse row of a system: column to nonzero coefficient.
pub type SparseRow = BTreeMap<usize, BigInt>;

/// An integer solution of a sparse system over `cols` unknowns, or `None`.
///
/// Pivots with coefficient `±1` are eliminated first using integer row
/// operations, which preserve the integer solution set, with the sparsest
/// rows and columns preferred. The leftover core goes to [`smith_solve`].
pub fn sparse_solve(mut rows: Vec<SparseRow>, mut rhs: Vec<BigInt>, cols: usize) -> Option<Vec<BigInt>> {
    assert_eq!(rows.len(), rhs.len(), "rhs length mismatch");
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cols];
    for (r, row) in rows.iter().enumerate() {
        for c in row.keys() {
            col_rows[*c].insert(r);
        }
    }
    let mut alive = vec![true; rows.len()];
    let mut queue: BTreeSet<(usize, usize)> = rows.iter().enumerate().map(|(r, row)| (row.len(), r)).collect();
    let mut eliminated = Vec::new();
    while let Some((len, r)) = queue.pop_first() {
        if len == 0 {
            if !rhs[r].is_zero() {
                return None;
            }
            alive[r] = false;
            continue;
        }
        let pivot = rows[r].iter().filter(|(_, a)| a.abs().is_one()).map(|(c, _)| *c).min_by_key(|c| col_rows[*c].len());
        // rows without a unit stay for the dense core unless modified later
        let Some(c) = pivot else { continue };
        alive[r] = false;
        let pivot_row = rows[r].clone();
        let a = pivot_row[&c].clone();
        for c2 in pivot_row.keys() {
            col_rows[*c2].remove(&r);
        }
        let others: Vec<usize> = col_rows[c].iter().copied().collect();
        for r2 in others {
            queue.remove(&(rows[r2].len(), r2));
            let factor = &rows[r2][&c] * &a;
            for (c2, v) in &pivot_row {
                let entry = rows[r2].entry(*c2).or_insert_with(BigInt::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    rows[r2].remove(c2);
                    col_rows[*c2].remove(&r2);
                } else {
                    col_rows[*c2].insert(r2);
                }
            }
            let delta = &factor * &rhs[r];
            rhs[r2] -= delta;
            queue.insert((rows[r2].len(), r2));
        }
        eliminated.push((r, c, a));
    }

    let core_rows: Vec<usize> = (0..rows.len()).filter(|r| alive[*r]).collect();
    let core_cols: Vec<usize> = core_rows.iter().flat_map(|r| rows[*r].keys().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut x = vec![BigInt::zero(); cols];
    if !core_rows.is_empty() {
        let index: BTreeMap<usize, usize> = core_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut m = IntMatrix::zeros(core_rows.len(), core_cols.len());
        for (i, r) in core_rows.iter().enumerate() {
            for (c, v) in &rows[*r] {
                m.set(i, index[c], v.clone());
            }
        }
        let b: Vec<BigInt> = core_rows.iter().map(|r| rhs[*r].clone()).collect();
        let y = smith_solve(&m, &b)?;
        for (c, v) in core_cols.iter().zip(y) {
            x[*c] = v;
        }
    }
    for (r, c, a) in eliminated.into_iter().rev() {
        let rest: BigInt = rows[r].iter().filter(|(c2, _)| **c2 != c).map(|(c2, v)| v * &x[*c2]).sum();
        x[c] = (&rhs[r] - rest) * a;
    }
    Some(x)
}
