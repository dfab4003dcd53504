//! Freudenthal (Kuhn) triangulation of a box: each cell is split into the
//! `m!` simplices `base, base + e_p0, base + e_p0 + e_p1, ...`, one per
//! permutation `p` of the axes.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::complex::{Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::pl_map::PLMap;
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct Grid {
    pub bounds: Vec<(Rational, Rational)>,
    pub resolution: Vec<usize>,
    pub complex: Complex,
    coords: BTreeMap<VertexId, Vec<Rational>>,
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, m - 1);
            out.push(q);
        }
    }
    out
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    fn step(&self, k: usize) -> Rational {
        (&self.bounds[k].1 - &self.bounds[k].0) / rational::int(self.resolution[k] as i64)
    }

    /// Vertex at a multi-index (each entry in `0..=resolution`).
    pub fn vertex_at(&self, index: &[usize]) -> VertexId {
        let mut id = 0usize;
        for k in (0..self.dim()).rev() {
            id = id * (self.resolution[k] + 1) + index[k];
        }
        VertexId(id as u32 + 1)
    }

    pub fn point(&self, v: VertexId) -> &[Rational] {
        &self.coords[&v]
    }

    pub fn coords(&self) -> &BTreeMap<VertexId, Vec<Rational>> {
        &self.coords
    }

    /// The PL map sending each vertex to its coordinates.
    pub fn identity_map(&self) -> PLMap {
        PLMap::new(self.complex.clone(), self.dim(), self.coords.clone()).expect("every vertex has coordinates")
    }

    /// Samples `f` at the vertices.
    pub fn sample<F>(&self, n: usize, mut f: F) -> Result<PLMap>
    where
        F: FnMut(&[Rational]) -> Vec<Rational>,
    {
        let values = self.coords.iter().map(|(v, x)| (*v, f(x))).collect();
        PLMap::new(self.complex.clone(), n, values)
    }

    /// Simplex containing `x` with its local weights (in sorted vertex order).
    pub fn locate(&self, x: &[Rational]) -> Option<(Simplex, Vec<Rational>)> {
        let m = self.dim();
        if x.len() != m || (0..m).any(|k| x[k] < self.bounds[k].0 || x[k] > self.bounds[k].1) {
            return None;
        }
        let mut base = vec![0usize; m];
        let mut t = vec![Rational::zero(); m];
        for k in 0..m {
            let s = (&x[k] - &self.bounds[k].0) / self.step(k);
            let c = s.floor().to_integer().to_usize().unwrap_or(0).min(self.resolution[k] - 1);
            base[k] = c;
            t[k] = s - rational::int(c as i64);
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| t[b].cmp(&t[a]).then(a.cmp(&b)));
        let mut chain = vec![self.vertex_at(&base)];
        let mut weights = vec![Rational::one() - &t[order[0]]];
        let mut idx = base.clone();
        for j in 0..m {
            idx[order[j]] += 1;
            chain.push(self.vertex_at(&idx));
            let next = if j + 1 < m { t[order[j + 1]].clone() } else { Rational::zero() };
            weights.push(&t[order[j]] - next);
        }
        let mut pairs: Vec<(VertexId, Rational)> = chain.into_iter().zip(weights).collect();
        pairs.sort_by_key(|(v, _)| *v);
        let (vs, ws): (Vec<VertexId>, Vec<Rational>) = pairs.into_iter().unzip();
        Some((Simplex::new(vs), ws))
    }
}

pub fn freudenthal_grid(bounds: &[(Rational, Rational)], resolution: &[usize]) -> Result<Grid> {
    let m = bounds.len();
    if m == 0 || resolution.len() != m {
        return Err(Error::Dimension("grid needs one resolution per axis".into()));
    }
    if resolution.contains(&0) || bounds.iter().any(|(lo, hi)| !(hi - lo).is_positive()) {
        return Err(Error::Dimension("grid axes need positive length and resolution".into()));
    }
    let mut grid = Grid { bounds: bounds.to_vec(), resolution: resolution.to_vec(), complex: Complex::default(), coords: BTreeMap::new() };
    let mut index = vec![0usize; m];
    loop {
        let x: Vec<Rational> = (0..m)
            .map(|k| &bounds[k].0 + grid.step(k) * rational::int(index[k] as i64))
            .collect();
        grid.coords.insert(grid.vertex_at(&index), x);
        if !advance(&mut index, |k| resolution[k]) {
            break;
        }
    }
    let perms = permutations(m);
    let mut simplices = Vec::new();
    let mut cell = vec![0usize; m];
    loop {
        for p in &perms {
            let mut idx = cell.clone();
            let mut vs = vec![grid.vertex_at(&idx)];
            for &k in p {
                idx[k] += 1;
                vs.push(grid.vertex_at(&idx));
            }
            simplices.push(Simplex::new(vs));
        }
        if !advance(&mut cell, |k| resolution[k] - 1) {
            break;
        }
    }
    grid.complex = Complex::closure(simplices);
    Ok(grid)
}

/// Odometer step with per-axis maxima; false once it wraps around.
fn advance<F: Fn(usize) -> usize>(index: &mut [usize], max: F) -> bool {
    for k in 0..index.len() {
        if index[k] < max(k) {
            index[k] += 1;
            return true;
        }
        index[k] = 0;
    }
    false
}
