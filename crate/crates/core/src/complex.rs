//! Finite abstract simplicial complexes with subdivision lineage.
//!
//! Every vertex carries a [`BaryPoint`]: its position as an exact convex
//! combination of the vertices of the complex it was originally built from.
//! Subdivision never needs ambient coordinates; PL data extends by linearity.
//!
//! Conventions used everywhere in the crate:
//! - a [`Simplex`] stores its vertices strictly increasing;
//! - the coboundary is `(delta c)(t) = sum_i (-1)^i c(t with its i-th vertex removed)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer::IntMatrix;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point given by positive weights on original vertices, summing to one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct BaryPoint {
    weights: BTreeMap<VertexId, Rational>,
}

impl BaryPoint {
    pub fn vertex(v: VertexId) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(v, Rational::one());
        BaryPoint { weights }
    }

    /// Builds a point from weights; zero weights are dropped. Fails when a
    /// weight is negative or the weights do not sum to one.
    pub fn new(weights: impl IntoIterator<Item = (VertexId, Rational)>) -> Result<Self> {
        let mut map: BTreeMap<VertexId, Rational> = BTreeMap::new();
        for (v, w) in weights {
            *map.entry(v).or_insert_with(Rational::zero) += w;
        }
        map.retain(|_, w| !w.is_zero());
        if map.values().any(|w| w.is_negative()) {
            return Err(Error::Parse("negative barycentric weight".into()));
        }
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(Error::Parse("barycentric weights must sum to 1".into()));
        }
        Ok(BaryPoint { weights: map })
    }

    /// Convex combination `sum_j c_j p_j`; coefficients must be non-negative
    /// and sum to one.
    pub fn combine<'a>(terms: impl IntoIterator<Item = (&'a BaryPoint, &'a Rational)>) -> Self {
        let mut weights: BTreeMap<VertexId, Rational> = BTreeMap::new();
        for (p, c) in terms {
            if c.is_zero() {
                continue;
            }
            for (v, w) in &p.weights {
                *weights.entry(*v).or_insert_with(Rational::zero) += w * c;
            }
        }
        weights.retain(|_, w| !w.is_zero());
        BaryPoint { weights }
    }

    pub fn weights(&self) -> &BTreeMap<VertexId, Rational> {
        &self.weights
    }

    pub fn weight(&self, v: VertexId) -> Rational {
        self.weights.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Simplex {
        Simplex::new(self.weights.keys().copied())
    }

    pub fn is_valid(&self) -> bool {
        !self.weights.is_empty()
            && self.weights.values().all(|w| w.is_positive())
            && self.weights.values().sum::<Rational>().is_one()
    }
}

/// Vertices in strictly increasing order; never empty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    /// Sorts and deduplicates. Panics on an empty vertex list.
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Self {
        let mut v: Vec<VertexId> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        assert!(!v.is_empty(), "a simplex needs at least one vertex");
        Simplex(v)
    }

    pub fn from_ids(ids: &[u32]) -> Self {
        Simplex::new(ids.iter().map(|&i| VertexId(i)))
    }

    pub fn vertex(v: VertexId) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }

    pub fn meets(&self, other: &Simplex) -> bool {
        self.0.iter().any(|v| other.contains_vertex(*v))
    }

    /// All non-empty faces, the simplex itself included.
    pub fn faces(&self) -> Vec<Simplex> {
        let k = self.0.len();
        (1u32..(1 << k))
            .map(|mask| {
                Simplex(
                    (0..k)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| self.0[i])
                        .collect(),
                )
            })
            .collect()
    }

    /// Codimension-one faces paired with their incidence sign `(-1)^i`.
    /// Empty for vertices.
    pub fn facets(&self) -> Vec<(Simplex, i64)> {
        if self.0.len() < 2 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|i| {
                let mut v = self.0.clone();
                v.remove(i);
                (Simplex(v), if i % 2 == 0 { 1 } else { -1 })
            })
            .collect()
    }

    pub fn without(&self, v: VertexId) -> Option<Simplex> {
        let rest: Vec<VertexId> = self.0.iter().copied().filter(|&u| u != v).collect();
        (!rest.is_empty()).then_some(Simplex(rest))
    }

    pub fn with(&self, v: VertexId) -> Simplex {
        Simplex::new(self.0.iter().copied().chain(std::iter::once(v)))
    }

    pub fn ids(&self) -> Vec<u32> {
        self.0.iter().map(|v| v.0).collect()
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A simplex with an ordering, remembered as a parity relative to sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedSimplex {
    pub simplex: Simplex,
    pub parity: i8,
}

impl OrientedSimplex {
    /// `None` when the ordering repeats a vertex.
    pub fn from_ordered(order: &[VertexId]) -> Option<Self> {
        let simplex = Simplex::new(order.iter().copied());
        if simplex.len() != order.len() {
            return None;
        }
        let ranks: Vec<usize> = order
            .iter()
            .map(|v| simplex.0.binary_search(v).unwrap())
            .collect();
        Some(OrientedSimplex { simplex, parity: permutation_sign(&ranks) })
    }

    pub fn reversed(&self) -> Self {
        OrientedSimplex { simplex: self.simplex.clone(), parity: -self.parity }
    }
}

/// Sign of a permutation of `0..len` given in one-line notation.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Integer cochain; values are stored on the sorted orientation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntCochain {
    pub degree: usize,
    values: BTreeMap<Simplex, BigInt>,
}

impl IntCochain {
    pub fn new(degree: usize) -> Self {
        IntCochain { degree, values: BTreeMap::new() }
    }

    pub fn set(&mut self, s: Simplex, value: BigInt) {
        debug_assert_eq!(s.dim(), self.degree);
        if value.is_zero() {
            self.values.remove(&s);
        } else {
            self.values.insert(s, value);
        }
    }

    pub fn get(&self, s: &Simplex) -> BigInt {
        self.values.get(s).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn eval(&self, s: &OrientedSimplex) -> BigInt {
        let v = self.get(&s.simplex);
        if s.parity < 0 {
            -v
        } else {
            v
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (&Simplex, &BigInt)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn negated(&self) -> Self {
        IntCochain {
            degree: self.degree,
            values: self.values.iter().map(|(s, v)| (s.clone(), -v)).collect(),
        }
    }

    /// Values on `basis`, in order.
    pub fn to_vector(&self, basis: &[Simplex]) -> Vec<BigInt> {
        basis.iter().map(|s| self.get(s)).collect()
    }

    pub fn from_vector(degree: usize, basis: &[Simplex], values: &[BigInt]) -> Self {
        let mut c = IntCochain::new(degree);
        for (s, v) in basis.iter().zip(values) {
            c.set(s.clone(), v.clone());
        }
        c
    }
}

/// A finite simplicial complex. Immutable: every operation returns a new one.
#[derive(Clone, Debug, Default)]
pub struct Complex {
    simplices: BTreeSet<Simplex>,
    bary: BTreeMap<VertexId, BaryPoint>,
    next_id: u32,
}

/// Equality ignores the id counter.
impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.simplices == other.simplices && self.bary == other.bary
    }
}

impl Eq for Complex {}

impl Complex {
    /// The hereditary closure of `simplices`. Their vertices become original
    /// vertices with trivial lineage.
    pub fn closure(simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let mut set = BTreeSet::new();
        for s in simplices {
            for f in s.faces() {
                set.insert(f);
            }
        }
        let bary: BTreeMap<VertexId, BaryPoint> = set
            .iter()
            .filter(|s| s.len() == 1)
            .map(|s| (s.0[0], BaryPoint::vertex(s.0[0])))
            .collect();
        let next_id = bary.keys().last().map_or(0, |v| v.0 + 1);
        Complex { simplices: set, bary, next_id }
    }

    pub fn from_ids(simplices: &[&[u32]]) -> Self {
        Complex::closure(simplices.iter().map(|s| Simplex::from_ids(s)))
    }

    /// A sub-collection of this complex's simplices, closed under faces,
    /// keeping lineage and the id counter.
    fn sub(&self, simplices: BTreeSet<Simplex>) -> Complex {
        let bary = simplices
            .iter()
            .filter(|s| s.len() == 1)
            .map(|s| (s.0[0], self.bary[&s.0[0]].clone()))
            .collect();
        Complex { simplices, bary, next_id: self.next_id }
    }

    /// Subcomplex generated by `simplices`, which must all belong to `self`.
    pub fn subcomplex(&self, simplices: impl IntoIterator<Item = Simplex>) -> Result<Complex> {
        let mut set = BTreeSet::new();
        for s in simplices {
            if !self.contains(&s) {
                return Err(Error::SimplexAbsent(s));
            }
            set.extend(s.faces());
        }
        Ok(self.sub(set))
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Number of simplices of all dimensions.
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().map(Simplex::dim).max()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.bary.contains_key(&v)
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.bary.keys().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.bary.len()
    }

    /// Simplices of dimension `k` in sorted order; the basis of `C^k`.
    pub fn simplices_of_dim(&self, k: usize) -> Vec<Simplex> {
        self.simplices.iter().filter(|s| s.dim() == k).cloned().collect()
    }

    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        self.simplices
            .iter()
            .filter(|s| !self.simplices.iter().any(|t| t.len() > s.len() && s.is_face_of(t)))
            .cloned()
            .collect()
    }

    pub fn bary(&self, v: VertexId) -> Option<&BaryPoint> {
        self.bary.get(&v)
    }

    /// Simplices having `s` as a face (including `s`).
    pub fn cofaces(&self, s: &Simplex) -> Vec<Simplex> {
        self.simplices.iter().filter(|t| s.is_face_of(t)).cloned().collect()
    }

    pub fn is_subcomplex_of(&self, other: &Complex) -> bool {
        self.simplices.iter().all(|s| other.contains(s))
    }

    /// Every face of every simplex is present and every vertex has lineage.
    pub fn is_closed(&self) -> bool {
        self.simplices
            .iter()
            .all(|s| s.faces().iter().all(|f| self.simplices.contains(f)))
            && self
                .simplices
                .iter()
                .filter(|s| s.len() == 1)
                .all(|s| self.bary.contains_key(&s.0[0]))
            && self.bary.len() == self.simplices.iter().filter(|s| s.len() == 1).count()
    }

    /// Star and link of `s`: the faces of simplices meeting `s`, and those
    /// of them disjoint from `s`.
    pub fn star_link(&self, s: &Simplex) -> Result<(Complex, Complex)> {
        if !self.contains(s) {
            return Err(Error::SimplexAbsent(s.clone()));
        }
        let mut star = BTreeSet::new();
        for t in self.simplices.iter().filter(|t| t.meets(s)) {
            star.extend(t.faces());
        }
        let link: BTreeSet<Simplex> = star.iter().filter(|t| !t.meets(s)).cloned().collect();
        Ok((self.sub(star), self.sub(link)))
    }

    /// Vertices sharing a simplex with `v` (including `v`).
    pub fn closed_neighbourhood(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.simplices
            .iter()
            .filter(|t| t.contains_vertex(v))
            .flat_map(|t| t.0.iter().copied())
            .collect()
    }

    /// Lineage of the point with local barycentric `weights` on `s`.
    pub fn point_on(&self, s: &Simplex, weights: &[Rational]) -> BaryPoint {
        BaryPoint::combine(s.0.iter().map(|v| &self.bary[v]).zip(weights))
    }

    pub fn barycenter(&self, s: &Simplex) -> BaryPoint {
        let w = Rational::new(BigInt::one(), BigInt::from(s.len()));
        let weights = vec![w; s.len()];
        self.point_on(s, &weights)
    }

    /// Local barycentric coordinates of `p` with respect to `s`, if `p` lies
    /// in the affine hull of `s`. Coordinates may be negative.
    pub fn local_coordinates(&self, s: &Simplex, p: &BaryPoint) -> Option<Vec<Rational>> {
        let mut rows: BTreeSet<VertexId> = p.weights.keys().copied().collect();
        for v in &s.0 {
            rows.extend(self.bary.get(v)?.weights.keys().copied());
        }
        let m: Vec<Vec<Rational>> = rows
            .iter()
            .map(|u| s.0.iter().map(|v| self.bary[v].weight(*u)).collect())
            .collect();
        let rhs: Vec<Rational> = rows.iter().map(|u| p.weight(*u)).collect();
        let x = rational::solve_linear(&m, &rhs, s.len())?;
        // Columns of a simplex are affinely independent, so the solution is unique.
        Some(x)
    }

    /// The simplex containing `p` in its relative interior, with local weights.
    pub fn locate(&self, p: &BaryPoint) -> Option<(Simplex, Vec<Rational>)> {
        let support = p.support();
        let mut by_dim: Vec<&Simplex> = self.simplices.iter().collect();
        by_dim.sort_by_key(|s| s.len());
        for s in by_dim {
            // Quick reject: the simplex's lineage must cover p's support.
            let covered = support.0.iter().all(|u| {
                s.0.iter().any(|v| self.bary[v].weights.contains_key(u))
            });
            if !covered {
                continue;
            }
            if let Some(w) = self.local_coordinates(s, p) {
                if w.iter().all(|x| x.is_positive()) {
                    return Some((s.clone(), w));
                }
            }
        }
        None
    }

    pub fn contains_point(&self, p: &BaryPoint) -> bool {
        self.locate(p).is_some()
    }

    fn fresh_vertex(&mut self, p: BaryPoint) -> VertexId {
        let v = VertexId(self.next_id);
        self.next_id += 1;
        self.bary.insert(v, p);
        v
    }

    /// Stars `carrier` at the interior point with local weights `weights`
    /// (all positive, summing to one). Returns the new complex and the new
    /// vertex. Starring a vertex returns the complex unchanged.
    pub fn star_at_weights(&self, carrier: &Simplex, weights: &[Rational]) -> Result<(Complex, VertexId)> {
        if !self.contains(carrier) {
            return Err(Error::SimplexAbsent(carrier.clone()));
        }
        let interior = weights.len() == carrier.len()
            && weights.iter().all(|w| w.is_positive())
            && weights.iter().sum::<Rational>().is_one();
        if !interior {
            return Err(Error::NotInterior(carrier.clone()));
        }
        if carrier.len() == 1 {
            return Ok((self.clone(), carrier.0[0]));
        }
        let point = self.point_on(carrier, weights);
        let mut out = self.clone();
        let v = out.fresh_vertex(point);
        let cofaces = self.cofaces(carrier);
        for t in &cofaces {
            out.simplices.remove(t);
        }
        out.simplices.insert(Simplex::vertex(v));
        for t in &cofaces {
            for c in &carrier.0 {
                let top = t.without(*c).expect("coface has at least two vertices").with(v);
                for f in top.faces() {
                    if f.contains_vertex(v) {
                        out.simplices.insert(f);
                    }
                }
            }
        }
        Ok((out, v))
    }

    /// Stars `carrier` at `p`, which must lie in its relative interior.
    pub fn star_at_point(&self, carrier: &Simplex, p: &BaryPoint) -> Result<(Complex, VertexId)> {
        if !self.contains(carrier) {
            return Err(Error::SimplexAbsent(carrier.clone()));
        }
        let w = self
            .local_coordinates(carrier, p)
            .ok_or_else(|| Error::NotInterior(carrier.clone()))?;
        self.star_at_weights(carrier, &w)
    }

    /// Derived subdivision: every simplex for which `pick` returns local
    /// weights is starred there, in order of decreasing dimension.
    pub fn derived_subdivision_weights<F>(&self, mut pick: F) -> Result<Complex>
    where
        F: FnMut(&Simplex) -> Option<Vec<Rational>>,
    {
        let mut order: Vec<&Simplex> = self.simplices.iter().collect();
        order.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut out = self.clone();
        for s in order {
            if s.len() < 2 {
                continue;
            }
            if let Some(w) = pick(s) {
                // Higher-dimensional starrings never touch `s` itself.
                out = out.star_at_weights(s, &w)?.0;
            }
        }
        Ok(out)
    }

    /// Derived subdivision with the starring points given as lineage points.
    pub fn derived_subdivision<F>(&self, mut pick: F) -> Result<Complex>
    where
        F: FnMut(&Simplex) -> Option<BaryPoint>,
    {
        let mut err = None;
        let out = self.derived_subdivision_weights(|s| {
            let p = pick(s)?;
            match self.local_coordinates(s, &p) {
                Some(w) if w.iter().all(|x| x.is_positive()) => Some(w),
                _ => {
                    err.get_or_insert(Error::NotInterior(s.clone()));
                    None
                }
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// Simplices whose vertices all satisfy `keep`.
    pub fn full_subcomplex<F>(&self, keep: F) -> Complex
    where
        F: Fn(VertexId) -> bool,
    {
        let set = self
            .simplices
            .iter()
            .filter(|s| s.0.iter().all(|&v| keep(v)))
            .cloned()
            .collect();
        self.sub(set)
    }

    /// Whether `a` is full in `self`: a simplex is in `a` iff its vertices are.
    pub fn is_full(&self, a: &Complex) -> bool {
        self.simplices
            .iter()
            .all(|s| a.contains(s) == s.0.iter().all(|v| a.contains_vertex(*v)))
    }

    /// Subdivides `self` so that `a` becomes full, leaving `a` untouched:
    /// every simplex outside `a` spanned by vertices of `a` is starred at its
    /// barycenter, in decreasing dimension.
    pub fn make_full(&self, a: &Complex) -> Result<Complex> {
        if !a.is_subcomplex_of(self) {
            return Err(Error::NotSubcomplex);
        }
        let mut order: Vec<&Simplex> = self
            .simplices
            .iter()
            .filter(|s| !a.contains(s) && s.0.iter().all(|v| a.contains_vertex(*v)))
            .collect();
        order.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
        let mut out = self.clone();
        for s in order {
            let w = Rational::new(BigInt::one(), BigInt::from(s.len()));
            out = out.star_at_weights(s, &vec![w; s.len()])?.0;
        }
        Ok(out)
    }

    /// Vertex sets of the connected components, ordered by least vertex.
    pub fn connected_components(&self) -> Vec<BTreeSet<VertexId>> {
        let ids: Vec<VertexId> = self.vertices().collect();
        let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for s in self.simplices.iter().filter(|s| s.len() == 2) {
            let a = find(&mut parent, index[&s.0[0]]);
            let b = find(&mut parent, index[&s.0[1]]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, BTreeSet<VertexId>> = BTreeMap::new();
        for (i, v) in ids.iter().enumerate() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().insert(*v);
        }
        let mut out: Vec<BTreeSet<VertexId>> = groups.into_values().collect();
        out.sort_by_key(|g| *g.iter().next().unwrap());
        out
    }

    /// Matrix of `delta: C^k -> C^(k+1)`; rows index `(k+1)`-simplices and
    /// columns `k`-simplices, both in sorted order.
    pub fn coboundary(&self, k: usize) -> IntMatrix {
        let cols = self.simplices_of_dim(k);
        let rows = self.simplices_of_dim(k + 1);
        coboundary_between(&rows, &cols)
    }

    /// Matrix of `partial: C_(k+1) -> C_k`, the transpose of the coboundary.
    pub fn boundary(&self, k: usize) -> IntMatrix {
        self.coboundary(k).transpose()
    }
}

/// Coboundary matrix restricted to the given row and column bases.
pub fn coboundary_between(rows: &[Simplex], cols: &[Simplex]) -> IntMatrix {
    let col_index: BTreeMap<&Simplex, usize> = cols.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut m = IntMatrix::zeros(rows.len(), cols.len());
    for (r, t) in rows.iter().enumerate() {
        for (face, sign) in t.facets() {
            if let Some(&c) = col_index.get(&face) {
                m.set(r, c, BigInt::from(sign));
            }
        }
    }
    m
}
