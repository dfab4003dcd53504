//! From a PL map and a level `alpha` to a simplicial extension problem.
//!
//! Pipeline:
//! 1. [`vertexwise_extremal_subdivision`]: `|f|` attains its minimum over every
//!    simplex at a vertex (its maximum is at a vertex by convexity).
//! 2. [`build_chi`]: the level indicator `chi` in `{0, 1/2, 1}`.
//! 3. [`split_level`]: no simplex joins a `chi = 0` vertex to a `chi = 1` vertex;
//!    `X = chi^-1[0, 1/2]` and `A = chi^-1(1/2)` become full subcomplexes.
//! 4. [`sign_refinement`]: every simplex of `A` is weakly signed in every coordinate.
//! 5. [`simplicial_approximation`]: a vertex map `A -> Sigma^(n-1)` into the
//!    boundary of the cross-polytope.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::complex::{Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::pl_map::{norm_compare, CriticalValue, Norm, PLMap};
use crate::rational::{self, Rational};

/// A vertex `sign * e_(axis+1)` of the cross-polytope boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SphereVertex {
    /// `+1` or `-1`.
    pub sign: i8,
    /// Zero-based coordinate index.
    pub axis: usize,
}

impl SphereVertex {
    pub fn plus(axis: usize) -> Self {
        SphereVertex { sign: 1, axis }
    }

    pub fn minus(axis: usize) -> Self {
        SphereVertex { sign: -1, axis }
    }

    pub fn antipode(self) -> Self {
        SphereVertex { sign: -self.sign, axis: self.axis }
    }

    /// The point `sign * scale * e_axis` in `Q^n`.
    pub fn to_vector(self, n: usize, scale: &Rational) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); n];
        y[self.axis] = scale * rational::int(self.sign as i64);
        y
    }
}

impl fmt::Display for SphereVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}e{}", if self.sign > 0 { '+' } else { '-' }, self.axis + 1)
    }
}

impl FromStr for SphereVertex {
    type Err = Error;

    /// Accepts `+e2`, `-e1`, `+2`, `-1`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (sign, rest) = match t.as_bytes().first() {
            Some(b'+') => (1, &t[1..]),
            Some(b'-') => (-1, &t[1..]),
            _ => return Err(Error::Parse(format!("sphere vertex needs a sign: {s:?}"))),
        };
        let digits = rest.strip_prefix('e').unwrap_or(rest);
        let idx: usize = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad sphere vertex {s:?}")))?;
        if idx == 0 {
            return Err(Error::Parse(format!("sphere axes are 1-based: {s:?}")));
        }
        Ok(SphereVertex { sign, axis: idx - 1 })
    }
}

/// The boundary of the cross-polytope in `R^n`: simplices are the
/// antipodal-free sets of signed unit vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereModel {
    pub n: usize,
}

impl SphereModel {
    pub fn vertices(&self) -> Vec<SphereVertex> {
        (0..self.n).flat_map(|i| [SphereVertex::plus(i), SphereVertex::minus(i)]).collect()
    }

    /// Whether the given vertices span a simplex of the model.
    pub fn spans_simplex(&self, vs: &[SphereVertex]) -> bool {
        vs.iter().all(|v| v.axis < self.n && !vs.contains(&v.antipode()))
    }

    pub fn dim(&self) -> usize {
        self.n - 1
    }
}

/// A simplicial map from `domain` into the cross-polytope sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMap {
    domain: Complex,
    n: usize,
    images: BTreeMap<VertexId, SphereVertex>,
}

impl SphereMap {
    pub fn new(domain: Complex, n: usize, images: BTreeMap<VertexId, SphereVertex>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSphereMap("target dimension must be positive".into()));
        }
        for v in domain.vertices() {
            match images.get(&v) {
                None => return Err(Error::InvalidSphereMap(format!("vertex {v} has no image"))),
                Some(img) if img.axis >= n => {
                    return Err(Error::InvalidSphereMap(format!("vertex {v} maps to {img}, outside n = {n}")))
                }
                _ => {}
            }
        }
        let model = SphereModel { n };
        for s in domain.simplices().filter(|s| s.len() == 2) {
            let img: Vec<SphereVertex> = s.vertices().iter().map(|v| images[v]).collect();
            if !model.spans_simplex(&img) {
                return Err(Error::InvalidSphereMap(format!("edge {s} maps onto antipodes")));
            }
        }
        let images = images.into_iter().filter(|(v, _)| domain.contains_vertex(*v)).collect();
        Ok(SphereMap { domain, n, images })
    }

    pub fn domain(&self) -> &Complex {
        &self.domain
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image(&self, v: VertexId) -> SphereVertex {
        self.images[&v]
    }

    pub fn images(&self) -> &BTreeMap<VertexId, SphereVertex> {
        &self.images
    }

    /// Post-composition with the signed permutation `v -> (sign[v.axis] * v.sign) e_perm[v.axis]`.
    pub fn compose_signed_permutation(&self, perm: &[usize], signs: &[i8]) -> SphereMap {
        let images = self
            .images
            .iter()
            .map(|(v, img)| (*v, SphereVertex { sign: img.sign * signs[img.axis], axis: perm[img.axis] }))
            .collect();
        SphereMap { domain: self.domain.clone(), n: self.n, images }
    }

    pub fn restrict(&self, sub: &Complex) -> Result<SphereMap> {
        if !sub.is_subcomplex_of(&self.domain) {
            return Err(Error::NotSubcomplex);
        }
        SphereMap::new(sub.clone(), self.n, self.images.clone())
    }
}

/// Level indicator on vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Chi {
    Zero,
    Half,
    One,
}

impl Chi {
    pub fn as_rational(self) -> Rational {
        match self {
            Chi::Zero => rational::int(0),
            Chi::Half => rational::frac(1, 2),
            Chi::One => rational::int(1),
        }
    }
}

impl fmt::Display for Chi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chi::Zero => "0",
            Chi::Half => "1/2",
            Chi::One => "1",
        })
    }
}

/// The pair `(X, A)` inside the subdivided domain.
#[derive(Clone, Debug)]
pub struct LevelPair {
    pub ambient: Complex,
    pub x: Complex,
    pub a: Complex,
    /// `f` on `ambient`.
    pub f: PLMap,
    pub alpha: CriticalValue,
    pub chi: BTreeMap<VertexId, Chi>,
}

impl LevelPair {
    fn from_parts(f: PLMap, alpha: CriticalValue, chi: BTreeMap<VertexId, Chi>) -> LevelPair {
        let ambient = f.complex().clone();
        let x = ambient.full_subcomplex(|v| chi[&v] != Chi::One);
        let a = ambient.full_subcomplex(|v| chi[&v] == Chi::Half);
        LevelPair { ambient, x, a, f, alpha, chi }
    }

    /// Structural invariants: no simplex meets both `chi = 0` and `chi = 1`,
    /// `A` full in `X`, `X` full in the ambient complex, `f` root-free on `A`.
    pub fn check(&self) -> Result<()> {
        for s in self.ambient.simplices().filter(|s| s.len() == 2) {
            let c: Vec<Chi> = s.vertices().iter().map(|v| self.chi[v]).collect();
            if c.contains(&Chi::Zero) && c.contains(&Chi::One) {
                return Err(Error::Invariant(format!("edge {s} joins chi = 0 and chi = 1")));
            }
        }
        if !self.x.is_full(&self.a) || !self.ambient.is_full(&self.x) {
            return Err(Error::Invariant("level pair is not full".into()));
        }
        self.check_root_free_on_a()
    }

    pub fn check_root_free_on_a(&self) -> Result<()> {
        for s in self.a.maximal_simplices() {
            if self.f.simplex_min(&s, Norm::LInf)?.value.is_zero() {
                return Err(Error::Invariant(format!("f has a root on the A-simplex {s}")));
            }
        }
        Ok(())
    }

    /// `chi` at a point given by local weights on a simplex of the ambient complex.
    pub fn chi_at(&self, s: &Simplex, weights: &[Rational]) -> Rational {
        s.vertices().iter().zip(weights).map(|(v, w)| w * self.chi[v].as_rational()).sum()
    }
}

/// Simplices whose minimum of `|f|` is not attained at any vertex.
fn failing_simplices(f: &PLMap, norm: Norm) -> Result<Vec<(Simplex, crate::pl_map::SimplexMin)>> {
    let mut out = Vec::new();
    for s in f.complex().simplices().filter(|s| s.len() > 1) {
        let m = f.simplex_min(s, norm)?;
        if m.vertex(s).is_none() {
            out.push((s.clone(), m));
        }
    }
    Ok(out)
}

pub fn is_vertex_extremal(f: &PLMap, norm: Norm) -> Result<bool> {
    Ok(failing_simplices(f, norm)?.is_empty())
}

/// Subdivides so that `|f|` takes its minimum over every simplex at a vertex.
///
/// First a derived subdivision starring each simplex at its minimiser when
/// that is interior. Order-dependent leftovers are then repaired: the failing
/// simplex with the smallest minimum is starred at its minimiser (on the face
/// carrying it). Every new simplex contains either that minimiser or the
/// minimising vertex of the coface it came from, so the failing set only
/// shrinks.
pub fn vertexwise_extremal_subdivision(f: &PLMap, norm: Norm) -> Result<PLMap> {
    let mut order: Vec<Simplex> = f.complex().simplices().filter(|s| s.len() > 1).cloned().collect();
    order.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut g = f.clone();
    for s in &order {
        let m = f.simplex_min(s, norm)?;
        if m.is_interior() {
            g = g.star_at_weights(s, &m.weights)?.0;
        }
    }
    let mut failing = failing_simplices(&g, norm)?;
    failing.sort_by(|(s, a), (t, b)| a.value.cmp(&b.value).then(t.len().cmp(&s.len())).then_with(|| s.cmp(t)));
    for (s, m) in failing {
        if !g.complex().contains(&s) {
            continue;
        }
        let (face, weights): (Vec<VertexId>, Vec<Rational>) = s
            .vertices()
            .iter()
            .zip(&m.weights)
            .filter(|(_, w)| w.is_positive())
            .map(|(v, w)| (*v, w.clone()))
            .unzip();
        g = g.star_at_weights(&Simplex::new(face), &weights)?.0;
    }
    if !is_vertex_extremal(&g, norm)? {
        return Err(Error::Invariant("vertexwise extremal subdivision did not converge".into()));
    }
    Ok(g)
}

pub fn build_chi(f: &PLMap, alpha: &CriticalValue, norm: Norm) -> BTreeMap<VertexId, Chi> {
    f.values()
        .iter()
        .map(|(v, y)| {
            let c = match norm_compare(y, norm, alpha) {
                std::cmp::Ordering::Less => Chi::Zero,
                std::cmp::Ordering::Equal => Chi::Half,
                std::cmp::Ordering::Greater => Chi::One,
            };
            (*v, c)
        })
        .collect()
}

/// Stars every edge joining `chi = 0` to `chi = 1` at its midpoint, where
/// the interpolated `chi` is `1/2`.
pub fn split_level(f: &PLMap, chi: &BTreeMap<VertexId, Chi>, alpha: &CriticalValue) -> Result<LevelPair> {
    let mixed: Vec<Simplex> = f
        .complex()
        .simplices()
        .filter(|s| {
            s.len() == 2 && {
                let (a, b) = (chi[&s.vertices()[0]], chi[&s.vertices()[1]]);
                matches!((a, b), (Chi::Zero, Chi::One) | (Chi::One, Chi::Zero))
            }
        })
        .cloned()
        .collect();
    let mut g = f.clone();
    let mut chi = chi.clone();
    let half = [rational::frac(1, 2), rational::frac(1, 2)];
    for e in mixed {
        // starring one edge leaves every other edge in place
        let (next, v) = g.star_at_weights(&e, &half)?;
        chi.insert(v, Chi::Half);
        g = next;
    }
    let lp = LevelPair::from_parts(g, alpha.clone(), chi);
    Ok(lp)
}

/// Makes every simplex of `A` weakly signed in each coordinate.
///
/// Pass `i` stars every `A`-edge with strictly opposite `f_i` signs at its
/// `f_i` zero. New edges all touch that zero, so one sweep per coordinate
/// suffices. Later passes add vertices whose `f_i` is a convex combination
/// inside an already weakly signed simplex, so earlier passes stay valid.
pub fn sign_refinement(lp: &LevelPair) -> Result<LevelPair> {
    lp.check_root_free_on_a()?;
    let n = lp.f.n();
    let mut f = lp.f.clone();
    let mut chi = lp.chi.clone();
    for i in 0..n {
        let a = f.complex().full_subcomplex(|v| chi[&v] == Chi::Half);
        let crossing: Vec<Simplex> = a
            .simplices()
            .filter(|s| {
                s.len() == 2 && {
                    let p = &f.value(s.vertices()[0])[i];
                    let q = &f.value(s.vertices()[1])[i];
                    rational::sign(p) * rational::sign(q) < 0
                }
            })
            .cloned()
            .collect();
        for e in crossing {
            let p = f.value(e.vertices()[0])[i].clone();
            let q = f.value(e.vertices()[1])[i].clone();
            let d = &q - &p;
            let weights = [&q / &d, -&p / &d];
            let (next, v) = f.star_at_weights(&e, &weights)?;
            chi.insert(v, Chi::Half);
            f = next;
        }
    }
    let out = LevelPair::from_parts(f, lp.alpha.clone(), chi);
    for s in out.a.simplices().filter(|s| s.len() == 2) {
        for i in 0..n {
            let p = &out.f.value(s.vertices()[0])[i];
            let q = &out.f.value(s.vertices()[1])[i];
            if rational::sign(p) * rational::sign(q) < 0 {
                return Err(Error::Invariant(format!("A-edge {s} still changes sign in coordinate {}", i + 1)));
            }
        }
    }
    Ok(out)
}

/// Maps each `A`-vertex to `s_v e_(i_v)`, with `i_v` the coordinate of largest
/// magnitude (smallest index on ties) and `s_v` its sign.
pub fn simplicial_approximation(lp: &LevelPair) -> Result<SphereMap> {
    let n = lp.f.n();
    let mut images = BTreeMap::new();
    for v in lp.a.vertices() {
        let y = lp.f.value(v);
        let (axis, best) = y
            .iter()
            .enumerate()
            .fold((0, &y[0]), |(bi, b), (i, c)| if c.abs() > b.abs() { (i, c) } else { (bi, b) });
        if best.is_zero() {
            return Err(Error::Invariant(format!("A-vertex {v} is a root of f")));
        }
        images.insert(v, SphereVertex { sign: rational::sign(best), axis });
    }
    SphereMap::new(lp.a.clone(), n, images)
}

/// Literal star condition: for every `A`-vertex `v` and every vertex `w`
/// sharing an `A`-simplex with `v`, `s_v f_(i_v)(w) >= 0`, strictly at `w = v`.
pub fn check_star_condition(lp: &LevelPair, map: &SphereMap) -> bool {
    lp.a.vertices().all(|v| {
        let img = map.image(v);
        let signed = |w: VertexId| &lp.f.value(w)[img.axis] * rational::int(img.sign as i64);
        signed(v).is_positive()
            && lp
                .a
                .closed_neighbourhood(v)
                .into_iter()
                .all(|w| !signed(w).is_negative())
    })
}

/// Sizes after each pipeline stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct ReductionTrace {
    pub input_simplices: usize,
    pub extremal_vertices: usize,
    pub extremal_simplices: usize,
    pub split_vertices: usize,
    pub refined_vertices: usize,
    pub x_simplices: usize,
    pub a_simplices: usize,
    pub x_dim: Option<usize>,
}

/// Output of the whole geometric pipeline.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub extremal: PLMap,
    /// `chi` on the vertex-extremal subdivision.
    pub chi: BTreeMap<VertexId, Chi>,
    pub level: LevelPair,
    /// `None` when `A` is empty.
    pub sphere_map: Option<SphereMap>,
    pub trace: ReductionTrace,
}

pub fn reduce(f: &PLMap, alpha: &CriticalValue, norm: Norm) -> Result<Reduction> {
    let extremal = vertexwise_extremal_subdivision(f, norm)?;
    let chi = build_chi(&extremal, alpha, norm);
    let split = split_level(&extremal, &chi, alpha)?;
    split.check()?;
    let mut trace = ReductionTrace {
        input_simplices: f.complex().len(),
        extremal_vertices: extremal.complex().num_vertices(),
        extremal_simplices: extremal.complex().len(),
        split_vertices: split.ambient.num_vertices(),
        ..Default::default()
    };
    let (level, sphere_map) = if split.a.is_empty() {
        (split, None)
    } else {
        let refined = sign_refinement(&split)?;
        let map = simplicial_approximation(&refined)?;
        (refined, Some(map))
    };
    trace.refined_vertices = level.ambient.num_vertices();
    trace.x_simplices = level.x.len();
    trace.a_simplices = level.a.len();
    trace.x_dim = level.x.dim();
    Ok(Reduction { extremal, chi, level, sphere_map, trace })
}
