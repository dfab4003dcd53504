//! Piecewise-linear maps `|K| -> Q^n` with exact evaluation, norms and
//! per-simplex minimisation of `|f|`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{BaryPoint, Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    #[serde(rename = "linf")]
    LInf,
}

impl Norm {
    pub fn parse(s: &str) -> Result<Norm> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" | "max" => Ok(Norm::LInf),
            _ => Err(Error::Parse(format!("unknown norm {s:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::LInf => "linf",
        }
    }

    /// Exact value of `|y|`.
    pub fn of(self, y: &[Rational]) -> CriticalValue {
        match self {
            Norm::L1 => CriticalValue::Rat(y.iter().map(Signed::abs).sum()),
            Norm::LInf => CriticalValue::Rat(y.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero)),
            Norm::L2 => CriticalValue::SqrtRat(y.iter().map(rational::square).sum()),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A non-negative real that is either rational or the square root of one.
/// Comparison is exact across both forms.
#[derive(Clone, Debug)]
pub enum CriticalValue {
    Rat(Rational),
    /// Stores the square.
    SqrtRat(Rational),
}

impl CriticalValue {
    pub fn zero() -> Self {
        CriticalValue::Rat(Rational::zero())
    }

    pub fn squared(&self) -> Rational {
        match self {
            CriticalValue::Rat(q) => q * q,
            CriticalValue::SqrtRat(q) => q.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CriticalValue::Rat(q) | CriticalValue::SqrtRat(q) => q.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            CriticalValue::Rat(q) | CriticalValue::SqrtRat(q) => q.is_positive(),
        }
    }

    /// The value as a rational, when it is one.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            CriticalValue::Rat(q) => Some(q.clone()),
            CriticalValue::SqrtRat(q) => exact_sqrt(q),
        }
    }

    /// `c * self` for rational `c >= 0`.
    pub fn scale(&self, c: &Rational) -> Self {
        match self {
            CriticalValue::Rat(q) => CriticalValue::Rat(q * c),
            CriticalValue::SqrtRat(q) => CriticalValue::SqrtRat(q * c * c),
        }
    }

    /// `self + r`; only defined when `self` is rational.
    pub fn add_rational(&self, r: &Rational) -> Option<Self> {
        self.as_rational().map(|q| CriticalValue::Rat(q + r))
    }

    /// A rational in `[self, self + 1)`, for reporting and sampling.
    pub fn upper_rational(&self) -> Rational {
        match self.as_rational() {
            Some(q) => q,
            None => {
                let sq = self.squared();
                let mut lo = Rational::zero();
                let mut hi = sq.clone().max(Rational::one());
                for _ in 0..64 {
                    let mid = (&lo + &hi) / Rational::from_integer(2.into());
                    if &mid * &mid >= sq {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CriticalValue::Rat(q) => serde_json::Value::String(rational::format(q)),
            CriticalValue::SqrtRat(q) => match exact_sqrt(q) {
                Some(r) => serde_json::Value::String(rational::format(&r)),
                None => serde_json::json!({ "sqrt": rational::format(q) }),
            },
        }
    }

    /// Parses `"p/q"`, `"sqrt(p/q)"` or `"sqrt:p/q"`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            return Ok(CriticalValue::SqrtRat(rational::parse(inner)?));
        }
        if let Some(inner) = t.strip_prefix("sqrt:") {
            return Ok(CriticalValue::SqrtRat(rational::parse(inner)?));
        }
        Ok(CriticalValue::Rat(rational::parse(t)?))
    }
}

fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

impl PartialEq for CriticalValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for CriticalValue {}

impl PartialOrd for CriticalValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CriticalValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CriticalValue::Rat(a), CriticalValue::Rat(b)) => a.cmp(b),
            // both sides are non-negative, so squares order the same way
            _ => self.squared().cmp(&other.squared()),
        }
    }
}

impl fmt::Display for CriticalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalValue::Rat(q) => write!(f, "{}", rational::format(q)),
            CriticalValue::SqrtRat(q) => match exact_sqrt(q) {
                Some(r) => write!(f, "{}", rational::format(&r)),
                None => write!(f, "sqrt({})", rational::format(q)),
            },
        }
    }
}

/// Exact trichotomy `|y|` vs `a`.
pub fn norm_compare(y: &[Rational], norm: Norm, a: &CriticalValue) -> Ordering {
    norm.of(y).cmp(a)
}

/// Minimum of `|f|` over one simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexMin {
    /// Local barycentric weights of the minimiser on the simplex.
    pub weights: Vec<Rational>,
    pub point: BaryPoint,
    pub value: CriticalValue,
}

impl SimplexMin {
    /// The minimiser when it is a vertex of the simplex.
    pub fn vertex(&self, s: &Simplex) -> Option<VertexId> {
        let mut nz = self.weights.iter().enumerate().filter(|(_, w)| !w.is_zero());
        let (i, _) = nz.next()?;
        nz.next().is_none().then(|| s.vertices()[i])
    }

    /// Whether the minimiser lies in the relative interior of the simplex.
    pub fn is_interior(&self) -> bool {
        self.weights.iter().all(Signed::is_positive)
    }
}

/// A PL map given by rational vectors on the vertices of a complex.
#[derive(Clone, Debug, PartialEq)]
pub struct PLMap {
    complex: Complex,
    n: usize,
    values: BTreeMap<VertexId, Vec<Rational>>,
}

impl PLMap {
    pub fn new(complex: Complex, n: usize, values: BTreeMap<VertexId, Vec<Rational>>) -> Result<Self> {
        for v in complex.vertices() {
            match values.get(&v) {
                None => return Err(Error::MissingValue(v.0)),
                Some(y) if y.len() != n => {
                    return Err(Error::Dimension(format!("vertex {v} has {} components, expected {n}", y.len())))
                }
                _ => {}
            }
        }
        let values = values.into_iter().filter(|(v, _)| complex.contains_vertex(*v)).collect();
        Ok(PLMap { complex, n, values })
    }

    /// Convenience constructor from integer vertex values.
    pub fn from_ints(complex: Complex, n: usize, values: &[(u32, Vec<i64>)]) -> Result<Self> {
        let map = values
            .iter()
            .map(|(id, y)| (VertexId(*id), y.iter().map(|&x| rational::int(x)).collect()))
            .collect();
        PLMap::new(complex, n, map)
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, v: VertexId) -> &[Rational] {
        &self.values[&v]
    }

    pub fn values(&self) -> &BTreeMap<VertexId, Vec<Rational>> {
        &self.values
    }

    /// `sum_j w_j f(v_j)` on simplex `s`.
    pub fn evaluate_local(&self, s: &Simplex, weights: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.n];
        for (v, w) in s.vertices().iter().zip(weights) {
            if w.is_zero() {
                continue;
            }
            for (o, y) in out.iter_mut().zip(&self.values[v]) {
                *o += w * y;
            }
        }
        out
    }

    pub fn evaluate(&self, p: &BaryPoint) -> Result<Vec<Rational>> {
        let (s, w) = self.complex.locate(p).ok_or(Error::PointOutside)?;
        Ok(self.evaluate_local(&s, &w))
    }

    pub fn norm_at(&self, v: VertexId, norm: Norm) -> CriticalValue {
        norm.of(&self.values[&v])
    }

    /// Exact minimum of `|f|` over `s`. When a vertex attains the minimum it
    /// is returned as the minimiser.
    pub fn simplex_min(&self, s: &Simplex, norm: Norm) -> Result<SimplexMin> {
        if !self.complex.contains(s) {
            return Err(Error::SimplexAbsent(s.clone()));
        }
        let cols: Vec<&[Rational]> = s.vertices().iter().map(|v| self.value(*v)).collect();
        let (best_vertex, best_vertex_value) = cols
            .iter()
            .enumerate()
            .map(|(i, y)| (i, norm.of(y)))
            .min_by(|a, b| a.1.cmp(&b.1))
            .expect("simplices are non-empty");
        let (weights, value) = match norm {
            Norm::L2 => min_l2(&cols, self.n),
            Norm::L1 | Norm::LInf => min_polyhedral(&cols, self.n, norm),
        };
        let (weights, value) = if value >= best_vertex_value {
            let mut w = vec![Rational::zero(); s.len()];
            w[best_vertex] = Rational::one();
            (w, best_vertex_value)
        } else {
            (weights, value)
        };
        let point = self.complex.point_on(s, &weights);
        Ok(SimplexMin { weights, point, value })
    }

    /// Sorted, deduplicated minima of `|f|` over all simplices.
    pub fn critical_values(&self, norm: Norm) -> Vec<CriticalValue> {
        let mut vals: Vec<CriticalValue> = self
            .complex
            .simplices()
            .map(|s| self.simplex_min(s, norm).expect("simplex of own complex").value)
            .collect();
        vals.sort();
        vals.dedup();
        vals
    }

    /// `min |f|` over the whole complex; `None` for the empty complex.
    pub fn global_min(&self, norm: Norm) -> Option<CriticalValue> {
        self.complex
            .maximal_simplices()
            .iter()
            .map(|s| self.simplex_min(s, norm).expect("simplex of own complex").value)
            .min()
    }

    pub fn has_root(&self, norm: Norm) -> bool {
        self.global_min(norm).is_some_and(|m| m.is_zero())
    }

    /// `max |f|`, attained at a vertex by convexity.
    pub fn max_norm(&self, norm: Norm) -> Option<CriticalValue> {
        self.values.values().map(|y| norm.of(y)).max()
    }

    /// `||f - g||`, computed on vertices (`|f - g|` is convex on simplices).
    pub fn distance(&self, g: &PLMap, norm: Norm) -> Result<CriticalValue> {
        if self.complex != g.complex || self.n != g.n {
            return Err(Error::Dimension("maps live on different complexes".into()));
        }
        Ok(self
            .values
            .iter()
            .map(|(v, y)| {
                let d: Vec<Rational> = y.iter().zip(&g.values[v]).map(|(a, b)| a - b).collect();
                norm.of(&d)
            })
            .max()
            .unwrap_or_else(CriticalValue::zero))
    }

    pub fn scale(&self, c: &Rational) -> PLMap {
        let values = self
            .values
            .iter()
            .map(|(v, y)| (*v, y.iter().map(|x| x * c).collect()))
            .collect();
        PLMap { complex: self.complex.clone(), n: self.n, values }
    }

    pub fn map_values<F>(&self, mut f: F) -> PLMap
    where
        F: FnMut(VertexId, &[Rational]) -> Vec<Rational>,
    {
        let values = self.values.iter().map(|(v, y)| (*v, f(*v, y))).collect();
        PLMap { complex: self.complex.clone(), n: self.n, values }
    }

    /// Interpolates `f` onto a subdivision `fine` of its complex.
    pub fn restrict_interpolate(&self, fine: &Complex) -> Result<PLMap> {
        let mut values = BTreeMap::new();
        for v in fine.vertices() {
            let y = match self.values.get(&v) {
                Some(y) if fine.bary(v) == self.complex.bary(v) => y.clone(),
                _ => self.evaluate(fine.bary(v).expect("vertex has lineage"))?,
            };
            values.insert(v, y);
        }
        PLMap::new(fine.clone(), self.n, values)
    }

    /// Restriction to a subcomplex.
    pub fn restrict(&self, sub: &Complex) -> Result<PLMap> {
        if !sub.is_subcomplex_of(&self.complex) {
            return Err(Error::NotSubcomplex);
        }
        let values = sub.vertices().map(|v| (v, self.values[&v].clone())).collect();
        PLMap::new(sub.clone(), self.n, values)
    }

    /// Stars `carrier` at local `weights`; the new vertex gets the interpolated value.
    pub fn star_at_weights(&self, carrier: &Simplex, weights: &[Rational]) -> Result<(PLMap, VertexId)> {
        let (complex, v) = self.complex.star_at_weights(carrier, weights)?;
        let mut values = self.values.clone();
        values.entry(v).or_insert_with(|| self.evaluate_local(carrier, weights));
        Ok((PLMap { complex, n: self.n, values }, v))
    }
}

/// LP over barycentric weights for the polyhedral norms.
fn min_polyhedral(cols: &[&[Rational]], n: usize, norm: Norm) -> (Vec<Rational>, CriticalValue) {
    let k = cols.len();
    let zero = Rational::zero;
    let one = || Rational::one();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let (width, cost): (usize, Vec<Rational>) = match norm {
        // lambda (k) | t | slack+ (n) | slack- (n)
        Norm::LInf => {
            let width = k + 1 + 2 * n;
            let mut c = vec![zero(); width];
            c[k] = one();
            (width, c)
        }
        // lambda (k) | s (n) | slack+ (n) | slack- (n)
        _ => {
            let width = k + 3 * n;
            let mut c = vec![zero(); width];
            for i in 0..n {
                c[k + i] = one();
            }
            (width, c)
        }
    };
    let mut row = vec![zero(); width];
    for r in row.iter_mut().take(k) {
        *r = one();
    }
    a.push(row);
    b.push(one());
    let slack0 = match norm {
        Norm::LInf => k + 1,
        _ => k + n,
    };
    for sign in [1i64, -1] {
        for i in 0..n {
            let mut row = vec![zero(); width];
            for (j, y) in cols.iter().enumerate() {
                row[j] = &y[i] * rational::int(sign);
            }
            match norm {
                Norm::LInf => row[k] = -one(),
                _ => row[k + i] = -one(),
            }
            let slack = slack0 + if sign == 1 { i } else { n + i };
            row[slack] = one();
            a.push(row);
            b.push(zero());
        }
    }
    match lp::solve(&LinearProgram { a, b, c: cost }) {
        LpOutcome::Optimal { x, value } => (x[..k].to_vec(), CriticalValue::Rat(value)),
        other => unreachable!("norm minimisation LP is feasible and bounded: {other:?}"),
    }
}

/// Face enumeration: on each face, the affine least-squares optimality
/// system; keep feasible candidates of least squared norm.
fn min_l2(cols: &[&[Rational]], n: usize) -> (Vec<Rational>, CriticalValue) {
    let k = cols.len();
    let mut masks: Vec<u32> = (1u32..(1 << k)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut best: Option<(Vec<Rational>, Rational)> = None;
    for mask in masks {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let m = idx.len();
        let gram = |a: usize, b: usize| -> Rational { (0..n).map(|i| &cols[a][i] * &cols[b][i]).sum() };
        // [G  -1] [lambda]   [0]
        // [1   0] [ mu   ] = [1]
        let mut rows = Vec::with_capacity(m + 1);
        for &a in &idx {
            let mut r: Vec<Rational> = idx.iter().map(|&b| gram(a, b)).collect();
            r.push(-Rational::one());
            rows.push(r);
        }
        let mut last = vec![Rational::one(); m];
        last.push(Rational::zero());
        rows.push(last);
        let mut rhs = vec![Rational::zero(); m];
        rhs.push(Rational::one());
        let Some(sol) = rational::solve_linear(&rows, &rhs, m + 1) else {
            continue;
        };
        if sol[..m].iter().any(Signed::is_negative) {
            continue;
        }
        let mut weights = vec![Rational::zero(); k];
        for (j, &i) in idx.iter().enumerate() {
            weights[i] = sol[j].clone();
        }
        let y: Vec<Rational> = (0..n)
            .map(|i| (0..k).map(|j| &weights[j] * &cols[j][i]).sum())
            .collect();
        let sq: Rational = y.iter().map(rational::square).sum();
        if best.as_ref().is_none_or(|(_, b)| sq < *b) {
            best = Some((weights, sq));
        }
    }
    let (w, sq) = best.expect("vertex faces are always feasible");
    (w, CriticalValue::SqrtRat(sq))
}
