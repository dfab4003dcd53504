//! Robust satisfiability verdicts, exact robustness, localisation and
//! systems with inequality constraints.
//!
//! Robustness is monotone in `alpha`: an `alpha'`-perturbation with
//! `alpha' < alpha` is also an `alpha`-perturbation, so a robust root at
//! `alpha` is robust at every smaller level. The binary search relies on
//! this and the test suite checks it on random instances.

use std::collections::BTreeSet;

use num_traits::Signed;
use serde::Serialize;

use crate::complex::{Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::homotopy::{decide_extension, DeciderOptions, ExtendVerdict};
use crate::pl_map::{CriticalValue, Norm, PLMap};
use crate::rational::{self, Rational};
use crate::reduction::{reduce, Reduction};

#[derive(Clone, Debug, PartialEq)]
pub enum RobVerdict {
    RobustYes,
    /// Optionally with a rootless PL map within `alpha` of `f` on the same complex.
    RobustNo(Option<PLMap>),
    Unknown,
}

impl RobVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            RobVerdict::RobustYes => "robust_yes",
            RobVerdict::RobustNo(_) => "robust_no",
            RobVerdict::Unknown => "unknown",
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, RobVerdict::RobustYes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, RobVerdict::RobustNo(_))
    }

    fn from_extension(v: &ExtendVerdict) -> RobVerdict {
        match v {
            ExtendVerdict::Extends(_) => RobVerdict::RobustNo(None),
            ExtendVerdict::NotExtends(_) => RobVerdict::RobustYes,
            ExtendVerdict::Unknown(_) => RobVerdict::Unknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RobustnessResult {
    /// `f` has no root at all.
    Unsatisfiable,
    Value(CriticalValue),
    /// `lo` is confirmed robust (or `0`), `hi` confirmed non-robust or `max |f|`.
    Interval(CriticalValue, CriticalValue),
}

/// A verdict together with the intermediate objects that produced it.
#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: RobVerdict,
    pub reduction: Reduction,
    /// `None` when the pipeline stopped before the extension question.
    pub extension: Option<ExtendVerdict>,
}

pub fn decide_robsat(f: &PLMap, alpha: &CriticalValue, norm: Norm) -> Result<RobVerdict> {
    Ok(decide_robsat_with(f, alpha, norm, DeciderOptions::default())?.verdict)
}

pub fn decide_robsat_with(f: &PLMap, alpha: &CriticalValue, norm: Norm, opts: DeciderOptions) -> Result<Decision> {
    if !alpha.is_positive() {
        return Err(Error::NonPositiveAlpha);
    }
    let reduction = reduce(f, alpha, norm)?;
    let level = &reduction.level;
    if level.x.is_empty() {
        // every vertex has |f| > alpha and the minimum sits at a vertex
        return Ok(Decision { verdict: RobVerdict::RobustNo(Some(f.clone())), reduction, extension: None });
    }
    let Some(map) = &reduction.sphere_map else {
        return Ok(Decision { verdict: RobVerdict::RobustNo(None), reduction, extension: None });
    };
    let ext = decide_extension(&level.x, &level.a, map, opts)?;
    Ok(Decision { verdict: RobVerdict::from_extension(&ext), reduction, extension: Some(ext) })
}

/// Outcome of one probe during the robustness search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Probe {
    pub alpha: String,
    pub verdict: &'static str,
}

pub fn robustness(f: &PLMap, norm: Norm) -> Result<RobustnessResult> {
    Ok(robustness_with(f, norm, DeciderOptions::default())?.0)
}

/// Binary search over the positive critical values; also returns the probes made.
pub fn robustness_with(f: &PLMap, norm: Norm, opts: DeciderOptions) -> Result<(RobustnessResult, Vec<Probe>)> {
    match f.global_min(norm) {
        None => return Ok((RobustnessResult::Unsatisfiable, Vec::new())),
        Some(m) if m.is_positive() => return Ok((RobustnessResult::Unsatisfiable, Vec::new())),
        _ => {}
    }
    let cands: Vec<CriticalValue> = f.critical_values(norm).into_iter().filter(|c| c.is_positive()).collect();
    let mut probes = Vec::new();
    let mut probe = |i: usize| -> Result<RobVerdict> {
        let v = decide_robsat_with(f, &cands[i], norm, opts)?.verdict;
        probes.push(Probe { alpha: cands[i].to_string(), verdict: v.tag() });
        Ok(v)
    };
    // lo: confirmed robust index (or none), hi: confirmed non-robust index (or len)
    let mut lo: Option<usize> = None;
    let mut hi = cands.len();
    let mut unknown = BTreeSet::new();
    loop {
        let start = lo.map_or(0, |l| l + 1);
        if start >= hi {
            break;
        }
        let open: Vec<usize> = (start..hi).filter(|i| !unknown.contains(i)).collect();
        if open.is_empty() {
            break;
        }
        let mid = open[open.len() / 2];
        match probe(mid)? {
            RobVerdict::RobustYes => lo = Some(mid),
            RobVerdict::RobustNo(_) => hi = mid,
            RobVerdict::Unknown => {
                unknown.insert(mid);
            }
        }
    }
    let lo_value = lo.map_or_else(CriticalValue::zero, |i| cands[i].clone());
    let pending = unknown.iter().any(|&i| lo.is_none_or(|l| i > l) && i < hi);
    let result = if pending {
        let hi_value = if hi < cands.len() {
            cands[hi].clone()
        } else {
            f.max_norm(norm).unwrap_or_else(CriticalValue::zero)
        };
        RobustnessResult::Interval(lo_value, hi_value)
    } else {
        RobustnessResult::Value(lo_value)
    };
    Ok((result, probes))
}

/// A connected component of `X` with its verdict.
#[derive(Clone, Debug)]
pub struct ComponentVerdict {
    pub x: Complex,
    pub a: Complex,
    pub verdict: RobVerdict,
}

/// Components of `X` on which every `alpha`-perturbation has a root
/// (plus those left undecided).
pub fn locate_components(f: &PLMap, alpha: &CriticalValue, norm: Norm) -> Result<Vec<ComponentVerdict>> {
    locate_components_with(f, alpha, norm, DeciderOptions::default())
}

pub fn locate_components_with(
    f: &PLMap,
    alpha: &CriticalValue,
    norm: Norm,
    opts: DeciderOptions,
) -> Result<Vec<ComponentVerdict>> {
    if !alpha.is_positive() {
        return Err(Error::NonPositiveAlpha);
    }
    let red = reduce(f, alpha, norm)?;
    let level = &red.level;
    let mut out = Vec::new();
    for comp in level.x.connected_components() {
        let x = level.x.full_subcomplex(|v| comp.contains(&v));
        let a = level.a.full_subcomplex(|v| comp.contains(&v));
        if a.is_empty() {
            continue;
        }
        let map = red.sphere_map.as_ref().expect("A is non-empty").restrict(&a)?;
        let verdict = RobVerdict::from_extension(&decide_extension(&x, &a, &map, opts)?);
        if !verdict.is_no() {
            out.push(ComponentVerdict { x, a, verdict });
        }
    }
    Ok(out)
}

/// Stars every edge across which `h` strictly changes sign, at its zero.
fn split_at_zero(f: &PLMap, coord: usize, shift: &Rational) -> Result<(PLMap, Vec<VertexId>)> {
    let h = |v: VertexId| &f.value(v)[coord] + shift;
    let crossing: Vec<Simplex> = f
        .complex()
        .simplices()
        .filter(|s| s.len() == 2 && rational::sign(&h(s.vertices()[0])) * rational::sign(&h(s.vertices()[1])) < 0)
        .cloned()
        .collect();
    let mut out = f.clone();
    let mut created = Vec::new();
    for e in crossing {
        let (p, q) = (h(e.vertices()[0]), h(e.vertices()[1]));
        let d = &q - &p;
        let (next, v) = out.star_at_weights(&e, &[&q / &d, -&p / &d])?;
        created.push(v);
        out = next;
    }
    Ok((out, created))
}

/// Decides robust satisfiability of `f = 0` subject to `g <= 0` (componentwise),
/// where perturbations of size `alpha` may act on `f` and `g` alike.
///
/// The feasible region of any perturbation contains `U = {g <= -alpha}`,
/// and the question reduces to `f` restricted to `U`. After splitting every
/// edge at the zero of `g_i + alpha`, each simplex is weakly on one side of
/// every level `g_i = -alpha`, so `U` is exactly the full subcomplex on the
/// vertices where all `g_i <= -alpha`.
pub fn decide_with_inequalities(f: &PLMap, g: &PLMap, alpha: &CriticalValue, norm: Norm) -> Result<RobVerdict> {
    if norm != Norm::LInf {
        return Err(Error::NormRequired);
    }
    if f.complex() != g.complex() {
        return Err(Error::Dimension("f and g live on different complexes".into()));
    }
    let Some(a) = alpha.as_rational() else {
        return Err(Error::Unsupported("inequality systems need a rational alpha".into()));
    };
    if !a.is_positive() {
        return Err(Error::NonPositiveAlpha);
    }
    let (n, k) = (f.n(), g.n());
    let combined = PLMap::new(
        f.complex().clone(),
        n + k,
        f.values()
            .iter()
            .map(|(v, y)| (*v, y.iter().chain(g.value(*v)).cloned().collect()))
            .collect(),
    )?;
    let mut h = combined;
    for i in 0..k {
        h = split_at_zero(&h, n + i, &a)?.0;
    }
    let neg_a = -a;
    let u = h.complex().full_subcomplex(|v| h.value(v)[n..].iter().all(|x| *x <= neg_a));
    let hu = h.restrict(&u)?;
    let fu = PLMap::new(u.clone(), n, hu.values().iter().map(|(v, y)| (*v, y[..n].to_vec())).collect())?;
    if u.is_empty() {
        return Ok(RobVerdict::RobustNo(Some(fu)));
    }
    decide_robsat(&fu, alpha, norm)
}
