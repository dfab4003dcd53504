//! Extendability of simplicial maps into the cross-polytope sphere.
//!
//! For `n = 1` the target is two points and a map extends iff it is constant
//! on the part of `A` inside each component of `X`. For `n >= 2` the map is
//! encoded by its pullback cocycle `z` of degree `n - 1`, and we ask for an
//! integer cocycle `w` on `X` with `w|_A = z + delta u`. For `n = 2` this is
//! exactly extendability (the circle is a `K(Z, 1)`). For `n >= 3` a solution
//! means the primary obstruction vanishes; when `dim X <= n` that is also
//! sufficient by the Hopf extension theorem, which is an external result and
//! can be switched off with [`DeciderOptions::assume_hopf`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::complex::{permutation_sign, Complex, IntCochain, Simplex};
use crate::error::{Error, Result};
use crate::integer::{sparse_solve, SparseRow};
use crate::reduction::SphereMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeciderOptions {
    /// Treat a vanishing primary obstruction as sufficient when `dim X <= n`, `n >= 3`.
    pub assume_hopf: bool,
}

impl Default for DeciderOptions {
    fn default() -> Self {
        DeciderOptions { assume_hopf: true }
    }
}

/// Cochains `w` on `X` and `u` on `A` with `delta_X w = 0` and `w|_A = z + delta_A u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionCertificate {
    pub w: IntCochain,
    pub u: IntCochain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtendVerdict {
    Extends(ExtensionCertificate),
    NotExtends(String),
    Unknown(String),
}

impl ExtendVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            ExtendVerdict::Extends(_) => "extends",
            ExtendVerdict::NotExtends(_) => "not_extends",
            ExtendVerdict::Unknown(_) => "unknown",
        }
    }
}

/// Pullback of the fundamental class along `f`, with the distinguished
/// simplex `[e1, ..., en]`.
pub fn pullback_cocycle(f: &SphereMap) -> IntCochain {
    let identity: Vec<usize> = (0..f.n()).collect();
    pullback_cocycle_oriented(f, &identity)
}

/// Same, with the distinguished simplex ordered as `[e_(order[0]+1), ...]`.
pub fn pullback_cocycle_oriented(f: &SphereMap, order: &[usize]) -> IntCochain {
    let n = f.n();
    let mut position = vec![usize::MAX; n];
    for (i, &axis) in order.iter().enumerate() {
        position[axis] = i;
    }
    let mut z = IntCochain::new(n - 1);
    for s in f.domain().simplices_of_dim(n - 1) {
        let imgs: Vec<_> = s.vertices().iter().map(|v| f.image(*v)).collect();
        if imgs.iter().any(|img| img.sign < 0) {
            continue;
        }
        let perm: Vec<usize> = imgs.iter().map(|img| position[img.axis]).collect();
        let mut seen = vec![false; n];
        if perm.iter().any(|&p| std::mem::replace(&mut seen[p], true)) {
            continue;
        }
        z.set(s, BigInt::from(permutation_sign(&perm)));
    }
    z
}

/// The cocycle extension problem as a sparse integer system.
///
/// A pair `(w, u)` exists iff some cocycle `w` on `X` restricts to exactly
/// `z` on `A`: given `(w, u)`, subtract the coboundary of `u` extended by zero.
/// So `w` is fixed to `z` on the `(n-1)`-simplices of `A` and the unknowns
/// are its values elsewhere; each `n`-simplex of `X` outside `A` gives one
/// equation `delta w = 0` (those inside `A` hold because `z` is a cocycle).
#[derive(Clone, Debug)]
pub struct ExtensionSystem {
    pub rows: Vec<SparseRow>,
    pub rhs: Vec<BigInt>,
    /// The `(n-1)`-simplices of `X` outside `A`, one per unknown.
    pub unknowns: Vec<Simplex>,
    pub z: IntCochain,
}

impl ExtensionSystem {
    pub fn solve(&self) -> Option<Vec<BigInt>> {
        sparse_solve(self.rows.clone(), self.rhs.clone(), self.unknowns.len())
    }

    pub fn is_solution(&self, x: &[BigInt]) -> bool {
        x.len() == self.unknowns.len()
            && self.rows.iter().zip(&self.rhs).all(|(row, b)| row.iter().map(|(c, a)| a * &x[*c]).sum::<BigInt>() == *b)
    }

    pub fn certificate(&self, x: &[BigInt]) -> ExtensionCertificate {
        let k = self.z.degree;
        let mut w = self.z.clone();
        for (s, v) in self.unknowns.iter().zip(x) {
            w.set(s.clone(), v.clone());
        }
        ExtensionCertificate { w, u: IntCochain::new(k.saturating_sub(1)) }
    }
}

/// Builds the system for `z` of degree `>= 1` supported on `A`.
pub fn extension_system(x: &Complex, a: &Complex, z: &IntCochain) -> Result<ExtensionSystem> {
    let k = z.degree;
    if k == 0 {
        return Err(Error::Unsupported("cocycle extension needs degree at least 1".into()));
    }
    if !a.is_subcomplex_of(x) {
        return Err(Error::NotSubcomplex);
    }
    if let Some((s, _)) = z.support().find(|(s, _)| !a.contains(s)) {
        return Err(Error::Invariant(format!("cocycle is supported on {s}, outside A")));
    }
    let unknowns: Vec<Simplex> = x.simplices_of_dim(k).into_iter().filter(|s| !a.contains(s)).collect();
    let index: BTreeMap<&Simplex, usize> = unknowns.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for t in x.simplices_of_dim(k + 1).into_iter().filter(|t| !a.contains(t)) {
        let mut row = SparseRow::new();
        let mut b = BigInt::zero();
        for (f, sign) in t.facets() {
            match index.get(&f) {
                Some(&c) => {
                    row.insert(c, BigInt::from(sign));
                }
                None => b -= z.get(&f) * sign,
            }
        }
        rows.push(row);
        rhs.push(b);
    }
    Ok(ExtensionSystem { rows, rhs, unknowns, z: z.clone() })
}

/// Solves the cocycle extension problem for `z` of degree `>= 1`.
pub fn cocycle_extension_solvable(x: &Complex, a: &Complex, z: &IntCochain) -> Result<Option<ExtensionCertificate>> {
    let sys = extension_system(x, a, z)?;
    Ok(sys.solve().map(|sol| sys.certificate(&sol)))
}

/// Exact re-check of a certificate.
pub fn verify_certificate(x: &Complex, a: &Complex, z: &IntCochain, cert: &ExtensionCertificate) -> bool {
    let k = z.degree;
    if k == 0 {
        // w is a 0-cocycle (locally constant) agreeing with z on A
        return x.simplices_of_dim(1).iter().all(|e| cert.w.get(&Simplex::vertex(e.vertices()[0])) == cert.w.get(&Simplex::vertex(e.vertices()[1])))
            && a.simplices_of_dim(0).iter().all(|v| cert.w.get(v) == z.get(v));
    }
    if cert.w.support().any(|(s, _)| !x.contains(s)) || cert.u.support().any(|(s, _)| !a.contains(s)) {
        return false;
    }
    let closed = x.simplices_of_dim(k + 1).iter().all(|t| {
        t.facets().into_iter().map(|(f, sign)| cert.w.get(&f) * sign).sum::<BigInt>().is_zero()
    });
    let restricts = a.simplices_of_dim(k).iter().all(|s| {
        let du: BigInt = s.facets().into_iter().map(|(f, sign)| cert.u.get(&f) * sign).sum();
        cert.w.get(s) == z.get(s) + du
    });
    closed && restricts
}

fn check_inputs(x: &Complex, a: &Complex, f: &SphereMap) -> Result<()> {
    if !a.is_subcomplex_of(x) {
        return Err(Error::NotSubcomplex);
    }
    if !f.domain().simplices().eq(a.simplices()) {
        return Err(Error::InvalidSphereMap("sphere map domain differs from A".into()));
    }
    Ok(())
}

fn decide_points(x: &Complex, a: &Complex, f: &SphereMap) -> ExtendVerdict {
    let mut w = IntCochain::new(0);
    for comp in x.connected_components() {
        let mut image = None;
        for v in comp.iter().filter(|v| a.contains_vertex(**v)) {
            let img = f.image(*v);
            match image {
                None => image = Some(img),
                Some(prev) if prev != img => {
                    return ExtendVerdict::NotExtends(format!(
                        "the component of vertex {} meets both {prev} and {img}",
                        comp.iter().next().unwrap()
                    ))
                }
                _ => {}
            }
        }
        if image.is_some_and(|img| img.sign > 0) {
            for v in &comp {
                w.set(Simplex::vertex(*v), BigInt::one());
            }
        }
    }
    ExtendVerdict::Extends(ExtensionCertificate { w, u: IntCochain::new(0) })
}

/// Decides whether `f: A -> Sigma^(n-1)` extends continuously over `X`.
pub fn decide_extension(x: &Complex, a: &Complex, f: &SphereMap, opts: DeciderOptions) -> Result<ExtendVerdict> {
    check_inputs(x, a, f)?;
    let n = f.n();
    if a.is_empty() {
        return Ok(ExtendVerdict::Extends(ExtensionCertificate {
            w: IntCochain::new(n - 1),
            u: IntCochain::new(n.saturating_sub(2)),
        }));
    }
    if n == 1 {
        return Ok(decide_points(x, a, f));
    }
    let z = pullback_cocycle(f);
    let Some(cert) = cocycle_extension_solvable(x, a, &z)? else {
        return Ok(ExtendVerdict::NotExtends(if n == 2 {
            "the pulled-back cocycle does not extend to a cocycle on X".into()
        } else {
            "the primary obstruction does not vanish".into()
        }));
    };
    if !verify_certificate(x, a, &z, &cert) {
        return Err(Error::Invariant("extension certificate failed verification".into()));
    }
    let dim_x = x.dim().unwrap_or(0);
    if n == 2 || (dim_x <= n && opts.assume_hopf) {
        return Ok(ExtendVerdict::Extends(cert));
    }
    let reason = if dim_x > n {
        format!("primary obstruction vanishes but dim X = {dim_x} exceeds n = {n}; higher obstructions are not computed")
    } else {
        "primary obstruction vanishes; completeness needs the Hopf extension theorem, which is disabled".into()
    };
    Ok(ExtendVerdict::Unknown(reason))
}

/// Boundary of an integer `k`-chain, as a `(k-1)`-chain.
pub fn chain_boundary(c: &IntCochain) -> IntCochain {
    let mut out: BTreeMap<Simplex, BigInt> = BTreeMap::new();
    if c.degree == 0 {
        return IntCochain::new(0);
    }
    for (s, v) in c.support() {
        for (f, sign) in s.facets() {
            *out.entry(f).or_insert_with(BigInt::zero) += v * sign;
        }
    }
    let mut b = IntCochain::new(c.degree - 1);
    for (s, v) in out {
        b.set(s, v);
    }
    b
}

/// Degree of `f` on an integer `(n-1)`-cycle of its domain.
pub fn degree(cycle: &IntCochain, f: &SphereMap) -> Result<BigInt> {
    if cycle.degree + 1 != f.n() {
        return Err(Error::Dimension(format!("cycle of degree {} for n = {}", cycle.degree, f.n())));
    }
    if cycle.support().any(|(s, _)| !f.domain().contains(s)) {
        return Err(Error::NotSubcomplex);
    }
    if cycle.degree > 0 && !chain_boundary(cycle).is_zero() {
        return Err(Error::NotACycle);
    }
    let z = pullback_cocycle(f);
    Ok(cycle.support().map(|(s, c)| c * z.get(s)).sum())
}
