//! Brute-force cross-checks and perturbation witnesses.
//!
//! Nothing here is used by the decision procedure itself; these routines
//! exist to validate it independently.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{Simplex, VertexId};
use crate::error::{Error, Result};
use crate::integer::IntMatrix;
use crate::pl_map::{CriticalValue, Norm, PLMap};
use crate::rational::{self, Rational};
use crate::reduction::SphereMap;

/// Parameters of the lattice witness search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSearchConfig {
    pub trials: usize,
    pub seed: u64,
    /// The lattice step is `alpha / granularity`.
    pub granularity: u32,
}

impl Default for WitnessSearchConfig {
    fn default() -> Self {
        WitnessSearchConfig { trials: 1000, seed: 0, granularity: 8 }
    }
}

/// Whether a PL map has no root: each maximal simplex either has a
/// coordinate of strict constant sign on its vertices, or a positive exact minimum.
pub fn is_rootless(g: &PLMap) -> bool {
    g.complex().maximal_simplices().iter().all(|s| {
        let strictly_signed = (0..g.n()).any(|i| {
            let first = rational::sign(&g.value(s.vertices()[0])[i]);
            first != 0 && s.vertices().iter().all(|v| rational::sign(&g.value(*v)[i]) == first)
        });
        strictly_signed || g.simplex_min(s, Norm::LInf).map(|m| m.value.is_positive()).unwrap_or(false)
    })
}

fn within(d: &[Rational], norm: Norm, alpha: &CriticalValue) -> bool {
    norm.of(d) <= *alpha
}

/// Searches for a rootless `g` with `|g(v) - f(v)| <= alpha` at every vertex,
/// which bounds `|g - f|` everywhere by convexity of the norm.
///
/// Trial order: `f` itself, the axis shifts `+-alpha e_i`, then random lattice
/// perturbations (alternating global shifts and independent per-vertex moves).
/// `None` is inconclusive.
pub fn perturbation_witness(f: &PLMap, alpha: &CriticalValue, norm: Norm, cfg: &WitnessSearchConfig) -> Option<PLMap> {
    let n = f.n();
    let granularity = cfg.granularity.max(1) as i64;
    let step = alpha.upper_rational() / rational::int(granularity);
    let shifted = |d: &[Rational]| f.map_values(|_, y| y.iter().zip(d).map(|(a, b)| a + b).collect());
    let mut budget = cfg.trials;
    let mut attempt = |g: PLMap| -> Option<Option<PLMap>> {
        if budget == 0 {
            return Some(None);
        }
        budget -= 1;
        is_rootless(&g).then_some(Some(g))
    };
    if let Some(found) = attempt(f.clone()) {
        return found;
    }
    for i in 0..n {
        for sign in [1i64, -1] {
            let mut k = granularity;
            let d = loop {
                let mut d = vec![Rational::zero(); n];
                d[i] = &step * rational::int(sign * k);
                if within(&d, norm, alpha) || k == 0 {
                    break d;
                }
                k -= 1;
            };
            if let Some(found) = attempt(shifted(&d)) {
                return found;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let random_vec = |rng: &mut ChaCha8Rng| loop {
        let d: Vec<Rational> = (0..n).map(|_| &step * rational::int(rng.gen_range(-granularity..=granularity))).collect();
        if within(&d, norm, alpha) {
            return d;
        }
    };
    let mut trial = 0usize;
    loop {
        let g = if trial.is_multiple_of(2) {
            shifted(&random_vec(&mut rng))
        } else {
            let moves: Vec<(VertexId, Vec<Rational>)> =
                f.complex().vertices().map(|v| (v, random_vec(&mut rng))).collect();
            let moves: std::collections::BTreeMap<_, _> = moves.into_iter().collect();
            let values = f
                .values()
                .iter()
                .map(|(v, y)| (*v, y.iter().zip(&moves[v]).map(|(a, b)| a + b).collect()))
                .collect();
            PLMap::new(f.complex().clone(), n, values).expect("same complex")
        };
        trial += 1;
        if let Some(found) = attempt(g) {
            return found;
        }
    }
}

/// Vertex cycles of a complex whose components are all triangulated circles,
/// each starting at its least vertex and stepping first to the smaller neighbour.
pub fn cycles_of(a: &crate::complex::Complex) -> Result<Vec<Vec<VertexId>>> {
    let mut out = Vec::new();
    for comp in a.connected_components() {
        let start = *comp.iter().next().unwrap();
        let neighbours = |v: VertexId| -> Vec<VertexId> {
            let mut ns: Vec<VertexId> = a.closed_neighbourhood(v).into_iter().filter(|w| *w != v).collect();
            ns.sort();
            ns
        };
        if comp.iter().any(|v| neighbours(*v).len() != 2) || a.dim() != Some(1) {
            return Err(Error::Dimension("not a disjoint union of cycles".into()));
        }
        let mut cycle = vec![start];
        let mut prev = start;
        let mut cur = neighbours(start)[0];
        while cur != start {
            cycle.push(cur);
            let ns = neighbours(cur);
            let next = if ns[0] == prev { ns[1] } else { ns[0] };
            prev = cur;
            cur = next;
        }
        out.push(cycle);
    }
    Ok(out)
}

/// Winding numbers of a map into the 4-cycle `+e1, +e2, -e1, -e2` along
/// each given vertex cycle, counted as quarter turns.
pub fn winding_oracle(cycles: &[Vec<VertexId>], f: &SphereMap) -> Result<Vec<i64>> {
    if f.n() != 2 {
        return Err(Error::Dimension("winding numbers need n = 2".into()));
    }
    let position = |v: VertexId| -> i64 {
        let img = f.image(v);
        match (img.axis, img.sign > 0) {
            (0, true) => 0,
            (1, true) => 1,
            (0, false) => 2,
            _ => 3,
        }
    };
    cycles
        .iter()
        .map(|cycle| {
            let mut quarters = 0;
            for (i, v) in cycle.iter().enumerate() {
                let w = cycle[(i + 1) % cycle.len()];
                quarters += match (position(w) - position(*v)).rem_euclid(4) {
                    0 => 0,
                    1 => 1,
                    3 => -1,
                    _ => return Err(Error::InvalidSphereMap(format!("edge {v}-{w} maps onto antipodes"))),
                };
            }
            Ok(quarters / 4)
        })
        .collect()
}

/// Minimum of `|f|` over the barycentric grid with denominator `resolution` on `s`.
pub fn grid_min_check(f: &PLMap, s: &Simplex, norm: Norm, resolution: u32) -> CriticalValue {
    fn compositions(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=total {
            prefix.push(k);
            compositions(total - k, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut points = Vec::new();
    compositions(resolution, s.len(), &mut Vec::new(), &mut points);
    points
        .iter()
        .map(|p| {
            let w: Vec<Rational> = p.iter().map(|&k| rational::frac(k as i64, resolution as i64)).collect();
            norm.of(&f.evaluate_local(s, &w))
        })
        .min()
        .expect("at least one grid point")
}

/// Exhaustive search for an integer solution of `m x = b` with all but the
/// last coordinate in `[-bound, bound]`; the last one is solved for exactly
/// when some row involves it, otherwise it is searched as well.
pub fn brute_diophantine(m: &IntMatrix, b: &[BigInt], bound: i64) -> Option<Vec<BigInt>> {
    let rows = m.rows();
    let cols = m.cols();
    let a: Vec<Vec<i128>> = (0..rows)
        .map(|r| (0..cols).map(|c| m.get(r, c).to_i128().expect("small entries")).collect())
        .collect();
    let rhs: Vec<i128> = b.iter().map(|x| x.to_i128().expect("small rhs")).collect();
    if cols == 0 {
        return rhs.iter().all(|x| *x == 0).then(Vec::new);
    }
    let last = cols - 1;
    let pivot_row = (0..rows).find(|&r| a[r][last] != 0);
    let searched = if pivot_row.is_some() { last } else { cols };
    let mut x = vec![-(bound as i128); cols];
    if searched < cols {
        x[last] = 0;
    }
    loop {
        if let Some(r) = pivot_row {
            let partial: i128 = (0..last).map(|c| a[r][c] * x[c]).sum();
            let residual = rhs[r] - partial;
            if residual % a[r][last] == 0 {
                x[last] = residual / a[r][last];
            } else {
                x[last] = i128::MAX;
            }
        }
        if x[last] != i128::MAX && (0..rows).all(|r| (0..cols).map(|c| a[r][c] * x[c]).sum::<i128>() == rhs[r]) {
            return Some(x.iter().map(|v| BigInt::from(*v)).collect());
        }
        // odometer over the searched coordinates
        let mut i = 0;
        loop {
            if i == searched {
                return None;
            }
            if x[i] < bound as i128 {
                x[i] += 1;
                break;
            }
            x[i] = -(bound as i128);
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::integer::smith_solve;
    use crate::rational::{frac, int};

    fn identity_path() -> PLMap {
        let c = Complex::from_ids(&[&[1, 2], &[2, 3]]);
        PLMap::from_ints(c, 1, &[(1, vec![-1]), (2, vec![0]), (3, vec![1])]).unwrap()
    }

    #[test]
    fn witnesses() {
        let f = identity_path();
        let cfg = WitnessSearchConfig { trials: 200, ..Default::default() };
        let g = perturbation_witness(&f, &CriticalValue::Rat(int(2)), Norm::L1, &cfg).unwrap();
        assert!(is_rootless(&g));
        assert!(f.distance(&g, Norm::L1).unwrap() <= CriticalValue::Rat(int(2)));
        assert!(perturbation_witness(&f, &CriticalValue::Rat(frac(1, 2)), Norm::L1, &cfg).is_none());
        let c = Complex::from_ids(&[&[1]]);
        let constant = PLMap::from_ints(c, 1, &[(1, vec![2])]).unwrap();
        assert_eq!(perturbation_witness(&constant, &CriticalValue::Rat(int(1)), Norm::L1, &cfg).unwrap(), constant);
    }

    #[test]
    fn grid_dominates_exact_minimum() {
        let tri = Complex::from_ids(&[&[1, 2, 3]]);
        let f = PLMap::from_ints(tri, 2, &[(1, vec![1, 0]), (2, vec![0, 1]), (3, vec![1, 1])]).unwrap();
        let s = Simplex::from_ids(&[1, 2, 3]);
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let exact = f.simplex_min(&s, norm).unwrap().value;
            assert!(grid_min_check(&f, &s, norm, 7) >= exact);
        }
        let e = Simplex::from_ids(&[1, 2]);
        let g = identity_path();
        assert!(grid_min_check(&g, &e, Norm::L2, 4).is_zero());
    }

    #[test]
    fn windings() {
        let a = Complex::from_ids(&[&[1, 2], &[2, 3], &[3, 4], &[1, 4]]);
        let imgs = [(1, "+e1"), (2, "+e2"), (3, "-e1"), (4, "-e2")];
        let images = imgs.iter().map(|(v, s)| (VertexId(*v), s.parse().unwrap())).collect();
        let f = SphereMap::new(a.clone(), 2, images).unwrap();
        let cycles = cycles_of(&a).unwrap();
        assert_eq!(winding_oracle(&cycles, &f).unwrap(), vec![1]);
        let images = (1..=4).map(|v| (VertexId(v), "+e1".parse().unwrap())).collect();
        let constant = SphereMap::new(a, 2, images).unwrap();
        assert_eq!(winding_oracle(&cycles, &constant).unwrap(), vec![0]);
    }

    #[test]
    fn brute_force_small_systems() {
        let m = IntMatrix::from_rows(&[vec![2]]);
        assert_eq!(brute_diophantine(&m, &[BigInt::from(4)], 5), Some(vec![BigInt::from(2)]));
        assert_eq!(brute_diophantine(&m, &[BigInt::from(3)], 5), None);
        let m = IntMatrix::from_rows(&[vec![2, 3]]);
        let x = brute_diophantine(&m, &[BigInt::from(1)], 5).unwrap();
        assert_eq!(m.apply(&x), vec![BigInt::from(1)]);
        assert!(smith_solve(&m, &[BigInt::from(1)]).is_some());
        let zero = IntMatrix::from_rows(&[vec![0, 0]]);
        assert!(brute_diophantine(&zero, &[BigInt::from(0)], 1).is_some());
        assert!(brute_diophantine(&zero, &[BigInt::from(1)], 1).is_none());
    }
}
