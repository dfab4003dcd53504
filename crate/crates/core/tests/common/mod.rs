#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use robsat::integer::IntMatrix;
use robsat::io::freudenthal_grid;
use robsat::oracles::{cycles_of, winding_oracle};
use robsat::rational::{frac, int};
use robsat::{Complex, PLMap, Rational, Simplex, SphereMap, SphereVertex, VertexId};

pub fn path(vals: &[i64]) -> PLMap {
    let edges: Vec<Vec<u32>> = (1..vals.len() as u32).map(|i| vec![i, i + 1]).collect();
    let refs: Vec<&[u32]> = edges.iter().map(Vec::as_slice).collect();
    let values: Vec<(u32, Vec<i64>)> = vals.iter().enumerate().map(|(i, &x)| (i as u32 + 1, vec![x])).collect();
    PLMap::from_ints(Complex::from_ids(&refs), 1, &values).unwrap()
}

/// The identity map on a triangulated `[-1, 1]^2`.
pub fn square_identity(res: usize) -> PLMap {
    freudenthal_grid(&[(int(-1), int(1)), (int(-1), int(1))], &[res, res]).unwrap().identity_map()
}

/// Point of the unit L1 circle at parameter `t` (in turns), piecewise linear
/// through `e1, e2, -e1, -e2`.
pub fn diamond(t: &Rational) -> [Rational; 2] {
    let corners = [[int(1), int(0)], [int(0), int(1)], [int(-1), int(0)], [int(0), int(-1)]];
    let t4 = (t - t.floor()) * int(4);
    let s = t4.floor();
    let u = &t4 - &s;
    let i = s.to_integer().try_into().unwrap_or(0usize) % 4;
    let j = (i + 1) % 4;
    [
        (int(1) - &u) * &corners[i][0] + &u * &corners[j][0],
        (int(1) - &u) * &corners[i][1] + &u * &corners[j][1],
    ]
}

/// Vertex id of ring `r` (0 inner, 1 middle, 2 outer), position `k`.
pub fn ring_id(r: usize, k: usize, n: usize) -> u32 {
    (r * n + k % n) as u32 + 1
}

pub fn annulus_complex(n: usize) -> Complex {
    let mut tris = Vec::new();
    for r in 0..2 {
        for k in 0..n {
            tris.push(Simplex::from_ids(&[ring_id(r, k, n), ring_id(r, k + 1, n), ring_id(r + 1, k, n)]));
            tris.push(Simplex::from_ids(&[ring_id(r, k + 1, n), ring_id(r + 1, k + 1, n), ring_id(r + 1, k, n)]));
        }
    }
    Complex::closure(tris)
}

/// Planar position of an annulus vertex: ring `r` sits on the L1 circle of radius `r + 1`.
pub fn annulus_position(id: u32, n: usize) -> [Rational; 2] {
    let idx = id as usize - 1;
    let (r, k) = (idx / n, idx % n);
    let p = diamond(&frac(k as i64, n as i64));
    let scale = int(r as i64 + 1);
    [&p[0] * &scale, &p[1] * &scale]
}

/// Annulus whose middle ring is the zero set; the outer ring winds `w`
/// times around the L1 circle of radius 2 and the inner ring `-w` times.
/// As boundary of the band between them both circles carry winding `w`.
pub fn annulus_map(n: usize, w: i64) -> PLMap {
    let complex = annulus_complex(n);
    let mut values = BTreeMap::new();
    for k in 0..n {
        let t = frac(w * k as i64, n as i64);
        let outer = diamond(&t);
        let inner = diamond(&(-t));
        values.insert(VertexId(ring_id(2, k, n)), outer.iter().map(|x| x * int(2)).collect());
        values.insert(VertexId(ring_id(1, k, n)), vec![int(0), int(0)]);
        values.insert(VertexId(ring_id(0, k, n)), inner.iter().map(|x| x * int(2)).collect());
    }
    PLMap::new(complex, 2, values).unwrap()
}

/// Position of a subdivision vertex through its lineage.
pub fn lineage_position(c: &Complex, v: VertexId, n: usize) -> [Rational; 2] {
    let mut p = [int(0), int(0)];
    for (orig, w) in c.bary(v).unwrap().weights() {
        let q = annulus_position(orig.0, n);
        p[0] += w * &q[0];
        p[1] += w * &q[1];
    }
    p
}

fn signed_area(points: &[[Rational; 2]]) -> Rational {
    let mut a = int(0);
    for i in 0..points.len() {
        let (p, q) = (&points[i], &points[(i + 1) % points.len()]);
        a += &p[0] * &q[1] - &q[0] * &p[1];
    }
    a
}

/// Sum of windings of `map` over the boundary cycles of an annulus-shaped
/// `A`, each oriented as the boundary of the band between them: the outer
/// cycle counterclockwise, the inner clockwise.
pub fn boundary_winding_sum(ambient: &Complex, a: &Complex, map: &SphereMap, n: usize) -> i64 {
    let cycles = cycles_of(a).unwrap();
    let mut with_area: Vec<(Rational, Vec<VertexId>)> = cycles
        .into_iter()
        .map(|mut c| {
            let pts: Vec<[Rational; 2]> = c.iter().map(|v| lineage_position(ambient, *v, n)).collect();
            let area = signed_area(&pts);
            if area < int(0) {
                c.reverse();
            }
            (if area < int(0) { -area } else { area }, c)
        })
        .collect();
    with_area.sort_by(|a, b| a.0.cmp(&b.0));
    let ordered: Vec<Vec<VertexId>> = with_area.into_iter().map(|(_, c)| c).collect();
    let windings = winding_oracle(&ordered, map).unwrap();
    // counterclockwise windings; the inner (smaller) cycle is reversed
    windings.iter().enumerate().map(|(i, w)| if i + 1 == windings.len() { *w } else { -*w }).sum()
}

/// Triangle `[1, 2, 3]` with `[1, 2]` split at `4`, and its boundary cycle `1-4-2-3`.
pub fn split_triangle() -> (Complex, Complex) {
    let x = Complex::from_ids(&[&[1, 3, 4], &[2, 3, 4]]);
    let a = Complex::from_ids(&[&[1, 4], &[2, 4], &[2, 3], &[1, 3]]);
    (x, a)
}

pub fn sphere_map(domain: &Complex, n: usize, imgs: &[(u32, &str)]) -> SphereMap {
    let images = imgs.iter().map(|(v, s)| (VertexId(*v), s.parse().unwrap())).collect();
    SphereMap::new(domain.clone(), n, images).unwrap()
}

pub fn degree_one_boundary() -> (Complex, Complex, SphereMap) {
    let (x, a) = split_triangle();
    let m = sphere_map(&a, 2, &[(1, "+e1"), (4, "+e2"), (2, "-e1"), (3, "-e2")]);
    (x, a, m)
}

/// Closure of `count` random simplices of dimension `<= max_dim` on vertices `1..=vertices`.
pub fn random_complex(rng: &mut ChaCha8Rng, vertices: u32, max_dim: usize, count: usize) -> Complex {
    let ids: Vec<u32> = (1..=vertices).collect();
    let mut simplices = Vec::new();
    for _ in 0..count {
        let size = rng.gen_range(1..=(max_dim + 1).min(vertices as usize));
        let chosen: Vec<u32> = ids.choose_multiple(rng, size).copied().collect();
        simplices.push(Simplex::from_ids(&chosen));
    }
    Complex::closure(simplices)
}

pub fn random_map(rng: &mut ChaCha8Rng, complex: &Complex, n: usize, range: i64) -> PLMap {
    let values = complex
        .vertices()
        .map(|v| (v, (0..n).map(|_| int(rng.gen_range(-range..=range))).collect()))
        .collect();
    PLMap::new(complex.clone(), n, values).unwrap()
}

/// A random simplicial map from `a` into the cross-polytope sphere, or `None`
/// if no antipodal-free assignment was hit.
pub fn random_sphere_map(rng: &mut ChaCha8Rng, a: &Complex, n: usize) -> Option<SphereMap> {
    for _ in 0..200 {
        let images: BTreeMap<VertexId, SphereVertex> = a
            .vertices()
            .map(|v| (v, SphereVertex { sign: if rng.gen_bool(0.5) { 1 } else { -1 }, axis: rng.gen_range(0..n) }))
            .collect();
        if let Ok(m) = SphereMap::new(a.clone(), n, images) {
            return Some(m);
        }
    }
    None
}

/// A random subcomplex: the closure of a random subset of the maximal simplices' faces.
pub fn random_subcomplex(rng: &mut ChaCha8Rng, x: &Complex) -> Complex {
    let all: Vec<Simplex> = x.simplices().cloned().collect();
    let picked: BTreeSet<Simplex> = all.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
    x.subcomplex(picked).unwrap()
}

pub fn random_system(rng: &mut ChaCha8Rng) -> (IntMatrix, Vec<BigInt>) {
    let rows = rng.gen_range(1..=4);
    let cols = rng.gen_range(1..=4);
    let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-5..=5)).collect()).collect();
    let m = IntMatrix::from_rows(&data);
    let b = if rng.gen_bool(0.5) {
        // consistent by construction
        let x: Vec<BigInt> = (0..cols).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
        m.apply(&x)
    } else {
        (0..rows).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect()
    };
    (m, b)
}

/// `n = 3` on a 4-simplex, vanishing only at vertex `1` and with first
/// coordinate `1` elsewhere. Near the root `f` misses `-e1`, so the primary
/// obstruction vanishes, while the zero region is 4-dimensional.
pub fn four_simplex_instance() -> PLMap {
    let c = Complex::from_ids(&[&[1, 2, 3, 4, 5]]);
    PLMap::from_ints(
        c,
        3,
        &[(1, vec![0, 0, 0]), (2, vec![1, 1, 0]), (3, vec![1, 0, 1]), (4, vec![1, -1, 0]), (5, vec![1, 0, -1])],
    )
    .unwrap()
}
