//! PL maps built from extension problems: `f'(v) = kappa * e(v)` on `A` and
//! `0` elsewhere, with `A` made full first. Then `|f'| >= 1` on `A`, and
//! `f'` has a robust root at levels just below `1` exactly when the sphere
//! map does not extend.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::pl_map::{Norm, PLMap};
use crate::rational::{self, Rational};
use crate::reduction::SphereMap;

/// A rational `kappa` with `|x|_1 <= kappa |x|` on `Q^n`.
pub fn kappa(norm: Norm, n: usize) -> Rational {
    match norm {
        Norm::L1 => rational::int(1),
        Norm::LInf | Norm::L2 => rational::int(n as i64),
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    /// `X` after making `A` full.
    pub f: PLMap,
    pub a: Complex,
}

pub fn fixture_from_extension(x: &Complex, a: &Complex, map: &SphereMap, norm: Norm) -> Result<Fixture> {
    if !a.is_subcomplex_of(x) {
        return Err(Error::NotSubcomplex);
    }
    let full = x.make_full(a)?;
    let n = map.n();
    let k = kappa(norm, n);
    let values: BTreeMap<_, _> = full
        .vertices()
        .map(|v| {
            let y = if a.contains_vertex(v) { map.image(v).to_vector(n, &k) } else { vec![Rational::zero(); n] };
            (v, y)
        })
        .collect();
    let f = PLMap::new(full, n, values)?;
    Ok(Fixture { f, a: a.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::VertexId;
    use crate::pl_map::CriticalValue;

    #[test]
    fn kappa_bounds_l1() {
        let y = [rational::int(3), rational::frac(-1, 2), rational::int(2)];
        let l1 = Norm::L1.of(&y);
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            assert!(norm.of(&y).scale(&kappa(norm, 3)) >= l1);
        }
    }

    #[test]
    fn empty_a_gives_zero_map() {
        let x = Complex::from_ids(&[&[1, 2, 3]]);
        let map = SphereMap::new(Complex::default(), 2, BTreeMap::new()).unwrap();
        let fx = fixture_from_extension(&x, &Complex::default(), &map, Norm::LInf).unwrap();
        assert!(fx.f.values().values().all(|y| y.iter().all(Zero::is_zero)));
    }

    #[test]
    fn hollow_boundary_is_made_full() {
        let x = Complex::from_ids(&[&[1, 2, 3]]);
        let a = Complex::from_ids(&[&[1, 2], &[2, 3], &[1, 3]]);
        let images = [(1, "+e1"), (2, "+e1"), (3, "+e2")].iter().map(|(v, s)| (VertexId(*v), s.parse().unwrap())).collect();
        let map = SphereMap::new(a.clone(), 2, images).unwrap();
        let fx = fixture_from_extension(&x, &a, &map, Norm::LInf).unwrap();
        assert!(fx.f.complex().is_full(&a));
        for s in a.maximal_simplices() {
            assert!(fx.f.simplex_min(&s, Norm::LInf).unwrap().value >= CriticalValue::Rat(rational::int(1)));
        }
    }
}
