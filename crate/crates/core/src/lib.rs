//! Exact decision procedures for robust satisfiability of piecewise-linear
//! systems of equations `f = 0` on finite simplicial complexes.
//!
//! A PL map `f: |K| -> Q^n` has an `alpha`-robust root when every continuous
//! `g` with `||g - f|| <= alpha` has a root. The question is reduced to an
//! extension problem for a simplicial map into the boundary of the
//! cross-polytope, which is then settled with integer linear algebra.
//!
//! Module map:
//! - [`complex`]: abstract simplicial complexes with subdivision lineage.
//! - [`pl_map`]: PL maps, norms, exact per-simplex minimisation.
//! - [`reduction`]: the level-set pair `(X, A)` and the sphere-valued approximation.
//! - [`homotopy`]: extendability of maps into spheres, degrees, cocycles.
//! - [`integer`]: integer matrices and exact Diophantine solving.
//! - [`robsat`]: verdicts, robustness values, localisation, inequalities.
//! - [`io`]: instance files, grids, polynomial sampling, fixture generation.
//! - [`oracles`]: brute-force cross-checks and perturbation witnesses.

pub mod complex;
pub mod error;
pub mod homotopy;
pub mod integer;
pub mod io;
mod lp;
pub mod oracles;
pub mod pl_map;
pub mod rational;
pub mod reduction;
pub mod robsat;

pub use complex::{BaryPoint, Complex, IntCochain, OrientedSimplex, Simplex, VertexId};
pub use error::{Error, Result};
pub use homotopy::{DeciderOptions, ExtendVerdict};
pub use pl_map::{CriticalValue, Norm, PLMap};
pub use rational::Rational;
pub use reduction::{LevelPair, SphereMap, SphereVertex};
pub use robsat::{RobVerdict, RobustnessResult};
