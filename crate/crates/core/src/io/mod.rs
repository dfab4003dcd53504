//! File formats, grid triangulations, polynomial sampling and fixtures.

pub mod fixture;
pub mod grid;
pub mod instance;
pub mod poly;

pub use fixture::{fixture_from_extension, kappa, Fixture};
pub use grid::{freudenthal_grid, Grid};
pub use instance::{ExtensionFile, ExtensionProblem, Instance, InstanceFile};
pub use poly::{decide_sampled, sample_polynomial, Polynomial, SampledMap, SampledVerdict};
