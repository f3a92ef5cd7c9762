//! Polyhedral geometry and set-valued martingale tooling.
//!
//! The crate is organised bottom-up:
//!
//! - [`geom`]: vectors, polytopes in vertex form, support functions, nearest-point
//!   distances, Hausdorff distances, Minkowski averages and 2D hulls.
//! - [`fan`]: normal cones, normal fans, the linear-dependence coefficients of
//!   adjacent maximal cones, type cones and the deterministic-fan test.
//! - [`tree`]: finite filtered probability spaces with exact conditional
//!   expectations of vector- and polytope-valued random variables.
//! - [`mc`]: reproducible Brownian drivers, trajectory integrals and the
//!   random-triangle experiment.
//!
//! Every operation is a pure function of its inputs.

pub mod error;
pub mod fan;
pub mod geom;
pub mod mc;
pub mod tree;

pub use error::{Error, Result};
pub use fan::{Cone, Fan, TypeCone};
pub use geom::{DirectionGrid, Polytope, Vector};
pub use mc::{PathEnsemble, PolytopeTrajectory};
pub use tree::{ScenarioTree, TreePolytopeProcess, TreeVectorRV};

/// Library version string, echoed into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
