//! Chain recurrence, attractors and decomposability for relations on finite metric spaces.
//!
//! A closed relation on a compact space is modelled by a [`Relation`] on the points of a
//! [`FiniteSpace`]; a scale `ε` fixes the tolerance relation used to build `ε`-chains.

pub mod chain;
pub mod error;
pub mod gallery;
pub mod morphisms;
pub mod random;
pub mod relation;
pub mod rng;
pub mod scc;
pub mod set;
pub mod space;
pub mod symmetry;

pub use chain::{chain_relation, AnalysisReport, AttractorRepellorPair, ChainComponents, ChainContext};
pub use error::{Error, Result};
pub use morphisms::{PointExtensionModel, QuotientMap};
pub use relation::{
    compose, cyclic_set, hitting_times, image, inverse, omega_relation, omega_set, orbit, power_limsup, rpm, star,
    LimitSetResult, Relation,
};
pub use set::PointSet;
pub use space::{vbar, FiniteSpace, Metric, SystemModel};
