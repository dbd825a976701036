//! Del Pezzo line configurations, Weyl group actions and the conic bundle
//! classification of subgroups.

use alloc::string::String;

mod lattice;
mod model;
mod perm;
mod subgroups;
mod weyl;

pub use lattice::{
    classes_with, conic_classes, lines, roots, simple_roots, singular_pairs, span_rank, LineConfiguration, PicClass,
};
pub use model::{table4_model, HeightShape, Table4Model};
pub use perm::{Perm, PermGroup};
pub use subgroups::{
    classify, rho_threshold, subgroup_classes, summarize, theorem11_check, theorem11_consistency, ClassLimits, ClassSummary,
    Classification, InvariantConic, PairOrbit, SubgroupClass, Theorem11Report,
};
pub use weyl::{graph_automorphisms, reflection, weyl_group, weyl_group_from_roots, weyl_group_simple, WeylGroup};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DpError {
    #[error("degree {0} is out of range")]
    InvalidDegree(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("stopped after {completed_layers} completed layers and {classes} classes: {reason}")]
    ResourceLimit { completed_layers: usize, classes: usize, reason: String },
    #[error("counterexample: {0}")]
    Counterexample(String),
}
