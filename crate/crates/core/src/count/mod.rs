//! Fibrewise point counts, the density sum and the detector divisor sum.
//!
//! Over Q the base ring is Z, so `𝔯 = (1)` and the fundamental domain for the
//! units `±1` is sign normalization: the first nonzero coordinate of a base
//! point is positive.

use alloc::string::String;

use crate::arith::ArithError;
use crate::bundle::BundleError;
use crate::conic::ConicError;

mod config;
mod detector;
mod sums;

pub use config::{
    admissibility_check, bad_primes, build_admissible_config, AdmissibilityReport, Condition, CountConfig, HorizontalCurve, Region,
    Violation,
};
pub use detector::{detector_r, divisor_symbol_sum, flat_part, one_f, DetectorValue, FactorTerm};
pub use sums::{
    base_points, count_nb, density_sum_sb, divisor_sum_d, exact_sum, fibre_count, fibre_cutoff, fibre_density, fibre_height,
    region_points,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("excluded point ({s}, {t}): factor {factor} of the discriminant vanishes")]
    Excluded { s: i64, t: i64, factor: usize },
    #[error("invalid base point: {0}")]
    InvalidBasePoint(String),
    #[error("inadmissible configuration: {0}")]
    Inadmissible(String),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Conic(#[from] ConicError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}
