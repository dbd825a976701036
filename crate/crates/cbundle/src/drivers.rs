//! Data-parallel sums over base points. Results are merged in base point
//! order, so they do not depend on the number of workers.

use cbundle_core::bundle::{BundleSurface, FibreReport};
use cbundle_core::count::{
    admissibility_check, base_points, detector_r, exact_sum, fibre_count, fibre_cutoff, fibre_density, region_points,
    CountConfig, CountError,
};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::CliError;

pub fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))
}

/// `N(B)` over fibres with `max(|s|, |t|) ≤ B^base_exponent`.
pub fn count_nb(surface: &BundleSurface, cfg: &CountConfig, b: u64) -> Result<u64, CountError> {
    let pts = base_points(fibre_cutoff(b, cfg.base_exponent));
    let counts: Vec<u64> = pts.par_iter().map(|&(s, t)| fibre_count(surface, &cfg.exclude, s, t, b)).collect::<Result<_, _>>()?;
    Ok(counts.iter().sum())
}

fn detector_terms(fibres: &[FibreReport], cfg: &CountConfig, b: u64) -> Result<Vec<BigRational>, CountError> {
    if let Some(v) = admissibility_check(fibres, cfg, 0).violations.first() {
        return Err(CountError::Inadmissible(v.to_string()));
    }
    region_points(cfg, b).par_iter().map(|&(s, t)| detector_r(fibres, s, t, &cfg.w).map(|v| v.r)).collect()
}

/// `D(B)`, exact. The common denominator grows with every new prime, so this
/// is only practical for small `B`.
pub fn divisor_sum_d(fibres: &[FibreReport], cfg: &CountConfig, b: u64) -> Result<BigRational, CountError> {
    Ok(exact_sum(detector_terms(fibres, cfg, b)?))
}

/// `D(B)` with exact summands added in floating point, in base point order.
pub fn divisor_sum_d_f64(fibres: &[FibreReport], cfg: &CountConfig, b: u64) -> Result<f64, CountError> {
    Ok(detector_terms(fibres, cfg, b)?.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).sum())
}

/// `𝔖` over base points with `max(|s|, |t|) ≤ cutoff`.
pub fn density_sum(surface: &BundleSurface, cutoff: u64, p_max: u64, quad_steps: usize) -> Result<f64, CountError> {
    let terms: Vec<f64> = base_points(cutoff)
        .par_iter()
        .map(|&(s, t)| fibre_density(surface, s, t, p_max, quad_steps))
        .collect::<Result<_, _>>()?;
    Ok(terms.iter().sum())
}
