//! The real density `ω_∞` and the truncated adelic product.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::density::local_density;
use super::{diagonalize_rat, disc_ternary, is_soluble, rat_f64, ConicError, HeightSpec, TernaryQuadraticForm};

#[derive(Clone, Debug, PartialEq)]
pub struct PeyreProduct {
    pub omega_inf: f64,
    /// `∏_{p ≤ p_max} (1 − 1/p) σ_p`.
    pub finite: BigRational,
    pub value: f64,
    /// Mass dropped near chart boundaries; the global parametrization drops none.
    pub discarded_mass: f64,
}

/// `∫ |det(γ, γ', ∇Q(γ))| / (|∇Q(γ)|² H(γ)) dφ` over a global real
/// parametrization `γ` of the conic, by the composite midpoint rule.
pub fn omega_inf(q: &TernaryQuadraticForm, h: &HeightSpec, steps: usize) -> Result<f64, ConicError> {
    if !q.is_nondegenerate() {
        return Err(ConicError::InvalidArgument("degenerate form".into()));
    }
    if steps == 0 {
        return Err(ConicError::InvalidArgument("quadrature needs at least one panel".into()));
    }
    let (d, p) = diagonalize_rat(q);
    let pos: Vec<usize> = (0..3).filter(|&i| d[i].is_positive()).collect();
    let odd = match pos.len() {
        1 => pos[0],
        2 => (0..3).find(|i| !pos.contains(i)).unwrap(),
        _ => return Ok(0.0),
    };
    let (i, j) = match odd {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let scale = d.clone().map(|x| 1.0 / libm::sqrt(rat_f64(&x.abs())));
    let pf: [[f64; 3]; 3] = p.clone().map(|r| r.map(|x| rat_f64(&x)));
    let hess: [[f64; 3]; 3] = q.hessian().map(|r| r.map(|x| rat_f64(&BigRational::from_integer(x))));
    let apply = |m: &[[f64; 3]; 3], v: &[f64; 3]| -> [f64; 3] { core::array::from_fn(|r| (0..3).map(|k| m[r][k] * v[k]).sum()) };
    let width = 2.0 * PI / steps as f64;
    let mut total = 0.0;
    for n in 0..steps {
        let phi = (n as f64 + 0.5) * width;
        let (s, c) = (libm::sin(phi), libm::cos(phi));
        let mut y = [0.0; 3];
        let mut dy = [0.0; 3];
        y[i] = c * scale[i];
        y[j] = s * scale[j];
        y[odd] = scale[odd];
        dy[i] = -s * scale[i];
        dy[j] = c * scale[j];
        let g = apply(&pf, &y);
        let dg = apply(&pf, &dy);
        let grad = apply(&hess, &g);
        let det = g[0] * (dg[1] * grad[2] - dg[2] * grad[1]) - g[1] * (dg[0] * grad[2] - dg[2] * grad[0])
            + g[2] * (dg[0] * grad[1] - dg[1] * grad[0]);
        let norm2: f64 = grad.iter().map(|x| x * x).sum();
        total += libm::fabs(det) / (norm2 * h.height_f64(&g));
    }
    Ok(total * width)
}

/// Primes up to `n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = alloc::vec![true; n as usize + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n as usize {
        if sieve[i] {
            let mut k = i * i;
            while k <= n as usize {
                sieve[k] = false;
                k += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k as usize]).collect()
}

/// `ω_∞ · ∏_{p ≤ p_max} (1 − 1/p) σ_p`, without any global normalizing constant.
pub fn peyre_product(q: &TernaryQuadraticForm, h: &HeightSpec, p_max: u64, quad_steps: usize) -> Result<PeyreProduct, ConicError> {
    let zero = PeyreProduct { omega_inf: 0.0, finite: BigRational::zero(), value: 0.0, discarded_mass: 0.0 };
    if !is_soluble(q)? {
        return Ok(zero);
    }
    let delta = disc_ternary(q);
    let mut finite = BigRational::one();
    for p in primes_up_to(p_max) {
        let pb = BigInt::from(p);
        let local_factor = BigRational::new(BigInt::from(p - 1), pb.clone());
        let sigma = if p != 2 && !delta.is_multiple_of(&pb) {
            BigRational::one() - BigRational::new(BigInt::one(), &pb * &pb)
        } else {
            local_density(q, p)?.sigma
        };
        finite *= local_factor * sigma;
    }
    let omega = omega_inf(q, h, quad_steps)?;
    let value = omega * rat_f64(&finite);
    Ok(PeyreProduct { omega_inf: omega, finite, value, discarded_mass: 0.0 })
}
