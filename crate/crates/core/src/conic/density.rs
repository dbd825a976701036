//! Local densities `σ_p`: a Hensel-lifting counting oracle and the closed form
//! for odd primes where the reduction has rank at least 2.

use alloc::collections::BTreeMap;
use alloc::format;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{chi_p, check_odd_prime, disc_ternary, rank_mod_p, ConicError, TernaryQuadraticForm};
use crate::arith::int::{is_prime_u64, valuation};

/// Deepest modulus exponent the oracle accepts.
pub const MAX_ORACLE_DEPTH: u32 = 60;

/// Extra depth tried by [`local_density`] when waiting for the oracle to stabilize.
pub const MAX_STABILIZE_STEPS: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityMethod {
    ClosedForm,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDensityReport {
    pub p: u64,
    pub sigma: BigRational,
    pub method: DensityMethod,
    pub chi: Option<i8>,
    pub v_delta: u32,
}

struct Oracle {
    p: i128,
    q: [i128; 6],
    memo: BTreeMap<([i128; 3], i128, u32), BigUint>,
}

impl Oracle {
    /// Solutions mod `p^k` of `Q(y) + l·y + c ≡ 0`; `primitive` drops `y ≡ 0 mod p`.
    fn count(&mut self, lin: [i128; 3], cst: i128, k: u32, primitive: bool) -> BigUint {
        if k == 0 {
            return BigUint::one();
        }
        let pk = self.p.pow(k);
        let lin = lin.map(|x| x.rem_euclid(pk));
        let cst = cst.rem_euclid(pk);
        let key = (lin, cst, k);
        if !primitive {
            if let Some(v) = self.memo.get(&key) {
                return v.clone();
            }
        }
        let p = self.p;
        let [a, b, c, d, e, f] = self.q;
        let lift = BigUint::from(p as u128).pow(2 * (k - 1));
        let cube = BigUint::from(p as u128).pow(3);
        let mut total = BigUint::zero();
        for y0 in 0..p {
            for y1 in 0..p {
                for y2 in 0..p {
                    if primitive && y0 == 0 && y1 == 0 && y2 == 0 {
                        continue;
                    }
                    let val = a * y0 * y0 + b * y0 * y1 + c * y1 * y1 + d * y0 * y2 + e * y1 * y2 + f * y2 * y2
                        + lin[0] * y0
                        + lin[1] * y1
                        + lin[2] * y2
                        + cst;
                    if val % p != 0 {
                        continue;
                    }
                    let g = [
                        2 * a * y0 + b * y1 + d * y2 + lin[0],
                        b * y0 + 2 * c * y1 + e * y2 + lin[1],
                        d * y0 + e * y1 + 2 * f * y2 + lin[2],
                    ];
                    if g.iter().any(|x| x % p != 0) {
                        total += &lift;
                    } else if k == 1 {
                        total += 1u32;
                    } else if val % (p * p) == 0 {
                        let sub = self.count(g.map(|x| x / p), val / (p * p), k - 2, false);
                        total += &cube * sub;
                    }
                }
            }
        }
        if !primitive {
            self.memo.insert(key, total.clone());
        }
        total
    }
}

/// `N*(p^n) / p^{2n}` where `N*` counts primitive solutions of `Q ≡ 0 mod p^n`.
pub fn sigma_p_oracle(q: &TernaryQuadraticForm, p: u64, n: u32) -> Result<BigRational, ConicError> {
    if !is_prime_u64(p) {
        return Err(ConicError::InvalidArgument(format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(ConicError::InvalidArgument("oracle depth must be at least 1".into()));
    }
    let bits = 64 - p.leading_zeros();
    if n > MAX_ORACLE_DEPTH || bits * n > 60 {
        return Err(ConicError::ResourceLimit(format!("oracle depth {n} too large for p = {p}")));
    }
    let pn = BigInt::from(p).pow(n);
    let coeffs = q.coeffs().map(|c| c.mod_floor(&pn).to_i128().unwrap());
    let mut oracle = Oracle { p: p as i128, q: coeffs, memo: BTreeMap::new() };
    let count = oracle.count([0; 3], 0, n, true);
    Ok(BigRational::new(BigInt::from(count), BigInt::from(p).pow(2 * n)))
}

fn closed_rank_two(p: u64, chi: i8, v: u32) -> BigRational {
    let one = BigRational::one();
    let pr = BigRational::from_integer(BigInt::from(p));
    let chi = BigRational::from_integer(BigInt::from(chi));
    let r = &one - pr.recip();
    let unit_z = |w: u32| -> BigRational {
        let mut acc = BigRational::zero();
        let mut w = w;
        loop {
            if w == 0 {
                return acc + &r * (&one - &chi / &pr);
            }
            acc += &r * &r * (&one + &chi);
            if w < 2 {
                return acc;
            }
            w -= 2;
        }
    };
    let mut sigma = &r * (&one + &chi);
    if v >= 2 {
        sigma += unit_z(v - 2);
    }
    sigma
}

/// Exact `σ_p` for odd `p` when `Q` has rank 2 or 3 modulo `p`.
pub fn sigma_p_closed(q: &TernaryQuadraticForm, p: u64) -> Result<LocalDensityReport, ConicError> {
    if p == 2 {
        return Err(ConicError::UseOracle("p = 2".into()));
    }
    check_odd_prime(p)?;
    let delta = disc_ternary(q);
    if delta.is_zero() {
        return Err(ConicError::InvalidArgument("degenerate form".into()));
    }
    let v = valuation(&delta, &BigInt::from(p))?;
    match rank_mod_p(q, p)? {
        3 => {
            let pr = BigRational::from_integer(BigInt::from(p));
            let sigma = BigRational::one() - (&pr * &pr).recip();
            Ok(LocalDensityReport { p, sigma, method: DensityMethod::ClosedForm, chi: None, v_delta: v })
        }
        2 => {
            let chi = chi_p(q, p)?;
            let sigma = closed_rank_two(p, chi, v);
            Ok(LocalDensityReport { p, sigma, method: DensityMethod::ClosedForm, chi: Some(chi), v_delta: v })
        }
        r => Err(ConicError::UseOracle(format!("rank {r} modulo {p}"))),
    }
}

/// `σ_p` by the closed form where it applies, by the oracle otherwise.
pub fn local_density(q: &TernaryQuadraticForm, p: u64) -> Result<LocalDensityReport, ConicError> {
    let delta = disc_ternary(q);
    if delta.is_zero() {
        return Err(ConicError::InvalidArgument("degenerate form".into()));
    }
    let v = valuation(&delta, &BigInt::from(p))?;
    if p == 2 {
        let sigma = sigma_p_oracle(q, p, v + 3)?;
        return Ok(LocalDensityReport { p, sigma, method: DensityMethod::Oracle, chi: None, v_delta: v });
    }
    match sigma_p_closed(q, p) {
        Err(ConicError::UseOracle(_)) => {}
        other => return other,
    }
    let mut n = v + 1;
    let mut prev = sigma_p_oracle(q, p, n)?;
    for _ in 0..MAX_STABILIZE_STEPS {
        n += 1;
        let next = sigma_p_oracle(q, p, n)?;
        if next == prev {
            return Ok(LocalDensityReport { p, sigma: next, method: DensityMethod::Oracle, chi: None, v_delta: v });
        }
        prev = next;
    }
    Err(ConicError::ResourceLimit(format!("oracle for p = {p} did not stabilize by depth {n}")))
}
