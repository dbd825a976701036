//! Flat parts, the weight `1_f` and the detector `r(s, t)`.

use alloc::format;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::CountError;
use crate::arith::{factor_integer, jacobi};
use crate::bundle::FibreReport;

/// `∏_{p ∤ w} p^{v_p(n)}`.
pub fn flat_part(n: &BigInt, w: &BigInt) -> Result<BigInt, CountError> {
    if n.is_zero() {
        return Err(CountError::InvalidArgument("flat part of zero".into()));
    }
    if !w.is_positive() {
        return Err(CountError::InvalidArgument(format!("modulus {w} is not positive")));
    }
    let mut m = n.abs();
    let mut g = m.gcd(w);
    while !g.is_one() {
        m /= &g;
        g = m.gcd(&g);
    }
    Ok(m)
}

/// `∏_{p | n, p odd} (1 − 2/p)`.
pub fn one_f(n: &BigInt) -> Result<BigRational, CountError> {
    if !n.is_positive() {
        return Err(CountError::InvalidArgument(format!("1_f of non-positive {n}")));
    }
    let two = BigInt::from(2);
    let mut acc = BigRational::one();
    for (p, _) in factor_integer(n)? {
        if p != two {
            acc *= BigRational::new(&p - &two, p);
        }
    }
    Ok(acc)
}

/// `Σ_{d | n} (a / d)` for odd positive `n`, via the factorization of `n`.
pub fn divisor_symbol_sum(a: &BigInt, n: &BigInt) -> Result<BigInt, CountError> {
    if !n.is_positive() || n.is_even() {
        return Err(CountError::InvalidArgument(format!("{n} is not an odd positive integer")));
    }
    let mut acc = BigInt::one();
    for (p, k) in factor_integer(n)? {
        let local = match jacobi(a, &p)? {
            1 => BigInt::from(k + 1),
            0 => BigInt::one(),
            _ => BigInt::from(u32::from(k % 2 == 0)),
        };
        acc *= local;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorTerm {
    /// `Δ_p(s, t)`.
    pub value: BigInt,
    pub flat: BigInt,
    pub one_f: BigRational,
    /// `Σ_{d | flat} (δ_p(s, t) / d)`.
    pub divisor_sum: BigInt,
}

impl FactorTerm {
    pub fn contribution(&self) -> BigRational {
        &self.one_f * BigRational::from_integer(self.divisor_sum.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectorValue {
    pub s: i64,
    pub t: i64,
    pub r: BigRational,
    pub per_factor: Vec<FactorTerm>,
}

/// `r(s, t) = ∏_p 1_f(Δ_p(s,t)^♭) Σ_{d | Δ_p(s,t)^♭} (δ_p(s,t) / d)`.
pub fn detector_r(fibres: &[FibreReport], s: i64, t: i64, w: &BigInt) -> Result<DetectorValue, CountError> {
    if w.is_odd() {
        return Err(CountError::InvalidArgument(format!("modulus {w} is odd")));
    }
    if !BigInt::from(s).gcd(&BigInt::from(t)).is_one() {
        return Err(CountError::InvalidArgument(format!("({s}, {t}) is not coprime")));
    }
    let (sb, tb) = (BigInt::from(s), BigInt::from(t));
    let mut r = BigRational::one();
    let mut per_factor = Vec::with_capacity(fibres.len());
    for (i, rep) in fibres.iter().enumerate() {
        let value = rep.factor.eval(&sb, &tb);
        if value.is_zero() {
            return Err(CountError::Excluded { s, t, factor: i });
        }
        let flat = flat_part(&value, w)?;
        let delta = rep.delta.eval(&sb, &tb);
        let term = FactorTerm { one_f: one_f(&flat)?, divisor_sum: divisor_symbol_sum(&delta, &flat)?, value, flat };
        r *= term.contribution();
        per_factor.push(term);
    }
    Ok(DetectorValue { s, t, r, per_factor })
}
