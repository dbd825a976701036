//! Dense univariate polynomials over Z and Q, coefficients in ascending order.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial with integer coefficients, `c[i]` multiplies `x^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZPoly(pub Vec<BigInt>);

/// Polynomial with rational coefficients, `c[i]` multiplies `x^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly(pub Vec<BigRational>);

fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

impl ZPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        trim(&mut c);
        ZPoly(c)
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        ZPoly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigInt {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> ZPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        ZPoly(self.0.iter().map(|c| c / &g).collect())
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] -= b;
        }
        ZPoly::new(out)
    }

    pub fn derivative(&self) -> ZPoly {
        ZPoly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn to_q(&self) -> QPoly {
        QPoly(self.0.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Exact quotient `self / d` over Z, if it exists.
    pub fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        let (q, r) = self.to_q().divrem(&d.to_q());
        if !r.is_zero() {
            return None;
        }
        q.to_z()
    }
}

impl QPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        trim(&mut c);
        QPoly(c)
    }

    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn one() -> Self {
        QPoly(vec![BigRational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Integer polynomial if every coefficient is integral.
    pub fn to_z(&self) -> Option<ZPoly> {
        if self.0.iter().all(|c| c.is_integer()) {
            Some(ZPoly::new(self.0.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }

    /// Clears denominators and returns the primitive integer polynomial with positive lead.
    pub fn primitive_z(&self) -> ZPoly {
        let l = self.0.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        ZPoly::new(self.0.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect())
            .primitive_part()
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        QPoly(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] += b;
        }
        QPoly::new(out)
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] -= b;
        }
        QPoly::new(out)
    }

    pub fn scale(&self, k: &BigRational) -> QPoly {
        QPoly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.0.len() - 1;
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (QPoly::zero(), QPoly::new(r));
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        let lead = d.lead();
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (QPoly::new(q), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn ext_gcd(&self, other: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (QPoly::one(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = BigRational::one() / r0.lead();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}
