//! Polynomials over a prime field F_p with word-sized p.

use alloc::vec;
use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Dense polynomial over F_p, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => {
                let inv = inv_mod(l, self.p);
                FpPoly::new(self.p, self.c.iter().map(|&x| mulmod(x, inv, self.p)).collect())
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut out = vec![0u64; n];
        for (i, x) in out.iter_mut().enumerate() {
            *x = (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % self.p;
        }
        FpPoly::new(self.p, out)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut out = vec![0u64; n];
        for (i, x) in out.iter_mut().enumerate() {
            *x = (self.c.get(i).copied().unwrap_or(0) + self.p - o.c.get(i).copied().unwrap_or(0)) % self.p;
        }
        FpPoly::new(self.p, out)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(a, b, self.p)) % self.p;
            }
        }
        FpPoly::new(self.p, out)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial mod p");
        let p = self.p;
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = inv_mod(*d.c.last().unwrap(), p);
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = mulmod(r[k + dd], inv, p);
            if c != 0 {
                for (j, &dj) in d.c.iter().enumerate() {
                    r[k + j] = (r[k + j] + p - mulmod(c, dj, p)) % p;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s self + t o = g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (FpPoly::one(p), FpPoly::zero(p));
        let (mut t0, mut t1) = (FpPoly::zero(p), FpPoly::one(p));
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
        let inv = inv_mod(*r0.c.last().unwrap_or(&1), p);
        let sc = |f: &FpPoly| FpPoly::new(p, f.c.iter().map(|&x| mulmod(x, inv, p)).collect());
        (sc(&r0), sc(&s0), sc(&t0))
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        FpPoly::new(p, self.c.iter().enumerate().skip(1).map(|(i, &x)| mulmod(x, i as u64 % p, p)).collect())
    }

    /// `self^e mod m`.
    pub fn powmod(&self, mut e: u64, m: &Self) -> Self {
        let mut r = FpPoly::one(self.p).rem(m);
        let mut b = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b).rem(m);
            }
            b = b.mul(&b).rem(m);
            e >>= 1;
        }
        r
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial.
pub fn ddf(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = FpPoly::x(p);
    let mut h = x.clone();
    let mut d = 0;
    while f.degree() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(p, &f);
        let g = h.sub(&x).gcd(&f);
        if g.degree() > 0 {
            f = f.divrem(&g).0;
            h = h.rem(&f);
            out.push((g, d));
        }
    }
    if f.degree() > 0 {
        let deg = f.degree();
        out.push((f.monic(), deg));
    }
    out
}

/// Equal-degree splitting (Cantor-Zassenhaus) for odd p.
pub fn edf(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let p = f.p;
    let n = f.degree();
    if n == d {
        return vec![f.monic()];
    }
    loop {
        let a = FpPoly::new(p, (0..n).map(|_| rng.next_u64() % p).collect());
        if a.degree() == 0 {
            continue;
        }
        let mut frob = a.rem(f);
        let mut norm = frob.clone();
        for _ in 1..d {
            frob = frob.powmod(p, f);
            norm = norm.mul(&frob).rem(f);
        }
        let b = norm.powmod((p - 1) / 2, f).sub(&FpPoly::one(p));
        let g = b.gcd(f);
        if g.degree() > 0 && g.degree() < n {
            let h = f.divrem(&g).0;
            let mut out = edf(&g, d, rng);
            out.extend(edf(&h.monic(), d, rng));
            return out;
        }
    }
}

/// Complete factorization of a monic squarefree polynomial over F_p, p odd.
pub fn factor_squarefree(f: &FpPoly, seed: u64) -> Vec<FpPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (g, d) in ddf(f) {
        out.extend(edf(&g, d, &mut rng));
    }
    out.sort_by(|a, b| (a.degree(), &a.c).cmp(&(b.degree(), &b.c)));
    out
}
