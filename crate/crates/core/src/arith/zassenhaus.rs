//! Factorization over Z: modular factorization, Hensel lifting, recombination.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::int::is_prime_u64;
use super::modp::{self, FpPoly};
use super::poly::ZPoly;

fn to_fp(f: &ZPoly, p: u64) -> FpPoly {
    let pb = BigInt::from(p);
    FpPoly::new(p, f.0.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect())
}

fn from_fp(f: &FpPoly) -> ZPoly {
    ZPoly::new(f.c.iter().map(|&c| BigInt::from(c)).collect())
}

fn reduce(f: &ZPoly, m: &BigInt) -> ZPoly {
    ZPoly::new(f.0.iter().map(|c| c.mod_floor(m)).collect())
}

fn symmetric(f: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m >> 1;
    ZPoly::new(
        f.0.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn fp_div_exact(a: &FpPoly, b: &FpPoly) -> FpPoly {
    let (q, r) = a.divrem(b);
    debug_assert!(r.is_zero());
    q
}

/// Lifts `f = g h mod p` (g, h monic, coprime mod p) to a factorization mod `p^k`.
fn hensel_pair(f: &ZPoly, g: &FpPoly, h: &FpPoly, k: u32) -> (ZPoly, ZPoly) {
    let p = g.p;
    let pb = BigInt::from(p);
    let (_, s, t) = g.ext_gcd(h);
    debug_assert!(s.mul(g).add(&t.mul(h)) == FpPoly::one(p));
    let mut gg = from_fp(g);
    let mut hh = from_fp(h);
    let mut m = pb.clone();
    for _ in 1..k {
        let diff = f.sub(&gg.mul(&hh));
        let e = ZPoly::new(diff.0.iter().map(|c| c / &m).collect());
        let e = to_fp(&e, p);
        let b = t.mul(&e).rem(g);
        let a = fp_div_exact(&e.sub(&b.mul(h)), g);
        let mut ng = gg.0.clone();
        ng.resize(ng.len().max(b.c.len()), BigInt::zero());
        for (i, &c) in b.c.iter().enumerate() {
            ng[i] += &m * BigInt::from(c);
        }
        let mut nh = hh.0.clone();
        nh.resize(nh.len().max(a.c.len()), BigInt::zero());
        for (i, &c) in a.c.iter().enumerate() {
            nh[i] += &m * BigInt::from(c);
        }
        m *= &pb;
        gg = reduce(&ZPoly::new(ng), &m);
        hh = reduce(&ZPoly::new(nh), &m);
    }
    (gg, hh)
}

fn hensel_multi(f: &ZPoly, factors: &[FpPoly], k: u32) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let m = BigInt::from(factors[0].p).pow(k);
        return vec![reduce(f, &m)];
    }
    let p = factors[0].p;
    let rest = factors[1..].iter().fold(FpPoly::one(p), |a, b| a.mul(b));
    let (g, h) = hensel_pair(f, &factors[0], &rest, k);
    let mut out = vec![g];
    out.extend(hensel_multi(&h, &factors[1..], k));
    out
}

fn coefficient_bound(f: &ZPoly) -> BigInt {
    let n = f.degree().unwrap_or(0);
    let norm = f.0.iter().map(|c| c.abs()).max().unwrap_or_default();
    (BigInt::one() << n) * BigInt::from(n + 1) * norm
}

fn choose_prime(f: &ZPoly) -> (u64, Vec<FpPoly>) {
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut good = 0;
    let mut p = 3u64;
    while good < 6 {
        if is_prime_u64(p) {
            let fp = to_fp(f, p);
            if fp.degree() == f.degree().unwrap() && fp.is_squarefree() {
                good += 1;
                let fs = modp::factor_squarefree(&fp.monic(), p);
                if best.as_ref().is_none_or(|(_, b)| fs.len() < b.len()) {
                    best = Some((p, fs));
                }
                if best.as_ref().unwrap().1.len() == 1 {
                    break;
                }
            }
        }
        p += 2;
    }
    best.unwrap()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Irreducible factors of a monic squarefree integer polynomial.
fn factor_monic(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.degree().unwrap();
    if n <= 1 {
        return vec![f.clone()];
    }
    let (p, modfactors) = choose_prime(f);
    if modfactors.len() == 1 {
        return vec![f.clone()];
    }
    let bound = coefficient_bound(f) * 2;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut m = pb.clone();
    while m <= bound {
        m *= &pb;
        k += 1;
    }
    let mut lifted = hensel_multi(f, &modfactors, k);
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut found = None;
        for idx in subsets(lifted.len(), s) {
            let prod = idx.iter().fold(ZPoly::from_i64(&[1]), |a, &i| reduce(&a.mul(&lifted[i]), &m));
            let cand = symmetric(&prod, &m);
            if let Some(q) = rest.div_exact(&cand) {
                found = Some((idx, cand, q));
                break;
            }
        }
        match found {
            Some((idx, cand, q)) => {
                out.push(cand);
                rest = q;
                for &i in idx.iter().rev() {
                    lifted.remove(i);
                }
            }
            None => s += 1,
        }
    }
    out.push(rest);
    out
}

/// Irreducible factors of a primitive squarefree integer polynomial with positive lead.
pub fn factor_squarefree(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.degree().expect("nonzero polynomial");
    if n <= 1 {
        return vec![f.primitive_part()];
    }
    let l = f.lead();
    let monic = ZPoly::new(
        (0..=n)
            .map(|i| if i == n { BigInt::one() } else { &f.0[i] * l.pow((n - 1 - i) as u32) })
            .collect(),
    );
    let mut out: Vec<ZPoly> = factor_monic(&monic)
        .into_iter()
        .map(|g| {
            let d = g.degree().unwrap();
            ZPoly::new((0..=d).map(|i| &g.0[i] * l.pow(i as u32)).collect()).primitive_part()
        })
        .collect();
    out.sort();
    out
}

/// Squarefree decomposition over Q: pairs `(part, multiplicity)` of primitive integer polynomials.
pub fn squarefree_decomposition(f: &ZPoly) -> Vec<(ZPoly, u32)> {
    let fq = f.to_q();
    let mut out = Vec::new();
    let mut a = fq.gcd(&fq.derivative());
    let mut b = fq.divrem(&a).0;
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let y = a.gcd(&b);
        let z = b.divrem(&y).0;
        if z.degree().unwrap_or(0) > 0 {
            out.push((z.primitive_z(), i));
        }
        b = y;
        a = a.divrem(&b).0;
        i += 1;
    }
    out
}

/// Full factorization of a nonzero primitive polynomial of positive degree over Z.
pub fn factor_zpoly(f: &ZPoly) -> Vec<(ZPoly, u32)> {
    let mut out = Vec::new();
    for (part, mult) in squarefree_decomposition(f) {
        for g in factor_squarefree(&part) {
            out.push((g, mult));
        }
    }
    out.sort();
    out
}
