//! Integer number theory: Jacobi symbols, valuations, primality, factorization.

use alloc::vec::Vec;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ArithError;

/// Trial division limit used before Pollard rho takes over.
pub const TRIAL_LIMIT: u64 = 1_000_000;

/// Number of Miller-Rabin bases used above 64 bits.
pub const MR_ROUNDS_BIG: usize = 40;

/// Jacobi symbol `(a / n)` for odd `n >= 1`.
pub fn jacobi(a: &BigInt, n: &BigInt) -> Result<i8, ArithError> {
    if n.sign() != Sign::Plus || n.is_even() {
        return Err(ArithError::InvalidArgument("jacobi: modulus must be odd and positive".into()));
    }
    if let (Some(a), Some(n)) = (a.to_i128(), n.to_u128()) {
        return Ok(jacobi_i128(a, n));
    }
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1i8;
    let three = BigInt::from(3u8);
    let five = BigInt::from(5u8);
    let eight = BigInt::from(8u8);
    let four = BigInt::from(4u8);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                result = -result;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { result } else { 0 })
}

/// Jacobi symbol on machine integers; `n` must be odd and positive.
pub fn jacobi_i128(a: i128, n: u128) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i128) as u128;
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            result = -result;
        }
        core::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Largest `k` with `p^k | n`.
pub fn valuation(n: &BigInt, p: &BigInt) -> Result<u32, ArithError> {
    if n.is_zero() {
        return Err(ArithError::InfiniteValuation);
    }
    if *p <= BigInt::one() {
        return Err(ArithError::InvalidArgument("valuation: p must be prime".into()));
    }
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return Ok(k);
        }
        n = q;
        k += 1;
    }
}

/// Valuation on machine integers; `n != 0`, `p >= 2`.
pub fn valuation_i128(mut n: i128, p: i128) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

fn mulmod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod64(r, b, m);
        }
        b = mulmod64(b, b, m);
        e >>= 1;
    }
    r
}

fn mr_witness64(n: u64, a: u64) -> bool {
    let d0 = n - 1;
    let s = d0.trailing_zeros();
    let d = d0 >> s;
    let mut x = powmod64(a % n, d, n);
    if x == 1 || x == n - 1 || a.is_multiple_of(n) {
        return false;
    }
    for _ in 1..s {
        x = mulmod64(x, x, n);
        if x == n - 1 {
            return false;
        }
    }
    true
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    ![2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .any(|&a| mr_witness64(n, a))
}

fn small_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if is_prime_u64(c) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Miller-Rabin primality test: exact below 2^64, otherwise
/// [`MR_ROUNDS_BIG`] rounds over the first primes as fixed bases.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(m) = n.to_u64() {
        return is_prime_u64(m);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for a in small_primes(MR_ROUNDS_BIG) {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn rho64(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mulmod64(x, x, n) + c) % n;
    let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
    let mut q = 1u64;
    let mut ys = 2u64;
    let mut r = 1u64;
    while d == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && d == 1 {
            ys = y;
            for _ in 0..core::cmp::min(128, r - k) {
                y = f(y);
                q = mulmod64(q, x.abs_diff(y), n);
            }
            d = q.gcd(&n);
            k += 128;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if d == n {
        loop {
            ys = f(ys);
            d = x.abs_diff(ys).gcd(&n);
            if d > 1 {
                break;
            }
        }
    }
    if d == n {
        None
    } else {
        Some(d)
    }
}

fn rho_big(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut x = BigUint::from(2u8);
    let mut y = x.clone();
    let mut d = BigUint::one();
    let mut steps = 0u64;
    while d.is_one() {
        x = f(&x);
        y = f(&f(&y));
        let diff = if x > y { &x - &y } else { &y - &x };
        d = diff.gcd(n);
        steps += 1;
        if steps > 1 << 24 {
            return None;
        }
    }
    if &d == n {
        None
    } else {
        Some(d)
    }
}

fn split_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let r = n.sqrt();
    if r * r == n {
        split_u64(r, out);
        split_u64(r, out);
        return;
    }
    for c in 1.. {
        if let Some(d) = rho64(n, c) {
            split_u64(d, out);
            split_u64(n / d, out);
            return;
        }
    }
}

fn split_big(n: BigUint, out: &mut Vec<BigUint>) -> Result<(), ArithError> {
    if n.is_one() {
        return Ok(());
    }
    if let Some(m) = n.to_u64() {
        let mut v = Vec::new();
        split_u64(m, &mut v);
        out.extend(v.into_iter().map(BigUint::from));
        return Ok(());
    }
    if is_probable_prime(&n) {
        out.push(n);
        return Ok(());
    }
    let r = n.sqrt();
    if &r * &r == n {
        split_big(r.clone(), out)?;
        return split_big(r, out);
    }
    for c in 1..64u64 {
        if let Some(d) = rho_big(&n, c) {
            let q = &n / &d;
            split_big(d, out)?;
            return split_big(q, out);
        }
    }
    Err(ArithError::Unsupported("factor_integer: Pollard rho did not split the cofactor".into()))
}

/// Prime factorization of `|n|` as sorted `(prime, exponent)` pairs.
pub fn factor_integer(n: &BigInt) -> Result<Vec<(BigInt, u32)>, ArithError> {
    if n.is_zero() {
        return Err(ArithError::InvalidArgument("factor_integer: n = 0".into()));
    }
    let mut m = n.magnitude().clone();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigUint, out: &mut Vec<(BigInt, u32)>| match out.iter_mut().find(|(q, _)| *q.magnitude() == p) {
        Some(e) => e.1 += 1,
        None => out.push((BigInt::from(p), 1)),
    };
    let two = BigUint::from(2u8);
    while m.is_even() {
        m >>= 1;
        push(two.clone(), &mut out);
    }
    let mut p = 3u64;
    while p <= TRIAL_LIMIT && !m.is_one() {
        if let Some(mut small) = m.to_u64() {
            while p <= TRIAL_LIMIT && small > 1 {
                if p.saturating_mul(p) > small {
                    push(BigUint::from(small), &mut out);
                    small = 1;
                    break;
                }
                while small % p == 0 {
                    small /= p;
                    push(BigUint::from(p), &mut out);
                }
                p += 2;
            }
            m = BigUint::from(small);
            break;
        }
        let batch = p * (p + 2) * (p + 4);
        let r = (&m % batch).to_u64().unwrap();
        for q in [p, p + 2, p + 4] {
            if r.is_multiple_of(q) {
                while (&m % q).is_zero() {
                    m /= q;
                    push(BigUint::from(q), &mut out);
                }
            }
        }
        p += 6;
    }
    let mut rest = Vec::new();
    split_big(m, &mut rest)?;
    for q in rest {
        push(q, &mut out);
    }
    out.sort();
    Ok(out)
}

/// Distinct prime divisors of a nonzero integer.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<BigInt>, ArithError> {
    Ok(factor_integer(n)?.into_iter().map(|(p, _)| p).collect())
}

/// Integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Integer square root on `i128` when `n` is a perfect square.
pub fn exact_sqrt_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as u128).sqrt() as i128;
    if r * r == n {
        Some(r)
    } else {
        None
    }
}

/// Extended gcd on `i128`: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// A square root of `a` modulo an odd prime `p`, if one exists (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(a);
    }
    let one = BigInt::one();
    let pm1 = p - &one;
    if a.modpow(&(&pm1 >> 1), p) != one {
        return None;
    }
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while z.modpow(&(&pm1 >> 1), p) == one {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1) >> 1), p);
    while t != one {
        let mut i = 0u32;
        let mut t2 = t.clone();
        while t2 != one {
            t2 = &t2 * &t2 % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = &b * &b % p;
        t = t * &c % p;
        r = r * b % p;
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn euler(a: i64, p: i64) -> i8 {
        let r = powmod64(a.rem_euclid(p) as u64, ((p - 1) / 2) as u64, p as u64);
        match r {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    #[test]
    fn square_roots_mod_prime() {
        for p in [3i64, 5, 13, 17, 1_000_003] {
            let pb = big(p);
            for a in 0..40i64 {
                let r = sqrt_mod_prime(&big(a), &pb);
                if let Some(r) = &r {
                    assert_eq!((r * r - big(a)).mod_floor(&pb), BigInt::zero());
                }
                assert_eq!(r.is_some(), jacobi(&big(a), &pb).unwrap() >= 0);
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(&big(1), &big(15)).unwrap(), 1);
        assert_eq!(jacobi(&big(2), &big(15)).unwrap(), 1);
        assert_eq!(euler(2, 3) * euler(2, 5), 1);
        assert!(jacobi(&big(3), &big(8)).is_err());
        assert!(jacobi(&big(3), &big(-3)).is_err());
        assert_eq!(jacobi(&big(6), &big(9)).unwrap(), 0);
    }

    #[test]
    fn jacobi_matches_euler() {
        let primes = [3i64, 5, 7, 11, 13, 101, 997, 7919, 104729];
        let mut a = 12345i64;
        for i in 0..50 {
            a = (a * 1103515245 + 12345) % 2147483647;
            let p = primes[i % primes.len()];
            assert_eq!(jacobi(&big(a - 1_000_000), &big(p)).unwrap(), euler(a - 1_000_000, p));
        }
    }

    #[test]
    fn jacobi_big_path() {
        let p = BigInt::parse_bytes(b"170141183460469231731687303715884105727", 10).unwrap();
        let n = &p * &p * BigInt::from(7);
        let a = BigInt::from(3);
        let direct = jacobi(&a, &n).unwrap();
        assert_eq!(direct, jacobi(&a, &BigInt::from(7)).unwrap());
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor_integer(&big(12)).unwrap(), vec![(big(2), 2), (big(3), 1)]);
        assert!(factor_integer(&big(-1)).unwrap().is_empty());
        assert!(factor_integer(&big(0)).is_err());
        let p = 4_294_967_291i64;
        let q = 4_294_967_279i64;
        let f = factor_integer(&(big(p) * big(q))).unwrap();
        assert_eq!(f, vec![(big(q), 1), (big(p), 1)]);
    }

    #[test]
    fn factor_large_semiprime() {
        let p = BigInt::from(1_000_000_000_039u64);
        let q = BigInt::from(2_305_843_009_213_693_951u64);
        let f = factor_integer(&(&p * &q * 9)).unwrap();
        assert_eq!(f, vec![(big(3), 2), (p, 1), (q, 1)]);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&big(12), &big(2)).unwrap(), 2);
        assert_eq!(valuation(&big(12), &big(5)).unwrap(), 0);
        assert_eq!(valuation(&big(0), &big(5)), Err(ArithError::InfiniteValuation));
        assert_eq!(valuation(&(big(7).pow(5) * 11), &big(7)).unwrap(), 5);
    }
}
