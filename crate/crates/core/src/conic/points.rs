//! Rational points: small-point search, Legendre descent, unimodular
//! completion, and exact height-bounded counting through a parametrization.

use alloc::format;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{canonical, describe, diagonalize_rat, is_soluble, squarefree_diagonal, rat_f64, ConicError, HeightSpec, Mat3, RatMat3, TernaryQuadraticForm};
use super::region::{for_each_in_region, Qf, RegionHull};
use crate::arith::int::{exact_sqrt, exact_sqrt_i128, factor_integer, sqrt_mod_prime};

/// Box radius multiplier in [`find_point`]: radius `32·‖Q‖^5`.
pub const SEARCH_CONSTANT: u32 = 32;

/// Radius of the quick search tried by [`rational_point`] before descent.
pub const QUICK_SEARCH_RADIUS: i128 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCount {
    pub count: u64,
    pub soluble: bool,
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

fn max_norm(x: &[BigInt; 3]) -> BigInt {
    x.iter().map(|c| c.abs()).max().unwrap()
}

/// Nonzero solutions with all coordinates in `[-r, r]`.
fn box_points(q: &[i128; 6], r: i128) -> Vec<[i128; 3]> {
    let [a, b, c, d, e, f] = *q;
    let mut out = Vec::new();
    let mut push = |x0: i128, x1: i128, x2: i128| {
        if x2.abs() <= r && (x0, x1, x2) != (0, 0, 0) {
            out.push([x0, x1, x2]);
        }
    };
    for x0 in -r..=r {
        for x1 in -r..=r {
            let l = d * x0 + e * x1;
            let k = a * x0 * x0 + b * x0 * x1 + c * x1 * x1;
            if f != 0 {
                let disc = l * l - 4 * f * k;
                let Some(s) = exact_sqrt_i128(disc) else { continue };
                for num in [-l + s, -l - s] {
                    if num % (2 * f) == 0 {
                        push(x0, x1, num / (2 * f));
                    }
                }
            } else if l != 0 {
                if k % l == 0 {
                    push(x0, x1, -k / l);
                }
            } else if k == 0 {
                for x2 in -r..=r {
                    push(x0, x1, x2);
                }
            }
        }
    }
    out
}

fn best_in_box(q: &[i128; 6], r: i128) -> Option<[BigInt; 3]> {
    box_points(q, r)
        .into_iter()
        .map(|x| canonical(&x.map(BigInt::from)))
        .min_by(|x, y| max_norm(x).cmp(&max_norm(y)).then_with(|| x.cmp(y)))
}

fn small_coeffs(q: &TernaryQuadraticForm) -> Result<[i128; 6], ConicError> {
    let c = q.to_i128().ok_or_else(|| ConicError::ResourceLimit("coefficients exceed 128 bits".into()))?;
    if c.iter().any(|x| x.abs() > 1i128 << 40) {
        return Err(ConicError::ResourceLimit("coefficients too large for box search".into()));
    }
    Ok(c)
}

/// Smallest-height canonical solution by exhaustive box search, ties broken
/// lexicographically; `None` when the conic has no rational point.
pub fn find_point(q: &TernaryQuadraticForm) -> Result<Option<[BigInt; 3]>, ConicError> {
    if !is_soluble(q)? {
        return Ok(None);
    }
    let c = small_coeffs(q)?;
    let cap = BigInt::from(SEARCH_CONSTANT) * q.norm().pow(5);
    let mut r: i128 = 1;
    loop {
        if let Some(x) = best_in_box(&c, r) {
            return Ok(Some(x));
        }
        if BigInt::from(r) >= cap {
            return Err(ConicError::Internal(format!("no point in box of radius {cap} for soluble form {q}")));
        }
        r = (2 * r).min(cap.to_i128().unwrap_or(i128::MAX));
    }
}

/// Prime factors of `n`, from `hint` when it covers them.
fn primes_of(n: &BigInt, hint: Option<&[BigInt]>) -> Result<Vec<BigInt>, ConicError> {
    if let Some(h) = hint {
        let mut rest = n.abs();
        let mut out = Vec::new();
        for p in h {
            if rest.is_multiple_of(p) {
                out.push(p.clone());
                while rest.is_multiple_of(p) {
                    rest /= p;
                }
            }
        }
        if rest.is_one() {
            return Ok(out);
        }
    }
    Ok(factor_integer(n)?.into_iter().map(|(p, _)| p).collect())
}

/// Squarefree part `a0` and square root `s` of the rest: `a = a0 s²`.
fn squarefree_split(a: &BigInt, hint: Option<&[BigInt]>) -> Result<(BigInt, BigInt), ConicError> {
    let mut a0 = if a.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut s = BigInt::one();
    let mut rest = a.abs();
    for p in primes_of(a, hint)? {
        let mut e = 0u32;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            a0 *= &p;
        }
        s *= p.pow(e / 2);
    }
    Ok((a0, s))
}

/// `t` with `t² ≡ a (mod |b|)` for squarefree `b`, reduced to `|t| ≤ |b|/2`.
fn sqrt_mod_squarefree(a: &BigInt, b: &BigInt, hint: Option<&[BigInt]>) -> Result<Option<BigInt>, ConicError> {
    let m = b.abs();
    let mut t = BigInt::zero();
    let mut modulus = BigInt::one();
    for p in primes_of(&m, hint)? {
        let r = if p == BigInt::from(2) {
            a.mod_floor(&p)
        } else {
            match sqrt_mod_prime(a, &p) {
                Some(r) => r,
                None => return Ok(None),
            }
        };
        let ext = modulus.extended_gcd(&p);
        let k = ((&r - &t) * &ext.x).mod_floor(&p);
        t += &modulus * k;
        modulus *= &p;
    }
    let mut t = t.mod_floor(&m);
    if &t * 2 > m {
        t -= &m;
    }
    Ok(Some(t))
}

/// Nontrivial `(x, y, z)` with `a x² + b y² = z²` for squarefree `a, b`.
fn legendre_squarefree(a: &BigInt, b: &BigInt, hint: Option<&[BigInt]>, depth: u32) -> Result<Option<[BigInt; 3]>, ConicError> {
    if depth > 400 {
        return Err(ConicError::Internal("Legendre descent did not terminate".into()));
    }
    let one = BigInt::one();
    if a.is_one() {
        return Ok(Some([one.clone(), BigInt::zero(), one]));
    }
    if b.is_one() {
        return Ok(Some([BigInt::zero(), one.clone(), one]));
    }
    if a.is_negative() && b.is_negative() {
        return Ok(None);
    }
    if a.abs() > b.abs() {
        return Ok(legendre_squarefree(b, a, hint, depth + 1)?.map(|[x, y, z]| [y, x, z]));
    }
    let Some(t) = sqrt_mod_squarefree(a, b, hint)? else { return Ok(None) };
    let kk = (&t * &t - a) / b;
    let (k, m) = squarefree_split(&kk, None)?;
    let Some([x, y, z]) = legendre_squarefree(a, &k, None, depth + 1)? else { return Ok(None) };
    Ok(Some([&t * &x + &z, &k * &m * y, &t * &z + a * &x]))
}

fn legendre_hinted(a: &BigInt, b: &BigInt, hint: Option<&[BigInt]>) -> Result<Option<[BigInt; 3]>, ConicError> {
    let (a0, s) = squarefree_split(a, hint)?;
    let (b0, t) = squarefree_split(b, hint)?;
    Ok(legendre_squarefree(&a0, &b0, hint, 0)?.map(|[x, y, z]| [x * &t, y * &s, z * &s * &t]))
}

type Vec3 = [BigInt; 3];

/// Integral LLL reduction (δ = 3/4) of three independent vectors for the
/// positive definite Gram matrix `w`, tracking subdeterminants `d` and
/// `λ_kj = d_j μ_kj`.
fn lll3(b: [Vec3; 3], w: &Mat3) -> [Vec3; 3] {
    let ip = |x: &Vec3, y: &Vec3| -> BigInt {
        (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| &w[i][j] * &x[i] * &y[j]).fold(BigInt::zero(), |s, v| s + v)
    };
    // One-based indices throughout.
    let mut bb: [Vec3; 4] = [Default::default(), b[0].clone(), b[1].clone(), b[2].clone()];
    let mut d: [BigInt; 4] = [BigInt::one(), ip(&b[0], &b[0]), BigInt::zero(), BigInt::zero()];
    let mut lam: [[BigInt; 4]; 4] = Default::default();
    let (mut k, mut kmax) = (2usize, 1usize);
    let red = |bb: &mut [Vec3; 4], lam: &mut [[BigInt; 4]; 4], d: &[BigInt; 4], k: usize, l: usize| {
        if BigInt::from(2) * lam[k][l].abs() > d[l] {
            let q = round_rat(&BigRational::new(lam[k][l].clone(), d[l].clone()));
            let bl = bb[l].clone();
            for c in 0..3 {
                bb[k][c] -= &q * &bl[c];
            }
            lam[k][l] -= &q * &d[l];
            for i in 1..l {
                let t = &q * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    };
    while k <= 3 {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = ip(&bb[k], &bb[j]);
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    d[k] = u;
                }
            }
        }
        red(&mut bb, &mut lam, &d, k, k - 1);
        let l2 = &lam[k][k - 1] * &lam[k][k - 1];
        if BigInt::from(4) * &d[k] * &d[k - 2] < BigInt::from(3) * &d[k - 1] * &d[k - 1] - BigInt::from(4) * &l2 {
            bb.swap(k, k - 1);
            for j in 1..k - 1 {
                let t = lam[k][j].clone();
                lam[k][j] = lam[k - 1][j].clone();
                lam[k - 1][j] = t;
            }
            let l = lam[k][k - 1].clone();
            let big_b = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
                lam[i][k - 1] = (&big_b * &t + &l * &lam[i][k]) / &d[k];
            }
            d[k - 1] = big_b;
            k = (k - 1).max(2);
        } else {
            for l in (1..k - 1).rev() {
                red(&mut bb, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
    let [_, b1, b2, b3] = bb;
    [b1, b2, b3]
}

/// Basis of `{v ∈ span(b) : r·v ≡ 0 (mod m)}`.
fn congruence_sublattice(mut b: [Vec3; 3], r: &Vec3, m: &BigInt) -> [Vec3; 3] {
    let val = |v: &Vec3| (0..3).map(|k| &r[k] * &v[k]).fold(BigInt::zero(), |s, x| s + x).mod_floor(m);
    // Euclid on the residues until only the first is nonzero.
    loop {
        let mut c: Vec<(usize, BigInt)> = (0..3).map(|i| (i, val(&b[i]))).filter(|(_, x)| !x.is_zero()).collect();
        if c.len() <= 1 {
            if let Some(&(i, _)) = c.first() {
                b.swap(0, i);
            }
            break;
        }
        c.sort_by(|x, y| x.1.cmp(&y.1));
        let (i, ci) = c[0].clone();
        for (j, cj) in &c[1..] {
            let q = cj / &ci;
            let bi = b[i].clone();
            for k in 0..3 {
                b[*j][k] -= &q * &bi[k];
            }
        }
    }
    let g = val(&b[0]);
    let f = if g.is_zero() { BigInt::one() } else { m / g.gcd(m) };
    b[0] = b[0].clone().map(|x| x * &f);
    b
}

/// Solution of `k0 x² + k1 y² + k2 z² = 0` (squarefree `k_i`) of roughly
/// Holzer size, by reducing the lattice on which the form is divisible by
/// `k0 k1 k2`. `None` when the reduced form has no tiny zero.
fn small_diagonal_solution(k: &[BigInt; 3], hint: &[BigInt]) -> Result<Option<Vec3>, ConicError> {
    let mut k = k.clone();
    let mut scale = [BigInt::one(), BigInt::one(), BigInt::one()];
    let g = k[0].gcd(&k[1]).gcd(&k[2]);
    for x in k.iter_mut() {
        *x = &*x / &g;
    }
    loop {
        let mut changed = false;
        for (i, j, l) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            let g = k[i].gcd(&k[j]);
            if !g.is_one() {
                k[i] = &k[i] / &g;
                k[j] = &k[j] / &g;
                k[l] = &k[l] * &g;
                scale[l] = &scale[l] * &g;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut hint: Vec<BigInt> = hint.to_vec();
    for p in primes_of(&scale.iter().fold(BigInt::one(), |a, s| a * s), None)? {
        if !hint.contains(&p) {
            hint.push(p);
        }
    }
    let z = BigInt::zero;
    let mut basis: [Vec3; 3] = [[BigInt::one(), z(), z()], [z(), BigInt::one(), z()], [z(), z(), BigInt::one()]];
    // Modulo |k_i| the point satisfies x_j ≡ ρ x_l with ρ² ≡ −k_l/k_j.
    for (i, j, l) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let m = k[i].abs();
        if m.is_one() {
            continue;
        }
        let Some(t) = sqrt_mod_squarefree(&-(&k[j] * &k[l]), &m, Some(&hint))? else { return Ok(None) };
        let inv = k[j].mod_floor(&m).extended_gcd(&m).x;
        let rho = (t * inv).mod_floor(&m);
        let mut r: Vec3 = Default::default();
        r[j] = BigInt::one();
        r[l] = -rho;
        basis = congruence_sublattice(basis, &r, &m);
    }
    let w: Mat3 = core::array::from_fn(|i| core::array::from_fn(|j| if i == j { k[i].abs() } else { BigInt::zero() }));
    let basis = lll3(basis, &w);
    let n = &k[0] * &k[1] * &k[2];
    let bform = |x: &Vec3, y: &Vec3| -> BigInt { (0..3).map(|c| &k[c] * &x[c] * &y[c]).fold(BigInt::zero(), |s, v| s + v) };
    let coeff = |v: BigInt| -> Option<i128> {
        let (qt, rm) = v.div_rem(&n);
        if rm.is_zero() { qt.to_i128() } else { None }
    };
    let reduced = [
        coeff(bform(&basis[0], &basis[0])),
        coeff(bform(&basis[0], &basis[1]) * 2),
        coeff(bform(&basis[1], &basis[1])),
        coeff(bform(&basis[0], &basis[2]) * 2),
        coeff(bform(&basis[1], &basis[2]) * 2),
        coeff(bform(&basis[2], &basis[2])),
    ];
    let Some(reduced) = reduced.into_iter().collect::<Option<Vec<_>>>() else { return Ok(None) };
    let reduced: [i128; 6] = reduced.try_into().unwrap();
    if reduced.iter().any(|c| c.abs() > 1 << 20) {
        return Ok(None);
    }
    let mut r = 1;
    while r <= 64 {
        if let Some(s) = best_in_box(&reduced, r) {
            let x: Vec3 = core::array::from_fn(|c| {
                let v = (0..3).map(|i| &s[i] * &basis[i][c]).fold(BigInt::zero(), |a, v| a + v);
                v * &scale[c]
            });
            let g = x[0].gcd(&x[1]).gcd(&x[2]);
            return Ok(Some(x.map(|c| c / &g)));
        }
        r *= 2;
    }
    Ok(None)
}

/// Nontrivial solution of `a x² + b y² = z²` for nonzero integers.
pub fn legendre(a: &BigInt, b: &BigInt) -> Result<Option<[BigInt; 3]>, ConicError> {
    legendre_hinted(a, b, None)
}

fn integral_canonical(x: &[BigRational; 3]) -> [BigInt; 3] {
    let l = x.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    canonical(&core::array::from_fn(|i| (&x[i] * BigRational::from_integer(l.clone())).to_integer()))
}

fn adjugate(m: &RatMat3) -> RatMat3 {
    core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
        })
    })
}

/// Tries to replace the point `ξ` by a smaller one. For an odd prime `p`
/// dividing the determinant at which `ξ` is not singular mod `p`, the
/// plane `(Gξ)·x ≡ 0 (mod p)` is the line of the reduced conic through
/// `ξ`, and `Q` vanishes on it mod `p`. On the intersection of these planes,
/// reduced for a positive definite majorant of `Q`, the form divided by its
/// content is nearly unimodular and has a tiny zero.
fn shrink_point(q: &TernaryQuadraticForm, xi: [BigInt; 3], primes: &[BigInt]) -> Result<[BigInt; 3], ConicError> {
    let g = q.hessian();
    let det_g = {
        let rows: Vec<Vec<BigInt>> = g.iter().map(|r| r.to_vec()).collect();
        crate::arith::linalg::det_int(&rows)
    };
    let gxi: Vec3 = core::array::from_fn(|i| (0..3).map(|k| &g[i][k] * &xi[k]).fold(BigInt::zero(), |s, v| s + v));
    let z = BigInt::zero;
    let mut basis: [Vec3; 3] = [[BigInt::one(), z(), z()], [z(), BigInt::one(), z()], [z(), z(), BigInt::one()]];
    let two = BigInt::from(2);
    let mut used = false;
    for p in primes {
        if *p == two || !det_g.is_multiple_of(p) || gxi.iter().all(|c| c.is_multiple_of(p)) {
            continue;
        }
        basis = congruence_sublattice(basis, &gxi, p);
        used = true;
    }
    if !used {
        return Ok(xi);
    }
    let (d, pm) = diagonalize_rat(q);
    let adj = adjugate(&pm);
    // Majorant `P⁻ᵀ |diag d| P⁻¹`, scaled to be integral; `adj(P)` stands in for `P⁻¹`.
    let wr: RatMat3 = core::array::from_fn(|i| {
        core::array::from_fn(|j| (0..3).map(|k| d[k].abs() * &adj[k][i] * &adj[k][j]).fold(BigRational::zero(), |s, v| s + v))
    });
    let den = wr.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let w: Mat3 = core::array::from_fn(|i| core::array::from_fn(|j| (&wr[i][j] * BigRational::from_integer(den.clone())).to_integer()));
    let basis = lll3(basis, &w);
    let v: Mat3 = core::array::from_fn(|i| core::array::from_fn(|j| basis[j][i].clone()));
    let qv = q.substitute(&v);
    let content = qv.coeffs().into_iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let Some(small) = qv.coeffs().map(|c| (c / &content).to_i128()).into_iter().collect::<Option<Vec<_>>>() else {
        return Ok(xi);
    };
    let small: [i128; 6] = small.try_into().unwrap();
    if small.iter().any(|c| c.abs() > 1 << 20) {
        return Ok(xi);
    }
    let mut r = 1;
    while r <= 64 {
        if let Some(s) = best_in_box(&small, r) {
            let x = canonical(&core::array::from_fn(|i| (0..3).map(|j| &v[i][j] * &s[j]).fold(BigInt::zero(), |a, b| a + b)));
            if q.eval(&x).is_zero() && max_norm(&x) < max_norm(&xi) {
                return Ok(x);
            }
            break;
        }
        r *= 2;
    }
    Ok(xi)
}

/// Some canonical rational point, found quickly: a small box first, then a
/// Legendre descent on a rational diagonalization.
pub fn rational_point(q: &TernaryQuadraticForm) -> Result<Option<[BigInt; 3]>, ConicError> {
    if !is_soluble(q)? {
        return Ok(None);
    }
    if let Ok(c) = small_coeffs(q) {
        let mut r = 1;
        while r <= QUICK_SEARCH_RADIUS {
            if let Some(x) = best_in_box(&c, r) {
                return Ok(Some(x));
            }
            r *= 2;
        }
    }
    let (d, p) = diagonalize_rat(q);
    let (k, primes) = squarefree_diagonal(q)?;
    let big_y: [BigRational; 3] = match small_diagonal_solution(&k, &primes)? {
        Some(v) => v.map(BigRational::from_integer),
        None => {
            let a = -(&k[0] * &k[2]);
            let b = -(&k[1] * &k[2]);
            let [x, y, z] = legendre_hinted(&a, &b, Some(&primes))?
                .ok_or_else(|| ConicError::Internal(format!("descent failed on soluble form {q}")))?;
            [BigRational::from_integer(x), BigRational::from_integer(y), BigRational::new(z, k[2].clone())]
        }
    };
    // d_i = k_i s_i² with s_i rational; the point in diagonal coordinates is Y_i / s_i.
    let s: [BigRational; 3] = core::array::from_fn(|i| {
        let r = &d[i] / BigRational::from_integer(k[i].clone());
        BigRational::new(exact_sqrt(r.numer()).unwrap(), exact_sqrt(r.denom()).unwrap())
    });
    let yy: [BigRational; 3] = core::array::from_fn(|i| &big_y[i] / &s[i]);
    let pt: [BigRational; 3] =
        core::array::from_fn(|i| (0..3).map(|k| &p[i][k] * &yy[k]).fold(BigRational::zero(), |s, v| s + v));
    let pt = integral_canonical(&pt);
    if !q.eval(&pt).is_zero() {
        return Err(ConicError::Internal(format!("descent produced a non-solution {}", describe(&pt))));
    }
    Ok(Some(shrink_point(q, pt, &primes)?))
}

/// Unimodular integer matrix `A` with `A·(0,1,0)ᵀ = ξ`.
pub fn transition_matrix(xi: &[BigInt; 3]) -> Result<Mat3, ConicError> {
    let [x0, x1, x2] = xi;
    let g = x0.gcd(x2);
    if !g.gcd(x1).is_one() {
        return Err(ConicError::InvalidArgument(format!("{} is not primitive", describe(xi))));
    }
    let (z, o) = (BigInt::zero, BigInt::one);
    if g.is_zero() {
        return Ok([[o(), z(), z()], [z(), x1.clone(), z()], [z(), z(), o()]]);
    }
    let e = x0.extended_gcd(x2);
    let (u, w) = (e.x, e.y);
    let f = g.extended_gcd(x1);
    let (lam, mu) = (f.x, f.y);
    let c1 = [x0 / &g, x2 / &g];
    let eta = [-&mu * &c1[0], lam.clone(), -&mu * &c1[1]];
    let mut c2 = [-w, z(), u];
    let det = &eta[0] * (x1 * &c2[2] - &c2[1] * x2) - x0 * (&eta[1] * &c2[2] - &c2[1] * &eta[2])
        + &c2[0] * (&eta[1] * x2 - x1 * &eta[2]);
    if det.is_negative() {
        c2 = c2.map(|c| -c);
    }
    Ok([
        [eta[0].clone(), x0.clone(), c2[0].clone()],
        [eta[1].clone(), x1.clone(), c2[1].clone()],
        [eta[2].clone(), x2.clone(), c2[2].clone()],
    ])
}

fn round_rat(q: &BigRational) -> BigInt {
    (q + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}

/// Keeps the middle column `ξ` and replaces the outer columns by a basis of
/// `Z³ / Zξ` that is Gauss-reduced for the metric of `h` projected away from `hξ`.
fn reduce_transition(a: Mat3, h: &RatMat3) -> Mat3 {
    let col = |j: usize| -> [BigInt; 3] { core::array::from_fn(|i| a[i][j].clone()) };
    let (mut eta, xi, mut c) = (col(0), col(1), col(2));
    let den = h.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let hi: [[BigInt; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| (&h[i][j] * BigRational::from_integer(den.clone())).to_integer()));
    let apply = |v: &[BigInt; 3]| -> [BigInt; 3] {
        core::array::from_fn(|i| (0..3).map(|k| &hi[i][k] * &v[k]).fold(BigInt::zero(), |s, x| s + x))
    };
    let dot = |x: &[BigInt; 3], y: &[BigInt; 3]| -> BigInt { (0..3).map(|i| &x[i] * &y[i]).fold(BigInt::zero(), |s, v| s + v) };
    let round_div = |n: &BigInt, d: &BigInt| -> BigInt { (BigInt::from(2) * n + d).div_floor(&(BigInt::from(2) * d)) };
    let hxi = apply(&xi);
    let nxi = dot(&hxi, &hxi);
    // Projection away from hξ, scaled by |hξ|².
    let proj = |v: &[BigInt; 3]| -> [BigInt; 3] {
        let hv = apply(v);
        let k = dot(&hv, &hxi);
        core::array::from_fn(|i| &nxi * &hv[i] - &k * &hxi[i])
    };
    let axpy = |v: &[BigInt; 3], m: &BigInt, u: &[BigInt; 3]| -> [BigInt; 3] { core::array::from_fn(|i| &v[i] - m * &u[i]) };
    let mut flips = 0;
    for _ in 0..10_000 {
        let (pe, pc) = (proj(&eta), proj(&c));
        let (ne, nc) = (dot(&pe, &pe), dot(&pc, &pc));
        if ne > nc {
            core::mem::swap(&mut eta, &mut c);
            flips += 1;
            continue;
        }
        let mu = round_div(&dot(&pe, &pc), &ne);
        if mu.is_zero() {
            break;
        }
        c = axpy(&c, &mu, &eta);
    }
    for v in [&mut eta, &mut c] {
        let m = round_div(&dot(&apply(v), &hxi), &nxi);
        *v = axpy(v, &m, &xi);
    }
    if flips % 2 == 1 {
        c = c.map(|x| -x);
    }
    core::array::from_fn(|i| [eta[i].clone(), xi[i].clone(), c[i].clone()])
}

fn mat_mul_rat(a: &RatMat3, b: &Mat3) -> RatMat3 {
    core::array::from_fn(|i| {
        core::array::from_fn(|j| (0..3).map(|k| &a[i][k] * &b[k][j]).fold(BigRational::zero(), |s, v| s + v))
    })
}

fn divisors(n: &BigInt) -> Result<Vec<i128>, ConicError> {
    let mut out = alloc::vec![1i128];
    for (p, e) in factor_integer(n)? {
        let p = p.to_i128().unwrap();
        let len = out.len();
        let mut pk = 1i128;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Reduced basis of `{(u, w) : b u + e w ≡ 0 mod g}`.
fn lattice_basis(b: i128, e: i128, g: i128) -> ([i128; 2], [i128; 2]) {
    let h = gcd_i128(gcd_i128(b, e), g);
    let (b, e, g) = (b / h, e / h, g / h);
    let mut rows: Vec<[i128; 2]> = Vec::from([[g, 0], [0, g], [e.rem_euclid(g), (-b).rem_euclid(g)]]);
    loop {
        rows.retain(|r| r[0] != 0 || r[1] != 0);
        let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][0] != 0).collect();
        if nz.len() <= 1 {
            break;
        }
        let (i, j) = {
            let mut s = nz.clone();
            s.sort_by_key(|&i| rows[i][0].abs());
            (s[0], s[1])
        };
        let qt = rows[j][0] / rows[i][0];
        rows[j] = [rows[j][0] - qt * rows[i][0], rows[j][1] - qt * rows[i][1]];
    }
    let first = rows.iter().position(|r| r[0] != 0).unwrap();
    let v1 = rows.remove(first);
    let h2 = rows.iter().fold(0i128, |acc, r| gcd_i128(acc, r[1]));
    let mut v1 = v1;
    let mut v2 = [0, h2];
    // Norms are only estimates; every step is unimodular.
    let norm = |v: [i128; 2]| (v[0] as f64) * (v[0] as f64) + (v[1] as f64) * (v[1] as f64);
    for _ in 0..1000 {
        let (n1, n2) = (norm(v1), norm(v2));
        if n1 > n2 {
            core::mem::swap(&mut v1, &mut v2);
            continue;
        }
        let dot = (v1[0] as f64) * (v2[0] as f64) + (v1[1] as f64) * (v2[1] as f64);
        let mu = libm::round(dot / n1) as i128;
        if mu == 0 {
            break;
        }
        let next = (|| Some([v2[0].checked_sub(mu.checked_mul(v1[0])?)?, v2[1].checked_sub(mu.checked_mul(v1[1])?)?]))();
        match next {
            Some(v) if norm(v) < n2 => v2 = v,
            _ => break,
        }
        if norm(v2) >= n1 {
            break;
        }
    }
    (v1, v2)
}

struct Counter {
    mn: [[i128; 3]; 3],
    lhs_scale: i128,
    rhs_scale: i128,
}

impl Counter {
    /// Whether the primitive point `y / g` has height at most the bound.
    fn within(&self, y: &[i128; 3], g: i128) -> bool {
        let rhs = match self.rhs_scale.checked_mul(g) {
            Some(v) => v,
            None => return self.within_big(y, g),
        };
        for row in &self.mn {
            let mut s: i128 = 0;
            for k in 0..3 {
                match row[k].checked_mul(y[k]).and_then(|v| s.checked_add(v)) {
                    Some(v) => s = v,
                    None => return self.within_big(y, g),
                }
            }
            let Some(lhs) = s.checked_mul(self.lhs_scale) else { return self.within_big(y, g) };
            if lhs.abs() > rhs {
                return false;
            }
        }
        true
    }

    fn within_big(&self, y: &[i128; 3], g: i128) -> bool {
        let rhs = BigInt::from(self.rhs_scale) * BigInt::from(g);
        self.mn.iter().all(|row| {
            let s: BigInt = (0..3).map(|k| BigInt::from(row[k]) * BigInt::from(y[k])).sum();
            s.abs() * self.lhs_scale <= rhs
        })
    }
}

fn count_impl(
    q: &TernaryQuadraticForm,
    h: &HeightSpec,
    bound: &BigRational,
    mut sink: Option<&mut Vec<[BigInt; 3]>>,
) -> Result<PointCount, ConicError> {
    if !q.is_nondegenerate() {
        return Err(ConicError::InvalidArgument("degenerate form".into()));
    }
    if !is_soluble(q)? {
        return Ok(PointCount { count: 0, soluble: false });
    }
    if !bound.is_positive() {
        return Ok(PointCount { count: 0, soluble: true });
    }
    let xi = rational_point(q)?.ok_or_else(|| ConicError::Internal("soluble form without a point".into()))?;
    let a = reduce_transition(transition_matrix(&xi)?, h.transform());
    let qp = q.substitute(&a);
    let big = |x: &BigInt| x.to_i128().ok_or_else(|| ConicError::ResourceLimit("transformed form too large".into()));
    let (ca, cb, cd, ce, cf) = (big(&qp.a)?, big(&qp.b)?, big(&qp.d)?, big(&qp.e)?, big(&qp.f)?);
    let r = (&qp.a * &qp.e * &qp.e - &qp.b * &qp.d * &qp.e + &qp.b * &qp.b * &qp.f)
        .to_i128()
        .ok_or_else(|| ConicError::ResourceLimit("transformed form too large".into()))?;
    debug_assert!(r != 0 && qp.c.is_zero());
    let m = mat_mul_rat(h.transform(), &a);
    let den = m.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let mn: [[i128; 3]; 3] = core::array::from_fn(|i| {
        core::array::from_fn(|j| (&m[i][j] * BigRational::from_integer(den.clone())).to_integer().to_i128().unwrap_or(i128::MAX))
    });
    if mn.iter().flatten().any(|&x| x == i128::MAX) {
        return Err(ConicError::ResourceLimit("height transform too large".into()));
    }
    let too_large = || ConicError::ResourceLimit("bound too large".into());
    let rhs_scale = (&den * bound.numer()).to_i128().ok_or_else(too_large)?;
    let lhs_scale = bound.denom().to_i128().ok_or_else(too_large)?;
    let counter = Counter { mn, lhs_scale, rhs_scale };
    // Row i of the scaled height transform applied to y(u, w), as a quadratic form in (u, w).
    let y_forms = [[cb, ce, 0], [-ca, -cd, -cf], [0, cb, ce]].map(|r| r.map(|c| c as f64));
    let forms_uw: Vec<Qf> = mn
        .iter()
        .map(|row| core::array::from_fn(|k| (0..3).map(|j| row[j] as f64 * y_forms[j][k]).sum::<f64>()))
        .collect();
    let t_base = rat_f64(&(BigRational::from_integer(den.clone()) * bound));
    let hull = RegionHull::new(&forms_uw).ok_or_else(|| ConicError::ResourceLimit("height region could not be bounded".into()))?;

    let mut count: u64 = 0;
    let mut emit = |y: [i128; 3], g: i128, sink: &mut Option<&mut Vec<[BigInt; 3]>>| {
        count += 1;
        if let Some(v) = sink.as_deref_mut() {
            let yb = y.map(|c| BigInt::from(c / g));
            let x: [BigInt; 3] = core::array::from_fn(|i| (0..3).map(|k| &a[i][k] * &yb[k]).sum());
            v.push(canonical(&x));
        }
    };
    let e2 = [0i128, 1, 0];
    if counter.within(&e2, 1) {
        emit(e2, 1, &mut sink);
    }
    let mut overflow = false;
    for g in divisors(&BigInt::from(r))? {
        let (v1, v2) = lattice_basis(cb, ce, g);
        for_each_in_region(v1, v2, &forms_uw, &hull, t_base * g as f64, |u, w| {
            if u < 0 || (u == 0 && w <= 0) || gcd_i128(u, w) != 1 {
                return;
            }
            let Some((l, qv)) = (|| {
                let l = cb.checked_mul(u)?.checked_add(ce.checked_mul(w)?)?;
                let qv = ca.checked_mul(u)?.checked_mul(u)?.checked_add(cd.checked_mul(u)?.checked_mul(w)?)?.checked_add(cf.checked_mul(w)?.checked_mul(w)?)?;
                Some((l, qv))
            })() else {
                overflow = true;
                return;
            };
            if l == 0 {
                return;
            }
            let (Some(y0), Some(y2)) = (u.checked_mul(l), w.checked_mul(l)) else {
                overflow = true;
                return;
            };
            let y = [y0, -qv, y2];
            if gcd_i128(gcd_i128(y[0], y[1]), y[2]) != g {
                return;
            }
            if counter.within(&y, g) {
                emit(y, g, &mut sink);
            }
        });
        if overflow {
            return Err(ConicError::ResourceLimit("parametrization exceeds 128 bits".into()));
        }
    }
    Ok(PointCount { count, soluble: true })
}

/// Number of rational points on `Q = 0` of height at most `bound`.
pub fn count_points(q: &TernaryQuadraticForm, h: &HeightSpec, bound: &BigRational) -> Result<PointCount, ConicError> {
    count_impl(q, h, bound, None)
}

/// The canonical points counted by [`count_points`], sorted.
pub fn enumerate_points(q: &TernaryQuadraticForm, h: &HeightSpec, bound: &BigRational) -> Result<Vec<[BigInt; 3]>, ConicError> {
    let mut v = Vec::new();
    count_impl(q, h, bound, Some(&mut v))?;
    v.sort();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: [i64; 6]) -> TernaryQuadraticForm {
        TernaryQuadraticForm::from_i64(k)
    }

    fn bi(x: [i64; 3]) -> [BigInt; 3] {
        x.map(BigInt::from)
    }

    fn det(a: &Mat3) -> BigInt {
        &a[0][0] * (&a[1][1] * &a[2][2] - &a[1][2] * &a[2][1]) - &a[0][1] * (&a[1][0] * &a[2][2] - &a[1][2] * &a[2][0])
            + &a[0][2] * (&a[1][0] * &a[2][1] - &a[1][1] * &a[2][0])
    }

    fn brute(f: &TernaryQuadraticForm, b: i64) -> Vec<[BigInt; 3]> {
        let mut out = Vec::new();
        for x0 in 0..=b {
            for x1 in -b..=b {
                for x2 in -b..=b {
                    let x = bi([x0, x1, x2]);
                    if x0 == 0 && (x1 < 0 || (x1 == 0 && x2 <= 0)) {
                        continue;
                    }
                    if x0.gcd(&x1).gcd(&x2) != 1 || !f.eval(&x).is_zero() {
                        continue;
                    }
                    out.push(x);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn find_point_examples() {
        assert_eq!(find_point(&q([1, 0, 1, 0, 0, -1])).unwrap(), Some(bi([0, 1, -1])));
        let p = find_point(&q([1, 0, 1, 0, 0, -5])).unwrap().unwrap();
        assert!(q([1, 0, 1, 0, 0, -5]).eval(&p).is_zero());
        assert_eq!(max_norm(&p), BigInt::from(2));
        assert_eq!(find_point(&q([1, 0, 1, 0, 0, 1])).unwrap(), None);
    }

    #[test]
    fn descent_solves_legendre_equations() {
        for (a, b) in [(2, 7), (-3, 7), (5, 11), (13, 17), (-1, 2), (6, 10), (3, -1), (1, 1), (97, 101)] {
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            if let Some([x, y, z]) = legendre(&a, &b).unwrap() {
                assert_eq!(&a * &x * &x + &b * &y * &y, &z * &z);
                assert!(!(x.is_zero() && y.is_zero() && z.is_zero()));
            }
        }
        assert!(legendre(&BigInt::from(3), &BigInt::from(3)).unwrap().is_none());
    }

    #[test]
    fn rational_point_on_large_forms() {
        for k in [[1009, 0, 1013, 0, 0, -2022], [12345, 678, -9101, 11, 1213, -1415], [2, 1, -40000, 3, 7, -5]] {
            let f = q(k);
            if is_soluble(&f).unwrap() {
                let p = rational_point(&f).unwrap().unwrap();
                assert!(f.eval(&p).is_zero());
            }
        }
    }

    #[test]
    fn transition_examples() {
        let id = transition_matrix(&bi([0, 1, 0])).unwrap();
        assert_eq!(id, [[1, 0, 0], [0, 1, 0], [0, 0, 1]].map(|r| r.map(BigInt::from)));
        for xi in [[1, 0, 0], [2, 1, 1], [6, 10, 15], [-4, 9, 0], [0, -1, 0], [0, 3, 7]] {
            let a = transition_matrix(&bi(xi)).unwrap();
            assert_eq!(det(&a).abs(), BigInt::one());
            assert_eq!([a[0][1].clone(), a[1][1].clone(), a[2][1].clone()], bi(xi));
        }
        assert!(transition_matrix(&bi([2, 4, 6])).is_err());
    }

    #[test]
    fn counts_match_brute_force() {
        let h = HeightSpec::identity();
        for k in [[0, 0, -1, 1, 0, 0], [1, 0, 1, 0, 0, -1], [1, 0, 1, 0, 0, -5], [2, 3, -1, 4, 0, -7], [0, 1, 0, 1, 1, 0]] {
            let f = q(k);
            for b in [1i64, 5, 17] {
                let bound = BigRational::from_integer(BigInt::from(b));
                let got = enumerate_points(&f, &h, &bound).unwrap();
                assert_eq!(got, brute(&f, b), "{f} B={b}");
            }
        }
    }

    #[test]
    fn small_bounds_and_insoluble() {
        let h = HeightSpec::identity();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        assert_eq!(count_points(&q([1, 0, 1, 0, 0, -1]), &h, &half).unwrap().count, 0);
        let r = count_points(&q([1, 0, 1, 0, 0, 1]), &h, &BigRational::from_integer(BigInt::from(9))).unwrap();
        assert_eq!(r, PointCount { count: 0, soluble: false });
    }
}
