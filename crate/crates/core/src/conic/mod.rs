//! Integral ternary quadratic forms: discriminants, local densities,
//! solubility, rational points and height-bounded point counts.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::int::{factor_integer, is_prime_u64, jacobi_i128, valuation};
use crate::arith::linalg::det_rat;
use crate::arith::ArithError;

mod archimedean;
mod density;
mod points;
mod region;

pub use archimedean::{omega_inf, peyre_product, PeyreProduct};
pub use density::{local_density, sigma_p_closed, sigma_p_oracle, DensityMethod, LocalDensityReport};
pub use points::{count_points, enumerate_points, find_point, legendre, rational_point, transition_matrix, PointCount};

pub type Mat3 = [[BigInt; 3]; 3];
pub type RatMat3 = [[BigRational; 3]; 3];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConicError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("rank error: {0}")]
    Rank(String),
    #[error("unsupported, use the oracle: {0}")]
    UseOracle(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `a x0² + b x0x1 + c x1² + d x0x2 + e x1x2 + f x2²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TernaryQuadraticForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
    pub e: BigInt,
    pub f: BigInt,
}

impl TernaryQuadraticForm {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt, e: BigInt, f: BigInt) -> Self {
        TernaryQuadraticForm { a, b, c, d, e, f }
    }

    pub fn from_i64(k: [i64; 6]) -> Self {
        let [a, b, c, d, e, f] = k.map(BigInt::from);
        TernaryQuadraticForm { a, b, c, d, e, f }
    }

    pub fn coeffs(&self) -> [&BigInt; 6] {
        [&self.a, &self.b, &self.c, &self.d, &self.e, &self.f]
    }

    pub fn to_i128(&self) -> Option<[i128; 6]> {
        let c = self.coeffs();
        let mut out = [0i128; 6];
        for i in 0..6 {
            out[i] = c[i].to_i128()?;
        }
        Some(out)
    }

    /// Largest absolute coefficient.
    pub fn norm(&self) -> BigInt {
        self.coeffs().iter().map(|c| c.abs()).max().unwrap()
    }

    /// The Hessian matrix, integral and symmetric.
    pub fn hessian(&self) -> Mat3 {
        let two = BigInt::from(2);
        [
            [&self.a * &two, self.b.clone(), self.d.clone()],
            [self.b.clone(), &self.c * &two, self.e.clone()],
            [self.d.clone(), self.e.clone(), &self.f * &two],
        ]
    }

    /// Gram matrix over Q, so that `Q(x) = xᵀ G x`.
    pub fn gram(&self) -> RatMat3 {
        self.hessian().map(|r| r.map(|x| BigRational::new(x, BigInt::from(2))))
    }

    pub fn eval(&self, x: &[BigInt; 3]) -> BigInt {
        let [x0, x1, x2] = x;
        &self.a * x0 * x0 + &self.b * x0 * x1 + &self.c * x1 * x1 + &self.d * x0 * x2 + &self.e * x1 * x2 + &self.f * x2 * x2
    }

    pub fn is_nondegenerate(&self) -> bool {
        !disc_ternary(self).is_zero()
    }

    /// The form `x ↦ Q(M x)`.
    pub fn substitute(&self, m: &Mat3) -> Self {
        let h = self.hessian();
        let mut hm: Mat3 = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                hm[i][j] = (0..3).map(|k| &h[i][k] * &m[k][j]).sum();
            }
        }
        let mut n: Mat3 = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                n[i][j] = (0..3).map(|k| &m[k][i] * &hm[k][j]).sum();
            }
        }
        TernaryQuadraticForm {
            a: &n[0][0] / 2,
            b: n[0][1].clone(),
            c: &n[1][1] / 2,
            d: n[0][2].clone(),
            e: n[1][2].clone(),
            f: &n[2][2] / 2,
        }
    }

    /// `λ·Q`.
    pub fn scale(&self, k: &BigInt) -> Self {
        let [a, b, c, d, e, f] = self.coeffs().map(|x| x * k);
        TernaryQuadraticForm { a, b, c, d, e, f }
    }
}

impl fmt::Display for TernaryQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {} {} {}", self.a, self.b, self.c, self.d, self.e, self.f)
    }
}

impl FromStr for TernaryQuadraticForm {
    type Err = ConicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.len() != 6 {
            return Err(ConicError::InvalidArgument(format!(
                "expected 6 integers \"a b c d e f\", found {}",
                toks.len()
            )));
        }
        let mut v: Vec<BigInt> = Vec::with_capacity(6);
        for t in toks {
            v.push(t.parse().map_err(|_| ConicError::InvalidArgument(format!("not an integer: {t:?}")))?);
        }
        let f = v.pop().unwrap();
        let e = v.pop().unwrap();
        let d = v.pop().unwrap();
        let c = v.pop().unwrap();
        let b = v.pop().unwrap();
        let a = v.pop().unwrap();
        Ok(TernaryQuadraticForm { a, b, c, d, e, f })
    }
}

/// Archimedean height `H(x) = ‖A x‖_∞` on primitive integer triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightSpec {
    transform: RatMat3,
}

impl Default for HeightSpec {
    fn default() -> Self {
        Self::identity()
    }
}

impl HeightSpec {
    pub fn new(transform: RatMat3) -> Result<Self, ConicError> {
        let rows: Vec<Vec<BigRational>> = transform.iter().map(|r| r.to_vec()).collect();
        if det_rat(&rows).is_zero() {
            return Err(ConicError::InvalidArgument("height transform is singular".into()));
        }
        Ok(HeightSpec { transform })
    }

    pub fn identity() -> Self {
        let one = BigRational::one;
        let z = BigRational::zero;
        HeightSpec { transform: [[one(), z(), z()], [z(), one(), z()], [z(), z(), one()]] }
    }

    pub fn diagonal(d: [BigRational; 3]) -> Result<Self, ConicError> {
        let z = BigRational::zero;
        let [d0, d1, d2] = d;
        Self::new([[d0, z(), z()], [z(), d1, z()], [z(), z(), d2]])
    }

    pub fn transform(&self) -> &RatMat3 {
        &self.transform
    }

    pub fn height(&self, x: &[BigInt; 3]) -> BigRational {
        self.transform
            .iter()
            .map(|row| row.iter().zip(x).map(|(m, xi)| m * xi).fold(BigRational::zero(), |s, v| s + v).abs())
            .max()
            .unwrap()
    }

    pub fn height_f64(&self, x: &[f64; 3]) -> f64 {
        self.transform
            .iter()
            .map(|row| libm::fabs(row.iter().zip(x).map(|(m, xi)| rat_f64(m) * xi).sum::<f64>()))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn rat_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `Δ_Q = −det(Hessian)/2`.
pub fn disc_ternary(q: &TernaryQuadraticForm) -> BigInt {
    let h = q.hessian();
    let det = &h[0][0] * (&h[1][1] * &h[2][2] - &h[1][2] * &h[2][1]) - &h[0][1] * (&h[1][0] * &h[2][2] - &h[1][2] * &h[2][0])
        + &h[0][2] * (&h[1][0] * &h[2][1] - &h[1][1] * &h[2][0]);
    -det / 2
}

fn check_odd_prime(p: u64) -> Result<(), ConicError> {
    if p < 3 || !is_prime_u64(p) {
        return Err(ConicError::InvalidArgument(format!("{p} is not an odd prime")));
    }
    Ok(())
}

fn mod_u64(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    crate::arith::modp::pow_mod(a, p - 2, p)
}

/// Nonzero diagonal entries of the Gram matrix of `Q` mod an odd prime.
fn diagonalize_mod_p(q: &TernaryQuadraticForm, p: u64) -> Vec<u64> {
    let inv2 = p.div_ceil(2);
    let h = q.hessian();
    let mut m = [[0u64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (mod_u64(&h[i][j], p) as u128 * inv2 as u128 % p as u128) as u64;
        }
    }
    let mul = |a: u64, b: u64| (a as u128 * b as u128 % p as u128) as u64;
    let mut diag = Vec::new();
    for k in 0..3 {
        if m[k][k] == 0 {
            if let Some(j) = (k + 1..3).find(|&j| m[j][j] != 0) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..3).find(|&j| m[k][j] != 0) {
                for c in 0..3 {
                    m[k][c] = (m[k][c] + m[j][c]) % p;
                }
                for row in m.iter_mut() {
                    row[k] = (row[k] + row[j]) % p;
                }
            } else {
                continue;
            }
        }
        let piv = m[k][k];
        let inv = inv_mod_u64(piv, p);
        for j in k + 1..3 {
            let c = mul(m[j][k], inv);
            if c == 0 {
                continue;
            }
            for col in 0..3 {
                m[j][col] = (m[j][col] + p - mul(c, m[k][col])) % p;
            }
            for row in m.iter_mut() {
                row[j] = (row[j] + p - mul(c, row[k])) % p;
            }
        }
        diag.push(piv);
    }
    diag
}

/// Rank of `Q` modulo an odd prime.
pub fn rank_mod_p(q: &TernaryQuadraticForm, p: u64) -> Result<usize, ConicError> {
    check_odd_prime(p)?;
    Ok(diagonalize_mod_p(q, p).len())
}

/// `+1` when the rank-2 reduction mod `p` is a pair of rational lines, else `−1`.
pub fn chi_p(q: &TernaryQuadraticForm, p: u64) -> Result<i8, ConicError> {
    check_odd_prime(p)?;
    let d = diagonalize_mod_p(q, p);
    if d.len() != 2 {
        return Err(ConicError::Rank(format!("rank of Q mod {p} is {}, expected 2", d.len())));
    }
    let prod = (d[0] as u128 * d[1] as u128 % p as u128) as u64;
    Ok(jacobi_i128((p - prod) as i128, p as u128))
}

/// Number of `(x0,x1,x2)` mod `p` with `x2 ≢ 0` and `A x0² + B x1² ≡ x2²`.
pub fn mp_count(a: &BigInt, b: &BigInt, p: u64) -> Result<BigInt, ConicError> {
    check_odd_prime(p)?;
    let pb = BigInt::from(p);
    if (a * b).is_multiple_of(&pb) {
        return Err(ConicError::InvalidArgument(format!("{p} divides 2AB")));
    }
    let r = mod_u64(&(-(a * b)), p);
    let chi = jacobi_i128(r as i128, p as u128) as i64;
    Ok(BigInt::from(p - 1) * BigInt::from(p as i64 - chi))
}

/// Hilbert symbol `(a, b)_p` for nonzero integers; `p = None` is the real place.
pub fn hilbert_symbol(a: &BigInt, b: &BigInt, p: Option<&BigInt>) -> Result<i8, ConicError> {
    if a.is_zero() || b.is_zero() {
        return Err(ConicError::InvalidArgument("hilbert symbol of zero".into()));
    }
    let Some(p) = p else {
        return Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 });
    };
    let alpha = valuation(a, p)?;
    let beta = valuation(b, p)?;
    let u = a / p.pow(alpha);
    let v = b / p.pow(beta);
    let two = BigInt::from(2);
    if *p == two {
        let m8 = |x: &BigInt| x.mod_floor(&BigInt::from(8)).to_u8().unwrap();
        let eps = |x: u8| (x as u32 + 7) / 2 % 2;
        let omega = |x: u8| (x as u32 * x as u32 - 1) / 8 % 2;
        let (u8_, v8) = (m8(&u), m8(&v));
        let e = eps(u8_) * eps(v8) + alpha * omega(v8) + beta * omega(u8_);
        return Ok(if e % 2 == 0 { 1 } else { -1 });
    }
    let mut s: i8 = 1;
    if (alpha * beta) % 2 == 1 && (p % 4u32) == BigInt::from(3) {
        s = -s;
    }
    if beta % 2 == 1 {
        s *= crate::arith::int::jacobi(&u, p)?;
    }
    if alpha % 2 == 1 {
        s *= crate::arith::int::jacobi(&v, p)?;
    }
    Ok(s)
}

/// Rational diagonalization: `Pᵀ G P = diag(d)` with `G` the Gram matrix.
pub fn diagonalize_rat(q: &TernaryQuadraticForm) -> ([BigRational; 3], RatMat3) {
    let mut m = q.gram();
    let mut pm: RatMat3 = HeightSpec::identity().transform;
    for k in 0..3 {
        if m[k][k].is_zero() {
            if let Some(j) = (k + 1..3).find(|&j| !m[j][j].is_zero()) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
                for row in pm.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..3).find(|&j| !m[k][j].is_zero()) {
                for c in 0..3 {
                    let v = m[j][c].clone();
                    m[k][c] += v;
                }
                for row in m.iter_mut() {
                    let v = row[j].clone();
                    row[k] += v;
                }
                for row in pm.iter_mut() {
                    let v = row[j].clone();
                    row[k] += v;
                }
            } else {
                continue;
            }
        }
        let piv = m[k][k].clone();
        for j in k + 1..3 {
            if m[j][k].is_zero() {
                continue;
            }
            let c = &m[j][k] / &piv;
            for col in 0..3 {
                let v = &c * &m[k][col];
                m[j][col] -= v;
            }
            for row in m.iter_mut() {
                let v = &c * &row[k];
                row[j] -= v;
            }
            for row in pm.iter_mut() {
                let v = &c * &row[k];
                row[j] -= v;
            }
        }
    }
    ([m[0][0].clone(), m[1][1].clone(), m[2][2].clone()], pm)
}

/// Squarefree integers in the square classes of the rational diagonal of
/// `Q`, with their prime divisors; numerators and denominators are factored
/// separately to keep the factored sizes small.
pub(crate) fn squarefree_diagonal(q: &TernaryQuadraticForm) -> Result<([BigInt; 3], Vec<BigInt>), ConicError> {
    let (d, _) = diagonalize_rat(q);
    let mut primes: Vec<BigInt> = Vec::new();
    let mut out: [BigInt; 3] = Default::default();
    for (i, x) in d.iter().enumerate() {
        let mut exps: Vec<(BigInt, u32)> = Vec::new();
        for part in [x.numer(), x.denom()] {
            for (p, e) in factor_integer(part)? {
                match exps.iter_mut().find(|(r, _)| *r == p) {
                    Some(slot) => slot.1 += e,
                    None => exps.push((p, e)),
                }
            }
        }
        let mut k = if x.is_negative() { -BigInt::one() } else { BigInt::one() };
        for (p, e) in exps {
            if e % 2 == 1 {
                k *= &p;
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
        }
        out[i] = k;
    }
    Ok((out, primes))
}

/// Whether `Q = 0` has a nonzero rational point.
pub fn is_soluble(q: &TernaryQuadraticForm) -> Result<bool, ConicError> {
    if !q.is_nondegenerate() {
        return Err(ConicError::InvalidArgument("degenerate form".into()));
    }
    let ([d1, d2, d3], mut primes) = squarefree_diagonal(q)?;
    let a = -(&d1 * &d3);
    let b = -(&d2 * &d3);
    if hilbert_symbol(&a, &b, None)? < 0 {
        return Ok(false);
    }
    if !primes.contains(&BigInt::from(2)) {
        primes.push(BigInt::from(2));
    }
    for p in &primes {
        if hilbert_symbol(&a, &b, Some(p))? < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Primitive triple with positive first nonzero coordinate.
pub fn canonical(x: &[BigInt; 3]) -> [BigInt; 3] {
    let g = x[0].gcd(&x[1]).gcd(&x[2]);
    if g.is_zero() {
        return x.clone();
    }
    let first = x.iter().find(|c| !c.is_zero()).unwrap();
    let g = if first.is_negative() { -g } else { g };
    x.clone().map(|c| c / &g)
}

pub(crate) fn describe(x: &[BigInt; 3]) -> String {
    format!("({}, {}, {})", x[0], x[1], x[2])
}
