//! Integer binary forms `f(s,t) = Σ c_k s^{d-k} t^k`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::linalg::det_int;
use super::poly::ZPoly;
use super::zassenhaus::factor_zpoly;
use super::ArithError;

/// Largest degree accepted by [`factor_binary_form`].
pub const MAX_FACTOR_DEGREE: usize = 16;

/// Binary form of fixed degree; `coeffs[k]` multiplies `s^{d-k} t^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    /// Builds a form from `c_0..c_d`; an empty list is rejected.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a binary form needs at least one coefficient");
        BinaryForm { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm { coeffs: vec![BigInt::zero(); degree + 1] }
    }

    pub fn constant(c: BigInt) -> Self {
        BinaryForm { coeffs: vec![c] }
    }

    /// The linear form `a s + b t`.
    pub fn linear(a: i64, b: i64) -> Self {
        Self::from_i64(&[a, b])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, s: &BigInt, t: &BigInt) -> BigInt {
        let d = self.degree();
        let mut acc = BigInt::zero();
        let mut tp = BigInt::one();
        let mut spows = vec![BigInt::one(); d + 1];
        for i in 1..=d {
            spows[i] = &spows[i - 1] * s;
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * &spows[d - k] * &tp;
            }
            tp *= t;
        }
        acc
    }

    /// Evaluation in `i128`, `None` on overflow.
    pub fn eval_i128(&self, s: i128, t: i128) -> Option<i128> {
        let d = self.degree() as u32;
        let mut acc: i128 = 0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = c
                .to_i128()?
                .checked_mul(s.checked_pow(d - k as u32)?)?
                .checked_mul(t.checked_pow(k as u32)?)?;
            acc = acc.checked_add(term)?;
        }
        Some(acc)
    }

    pub fn eval_rat(&self, s: &BigRational, t: &BigRational) -> BigRational {
        let d = self.degree();
        let mut acc = BigRational::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = BigRational::from_integer(c.clone());
            for _ in 0..d - k {
                term *= s;
            }
            for _ in 0..k {
                term *= t;
            }
            acc += term;
        }
        acc
    }

    pub fn eval_f64(&self, s: f64, t: f64) -> f64 {
        let d = self.degree() as i32;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.to_f64().unwrap() * libm::pow(s, (d - k as i32) as f64) * libm::pow(t, k as f64))
            .sum()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        BinaryForm { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn neg(&self) -> Self {
        BinaryForm { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BinaryForm { coeffs: out }
    }

    /// Sum of two forms of equal degree.
    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.degree(), o.degree(), "adding forms of different degree");
        BinaryForm { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = BinaryForm::constant(BigInt::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `F(αs + βt, γs + δt)`.
    pub fn substitute(&self, alpha: &BigInt, beta: &BigInt, gamma: &BigInt, delta: &BigInt) -> Self {
        let d = self.degree();
        let u = BinaryForm::new(vec![alpha.clone(), beta.clone()]);
        let v = BinaryForm::new(vec![gamma.clone(), delta.clone()]);
        let mut acc = BinaryForm::zero(d);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&u.pow((d - k) as u32).mul(&v.pow(k as u32)).scale(c));
        }
        acc
    }

    /// `F(s, t + k s)`.
    pub fn shear(&self, k: i64) -> Self {
        self.substitute(&BigInt::one(), &BigInt::zero(), &BigInt::from(k), &BigInt::one())
    }

    /// The polynomial `F(x, 1)`.
    pub fn dehomogenize(&self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().rev().cloned().collect())
    }

    /// Homogenizes `f` to degree `d >= deg f`.
    pub fn homogenize(f: &ZPoly, d: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); d + 1];
        for (i, c) in f.0.iter().enumerate() {
            coeffs[d - i] = c.clone();
        }
        BinaryForm { coeffs }
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// First nonzero coefficient, or zero for the zero form.
    pub fn leading(&self) -> BigInt {
        self.coeffs.iter().find(|c| !c.is_zero()).cloned().unwrap_or_default()
    }

    /// Primitive form with positive first nonzero coefficient.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        BinaryForm { coeffs: self.coeffs.iter().map(|c| c / &g).collect() }
    }

    /// Exponent of the largest power of `t` dividing the form.
    pub fn t_valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Primitive gcd of two nonzero forms, first nonzero coefficient positive.
    pub fn gcd(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.normalized();
        }
        if o.is_zero() {
            return self.normalized();
        }
        let tv = self.t_valuation().min(o.t_valuation());
        let g = self.dehomogenize().to_q().gcd(&o.dehomogenize().to_q());
        let gz = if g.is_zero() { ZPoly::from_i64(&[1]) } else { g.primitive_z() };
        let dg = gz.degree().unwrap_or(0);
        BinaryForm::homogenize(&gz, dg).mul(&BinaryForm::from_i64(&[0, 1]).pow(tv as u32)).normalized()
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut parts: Vec<String> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match (d - k, k) {
                (0, 0) => String::new(),
                (a, 0) => pow_str("s", a),
                (0, b) => pow_str("t", b),
                (a, b) => format!("{}*{}", pow_str("s", a), pow_str("t", b)),
            };
            let mag = c.abs();
            let body = if mono.is_empty() {
                format!("{mag}")
            } else if mag.is_one() {
                mono
            } else {
                format!("{mag}*{mono}")
            };
            let sign = if c.is_negative() { "-" } else { "+" };
            if parts.is_empty() {
                parts.push(if c.is_negative() { format!("-{body}") } else { body });
            } else {
                parts.push(format!("{sign} {body}"));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

fn pow_str(v: &str, e: usize) -> String {
    if e == 1 {
        v.into()
    } else {
        format!("{v}^{e}")
    }
}

/// Resultant of two nonzero binary forms via the Sylvester determinant.
pub fn resultant(f: &BinaryForm, g: &BinaryForm) -> Result<BigInt, ArithError> {
    if f.is_zero() || g.is_zero() {
        return Err(ArithError::InvalidArgument("resultant: zero form".into()));
    }
    let (m, n) = (f.degree(), g.degree());
    let size = m + n;
    if size == 0 {
        return Ok(BigInt::one());
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut r = vec![BigInt::zero(); size];
        for (k, c) in f.coeffs.iter().enumerate() {
            r[i + k] = c.clone();
        }
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![BigInt::zero(); size];
        for (k, c) in g.coeffs.iter().enumerate() {
            r[i + k] = c.clone();
        }
        rows.push(r);
    }
    Ok(det_int(&rows))
}

/// Discriminant of a binary quadratic `a s² + b st + c t²`, i.e. `b² − 4ac`.
pub fn quadratic_discriminant(f: &BinaryForm) -> BigInt {
    assert_eq!(f.degree(), 2);
    let c = &f.coeffs;
    &c[1] * &c[1] - BigInt::from(4) * &c[0] * &c[2]
}

/// A binary form written as content times irreducible primitive factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredForm {
    pub content: BigInt,
    pub factors: Vec<(BinaryForm, u32)>,
}

impl FactoredForm {
    pub fn expand(&self) -> BinaryForm {
        let mut acc = BinaryForm::constant(self.content.clone());
        for (f, m) in &self.factors {
            acc = acc.mul(&f.pow(*m));
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, m)| *m == 1)
    }
}

/// Factors a nonzero binary form into irreducibles over Q.
pub fn factor_binary_form(f: &BinaryForm) -> Result<FactoredForm, ArithError> {
    if f.is_zero() {
        return Err(ArithError::InvalidArgument("factor_binary_form: zero form".into()));
    }
    if f.degree() > MAX_FACTOR_DEGREE {
        return Err(ArithError::Unsupported(format!(
            "factor_binary_form: degree {} exceeds {}",
            f.degree(),
            MAX_FACTOR_DEGREE
        )));
    }
    let mut factors = Vec::new();
    let tv = f.t_valuation();
    if tv > 0 {
        factors.push((BinaryForm::from_i64(&[0, 1]), tv as u32));
    }
    let p = f.dehomogenize();
    if p.degree().unwrap_or(0) > 0 {
        for (g, m) in factor_zpoly(&p.primitive_part()) {
            let dg = g.degree().unwrap();
            factors.push((BinaryForm::homogenize(&g, dg).normalized(), m));
        }
    }
    factors.sort_by(|a, b| (a.0.degree(), &a.0).cmp(&(b.0.degree(), &b.0)));
    let mut prod = BinaryForm::constant(BigInt::one());
    for (g, m) in &factors {
        prod = prod.mul(&g.pow(*m));
    }
    let lead_f = f.leading();
    let lead_p = prod.leading();
    let content = &lead_f / &lead_p;
    debug_assert_eq!(prod.scale(&content), *f);
    Ok(FactoredForm { content, factors })
}
