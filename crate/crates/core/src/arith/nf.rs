//! Number fields `Q[x]/(m)` in the power basis of a monic irreducible `m`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::linalg::det_rat;
use super::poly::{QPoly, ZPoly};
use super::zassenhaus::factor_zpoly;
use super::ArithError;

/// Largest field degree accepted by [`nf_is_square`].
pub const MAX_SQUARE_DEGREE: usize = 8;

/// The field `Q[x]/(m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberField {
    modulus: ZPoly,
    mq: QPoly,
}

impl NumberField {
    /// Builds the field after checking that `m` is monic and irreducible over Q.
    pub fn new(modulus: ZPoly) -> Result<Arc<Self>, ArithError> {
        let n = modulus.degree().ok_or(ArithError::InvalidField)?;
        if n == 0 || !modulus.lead().is_one() {
            return Err(ArithError::InvalidField);
        }
        let fs = factor_zpoly(&modulus);
        if fs.len() != 1 || fs[0].1 != 1 {
            return Err(ArithError::InvalidField);
        }
        let mq = modulus.to_q();
        Ok(Arc::new(NumberField { modulus, mq }))
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    pub fn modulus(&self) -> &ZPoly {
        &self.modulus
    }
}

/// Element of a [`NumberField`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberFieldElement {
    field: Arc<NumberField>,
    poly: QPoly,
}

impl NumberFieldElement {
    pub fn from_poly(field: &Arc<NumberField>, p: QPoly) -> Self {
        let poly = p.rem(&field.mq);
        NumberFieldElement { field: field.clone(), poly }
    }

    pub fn from_rational(field: &Arc<NumberField>, q: BigRational) -> Self {
        Self::from_poly(field, QPoly::new(vec![q]))
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(BigInt::from(n)))
    }

    /// The class of `x`.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, QPoly::new(vec![BigRational::zero(), BigRational::one()]))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// Power-basis coordinates, padded to the field degree.
    pub fn coords(&self) -> Vec<BigRational> {
        let mut c = self.poly.0.clone();
        c.resize(self.field.degree(), BigRational::zero());
        c
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        NumberFieldElement { field: self.field.clone(), poly: self.poly.add(&o.poly) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        NumberFieldElement { field: self.field.clone(), poly: self.poly.sub(&o.poly) }
    }

    pub fn neg(&self) -> Self {
        NumberFieldElement { field: self.field.clone(), poly: QPoly::zero().sub(&self.poly) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_poly(&self.field, self.poly.mul(&o.poly))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        NumberFieldElement { field: self.field.clone(), poly: self.poly.scale(q) }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let (_, s, _) = self.poly.ext_gcd(&self.field.mq);
        Some(Self::from_poly(&self.field, s))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_int(&self.field, 1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Matrix of multiplication by `self` in the power basis (columns are images).
    pub fn mult_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.field.degree();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        let mut basis = Self::from_int(&self.field, 1);
        let x = Self::generator(&self.field);
        for j in 0..n {
            let img = self.mul(&basis).coords();
            for i in 0..n {
                m[i][j] = img[i].clone();
            }
            basis = basis.mul(&x);
        }
        m
    }

    pub fn norm(&self) -> BigRational {
        det_rat(&self.mult_matrix())
    }
}

fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> QPoly {
    let n = xs.len();
    let mut coef: Vec<BigRational> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = QPoly::new(vec![coef[n - 1].clone()]);
    for i in (0..n - 1).rev() {
        p = p.mul(&QPoly::new(vec![-xs[i].clone(), BigRational::one()])).add(&QPoly::new(vec![coef[i].clone()]));
    }
    p
}

type KPoly = Vec<NumberFieldElement>;

fn kpoly_trim(p: &mut KPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn kpoly_rem(a: &KPoly, b: &KPoly) -> KPoly {
    let mut r = a.clone();
    kpoly_trim(&mut r);
    let db = b.len() - 1;
    let inv = b[db].inv().expect("nonzero lead");
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap().mul(&inv);
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = r[k + j].sub(&c.mul(bj));
        }
        r.pop();
        kpoly_trim(&mut r);
    }
    r
}

fn kpoly_gcd(a: &KPoly, b: &KPoly) -> KPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    kpoly_trim(&mut a);
    kpoly_trim(&mut b);
    while !b.is_empty() {
        let r = kpoly_rem(&a, &b);
        a = b;
        b = r;
    }
    let inv = a.last().and_then(|c| c.inv());
    match inv {
        Some(inv) => a.iter().map(|c| c.mul(&inv)).collect(),
        None => a,
    }
}

/// `u(y + c)` for a rational polynomial `u` and field element `c`.
fn shift_into_field(u: &QPoly, c: &NumberFieldElement) -> KPoly {
    let field = c.field().clone();
    let lin = [c.clone(), NumberFieldElement::from_int(&field, 1)];
    let mut acc: KPoly = vec![NumberFieldElement::from_int(&field, 0)];
    for coef in u.0.iter().rev() {
        let mut next: KPoly = vec![NumberFieldElement::from_int(&field, 0); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, l) in lin.iter().enumerate() {
                next[i + j] = next[i + j].add(&a.mul(l));
            }
        }
        next[0] = next[0].add(&NumberFieldElement::from_rational(&field, coef.clone()));
        acc = next;
    }
    kpoly_trim(&mut acc);
    acc
}

/// A square root of `alpha` in its field, if one exists.
pub fn nf_sqrt(alpha: &NumberFieldElement) -> Result<Option<NumberFieldElement>, ArithError> {
    let field = alpha.field().clone();
    let n = field.degree();
    if n > MAX_SQUARE_DEGREE {
        return Err(ArithError::Unsupported(format!("nf_is_square: field degree {n} exceeds {MAX_SQUARE_DEGREE}")));
    }
    if alpha.is_zero() {
        return Ok(Some(alpha.clone()));
    }
    let theta = NumberFieldElement::generator(&field);
    for k in 0i64.. {
        let shift = theta.scale(&BigRational::from_integer(BigInt::from(k)));
        let xs: Vec<BigRational> = (0..=2 * n as i64).map(|j| BigRational::from_integer(BigInt::from(j))).collect();
        let ys: Vec<BigRational> = xs
            .iter()
            .map(|y| {
                let v = NumberFieldElement::from_rational(&field, y.clone()).sub(&shift);
                v.mul(&v).sub(alpha).norm()
            })
            .collect();
        let norm_poly = interpolate(&xs, &ys);
        if norm_poly.gcd(&norm_poly.derivative()).degree() != Some(0) {
            continue;
        }
        let h: KPoly = vec![alpha.neg(), NumberFieldElement::from_int(&field, 0), NumberFieldElement::from_int(&field, 1)];
        for (u, _) in factor_zpoly(&norm_poly.primitive_z()) {
            if u.degree() != Some(n) {
                continue;
            }
            let g = kpoly_gcd(&h, &shift_into_field(&u.to_q(), &shift));
            if g.len() == 2 {
                let root = g[0].neg();
                if root.mul(&root) == *alpha {
                    return Ok(Some(root));
                }
            }
        }
        return Ok(None);
    }
    unreachable!()
}

/// Whether `alpha` is a square in its field.
pub fn nf_is_square(alpha: &NumberFieldElement) -> Result<bool, ArithError> {
    Ok(nf_sqrt(alpha)?.is_some())
}
