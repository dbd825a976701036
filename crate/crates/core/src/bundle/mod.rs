//! Conic bundle surfaces `Σ f_{i,j}(s,t) x_i x_j = 0` inside `F(a0,a1,a2)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{ArithError, BinaryForm};
use crate::conic::{ConicError, TernaryQuadraticForm};

mod delpezzo;
pub(crate) mod fibres;
mod parse;

pub use delpezzo::{is_del_pezzo, macaulay_resultant_quadrics, DelPezzoVerdict};
pub use fibres::{classify_fibres, FibreReport};
pub use parse::parse_surface;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BundleError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate surface: the discriminant vanishes identically")]
    Degenerate,
    #[error("surface is not smooth: {0}")]
    NotSmooth(String),
    #[error("inconsistent with smoothness: {0}")]
    Inconsistent(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Conic(#[from] ConicError),
}

/// Index pairs of the upper triangle, in file and constructor order.
pub const UPPER: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// A surface of bidegree `(e, 2)` in `F(0, a1, a2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSurface {
    a: [u32; 3],
    e: u32,
    f: [[BinaryForm; 3]; 3],
}

impl BundleSurface {
    /// `forms` lists `f00, f01, f02, f11, f12, f22`; a zero form of any degree
    /// is accepted and resized.
    pub fn new(a: [u32; 3], e: u32, forms: [BinaryForm; 6]) -> Result<Self, BundleError> {
        if a[0] != 0 {
            return Err(BundleError::InvalidArgument(format!("twists must be normalized with a0 = 0, got {}", a[0])));
        }
        let mut f: [[BinaryForm; 3]; 3] = core::array::from_fn(|_| core::array::from_fn(|_| BinaryForm::zero(0)));
        for (form, &(i, j)) in forms.into_iter().zip(UPPER.iter()) {
            let d = (a[i] + a[j] + e) as usize;
            let form = if form.is_zero() { BinaryForm::zero(d) } else { form };
            if form.degree() != d {
                return Err(BundleError::InvalidArgument(format!(
                    "f{i}{j} has degree {} but the twist data requires {d}",
                    form.degree()
                )));
            }
            f[i][j] = form.clone();
            f[j][i] = form;
        }
        Ok(BundleSurface { a, e, f })
    }

    /// The diagonal surface `f00 x0² + f11 x1² + f22 x2²`.
    pub fn diagonal(a: [u32; 3], e: u32, d: [BinaryForm; 3]) -> Result<Self, BundleError> {
        let [d0, d1, d2] = d;
        let z = || BinaryForm::zero(0);
        Self::new(a, e, [d0, z(), z(), d1, z(), d2])
    }

    pub fn a(&self) -> [u32; 3] {
        self.a
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn form(&self, i: usize, j: usize) -> &BinaryForm {
        &self.f[i][j]
    }

    /// Expected degree `2(a0+a1+a2) + 3e` of the discriminant.
    pub fn expected_disc_degree(&self) -> usize {
        (2 * self.a.iter().sum::<u32>() + 3 * self.e) as usize
    }

    pub fn gram_at(&self, s: &BigInt, t: &BigInt) -> [[BigInt; 3]; 3] {
        core::array::from_fn(|i| core::array::from_fn(|j| self.f[i][j].eval(s, t)))
    }

    /// The fibre conic over `(s : t)`.
    pub fn fibre(&self, s: &BigInt, t: &BigInt) -> TernaryQuadraticForm {
        let g = self.gram_at(s, t);
        let two = BigInt::from(2);
        TernaryQuadraticForm::new(
            g[0][0].clone(),
            &g[0][1] * &two,
            g[1][1].clone(),
            &g[0][2] * &two,
            &g[1][2] * &two,
            g[2][2].clone(),
        )
    }

    pub fn fibre_i64(&self, s: i64, t: i64) -> TernaryQuadraticForm {
        self.fibre(&BigInt::from(s), &BigInt::from(t))
    }

    /// Applies `(s, t) ↦ (s, t + k s)` to every coefficient form.
    pub fn shear(&self, k: i64) -> Self {
        let f = core::array::from_fn(|i| core::array::from_fn(|j| self.f[i][j].shear(k)));
        BundleSurface { a: self.a, e: self.e, f }
    }

    /// Multiplies every coefficient form by `k`.
    pub fn scale(&self, k: &BigInt) -> Self {
        let f = core::array::from_fn(|i| core::array::from_fn(|j| self.f[i][j].scale(k)));
        BundleSurface { a: self.a, e: self.e, f }
    }

    pub fn upper_forms(&self) -> [BinaryForm; 6] {
        UPPER.map(|(i, j)| self.f[i][j].clone())
    }
}

fn det3(m: &[[BinaryForm; 3]; 3]) -> BinaryForm {
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0].mul(&m[r1][c1]).sub(&m[r0][c1].mul(&m[r1][c0]));
    m[0][0].mul(&minor(1, 2, 1, 2)).sub(&m[0][1].mul(&minor(1, 2, 0, 2))).add(&m[0][2].mul(&minor(1, 2, 0, 1)))
}

/// `Δ_π(s,t)`, the determinant of the matrix of coefficient forms.
pub fn discriminant(s: &BundleSurface) -> Result<BinaryForm, BundleError> {
    let d = det3(&s.f);
    if d.is_zero() {
        return Err(BundleError::Degenerate);
    }
    Ok(d)
}

/// `Δ(s,t) = −4 Δ_π(s,t)`, the discriminant of every fibre conic.
pub fn fibre_discriminant(s: &BundleSurface) -> Result<BinaryForm, BundleError> {
    Ok(discriminant(s)?.scale(&BigInt::from(-4)))
}

/// Primitive gcd of the nonzero coefficient forms.
pub fn common_factor(s: &BundleSurface) -> Option<BinaryForm> {
    let mut g: Option<BinaryForm> = None;
    for (i, j) in UPPER {
        let f = &s.f[i][j];
        if f.is_zero() {
            continue;
        }
        g = Some(match g {
            None => f.normalized(),
            Some(h) => h.gcd(f),
        });
    }
    g
}

/// Whether a nonzero binary form has no repeated factor.
pub fn is_squarefree_form(f: &BinaryForm) -> bool {
    if f.t_valuation() > 1 {
        return false;
    }
    let p = f.dehomogenize().to_q();
    match p.degree() {
        None => false,
        Some(0) => true,
        Some(_) => p.gcd(&p.derivative()).degree() == Some(0),
    }
}

/// Squarefree nonzero discriminant and coprime coefficient forms.
pub fn smoothness_check(s: &BundleSurface) -> bool {
    let Ok(d) = discriminant(s) else {
        return false;
    };
    if !is_squarefree_form(&d) {
        return false;
    }
    matches!(common_factor(s), Some(g) if g.degree() == 0)
}

/// `−K_X = M + (2 − a0 − a1 − a2 − e) F` as `(1, 2 − Σa − e)`.
pub fn anticanonical(s: &BundleSurface) -> (i64, i64) {
    (1, 2 - s.a.iter().map(|&x| x as i64).sum::<i64>() - s.e as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntersectionNumbers {
    pub f2: i64,
    pub mf: i64,
    pub m2: i64,
    pub kx2: i64,
}

pub fn intersection_numbers(s: &BundleSurface) -> IntersectionNumbers {
    let sum_a = s.a.iter().map(|&x| x as i64).sum::<i64>();
    let e = s.e as i64;
    IntersectionNumbers { f2: 0, mf: 2, m2: 2 * sum_a + e, kx2: 8 - (2 * sum_a + 3 * e) }
}

/// Anticanonical height at the real place of a canonical representative:
/// `max_i max(|s|,|t|)^{a_i} |x_i|` divided by `max(|s|,|t|)^{Σa + e − 2}`.
pub fn height(surface: &BundleSurface, s: &BigInt, t: &BigInt, x: &[BigInt; 3]) -> Result<BigRational, BundleError> {
    if !s.gcd(t).is_one() {
        return Err(BundleError::InvalidArgument(format!("base point ({s}, {t}) is not coprime")));
    }
    if x.iter().all(Zero::is_zero) {
        return Err(BundleError::InvalidArgument("fibre coordinates are all zero".into()));
    }
    let m = s.abs().max(t.abs());
    let num = (0..3).map(|i| m.pow(surface.a[i]) * x[i].abs()).max().unwrap();
    let k = surface.a.iter().map(|&v| v as i64).sum::<i64>() + surface.e as i64 - 2;
    let mk = m.pow(k.unsigned_abs() as u32);
    Ok(if k >= 0 { BigRational::new(num, mk) } else { BigRational::from_integer(num * mk) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceInvariants {
    pub deg_delta: usize,
    pub kx2: i64,
    pub minus_k: (i64, i64),
    pub rho: usize,
    pub complexity: usize,
    pub split_points: Vec<FibreReport>,
    pub nonsplit_points: Vec<FibreReport>,
}

pub fn invariants(s: &BundleSurface) -> Result<SurfaceInvariants, BundleError> {
    let d = discriminant(s)?;
    let reports = classify_fibres(s)?;
    let (split_points, nonsplit_points): (Vec<_>, Vec<_>) = reports.into_iter().partition(|r| r.split);
    Ok(SurfaceInvariants {
        deg_delta: d.degree(),
        kx2: 8 - d.degree() as i64,
        minus_k: anticanonical(s),
        rho: 2 + split_points.len(),
        complexity: nonsplit_points.iter().map(|r| r.degree).sum(),
        split_points,
        nonsplit_points,
    })
}
