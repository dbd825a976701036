//! Classification of the singular fibres as split or non-split.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{discriminant, smoothness_check, BundleError, BundleSurface};
use crate::arith::{factor_binary_form, nf_is_square, BinaryForm, NumberField, NumberFieldElement, ZPoly};

/// One closed point of the discriminant locus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibreReport {
    /// Irreducible factor `Δ_p` of the discriminant in the input coordinates.
    pub factor: BinaryForm,
    /// `Δ_p(s, t + k s)` for the recorded shear `k`; its value at `(1, 0)` is nonzero.
    pub model_factor: BinaryForm,
    pub shear: i64,
    pub degree: usize,
    /// `b_p = Δ_p(1, 0)` in the sheared coordinates.
    pub lead: BigInt,
    /// Monic model `Δ̃_p(x) = b_p^{n−1} Δ_p(x / b_p, 1)` with root `θ̃_p = b_p θ_p`.
    pub field: ZPoly,
    pub singular_index: usize,
    /// `δ_p` in the input coordinates.
    pub delta: BinaryForm,
    pub split: bool,
}

impl FibreReport {
    /// `δ_p` in the sheared coordinates.
    pub fn model_delta(&self) -> BinaryForm {
        self.delta.shear(self.shear)
    }
}

/// Smallest `k ≥ 0` with `Δ(1, k) ≠ 0`.
pub fn first_good_shear(delta: &BinaryForm) -> i64 {
    let one = BigInt::one();
    (0i64..).find(|&k| !delta.eval(&one, &BigInt::from(k)).is_zero()).unwrap()
}

pub(crate) fn monic_model(f: &BinaryForm) -> ZPoly {
    let c = f.coeffs();
    let n = f.degree();
    let b = &c[0];
    let mut out = alloc::vec![BigInt::zero(); n + 1];
    out[n] = BigInt::one();
    for k in 1..=n {
        out[n - k] = &c[k] * b.pow(k as u32 - 1);
    }
    ZPoly::new(out)
}

pub(crate) fn eval_at_root(f: &BinaryForm, theta: &NumberFieldElement) -> NumberFieldElement {
    let field = theta.field();
    let mut acc = NumberFieldElement::from_int(field, 0);
    for c in f.coeffs() {
        acc = acc.mul(theta).add(&NumberFieldElement::from_rational(field, BigRational::from_integer(c.clone())));
    }
    acc
}

/// Kernel vector of a rank-2 matrix, normalized so its first nonzero entry is 1.
fn kernel_vector(m: [[NumberFieldElement; 3]; 3]) -> Option<[NumberFieldElement; 3]> {
    let field = m[0][0].field().clone();
    let mut rows: Vec<[NumberFieldElement; 3]> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..3 {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv()?;
        rows[r] = rows[r].clone().map(|x| x.mul(&inv));
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let k = rows[i][c].clone();
                let pr = rows[r].clone();
                for j in 0..3 {
                    rows[i][j] = rows[i][j].sub(&k.mul(&pr[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() != 2 {
        return None;
    }
    let free = (0..3).find(|c| !pivots.contains(c))?;
    let mut v: [NumberFieldElement; 3] = core::array::from_fn(|_| NumberFieldElement::from_int(&field, 0));
    v[free] = NumberFieldElement::from_int(&field, 1);
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = rows[row][free].neg();
    }
    let lead = v.iter().find(|x| !x.is_zero())?.inv()?;
    Some(v.map(|x| x.mul(&lead)))
}

fn classify_factor(
    surface: &BundleSurface,
    sheared: &BundleSurface,
    factor: &BinaryForm,
    shear: i64,
) -> Result<FibreReport, BundleError> {
    let model_factor = factor.shear(shear).normalized();
    let lead = model_factor.coeffs()[0].clone();
    let field_poly = monic_model(&model_factor);
    let field: Arc<NumberField> = NumberField::new(field_poly.clone())?;
    let theta = NumberFieldElement::generator(&field).scale(&BigRational::new(BigInt::one(), lead.clone()));
    let gram = core::array::from_fn(|i| core::array::from_fn(|j| eval_at_root(sheared.form(i, j), &theta)));
    let kernel = kernel_vector(gram)
        .ok_or_else(|| BundleError::Inconsistent(format!("fibre over {factor} does not have rank 2")))?;
    let singular_index = kernel.iter().position(|x| !x.is_zero()).unwrap();
    let (j, k) = match singular_index {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let fjk = surface.form(j, k);
    let delta = fjk.mul(fjk).sub(&surface.form(j, j).mul(surface.form(k, k))).scale(&BigInt::from(4));
    let at_theta = eval_at_root(&delta.shear(shear), &theta);
    if at_theta.is_zero() {
        return Err(BundleError::Inconsistent(format!("δ vanishes at the root of {factor}")));
    }
    let split = nf_is_square(&at_theta)?;
    Ok(FibreReport {
        factor: factor.clone(),
        degree: factor.degree(),
        model_factor,
        shear,
        lead,
        field: field_poly,
        singular_index,
        delta,
        split,
    })
}

/// Reports for every irreducible factor of `Δ_π`, sorted by degree and then coefficients.
pub fn classify_fibres(s: &BundleSurface) -> Result<Vec<FibreReport>, BundleError> {
    if !smoothness_check(s) {
        return Err(BundleError::NotSmooth("discriminant has a repeated factor or the forms share a factor".into()));
    }
    let delta = discriminant(s)?;
    let shear = first_good_shear(&delta);
    let sheared = s.shear(shear);
    let factored = factor_binary_form(&delta)?;
    let mut out = Vec::with_capacity(factored.factors.len());
    for (f, _) in &factored.factors {
        out.push(classify_factor(s, &sheared, f, shear)?);
    }
    out.sort_by(|a, b| (a.degree, &a.factor).cmp(&(b.degree, &b.factor)));
    Ok(out)
}
