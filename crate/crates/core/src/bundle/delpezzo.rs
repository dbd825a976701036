//! Del Pezzo criteria for the standard conic bundle models of degree 2 to 5.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::Zero;

use super::{smoothness_check, BundleError, BundleSurface};
use crate::arith::linalg::det_int;
use crate::arith::{resultant, BinaryForm};
use crate::dp::table4_model;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DelPezzoVerdict {
    Yes,
    No(String),
    Indeterminate(String),
}

/// Ternary quadric as `(exponent, coefficient)` pairs.
type Quadric = Vec<([u32; 3], BigInt)>;

fn monomials(deg: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for e0 in (0..=deg).rev() {
        for e1 in (0..=deg - e0).rev() {
            out.push([e0, e1, deg - e0 - e1]);
        }
    }
    out
}

/// Resultant of three ternary quadrics up to sign, from the 15 × 15 Macaulay
/// matrix divided by its extraneous 3 × 3 minor. `None` when the minor vanishes.
pub fn macaulay_resultant_quadrics(q: &[[[BigInt; 3]; 3]; 3]) -> Option<BigInt> {
    let polys: Vec<Quadric> = q
        .iter()
        .map(|m| {
            let mut p = Quadric::new();
            for i in 0..3 {
                for j in i..3 {
                    let c = if i == j { m[i][i].clone() } else { &m[i][j] + &m[j][i] };
                    let mut e = [0u32; 3];
                    e[i] += 1;
                    e[j] += 1;
                    p.push((e, c));
                }
            }
            p
        })
        .collect();
    let cols = monomials(4);
    let index = |e: [u32; 3]| cols.iter().position(|c| *c == e).unwrap();
    let mut matrix = Vec::with_capacity(cols.len());
    let mut extraneous = Vec::new();
    for (r, m) in cols.iter().enumerate() {
        let var = (0..3).find(|&i| m[i] >= 2).unwrap();
        if (0..3).filter(|&i| m[i] >= 2).count() >= 2 {
            extraneous.push(r);
        }
        let mut shift = *m;
        shift[var] -= 2;
        let mut row = alloc::vec![BigInt::zero(); cols.len()];
        for (e, c) in &polys[var] {
            row[index([e[0] + shift[0], e[1] + shift[1], e[2] + shift[2]])] += c;
        }
        matrix.push(row);
    }
    let minor: Vec<Vec<BigInt>> = extraneous.iter().map(|&r| extraneous.iter().map(|&c| matrix[r][c].clone()).collect()).collect();
    let dm = det_int(&minor);
    if dm.is_zero() {
        return None;
    }
    Some(det_int(&matrix) / dm)
}

fn dp3(s: &BundleSurface) -> DelPezzoVerdict {
    let c = |i: usize, j: usize, k: usize| s.form(i, j).coeffs()[k].clone();
    let two = BigInt::from(2);
    let q1 = BinaryForm::new(alloc::vec![c(0, 0, 0), &two * c(0, 1, 0), c(1, 1, 0)]);
    let q2 = BinaryForm::new(alloc::vec![c(0, 0, 1), &two * c(0, 1, 1), c(1, 1, 1)]);
    if q1.is_zero() || q2.is_zero() {
        return DelPezzoVerdict::No("one of the two binary quadratics vanishes identically".into());
    }
    match resultant(&q1, &q2) {
        Ok(r) if !r.is_zero() => DelPezzoVerdict::Yes,
        _ => DelPezzoVerdict::No(format!("the quadratics {q1} and {q2} share a root")),
    }
}

fn dp2(s: &BundleSurface) -> DelPezzoVerdict {
    let q: [[[BigInt; 3]; 3]; 3] =
        core::array::from_fn(|k| core::array::from_fn(|i| core::array::from_fn(|j| s.form(i, j).coeffs()[k].clone())));
    match macaulay_resultant_quadrics(&q) {
        None => DelPezzoVerdict::Indeterminate("extraneous Macaulay minor vanishes".into()),
        Some(r) if r.is_zero() => DelPezzoVerdict::No("the quadrics a, b, c have a common zero".into()),
        Some(_) => DelPezzoVerdict::Yes,
    }
}

/// Whether a smooth surface in the standard bundle model for degree `d` is del Pezzo.
pub fn is_del_pezzo(s: &BundleSurface, d: u32) -> Result<DelPezzoVerdict, BundleError> {
    let model = table4_model(d).map_err(|_| BundleError::InvalidArgument(format!("degree {d} is not in 1..=5")))?;
    if !smoothness_check(s) {
        return Err(BundleError::NotSmooth("del Pezzo criteria need a smooth surface".into()));
    }
    if s.a() != model.a || s.e() != model.e {
        return Ok(DelPezzoVerdict::No(format!(
            "model mismatch: degree {d} lives in F{:?} with e = {}, got F{:?} with e = {}",
            model.a,
            model.e,
            s.a(),
            s.e()
        )));
    }
    Ok(match d {
        5 => DelPezzoVerdict::Yes,
        4 => {
            if s.form(0, 0).is_zero() {
                DelPezzoVerdict::No("f00 vanishes, so x1 = x2 = 0 is a curve with −K·C = 0".into())
            } else {
                DelPezzoVerdict::Yes
            }
        }
        3 => dp3(s),
        2 => dp2(s),
        _ => DelPezzoVerdict::Indeterminate("degree 1 criterion is not implemented".into()),
    })
}
