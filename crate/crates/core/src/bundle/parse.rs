//! Text format for surfaces.
//!
//! ```text
//! a: 0 0 1
//! e: 1
//! f 0 0 : 3 0
//! f 0 1 : 0
//! ```
//! Coefficients `c_0 .. c_d` of `Σ c_k s^{d−k} t^k`; a lone `0` is the zero form.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;

use super::{BundleError, BundleSurface, UPPER};
use crate::arith::BinaryForm;

fn err(line: usize, msg: impl Into<String>) -> BundleError {
    BundleError::Parse { line, msg: msg.into() }
}

fn ints(line: usize, s: &str) -> Result<Vec<BigInt>, BundleError> {
    s.split_whitespace()
        .map(|tok| tok.parse::<BigInt>().map_err(|_| err(line, format!("`{tok}` is not an integer"))))
        .collect()
}

fn small(line: usize, v: &BigInt) -> Result<u32, BundleError> {
    u32::try_from(v).map_err(|_| err(line, format!("`{v}` is not a small non-negative integer")))
}

pub fn parse_surface(text: &str) -> Result<BundleSurface, BundleError> {
    let mut a: Option<[u32; 3]> = None;
    let mut e: Option<u32> = None;
    let mut forms: [Option<(usize, Vec<BigInt>)>; 6] = Default::default();
    let mut last = 0;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        last = line;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let (key, rest) = body.split_once(':').ok_or_else(|| err(line, "expected `key: values`"))?;
        let key: Vec<&str> = key.split_whitespace().collect();
        match key.as_slice() {
            ["a"] => {
                let v = ints(line, rest)?;
                if v.len() != 3 {
                    return Err(err(line, format!("expected 3 twists, found {}", v.len())));
                }
                a = Some([small(line, &v[0])?, small(line, &v[1])?, small(line, &v[2])?]);
            }
            ["e"] => {
                let v = ints(line, rest)?;
                if v.len() != 1 {
                    return Err(err(line, format!("expected 1 value for e, found {}", v.len())));
                }
                e = Some(small(line, &v[0])?);
            }
            ["f", i, j] => {
                let (i, j) = match (i.parse::<usize>(), j.parse::<usize>()) {
                    (Ok(i), Ok(j)) if i < 3 && j < 3 => (i.min(j), i.max(j)),
                    _ => return Err(err(line, format!("bad index pair `{i} {j}`"))),
                };
                let slot = UPPER.iter().position(|&p| p == (i, j)).unwrap();
                if forms[slot].is_some() {
                    return Err(err(line, format!("f {i} {j} given twice")));
                }
                forms[slot] = Some((line, ints(line, rest)?));
            }
            _ => return Err(err(line, format!("unknown key `{}`", key.join(" ")))),
        }
    }
    let a = a.ok_or_else(|| err(last, "missing `a:` line"))?;
    let e = e.ok_or_else(|| err(last, "missing `e:` line"))?;
    let mut built: Vec<BinaryForm> = Vec::with_capacity(6);
    for (slot, &(i, j)) in UPPER.iter().enumerate() {
        let (line, c) = forms[slot].take().ok_or_else(|| err(last, format!("missing `f {i} {j}` line")))?;
        let d = (a[i] + a[j] + e) as usize;
        if c.len() == 1 && c[0] == BigInt::from(0) {
            built.push(BinaryForm::zero(d));
        } else if c.len() != d + 1 {
            return Err(err(line, format!("f {i} {j} needs {} coefficients (degree {d}), found {}", d + 1, c.len())));
        } else {
            built.push(BinaryForm::new(c));
        }
    }
    let forms: [BinaryForm; 6] = built.try_into().unwrap();
    BundleSurface::new(a, e, forms).map_err(|x| match x {
        BundleError::InvalidArgument(m) => err(1, m),
        other => other,
    })
}

impl fmt::Display for BundleSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.a();
        writeln!(f, "a: {} {} {}", a[0], a[1], a[2])?;
        writeln!(f, "e: {}", self.e())?;
        for (i, j) in UPPER {
            let form = self.form(i, j);
            let body: Vec<String> =
                if form.is_zero() { alloc::vec!["0".into()] } else { form.coeffs().iter().map(|c| c.to_string()).collect() };
            writeln!(f, "f {i} {j} : {}", body.join(" "))?;
        }
        Ok(())
    }
}
