//! The Picard lattice of P² blown up in `9 − d` points: lines, roots and
//! conic classes, all found by exhaustive search.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::DpError;
use crate::arith::linalg::rank_rat;

/// A class `d0 H + d1 E1 + ... + dr Er` with pairing `diag(1, −1, ..., −1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PicClass {
    pub coords: Vec<i64>,
}

impl PicClass {
    pub fn new(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty());
        PicClass { coords }
    }

    /// `K = −3H + E1 + ... + Er`.
    pub fn canonical(r: usize) -> Self {
        let mut coords = vec![1; r + 1];
        coords[0] = -3;
        PicClass { coords }
    }

    pub fn zero(r: usize) -> Self {
        PicClass { coords: vec![0; r + 1] }
    }

    /// Number of exceptional curves `r = 9 − d`.
    pub fn r(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn dot(&self, other: &PicClass) -> i64 {
        assert_eq!(self.coords.len(), other.coords.len());
        let tail: i64 = self.coords[1..].iter().zip(&other.coords[1..]).map(|(a, b)| a * b).sum();
        self.coords[0] * other.coords[0] - tail
    }

    pub fn square(&self) -> i64 {
        self.dot(self)
    }

    pub fn add(&self, other: &PicClass) -> PicClass {
        PicClass { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &PicClass) -> PicClass {
        PicClass { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, k: i64) -> PicClass {
        PicClass { coords: self.coords.iter().map(|a| k * a).collect() }
    }

    /// Reflection `D ↦ D + (D·R) R` in a root `R`.
    pub fn reflect(&self, root: &PicClass) -> PicClass {
        self.add(&root.scale(self.dot(root)))
    }
}

impl fmt::Display for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.coords[0])?;
        for (i, c) in self.coords[1..].iter().enumerate() {
            write!(f, "{}{c}", if i == 0 { " " } else { ", " })?;
        }
        write!(f, ")")
    }
}

fn exceptional_count(d: u32) -> Result<usize, DpError> {
    if (1..=7).contains(&d) {
        Ok(9 - d as usize)
    } else {
        Err(DpError::InvalidDegree(d))
    }
}

/// All classes with `D² = sq` and `D·K = k` on the blow-up in `r` points.
///
/// Writing `D = (a; b)`, the constraints read `Σ b_i² = a² − sq` and
/// `Σ b_i = −3a − k`. Cauchy–Schwarz turns them into
/// `(9 − r) a² + 6k a + k² + r·sq ≤ 0`, a convex quadratic in `a`, so the
/// search over `a` is an interval and the `b` search is a finite recursion.
pub fn classes_with(r: usize, sq: i64, k: i64) -> Vec<PicClass> {
    assert!(r <= 8);
    let lead = 9 - r as i64;
    let q = |a: i64| lead * a * a + 6 * k * a + k * k + r as i64 * sq;
    let centre = -3 * k / lead;
    let mut out = Vec::new();
    let (mut lo, mut hi) = (centre, centre);
    while q(lo - 1) <= 0 || q(lo) <= 0 {
        lo -= 1;
    }
    while q(hi + 1) <= 0 || q(hi) <= 0 {
        hi += 1;
    }
    for a in lo..=hi {
        let norm = a * a - sq;
        let sum = -3 * a - k;
        if norm < 0 || sum * sum > r as i64 * norm {
            continue;
        }
        let mut b = vec![0; r];
        fill(&mut b, 0, sum, norm, &mut |b| {
            let mut coords = Vec::with_capacity(r + 1);
            coords.push(a);
            coords.extend_from_slice(b);
            out.push(PicClass { coords });
        });
    }
    out.sort();
    out
}

fn fill(b: &mut [i64], i: usize, sum: i64, norm: i64, emit: &mut dyn FnMut(&[i64])) {
    let left = (b.len() - i) as i64;
    if left == 0 {
        if sum == 0 && norm == 0 {
            emit(b);
        }
        return;
    }
    let m = norm.isqrt();
    for x in -m..=m {
        let (s, n) = (sum - x, norm - x * x);
        if s * s <= (left - 1) * n {
            b[i] = x;
            fill(b, i + 1, s, n, emit);
        }
    }
}

/// Lines with intersection matrix. `adjacency[i][j] = L_i · L_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineConfiguration {
    pub d: u32,
    pub lines: Vec<PicClass>,
    pub adjacency: Vec<Vec<i64>>,
}

impl LineConfiguration {
    pub fn index_of(&self, c: &PicClass) -> Option<usize> {
        self.lines.binary_search(c).ok()
    }

    pub fn r(&self) -> usize {
        9 - self.d as usize
    }
}

/// Classes with `L² = −1` and `L·K = −1`.
pub fn lines(d: u32) -> Result<LineConfiguration, DpError> {
    let r = exceptional_count(d)?;
    let lines = classes_with(r, -1, -1);
    let adjacency = lines.iter().map(|a| lines.iter().map(|b| a.dot(b)).collect()).collect();
    Ok(LineConfiguration { d, lines, adjacency })
}

/// Classes with `R² = −2` and `R·K = 0`.
pub fn roots(d: u32) -> Result<Vec<PicClass>, DpError> {
    Ok(classes_with(exceptional_count(d)?, -2, 0))
}

/// `E_i − E_{i+1}` together with `H − E1 − E2 − E3` when `r ≥ 3`.
pub fn simple_roots(d: u32) -> Result<Vec<PicClass>, DpError> {
    let r = exceptional_count(d)?;
    let mut out = Vec::new();
    if r >= 3 {
        let mut c = vec![0; r + 1];
        c[0] = 1;
        c[1..4].fill(-1);
        out.push(PicClass { coords: c });
    }
    for i in 1..r {
        let mut c = vec![0; r + 1];
        c[i] = 1;
        c[i + 1] = -1;
        out.push(PicClass { coords: c });
    }
    Ok(out)
}

/// Classes with `C² = 0` and `−K·C = 2`.
pub fn conic_classes(d: u32) -> Result<Vec<PicClass>, DpError> {
    Ok(classes_with(exceptional_count(d)?, 0, -2))
}

/// The unordered line pairs `{L, L'}` with `L + L' = C`, as sorted index pairs.
pub fn singular_pairs(config: &LineConfiguration, conic: &PicClass) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, l) in config.lines.iter().enumerate() {
        if let Some(j) = config.index_of(&conic.sub(l)) {
            if i < j {
                out.push((i, j));
            }
        }
    }
    out
}

/// Rank over Q of a set of classes.
pub fn span_rank(classes: &[PicClass]) -> usize {
    if classes.is_empty() {
        return 0;
    }
    let m: Vec<Vec<BigRational>> =
        classes.iter().map(|c| c.coords.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    rank_rat(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_square_is_degree() {
        for d in 1..=7u32 {
            assert_eq!(PicClass::canonical(9 - d as usize).square(), d as i64);
        }
    }

    #[test]
    fn counts() {
        let expect = [(1, 240, 240, 2160), (2, 56, 126, 126), (3, 27, 72, 27), (4, 16, 40, 10), (5, 10, 20, 5), (6, 6, 8, 3), (7, 3, 2, 2)];
        for (d, l, r, c) in expect {
            assert_eq!(lines(d).unwrap().lines.len(), l, "lines d = {d}");
            assert_eq!(roots(d).unwrap().len(), r, "roots d = {d}");
            assert_eq!(conic_classes(d).unwrap().len(), c, "conics d = {d}");
        }
        assert!(lines(8).is_err() && lines(0).is_err());
    }

    #[test]
    fn conics_are_sums_of_meeting_lines() {
        for d in 1..=7u32 {
            let cfg = lines(d).unwrap();
            for c in conic_classes(d).unwrap() {
                let pairs = singular_pairs(&cfg, &c);
                assert_eq!(pairs.len(), 8 - d as usize, "{c}");
                for (i, j) in pairs {
                    assert_eq!(cfg.adjacency[i][j], 1);
                }
            }
        }
    }

    #[test]
    fn simple_roots_are_roots() {
        for d in 1..=6u32 {
            let all = roots(d).unwrap();
            for s in simple_roots(d).unwrap() {
                assert!(all.binary_search(&s).is_ok(), "{s}");
            }
        }
    }
}
