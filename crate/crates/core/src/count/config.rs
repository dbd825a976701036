//! Congruence data `(𝒟, (σ, τ), w)` and its admissibility.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::detector::flat_part;
use super::sums::region_points;
use super::CountError;
use crate::arith::{factor_integer, jacobi, resultant, BinaryForm, NumberField, NumberFieldElement};
use crate::bundle::fibres::eval_at_root;
use crate::bundle::{classify_fibres, discriminant, fibre_discriminant, BundleSurface, FibreReport};
use crate::conic::is_soluble;

/// A closed box `[s_lo, s_hi] × [t_lo, t_hi]` in the real `(s, t)` plane.
///
/// Sums over `B·𝒟` use the cone segment `𝒟 = (0, 1]·box`, so that the sets
/// grow with `B`; signs of forms are the same on the box and on its cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub s: (BigRational, BigRational),
    pub t: (BigRational, BigRational),
}

impl Region {
    pub fn new(s: (BigRational, BigRational), t: (BigRational, BigRational)) -> Result<Self, CountError> {
        if s.0 > s.1 || t.0 > t.1 {
            return Err(CountError::InvalidArgument("empty region".into()));
        }
        Ok(Region { s, t })
    }

    /// The square of half-width `h` centred at `(s0, t0)`.
    pub fn around(s0: i64, t0: i64, h: &BigRational) -> Self {
        let c = |v: i64| BigRational::from_integer(BigInt::from(v));
        Region { s: (c(s0) - h, c(s0) + h), t: (c(t0) - h, c(t0) + h) }
    }

    pub fn contains(&self, s: &BigRational, t: &BigRational) -> bool {
        &self.s.0 <= s && s <= &self.s.1 && &self.t.0 <= t && t <= &self.t.1
    }

    /// Integer ranges of `B·𝒟`.
    pub fn scaled_ranges(&self, b: u64) -> ((i64, i64), (i64, i64)) {
        let bb = BigRational::from_integer(BigInt::from(b));
        let lo = |x: &BigRational| (x * &bb).ceil().to_integer().to_i64().unwrap_or(i64::MAX);
        let hi = |x: &BigRational| (x * &bb).floor().to_integer().to_i64().unwrap_or(i64::MIN);
        ((lo(&self.s.0), hi(&self.s.1)), (lo(&self.t.0), hi(&self.t.1)))
    }

    /// Whether `(s, t) ∈ B·(0, 1]·box`.
    pub fn cone_contains(&self, s: i64, t: i64, b: u64) -> bool {
        let bb = BigRational::from_integer(BigInt::from(b));
        let mut lo = BigRational::one();
        let mut hi: Option<BigRational> = None;
        for (v, (l, h)) in [(s, &self.s), (t, &self.t)] {
            let (l, h) = (l * &bb, h * &bb);
            if v == 0 {
                if l.is_positive() || h.is_negative() {
                    return false;
                }
                continue;
            }
            let vv = BigRational::from_integer(BigInt::from(v));
            let (a, c) = if v > 0 { (l / &vv, h / &vv) } else { (h / &vv, l / &vv) };
            if a > lo {
                lo = a;
            }
            hi = Some(match hi {
                Some(x) if x < c => x,
                _ => c,
            });
        }
        hi.is_some_and(|h| lo <= h)
    }

    /// Integer ranges of the bounding box of `B·(0, 1]·box`.
    pub fn cone_ranges(&self, b: u64) -> ((i64, i64), (i64, i64)) {
        let ((s0, s1), (t0, t1)) = self.scaled_ranges(b);
        ((s0.min(0), s1.max(0)), (t0.min(0), t1.max(0)))
    }

    pub fn contains_origin(&self) -> bool {
        !self.s.0.is_positive() && !self.s.1.is_negative() && !self.t.0.is_positive() && !self.t.1.is_negative()
    }

    pub fn area(&self) -> BigRational {
        (&self.s.1 - &self.s.0) * (&self.t.1 - &self.t.0)
    }

    /// Grid of `(n + 1)²` rational points covering the box, corners included.
    pub fn grid(&self, n: u32) -> Vec<(BigRational, BigRational)> {
        let nn = BigRational::from_integer(BigInt::from(n));
        let step = |lo: &BigRational, hi: &BigRational, i: u32| lo + (hi - lo) * BigRational::from_integer(BigInt::from(i)) / &nn;
        let mut out = Vec::with_capacity(((n + 1) * (n + 1)) as usize);
        for i in 0..=n {
            for j in 0..=n {
                out.push((step(&self.s.0, &self.s.1, i), step(&self.t.0, &self.t.1, j)));
            }
        }
        out
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.s.0, self.s.1, self.t.0, self.t.1)
    }
}

/// A horizontal curve `G(s, t; x0, x1, x2) = 0`, given by its terms
/// `c · s^i t^j x0^k x1^l x2^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalCurve {
    pub terms: Vec<(BigInt, [u32; 5])>,
}

impl HorizontalCurve {
    pub fn vanishes_at(&self, s: &BigInt, t: &BigInt, x: &[BigInt; 3]) -> bool {
        let vars = [s, t, &x[0], &x[1], &x[2]];
        let v: BigInt = self
            .terms
            .iter()
            .map(|(c, e)| (0..5).fold(c.clone(), |acc, i| acc * Pow::pow(vars[i], e[i])))
            .sum();
        v.is_zero()
    }
}

/// The triplet `(𝒟, (σ, τ), w)` together with the sampling parameters of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct CountConfig {
    pub b_values: Vec<u64>,
    /// Congruence modulus; flat parts are taken relative to its primes.
    pub w: BigInt,
    /// Exponent `l` with `w = w₀^l`, for reporting.
    pub exponent: u32,
    pub congruence: (i64, i64),
    pub region: Region,
    pub exclude: Vec<HorizontalCurve>,
    /// Fibres are selected with `max(|s|, |t|) ≤ B^base_exponent`.
    pub base_exponent: f64,
}

impl CountConfig {
    /// A configuration with trivial congruence data, enough for `count_nb`.
    pub fn plain(b_values: Vec<u64>) -> Self {
        let one = BigRational::one();
        CountConfig {
            b_values,
            w: BigInt::from(2),
            exponent: 1,
            congruence: (1, 1),
            region: Region::around(1, 1, &(one / BigRational::from_integer(BigInt::from(2)))),
            exclude: Vec::new(),
            base_exponent: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    EvenModulus,
    CoprimeCongruence,
    /// `Δ_p(σ, τ) ≠ 0`.
    BaseNonVanishing,
    SignConstancy,
    /// `Δ_p(s, t) ≠ 0` on sampled points.
    NonVanishing,
    /// `(δ_p(s,t) / Δ_p(s,t)^♭) = 1` on sampled points.
    JacobiOne,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::EvenModulus => "modulus divisible by 2",
            Condition::CoprimeCongruence => "gcd(sigma, tau) = 1",
            Condition::BaseNonVanishing => "Delta_p(sigma, tau) != 0",
            Condition::SignConstancy => "sign of Delta_p constant on the region",
            Condition::NonVanishing => "Delta_p(s, t) != 0",
            Condition::JacobiOne => "(delta_p(s,t) / Delta_p(s,t)^flat) = 1",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub s: i64,
    pub t: i64,
    /// Index into the fibre reports, when the condition concerns one factor.
    pub factor: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at ({}, {})", self.condition, self.s, self.t)?;
        if let Some(i) = self.factor {
            write!(f, " for factor {i}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub sampled: usize,
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }
}

const GRID: u32 = 32;
const MAX_VIOLATIONS: usize = 32;

fn sign_violations(fibres: &[FibreReport], region: &Region) -> Vec<Violation> {
    let mut out = Vec::new();
    if region.contains_origin() {
        out.push(Violation { condition: Condition::SignConstancy, s: 0, t: 0, factor: None });
        return out;
    }
    let pts = region.grid(GRID);
    for (i, rep) in fibres.iter().enumerate() {
        let signs: BTreeSet<i8> = pts
            .iter()
            .map(|(s, t)| {
                let v = rep.factor.eval_rat(s, t);
                if v.is_zero() {
                    0
                } else if v.is_positive() {
                    1
                } else {
                    -1
                }
            })
            .collect();
        if signs.len() != 1 || signs.contains(&0) {
            out.push(Violation { condition: Condition::SignConstancy, s: 0, t: 0, factor: Some(i) });
        }
    }
    out
}

/// Conditions that do not need sampling: parity, coprimality, `Δ_p(σ, τ) ≠ 0` and sign constancy.
pub(crate) fn static_violations(fibres: &[FibreReport], cfg: &CountConfig) -> Vec<Violation> {
    let (sg, tg) = cfg.congruence;
    let mut out = Vec::new();
    if cfg.w.is_odd() || !cfg.w.is_positive() {
        out.push(Violation { condition: Condition::EvenModulus, s: sg, t: tg, factor: None });
    }
    if !BigInt::from(sg).gcd(&BigInt::from(tg)).is_one() {
        out.push(Violation { condition: Condition::CoprimeCongruence, s: sg, t: tg, factor: None });
    }
    for (i, rep) in fibres.iter().enumerate() {
        if rep.factor.eval(&BigInt::from(sg), &BigInt::from(tg)).is_zero() {
            out.push(Violation { condition: Condition::BaseNonVanishing, s: sg, t: tg, factor: Some(i) });
        }
    }
    out.extend(sign_violations(fibres, &cfg.region));
    out
}

/// Up to `samples` distinct points of `M*(𝒫, ∞)`, taken from `B·𝒟` for `B = 1, 2, 4, …`.
fn sample_points(cfg: &CountConfig, samples: usize) -> Vec<(i64, i64)> {
    let mut seen = BTreeSet::new();
    let mut b: u64 = 1;
    while seen.len() < samples && b <= 1 << 40 {
        let ((s_lo, s_hi), (t_lo, t_hi)) = cfg.region.cone_ranges(b);
        let width = (s_hi.saturating_sub(s_lo) as f64 + 1.0) * (t_hi.saturating_sub(t_lo) as f64 + 1.0);
        let w = cfg.w.to_f64().unwrap_or(f64::INFINITY);
        if width / (w * w) > 64.0 * samples as f64 {
            break;
        }
        for p in region_points(cfg, b) {
            seen.insert(p);
            if seen.len() >= samples {
                break;
            }
        }
        b *= 2;
    }
    seen.into_iter().collect()
}

/// Runs the static checks, then non-vanishing and the Jacobi symbol condition on up to `samples` points.
pub fn admissibility_check(fibres: &[FibreReport], cfg: &CountConfig, samples: usize) -> AdmissibilityReport {
    let mut violations = static_violations(fibres, cfg);
    if !violations.is_empty() {
        return AdmissibilityReport { sampled: 0, violations };
    }
    let pts = sample_points(cfg, samples);
    for &(s, t) in &pts {
        let (sb, tb) = (BigInt::from(s), BigInt::from(t));
        for (i, rep) in fibres.iter().enumerate() {
            let v = rep.factor.eval(&sb, &tb);
            let condition = if v.is_zero() {
                Some(Condition::NonVanishing)
            } else {
                let flat = flat_part(&v, &cfg.w).expect("nonzero value");
                let d = rep.delta.eval(&sb, &tb);
                match jacobi(&d, &flat) {
                    Ok(1) => None,
                    _ => Some(Condition::JacobiOne),
                }
            };
            if let Some(condition) = condition {
                violations.push(Violation { condition, s, t, factor: Some(i) });
            }
        }
        if violations.len() >= MAX_VIOLATIONS {
            break;
        }
    }
    AdmissibilityReport { sampled: pts.len(), violations }
}

fn add_primes(set: &mut BTreeSet<BigInt>, n: &BigInt) -> Result<(), CountError> {
    if !n.is_zero() {
        for (p, _) in factor_integer(n)? {
            set.insert(p);
        }
    }
    Ok(())
}

fn s_derivative(f: &BinaryForm) -> BinaryForm {
    let n = f.degree();
    if n == 0 {
        return BinaryForm::zero(0);
    }
    let c = f.coeffs();
    BinaryForm::new((0..n).map(|k| &c[k] * BigInt::from((n - k) as u64)).collect())
}

/// Primes that must divide `w`: 2, the content of `Δ`, resultants between the
/// factors and with `δ_p`, leading coefficients and discriminants of the models.
pub fn bad_primes(s: &BundleSurface, fibres: &[FibreReport]) -> Result<BTreeSet<BigInt>, CountError> {
    let mut set = BTreeSet::new();
    set.insert(BigInt::from(2));
    add_primes(&mut set, &fibre_discriminant(s)?.content())?;
    for (i, p) in fibres.iter().enumerate() {
        for q in &fibres[i + 1..] {
            add_primes(&mut set, &resultant(&p.factor, &q.factor)?)?;
        }
        add_primes(&mut set, &resultant(&p.factor, &p.delta)?)?;
        add_primes(&mut set, &p.lead)?;
        add_primes(&mut set, &resultant(&p.model_factor, &s_derivative(&p.model_factor))?)?;
    }
    Ok(set)
}

/// Primes of `N(δ_p(θ_p, 1)) · Δ_p(s0, t0)` for every factor.
fn base_point_primes(fibres: &[FibreReport], s0: i64, t0: i64) -> Result<BTreeSet<BigInt>, CountError> {
    let mut set = BTreeSet::new();
    for rep in fibres {
        let (sb, tb) = (BigInt::from(s0), BigInt::from(t0));
        add_primes(&mut set, &rep.factor.eval(&sb, &tb))?;
        let field = NumberField::new(rep.field.clone())?;
        let theta = NumberFieldElement::generator(&field)
            .scale(&BigRational::new(BigInt::one(), rep.lead.clone()));
        let n_elem = eval_at_root(&rep.model_delta(), &theta);
        let n = n_elem.norm();
        add_primes(&mut set, n.numer())?;
        add_primes(&mut set, n.denom())?;
    }
    Ok(set)
}

fn largest_sign_constant_box(fibres: &[FibreReport], s0: i64, t0: i64) -> Option<Region> {
    let mut h = BigRational::from_integer(BigInt::from(s0.abs().max(t0.abs())));
    let shrink = BigRational::new(BigInt::from(7), BigInt::from(8));
    for _ in 0..200 {
        let region = Region::around(s0, t0, &h);
        if sign_violations(fibres, &region).is_empty() {
            return Some(region);
        }
        h *= &shrink;
    }
    None
}

const SAMPLES: usize = 2000;

/// A configuration around the base point `(s0, t0)` whose sampled checks pass.
///
/// The modulus starts as `w₀^l` with `w₀` the product of [`bad_primes`] and
/// `l = 2`; `l` grows on failure, and as a last resort the primes of the
/// base-point norms join `w₀`.
pub fn build_admissible_config(s: &BundleSurface, s0: i64, t0: i64) -> Result<CountConfig, CountError> {
    if !BigInt::from(s0).gcd(&BigInt::from(t0)).is_one() {
        return Err(CountError::InvalidBasePoint(format!("({s0}, {t0}) is not coprime")));
    }
    let fibres = classify_fibres(s)?;
    if discriminant(s)?.eval(&BigInt::from(s0), &BigInt::from(t0)).is_zero() {
        return Err(CountError::InvalidBasePoint(format!("the fibre over ({s0}, {t0}) is singular")));
    }
    if !is_soluble(&s.fibre_i64(s0, t0))? {
        return Err(CountError::InvalidBasePoint(format!("the fibre over ({s0}, {t0}) has no rational point")));
    }
    let region = largest_sign_constant_box(&fibres, s0, t0)
        .ok_or_else(|| CountError::InvalidBasePoint(format!("no sign-constant box around ({s0}, {t0})")))?;
    let mut primes = bad_primes(s, &fibres)?;
    let mut last: Option<Violation> = None;
    for extra in [false, true] {
        if extra {
            primes.extend(base_point_primes(&fibres, s0, t0)?);
        }
        let w0: BigInt = primes.iter().product();
        for l in 2..=6u32 {
            let cfg = CountConfig {
                b_values: vec![1 << 8, 1 << 10, 1 << 12],
                w: Pow::pow(&w0, l),
                exponent: l,
                congruence: (s0, t0),
                region: region.clone(),
                exclude: Vec::new(),
                base_exponent: 0.5,
            };
            let report = admissibility_check(&fibres, &cfg, SAMPLES);
            if report.is_admissible() {
                return Ok(cfg);
            }
            last = report.violations.into_iter().next();
        }
    }
    let why: String = last.map(|v| format!("{v}")).unwrap_or_default();
    Err(CountError::Inadmissible(why))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::tests::fermat;

    #[test]
    fn fermat_config() {
        let s = fermat();
        let cfg = build_admissible_config(&s, 1, -3).unwrap();
        assert_eq!(cfg.w, BigInt::from(36));
        assert!(cfg.w.is_even());
        let f = classify_fibres(&s).unwrap();
        let rep = admissibility_check(&f, &cfg, 10_000);
        assert!(rep.is_admissible(), "{:?}", rep.violations.first());
        assert!(rep.sampled >= 10_000);
        let bigger = CountConfig { w: &cfg.w * BigInt::from(5), ..cfg.clone() };
        assert!(admissibility_check(&f, &bigger, 2000).is_admissible());
    }

    #[test]
    fn under_divided_modulus_is_witnessed() {
        let s = fermat();
        let f = classify_fibres(&s).unwrap();
        let cfg = build_admissible_config(&s, 1, -3).unwrap();
        let weak = CountConfig { w: BigInt::from(6), ..cfg };
        let rep = admissibility_check(&f, &weak, 2000);
        let v = rep.violations.iter().find(|v| v.condition == Condition::JacobiOne).expect("violation");
        let value = f[v.factor.unwrap()].factor.eval(&BigInt::from(v.s), &BigInt::from(v.t));
        let flat = flat_part(&value, &weak.w).unwrap();
        let d = f[v.factor.unwrap()].delta.eval(&BigInt::from(v.s), &BigInt::from(v.t));
        assert_ne!(jacobi(&d, &flat).unwrap(), 1);
    }

    #[test]
    fn insoluble_or_singular_base_rejected() {
        let s = fermat();
        assert!(matches!(build_admissible_config(&s, 1, 1), Err(CountError::InvalidBasePoint(_))));
        assert!(matches!(build_admissible_config(&s, 1, 0), Err(CountError::InvalidBasePoint(_))));
        assert!(matches!(build_admissible_config(&s, 2, 4), Err(CountError::InvalidBasePoint(_))));
    }

    #[test]
    fn vanishing_point_flagged() {
        let s = fermat();
        let f = classify_fibres(&s).unwrap();
        let cfg = CountConfig {
            congruence: (1, -1),
            region: Region::around(1, -1, &BigRational::new(BigInt::one(), BigInt::from(4))),
            ..CountConfig::plain(vec![16])
        };
        let rep = admissibility_check(&f, &cfg, 100);
        assert!(rep.violations.iter().any(|v| v.condition == Condition::BaseNonVanishing));
        assert!(rep.violations.iter().any(|v| v.condition == Condition::SignConstancy));
    }

    #[test]
    fn region_geometry() {
        let r = Region::around(1, -2, &BigRational::new(BigInt::one(), BigInt::from(2)));
        assert_eq!(r.scaled_ranges(4), ((2, 6), (-10, -6)));
        assert_eq!(r.cone_ranges(4), ((0, 6), (-10, 0)));
        assert!(r.cone_contains(2, -6, 4));
        assert!(r.cone_contains(1, -2, 4));
        assert!(r.cone_contains(6, -10, 4));
        assert!(!r.cone_contains(2, -1, 4));
        assert!(!r.cone_contains(1, 0, 4));
        assert!(!r.cone_contains(7, -10, 4));
        assert!(!r.cone_contains(0, -3, 4));
        assert!(!r.contains_origin());
        assert_eq!(r.area(), BigRational::one());
        assert_eq!(r.grid(2).len(), 9);
    }

    #[test]
    fn excluded_curve() {
        let c = HorizontalCurve { terms: vec![(BigInt::one(), [1, 0, 1, 0, 0]), (BigInt::from(-1), [0, 1, 0, 1, 0])] };
        let b = |v: i64| BigInt::from(v);
        assert!(c.vanishes_at(&b(2), &b(3), &[b(3), b(2), b(7)]));
        assert!(!c.vanishes_at(&b(2), &b(3), &[b(1), b(2), b(7)]));
    }
}
