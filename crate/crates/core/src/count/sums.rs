//! Sums over base points: `N(B)`, `D(B)` and `𝔖(B)`.

use alloc::format;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::config::{static_violations, CountConfig, HorizontalCurve};
use super::detector::detector_r;
use super::CountError;
use crate::bundle::{BundleSurface, FibreReport};
use crate::conic::{count_points, enumerate_points, peyre_product, HeightSpec};

fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Coprime `(s, t)` with first nonzero coordinate positive and `max(|s|, |t|) ≤ cutoff`, sorted.
pub fn base_points(cutoff: u64) -> Vec<(i64, i64)> {
    let c = cutoff as i64;
    let mut out = Vec::new();
    if c >= 1 {
        out.push((0, 1));
    }
    for s in 1..=c {
        for t in -c..=c {
            if gcd_i64(s, t) == 1 {
                out.push((s, t));
            }
        }
    }
    out.sort_unstable();
    out
}

/// `⌊B^e⌋`, exact when `e = 1/2`.
pub fn fibre_cutoff(b: u64, exponent: f64) -> u64 {
    if exponent == 0.5 {
        return b.isqrt();
    }
    let fits = |c: u64| libm::pow(c as f64, 1.0 / exponent) <= b as f64 * (1.0 + 1e-12);
    let mut c = libm::floor(libm::pow(b as f64, exponent)) as u64;
    while fits(c + 1) {
        c += 1;
    }
    while c > 0 && !fits(c) {
        c -= 1;
    }
    c
}

/// Height on the fibre over `(s, t)`:
/// `m^{2−a1−a2−e} · max(|x0|, m^{a1}|x1|, m^{a2}|x2|)` with `m = max(|s|, |t|)`.
pub fn fibre_height(surface: &BundleSurface, s: i64, t: i64) -> Result<HeightSpec, CountError> {
    let [_, a1, a2] = surface.a();
    let m = BigRational::from_integer(BigInt::from(s.unsigned_abs().max(t.unsigned_abs())));
    if m.is_zero() {
        return Err(CountError::InvalidArgument("(0, 0) is not a base point".into()));
    }
    let b = 2 - a1 as i32 - a2 as i32 - surface.e() as i32;
    let pw = |k: i32| Pow::pow(&m, k);
    Ok(HeightSpec::diagonal([pw(b), pw(b + a1 as i32), pw(b + a2 as i32)])?)
}

/// Points of height at most `B` on the fibre over `(s, t)`, minus excluded curves.
/// Singular fibres contribute nothing.
pub fn fibre_count(surface: &BundleSurface, exclude: &[HorizontalCurve], s: i64, t: i64, b: u64) -> Result<u64, CountError> {
    let q = surface.fibre_i64(s, t);
    if !q.is_nondegenerate() || b == 0 {
        return Ok(0);
    }
    let h = fibre_height(surface, s, t)?;
    let bound = BigRational::from_integer(BigInt::from(b));
    if exclude.is_empty() {
        return Ok(count_points(&q, &h, &bound)?.count);
    }
    let (sb, tb) = (BigInt::from(s), BigInt::from(t));
    let pts = enumerate_points(&q, &h, &bound)?;
    Ok(pts.iter().filter(|x| !exclude.iter().any(|c| c.vanishes_at(&sb, &tb, x))).count() as u64)
}

/// `N_{U,H}(B)` restricted to fibres with `max(|s|, |t|) ≤ B^base_exponent`.
pub fn count_nb(surface: &BundleSurface, cfg: &CountConfig, b: u64) -> Result<u64, CountError> {
    let mut total = 0;
    for (s, t) in base_points(fibre_cutoff(b, cfg.base_exponent)) {
        total += fibre_count(surface, &cfg.exclude, s, t, b)?;
    }
    Ok(total)
}

/// Points of `M*(𝒫, B)`: coprime `(s, t) ∈ B·𝒟` congruent to `(σ, τ)` mod `w`, sorted.
pub fn region_points(cfg: &CountConfig, b: u64) -> Vec<(i64, i64)> {
    let ((s_lo, s_hi), (t_lo, t_hi)) = cfg.region.cone_ranges(b);
    let Ok(w) = i64::try_from(&cfg.w) else {
        return Vec::new();
    };
    let first = |lo: i64, r: i64| lo + (r - lo).rem_euclid(w);
    let (sg, tg) = cfg.congruence;
    let mut out = Vec::new();
    let mut s = first(s_lo, sg);
    while s <= s_hi {
        let mut t = first(t_lo, tg);
        while t <= t_hi {
            if gcd_i64(s, t) == 1 && cfg.region.cone_contains(s, t, b) {
                out.push((s, t));
            }
            t += w;
        }
        s += w;
    }
    out
}

/// `D(B) = Σ_{(s,t) ∈ M*(𝒫, B)} r(s, t)`.
pub fn divisor_sum_d(fibres: &[FibreReport], cfg: &CountConfig, b: u64) -> Result<BigRational, CountError> {
    if let Some(v) = static_violations(fibres, cfg).first() {
        return Err(CountError::Inadmissible(format!("{v}")));
    }
    let terms = region_points(cfg, b)
        .into_iter()
        .map(|(s, t)| detector_r(fibres, s, t, &cfg.w).map(|v| v.r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(exact_sum(terms))
}

/// Pairwise summation, which keeps the intermediate denominators small.
pub fn exact_sum(mut terms: Vec<BigRational>) -> BigRational {
    if terms.is_empty() {
        return BigRational::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a + b,
                None => a,
            });
        }
        terms = next;
    }
    terms.pop().unwrap()
}

/// `c(s, t) = ω_∞ ∏_{p ≤ p_max} (1 − 1/p) ω_p` for the fibre over `(s, t)`;
/// zero for singular or insoluble fibres.
pub fn fibre_density(surface: &BundleSurface, s: i64, t: i64, p_max: u64, quad_steps: usize) -> Result<f64, CountError> {
    let q = surface.fibre_i64(s, t);
    if !q.is_nondegenerate() {
        return Ok(0.0);
    }
    let h = fibre_height(surface, s, t)?;
    Ok(peyre_product(&q, &h, p_max, quad_steps)?.value)
}

/// `𝔖(B) = Σ c(s, t)` over coprime base points with `max(|s|, |t|) ≤ B`.
pub fn density_sum_sb(surface: &BundleSurface, b: u64, p_max: u64, quad_steps: usize) -> Result<f64, CountError> {
    let mut acc = 0.0;
    for (s, t) in base_points(b) {
        acc += fibre_density(surface, s, t, p_max, quad_steps)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::classify_fibres;
    use crate::bundle::tests::fermat;
    use crate::count::{build_admissible_config, Region};
    use num_traits::One;

    #[test]
    fn base_point_enumeration() {
        assert_eq!(base_points(0), Vec::new());
        assert_eq!(base_points(1), alloc::vec![(0, 1), (1, -1), (1, 0), (1, 1)]);
        let n = base_points(10).len();
        let brute = (-10i64..=10)
            .flat_map(|s| (-10i64..=10).map(move |t| (s, t)))
            .filter(|&(s, t)| gcd_i64(s, t) == 1)
            .count();
        assert_eq!(2 * n, brute);
    }

    #[test]
    fn cutoff_rounding() {
        assert_eq!(fibre_cutoff(100_000, 0.5), 316);
        assert_eq!(fibre_cutoff(1000, 1.0 / 3.0), 10);
        assert_eq!(fibre_cutoff(999, 1.0 / 3.0), 9);
    }

    #[test]
    fn count_zero_below_one_and_monotone() {
        let s = fermat();
        let cfg = CountConfig::plain(alloc::vec![]);
        assert_eq!(count_nb(&s, &cfg, 0).unwrap(), 0);
        let mut prev = 0;
        for b in [1u64, 4, 16, 64, 256] {
            let n = count_nb(&s, &cfg, b).unwrap();
            assert!(n >= prev);
            prev = n;
        }
        assert!(prev > 0);
    }

    #[test]
    fn excluding_a_curve_removes_its_points() {
        let s = fermat();
        let all = fibre_count(&s, &[], 1, -3, 200).unwrap();
        let pts = enumerate_points(&s.fibre_i64(1, -3), &fibre_height(&s, 1, -3).unwrap(), &BigRational::from_integer(BigInt::from(200))).unwrap();
        let x = &pts[0];
        let curve = HorizontalCurve {
            terms: alloc::vec![(x[1].clone(), [0, 0, 1, 0, 0]), (-x[0].clone(), [0, 0, 0, 1, 0])],
        };
        let kept = fibre_count(&s, &[curve], 1, -3, 200).unwrap();
        assert!(kept < all);
    }

    #[test]
    fn divisor_sum_small_cases() {
        let s = fermat();
        let f = classify_fibres(&s).unwrap();
        let cfg = build_admissible_config(&s, 1, -3).unwrap();
        assert_eq!(divisor_sum_d(&f, &cfg, 0).unwrap(), BigRational::zero());
        let mut prev = BigRational::zero();
        for b in [1u64, 8, 32, 64, 128] {
            let d = divisor_sum_d(&f, &cfg, b).unwrap();
            assert!(d >= prev);
            prev = d;
        }
        assert!(prev > BigRational::zero());
        let bad = CountConfig { congruence: (1, -1), region: Region::around(1, -1, &BigRational::new(BigInt::one(), BigInt::from(4))), ..cfg };
        assert!(matches!(divisor_sum_d(&f, &bad, 64), Err(CountError::Inadmissible(_))));
    }

    #[test]
    fn density_sum_positive() {
        let s = fermat();
        assert_eq!(density_sum_sb(&s, 0, 50, 200).unwrap(), 0.0);
        assert!(fibre_density(&s, 1, -3, 50, 400).unwrap() > 0.0);
        assert_eq!(fibre_density(&s, 1, 1, 50, 400).unwrap(), 0.0);
        assert!(density_sum_sb(&s, 3, 50, 200).unwrap() > 0.0);
    }
}
