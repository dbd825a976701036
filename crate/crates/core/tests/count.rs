use cbundle_core::arith::{jacobi, valuation, BinaryForm, NumberField, NumberFieldElement, QPoly};
use cbundle_core::bundle::{classify_fibres, height, BundleSurface, FibreReport};
use cbundle_core::conic::{local_density, omega_inf};
use cbundle_core::count::*;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fermat() -> BundleSurface {
    BundleSurface::diagonal(
        [0, 0, 1],
        1,
        [BinaryForm::from_i64(&[3, 0]), BinaryForm::from_i64(&[0, 3]), BinaryForm::from_i64(&[1, 0, 0, 1])],
    )
    .unwrap()
}

/// `x0² + (s² − 2t²) x1² + 2st x1x2 + (s² − 3t²) x2²` in F(0, 1, 1).
fn dp4() -> BundleSurface {
    BundleSurface::new(
        [0, 1, 1],
        0,
        [
            BinaryForm::from_i64(&[1]),
            BinaryForm::zero(1),
            BinaryForm::zero(1),
            BinaryForm::from_i64(&[1, 0, -2]),
            BinaryForm::from_i64(&[0, 1, 0]),
            BinaryForm::from_i64(&[1, 0, -3]),
        ],
    )
    .unwrap()
}

fn bi(n: i64) -> BigInt {
    BigInt::from(n)
}

fn trial_primes(n: u64) -> Vec<u64> {
    let (mut n, mut out, mut p) = (n, Vec::new(), 2);
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn random_coprime(rng: &mut ChaCha8Rng, bound: i64) -> (i64, i64) {
    loop {
        let (s, t) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        if s.gcd(&t) == 1 {
            return (s, t);
        }
    }
}

fn factor_values(fibres: &[FibreReport], s: i64, t: i64) -> Option<Vec<BigInt>> {
    let v: Vec<BigInt> = fibres.iter().map(|r| r.factor.eval(&bi(s), &bi(t))).collect();
    v.iter().all(|x| !x.is_zero()).then_some(v)
}

#[test]
fn detector_matches_divisor_enumeration() {
    let fibres = classify_fibres(&fermat()).unwrap();
    let w = bi(36);
    let w_primes = trial_primes(36);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 1000 {
        let (s, t) = random_coprime(&mut rng, 150);
        if factor_values(&fibres, s, t).is_none() {
            continue;
        }
        let got = detector_r(&fibres, s, t, &w).unwrap();
        let mut expect = BigRational::one();
        for (rep, term) in fibres.iter().zip(&got.per_factor) {
            let value = rep.factor.eval(&bi(s), &bi(t)).abs().to_u64().unwrap();
            let delta = rep.delta.eval(&bi(s), &bi(t));
            let mut flat = value;
            for p in &w_primes {
                while flat % p == 0 {
                    flat /= p;
                }
            }
            assert_eq!(term.flat, BigInt::from(flat));
            let mut one_f = BigRational::one();
            for p in trial_primes(flat).into_iter().filter(|&p| p != 2) {
                one_f *= BigRational::new(BigInt::from(p - 2), BigInt::from(p));
            }
            let sum: i64 = (1..=flat).filter(|d| flat % d == 0).map(|d| jacobi(&delta, &BigInt::from(d)).unwrap() as i64).sum();
            assert_eq!(term.one_f, one_f);
            assert_eq!(term.divisor_sum, bi(sum), "({s}, {t})");
            expect *= one_f * BigRational::from_integer(bi(sum));
        }
        assert_eq!(got.r, expect);
        assert!(!got.r.is_negative());
        checked += 1;
    }
}

#[test]
fn fermat_detector_at_one_two() {
    let fibres = classify_fibres(&fermat()).unwrap();
    let w = bi(6) * bad_primes(&fermat(), &fibres).unwrap().iter().fold(BigInt::one(), |a, p| a * p);
    let v = detector_r(&fibres, 1, 2, &w).unwrap();
    let mut values: Vec<BigInt> = v.per_factor.iter().map(|f| f.value.abs()).collect();
    values.sort();
    assert_eq!(values, vec![bi(1), bi(2), bi(3), bi(3)]);
    assert!(v.per_factor.iter().all(|f| f.flat.is_one() && f.divisor_sum.is_one()));
    assert_eq!(v.r, BigRational::one());
}

#[test]
fn split_symbols_are_trivial_off_the_modulus() {
    let s = fermat();
    let fibres = classify_fibres(&s).unwrap();
    let cfg = build_admissible_config(&s, 1, -3).unwrap();
    let pts = region_points(&cfg, 256);
    assert!(pts.len() > 100);
    for &(a, b) in &pts {
        let v = detector_r(&fibres, a, b, &cfg.w).unwrap();
        let mut all_nonneg = true;
        for (rep, term) in fibres.iter().zip(&v.per_factor) {
            let delta = rep.delta.eval(&bi(a), &bi(b));
            for p in trial_primes(term.flat.to_u64().unwrap()) {
                let chi = jacobi(&delta, &BigInt::from(p)).unwrap();
                if rep.split {
                    assert!(chi >= 0, "split factor {} at ({a}, {b}) mod {p}", rep.factor);
                    assert_eq!(term.divisor_sum, divisor_count(term.flat.to_u64().unwrap()));
                }
                all_nonneg &= chi >= 0;
            }
        }
        if all_nonneg {
            assert!(v.r.is_positive(), "({a}, {b})");
        }
    }
}

fn divisor_count(n: u64) -> BigInt {
    BigInt::from((1..=n).filter(|d| n.is_multiple_of(*d)).count())
}

#[test]
fn local_density_lower_bound() {
    let s = fermat();
    let fibres = classify_fibres(&s).unwrap();
    let bad = bad_primes(&s, &fibres).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 300 {
        let (a, b) = random_coprime(&mut rng, 60);
        let Some(values) = factor_values(&fibres, a, b) else { continue };
        let q = s.fibre_i64(a, b);
        for v in &values {
            for p in trial_primes(v.abs().to_u64().unwrap()) {
                if p == 2 || bad.contains(&BigInt::from(p)) {
                    continue;
                }
                let rep = local_density(&q, p).unwrap();
                let chi = BigRational::from_integer(BigInt::from(rep.chi.unwrap()));
                let geometric = (0..=rep.v_delta).map(|k| num_traits::Pow::pow(&chi, k)).fold(BigRational::zero(), |x, y| x + y);
                let factor = BigRational::new(BigInt::from(p - 2), BigInt::from(p));
                assert!(rep.sigma >= factor * geometric, "({a}, {b}) p = {p}");
                checked += 1;
            }
        }
    }
}

#[test]
fn valuation_matches_norm_of_linear_element() {
    let s = fermat();
    let fibres = classify_fibres(&s).unwrap();
    let w = bi(36);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    while checked < 200 {
        let (a, b) = random_coprime(&mut rng, 80);
        if factor_values(&fibres, a, b).is_none() {
            continue;
        }
        for rep in &fibres {
            let value = rep.factor.eval(&bi(a), &bi(b));
            let field = NumberField::new(rep.field.clone()).unwrap();
            let (s1, t1) = (bi(a), bi(b) - bi(rep.shear) * bi(a));
            // b_p s − θ̃_p t in the sheared coordinates.
            let elt = NumberFieldElement::from_poly(
                &field,
                QPoly::new(vec![BigRational::from_integer(&rep.lead * &s1), BigRational::from_integer(-t1)]),
            );
            let norm = elt.norm();
            assert!(norm.is_integer());
            for p in trial_primes(value.abs().to_u64().unwrap()) {
                let p = BigInt::from(p);
                if !w.gcd(&p).is_one() {
                    continue;
                }
                assert_eq!(valuation(&value, &p).unwrap(), valuation(&norm.to_integer(), &p).unwrap(), "({a}, {b}) {}", rep.factor);
                checked += 1;
            }
        }
    }
}

#[test]
fn archimedean_density_scales_like_t_minus_two() {
    let s = fermat();
    for (a, b) in [(1i64, -3i64), (3, -4), (4, -1)] {
        let base = omega_inf(&s.fibre_i64(a, b), &fibre_height(&s, a, b).unwrap(), 4000).unwrap();
        for k in [2i64, 4, 8] {
            let scaled = omega_inf(&s.fibre_i64(k * a, k * b), &fibre_height(&s, k * a, k * b).unwrap(), 4000).unwrap();
            let expect = base / (k * k) as f64;
            assert!(((scaled - expect) / expect).abs() < 1e-3, "({a}, {b}) T = {k}: {scaled} vs {expect}");
        }
    }
}

/// Canonical primitive points on the fibre with height at most `b`, by a box
/// search that solves for `x0`.
fn brute_fibre_count(surface: &BundleSurface, s: i64, t: i64, b: i64) -> u64 {
    let q = surface.fibre_i64(s, t);
    let [qa, qb, qc, qd, qe, qf] = q.coeffs().map(|c| c.to_i64().unwrap());
    let m = s.abs().max(t.abs());
    let [_, a1, a2] = surface.a();
    let lim = |ai: u32| b / m.pow(ai);
    let (sb, tb, bound) = (bi(s), bi(t), BigRational::from_integer(bi(b)));
    let mut n = 0;
    for x1 in -lim(a1)..=lim(a1) {
        for x2 in -lim(a2)..=lim(a2) {
            let lin = qb * x1 + qd * x2;
            let cst = qc * x1 * x1 + qe * x1 * x2 + qf * x2 * x2;
            let mut roots = Vec::new();
            if qa == 0 {
                if lin != 0 && cst % lin == 0 {
                    roots.push(-cst / lin);
                }
            } else {
                let disc = lin * lin - 4 * qa * cst;
                if disc < 0 {
                    continue;
                }
                let r = disc.isqrt();
                if r * r != disc {
                    continue;
                }
                for num in [-lin + r, -lin - r] {
                    if num % (2 * qa) == 0 {
                        roots.push(num / (2 * qa));
                    }
                }
                roots.dedup();
            }
            for x0 in roots {
                let x = [x0, x1, x2];
                if x0.gcd(&x1).gcd(&x2) != 1 || x.iter().find(|&&c| c != 0).is_none_or(|&c| c < 0) {
                    continue;
                }
                if height(surface, &sb, &tb, &x.map(BigInt::from)).unwrap() <= bound {
                    n += 1;
                }
            }
        }
    }
    n
}

#[test]
fn weighted_fibre_counts_match_brute_force() {
    for (surface, b) in [(fermat(), 120i64), (dp4(), 400)] {
        for (s, t) in base_points(8) {
            if !surface.fibre_i64(s, t).is_nondegenerate() {
                continue;
            }
            let fast = fibre_count(&surface, &[], s, t, b as u64).unwrap();
            assert_eq!(fast, brute_fibre_count(&surface, s, t, b), "({s}, {t}) B = {b}");
        }
    }
}

#[test]
fn dp4_total_count_matches_fibrewise_brute_force() {
    let surface = dp4();
    let b = 1000;
    let brute: u64 = base_points(fibre_cutoff(b as u64, 0.5))
        .into_iter()
        .filter(|&(s, t)| surface.fibre_i64(s, t).is_nondegenerate())
        .map(|(s, t)| brute_fibre_count(&surface, s, t, b))
        .sum();
    assert_eq!(count_nb(&surface, &CountConfig::plain(vec![]), b as u64).unwrap(), brute);
}
