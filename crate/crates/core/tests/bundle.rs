use cbundle_core::arith::{jacobi, valuation, BinaryForm};
use cbundle_core::bundle::*;
use cbundle_core::conic::{chi_p, disc_ternary, rank_mod_p};
use cbundle_core::count::bad_primes;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SHAPES: [([u32; 3], u32); 7] =
    [([0, 0, 0], 1), ([0, 0, 0], 2), ([0, 0, 1], 0), ([0, 0, 1], 1), ([0, 1, 1], 0), ([0, 0, 2], 0), ([0, 1, 2], 1)];

fn random_form(rng: &mut ChaCha8Rng, degree: usize, bound: i64) -> BinaryForm {
    let c: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-bound..=bound)).collect();
    BinaryForm::from_i64(&c)
}

fn random_surface(rng: &mut ChaCha8Rng, shapes: &[([u32; 3], u32)]) -> BundleSurface {
    loop {
        let (a, e) = shapes[rng.gen_range(0..shapes.len())];
        let idx = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
        let forms = idx.map(|(i, j)| random_form(rng, (a[i] + a[j] + e) as usize, 3));
        if let Ok(s) = BundleSurface::new(a, e, forms) {
            if discriminant(&s).is_ok() {
                return s;
            }
        }
    }
}

fn random_smooth(rng: &mut ChaCha8Rng, shapes: &[([u32; 3], u32)]) -> BundleSurface {
    loop {
        let s = random_surface(rng, shapes);
        if smoothness_check(&s) {
            return s;
        }
    }
}

#[test]
fn specialized_discriminant_and_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let s = random_surface(&mut rng, &SHAPES);
        let d = discriminant(&s).unwrap();
        let [a0, a1, a2] = s.a();
        assert_eq!(d.degree(), (2 * (a0 + a1 + a2) + 3 * s.e()) as usize);
        for _ in 0..20 {
            let (x, y) = (BigInt::from(rng.gen_range(-50..=50)), BigInt::from(rng.gen_range(-50..=50)));
            assert_eq!(disc_ternary(&s.fibre(&x, &y)), BigInt::from(-4) * d.eval(&x, &y));
        }
    }
}

#[test]
fn fibre_degrees_partition_the_discriminant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..40 {
        let s = random_smooth(&mut rng, &SHAPES[..5]);
        let inv = invariants(&s).unwrap();
        let total: usize = inv.split_points.iter().chain(&inv.nonsplit_points).map(|r| r.degree).sum();
        assert_eq!(total, inv.deg_delta);
        assert_eq!(inv.rho, 2 + inv.split_points.len());
        assert_eq!(inv.complexity, inv.nonsplit_points.iter().map(|r| r.degree).sum::<usize>());
        for r in inv.split_points.iter().chain(&inv.nonsplit_points) {
            assert_eq!(r.delta.degree() % 2, 0);
        }
    }
}

fn odd_primes(n: u64) -> Vec<u64> {
    let (mut n, mut out, mut p) = (n, Vec::new(), 3);
    while n % 2 == 0 && n > 0 {
        n /= 2;
    }
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[test]
fn local_symbols_and_valuations() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for _ in 0..30 {
        let s = random_smooth(&mut rng, &SHAPES[..5]);
        let fibres = classify_fibres(&s).unwrap();
        let bad = bad_primes(&s, &fibres).unwrap();
        let d = discriminant(&s).unwrap();
        for _ in 0..20 {
            let (x, y) = loop {
                let (x, y) = (rng.gen_range(-40i64..=40), rng.gen_range(-40i64..=40));
                if x.gcd(&y) == 1 {
                    break (BigInt::from(x), BigInt::from(y));
                }
            };
            let values: Vec<BigInt> = fibres.iter().map(|r| r.factor.eval(&x, &y)).collect();
            let total = d.eval(&x, &y);
            if total.is_zero() {
                continue;
            }
            let q = s.fibre(&x, &y);
            for (i, (rep, v)) in fibres.iter().zip(&values).enumerate() {
                let Some(small) = v.abs().to_u64() else { continue };
                for p in odd_primes(small) {
                    let pb = BigInt::from(p);
                    if bad.contains(&pb) {
                        continue;
                    }
                    assert!(values.iter().enumerate().all(|(j, w)| j == i || !w.is_multiple_of(&pb)));
                    assert_eq!(valuation(&total, &pb).unwrap(), valuation(v, &pb).unwrap());
                    assert_eq!(rank_mod_p(&q, p).unwrap(), 2);
                    let delta = rep.delta.eval(&x, &y);
                    assert_eq!(chi_p(&q, p).unwrap(), jacobi(&delta, &pb).unwrap(), "{q} mod {p}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn split_flags_survive_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let s = random_smooth(&mut rng, &SHAPES[..5]);
        let lam = BigInt::from(rng.gen_range(2..=7));
        let before: Vec<(BinaryForm, bool)> = classify_fibres(&s).unwrap().into_iter().map(|r| (r.factor, r.split)).collect();
        let after: Vec<(BinaryForm, bool)> =
            classify_fibres(&s.scale(&lam)).unwrap().into_iter().map(|r| (r.factor, r.split)).collect();
        assert_eq!(before.len(), after.len());
        for ((fa, sa), (fb, sb)) in before.iter().zip(&after) {
            assert_eq!(sa, sb, "{fa} vs {fb}");
        }
    }
}

#[test]
fn irreducible_quartic_with_square_delta_is_one_split_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut found = 0;
    while found < 5 {
        let f11 = random_form(&mut rng, 2, 4);
        let f12 = random_form(&mut rng, 2, 4);
        let forms = [
            BinaryForm::from_i64(&[1]),
            BinaryForm::zero(1),
            BinaryForm::zero(1),
            f11,
            f12,
            BinaryForm::from_i64(&[-1, 0, 0]),
        ];
        let Ok(s) = BundleSurface::new([0, 1, 1], 0, forms) else { continue };
        if discriminant(&s).is_err() || !smoothness_check(&s) {
            continue;
        }
        let fibres = classify_fibres(&s).unwrap();
        if fibres.len() != 1 || fibres[0].singular_index != 1 {
            continue;
        }
        assert_eq!(fibres[0].degree, 4);
        assert!(fibres[0].split, "{}", fibres[0].factor);
        let inv = invariants(&s).unwrap();
        assert_eq!((inv.rho, inv.complexity), (3, 0));
        found += 1;
    }
}
