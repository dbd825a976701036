//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cbundle::drivers;
use cbundle_core::arith::{jacobi, BinaryForm};
use cbundle_core::bundle::{classify_fibres, discriminant, invariants, parse_surface, smoothness_check, BundleSurface};
use cbundle_core::conic::{
    count_points, disc_ternary, is_soluble, mp_count, omega_inf, rank_mod_p, sigma_p_closed, sigma_p_oracle, HeightSpec,
    TernaryQuadraticForm,
};
use cbundle_core::count::{build_admissible_config, detector_r, fibre_height, CountConfig};
use cbundle_core::dp::{
    lines, subgroup_classes, summarize, theorem11_check, weyl_group, ClassLimits, SubgroupClass,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn bi(n: i64) -> BigInt {
    BigInt::from(n)
}

fn data(name: &str) -> BundleSurface {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_surface(&std::fs::read_to_string(&path).expect("data file")).expect("valid surface")
}

fn random_form(rng: &mut ChaCha8Rng, bound: i64) -> TernaryQuadraticForm {
    loop {
        let q = TernaryQuadraticForm::from_i64(core::array::from_fn(|_| rng.gen_range(-bound..=bound)));
        if q.is_nondegenerate() {
            return q;
        }
    }
}

/// Forms with `rank mod p ≥ 2`, shared by the first two checks.
fn density_sample() -> Vec<(TernaryQuadraticForm, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();
    while out.len() < 150 {
        let p = [3u64, 5, 7, 11, 13][rng.gen_range(0..5)];
        let q = random_form(&mut rng, 20);
        if rank_mod_p(&q, p).unwrap() >= 2 {
            out.push((q, p));
        }
    }
    out
}

fn closed_equals_oracle(sample: &[(TernaryQuadraticForm, u64)]) -> Outcome {
    for (q, p) in sample {
        let r = sigma_p_closed(q, *p).map_err(|e| format!("{q} p={p}: {e}"))?;
        let oracle = sigma_p_oracle(q, *p, r.v_delta + 2).map_err(|e| e.to_string())?;
        ensure!(r.sigma == oracle, "{q} p={p}: closed {} oracle {oracle}", r.sigma);
    }
    Ok(format!("{} forms", sample.len()))
}

fn geometric_bounds(sample: &[(TernaryQuadraticForm, u64)]) -> Outcome {
    let mut rank_two = 0;
    for (q, p) in sample {
        let r = sigma_p_closed(q, *p).map_err(|e| e.to_string())?;
        let Some(chi) = r.chi else { continue };
        let geo: BigRational = (0..=r.v_delta).map(|k| BigRational::from_integer(bi(chi as i64).pow(k))).sum();
        let lower = (BigRational::one() - BigRational::new(bi(2), bi(*p as i64))) * &geo;
        ensure!(lower <= r.sigma && r.sigma <= geo, "{q} p={p}: {} outside [{lower}, {geo}]", r.sigma);
        rank_two += 1;
    }
    ensure!(rank_two > 0, "no rank 2 reductions in the sample");
    Ok(format!("{rank_two} rank 2 reductions"))
}

fn mp_formula() -> Outcome {
    let mut checked = 0;
    for p in [3i64, 5, 7, 11, 13] {
        for a in -5i64..=5 {
            for b in -5i64..=5 {
                if (2 * a * b) % p == 0 {
                    continue;
                }
                let mut n = 0i64;
                for x0 in 0..p {
                    for x1 in 0..p {
                        for x2 in 1..p {
                            n += ((a * x0 * x0 + b * x1 * x1 - x2 * x2).rem_euclid(p) == 0) as i64;
                        }
                    }
                }
                let got = mp_count(&bi(a), &bi(b), p as u64).map_err(|e| e.to_string())?;
                ensure!(got == bi(n), "A={a} B={b} p={p}: {got} vs {n}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} triples"))
}

fn random_surface(rng: &mut ChaCha8Rng) -> BundleSurface {
    const SHAPES: [([u32; 3], u32); 7] =
        [([0, 0, 0], 1), ([0, 0, 0], 2), ([0, 0, 1], 0), ([0, 0, 1], 1), ([0, 1, 1], 0), ([0, 0, 2], 0), ([0, 1, 2], 1)];
    loop {
        let (a, e) = SHAPES[rng.gen_range(0..SHAPES.len())];
        let forms = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)].map(|(i, j)| {
            let c: Vec<i64> = (0..=a[i] + a[j] + e).map(|_| rng.gen_range(-3..=3)).collect();
            BinaryForm::from_i64(&c)
        });
        if let Ok(s) = BundleSurface::new(a, e, forms) {
            if discriminant(&s).is_ok() {
                return s;
            }
        }
    }
}

fn structural_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let s = random_surface(&mut rng);
        let d = discriminant(&s).map_err(|e| e.to_string())?;
        let [a0, a1, a2] = s.a();
        ensure!(d.degree() == (2 * (a0 + a1 + a2) + 3 * s.e()) as usize, "degree of {d}");
        for _ in 0..20 {
            let (x, y) = (bi(rng.gen_range(-50..=50)), bi(rng.gen_range(-50..=50)));
            ensure!(disc_ternary(&s.fibre(&x, &y)) == bi(-4) * d.eval(&x, &y), "fibre at ({x}, {y})");
        }
    }
    Ok("100 surfaces x 20 points".into())
}

/// `(sw + a)³ + (sw − a)³ + (tw + b)³ + (tw − b)³ = 2w · Q_{s,t}(a, b, w)` on a
/// grid wide enough to force a polynomial identity.
fn fermat_derivation(s: &BundleSurface) -> Outcome {
    let grid = [-2i64, -1, 1, 3, 5];
    for &u in &grid {
        for &v in &grid {
            let q = s.fibre_i64(u, v);
            for &a in &grid {
                for &b in &grid {
                    for &w in &grid {
                        let cube = |x: i64| bi(x).pow(3);
                        let lhs = cube(u * w + a) + cube(u * w - a) + cube(v * w + b) + cube(v * w - b);
                        let rhs = bi(2 * w) * q.eval(&[bi(a), bi(b), bi(w)]);
                        ensure!(lhs == rhs, "identity fails at s={u} t={v} ({a}, {b}, {w})");
                    }
                }
            }
        }
    }
    Ok(String::new())
}

fn fermat_end_to_end() -> Outcome {
    let s = data("fermat.surface");
    fermat_derivation(&s)?;
    let inv = invariants(&s).map_err(|e| e.to_string())?;
    let degs = |v: &[cbundle_core::bundle::FibreReport]| {
        let mut d: Vec<usize> = v.iter().map(|r| r.degree).collect();
        d.sort();
        d
    };
    ensure!(smoothness_check(&s), "not smooth");
    ensure!(inv.deg_delta == 5, "deg Δ = {}", inv.deg_delta);
    ensure!(degs(&inv.nonsplit_points) == [1, 1], "non-split degrees {:?}", degs(&inv.nonsplit_points));
    ensure!(degs(&inv.split_points) == [1, 2], "split degrees {:?}", degs(&inv.split_points));
    ensure!(inv.complexity == 2 && inv.rho == 4, "c = {}, rho = {}", inv.complexity, inv.rho);
    Ok("deg 5, non-split {1,1}, split {1,2}, c = 2, rho = 4".into())
}

/// Primitive points with `max |x_i| ≤ b` and first non-zero coordinate
/// positive, solving for `x0` over a box in `(x1, x2)`.
fn brute_conic_count(q: &TernaryQuadraticForm, b: i64) -> u64 {
    let [qa, qb, qc, qd, qe, qf] = q.coeffs().map(|c| c.to_i64().unwrap());
    let mut n = 0;
    for x1 in -b..=b {
        for x2 in -b..=b {
            let lin = qb * x1 + qd * x2;
            let cst = qc * x1 * x1 + qe * x1 * x2 + qf * x2 * x2;
            let mut roots = Vec::new();
            if qa == 0 {
                if lin != 0 && cst % lin == 0 {
                    roots.push(-cst / lin);
                } else if lin == 0 && cst == 0 {
                    roots.extend(-b..=b);
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
                if x0.abs() > b || x0.gcd(&x1).gcd(&x2) != 1 || x.iter().find(|&&c| c != 0).is_none_or(|&c| c < 0) {
                    continue;
                }
                n += 1;
            }
        }
    }
    n
}

fn conic_counting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h = HeightSpec::identity();
    let bound = |b: i64| BigRational::from_integer(bi(b));
    let mut notes = Vec::new();
    let mut checked = 0;
    while checked < 5 {
        let q = random_form(&mut rng, 10);
        if !is_soluble(&q).map_err(|e| e.to_string())? {
            continue;
        }
        let n3 = count_points(&q, &h, &bound(1000)).map_err(|e| e.to_string())?.count;
        let brute = brute_conic_count(&q, 1000);
        ensure!(n3 == brute, "{q}: count {n3} vs enumeration {brute}");
        let n4 = count_points(&q, &h, &bound(10_000)).map_err(|e| e.to_string())?.count as f64 / 1e4;
        let n5 = count_points(&q, &h, &bound(100_000)).map_err(|e| e.to_string())?.count as f64 / 1e5;
        ensure!((n5 / n4 - 1.0).abs() < 0.1, "{q}: N/B {n4} at 1e4, {n5} at 1e5");
        notes.push(format!("{:.3}", n5 / n4));
        checked += 1;
    }
    Ok(format!("N/B drift {}", notes.join(" ")))
}

fn archimedean_scaling() -> Outcome {
    let s = data("fermat.surface");
    let mut worst = 0f64;
    for (a, b) in [(1i64, -3i64), (3, -4), (4, -1)] {
        let om = |x: i64, y: i64| -> Result<f64, String> {
            let h = fibre_height(&s, x, y).map_err(|e| e.to_string())?;
            omega_inf(&s.fibre_i64(x, y), &h, 4000).map_err(|e| e.to_string())
        };
        let base = om(a, b)?;
        for k in [2i64, 4, 8] {
            let ratio = om(k * a, k * b)? * (k * k) as f64 / base;
            worst = worst.max((ratio - 1.0).abs());
            ensure!((ratio - 1.0).abs() <= 1e-3, "({a}, {b}) T = {k}: ratio {ratio}");
        }
    }
    Ok(format!("max deviation {worst:.1e}"))
}

fn trial_primes(mut n: u64) -> Vec<u64> {
    let (mut out, mut p) = (Vec::new(), 2);
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
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

fn detector_oracle() -> Outcome {
    let s = data("fermat.surface");
    let fibres = classify_fibres(&s).map_err(|e| e.to_string())?;
    let cfg = build_admissible_config(&s, 1, -3).map_err(|e| e.to_string())?;
    let w_primes = trial_primes(cfg.w.to_u64().ok_or("modulus too large")?);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 1000 {
        let (a, b) = (rng.gen_range(-150i64..=150), rng.gen_range(-150i64..=150));
        if a.gcd(&b) != 1 || fibres.iter().any(|r| r.factor.eval(&bi(a), &bi(b)).is_zero()) {
            continue;
        }
        let got = detector_r(&fibres, a, b, &cfg.w).map_err(|e| e.to_string())?;
        let mut expect = BigRational::one();
        for rep in &fibres {
            let mut flat = rep.factor.eval(&bi(a), &bi(b)).abs().to_u64().unwrap();
            let delta = rep.delta.eval(&bi(a), &bi(b));
            for p in &w_primes {
                while flat % p == 0 {
                    flat /= p;
                }
            }
            for p in trial_primes(flat).into_iter().filter(|&p| p != 2) {
                expect *= BigRational::new(bi(p as i64 - 2), bi(p as i64));
            }
            let sum: i64 = (1..=flat).filter(|d| flat % d == 0).map(|d| jacobi(&delta, &BigInt::from(d)).unwrap() as i64).sum();
            expect *= BigRational::from_integer(bi(sum));
        }
        ensure!(got.r == expect, "({a}, {b}): {} vs {expect}", got.r);
        checked += 1;
    }
    let split = fibres.iter().filter(|r| r.split).count() as i32;
    let pool = drivers::pool(workers()).map_err(|e| e.to_string())?;
    let mut ratios = Vec::new();
    for b in [256u64, 1024, 4096] {
        let d = pool.install(|| drivers::divisor_sum_d_f64(&fibres, &cfg, b)).map_err(|e| e.to_string())?;
        ratios.push(d / ((b as f64).powi(2) * (b as f64).ln().powi(split)));
    }
    let spread = spread(&ratios)?;
    ensure!(spread < 2.0, "D/(B² log² B) = {ratios:?}, spread {spread:.2}");
    Ok(format!("1000 points exact; D/(B^2 log^2 B) {} (spread {spread:.2})", fmt_list(&ratios)))
}

fn spread(v: &[f64]) -> Result<f64, String> {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(0.0, f64::max);
    ensure!(lo > 0.0 && lo.is_finite(), "non-positive ratio in {v:?}");
    Ok(hi / lo)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn classification(d: u32, expect: (usize, usize, usize, usize), budget: Duration) -> Result<Vec<SubgroupClass>, String> {
    let start = Instant::now();
    let w = weyl_group(d).map_err(|e| e.to_string())?;
    let classes = subgroup_classes(&w, &ClassLimits::STANDARD).map_err(|e| e.to_string())?;
    let s = summarize(&classes);
    let got = (s.subgroups, s.conic_bundle, s.complexity_zero, s.complexity_at_most_three);
    ensure!(got == expect, "degree {d}: {got:?}, expected {expect:?}");
    ensure!(s.orbit_criterion == s.conic_bundle, "degree {d}: orbit criterion gives {}", s.orbit_criterion);
    ensure!(start.elapsed() < budget, "degree {d} took {:?}", start.elapsed());
    Ok(classes)
}

fn weyl_classification(store: &mut Vec<(u32, Vec<SubgroupClass>)>) -> Outcome {
    let five = classification(5, (19, 11, 4, 11), Duration::from_secs(60))?;
    let four = classification(4, (197, 73, 18, 23), Duration::from_secs(1800))?;
    store.push((5, five));
    store.push((4, four));
    Ok("19/11/4/11 and 197/73/18/23".into())
}

fn rank_threshold(store: &[(u32, Vec<SubgroupClass>)]) -> Outcome {
    ensure!(store.len() == 2, "classification unavailable");
    let mut notes = Vec::new();
    for (d, classes) in store {
        let r = theorem11_check(*d, classes).map_err(|e| e.to_string())?;
        notes.push(format!("d={d}: {} of {} classes with rank >= {}", r.qualifying, r.total, r.rho));
    }
    Ok(notes.join("; "))
}

fn lines_and_orders() -> Outcome {
    for (d, n, order) in [(5u32, 10usize, 120u64), (4, 16, 1920), (3, 27, 51840)] {
        let l = lines(d).map_err(|e| e.to_string())?;
        ensure!(l.lines.len() == n, "degree {d}: {} lines", l.lines.len());
        let w = weyl_group(d).map_err(|e| e.to_string())?;
        ensure!(w.group.order() == order, "degree {d}: group order {}", w.group.order());
    }
    Ok("10/16/27 lines, orders 120/1920/51840".into())
}

fn lower_bound_shadow() -> Outcome {
    let s = data("dp4.surface");
    let inv = invariants(&s).map_err(|e| e.to_string())?;
    let soluble = (1..=5).any(|t| is_soluble(&s.fibre_i64(1, t)).unwrap_or(false));
    ensure!(soluble, "no soluble fibre found");
    let pool = drivers::pool(workers()).map_err(|e| e.to_string())?;
    let cfg = CountConfig::plain(vec![]);
    let mut ratios = Vec::new();
    for b in [1_000u64, 10_000, 100_000] {
        let n = pool.install(|| drivers::count_nb(&s, &cfg, b)).map_err(|e| e.to_string())?;
        ratios.push(n as f64 / (b as f64 * (b as f64).ln().powi(inv.rho as i32 - 1)));
    }
    let spread = spread(&ratios)?;
    ensure!(spread < 3.0, "ratios {ratios:?}");
    Ok(format!("N/(B log^{} B) {} (spread {spread:.2})", inv.rho - 1, fmt_list(&ratios)))
}

fn main() -> ExitCode {
    let sample = density_sample();
    let mut store = Vec::new();
    let mut failed = 0;
    let mut check = |id: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("PASS {id:>2} {name} [{secs:.1}s] {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{secs:.1}s] {why}");
            }
        }
    };
    check(1, "local density closed form equals oracle", &mut || closed_equals_oracle(&sample));
    check(2, "local density geometric bounds", &mut || geometric_bounds(&sample));
    check(3, "M_p count", &mut mp_formula);
    check(4, "discriminant degree and fibre discriminants", &mut structural_identities);
    check(5, "Fermat cubic end to end", &mut fermat_end_to_end);
    check(6, "conic point counts", &mut conic_counting);
    check(7, "archimedean density scaling", &mut archimedean_scaling);
    check(8, "detector oracle and growth", &mut detector_oracle);
    check(9, "Weyl group subgroup classification", &mut || weyl_classification(&mut store));
    check(10, "rank threshold implies complexity at most 3", &mut || rank_threshold(&store));
    check(11, "lines and Weyl group orders", &mut lines_and_orders);
    check(12, "dP4 lower bound shadow", &mut lower_bound_shadow);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
