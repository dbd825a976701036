//! The subcommands, each returning the text it prints.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use cbundle_core::arith::valuation;
use cbundle_core::bundle::{
    classify_fibres, discriminant, intersection_numbers, invariants, is_del_pezzo, is_squarefree_form, parse_surface,
    BundleSurface, DelPezzoVerdict, FibreReport,
};
use cbundle_core::conic::{disc_ternary, sigma_p_closed, sigma_p_oracle, ConicError, TernaryQuadraticForm};
use cbundle_core::count::{base_points, build_admissible_config, fibre_cutoff, CountConfig};
use cbundle_core::dp::{subgroup_classes, summarize, table4_model, weyl_group, ClassLimits};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::drivers;
use crate::error::CliError;
use crate::manifest::RunManifest;

pub fn read_surface(path: &Path) -> Result<(BundleSurface, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))?;
    let s = parse_surface(&text).map_err(|e| CliError::from(e).context(&path.display().to_string()))?;
    Ok((s, bytes))
}

fn minus_k_string((m, k): (i64, i64)) -> String {
    let head = if m == 1 { "M".to_string() } else { format!("{m}M") };
    match k {
        0 => head,
        k if k > 0 => format!("{head}+{k}F"),
        k => format!("{head}{k}F"),
    }
}

pub fn analyze(path: &Path) -> Result<String, CliError> {
    let start = Instant::now();
    let (s, bytes) = read_surface(path)?;
    let mut out = String::new();
    let delta = discriminant(&s)?;
    writeln!(out, "discriminant: {delta}").unwrap();
    writeln!(out, "deg_delta: {}", delta.degree()).unwrap();
    let smooth = is_squarefree_form(&delta) && cbundle_core::bundle::smoothness_check(&s);
    writeln!(out, "smooth: {smooth}").unwrap();
    if smooth {
        let inv = invariants(&s)?;
        let fibres = classify_fibres(&s)?;
        writeln!(out, "fibres:").unwrap();
        for r in &fibres {
            writeln!(
                out,
                "  factor {} | degree {} | {} | i_p {} | delta_p {}",
                r.factor,
                r.degree,
                if r.split { "split" } else { "non-split" },
                r.singular_index,
                r.delta
            )
            .unwrap();
        }
        let degs = |v: &[cbundle_core::bundle::FibreReport]| v.iter().map(|r| r.degree.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(out, "split_degrees: {}", degs(&inv.split_points)).unwrap();
        writeln!(out, "nonsplit_degrees: {}", degs(&inv.nonsplit_points)).unwrap();
        writeln!(out, "complexity: {}", inv.complexity).unwrap();
        writeln!(out, "rho: {}", inv.rho).unwrap();
        writeln!(out, "minus_K: {}", minus_k_string(inv.minus_k)).unwrap();
        writeln!(out, "K^2: {}", inv.kx2).unwrap();
        let i = intersection_numbers(&s);
        writeln!(out, "intersections: F^2 = {}, M.F = {}, M^2 = {}", i.f2, i.mf, i.m2).unwrap();
    }
    let mut m = RunManifest::new("analyze", Some(&bytes), 1).param("file", path.display());
    m.wall_time = start.elapsed();
    Ok(format!("{}{out}", m.header()))
}

/// The first base point, by height and then lexicographically, whose fibre
/// admits an admissible configuration.
pub fn search_base_point(s: &BundleSurface, max_height: u64) -> Result<CountConfig, CliError> {
    let mut last = None;
    for h in 1..=max_height as i64 {
        for (s0, t0) in base_points(h as u64).into_iter().filter(|&(a, b)| a.abs().max(b.abs()) == h) {
            match build_admissible_config(s, s0, t0) {
                Ok(cfg) => return Ok(cfg),
                Err(e) => last = Some(e),
            }
        }
    }
    Err(CliError::Input(format!(
        "no admissible base point of height at most {max_height}{}",
        last.map(|e| format!(" (last failure: {e})")).unwrap_or_default()
    )))
}

fn config_for(s: &BundleSurface, base: Option<(i64, i64)>) -> Result<CountConfig, CliError> {
    match base {
        Some((s0, t0)) => Ok(build_admissible_config(s, s0, t0)?),
        None => search_base_point(s, 20),
    }
}

#[derive(Clone, Debug)]
pub struct CountArgs {
    pub bounds: Vec<u64>,
    pub p_max: u64,
    pub steps: usize,
    pub workers: usize,
    pub base: Option<(i64, i64)>,
    pub exponent: f64,
    pub skip_density: bool,
    pub exact: bool,
}

fn check_bounds(bounds: &[u64]) -> Result<(), CliError> {
    if bounds.is_empty() || bounds.iter().any(|&b| b < 2) {
        return Err(CliError::Input("bounds must be at least 2".into()));
    }
    Ok(())
}

fn ln(b: u64) -> f64 {
    (b as f64).ln()
}

pub fn count(path: &Path, args: &CountArgs) -> Result<String, CliError> {
    let start = Instant::now();
    check_bounds(&args.bounds)?;
    if !(args.exponent > 0.0 && args.exponent <= 1.0) {
        return Err(CliError::Input(format!("base exponent {} is not in (0, 1]", args.exponent)));
    }
    let (s, bytes) = read_surface(path)?;
    let inv = invariants(&s)?;
    let fibres = classify_fibres(&s)?;
    let mut cfg = config_for(&s, args.base)?;
    cfg.base_exponent = args.exponent;
    let split = fibres.iter().filter(|r| r.split).count();
    let pool = drivers::pool(args.workers)?;
    let mut body = String::from("B,N,D,S,ref_N,ref_D,ratio_N,ratio_D\n");
    for &b in &args.bounds {
        let (n, d, sb) = pool.install(|| -> Result<_, CliError> {
            let n = drivers::count_nb(&s, &cfg, b)?;
            let d = d_value(&fibres, &cfg, b, args.exact)?;
            let sb = if args.skip_density {
                f64::NAN
            } else {
                drivers::density_sum(&s, fibre_cutoff(b, cfg.base_exponent), args.p_max, args.steps)?
            };
            Ok((n, d, sb))
        })?;
        let ref_n = b as f64 * ln(b).powi(inv.rho as i32 - 1);
        let ref_d = (b as f64).powi(2) * ln(b).powi(split as i32);
        writeln!(body, "{b},{n},{},{sb},{ref_n},{ref_d},{},{}", d.0, n as f64 / ref_n, d.1 / ref_d).unwrap();
    }
    let bounds: Vec<String> = args.bounds.iter().map(|b| b.to_string()).collect();
    let mut m = RunManifest::new("count", Some(&bytes), args.workers)
        .param("file", path.display())
        .param("B", bounds.join(" "))
        .param("pmax", args.p_max)
        .param("steps", args.steps)
        .param("exact", args.exact)
        .param("base", format!("{} {}", cfg.congruence.0, cfg.congruence.1))
        .param("w", &cfg.w)
        .param("base_exponent", cfg.base_exponent)
        .param("rho", inv.rho)
        .param("split", split);
    m.wall_time = start.elapsed();
    Ok(format!("{}{body}", m.header()))
}

/// `D(B)` as printed and as a float.
fn d_value(fibres: &[FibreReport], cfg: &CountConfig, b: u64, exact: bool) -> Result<(String, f64), CliError> {
    if exact {
        let d = drivers::divisor_sum_d(fibres, cfg, b)?;
        Ok((d.to_string(), d.to_f64().unwrap_or(f64::NAN)))
    } else {
        let d = drivers::divisor_sum_d_f64(fibres, cfg, b)?;
        Ok((d.to_string(), d))
    }
}

pub fn detector(path: &Path, bounds: &[u64], base: Option<(i64, i64)>, workers: usize, exact: bool) -> Result<String, CliError> {
    let start = Instant::now();
    check_bounds(bounds)?;
    let (s, bytes) = read_surface(path)?;
    let fibres = classify_fibres(&s)?;
    let cfg = config_for(&s, base)?;
    let report = cbundle_core::count::admissibility_check(&fibres, &cfg, 10_000);
    let split = fibres.iter().filter(|r| r.split).count();
    let pool = drivers::pool(workers)?;
    let mut body = String::from("B,D,ref_D,ratio_D\n");
    for &b in bounds {
        let (d, d_f) = pool.install(|| d_value(&fibres, &cfg, b, exact))?;
        let ref_d = (b as f64).powi(2) * ln(b).powi(split as i32);
        writeln!(body, "{b},{d},{ref_d},{}", d_f / ref_d).unwrap();
    }
    let bs: Vec<String> = bounds.iter().map(|b| b.to_string()).collect();
    let mut m = RunManifest::new("detector", Some(&bytes), workers)
        .param("file", path.display())
        .param("B", bs.join(" "))
        .param("base", format!("{} {}", cfg.congruence.0, cfg.congruence.1))
        .param("w", &cfg.w)
        .param("split", split)
        .param("exact", exact);
    m.wall_time = start.elapsed();
    let mut adm = format!("# admissibility: {} sampled points, {} violations\n", report.sampled, report.violations.len());
    for v in &report.violations {
        writeln!(adm, "# violation: {v}").unwrap();
    }
    Ok(format!("{}{adm}{body}", m.header()))
}

pub fn densities(form: &str, primes: &[u64], depth: Option<u32>) -> Result<String, CliError> {
    let start = Instant::now();
    let q: TernaryQuadraticForm = form.parse()?;
    if !q.is_nondegenerate() {
        return Err(CliError::Input(format!("the form `{form}` is degenerate")));
    }
    let disc = disc_ternary(&q);
    let mut body = String::from("p,v_p(disc),closed,oracle,depth\n");
    for &p in primes {
        let v = valuation(&disc, &BigInt::from(p)).map_err(CliError::from)?;
        let n = depth.unwrap_or(v + 2);
        let closed = match sigma_p_closed(&q, p) {
            Ok(r) => r.sigma.to_string(),
            Err(ConicError::UseOracle(_)) => "-".to_string(),
            Err(e) => return Err(e.into()),
        };
        let oracle = sigma_p_oracle(&q, p, n)?;
        writeln!(body, "{p},{v},{closed},{oracle},{n}").unwrap();
    }
    let ps: Vec<String> = primes.iter().map(|p| p.to_string()).collect();
    let mut m = RunManifest::new("densities", Some(form.as_bytes()), 1).param("form", form).param("p", ps.join(" "));
    if let Some(n) = depth {
        m = m.param("depth", n);
    }
    m.wall_time = start.elapsed();
    Ok(format!("{}{body}", m.header()))
}

pub fn dp_classify(d: u32, deep: bool) -> Result<String, CliError> {
    let start = Instant::now();
    let w = weyl_group(d)?;
    let limits = if deep { ClassLimits::DEEP } else { ClassLimits::STANDARD };
    let classes = subgroup_classes(&w, &limits)?;
    let mut body = String::from("class_id,order,invariant_rank,has_cb,min_complexity\n");
    for c in &classes {
        let m = c.min_complexity.map(|m| m.to_string()).unwrap_or_else(|| "none".into());
        writeln!(body, "{},{},{},{},{m}", c.id, c.order, c.invariant_rank, c.has_cb).unwrap();
    }
    let s = summarize(&classes);
    writeln!(body, "summary,{},{},{},{}", s.subgroups, s.conic_bundle, s.complexity_zero, s.complexity_at_most_three).unwrap();
    let mut m = RunManifest::new("dp classify", None, 1).param("degree", d).param("deep", deep).param("weyl_order", w.group.order());
    m.wall_time = start.elapsed();
    let mut head = m.header();
    if s.orbit_criterion != s.conic_bundle {
        writeln!(head, "# orbit criterion disagrees: {} classes pass it", s.orbit_criterion).unwrap();
    }
    Ok(format!("{head}{body}"))
}

pub fn dp_model(d: u32) -> Result<String, CliError> {
    let model = table4_model(d)?;
    Ok(format!("{model}\nheight: {:?}\n", model.height))
}

pub fn dp_check(d: u32, path: &Path) -> Result<String, CliError> {
    let (s, bytes) = read_surface(path)?;
    let verdict = match is_del_pezzo(&s, d)? {
        DelPezzoVerdict::Yes => "yes".to_string(),
        DelPezzoVerdict::No(why) => format!("no ({why})"),
        DelPezzoVerdict::Indeterminate(why) => format!("indeterminate ({why})"),
    };
    let m = RunManifest::new("dp check", Some(&bytes), 1).param("degree", d).param("file", path.display());
    Ok(format!("{}degree: {d}\nverdict: {verdict}\n", m.header()))
}
