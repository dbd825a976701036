//! Lattice points in `{v : max_i |q_i(v)| ≤ T}` for binary quadratic forms `q_i`.
//!
//! Rows are bounded by a certified extent of the region and each row is cut
//! down to the real solution intervals of the quadratic inequalities; callers
//! still test every candidate exactly.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// `a x² + b x y + c y²`.
pub(crate) type Qf = [f64; 3];

fn qf_eval(q: &Qf, x: f64, y: f64) -> f64 {
    q[0] * x * x + q[1] * x * y + q[2] * y * y
}

const CELLS: usize = 512;
const MAX_DEPTH: u32 = 50;

/// Star polygon containing `{v : max_i |q_i(v)| ≤ 1}`, certified by a
/// Lipschitz lower bound for `max_i |q_i|` on arcs of the unit circle.
pub(crate) struct RegionHull {
    pts: Vec<[f64; 2]>,
}

impl RegionHull {
    /// `None` if no positive lower bound is certified on some arc.
    pub(crate) fn new(forms: &[Qf]) -> Option<Self> {
        let lip = forms.iter().map(|q| q[0].abs() + q[1].abs() + q[2].abs()).fold(0.0, f64::max);
        let unit = |th: f64| [libm::cos(th), libm::sin(th)];
        let f = |th: f64| {
            let [c, s] = unit(th);
            forms.iter().map(|q| libm::fabs(qf_eval(q, c, s))).fold(0.0, f64::max)
        };
        let mut stack: Vec<(f64, f64, f64, f64, u32)> = Vec::with_capacity(CELLS + 2 * MAX_DEPTH as usize);
        let mut fa = f(0.0);
        for k in 0..CELLS {
            let (a, b) = (PI * k as f64 / CELLS as f64, PI * (k + 1) as f64 / CELLS as f64);
            let fb = f(b);
            stack.push((a, b, fa, fb, 0));
            fa = fb;
        }
        let mut pts = Vec::with_capacity(3 * CELLS);
        while let Some((a, b, fa, fb, depth)) = stack.pop() {
            let h = b - a;
            let lb = 0.5 * (fa + fb) - 0.5 * lip * h;
            if lb < 0.5 * fa.min(fb) {
                if depth >= MAX_DEPTH {
                    return None;
                }
                let m = 0.5 * (a + b);
                let fm = f(m);
                stack.push((a, m, fa, fm, depth + 1));
                stack.push((m, b, fm, fb, depth + 1));
                continue;
            }
            // The sector of radius R over [a, b] lies in the hull of 0, its
            // end points and the apex of the tangents at its ends.
            let r = (1.0 + 1e-9) / libm::sqrt(lb);
            let [ca, sa] = unit(a);
            let [cb, sb] = unit(b);
            let [cm, sm] = unit(0.5 * (a + b));
            let apex = r / libm::cos(0.5 * h);
            pts.extend([[r * ca, r * sa], [r * cb, r * sb], [apex * cm, apex * sm]]);
        }
        Some(Self { pts })
    }

    /// Upper bound for `|l · v|` over the region.
    pub(crate) fn extent(&self, l: [f64; 2]) -> f64 {
        self.pts.iter().map(|p| libm::fabs(l[0] * p[0] + l[1] * p[1])).fold(0.0, f64::max) * (1.0 + 1e-9)
    }
}

type Intervals = Vec<(f64, f64)>;

/// `{y : α y² + β y + γ ≤ 0}`.
fn nonpositive_set(alpha: f64, beta: f64, gamma: f64) -> Intervals {
    let inf = f64::INFINITY;
    if alpha == 0.0 {
        if beta == 0.0 {
            return if gamma <= 0.0 { vec![(-inf, inf)] } else { Vec::new() };
        }
        let r = -gamma / beta;
        return if beta > 0.0 { vec![(-inf, r)] } else { vec![(r, inf)] };
    }
    let disc = beta * beta - 4.0 * alpha * gamma;
    if disc < 0.0 {
        return if alpha > 0.0 { Vec::new() } else { vec![(-inf, inf)] };
    }
    let sq = libm::sqrt(disc);
    let qv = -0.5 * (beta + if beta >= 0.0 { sq } else { -sq });
    let (mut r1, mut r2) = if qv == 0.0 { (0.0, 0.0) } else { (qv / alpha, gamma / qv) };
    if r1 > r2 {
        core::mem::swap(&mut r1, &mut r2);
    }
    if alpha > 0.0 {
        vec![(r1, r2)]
    } else {
        vec![(-inf, r1), (r2, inf)]
    }
}

fn intersect(a: &Intervals, b: &Intervals) -> Intervals {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if lo <= hi {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// Calls `visit(u, w)` for a superset of the points `k1 v1 + k2 v2` with
/// `max_i |q_i(u, w)| ≤ t`, where `hull` bounds the region for `t = 1`.
pub(crate) fn for_each_in_region(
    v1: [i128; 2],
    v2: [i128; 2],
    forms_uw: &[Qf],
    hull: &RegionHull,
    t: f64,
    mut visit: impl FnMut(i128, i128),
) {
    let (p, q) = ([v1[0] as f64, v1[1] as f64], [v2[0] as f64, v2[1] as f64]);
    let forms: Vec<Qf> = forms_uw
        .iter()
        .map(|f| {
            let k11 = qf_eval(f, p[0], p[1]);
            let k22 = qf_eval(f, q[0], q[1]);
            let k12 = 2.0 * f[0] * p[0] * q[0] + f[1] * (p[0] * q[1] + q[0] * p[1]) + 2.0 * f[2] * p[1] * q[1];
            [k11 / t, k12 / t, k22 / t]
        })
        .collect();
    // Rows of the inverse basis matrix give the coordinates k1, k2.
    let det = p[0] * q[1] - q[0] * p[1];
    let st = libm::sqrt(t) / libm::fabs(det);
    let e1 = st * hull.extent([q[1], -q[0]]);
    let e2 = st * hull.extent([-p[1], p[0]]);
    // Loop over the shorter axis.
    let (outer, inner_ext, swap) = if e1 <= e2 { (e1, e2, false) } else { (e2, e1, true) };
    let omax = libm::floor(outer) as i128 + 1;
    let imax = libm::floor(inner_ext) as i128 + 1;
    for x in -omax..=omax {
        let xf = x as f64;
        let mut set: Intervals = vec![(-(imax as f64), imax as f64)];
        for f in &forms {
            let (a, b, c) = if swap { (f[0], f[1] * xf, f[2] * xf * xf) } else { (f[2], f[1] * xf, f[0] * xf * xf) };
            set = intersect(&set, &nonpositive_set(a, b, c - 1.0));
            set = intersect(&set, &nonpositive_set(-a, -b, -c - 1.0));
            if set.is_empty() {
                break;
            }
        }
        let mut ranges: Vec<(i128, i128)> = set
            .into_iter()
            .map(|(lo, hi)| {
                let pad = 1.0 + 1e-9 * lo.abs().max(hi.abs());
                ((libm::ceil(lo - pad) as i128).max(-imax), (libm::floor(hi + pad) as i128).min(imax))
            })
            .filter(|(a, b)| a <= b)
            .collect();
        ranges.sort_unstable();
        let mut next = i128::MIN;
        for (y0, y1) in ranges {
            for y in y0.max(next)..=y1 {
                let (k1, k2) = if swap { (y, x) } else { (x, y) };
                visit(k1 * v1[0] + k2 * v2[0], k1 * v1[1] + k2 * v2[1]);
            }
            next = next.max(y1.saturating_add(1));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_extent() {
        let h = RegionHull::new(&[[1.0, 0.0, 1.0]]).unwrap();
        let e = h.extent([1.0, 0.0]);
        assert!((1.0..1.01).contains(&e), "{e}");
        let h = RegionHull::new(&[[4.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let e = h.extent([1.0, 0.0]);
        assert!((0.5..0.52).contains(&e), "{e}");
        let e = h.extent([1.0, 1.0]);
        assert!((1.5..1.55).contains(&e), "{e}");
    }

    #[test]
    fn unbounded_region_detected() {
        assert!(RegionHull::new(&[[1.0, 0.0, 0.0]]).is_none());
    }

    #[test]
    fn covers_brute_force() {
        let forms = [[3.0, -7.0, 2.0], [1.0, 5.0, -4.0], [0.0, 1.0, 1.0]];
        let (v1, v2) = ([3i128, 1], [-1i128, 2]);
        let t = 900.0;
        let mut seen = Vec::new();
        let hull = RegionHull::new(&forms).unwrap();
        for_each_in_region(v1, v2, &forms, &hull, t, |u, w| seen.push((u, w)));
        let mut uniq = seen.clone();
        uniq.sort_unstable();
        uniq.dedup();
        assert_eq!(uniq.len(), seen.len(), "a point was visited twice");
        for k1 in -200i128..=200 {
            for k2 in -200i128..=200 {
                let (u, w) = (k1 * v1[0] + k2 * v2[0], k1 * v1[1] + k2 * v2[1]);
                if forms.iter().all(|f| qf_eval(f, u as f64, w as f64).abs() <= t) {
                    assert!(seen.contains(&(u, w)), "missed ({u}, {w})");
                }
            }
        }
    }
}
