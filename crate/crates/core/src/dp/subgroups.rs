//! Conjugacy classes of subgroups of the Weyl group and their conic bundle
//! classification.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::lattice::{span_rank, PicClass};
use super::perm::{Perm, PermGroup};
use super::weyl::WeylGroup;
use super::DpError;

/// One element of the invariant-conic analysis: a `G`-orbit of singular pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairOrbit {
    pub size: usize,
    pub split: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantConic {
    pub conic: usize,
    pub pair_orbits: Vec<PairOrbit>,
    pub complexity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub invariant_rank: usize,
    /// Some conic class is invariant.
    pub has_cb: bool,
    /// Two line orbits with `(O1 + O2)² = 0` exist.
    pub orbit_criterion: bool,
    pub min_complexity: Option<usize>,
    pub line_orbits: Vec<usize>,
    pub invariant_conics: Vec<InvariantConic>,
}

fn line_orbits(n: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut k = 0;
        while k < orbit.len() {
            let p = orbit[k];
            for g in gens {
                let q = g.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                }
            }
            k += 1;
        }
        out.push(orbit);
    }
    out
}

/// Conic bundle data of the subgroup generated by `gens`.
pub fn classify(w: &WeylGroup, gens: &[Perm]) -> Classification {
    let cfg = &w.config;
    let n = cfg.lines.len();
    let orbits = line_orbits(n, gens);
    let mut orbit_of = vec![0; n];
    for (k, o) in orbits.iter().enumerate() {
        for &p in o {
            orbit_of[p] = k;
        }
    }
    let sums: Vec<PicClass> =
        orbits.iter().map(|o| o.iter().fold(PicClass::zero(cfg.r()), |acc, &p| acc.add(&cfg.lines[p]))).collect();
    let invariant_rank = span_rank(&sums);
    let orbit_criterion = (0..sums.len()).any(|i| (i..sums.len()).any(|j| sums[i].add(&sums[j]).square() == 0));

    let mut invariant_conics = Vec::new();
    for c in 0..w.conics.len() {
        if !gens.iter().all(|g| w.conic_image(g, c) == c) {
            continue;
        }
        let pairs = &w.pairs[c];
        let mut seen = vec![false; pairs.len()];
        let mut pair_orbits = Vec::new();
        for start in 0..pairs.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut k = 0;
            while k < orbit.len() {
                let (i, j) = pairs[orbit[k]];
                for g in gens {
                    let (a, b) = (g.apply(i), g.apply(j));
                    let img = (a.min(b), a.max(b));
                    let q = pairs.iter().position(|&p| p == img).expect("invariant conic permutes its pairs");
                    if !seen[q] {
                        seen[q] = true;
                        orbit.push(q);
                    }
                }
                k += 1;
            }
            // Some element maps L to L' exactly when both lie in one line orbit,
            // and such an element swaps the pair since C − L = L'.
            let (i, j) = pairs[start];
            pair_orbits.push(PairOrbit { size: orbit.len(), split: orbit_of[i] != orbit_of[j] });
        }
        let complexity = pair_orbits.iter().filter(|o| !o.split).map(|o| o.size).sum();
        invariant_conics.push(InvariantConic { conic: c, pair_orbits, complexity });
    }
    let min_complexity = invariant_conics.iter().map(|c| c.complexity).min();
    let mut sizes: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
    sizes.sort_unstable();
    Classification {
        invariant_rank,
        has_cb: !invariant_conics.is_empty(),
        orbit_criterion,
        min_complexity,
        line_orbits: sizes,
        invariant_conics,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupClass {
    /// Position in the sorted output, starting at 1.
    pub id: usize,
    pub generators: Vec<Perm>,
    pub order: u64,
    pub invariant_rank: usize,
    pub has_cb: bool,
    pub orbit_criterion: bool,
    pub min_complexity: Option<usize>,
    pub line_orbits: Vec<usize>,
}

/// Guards for the layered search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassLimits {
    pub max_group_order: u64,
    pub max_classes: usize,
}

impl ClassLimits {
    /// Enough for degrees 5 and 4.
    pub const STANDARD: ClassLimits = ClassLimits { max_group_order: 1920, max_classes: 1000 };
    /// Also admits degree 3.
    pub const DEEP: ClassLimits = ClassLimits { max_group_order: 51840, max_classes: 1000 };
}

/// Group elements indexed by rank, with products by lookup.
struct Elements {
    perms: Vec<Perm>,
    sorted: Vec<u32>,
    inv: Vec<u32>,
    table: Option<Vec<u32>>,
}

const TABLE_LIMIT: usize = 2048;

impl Elements {
    fn new(group: &PermGroup) -> Self {
        let n = group.order() as usize;
        let perms: Vec<Perm> = (0..n as u64).map(|r| group.unrank(r)).collect();
        let mut sorted: Vec<u32> = (0..n as u32).collect();
        sorted.sort_by(|&a, &b| perms[a as usize].cmp(&perms[b as usize]));
        let mut e = Elements { perms, sorted, inv: Vec::new(), table: None };
        e.inv = (0..n).map(|i| e.lookup(e.perms[i].inverse().as_bytes())).collect();
        if n <= TABLE_LIMIT {
            let mut t = vec![0u32; n * n];
            let mut buf = vec![0u8; group.degree()];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = e.product_into(a as u32, b as u32, &mut buf);
                }
            }
            e.table = Some(t);
        }
        e
    }

    fn len(&self) -> usize {
        self.perms.len()
    }

    fn lookup(&self, images: &[u8]) -> u32 {
        let k = self.sorted.binary_search_by(|&i| self.perms[i as usize].as_bytes().cmp(images)).expect("closed under products");
        self.sorted[k]
    }

    fn product_into(&self, a: u32, b: u32, buf: &mut [u8]) -> u32 {
        let (pa, pb) = (self.perms[a as usize].as_bytes(), self.perms[b as usize].as_bytes());
        for (o, &x) in buf.iter_mut().zip(pa) {
            *o = pb[x as usize];
        }
        self.lookup(buf)
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.len() + b as usize],
            None => {
                let mut buf = [0u8; 256];
                let deg = self.perms[0].degree();
                self.product_into(a, b, &mut buf[..deg])
            }
        }
    }

    /// `x⁻¹ h x`.
    #[inline]
    fn conj(&self, x: u32, h: u32) -> u32 {
        self.mul(self.mul(self.inv[x as usize], h), x)
    }
}

#[derive(Clone)]
struct Sub {
    bits: Vec<u64>,
    elems: Vec<u32>,
    gens: Vec<u32>,
}

impl Sub {
    fn trivial(n: usize) -> Self {
        let mut bits = vec![0u64; n.div_ceil(64)];
        bits[0] = 1;
        Sub { bits, elems: vec![0], gens: Vec::new() }
    }

    #[inline]
    fn contains(&self, x: u32) -> bool {
        self.bits[x as usize / 64] >> (x % 64) & 1 == 1
    }

    /// `⟨H, g⟩` as a union of right cosets of `H`.
    fn extend(&self, e: &Elements, g: u32) -> Sub {
        let mut out = self.clone();
        out.gens.push(g);
        let mut reps = vec![0u32];
        let mut k = 0;
        while k < reps.len() {
            let x = reps[k];
            for &s in &out.gens {
                let y = e.mul(x, s);
                if out.contains(y) {
                    continue;
                }
                for &h in &self.elems {
                    let z = e.mul(h, y);
                    out.bits[z as usize / 64] |= 1 << (z % 64);
                    out.elems.push(z);
                }
                reps.push(y);
            }
            k += 1;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Fingerprint {
    order: usize,
    class_counts: Vec<u32>,
    line_orbits: Vec<usize>,
    invariant_rank: usize,
}

struct Search<'a> {
    w: &'a WeylGroup,
    e: Elements,
    class_of: Vec<u32>,
    classes: usize,
}

impl<'a> Search<'a> {
    fn new(w: &'a WeylGroup) -> Self {
        let e = Elements::new(&w.group);
        let n = e.len();
        let gens: Vec<u32> = w.group.generators().iter().map(|g| e.lookup(g.as_bytes())).collect();
        let mut class_of = vec![u32::MAX; n];
        let mut classes = 0;
        for start in 0..n {
            if class_of[start] != u32::MAX {
                continue;
            }
            class_of[start] = classes;
            let mut stack = vec![start as u32];
            while let Some(x) = stack.pop() {
                for &s in &gens {
                    let y = e.conj(s, x);
                    if class_of[y as usize] == u32::MAX {
                        class_of[y as usize] = classes;
                        stack.push(y);
                    }
                }
            }
            classes += 1;
        }
        Search { w, e, class_of, classes: classes as usize }
    }

    fn perms(&self, idx: &[u32]) -> Vec<Perm> {
        idx.iter().map(|&i| self.e.perms[i as usize].clone()).collect()
    }

    fn fingerprint(&self, h: &Sub) -> Fingerprint {
        let mut class_counts = vec![0u32; self.classes];
        for &x in &h.elems {
            class_counts[self.class_of[x as usize] as usize] += 1;
        }
        let gens = self.perms(&h.gens);
        let mut line_orbits: Vec<usize> = line_orbits(self.w.config.lines.len(), &gens).iter().map(|o| o.len()).collect();
        line_orbits.sort_unstable();
        let c = classify(self.w, &gens);
        Fingerprint { order: h.elems.len(), class_counts, line_orbits, invariant_rank: c.invariant_rank }
    }

    /// Some `x` with `x⁻¹ H x = K`, given `|H| = |K|`.
    fn conjugate(&self, h: &Sub, k: &Sub) -> bool {
        (0..self.e.len() as u32).any(|x| h.gens.iter().all(|&g| k.contains(self.e.conj(x, g))))
    }

    fn normalizer_generators(&self, h: &Sub) -> Vec<u32> {
        let mut cur = Sub::trivial(self.e.len());
        let mut gens = Vec::new();
        for x in 0..self.e.len() as u32 {
            if !cur.contains(x) && h.gens.iter().all(|&g| h.contains(self.e.conj(x, g))) {
                cur = cur.extend(&self.e, x);
                gens.push(x);
            }
        }
        gens
    }

    /// One `g` from each orbit of `G \ H` under `g ↦ h g` and `g ↦ n⁻¹ g n`
    /// for `h ∈ H` and `n ∈ N(H)`; these give every `⟨H, g⟩` up to conjugacy.
    fn extension_seeds(&self, h: &Sub) -> Vec<u32> {
        let ngens = self.normalizer_generators(h);
        let mut seen = h.bits.clone();
        let mut out = Vec::new();
        for start in 0..self.e.len() as u32 {
            if seen[start as usize / 64] >> (start % 64) & 1 == 1 {
                continue;
            }
            out.push(start);
            seen[start as usize / 64] |= 1 << (start % 64);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                let moves = h.gens.iter().map(|&g| self.e.mul(g, x)).chain(ngens.iter().map(|&n| self.e.conj(n, x)));
                for y in moves.collect::<Vec<_>>() {
                    if seen[y as usize / 64] >> (y % 64) & 1 == 0 {
                        seen[y as usize / 64] |= 1 << (y % 64);
                        stack.push(y);
                    }
                }
            }
        }
        out
    }
}

/// All conjugacy classes of subgroups, built layer by layer: layer `k + 1`
/// holds the new classes of `⟨H, g⟩` for `H` in layer `k`. Sorted by order,
/// then by fingerprint.
pub fn subgroup_classes(w: &WeylGroup, limits: &ClassLimits) -> Result<Vec<SubgroupClass>, DpError> {
    let order = w.group.order();
    if order > limits.max_group_order {
        return Err(DpError::ResourceLimit {
            completed_layers: 0,
            classes: 0,
            reason: format!("group order {order} exceeds the limit {}", limits.max_group_order),
        });
    }
    let search = Search::new(w);
    let n = search.e.len();
    let mut reps: Vec<(Sub, Fingerprint)> = Vec::new();
    let mut by_print: BTreeMap<Fingerprint, Vec<usize>> = BTreeMap::new();
    let trivial = Sub::trivial(n);
    let fp = search.fingerprint(&trivial);
    by_print.insert(fp.clone(), vec![0]);
    reps.push((trivial, fp));
    let mut frontier = vec![0usize];
    let mut layer = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &i in &frontier {
            let seeds = search.extension_seeds(&reps[i].0);
            for g in seeds {
                let k = reps[i].0.extend(&search.e, g);
                let fp = search.fingerprint(&k);
                let known = by_print.get(&fp).is_some_and(|list| list.iter().any(|&j| search.conjugate(&reps[j].0, &k)));
                if known {
                    continue;
                }
                if reps.len() >= limits.max_classes {
                    return Err(DpError::ResourceLimit {
                        completed_layers: layer,
                        classes: reps.len(),
                        reason: format!("more than {} classes", limits.max_classes),
                    });
                }
                by_print.entry(fp.clone()).or_default().push(reps.len());
                next.push(reps.len());
                reps.push((k, fp));
            }
        }
        frontier = next;
        layer += 1;
    }
    reps.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(reps
        .into_iter()
        .enumerate()
        .map(|(i, (h, fp))| {
            let generators = search.perms(&h.gens);
            let c = classify(w, &generators);
            SubgroupClass {
                id: i + 1,
                generators,
                order: fp.order as u64,
                invariant_rank: c.invariant_rank,
                has_cb: c.has_cb,
                orbit_criterion: c.orbit_criterion,
                min_complexity: c.min_complexity,
                line_orbits: c.line_orbits,
            }
        })
        .collect())
}

/// Column totals: classes, with a conic bundle, complexity 0, complexity ≤ 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassSummary {
    pub subgroups: usize,
    pub conic_bundle: usize,
    pub complexity_zero: usize,
    pub complexity_at_most_three: usize,
    /// Classes passing the line-orbit criterion instead of the invariant class one.
    pub orbit_criterion: usize,
}

pub fn summarize(classes: &[SubgroupClass]) -> ClassSummary {
    let count = |f: &dyn Fn(&SubgroupClass) -> bool| classes.iter().filter(|c| f(c)).count();
    ClassSummary {
        subgroups: classes.len(),
        conic_bundle: count(&|c| c.has_cb),
        complexity_zero: count(&|c| c.min_complexity == Some(0)),
        complexity_at_most_three: count(&|c| c.min_complexity.is_some_and(|m| m <= 3)),
        orbit_criterion: count(&|c| c.orbit_criterion),
    }
}

/// The Picard rank threshold `ρ_d` above which a conic bundle of small
/// complexity is guaranteed.
pub fn rho_threshold(d: u32) -> Option<usize> {
    match d {
        5 => Some(3),
        4 | 3 => Some(4),
        2 => Some(5),
        1 => Some(6),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Theorem11Report {
    pub d: u32,
    pub rho: usize,
    pub total: usize,
    pub qualifying: usize,
}

/// Every class with invariant rank at least `ρ_d` has a conic bundle of
/// complexity at most 3.
pub fn theorem11_check(d: u32, classes: &[SubgroupClass]) -> Result<Theorem11Report, DpError> {
    let rho = rho_threshold(d).ok_or(DpError::InvalidDegree(d))?;
    let mut qualifying = 0;
    for c in classes.iter().filter(|c| c.invariant_rank >= rho) {
        qualifying += 1;
        if !c.has_cb || c.min_complexity.is_none_or(|m| m > 3) {
            let gens: Vec<String> = c.generators.iter().map(|g| format!("{g}")).collect();
            return Err(DpError::Counterexample(format!(
                "class {} of order {} with invariant rank {} has min complexity {:?}; generators [{}]",
                c.id,
                c.order,
                c.invariant_rank,
                c.min_complexity,
                gens.join(", ")
            )));
        }
    }
    Ok(Theorem11Report { d, rho, total: classes.len(), qualifying })
}

/// Runs the full classification for `d` and checks it.
pub fn theorem11_consistency(d: u32) -> Result<Theorem11Report, DpError> {
    let w = super::weyl::weyl_group(d)?;
    let limits = if d >= 4 { ClassLimits::STANDARD } else { ClassLimits::DEEP };
    theorem11_check(d, &subgroup_classes(&w, &limits)?)
}
