//! Permutations of at most 256 points and a stabilizer chain built by the
//! deterministic Schreier–Sims algorithm.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// `p.apply(x)` is the image of `x`. Products act on the right: `a.then(b)`
/// applies `a` first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Box<[u8]>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 256);
        Perm((0..n).map(|i| i as u8).collect())
    }

    /// `None` unless `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: &[usize]) -> Option<Self> {
        let n = images.len();
        if n > 256 {
            return None;
        }
        let mut seen = vec![false; n];
        for &x in images {
            if x >= n || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Perm(images.iter().map(|&x| x as u8).collect()))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&x| x as usize)
    }

    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize] = i as u8;
        }
        Perm(out.into_boxed_slice())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.0.iter().enumerate().position(|(i, &x)| i != x as usize)
    }

    /// Sorted cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            if seen[i] {
                continue;
            }
            let (mut j, mut len) = (i, 0);
            while !seen[j] {
                seen[j] = true;
                j = self.apply(j);
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable();
        out
    }

    pub fn order(&self) -> u64 {
        self.cycle_type().into_iter().fold(1u64, |acc, l| num_integer::lcm(acc, l as u64))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Cycle notation on 1-based points, `()` for the identity.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut any = false;
        for i in 0..self.0.len() {
            if seen[i] || self.apply(i) == i {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut j = i;
            let mut first = true;
            while !seen[j] {
                seen[j] = true;
                write!(f, "{}{}", if first { "" } else { " " }, j + 1)?;
                first = false;
                j = self.apply(j);
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    orbit: Vec<usize>,
    /// `transversal[p]` maps the base point to `p`; position of `p` in `orbit`.
    transversal: Vec<Option<(Perm, usize)>>,
}

/// A permutation group with a base and strong generating set.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    /// Strong generators tagged by the first base point they move.
    strong: Vec<(Perm, usize)>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: &[Perm]) -> Self {
        let generators: Vec<Perm> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        assert!(generators.iter().all(|g| g.degree() == degree));
        let mut grp = PermGroup { degree, generators: generators.clone(), strong: Vec::new(), levels: Vec::new() };
        for g in generators {
            let tag = match grp.levels.iter().position(|l| g.apply(l.base) != l.base) {
                Some(t) => t,
                None => {
                    grp.push_level(g.first_moved().expect("non-identity"));
                    grp.levels.len() - 1
                }
            };
            grp.strong.push((g, tag));
        }
        for i in 0..grp.levels.len() {
            grp.rebuild(i);
        }
        grp.complete();
        grp
    }

    fn push_level(&mut self, base: usize) {
        self.levels.push(Level { base, orbit: Vec::new(), transversal: Vec::new() });
    }

    fn rebuild(&mut self, i: usize) {
        let n = self.degree;
        let base = self.levels[i].base;
        let gens: Vec<&Perm> = self.strong.iter().filter(|(_, t)| *t >= i).map(|(g, _)| g).collect();
        let mut transversal: Vec<Option<(Perm, usize)>> = vec![None; n];
        transversal[base] = Some((Perm::identity(n), 0));
        let mut orbit = vec![base];
        let mut k = 0;
        while k < orbit.len() {
            let p = orbit[k];
            let u = transversal[p].as_ref().expect("orbit point").0.clone();
            for g in &gens {
                let q = g.apply(p);
                if transversal[q].is_none() {
                    transversal[q] = Some((u.then(g), orbit.len()));
                    orbit.push(q);
                }
            }
            k += 1;
        }
        let level = &mut self.levels[i];
        level.orbit = orbit;
        level.transversal = transversal;
    }

    /// Sifts `h` through levels `from..`, returning the residue and the level
    /// where sifting stopped (`levels.len()` if it went through).
    fn strip(&self, mut h: Perm, from: usize) -> (Perm, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            match &level.transversal[h.apply(level.base)] {
                Some((u, _)) => h = h.then(&u.inverse()),
                None => return (h, i),
            }
        }
        (h, self.levels.len())
    }

    fn complete(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() - 1;
        loop {
            match self.failing_schreier_generator(i) {
                Some((res, j)) => {
                    if j == self.levels.len() {
                        self.push_level(res.first_moved().expect("non-identity residue"));
                    }
                    self.strong.push((res, j));
                    for l in 0..=j {
                        self.rebuild(l);
                    }
                    i = j;
                }
                None if i == 0 => return,
                None => i -= 1,
            }
        }
    }

    fn failing_schreier_generator(&self, i: usize) -> Option<(Perm, usize)> {
        let level = &self.levels[i];
        for &p in &level.orbit {
            let u = &level.transversal[p].as_ref().expect("orbit point").0;
            for (s, _) in self.strong.iter().filter(|(_, t)| *t >= i) {
                let q = s.apply(p);
                let v = &level.transversal[q].as_ref().expect("closed orbit").0;
                let h = u.then(s).then(&v.inverse());
                let (res, j) = self.strip(h, i + 1);
                if j < self.levels.len() || !res.is_identity() {
                    return Some((res, j));
                }
            }
        }
        None
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn strong_generators(&self) -> impl Iterator<Item = &Perm> {
        self.strong.iter().map(|(g, _)| g)
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> u64 {
        self.levels.iter().map(|l| l.orbit.len() as u64).product()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (res, j) = self.strip(g.clone(), 0);
        j == self.levels.len() && res.is_identity()
    }

    /// Position of `g` in `0..order()`, mixed radix over the transversals with
    /// the first level most significant. `None` if `g` is not in the group.
    pub fn rank(&self, g: &Perm) -> Option<u64> {
        let mut h = g.clone();
        let mut r = 0u64;
        for level in &self.levels {
            let (u, pos) = level.transversal[h.apply(level.base)].as_ref()?;
            r = r * level.orbit.len() as u64 + *pos as u64;
            h = h.then(&u.inverse());
        }
        h.is_identity().then_some(r)
    }

    pub fn unrank(&self, mut r: u64) -> Perm {
        assert!(r < self.order());
        let mut out = Perm::identity(self.degree);
        for level in self.levels.iter().rev() {
            let m = level.orbit.len() as u64;
            let p = level.orbit[(r % m) as usize];
            r /= m;
            out = out.then(&level.transversal[p].as_ref().expect("orbit point").0);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Perm {
        Perm::from_images(&(0..n).map(|i| (i + 1) % n).collect::<Vec<_>>()).unwrap()
    }

    fn swap(n: usize, a: usize, b: usize) -> Perm {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(a, b);
        Perm::from_images(&v).unwrap()
    }

    #[test]
    fn symmetric_and_alternating_orders() {
        for n in 2..=9 {
            let s = PermGroup::new(n, &[cycle(n), swap(n, 0, 1)]);
            assert_eq!(s.order(), (1..=n as u64).product::<u64>());
        }
        let three: Vec<Perm> = (0..5)
            .map(|i| {
                let mut v: Vec<usize> = (0..7).collect();
                v[i] = i + 1;
                v[i + 1] = i + 2;
                v[i + 2] = i;
                Perm::from_images(&v).unwrap()
            })
            .collect();
        assert_eq!(PermGroup::new(7, &three).order(), 2520);
    }

    #[test]
    fn rank_round_trip() {
        let g = PermGroup::new(6, &[cycle(6), swap(6, 0, 1)]);
        let mut seen = vec![false; 720];
        for r in 0..720 {
            let p = g.unrank(r);
            assert_eq!(g.rank(&p), Some(r));
            seen[r as usize] = true;
        }
        assert_eq!(g.rank(&Perm::identity(6)), Some(0));
        let c = PermGroup::new(6, &[cycle(6)]);
        assert_eq!(c.order(), 6);
        assert!(!c.contains(&swap(6, 0, 1)));
        assert_eq!(c.rank(&swap(6, 0, 1)), None);
    }

    #[test]
    fn trivial_group() {
        let g = PermGroup::new(4, &[Perm::identity(4)]);
        assert_eq!(g.order(), 1);
        assert_eq!(g.unrank(0), Perm::identity(4));
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", cycle(3)), "(1 2 3)");
        assert_eq!(alloc::format!("{}", Perm::identity(3)), "()");
        assert_eq!(cycle(4).order(), 4);
    }
}
