//! The Weyl group as a permutation group on the lines, and the conic classes
//! with their singular line pairs.

use alloc::vec;
use alloc::vec::Vec;

use super::lattice::{conic_classes, lines, roots, simple_roots, singular_pairs, LineConfiguration, PicClass};
use super::perm::{Perm, PermGroup};
use super::DpError;

#[derive(Clone, Debug)]
pub struct WeylGroup {
    pub config: LineConfiguration,
    pub group: PermGroup,
    pub conics: Vec<PicClass>,
    /// Singular pairs of each conic class, as sorted line index pairs.
    pub pairs: Vec<Vec<(usize, usize)>>,
    /// `pair_conic[i][j]` is the conic class `L_i + L_j`, when that is one.
    pair_conic: Vec<Vec<Option<usize>>>,
}

impl WeylGroup {
    pub fn d(&self) -> u32 {
        self.config.d
    }

    /// Image of conic class `c` under a line permutation.
    pub fn conic_image(&self, g: &Perm, c: usize) -> usize {
        let (i, j) = self.pairs[c][0];
        self.pair_conic[g.apply(i)][g.apply(j)].expect("line permutation preserves conic classes")
    }

    /// Whether the permutation preserves all intersection numbers.
    pub fn preserves_adjacency(&self, g: &Perm) -> bool {
        let a = &self.config.adjacency;
        (0..a.len()).all(|i| (0..a.len()).all(|j| a[i][j] == a[g.apply(i)][g.apply(j)]))
    }
}

/// The line permutation induced by the reflection in `root`.
pub fn reflection(config: &LineConfiguration, root: &PicClass) -> Perm {
    let images: Vec<usize> =
        config.lines.iter().map(|l| config.index_of(&l.reflect(root)).expect("reflections permute the lines")).collect();
    Perm::from_images(&images).expect("reflections are bijective")
}

/// Generated by the reflections in all roots.
pub fn weyl_group(d: u32) -> Result<WeylGroup, DpError> {
    let all = roots(d)?;
    let positive: Vec<PicClass> = all.iter().filter(|r| r > &&r.scale(-1)).cloned().collect();
    weyl_group_from_roots(d, &positive)
}

/// Generated by the reflections in the simple roots.
pub fn weyl_group_simple(d: u32) -> Result<WeylGroup, DpError> {
    weyl_group_from_roots(d, &simple_roots(d)?)
}

pub fn weyl_group_from_roots(d: u32, generating_roots: &[PicClass]) -> Result<WeylGroup, DpError> {
    if !(1..=6).contains(&d) {
        return Err(DpError::InvalidDegree(d));
    }
    let config = lines(d)?;
    let n = config.lines.len();
    let mut gens: Vec<Perm> = Vec::new();
    for r in generating_roots {
        if r.r() != config.r() || r.square() != -2 || r.dot(&PicClass::canonical(config.r())) != 0 {
            return Err(DpError::InvalidArgument(alloc::format!("{r} is not a root")));
        }
        let g = reflection(&config, r);
        if !gens.contains(&g) {
            gens.push(g);
        }
    }
    let group = PermGroup::new(n, &gens);
    let conics = conic_classes(d)?;
    let pairs: Vec<Vec<(usize, usize)>> = conics.iter().map(|c| singular_pairs(&config, c)).collect();
    let mut pair_conic = vec![vec![None; n]; n];
    for (c, ps) in pairs.iter().enumerate() {
        for &(i, j) in ps {
            pair_conic[i][j] = Some(c);
            pair_conic[j][i] = Some(c);
        }
    }
    Ok(WeylGroup { config, group, conics, pairs, pair_conic })
}

/// All permutations of the lines preserving every intersection number, by
/// backtracking over partial maps.
pub fn graph_automorphisms(config: &LineConfiguration) -> Vec<Perm> {
    let n = config.lines.len();
    let a = &config.adjacency;
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut out = Vec::new();
    fn go(i: usize, a: &[Vec<i64>], image: &mut [usize], used: &mut [bool], out: &mut Vec<Perm>) {
        let n = image.len();
        if i == n {
            out.push(Perm::from_images(image).expect("bijection"));
            return;
        }
        for j in 0..n {
            if used[j] || (0..i).any(|k| a[i][k] != a[j][image[k]]) {
                continue;
            }
            image[i] = j;
            used[j] = true;
            go(i + 1, a, image, used, out);
            used[j] = false;
        }
        image[i] = usize::MAX;
    }
    go(0, a, &mut image, &mut used, &mut out);
    out
}
