//! Canonical forms of families up to point relabeling.
//!
//! Individualization-refinement over the point/block incidence graph: color
//! refinement until stable, then branch on every point of the first smallest
//! non-singleton point cell. Each leaf yields a labeling of the point set;
//! the canonical form is the least relabeled sorted block list over all
//! leaves. The leaf set is permuted along with the input, so isomorphic
//! families reach the same minimum.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::family::{Block, Family};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Blocks over the points `0..num_points`, sorted.
    pub blocks: Vec<Block>,
    pub num_points: usize,
    pub hash: u64,
}

impl CanonicalForm {
    fn new(num_points: usize, blocks: Vec<Block>) -> Self {
        let mut hasher = Sha256::new();
        hasher.update((num_points as u64).to_le_bytes());
        for b in &blocks {
            hasher.update((b.len() as u64).to_le_bytes());
            for p in b.iter() {
                hasher.update((p as u64).to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        let mut first = [0u8; 8];
        first.copy_from_slice(&digest[..8]);
        CanonicalForm {
            blocks,
            num_points,
            hash: u64::from_le_bytes(first),
        }
    }

    /// The canonical representative as a family on `0..num_points`.
    pub fn to_family(&self) -> Family {
        Family::new(self.num_points, self.blocks.iter().copied()).expect("canonical points in range")
    }
}

struct Incidence {
    /// Vertices `0..n_points` are points, the rest are blocks.
    n_points: usize,
    adj: Vec<Vec<usize>>,
    blocks: Vec<Vec<usize>>,
}

impl Incidence {
    fn new(family: &Family) -> Self {
        let points = family.point_set().to_vec();
        let mut index = vec![usize::MAX; family.universe()];
        for (i, &p) in points.iter().enumerate() {
            index[p] = i;
        }
        let n_points = points.len();
        let blocks: Vec<Vec<usize>> = family
            .iter()
            .map(|b| b.iter().map(|p| index[p]).collect())
            .collect();
        let mut adj = vec![Vec::new(); n_points + blocks.len()];
        for (bi, members) in blocks.iter().enumerate() {
            for &p in members {
                adj[p].push(n_points + bi);
                adj[n_points + bi].push(p);
            }
        }
        Incidence {
            n_points,
            adj,
            blocks,
        }
    }

    /// Refines `colors` to the coarsest stable coloring finer than it.
    /// New colors are ranks of sorted signatures, hence labeling-invariant.
    fn refine(&self, colors: &mut Vec<usize>) {
        let mut n_colors = distinct(colors);
        loop {
            let sigs: Vec<(usize, Vec<usize>)> = (0..colors.len())
                .map(|v| {
                    let mut nb: Vec<usize> = self.adj[v].iter().map(|&u| colors[u]).collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let mut sorted: Vec<&(usize, Vec<usize>)> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            let next: Vec<usize> = sigs
                .iter()
                .map(|s| sorted.binary_search(&s).expect("signature present"))
                .collect();
            let count = sorted.len();
            *colors = next;
            if count == n_colors {
                return;
            }
            n_colors = count;
        }
    }

    fn individualize(&self, colors: &[usize], v: usize) -> Vec<usize> {
        // v gets a color just below its old cell; everything above shifts up.
        colors
            .iter()
            .enumerate()
            .map(|(u, &c)| {
                if c > colors[v] || (c == colors[v] && u != v) {
                    c + 1
                } else {
                    c
                }
            })
            .collect()
    }

    fn search(&self, colors: Vec<usize>, best: &mut Option<Vec<Block>>) {
        let mut colors = colors;
        self.refine(&mut colors);
        let mut cell_sizes = std::collections::BTreeMap::new();
        for &c in &colors[..self.n_points] {
            *cell_sizes.entry(c).or_insert(0usize) += 1;
        }
        let target = cell_sizes
            .iter()
            .filter(|(_, &size)| size > 1)
            .min_by_key(|(&c, &size)| (size, c))
            .map(|(&c, _)| c);
        match target {
            None => {
                let form = self.leaf_form(&colors);
                if best.as_ref().is_none_or(|b| form < *b) {
                    *best = Some(form);
                }
            }
            Some(cell) => {
                for v in 0..self.n_points {
                    if colors[v] == cell {
                        self.search(self.individualize(&colors, v), best);
                    }
                }
            }
        }
    }

    fn leaf_form(&self, colors: &[usize]) -> Vec<Block> {
        let mut order: Vec<usize> = (0..self.n_points).collect();
        order.sort_by_key(|&v| colors[v]);
        let mut label = vec![0; self.n_points];
        for (new, &v) in order.iter().enumerate() {
            label[v] = new;
        }
        let mut blocks: Vec<Block> = self
            .blocks
            .iter()
            .map(|members| members.iter().map(|&p| label[p]).collect())
            .collect();
        blocks.sort();
        blocks
    }
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Canonical form of `family` under permutations of its points. Points of
/// the universe that lie in no block are ignored.
pub fn canonicalize(family: &Family) -> CanonicalForm {
    let inc = Incidence::new(family);
    if inc.n_points == 0 {
        let blocks = if family.is_empty() { vec![] } else { vec![Block::empty()] };
        return CanonicalForm::new(0, blocks);
    }
    let colors: Vec<usize> = (0..inc.adj.len())
        .map(|v| usize::from(v >= inc.n_points))
        .collect();
    let mut best = None;
    inc.search(colors, &mut best);
    CanonicalForm::new(inc.n_points, best.expect("at least one leaf"))
}

pub fn are_isomorphic(a: &Family, b: &Family) -> bool {
    a.len() == b.len() && a.num_points() == b.num_points() && canonicalize(a) == canonicalize(b)
}
