//! Finite set families over a bounded universe.

mod block;
pub mod format;

pub use block::{Block, BlockIter, PointId, MAX_UNIVERSE};

use crate::error::{MifError, Result};

/// Universe limit applied by parsers and generators unless raised explicitly.
pub const DEFAULT_UNIVERSE_LIMIT: usize = 128;

/// Fails with `UniverseOverflow` if `requested` exceeds `limit` or the
/// block capacity.
pub fn check_universe(requested: usize, limit: usize) -> Result<()> {
    let limit = limit.min(MAX_UNIVERSE);
    if requested > limit {
        return Err(MifError::UniverseOverflow { requested, limit });
    }
    Ok(())
}

/// A finite collection of distinct blocks over the points `0..universe`.
///
/// Blocks are kept sorted and deduplicated, so two families with the same
/// blocks compare equal regardless of construction order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    universe: usize,
    labels: Option<Vec<String>>,
    blocks: Vec<Block>,
}

impl Family {
    pub fn new<I: IntoIterator<Item = Block>>(universe: usize, blocks: I) -> Result<Self> {
        check_universe(universe, MAX_UNIVERSE)?;
        let mut blocks: Vec<Block> = blocks.into_iter().collect();
        for b in &blocks {
            if let Some(p) = b.last() {
                if p >= universe {
                    return Err(MifError::PointOutOfUniverse { point: p, universe });
                }
            }
        }
        blocks.sort();
        blocks.dedup();
        Ok(Family {
            universe,
            labels: None,
            blocks,
        })
    }

    /// Builds a family whose universe is one past its largest point.
    pub fn from_blocks<I: IntoIterator<Item = Block>>(blocks: I) -> Self {
        let blocks: Vec<Block> = blocks.into_iter().collect();
        let universe = blocks
            .iter()
            .filter_map(Block::last)
            .max()
            .map_or(0, |p| p + 1);
        Family::new(universe, blocks).expect("universe derived from blocks")
    }

    /// Convenience constructor from point lists; panics on invalid input.
    pub fn from_sets<S: AsRef<[PointId]>>(sets: &[S]) -> Self {
        Family::from_blocks(
            sets.iter()
                .map(|s| Block::from_points(s.as_ref().iter().copied())),
        )
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.universe {
            return Err(MifError::LabelCount {
                labels: labels.len(),
                universe: self.universe,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(MifError::DuplicateLabel(l.clone()));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Same blocks over a larger universe.
    pub fn with_universe(&self, universe: usize) -> Result<Self> {
        let mut f = Family::new(universe, self.blocks.iter().copied())?;
        if universe == self.universe {
            f.labels = self.labels.clone();
        }
        Ok(f)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Block> {
        self.blocks.iter()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn contains(&self, block: &Block) -> bool {
        self.blocks.binary_search(block).is_ok()
    }

    pub fn has_empty_block(&self) -> bool {
        self.blocks.first().is_some_and(Block::is_empty)
    }

    /// The union of all blocks.
    pub fn point_set(&self) -> Block {
        self.blocks
            .iter()
            .fold(Block::empty(), |acc, b| acc.union(b))
    }

    /// Number of points, i.e. the size of [`Family::point_set`].
    pub fn num_points(&self) -> usize {
        self.point_set().len()
    }

    /// Common block size; `None` for the empty family or mixed sizes.
    pub fn uniform_block_size(&self) -> Option<usize> {
        let k = self.blocks.first()?.len();
        self.blocks.iter().all(|b| b.len() == k).then_some(k)
    }

    pub fn is_intersecting(&self) -> bool {
        self.blocks.iter().enumerate().all(|(i, a)| {
            self.blocks[i..].iter().all(|b| a.intersects(b))
        })
    }

    /// True iff `set` meets every block; vacuously true for the empty family.
    pub fn is_blocking_set(&self, set: &Block) -> bool {
        self.blocks.iter().all(|b| b.intersects(set))
    }

    /// Pairs of distinct points of the family not contained together in any
    /// block, ascending.
    pub fn uncovered_pairs(&self) -> Vec<(PointId, PointId)> {
        let points = self.point_set().to_vec();
        let mut out = Vec::new();
        for (i, &a) in points.iter().enumerate() {
            for &b in &points[i + 1..] {
                if !self.blocks.iter().any(|bl| bl.contains(a) && bl.contains(b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Keeps the blocks matching `pred`, over the same universe.
    pub fn filter(&self, pred: impl Fn(&Block) -> bool) -> Family {
        Family {
            universe: self.universe,
            labels: self.labels.clone(),
            blocks: self.blocks.iter().copied().filter(|b| pred(b)).collect(),
        }
    }

    /// Blocks disjoint from `avoid`.
    pub fn avoiding(&self, avoid: &Block) -> Family {
        self.filter(|b| b.is_disjoint(avoid))
    }

    pub fn without_block(&self, index: usize) -> Family {
        let mut f = self.clone();
        f.blocks.remove(index);
        f
    }

    /// Applies the relabeling `map[p]` (a permutation of the universe).
    pub fn relabel(&self, map: &[PointId]) -> Result<Family> {
        let universe = self.universe;
        Family::new(universe, self.blocks.iter().map(|b| b.relabel(map)))
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.blocks.iter().all(|b| other.contains(b))
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a Block;
    type IntoIter = std::slice::Iter<'a, Block>;

    fn into_iter(self) -> Self::IntoIter {
        self.blocks.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Family {
        Family::from_sets(&[[0, 1], [1, 2], [0, 2]])
    }

    #[test]
    fn point_set_is_union_of_blocks() {
        let f = Family::from_sets(&[[0, 1], [1, 2]]);
        assert_eq!(f.point_set().to_vec(), vec![0, 1, 2]);
        assert_eq!(f.num_points(), 3);
        let empty = Family::new(4, []).unwrap();
        assert!(empty.point_set().is_empty());
    }

    #[test]
    fn uniform_block_size_cases() {
        assert_eq!(triangle().uniform_block_size(), Some(2));
        let mixed = Family::from_blocks([Block::from_points([0, 1]), Block::from_points([0, 1, 2])]);
        assert_eq!(mixed.uniform_block_size(), None);
        assert_eq!(Family::new(3, []).unwrap().uniform_block_size(), None);
    }

    #[test]
    fn intersecting_cases() {
        assert!(triangle().is_intersecting());
        assert!(!Family::from_sets(&[[0, 1], [2, 3]]).is_intersecting());
        let triples: Vec<Block> = itertools::Itertools::combinations(0..5usize, 3)
            .map(Block::from_points)
            .collect();
        assert!(Family::from_blocks(triples).is_intersecting());
    }

    #[test]
    fn blocking_set_cases() {
        let f = Family::from_sets(&[[0, 1], [1, 2]]);
        assert!(f.is_blocking_set(&Block::singleton(1)));
        assert!(!f.is_blocking_set(&Block::singleton(0)));
        assert!(Family::new(2, []).unwrap().is_blocking_set(&Block::empty()));
    }

    #[test]
    fn uncovered_pairs_cases() {
        assert!(triangle().uncovered_pairs().is_empty());
        let f = Family::from_sets(&[[0, 1, 2], [0, 3, 4], [2, 3, 5]]);
        let pairs = f.uncovered_pairs();
        assert!(pairs.contains(&(1, 3)));
        assert!(pairs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_points_outside_universe() {
        let err = Family::new(2, [Block::from_points([0, 2])]).unwrap_err();
        assert_eq!(err, MifError::PointOutOfUniverse { point: 2, universe: 2 });
        assert!(matches!(
            Family::new(300, []),
            Err(MifError::UniverseOverflow { .. })
        ));
    }

    #[test]
    fn duplicate_blocks_collapse_and_order_is_canonical() {
        let a = Family::from_sets(&[vec![1, 2], vec![0, 1], vec![1, 2]]);
        let b = Family::from_sets(&[[0, 1], [1, 2]]);
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn labels_must_be_unique() {
        let f = Family::from_sets(&[[0, 1]]);
        assert!(f.clone().with_labels(vec!["a".into(), "b".into()]).is_ok());
        assert_eq!(
            f.with_labels(vec!["a".into(), "a".into()]).unwrap_err(),
            MifError::DuplicateLabel("a".into())
        );
    }
}
