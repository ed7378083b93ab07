use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Index of a point in the universe of a family.
pub type PointId = usize;

const WORDS: usize = 4;

/// Hard capacity of a [`Block`] bitmask.
pub const MAX_UNIVERSE: usize = WORDS * 64;

/// A finite set of points stored as a fixed-width bitmask.
///
/// Blocks order lexicographically by their ascending member lists, so
/// `{0,1} < {0,1,2} < {0,2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Block {
    words: [u64; WORDS],
}

impl Block {
    pub const fn empty() -> Self {
        Block { words: [0; WORDS] }
    }

    /// Panics if a point is `>= MAX_UNIVERSE`.
    pub fn from_points<I: IntoIterator<Item = PointId>>(points: I) -> Self {
        let mut b = Block::empty();
        for p in points {
            b.insert(p);
        }
        b
    }

    pub fn singleton(p: PointId) -> Self {
        let mut b = Block::empty();
        b.insert(p);
        b
    }

    #[inline]
    pub fn insert(&mut self, p: PointId) {
        assert!(p < MAX_UNIVERSE, "point {p} exceeds block capacity");
        self.words[p / 64] |= 1u64 << (p % 64);
    }

    #[inline]
    pub fn remove(&mut self, p: PointId) {
        if p < MAX_UNIVERSE {
            self.words[p / 64] &= !(1u64 << (p % 64));
        }
    }

    pub fn with(mut self, p: PointId) -> Self {
        self.insert(p);
        self
    }

    pub fn without(mut self, p: PointId) -> Self {
        self.remove(p);
        self
    }

    #[inline]
    pub fn contains(&self, p: PointId) -> bool {
        p < MAX_UNIVERSE && self.words[p / 64] & (1u64 << (p % 64)) != 0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn intersects(&self, other: &Block) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &Block) -> bool {
        !self.intersects(other)
    }

    #[inline]
    pub fn is_subset(&self, other: &Block) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    fn zip_with(&self, other: &Block, f: impl Fn(u64, u64) -> u64) -> Block {
        let mut words = [0; WORDS];
        for (i, w) in words.iter_mut().enumerate() {
            *w = f(self.words[i], other.words[i]);
        }
        Block { words }
    }

    pub fn union(&self, other: &Block) -> Block {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Block) -> Block {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Block) -> Block {
        self.zip_with(other, |a, b| a & !b)
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<PointId> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Largest member, if any.
    pub fn last(&self) -> Option<PointId> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> BlockIter {
        BlockIter {
            words: self.words,
            word: 0,
        }
    }

    pub fn to_vec(&self) -> Vec<PointId> {
        self.iter().collect()
    }

    /// Applies a point relabeling; `map[p]` is the new id of `p`.
    pub fn relabel(&self, map: &[PointId]) -> Block {
        Block::from_points(self.iter().map(|p| map[p]))
    }
}

pub struct BlockIter {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for BlockIter {
    type Item = PointId;

    fn next(&mut self) -> Option<PointId> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                let bit = w.trailing_zeros() as usize;
                self.words[self.word] = w & (w - 1);
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
        }
        None
    }
}

impl FromIterator<PointId> for Block {
    fn from_iter<I: IntoIterator<Item = PointId>>(iter: I) -> Self {
        Block::from_points(iter)
    }
}

impl Ord for Block {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Block {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let points = Vec::<PointId>::deserialize(deserializer)?;
        if let Some(&p) = points.iter().find(|&&p| p >= MAX_UNIVERSE) {
            return Err(serde::de::Error::custom(format!(
                "point {p} exceeds block capacity {MAX_UNIVERSE}"
            )));
        }
        let block = Block::from_points(points.iter().copied());
        if block.len() != points.len() {
            return Err(serde::de::Error::custom("duplicate point in block"));
        }
        Ok(block)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_lexicographic_on_members() {
        let a = Block::from_points([0, 1]);
        let b = Block::from_points([0, 1, 2]);
        let c = Block::from_points([0, 2]);
        let d = Block::from_points([200]);
        assert!(a < b && b < c && c < d);
        assert!(Block::empty() < a);
    }

    #[test]
    fn set_operations_cross_word_boundaries() {
        let a = Block::from_points([3, 64, 130, 255]);
        let b = Block::from_points([64, 255]);
        assert_eq!(a.len(), 4);
        assert!(b.is_subset(&a));
        assert_eq!(a.difference(&b).to_vec(), vec![3, 130]);
        assert_eq!(a.first(), Some(3));
        assert_eq!(a.last(), Some(255));
        assert!(a.intersects(&b));
        assert!(Block::singleton(5).is_disjoint(&a));
    }
}
