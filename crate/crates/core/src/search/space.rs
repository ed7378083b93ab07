//! The k-subsets of `[p]` in colex order, with the masks the orderly
//! search works on. A family is a `u128` whose bit `i` is the `i`-th
//! k-subset, so at most 128 subsets fit.

use itertools::Itertools;

use crate::bounds::binomial_u64;

pub(crate) struct SubsetSpace {
    pub k: usize,
    pub p: usize,
    /// Point mask of each subset, colex order.
    pub sets: Vec<u16>,
    /// Subset index by point mask; `u8::MAX` when not a k-subset.
    index_of: Vec<u8>,
    /// Subsets meeting subset `i`.
    pub meets: Vec<u128>,
    /// For every (k-1)-subset `S` of `[p]`, the subsets meeting `S`; a
    /// family inside one of these masks has a blocking set of size k-1.
    pub small_blockers: Vec<u128>,
    /// `level_start[j]` = C(j,k): subsets with top point `j` occupy
    /// `level_start[j]..level_start[j+1]`.
    pub level_start: Vec<usize>,
    /// `(k-1)`-subsets of `[j]` in colex order, per `j`.
    pub level_rests: Vec<Vec<u16>>,
}

pub(crate) fn colex_key(mask: u16) -> impl Ord {
    // Compare by descending member lists.
    let mut v: Vec<u32> = (0..16).filter(|i| mask >> i & 1 == 1).collect();
    v.reverse();
    v
}

fn subsets(items: usize, size: usize) -> Vec<u16> {
    let mut out: Vec<u16> = (0..items)
        .combinations(size)
        .map(|c| c.iter().fold(0u16, |m, &x| m | 1 << x))
        .collect();
    out.sort_by_key(|&m| colex_key(m));
    out
}

impl SubsetSpace {
    /// Panics unless `1 <= k <= p <= 16` and `C(p,k) <= 128`.
    pub fn new(k: usize, p: usize) -> Self {
        assert!(k >= 1 && k <= p && p <= 16);
        let sets = subsets(p, k);
        assert!(sets.len() <= 128, "{} subsets do not fit a u128", sets.len());
        let mut index_of = vec![u8::MAX; 1 << p];
        for (i, &m) in sets.iter().enumerate() {
            index_of[m as usize] = i as u8;
        }
        let meets = sets
            .iter()
            .map(|&a| {
                sets.iter()
                    .enumerate()
                    .filter(|(_, &b)| a & b != 0)
                    .fold(0u128, |m, (j, _)| m | 1 << j)
            })
            .collect();
        let small_blockers = subsets(p, k - 1)
            .into_iter()
            .map(|s| {
                sets.iter()
                    .enumerate()
                    .filter(|(_, &b)| s & b != 0)
                    .fold(0u128, |m, (j, _)| m | 1 << j)
            })
            .collect();
        let level_start = (0..=p + 1)
            .map(|j| binomial_u64(j as u64, k as u64) as usize)
            .collect();
        let level_rests = (0..p).map(|j| subsets(j, k - 1)).collect();
        SubsetSpace {
            k,
            p,
            sets,
            index_of,
            meets,
            small_blockers,
            level_start,
            level_rests,
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn full(&self) -> u128 {
        if self.sets.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.sets.len()) - 1
        }
    }

    pub fn index(&self, mask: u16) -> Option<usize> {
        let i = *self.index_of.get(mask as usize)?;
        (i != u8::MAX).then_some(i as usize)
    }

    /// All points used by `fam`.
    pub fn points(&self, fam: u128) -> u16 {
        bits(fam).fold(0, |m, i| m | self.sets[i])
    }

    /// `fam` has no blocking set of size below k.
    pub fn tau_at_least_k(&self, fam: u128) -> bool {
        if fam == 0 {
            return false;
        }
        self.small_blockers.iter().all(|&m| fam & !m != 0)
    }

    /// `fam` is intersecting with `tau = k` and no k-subset of `[p]` outside
    /// it blocks it.
    pub fn is_mif(&self, fam: u128) -> bool {
        self.tau_at_least_k(fam)
            && (0..self.len()).all(|x| fam >> x & 1 == 1 || fam & !self.meets[x] != 0)
    }

    /// Whether `fam` is least in colex order among its images under all
    /// permutations of `[p]`.
    pub fn is_canonical(&self, fam: u128) -> bool {
        if fam == 0 {
            return true;
        }
        let top = 15 - self.points(fam).leading_zeros() as usize;
        let mut pre = Vec::with_capacity(self.p);
        !self.find_smaller(fam, top, 0, &mut pre)
    }

    /// Extends the partial inverse permutation `pre` (`pre[j]` is the point
    /// sent to `j`) level by level; true once some image is smaller.
    fn find_smaller(&self, fam: u128, top: usize, used: u16, pre: &mut Vec<usize>) -> bool {
        let j = pre.len();
        if j > top {
            return false;
        }
        for u in 0..self.p {
            if used >> u & 1 == 1 {
                continue;
            }
            pre.push(u);
            let mut image = 0u128;
            for (r, &rest) in self.level_rests[j].iter().enumerate() {
                let mut m = 1u16 << u;
                for a in bits16(rest) {
                    m |= 1 << pre[a];
                }
                let idx = self.index(m).expect("k-subset");
                if fam >> idx & 1 == 1 {
                    image |= 1 << (self.level_start[j] + r);
                }
            }
            let level = self.level_mask(j);
            let diff = image ^ (fam & level);
            let found = if diff == 0 {
                self.find_smaller(fam, top, used | 1 << u, pre)
            } else {
                image & diff & diff.wrapping_neg() != 0
            };
            pre.pop();
            if found {
                return true;
            }
        }
        false
    }

    fn level_mask(&self, j: usize) -> u128 {
        let (lo, hi) = (self.level_start[j], self.level_start[j + 1]);
        if hi == lo {
            return 0;
        }
        let width = hi - lo;
        let ones = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
        ones << lo
    }

    pub fn to_point_lists(&self, fam: u128) -> Vec<Vec<usize>> {
        bits(fam).map(|i| bits16(self.sets[i]).collect()).collect()
    }
}

pub(crate) fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

pub(crate) fn bits16(mut m: u16) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_layout() {
        let s = SubsetSpace::new(3, 5);
        assert_eq!(s.len(), 10);
        assert_eq!(s.sets[0], 0b00111);
        assert_eq!(s.sets[1], 0b01011);
        assert_eq!(s.sets[3], 0b01110);
        assert_eq!(s.sets[4], 0b10011);
        assert_eq!(s.level_start[3], 1);
        assert_eq!(s.level_start[4], 4);
        assert_eq!(s.level_start[5], 10);
    }

    fn fam_of(s: &SubsetSpace, sets: &[&[usize]]) -> u128 {
        sets.iter().fold(0, |m, set| {
            let mask = set.iter().fold(0u16, |a, &x| a | 1 << x);
            m | 1u128 << s.index(mask).unwrap()
        })
    }

    // Brute force over all permutations of [p].
    fn canonical_by_permutations(s: &SubsetSpace, fam: u128) -> bool {
        (0..s.p).permutations(s.p).all(|perm| {
            let image = bits(fam).fold(0u128, |m, i| {
                let mask = bits16(s.sets[i]).fold(0u16, |a, x| a | 1 << perm[x]);
                m | 1 << s.index(mask).unwrap()
            });
            let diff = image ^ fam;
            diff == 0 || fam & diff & diff.wrapping_neg() != 0
        })
    }

    #[test]
    fn canonicity_matches_permutation_scan() {
        let s = SubsetSpace::new(3, 6);
        let families: Vec<u128> = vec![
            fam_of(&s, &[&[0, 1, 2]]),
            fam_of(&s, &[&[3, 4, 5]]),
            fam_of(&s, &[&[0, 1, 2], &[0, 1, 3]]),
            fam_of(&s, &[&[0, 1, 2], &[0, 3, 4]]),
            fam_of(&s, &[&[0, 1, 2], &[2, 3, 4]]),
            fam_of(&s, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3]]),
            fam_of(&s, &[&[0, 1, 2], &[0, 1, 3], &[2, 3, 4]]),
            fam_of(&s, &[&[0, 1, 2], &[0, 3, 4], &[1, 3, 5]]),
        ];
        for fam in families {
            assert_eq!(
                s.is_canonical(fam),
                canonical_by_permutations(&s, fam),
                "{:?}",
                s.to_point_lists(fam)
            );
        }
    }

    #[test]
    fn canonicity_matches_on_all_small_families() {
        // Every family of up to 3 triples on 5 points.
        let s = SubsetSpace::new(3, 5);
        for size in 1..=3 {
            for combo in (0..s.len()).combinations(size) {
                let fam = combo.iter().fold(0u128, |m, &i| m | 1 << i);
                assert_eq!(s.is_canonical(fam), canonical_by_permutations(&s, fam));
            }
        }
    }

    #[test]
    fn mif_test_on_masks() {
        let s = SubsetSpace::new(2, 4);
        let tri = fam_of(&s, &[&[0, 1], &[0, 2], &[1, 2]]);
        assert!(s.is_mif(tri));
        let star = fam_of(&s, &[&[0, 1], &[0, 2], &[0, 3]]);
        assert!(!s.is_mif(star));
        let s = SubsetSpace::new(3, 7);
        let fano = fam_of(
            &s,
            &[&[0, 1, 3], &[1, 2, 4], &[2, 3, 5], &[3, 4, 6], &[0, 4, 5], &[1, 5, 6], &[0, 2, 6]],
        );
        assert!(s.is_mif(fano));
    }
}
