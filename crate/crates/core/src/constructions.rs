//! Generators for the concrete families used throughout the crate.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::error::{MifError, Result};
use crate::family::{check_universe, Block, Family, PointId, DEFAULT_UNIVERSE_LIMIT};

/// Family with transversal number `t` whose transversals span
/// `k+t-2 + C(k+t-2, t-1)` points, together with that transversal family
/// in closed form.
#[derive(Clone, Debug)]
pub struct BgFamily {
    pub k: usize,
    pub t: usize,
    pub family: Family,
    /// The symbols of `S`, ids `0..k+t-2`.
    pub s_points: Vec<PointId>,
    /// `x_A` for every `(k-1)`-subset `A` of `S`, in lexicographic order of `A`.
    pub x_points: BTreeMap<Vec<PointId>, PointId>,
    pub expected_transversals: Family,
}

pub fn bg_family(k: usize, t: usize) -> Result<BgFamily> {
    bg_family_with_limit(k, t, DEFAULT_UNIVERSE_LIMIT)
}

pub fn bg_family_with_limit(k: usize, t: usize, limit: usize) -> Result<BgFamily> {
    if t < 2 || t + 1 > k {
        return Err(MifError::ParameterOutOfRange(format!(
            "bg(k,t) needs 2 <= t <= k-1, got k={k}, t={t}"
        )));
    }
    let s = k + t - 2;
    let subsets: Vec<Vec<PointId>> = (0..s).combinations(k - 1).collect();
    let universe = s + subsets.len();
    check_universe(universe, limit)?;

    let s_block = Block::from_points(0..s);
    let mut x_points = BTreeMap::new();
    let mut blocks: Vec<Block> = (0..s).combinations(k).map(Block::from_points).collect();
    let mut expected: Vec<Block> = (0..s).combinations(t).map(Block::from_points).collect();
    for (i, a) in subsets.into_iter().enumerate() {
        let x = s + i;
        let a_block = Block::from_points(a.iter().copied());
        blocks.push(a_block.with(x));
        expected.push(s_block.difference(&a_block).with(x));
        x_points.insert(a, x);
    }
    Ok(BgFamily {
        k,
        t,
        family: Family::new(universe, blocks)?,
        s_points: (0..s).collect(),
        x_points,
        expected_transversals: Family::new(universe, expected)?,
    })
}

/// Desarguesian planes of order 2 and 3 from cyclic difference sets.
pub fn projective_plane(q: usize) -> Result<Family> {
    let (n, base): (usize, &[usize]) = match q {
        2 => (7, &[1, 2, 4]),
        3 => (13, &[0, 1, 3, 9]),
        _ => return Err(MifError::UnsupportedOrder(q)),
    };
    let lines = (0..n).map(|shift| Block::from_points(base.iter().map(|d| (d + shift) % n)));
    Family::new(n, lines)
}

/// All `k`-subsets of a `(2k-1)`-set.
pub fn complete_family(k: usize) -> Result<Family> {
    complete_family_with_limit(k, DEFAULT_UNIVERSE_LIMIT)
}

pub fn complete_family_with_limit(k: usize, limit: usize) -> Result<Family> {
    if k < 2 {
        return Err(MifError::ParameterOutOfRange(format!(
            "complete family needs k >= 2, got {k}"
        )));
    }
    let n = 2 * k - 1;
    check_universe(n, limit).map_err(|_| {
        MifError::ParameterOutOfRange(format!("2k-1 = {n} exceeds the universe limit {limit}"))
    })?;
    Family::new(n, (0..n).combinations(k).map(Block::from_points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::binomial_u64;
    use crate::transversal::transversal_family;

    #[test]
    fn bg32_layout() {
        let bg = bg_family(3, 2).unwrap();
        assert_eq!(bg.s_points, vec![0, 1, 2]);
        assert_eq!(bg.family.len(), 4);
        assert!(bg.family.contains(&Block::from_points([0, 1, 2])));
        assert_eq!(bg.x_points[&vec![0, 1]], 3);
        assert!(bg.family.contains(&Block::from_points([0, 1, 3])));
        assert_eq!(bg.family.num_points(), 6);
        assert_eq!(bg.expected_transversals.len(), 6);
        assert_eq!(bg.expected_transversals.num_points(), 6);
    }

    #[test]
    fn bg42_transversal_points() {
        let bg = bg_family(4, 2).unwrap();
        assert_eq!(bg.expected_transversals.num_points(), 4 + 4);
        let report = transversal_family(&bg.family).unwrap();
        assert_eq!(report.tau, 2);
        assert_eq!(report.transversals, bg.expected_transversals);
    }

    #[test]
    fn bg_parameter_checks() {
        assert!(matches!(bg_family(3, 3), Err(MifError::ParameterOutOfRange(_))));
        assert!(matches!(bg_family(3, 1), Err(MifError::ParameterOutOfRange(_))));
        // |S| = 9, 126 new symbols: 135 points.
        assert!(matches!(
            bg_family(6, 5),
            Err(MifError::UniverseOverflow { requested: 135, limit: 128 })
        ));
        assert_eq!(bg_family_with_limit(6, 5, 256).unwrap().family.universe(), 135);
    }

    #[test]
    fn bg_expected_point_count_formula() {
        for k in 3..=6 {
            for t in 2..k {
                let bg = bg_family_with_limit(k, t, 256).unwrap();
                let s = (k + t - 2) as u64;
                let want = s + binomial_u64(s, (t - 1) as u64);
                assert_eq!(bg.expected_transversals.num_points() as u64, want, "k={k} t={t}");
            }
        }
    }

    #[test]
    fn planes_are_linear_spaces() {
        for q in [2, 3] {
            let plane = projective_plane(q).unwrap();
            let n = q * q + q + 1;
            assert_eq!(plane.len(), n);
            assert_eq!(plane.num_points(), n);
            assert_eq!(plane.uniform_block_size(), Some(q + 1));
            assert!(plane.uncovered_pairs().is_empty());
            for (i, a) in plane.iter().enumerate() {
                for b in &plane.blocks()[i + 1..] {
                    assert_eq!(a.intersection(b).len(), 1);
                }
            }
        }
        assert_eq!(projective_plane(4).unwrap_err(), MifError::UnsupportedOrder(4));
    }

    #[test]
    fn complete_families() {
        assert_eq!(
            complete_family(2).unwrap(),
            Family::from_sets(&[[0, 1], [1, 2], [0, 2]])
        );
        assert_eq!(complete_family(3).unwrap().len(), 10);
        let k4 = complete_family(4).unwrap();
        assert_eq!((k4.len(), k4.num_points()), (35, 7));
        assert!(matches!(complete_family(1), Err(MifError::ParameterOutOfRange(_))));
        assert!(matches!(complete_family(65), Err(MifError::ParameterOutOfRange(_))));
    }
}
