use itertools::Itertools;
use miflab::search::enumerate_mifs;
use miflab::transversal::{brute_force_transversals, finite_tau, transversal_family};
use miflab::{canonicalize, Block, CanonicalForm, Family};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn uniform_family() -> impl Strategy<Value = Family> {
    (2usize..=4, 0usize..=6).prop_flat_map(|(k, extra)| {
        let n = k + extra;
        let block = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), k);
        proptest::collection::vec(block, 1..=9)
            .prop_map(move |sets| Family::new(n, sets.into_iter().map(Block::from_points)).unwrap())
    })
}

proptest! {
    #[test]
    fn solver_matches_oracle(f in uniform_family()) {
        let fast = transversal_family(&f).unwrap();
        let slow = brute_force_transversals(&f).unwrap();
        prop_assert!(fast.same_result(&slow));
        let k = f.uniform_block_size().unwrap();
        prop_assert!(fast.transversals.len() <= k.pow(fast.tau as u32));
    }

    #[test]
    fn tau_is_monotone_on_subfamilies(f in uniform_family(), drop in any::<prop::sample::Index>()) {
        prop_assume!(f.len() > 1);
        let sub = f.without_block(drop.index(f.len()));
        prop_assert!(finite_tau(&sub).unwrap() <= finite_tau(&f).unwrap());
    }

    #[test]
    fn canonical_form_ignores_labels(f in uniform_family(), seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut perm: Vec<usize> = (0..f.universe()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(canonicalize(&f), canonicalize(&f.relabel(&perm).unwrap()));
    }
}

/// Forms of all MIF(3) on at most `p` points: maximal cliques of the
/// intersection graph on 3-subsets of `[p]` whose transversal number is 3.
fn clique_oracle(p: usize) -> BTreeSet<CanonicalForm> {
    let sets: Vec<Block> = (0..p).combinations(3).map(Block::from_points).collect();
    let adj: Vec<u64> = sets
        .iter()
        .map(|a| sets.iter().enumerate().filter(|(_, b)| a.intersects(b) && a != *b).fold(0, |m, (j, _)| m | 1 << j))
        .collect();
    let mut out = BTreeSet::new();
    fn bk(r: u64, mut p: u64, mut x: u64, adj: &[u64], sets: &[Block], out: &mut BTreeSet<CanonicalForm>) {
        if p == 0 && x == 0 {
            let fam = Family::from_blocks((0..64).filter(|i| r >> i & 1 == 1).map(|i| sets[i]));
            if finite_tau(&fam).unwrap() == 3 {
                out.insert(canonicalize(&fam));
            }
            return;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let mut todo = p & !adj[pivot];
        while todo != 0 {
            let v = todo.trailing_zeros() as usize;
            todo &= todo - 1;
            bk(r | 1 << v, p & adj[v], x & adj[v], adj, sets, out);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
    bk(0, (1u64 << sets.len()) - 1, 0, &adj, &sets, &mut out);
    out
}

#[test]
fn search_agrees_with_clique_oracle_on_seven_points() {
    let oracle = clique_oracle(7);
    let found: BTreeSet<CanonicalForm> = enumerate_mifs(3, 7).unwrap().canonical_mifs.into_iter().map(|c| c.form).collect();
    assert_eq!(found, oracle);
}

#[test]
fn mif3_classes_by_point_count() {
    // Independently counted by maximal-clique enumeration.
    let r = enumerate_mifs(3, 9).unwrap();
    assert_eq!(r.canonical_mifs.len(), 8);
    assert_eq!(r.counts_by_point_count.into_iter().collect::<Vec<_>>(), vec![(5, 1), (6, 5), (7, 2)]);
}

#[test]
fn every_search_result_is_mif_and_pairwise_distinct() {
    let r = enumerate_mifs(3, 9).unwrap();
    for (a, b) in r.canonical_mifs.iter().tuple_combinations() {
        assert_ne!(a.form, b.form);
        assert!(!miflab::canon::are_isomorphic(&a.representative, &b.representative));
    }
    for c in &r.canonical_mifs {
        assert!(miflab::mif::is_mif(&c.representative).unwrap().is_mif());
        assert!(miflab::mif::is_one_critical(&c.representative));
    }
}
