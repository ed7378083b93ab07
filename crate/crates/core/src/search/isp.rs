//! Exhaustive search for the largest point count of an ISP(k,t).
//!
//! Pairs are chosen in order; within a pair, `A_i` first. A new set takes
//! some already used points plus fresh ones, and fresh points get the next
//! unused labels, so labels follow first use. Used points that lie in
//! exactly the same sets so far are interchangeable, and only the lowest
//! members of such a class are ever picked.

use crate::error::{MifError, Result};

pub(crate) struct IspOutcome {
    pub max_points: usize,
    /// `(A_i, B_i)` as point masks.
    pub witness: Vec<(u32, u32)>,
    pub nodes: u64,
}

struct Walk {
    k: usize,
    t: usize,
    max_pairs: usize,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    pairs: Vec<(u32, u32)>,
    best: usize,
    best_pairs: Vec<(u32, u32)>,
}

impl Walk {
    /// Point classes of `[0, used)` by membership in the chosen sets.
    fn classes(&self, used: usize, extra: Option<u32>) -> Vec<Vec<usize>> {
        let mut sig: Vec<(Vec<bool>, usize)> = (0..used)
            .map(|x| {
                let mut s: Vec<bool> = self
                    .pairs
                    .iter()
                    .flat_map(|&(a, b)| [a >> x & 1 == 1, b >> x & 1 == 1])
                    .collect();
                if let Some(e) = extra {
                    s.push(e >> x & 1 == 1);
                }
                (s, x)
            })
            .collect();
        sig.sort();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut last: Option<&Vec<bool>> = None;
        for (s, x) in &sig {
            if last == Some(s) {
                out.last_mut().expect("open class").push(*x);
            } else {
                out.push(vec![*x]);
            }
            last = Some(s);
        }
        out
    }

    fn visit(&mut self, used: usize) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if used > self.best {
            self.best = used;
            self.best_pairs = self.pairs.clone();
        }
        let i = self.pairs.len();
        if i == self.max_pairs {
            return;
        }
        // Later pairs each reuse at least one point on both sides.
        let per_pair = if i == 0 { self.k + self.t } else { self.k + self.t - 2 };
        let first_extra = per_pair + (self.max_pairs - i - 1) * (self.k + self.t - 2);
        if used + first_extra <= self.best {
            return;
        }
        let (k, t) = (self.k, self.t);
        let a_choices: Vec<u32> = picks(&self.classes(used, None), k)
            .into_iter()
            .filter(|&a| self.pairs.iter().all(|&(_, b)| a & b != 0))
            .collect();
        for a_used in a_choices {
            let fresh_a = k - a_used.count_ones() as usize;
            let a = a_used | span(used, fresh_a);
            let after_a = used + fresh_a;
            let b_classes: Vec<Vec<usize>> = self
                .classes(used, Some(a))
                .into_iter()
                .filter(|c| a >> c[0] & 1 == 0)
                .collect();
            let b_choices: Vec<u32> = picks(&b_classes, t)
                .into_iter()
                .filter(|&b| self.pairs.iter().all(|&(a_j, _)| a_j & b != 0))
                .collect();
            for b_used in b_choices {
                let fresh_b = t - b_used.count_ones() as usize;
                let b = b_used | span(after_a, fresh_b);
                self.pairs.push((a, b));
                self.visit(after_a + fresh_b);
                self.pairs.pop();
                if self.exhausted {
                    return;
                }
            }
        }
    }
}

fn span(start: usize, len: usize) -> u32 {
    (((1u64 << len) - 1) << start) as u32
}

/// Every way to pick at most `max` points taking a prefix of each class.
fn picks(classes: &[Vec<usize>], max: usize) -> Vec<u32> {
    let mut out = Vec::new();
    fn go(classes: &[Vec<usize>], left: usize, acc: u32, out: &mut Vec<u32>) {
        let Some((first, rest)) = classes.split_first() else {
            out.push(acc);
            return;
        };
        let mut m = acc;
        go(rest, left, m, out);
        for (taken, &x) in first.iter().enumerate().take(left) {
            m |= 1 << x;
            go(rest, left - taken - 1, m, out);
        }
    }
    go(classes, max, 0, &mut out);
    out
}

pub(crate) fn search(k: usize, t: usize, max_pairs: usize, budget: u64) -> Result<IspOutcome> {
    if max_pairs * (k + t) > 32 {
        return Err(MifError::UnsupportedParams(format!(
            "ISP({k},{t}) universe {} exceeds 32 points",
            max_pairs * (k + t)
        )));
    }
    let mut w = Walk {
        k,
        t,
        max_pairs,
        budget,
        nodes: 0,
        exhausted: false,
        pairs: Vec::new(),
        best: 0,
        best_pairs: Vec::new(),
    };
    w.visit(0);
    if w.exhausted {
        return Err(MifError::BudgetExceeded { budget });
    }
    Ok(IspOutcome {
        max_points: w.best,
        witness: w.best_pairs,
        nodes: w.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_take_class_prefixes() {
        let classes = vec![vec![0, 1], vec![2]];
        let mut got = picks(&classes, 2);
        got.sort();
        assert_eq!(got, vec![0b000, 0b001, 0b011, 0b100, 0b101]);
    }

    #[test]
    fn single_pair_systems() {
        let out = search(2, 1, 1, 1000).unwrap();
        assert_eq!(out.max_points, 3);
    }
}
