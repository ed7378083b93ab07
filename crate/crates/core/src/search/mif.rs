//! Orderly generation of MIF(k) on `[p]`.
//!
//! A node is an intersecting family of k-subsets, grown by subsets of larger
//! colex index than its last one, and kept only while it is colex-least in
//! its orbit under permutations of `[p]`. Every orbit's least member is
//! reachable this way because removing the largest subset of a least family
//! leaves a least family.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use super::space::{bits, SubsetSpace};
use super::SearchConfig;
use crate::error::{MifError, Result};

/// Number of blocks at which the tree is split into parallel subtrees.
const FRONTIER_DEPTH: u32 = 4;

pub(crate) struct RawOutcome {
    pub mifs: BTreeSet<u128>,
    pub nodes: u64,
}

struct Shared<'a> {
    space: &'a SubsetSpace,
    nodes: AtomicU64,
    budget: u64,
    exhausted: AtomicBool,
}

struct Walker<'a, 'b> {
    shared: &'b Shared<'a>,
    mifs: BTreeSet<u128>,
    nodes: u64,
    /// Nodes at this depth are collected instead of expanded.
    stop_at: Option<u32>,
    frontier: Vec<(u128, u128)>,
}

impl Walker<'_, '_> {
    fn visit(&mut self, fam: u128, cand: u128) {
        if self.shared.exhausted.load(Ordering::Relaxed) {
            return;
        }
        self.nodes += 1;
        if self.shared.nodes.fetch_add(1, Ordering::Relaxed) + 1 > self.shared.budget {
            self.shared.exhausted.store(true, Ordering::Relaxed);
            return;
        }
        let s = self.shared.space;
        if s.is_mif(fam) {
            self.mifs.insert(fam);
            return;
        }
        if !self.promising(fam, cand) {
            return;
        }
        if self.stop_at == Some(fam.count_ones()) {
            self.frontier.push((fam, cand));
            return;
        }
        for c in bits(cand) {
            let child = fam | 1 << c;
            if !s.is_canonical(child) {
                continue;
            }
            let above = if c == 127 { 0 } else { !0u128 << (c + 1) };
            self.visit(child, cand & s.meets[c] & above);
        }
    }

    /// Some completion of `fam` by members of `cand` could still be a MIF.
    fn promising(&self, fam: u128, cand: u128) -> bool {
        let s = self.shared.space;
        let reach = fam | cand;
        if !s.tau_at_least_k(reach) {
            return false;
        }
        // A k-subset that blocks `fam` but can never join must be destroyed
        // by some later block that misses it.
        (0..s.len()).all(|x| {
            let bit = 1u128 << x;
            reach & bit != 0 || fam & !s.meets[x] != 0 || cand & !s.meets[x] != 0
        })
    }
}

pub(crate) fn search(space: &SubsetSpace, config: &SearchConfig) -> Result<RawOutcome> {
    let shared = Shared {
        space,
        nodes: AtomicU64::new(0),
        budget: config.budget,
        exhausted: AtomicBool::new(false),
    };
    let mut log = match &config.checkpoint {
        Some(path) => Some(Checkpoint::open(path, space)?),
        None => None,
    };
    let mut top = Walker {
        shared: &shared,
        mifs: BTreeSet::new(),
        nodes: 0,
        stop_at: Some(FRONTIER_DEPTH),
        frontier: Vec::new(),
    };
    top.visit(0, space.full());
    if shared.exhausted.load(Ordering::Relaxed) {
        return Err(MifError::BudgetExceeded {
            budget: config.budget,
        });
    }
    let mut mifs = top.mifs;
    let mut nodes = top.nodes;
    let mut pending = Vec::new();
    for (root, cand) in top.frontier {
        match log.as_ref().and_then(|l| l.done.get(&root)) {
            Some(done) => {
                nodes += done.nodes;
                mifs.extend(done.mifs.iter().copied());
            }
            None => pending.push((root, cand)),
        }
    }
    let writer = log.as_mut().map(|l| Mutex::new(&mut l.file));
    let run = |(root, cand): (u128, u128)| -> Result<(u128, RawOutcome)> {
        let mut w = Walker {
            shared: &shared,
            mifs: BTreeSet::new(),
            nodes: 0,
            stop_at: None,
            frontier: Vec::new(),
        };
        // The root itself was visited while building the frontier.
        let s = space;
        for c in bits(cand) {
            let child = root | 1 << c;
            if s.is_canonical(child) {
                let above = if c == 127 { 0 } else { !0u128 << (c + 1) };
                w.visit(child, cand & s.meets[c] & above);
            }
        }
        if shared.exhausted.load(Ordering::Relaxed) {
            return Err(MifError::BudgetExceeded {
                budget: shared.budget,
            });
        }
        let out = RawOutcome {
            mifs: w.mifs,
            nodes: w.nodes,
        };
        if let Some(writer) = &writer {
            let mut file = writer.lock().expect("checkpoint lock");
            write_done(&mut file, s, root, &out)?;
        }
        Ok((root, out))
    };
    let results: Vec<Result<(u128, RawOutcome)>> = match config.workers {
        Some(1) => pending.into_iter().map(run).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| MifError::InvariantViolation(format!("thread pool: {e}")))?
            .install(|| pending.into_par_iter().map(run).collect()),
        None => pending.into_par_iter().map(run).collect(),
    };
    for r in results {
        let (_, out) = r?;
        nodes += out.nodes;
        mifs.extend(out.mifs);
    }
    Ok(RawOutcome { mifs, nodes })
}

struct DoneRoot {
    nodes: u64,
    mifs: Vec<u128>,
}

/// Append-only log of finished frontier subtrees.
///
/// ```text
/// mifsearch-v1 k=3 p=9 depth=4
/// done <root> <nodes> <mif>*
/// ```
/// where each family is its blocks joined by `;`, each block its points
/// joined by `,`, and a subtree without MIFs has no trailing fields.
struct Checkpoint {
    file: File,
    done: std::collections::HashMap<u128, DoneRoot>,
}

fn header(space: &SubsetSpace) -> String {
    format!("mifsearch-v1 k={} p={} depth={}", space.k, space.p, FRONTIER_DEPTH)
}

fn encode(space: &SubsetSpace, fam: u128) -> String {
    space
        .to_point_lists(fam)
        .iter()
        .map(|b| b.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

fn decode(space: &SubsetSpace, text: &str, line: usize) -> Result<u128> {
    let bad = |message: String| MifError::Parse {
        line,
        column: 1,
        message,
    };
    let mut fam = 0u128;
    for block in text.split(';') {
        let mut mask = 0u16;
        for p in block.split(',') {
            let p: usize = p.parse().map_err(|_| bad(format!("bad point {p:?}")))?;
            if p >= space.p {
                return Err(bad(format!("point {p} outside [{}]", space.p)));
            }
            mask |= 1 << p;
        }
        let i = space
            .index(mask)
            .ok_or_else(|| bad(format!("{block:?} is not a {}-set", space.k)))?;
        fam |= 1 << i;
    }
    Ok(fam)
}

fn write_done(file: &mut File, space: &SubsetSpace, root: u128, out: &RawOutcome) -> Result<()> {
    let mut line = format!("done {} {}", encode(space, root), out.nodes);
    for &m in &out.mifs {
        line.push(' ');
        line.push_str(&encode(space, m));
    }
    line.push('\n');
    file.write_all(line.as_bytes())?;
    file.flush()?;
    Ok(())
}

impl Checkpoint {
    fn open(path: &Path, space: &SubsetSpace) -> Result<Self> {
        let mut done = std::collections::HashMap::new();
        let expected = header(space);
        if path.exists() && std::fs::metadata(path)?.len() > 0 {
            let reader = BufReader::new(File::open(path)?);
            let mut lines = reader.lines().enumerate();
            match lines.next() {
                Some((_, Ok(h))) if h == expected => {}
                Some((_, Ok(h))) => {
                    return Err(MifError::Parse {
                        line: 1,
                        column: 1,
                        message: format!("checkpoint header {h:?}, expected {expected:?}"),
                    })
                }
                Some((_, Err(e))) => return Err(e.into()),
                None => {}
            }
            for (i, line) in lines {
                let line = line?;
                let n = i + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let malformed = |message: &str| MifError::Parse {
                    line: n,
                    column: 1,
                    message: message.into(),
                };
                let mut fields = line.split(' ');
                if fields.next() != Some("done") {
                    return Err(malformed("expected a done record"));
                }
                let root = fields.next().ok_or_else(|| malformed("missing root"))?;
                let nodes = fields
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| malformed("missing node count"))?;
                let root = decode(space, root, n)?;
                let mifs = fields.map(|f| decode(space, f, n)).collect::<Result<Vec<_>>>()?;
                if mifs.iter().any(|&m| !space.is_mif(m)) {
                    return Err(malformed("checkpoint record lists a non-MIF"));
                }
                done.insert(root, DoneRoot { nodes, mifs });
            }
            let file = OpenOptions::new().append(true).open(path)?;
            Ok(Checkpoint { file, done })
        } else {
            let mut file = File::create(path)?;
            writeln!(file, "{expected}")?;
            file.flush()?;
            Ok(Checkpoint { file, done })
        }
    }
}
