//! Exhaustive enumeration of connected unit sets (edges of a line graph or
//! vertices of a graph) up to a size cap, minimizing an incrementally
//! maintained ratio.
//!
//! Each connected set is generated exactly once, rooted at its smallest id,
//! by the ESU extension scheme: a set only grows through units that are
//! adjacent to the newest member but not to any earlier member.

use std::cmp::Ordering as CmpOrdering;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default number of sets examined before giving up.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

/// Relative tolerance under which two ratios count as tied.
pub const TIE_TOL: f64 = 1e-12;

/// Incremental objective over the current set.
pub trait Scorer {
    fn add(&mut self, unit: usize);
    fn remove(&mut self, unit: usize);
    fn ratio(&self) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Best {
    pub ratio: f64,
    /// Sorted unit ids of the witness.
    pub ids: Vec<usize>,
}

/// Total order used to pick witnesses: smaller ratio beyond the tie
/// tolerance wins, ties go to the lexicographically smallest id list.
pub fn compare(a_ratio: f64, a_ids: &[usize], b_ratio: f64, b_ids: &[usize]) -> CmpOrdering {
    let scale = a_ratio.abs().max(b_ratio.abs()).max(f64::MIN_POSITIVE);
    if (a_ratio - b_ratio).abs() <= TIE_TOL * scale {
        a_ids.cmp(b_ids)
    } else {
        a_ratio.total_cmp(&b_ratio)
    }
}

fn offer(best: &mut Option<Best>, ratio: f64, sub: &[usize], sorted: &mut Vec<usize>) {
    if let Some(b) = best {
        let scale = ratio.abs().max(b.ratio.abs()).max(f64::MIN_POSITIVE);
        if ratio - b.ratio > TIE_TOL * scale {
            return;
        }
    }
    sorted.clear();
    sorted.extend_from_slice(sub);
    sorted.sort_unstable();
    let take = match best {
        None => true,
        Some(b) => compare(ratio, sorted, b.ratio, &b.ids) == CmpOrdering::Less,
    };
    if take {
        *best = Some(Best { ratio, ids: sorted.clone() });
    }
}

struct Shared<'a> {
    adj: &'a [Vec<usize>],
    allowed: &'a [bool],
    cap: usize,
    budget: u64,
    examined: &'a AtomicU64,
    abort: &'a AtomicBool,
}

struct Walk<S> {
    scorer: S,
    near: Vec<u32>,
    sub: Vec<usize>,
    sorted: Vec<usize>,
    best: Option<Best>,
    pending: u64,
}

impl<S: Scorer> Walk<S> {
    fn push(&mut self, sh: &Shared, w: usize) {
        self.sub.push(w);
        self.near[w] += 1;
        for &x in &sh.adj[w] {
            self.near[x] += 1;
        }
        self.scorer.add(w);
    }

    fn pop(&mut self, sh: &Shared) {
        let w = self.sub.pop().unwrap();
        self.scorer.remove(w);
        for &x in &sh.adj[w] {
            self.near[x] -= 1;
        }
        self.near[w] -= 1;
    }

    fn visit(&mut self, sh: &Shared) -> bool {
        let r = self.scorer.ratio();
        offer(&mut self.best, r, &self.sub, &mut self.sorted);
        self.pending += 1;
        if self.pending >= 4096 {
            let total = sh.examined.fetch_add(self.pending, Ordering::Relaxed) + self.pending;
            self.pending = 0;
            if total > sh.budget {
                sh.abort.store(true, Ordering::Relaxed);
            }
            if sh.abort.load(Ordering::Relaxed) {
                return false;
            }
        }
        true
    }

    fn extend(&mut self, sh: &Shared, mut ext: Vec<usize>, seed: usize) -> bool {
        if !self.visit(sh) {
            return false;
        }
        if self.sub.len() == sh.cap {
            return true;
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &x in &sh.adj[w] {
                if x > seed && sh.allowed[x] && self.near[x] == 0 {
                    next.push(x);
                }
            }
            self.push(sh, w);
            let ok = self.extend(sh, next, seed);
            self.pop(sh);
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Number of sets examined plus the minimizing witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub best: Option<Best>,
    pub examined: u64,
}

/// Minimizes `make_scorer().ratio()` over all connected sets of allowed
/// units with at most `cap` members. Seeds run in parallel; the reduction
/// runs in seed order so the witness is independent of scheduling.
pub fn minimize<S, F>(
    adj: &[Vec<usize>],
    allowed: &[bool],
    cap: usize,
    budget: u64,
    make_scorer: F,
) -> Result<Outcome>
where
    S: Scorer,
    F: Fn() -> S + Sync,
{
    if cap == 0 {
        return Err(Error::Parameter("enumeration cap must be at least 1".into()));
    }
    let examined = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let sh = Shared { adj, allowed, cap, budget, examined: &examined, abort: &abort };
    let seeds: Vec<usize> = (0..adj.len()).filter(|&u| allowed[u]).collect();

    let per_seed: Vec<Option<Best>> = seeds
        .par_iter()
        .map_init(
            || Walk {
                scorer: make_scorer(),
                near: vec![0; adj.len()],
                sub: Vec::with_capacity(cap),
                sorted: Vec::with_capacity(cap),
                best: None,
                pending: 0,
            },
            |walk, &seed| {
                walk.best = None;
                if abort.load(Ordering::Relaxed) {
                    return None;
                }
                walk.push(&sh, seed);
                let ext: Vec<usize> =
                    adj[seed].iter().copied().filter(|&x| x > seed && allowed[x]).collect();
                walk.extend(&sh, ext, seed);
                walk.pop(&sh);
                examined.fetch_add(walk.pending, Ordering::Relaxed);
                walk.pending = 0;
                walk.best.take()
            },
        )
        .collect();

    let examined = examined.load(Ordering::Relaxed);
    if abort.load(Ordering::Relaxed) || examined > budget {
        let max_deg = adj.iter().map(Vec::len).max().unwrap_or(0) as f64;
        let estimate = seeds.len() as f64 * (std::f64::consts::E * max_deg).powi(cap as i32 - 1);
        return Err(Error::Resource { examined, estimate });
    }

    let mut best: Option<Best> = None;
    for b in per_seed.into_iter().flatten() {
        let take = match &best {
            None => true,
            Some(cur) => compare(b.ratio, &b.ids, cur.ratio, &cur.ids) == CmpOrdering::Less,
        };
        if take {
            best = Some(b);
        }
    }
    Ok(Outcome { best, examined })
}
