//! Exhaustive and pruned generation of labelled diamond systems.
//!
//! The engine assigns labels slot by slot in reading order. Diamond
//! order constraints are enforced locally (a bottom needs enough larger
//! labels left for its diamond, middles must exceed their bottom, a top
//! must exceed every middle), and pattern avoidance prunes the tree: a
//! prefix that already contains a forbidden pattern cannot lose it by
//! extension, so the whole subtree is cut.
//!
//! Candidates are tried in ascending label order, which makes the
//! emission order lexicographic in the associated permutation and keeps
//! golden outputs byte-stable.
//!
//! Counting work is split on the first diamond's label assignment: every
//! pruned first-diamond prefix becomes an independent task owning a
//! disjoint subtree. Results are merged with commutative sums, so counts
//! and polynomials are a deterministic function of the inputs no matter
//! how many workers run (the `parallel` feature gates rayon; without it
//! the same task list is processed in order on one thread).

use crate::patterns::{Pattern, PatternSet};
use crate::poly::DescentPoly;
use crate::poset::{LabelledSystem, SystemShape};
use num_bigint::BigUint;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Safety valves for searches.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Largest vertex count for which an unpruned (no patterns) search runs.
    pub max_unpruned_vertices: u32,
    /// Cap on results any single search may emit or count.
    pub max_results: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_unpruned_vertices: 16,
            max_results: 10_000_000,
        }
    }
}

impl Budget {
    pub fn with_vertex_bound(max_unpruned_vertices: u32) -> Self {
        Budget {
            max_unpruned_vertices,
            ..Budget::default()
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("unpruned enumeration over {n} vertices exceeds the budget of {max}")]
    BoundExceeded { n: u32, max: u32 },
    #[error("search produced more than {max} results; raise the budget to continue")]
    TooManyResults { max: u64 },
    #[error("shapes with {n} vertices exceed the 64-label engine limit")]
    TooManyLabels { n: u32 },
}

/// Internal abort signal raised when the result cap is hit.
struct Stop;

// ---------------------------------------------------------------------------
// bit-mask helpers over label sets (label l lives at bit l - 1)

fn bit(label: u32) -> u64 {
    1u64 << (label - 1)
}

/// Mask of labels strictly greater than `label`.
fn above(label: u32) -> u64 {
    if label >= 64 {
        0
    } else {
        !0u64 << label
    }
}

/// Mask of labels strictly less than `label`.
fn below(label: u32) -> u64 {
    bit(label) - 1
}

fn max_label(mask: u64) -> Option<u32> {
    if mask == 0 {
        None
    } else {
        Some(64 - mask.leading_zeros())
    }
}

fn min_label(mask: u64) -> Option<u32> {
    if mask == 0 {
        None
    } else {
        Some(mask.trailing_zeros() + 1)
    }
}

// ---------------------------------------------------------------------------
// incremental pattern guards
//
// Each guard maintains the set of labels that would complete an
// occurrence of its pattern if appended now (its doomed set). Any
// occurrence created by an append must end at the appended label,
// because earlier occurrences would have pruned an earlier prefix, so
// membership in the doomed set is the whole containment test.
//
// The doomed sets of the six classical length-3 patterns are threshold
// masks or unions of intervals and only grow along a branch. That
// monotonicity buys a second, much stronger cut: once any still-unplaced
// label is doomed, no completion of the prefix can avoid the pattern and
// the entire subtree is dead. Longer patterns fall back to a
// backtracking matcher and contribute nothing to the doomed set.

#[derive(Clone)]
enum GuardKind {
    /// 123: dooms everything above the smallest ascent top.
    AscentTop123,
    /// 213: dooms everything above the smallest inversion top.
    InversionTop213,
    /// 231: dooms everything below the largest ascent bottom.
    AscentBottom231,
    /// 321: dooms everything below the largest inversion bottom.
    InversionBottom321,
    /// 132: dooms the open interval between a prefix minimum and any
    /// later larger value.
    Straddle132,
    /// 312: dooms the open interval between a value and any earlier
    /// larger prefix maximum.
    Straddle312,
    Generic(Vec<u32>),
}

#[derive(Clone)]
struct Guard {
    kind: GuardKind,
    doomed: u64,
    hist: Vec<u64>,
}

struct GuardCtx<'a> {
    prefix: &'a [u32],
    /// min and max over the whole prefix (sentinels when empty)
    cur_min: u32,
    cur_max: u32,
    used: u64,
}

impl Guard {
    fn for_pattern(p: &Pattern) -> Guard {
        let kind = match p.values() {
            [1, 2, 3] => GuardKind::AscentTop123,
            [2, 1, 3] => GuardKind::InversionTop213,
            [2, 3, 1] => GuardKind::AscentBottom231,
            [3, 2, 1] => GuardKind::InversionBottom321,
            [1, 3, 2] => GuardKind::Straddle132,
            [3, 1, 2] => GuardKind::Straddle312,
            other => GuardKind::Generic(other.to_vec()),
        };
        Guard {
            kind,
            doomed: 0,
            hist: Vec::new(),
        }
    }

    /// Would appending x complete an occurrence?
    fn completes(&self, x: u32, ctx: &GuardCtx) -> bool {
        match &self.kind {
            GuardKind::Generic(p) => ends_at(ctx.prefix, x, p),
            _ => self.doomed & bit(x) != 0,
        }
    }

    /// Accounts for x joining the prefix. Call only after `completes`
    /// returned false for every guard; `ctx` is the pre-append state.
    fn push(&mut self, x: u32, ctx: &GuardCtx) {
        self.hist.push(self.doomed);
        match &self.kind {
            GuardKind::AscentTop123 => {
                if ctx.used & below(x) != 0 {
                    self.doomed |= above(x);
                }
            }
            GuardKind::InversionTop213 => {
                if let Some(y) = min_label(ctx.used & above(x)) {
                    self.doomed |= above(y);
                }
            }
            GuardKind::AscentBottom231 => {
                if let Some(y) = max_label(ctx.used & below(x)) {
                    self.doomed |= below(y);
                }
            }
            GuardKind::InversionBottom321 => {
                if ctx.used & above(x) != 0 {
                    self.doomed |= below(x);
                }
            }
            GuardKind::Straddle132 => {
                if ctx.cur_min < x {
                    self.doomed |= above(ctx.cur_min) & below(x);
                }
            }
            GuardKind::Straddle312 => {
                if ctx.cur_max > x {
                    self.doomed |= above(x) & below(ctx.cur_max);
                }
            }
            GuardKind::Generic(_) => {}
        }
    }

    fn pop(&mut self) {
        self.doomed = self.hist.pop().expect("guard pop without push");
    }
}

/// Does some occurrence of `p` end exactly at the appended value `x`?
fn ends_at(prefix: &[u32], x: u32, p: &[u32]) -> bool {
    let m = p.len();
    if m == 1 {
        return true;
    }
    if prefix.len() + 1 < m {
        return false;
    }
    fn rec(prefix: &[u32], x: u32, p: &[u32], start: usize, chosen: &mut Vec<u32>) -> bool {
        let t = chosen.len();
        if t == p.len() - 1 {
            return true;
        }
        if prefix.len() - start < p.len() - 1 - t {
            return false;
        }
        for i in start..prefix.len() {
            let c = prefix[i];
            let consistent = chosen
                .iter()
                .zip(p)
                .all(|(&cv, &pv)| (cv < c) == (pv < p[t]))
                && ((c < x) == (p[t] < p[p.len() - 1]));
            if consistent {
                chosen.push(c);
                if rec(prefix, x, p, i + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    rec(prefix, x, p, 0, &mut Vec::with_capacity(m - 1))
}

// ---------------------------------------------------------------------------
// slots and the searcher

#[derive(Clone, Copy, Debug)]
enum Slot {
    /// A diamond's least element; `need_above` labels must remain above it.
    Bottom { need_above: u32 },
    /// Interior vertex; `needs_top` when a top must still be placed above.
    Middle {
        diamond_start: usize,
        needs_top: bool,
    },
    /// A diamond's greatest element.
    Top { diamond_start: usize },
}

fn build_slots(shape: &SystemShape) -> Vec<Slot> {
    let v = shape.v();
    let mut slots = Vec::with_capacity(shape.vertex_count() as usize);
    for _ in 0..shape.full_count() {
        let start = slots.len();
        slots.push(Slot::Bottom { need_above: v - 1 });
        for _ in 0..v - 2 {
            slots.push(Slot::Middle {
                diamond_start: start,
                needs_top: true,
            });
        }
        slots.push(Slot::Top {
            diamond_start: start,
        });
    }
    if let Some(j) = shape.partial_size() {
        let start = slots.len();
        slots.push(Slot::Bottom { need_above: j - 1 });
        for _ in 0..j - 1 {
            slots.push(Slot::Middle {
                diamond_start: start,
                needs_top: false,
            });
        }
    }
    slots
}

struct Searcher {
    slots: Vec<Slot>,
    avail: u64,
    used: u64,
    prefix: Vec<u32>,
    prefix_min: Vec<u32>,
    prefix_max: Vec<u32>,
    descents: u32,
    guards: Vec<Guard>,
}

impl Searcher {
    fn new(shape: &SystemShape, patterns: &PatternSet) -> Searcher {
        let n = shape.vertex_count();
        let full = if n == 64 { !0u64 } else { (1u64 << n) - 1 };
        Searcher {
            slots: build_slots(shape),
            avail: full,
            used: 0,
            prefix: Vec::with_capacity(n as usize),
            prefix_min: vec![u32::MAX],
            prefix_max: vec![0],
            descents: 0,
            guards: patterns.iter().map(Guard::for_pattern).collect(),
        }
    }

    fn ctx(&self) -> GuardCtx<'_> {
        GuardCtx {
            prefix: &self.prefix,
            cur_min: *self.prefix_min.last().unwrap(),
            cur_max: *self.prefix_max.last().unwrap(),
            used: self.used,
        }
    }

    /// Tries to append `x`; refuses (leaving state untouched) when that
    /// would complete a forbidden pattern.
    fn push_label(&mut self, x: u32) -> bool {
        let ctx = self.ctx();
        if self.guards.iter().any(|g| g.completes(x, &ctx)) {
            return false;
        }
        // split borrows: update guards against the pre-append context
        let ctx = GuardCtx {
            prefix: &self.prefix,
            cur_min: *self.prefix_min.last().unwrap(),
            cur_max: *self.prefix_max.last().unwrap(),
            used: self.used,
        };
        for g in &mut self.guards {
            g.push(x, &ctx);
        }
        if let Some(&last) = self.prefix.last() {
            if last > x {
                self.descents += 1;
            }
        }
        self.prefix_min
            .push((*self.prefix_min.last().unwrap()).min(x));
        self.prefix_max
            .push((*self.prefix_max.last().unwrap()).max(x));
        self.prefix.push(x);
        self.avail &= !bit(x);
        self.used |= bit(x);
        true
    }

    fn pop_label(&mut self) {
        let x = self.prefix.pop().expect("pop on empty prefix");
        self.prefix_min.pop();
        self.prefix_max.pop();
        self.avail |= bit(x);
        self.used &= !bit(x);
        if let Some(&last) = self.prefix.last() {
            if last > x {
                self.descents -= 1;
            }
        }
        for g in &mut self.guards {
            g.pop();
        }
    }

    /// Depth-first search assigning slots `[idx, limit)`, invoking the
    /// sink whenever depth `limit` is reached. Candidates ascend, so
    /// emission is lexicographic in the read permutation.
    fn dfs<F>(&mut self, idx: usize, limit: usize, sink: &mut F) -> Result<(), Stop>
    where
        F: FnMut(&[u32], u32) -> Result<(), Stop>,
    {
        if idx == limit {
            return sink(&self.prefix, self.descents);
        }
        enum Feas {
            None,
            LabelsAbove(u32),
            TopAbove(u32),
        }
        let (min_excl, feas) = match self.slots[idx] {
            Slot::Bottom { need_above } => (0, Feas::LabelsAbove(need_above)),
            Slot::Middle {
                diamond_start,
                needs_top,
            } => {
                let bottom = self.prefix[diamond_start];
                if needs_top {
                    let mid_max = self.prefix[diamond_start + 1..].iter().copied().max();
                    (bottom, Feas::TopAbove(mid_max.unwrap_or(bottom)))
                } else {
                    (bottom, Feas::None)
                }
            }
            Slot::Top { diamond_start } => {
                let lower = self.prefix[diamond_start + 1..]
                    .iter()
                    .copied()
                    .max()
                    .unwrap_or(self.prefix[diamond_start]);
                (lower, Feas::None)
            }
        };
        let mut cands = self.avail & above(min_excl);
        while cands != 0 {
            let label = cands.trailing_zeros() + 1;
            cands &= cands - 1;
            // infeasibility is monotone in the candidate, so break, not continue
            match feas {
                Feas::LabelsAbove(k) => {
                    if (self.avail & above(label)).count_ones() < k {
                        break;
                    }
                }
                Feas::TopAbove(mid_max) => {
                    if self.avail & above(mid_max.max(label)) == 0 {
                        break;
                    }
                }
                Feas::None => {}
            }
            if self.push_label(label) {
                // doomed sets only grow: a still-unplaced doomed label
                // means no completion can avoid the patterns
                let doomed: u64 = self.guards.iter().fold(0, |m, g| m | g.doomed);
                let result = if self.avail & doomed != 0 {
                    Ok(())
                } else {
                    self.dfs(idx + 1, limit, sink)
                };
                self.pop_label();
                result?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// drivers

fn precheck(
    shape: &SystemShape,
    patterns: &PatternSet,
    budget: &Budget,
) -> Result<(), EnumerateError> {
    let n = shape.vertex_count();
    if n > 64 {
        return Err(EnumerateError::TooManyLabels { n });
    }
    if patterns.is_empty() && n > budget.max_unpruned_vertices {
        return Err(EnumerateError::BoundExceeded {
            n,
            max: budget.max_unpruned_vertices,
        });
    }
    Ok(())
}

/// Streams every avoider of `patterns` for `shape`, in lexicographic
/// order of the associated permutation, returning how many were emitted.
pub fn for_each_avoider<F>(
    shape: &SystemShape,
    patterns: &PatternSet,
    budget: &Budget,
    mut f: F,
) -> Result<u64, EnumerateError>
where
    F: FnMut(&LabelledSystem),
{
    precheck(shape, patterns, budget)?;
    let mut searcher = Searcher::new(shape, patterns);
    let limit = searcher.slots.len();
    let mut emitted = 0u64;
    let result = searcher.dfs(0, limit, &mut |prefix, _des| {
        if emitted >= budget.max_results {
            return Err(Stop);
        }
        emitted += 1;
        let system = LabelledSystem::from_reading_labels(*shape, prefix)
            .expect("search emits only valid systems");
        f(&system);
        Ok(())
    });
    match result {
        Ok(()) => Ok(emitted),
        Err(Stop) => Err(EnumerateError::TooManyResults {
            max: budget.max_results,
        }),
    }
}

/// Materializes the avoiders of `patterns`, in lexicographic order.
pub fn collect_avoiders(
    shape: &SystemShape,
    patterns: &PatternSet,
    budget: &Budget,
) -> Result<Vec<LabelledSystem>, EnumerateError> {
    let mut out = Vec::new();
    for_each_avoider(shape, patterns, budget, |s| out.push(s.clone()))?;
    Ok(out)
}

/// Every valid labelling of `shape`, in lexicographic order.
pub fn generate_systems(
    shape: &SystemShape,
    budget: &Budget,
) -> Result<Vec<LabelledSystem>, EnumerateError> {
    collect_avoiders(shape, &PatternSet::empty(), budget)
}

/// The pruned first-diamond prefixes; each owns a disjoint subtree.
fn split_tasks(shape: &SystemShape, patterns: &PatternSet) -> Vec<Vec<u32>> {
    let mut searcher = Searcher::new(shape, patterns);
    let split = match shape.full_count() {
        0 => shape.partial_size().unwrap_or(0),
        _ => shape.v(),
    }
    .min(shape.vertex_count()) as usize;
    let mut tasks = Vec::new();
    searcher
        .dfs(0, split, &mut |prefix, _| {
            tasks.push(prefix.to_vec());
            Ok(())
        })
        .unwrap_or_else(|_: Stop| unreachable!("task collection never stops"));
    tasks
}

/// `workers` = 1 stays on the calling thread, 0 uses the ambient rayon
/// pool (the global one unless the caller installed its own), and any
/// other value sizes a dedicated pool. Without the `parallel` feature
/// everything runs on the calling thread.
fn run_tasks<R, F>(tasks: &[Vec<u32>], workers: usize, run: F) -> Vec<R>
where
    R: Send,
    F: Fn(&[u32]) -> R + Sync,
{
    #[cfg(feature = "parallel")]
    match workers {
        1 => {}
        0 => return tasks.par_iter().map(|t| run(t)).collect(),
        n => {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                return pool.install(|| tasks.par_iter().map(|t| run(t)).collect());
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    tasks.iter().map(|t| run(t)).collect()
}

/// Per-task descent tally plus a shared result-cap check.
/// Emissions are tallied locally and flushed to the shared counter in
/// batches, so the cap costs one atomic add per batch instead of one per
/// result. The outcome stays a pure function of the inputs: the counter
/// crosses the cap at some flush exactly when the true total exceeds it.
const FLUSH_BATCH: u64 = 1024;

fn tally_task(
    shape: &SystemShape,
    patterns: &PatternSet,
    prefix: &[u32],
    emitted: &AtomicU64,
    cap: u64,
) -> Result<Vec<u64>, Stop> {
    // the counter never passes the cap unless the true total does, so
    // skipping the rest of the task list here keeps the outcome exact
    if emitted.load(Ordering::Relaxed) > cap {
        return Err(Stop);
    }
    let mut searcher = Searcher::new(shape, patterns);
    for &label in prefix {
        let ok = searcher.push_label(label);
        debug_assert!(ok, "split prefix must replay cleanly");
    }
    let limit = searcher.slots.len();
    let mut coeffs: Vec<u64> = Vec::new();
    let mut unflushed = 0u64;
    let result = searcher.dfs(prefix.len(), limit, &mut |_prefix, des| {
        unflushed += 1;
        if unflushed >= FLUSH_BATCH {
            if emitted.fetch_add(unflushed, Ordering::Relaxed) + unflushed > cap {
                return Err(Stop);
            }
            unflushed = 0;
        }
        let des = des as usize;
        if coeffs.len() <= des {
            coeffs.resize(des + 1, 0);
        }
        coeffs[des] += 1;
        Ok(())
    });
    result?;
    if unflushed > 0 && emitted.fetch_add(unflushed, Ordering::Relaxed) + unflushed > cap {
        return Err(Stop);
    }
    Ok(coeffs)
}

/// Descent generating function of the avoiders: coefficient of `x^k`
/// counts avoiders with exactly `k` descents. `workers` = 0 uses all
/// cores, 1 runs in-thread, anything else sizes the pool; the result is
/// identical regardless.
pub fn descent_poly(
    shape: &SystemShape,
    patterns: &PatternSet,
    budget: &Budget,
    workers: usize,
) -> Result<DescentPoly, EnumerateError> {
    precheck(shape, patterns, budget)?;
    let tasks = split_tasks(shape, patterns);
    let emitted = AtomicU64::new(0);
    let cap = budget.max_results;
    let results = run_tasks(&tasks, workers, |prefix| {
        tally_task(shape, patterns, prefix, &emitted, cap)
    });
    let mut merged: Vec<u64> = Vec::new();
    for r in results {
        match r {
            Ok(coeffs) => {
                if merged.len() < coeffs.len() {
                    merged.resize(coeffs.len(), 0);
                }
                for (m, c) in merged.iter_mut().zip(&coeffs) {
                    *m += c;
                }
            }
            Err(Stop) => return Err(EnumerateError::TooManyResults { max: cap }),
        }
    }
    Ok(DescentPoly::from_u64_coeffs(&merged))
}

/// Number of avoiders, by the same work-split search as `descent_poly`.
pub fn count_avoiders(
    shape: &SystemShape,
    patterns: &PatternSet,
    budget: &Budget,
    workers: usize,
) -> Result<BigUint, EnumerateError> {
    descent_poly(shape, patterns, budget, workers).map(|p| p.eval_one())
}
