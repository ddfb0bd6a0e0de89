//! Progression detection and extremal progression-free sets.

use fixedbitset::FixedBitSet;

use super::spec::ProgressionSpec;
use crate::budget;
use crate::error::{Error, Result};
use crate::field::FieldCtx;

/// Default largest `p` accepted by [`exact_max_free_set`].
pub const DEFAULT_SEARCH_CAP: u64 = 31;

/// Bitmask search works on `u64` words.
const MASK_BITS: u64 = 64;

/// A maximum progression-free set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeSet {
    pub size: usize,
    pub elements: Vec<u64>,
}

/// Some `(x, y)` with `y != 0` whose whole configuration lies in `set`.
///
/// Scans `y = 1, 2, ...` in the outer loop and `x` in the inner one and
/// returns the first hit.
pub fn find_progression(ctx: &FieldCtx, set: &FixedBitSet, spec: &ProgressionSpec) -> Option<(u64, u64)> {
    let p = ctx.size();
    let offsets = spec.offset_table(ctx);
    let member = |i: usize| i < set.len() && set.contains(i);
    for y in 1..p {
        let shifts: Vec<usize> = offsets.iter().map(|o| o[y] as usize).collect();
        for x in 0..p {
            if shifts.iter().all(|&s| member((x + s) % p)) {
                return Some((x as u64, y as u64));
            }
        }
    }
    None
}

/// Whether adding `a` to `set` completes a configuration with `y != 0`.
///
/// Only configurations through `a` are examined, so `set` must already be
/// progression-free for the answer to mean "is still free".
pub(crate) fn completes_configuration(
    p: usize,
    offsets: &[Vec<u64>],
    set: &FixedBitSet,
    a: usize,
) -> bool {
    let member = |i: usize| i == a || set.contains(i);
    for y in 1..p {
        for slot in offsets {
            let x = (a + p - slot[y] as usize) % p;
            if offsets.iter().all(|o| member((x + o[y] as usize) % p)) {
                return true;
            }
        }
    }
    false
}

struct Search {
    /// `by_element[e]`: masks of every configuration containing `e`.
    by_element: Vec<Vec<u64>>,
    p: usize,
    best: u64,
    best_size: u32,
    nodes: u128,
    node_budget: u128,
}

impl Search {
    fn blocked(&self, set: u64, e: usize) -> bool {
        let with = set | 1 << e;
        self.by_element[e].iter().any(|&mask| mask & !with == 0)
    }

    fn candidates_after(&self, set: u64, from: usize) -> u64 {
        let mut cand = 0u64;
        for e in from..self.p {
            if !self.blocked(set, e) {
                cand |= 1 << e;
            }
        }
        cand
    }

    /// Include-first DFS over elements in increasing order, so the first set
    /// reaching a given size is the lexicographically smallest of that size.
    fn dfs(&mut self, set: u64, size: u32, cand: u64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(Error::BudgetExceeded {
                needed: self.nodes,
                budget: self.node_budget as u64,
            });
        }
        if cand == 0 {
            if size > self.best_size {
                self.best_size = size;
                self.best = set;
            }
            return Ok(());
        }
        if size + cand.count_ones() <= self.best_size {
            return Ok(());
        }
        let e = cand.trailing_zeros() as usize;
        let rest = cand & !(1 << e);
        // take e
        let with = set | 1 << e;
        let mut next = 0u64;
        let mut bits = rest;
        while bits != 0 {
            let c = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if !self.blocked(with, c) {
                next |= 1 << c;
            }
        }
        self.dfs(with, size + 1, next)?;
        // skip e
        self.dfs(set, size, rest)
    }
}

/// Largest `A` in `F_p` with no configuration instance (`y != 0`), together
/// with the lexicographically smallest such set.
///
/// Configurations are translation invariant, so any nonempty free set has a
/// translate containing 0 and the search fixes `0 in A`.
pub fn exact_max_free_set(ctx: &FieldCtx, spec: &ProgressionSpec, cap: u64) -> Result<FreeSet> {
    let p = ctx.size();
    let limit = cap.min(MASK_BITS);
    if ctx.p() > limit {
        return Err(Error::BudgetExceeded {
            needed: ctx.p() as u128,
            budget: limit,
        });
    }
    let offsets = spec.offset_table(ctx);
    let mut masks: Vec<u64> = Vec::with_capacity(p * p);
    for y in 1..p {
        for x in 0..p {
            let mask = offsets
                .iter()
                .fold(0u64, |m, o| m | 1 << ((x + o[y] as usize) % p));
            masks.push(mask);
        }
    }
    masks.sort_unstable();
    masks.dedup();
    let mut by_element = vec![Vec::new(); p];
    for &mask in &masks {
        for (e, list) in by_element.iter_mut().enumerate() {
            if mask >> e & 1 == 1 {
                list.push(mask);
            }
        }
    }
    let mut search = Search {
        by_element,
        p,
        best: 0,
        best_size: 0,
        nodes: 0,
        node_budget: budget::global_budget() as u128,
    };
    if search.blocked(0, 0) {
        return Ok(FreeSet {
            size: 0,
            elements: Vec::new(),
        });
    }
    let cand = search.candidates_after(1, 1);
    search.dfs(1, 1, cand)?;
    let elements: Vec<u64> = (0..p as u64).filter(|&e| search.best >> e & 1 == 1).collect();
    Ok(FreeSet {
        size: elements.len(),
        elements,
    })
}
