//! Exact enumeration of `Av(B)` and `Av(P)`.
//!
//! Avoiders of size `n + 1` are produced from avoiders of size `n` by
//! inserting the new maximum into one of the `n + 1` gaps. An occurrence of a
//! forbidden pattern in the child that does not use the new maximum would
//! already be an occurrence in the parent, so only occurrences through the
//! maximum are looked for. For a parent these are found all at once: every
//! occurrence of the pattern with its maximum deleted forbids a contiguous
//! range of gaps, namely those between its last entry left of the maximum and
//! its first entry right of it.

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::perm::{MatchPlan, Permutation};
use crate::pop::PermClass;
use crate::poset::Poset;

/// Largest size the engine can enumerate (gaps are tracked in a `u32`).
pub const MAX_ENUMERATION_LENGTH: usize = 30;

#[derive(Debug, Clone)]
pub struct EnumConfig {
    /// Upper bound on the total number of avoiders generated over all sizes.
    pub budget: Option<u64>,
    /// Worker threads; `0` uses the global rayon pool.
    pub workers: usize,
    /// Largest level (in permutations) that is materialized in memory. Beyond
    /// it the remaining sizes are counted depth first.
    pub level_cap: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { budget: None, workers: 0, level_cap: 20_000_000 }
    }
}

impl EnumConfig {
    pub fn with_budget(budget: u64) -> Self {
        EnumConfig { budget: Some(budget), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    /// Sizes `0..=reached` in `partial` are complete.
    #[error("node budget of {budget} exhausted; sizes up to {} are complete", partial.max_size().map_or("none".into(), |n| n.to_string()))]
    Budget { budget: u64, partial: CountingSequence },
    #[error("size {0} exceeds the enumeration limit {MAX_ENUMERATION_LENGTH}")]
    TooLarge(usize),
}

/// Exact terms `a(0), a(1), ...` of a counting sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CountingSequence {
    terms: Vec<BigUint>,
}

impl CountingSequence {
    pub fn new(terms: Vec<BigUint>) -> Self {
        CountingSequence { terms }
    }

    pub fn from_u64s(terms: &[u64]) -> Self {
        CountingSequence { terms: terms.iter().map(|&t| BigUint::from(t)).collect() }
    }

    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.terms.get(n)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_size(&self) -> Option<usize> {
        self.terms.len().checked_sub(1)
    }

    pub fn truncated(&self, max_size: usize) -> CountingSequence {
        CountingSequence { terms: self.terms.iter().take(max_size + 1).cloned().collect() }
    }

    /// b-file text, one `n a(n)` line per term starting at 0.
    pub fn to_bfile(&self) -> String {
        self.terms.iter().enumerate().map(|(n, t)| format!("{n} {t}\n")).collect()
    }
}

impl fmt::Debug for CountingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.terms.iter().map(|t| t.to_string())).finish()
    }
}

impl fmt::Display for CountingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        f.write_str(&words.join(", "))
    }
}

/// One way a new maximum can complete a forbidden pattern: the pattern with
/// its maximum removed, and how many of its entries sit left of the maximum.
#[derive(Debug, Clone)]
struct GapRule {
    smaller: Vec<Vec<u8>>,
    larger: Vec<Vec<u8>>,
    split: usize,
}

impl GapRule {
    fn len(&self) -> usize {
        self.smaller.len()
    }

    #[inline]
    fn fits(&self, text: &[u8], chosen: &[u8], j: usize, v: u8) -> bool {
        self.smaller[j].iter().all(|&a| text[chosen[a as usize] as usize] < v)
            && self.larger[j].iter().all(|&a| text[chosen[a as usize] as usize] > v)
    }

    /// Adds to `mask` every gap of `text` where inserting a new maximum
    /// creates an occurrence through this rule.
    fn forbid(&self, text: &[u8], mask: &mut u32) {
        let mut chosen = [0u8; MAX_ENUMERATION_LENGTH];
        if self.len() <= text.len() {
            self.left(text, &mut chosen, 0, 0, mask);
        }
    }

    fn left(&self, text: &[u8], chosen: &mut [u8], j: usize, start: usize, mask: &mut u32) {
        let n = text.len();
        if j == self.split {
            let first_gap = if j == 0 { 0 } else { chosen[j - 1] as usize + 1 };
            if *mask & gap_range(first_gap, n) == gap_range(first_gap, n) {
                return;
            }
            if self.split == self.len() {
                *mask |= gap_range(first_gap, n);
                return;
            }
            // The largest first right entry forbids the widest range.
            let last = n - (self.len() - j);
            for b in (start..=last).rev() {
                let range = gap_range(first_gap, b);
                if *mask & range == range {
                    return;
                }
                if self.fits(text, chosen, j, text[b]) {
                    chosen[j] = b as u8;
                    if self.complete(text, chosen, j + 1, b + 1) {
                        *mask |= range;
                        return;
                    }
                }
            }
            return;
        }
        let last = n - (self.len() - j);
        for i in start..=last {
            if self.fits(text, chosen, j, text[i]) {
                chosen[j] = i as u8;
                self.left(text, chosen, j + 1, i + 1, mask);
            }
        }
    }

    fn complete(&self, text: &[u8], chosen: &mut [u8], j: usize, start: usize) -> bool {
        if j == self.len() {
            return true;
        }
        let last = text.len() - (self.len() - j);
        for i in start..=last {
            if self.fits(text, chosen, j, text[i]) {
                chosen[j] = i as u8;
                if self.complete(text, chosen, j + 1, i + 1) {
                    return true;
                }
            }
        }
        false
    }
}

#[inline]
fn gap_range(lo: usize, hi: usize) -> u32 {
    if lo > hi {
        0
    } else {
        ((u64::MAX >> (63 - hi)) as u32) & !((1u32 << lo) - 1)
    }
}

/// Compiled avoidance constraints for the growth engine.
#[derive(Debug, Clone)]
pub struct GrowthRules {
    rules: Vec<GapRule>,
    // The empty permutation is a basis element, so the class is empty.
    empty_class: bool,
}

impl GrowthRules {
    /// Rules for avoiding every element of a basis.
    pub fn from_class(class: &PermClass) -> Self {
        let mut rules = Vec::new();
        let mut empty_class = false;
        for beta in class.basis() {
            let k = beta.len();
            if k == 0 {
                empty_class = true;
                continue;
            }
            let word = beta.values();
            let split = word.iter().position(|&v| v as usize == k).unwrap();
            let rest: Vec<u32> = word.iter().copied().filter(|&v| v as usize != k).collect();
            let plan = MatchPlan::for_word(&rest);
            rules.push(GapRule {
                smaller: plan.lower.iter().map(|o| o.iter().map(|&a| a as u8).collect()).collect(),
                larger: plan.upper.iter().map(|o| o.iter().map(|&a| a as u8).collect()).collect(),
                split,
            });
        }
        GrowthRules { rules, empty_class }
    }

    /// Rules for avoiding a POP, built from its relations only. The new
    /// maximum can only play a maximal element of the poset.
    pub fn from_poset(poset: &Poset) -> Self {
        let k = poset.size() as u32;
        let mut rules = Vec::new();
        for top in (1..=k).filter(|&m| poset.is_maximal(m)) {
            let others: Vec<u32> = (1..=k).filter(|&a| a != top).collect();
            let earlier = |j: usize, f: &dyn Fn(u32, u32) -> bool| -> Vec<u8> {
                (0..j).filter(|&a| f(others[a], others[j])).map(|a| a as u8).collect()
            };
            rules.push(GapRule {
                smaller: (0..others.len()).map(|j| earlier(j, &|a, b| poset.less(a, b))).collect(),
                larger: (0..others.len()).map(|j| earlier(j, &|a, b| poset.less(b, a))).collect(),
                split: top as usize - 1,
            });
        }
        GrowthRules { rules, empty_class: false }
    }

    /// Bitmask of the gaps of `parent` that may not receive a new maximum.
    #[inline]
    fn blocked_gaps(&self, parent: &[u8]) -> u32 {
        let full = gap_range(0, parent.len());
        let mut mask = 0;
        for rule in &self.rules {
            rule.forbid(parent, &mut mask);
            if mask == full {
                break;
            }
        }
        mask
    }
}

struct Budget {
    limit: Option<u64>,
    used: AtomicU64,
    exhausted: AtomicBool,
}

impl Budget {
    fn new(limit: Option<u64>) -> Self {
        Budget { limit, used: AtomicU64::new(0), exhausted: AtomicBool::new(false) }
    }

    fn spend(&self, nodes: u64) -> bool {
        let Some(limit) = self.limit else { return true };
        let used = self.used.fetch_add(nodes, Ordering::Relaxed) + nodes;
        if used > limit {
            self.exhausted.store(true, Ordering::Relaxed);
        }
        !self.exhausted.load(Ordering::Relaxed)
    }

    fn ok(&self) -> bool {
        !self.exhausted.load(Ordering::Relaxed)
    }
}

fn insert_max(parent: &[u8], gap: usize, out: &mut Vec<u8>) {
    out.extend_from_slice(&parent[..gap]);
    out.push(parent.len() as u8 + 1);
    out.extend_from_slice(&parent[gap..]);
}

const CHUNK: usize = 4096;

/// Growth-based enumerator shared by every counting entry point.
struct Grower<'a> {
    rules: &'a GrowthRules,
    config: &'a EnumConfig,
    budget: Budget,
}

impl Grower<'_> {
    fn run(&self, max_size: usize, mut keep: Option<&mut Vec<Vec<u8>>>) -> Result<Vec<u64>, EnumError> {
        if max_size > MAX_ENUMERATION_LENGTH {
            return Err(EnumError::TooLarge(max_size));
        }
        if self.rules.empty_class {
            return Ok(vec![0; max_size + 1]);
        }
        let mut terms = vec![1u64];
        if !self.budget.spend(1) {
            return Err(self.budget_error(&terms));
        }
        // Level n as a flat array with stride n.
        let mut level: Vec<u8> = Vec::new();
        let mut n = 0;
        if let Some(k) = keep.as_deref_mut() {
            k.push(level.clone());
        }
        while n < max_size {
            let count = terms[n] as usize;
            let last = n + 1 == max_size;
            let too_big = (count.saturating_mul(n + 1)) > self.config.level_cap;
            if (last || too_big) && keep.is_none() {
                return match self.depth_first(&level, n, max_size) {
                    Some(tail) => {
                        terms.extend(tail);
                        Ok(terms)
                    }
                    None => Err(self.budget_error(&terms)),
                };
            }
            let next = self.next_level(&level, n);
            if !self.budget.spend(next.len() as u64 / (n + 1) as u64) {
                return Err(self.budget_error(&terms));
            }
            terms.push((next.len() / (n + 1)) as u64);
            level = next;
            n += 1;
            if let Some(k) = keep.as_deref_mut() {
                k.push(level.clone());
            }
        }
        Ok(terms)
    }

    fn budget_error(&self, terms: &[u64]) -> EnumError {
        EnumError::Budget {
            budget: self.budget.limit.unwrap_or(0),
            partial: CountingSequence::from_u64s(terms),
        }
    }

    fn next_level(&self, level: &[u8], n: usize) -> Vec<u8> {
        let grow_chunk = |chunk: &[u8]| {
            let mut out = Vec::new();
            let parents: Box<dyn Iterator<Item = &[u8]>> = if n == 0 {
                Box::new(std::iter::once(&chunk[..0]))
            } else {
                Box::new(chunk.chunks_exact(n))
            };
            for parent in parents {
                let blocked = self.rules.blocked_gaps(parent);
                for gap in (0..=n).filter(|g| blocked & (1 << g) == 0) {
                    insert_max(parent, gap, &mut out);
                }
            }
            out
        };
        if n == 0 {
            return grow_chunk(level);
        }
        let pieces: Vec<Vec<u8>> = level.par_chunks(CHUNK * n).map(grow_chunk).collect();
        pieces.concat()
    }

    /// Counts sizes `n+1..=max_size` below every permutation of `level`.
    /// `None` when the budget ran out.
    fn depth_first(&self, level: &[u8], n: usize, max_size: usize) -> Option<Vec<u64>> {
        let depth = max_size - n;
        let roots: Vec<&[u8]> = if n == 0 { vec![&level[..0]] } else { level.chunks_exact(n).collect() };
        let totals = roots
            .par_chunks(CHUNK.max(1) / 16)
            .map(|chunk| {
                let mut counts = vec![0u64; depth];
                for root in chunk {
                    if !self.budget.ok() {
                        break;
                    }
                    self.descend(root, 0, depth, &mut counts);
                }
                counts
            })
            .reduce(|| vec![0u64; depth], |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            });
        self.budget.ok().then_some(totals)
    }

    fn descend(&self, parent: &[u8], d: usize, depth: usize, counts: &mut [u64]) {
        let n = parent.len();
        let blocked = self.rules.blocked_gaps(parent);
        let children = (n as u32 + 1) - blocked.count_ones();
        counts[d] += children as u64;
        if !self.budget.spend(children as u64) || d + 1 == depth {
            return;
        }
        let mut child = [0u8; MAX_ENUMERATION_LENGTH];
        for gap in (0..=n).filter(|g| blocked & (1 << g) == 0) {
            child[..gap].copy_from_slice(&parent[..gap]);
            child[gap] = n as u8 + 1;
            child[gap + 1..=n].copy_from_slice(&parent[gap..]);
            self.descend(&child[..=n], d + 1, depth, counts);
        }
    }
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Counting sequence for the given growth rules, sizes `0..=max_size`.
pub fn sequence_for_rules(rules: &GrowthRules, max_size: usize, config: &EnumConfig) -> Result<CountingSequence, EnumError> {
    let grower = Grower { rules, config, budget: Budget::new(config.budget) };
    let terms = with_pool(config.workers, || grower.run(max_size, None))?;
    Ok(CountingSequence::from_u64s(&terms))
}

pub fn counting_sequence(class: &PermClass, max_size: usize, config: &EnumConfig) -> Result<CountingSequence, EnumError> {
    sequence_for_rules(&GrowthRules::from_class(class), max_size, config)
}

pub fn count_avoiders(class: &PermClass, n: usize, config: &EnumConfig) -> Result<BigUint, EnumError> {
    Ok(counting_sequence(class, n, config)?.terms[n].clone())
}

/// Counting sequence of `Av(P)` computed from the poset's relations, without
/// going through its basis.
pub fn pop_counting_sequence(poset: &Poset, max_size: usize, config: &EnumConfig) -> Result<CountingSequence, EnumError> {
    sequence_for_rules(&GrowthRules::from_poset(poset), max_size, config)
}

pub fn count_pop_avoiders(poset: &Poset, n: usize, config: &EnumConfig) -> Result<BigUint, EnumError> {
    Ok(pop_counting_sequence(poset, n, config)?.terms[n].clone())
}

/// Every avoider of size `n`, in generation order.
pub fn avoiders(class: &PermClass, n: usize) -> Result<Vec<Permutation>, EnumError> {
    let rules = GrowthRules::from_class(class);
    if rules.empty_class {
        return Ok(Vec::new());
    }
    let config = EnumConfig { level_cap: usize::MAX, ..Default::default() };
    let grower = Grower { rules: &rules, config: &config, budget: Budget::new(None) };
    let mut levels = Vec::new();
    grower.run(n, Some(&mut levels))?;
    let last = levels.pop().unwrap_or_default();
    if n == 0 {
        return Ok(vec![Permutation::empty()]);
    }
    Ok(last
        .chunks_exact(n)
        .map(|c| Permutation::from_vec_unchecked(c.iter().map(|&v| v as u32).collect()))
        .collect())
}
