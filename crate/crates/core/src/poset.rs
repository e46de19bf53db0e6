//! Labeled strict partial orders on `{1..k}`.
//!
//! Relations are stored as one bitmask per element: bit `b` of `above[a]` is
//! set when `a+1 < b+1` in the poset. Everything is kept transitively closed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::Permutation;

/// Largest poset size representable by the bitmask encoding.
pub const MAX_POSET_SIZE: usize = 32;

/// Largest size `enumerate_posets` accepts.
pub const MAX_ENUMERATION_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("poset size must be between 1 and {MAX_POSET_SIZE}, got {0}")]
    BadSize(usize),
    #[error("label {label} is outside 1..={size}")]
    LabelOutOfRange { label: u32, size: usize },
    #[error("relation {0} < {0} is reflexive")]
    Reflexive(u32),
    #[error("relations contain a cycle through {0}")]
    Cycle(u32),
    #[error("labels {0:?} are not a permutation of 1..n")]
    BadLabels(Vec<u32>),
    #[error("enumeration is limited to size {MAX_ENUMERATION_SIZE}, got {0}")]
    EnumerationBound(usize),
    #[error("cannot parse poset: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poset {
    above: Vec<u32>,
}

/// Which of the two label/relation transformations to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosetTransform {
    /// Replace label `i` by `k + 1 - i`.
    ComplementLabels,
    /// Turn every `a < b` into `b < a`.
    ReverseRelations,
}

/// A total order `order[0] < order[1] < ...` on the labels `{1..k}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TotalOrder(Vec<u32>);

impl TotalOrder {
    pub fn new(order: Vec<u32>) -> Result<Self, PosetError> {
        Permutation::new(order.clone()).map_err(|_| PosetError::BadLabels(order.clone()))?;
        Ok(TotalOrder(order))
    }

    pub fn labels(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Poset {
    pub fn from_relations(size: usize, pairs: &[(u32, u32)]) -> Result<Self, PosetError> {
        if size == 0 || size > MAX_POSET_SIZE {
            return Err(PosetError::BadSize(size));
        }
        let mut above = vec![0u32; size];
        for &(a, b) in pairs {
            for label in [a, b] {
                if label == 0 || label as usize > size {
                    return Err(PosetError::LabelOutOfRange { label, size });
                }
            }
            if a == b {
                return Err(PosetError::Reflexive(a));
            }
            above[a as usize - 1] |= 1 << (b - 1);
        }
        // Warshall closure on bit rows.
        for m in 0..size {
            for a in 0..size {
                if above[a] & (1 << m) != 0 {
                    above[a] |= above[m];
                }
            }
        }
        if let Some(a) = (0..size).find(|&a| above[a] & (1 << a) != 0) {
            return Err(PosetError::Cycle(a as u32 + 1));
        }
        Ok(Poset { above })
    }

    pub fn antichain(size: usize) -> Result<Self, PosetError> {
        Poset::from_relations(size, &[])
    }

    /// The chain `order[0] < order[1] < ...`.
    pub fn chain(order: &[u32]) -> Result<Self, PosetError> {
        let pairs: Vec<(u32, u32)> = order.windows(2).map(|w| (w[0], w[1])).collect();
        Poset::from_relations(order.len(), &pairs)
    }

    pub(crate) fn from_closed_rows(above: Vec<u32>) -> Self {
        Poset { above }
    }

    pub fn size(&self) -> usize {
        self.above.len()
    }

    /// `a < b` for 1-based labels.
    pub fn less(&self, a: u32, b: u32) -> bool {
        self.above[a as usize - 1] & (1 << (b - 1)) != 0
    }

    pub fn comparable(&self, a: u32, b: u32) -> bool {
        self.less(a, b) || self.less(b, a)
    }

    /// Bitmask (0-based) of elements below the 0-based element `a`.
    pub(crate) fn below_mask(&self, a: usize) -> u32 {
        (0..self.size())
            .filter(|&b| self.above[b] & (1 << a) != 0)
            .fold(0, |m, b| m | 1 << b)
    }

    /// All pairs `(a, b)` with `a < b`, sorted.
    pub fn relations(&self) -> Vec<(u32, u32)> {
        let k = self.size();
        let mut out = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if self.above[a] & (1 << b) != 0 {
                    out.push((a as u32 + 1, b as u32 + 1));
                }
            }
        }
        out
    }

    /// Cover relations of the Hasse diagram, sorted.
    pub fn covers(&self) -> Vec<(u32, u32)> {
        self.relations()
            .into_iter()
            .filter(|&(a, b)| {
                !(1..=self.size() as u32).any(|c| self.less(a, c) && self.less(c, b))
            })
            .collect()
    }

    /// Labels that are the lower end of some relation.
    pub fn lower_elements(&self) -> Vec<u32> {
        (0..self.size())
            .filter(|&a| self.above[a] != 0)
            .map(|a| a as u32 + 1)
            .collect()
    }

    pub fn is_maximal(&self, a: u32) -> bool {
        self.above[a as usize - 1] == 0
    }

    /// Number of elements in a longest chain.
    pub fn height(&self) -> usize {
        let k = self.size();
        // Elements sorted by number of elements above them form a reverse topological order.
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&a| self.above[a].count_ones());
        let mut longest = vec![1usize; k];
        for &a in &order {
            for b in 0..k {
                if self.above[a] & (1 << b) != 0 {
                    longest[a] = longest[a].max(longest[b] + 1);
                }
            }
        }
        longest.into_iter().max().unwrap_or(0)
    }

    pub fn is_bipartite(&self) -> bool {
        self.height() <= 2
    }

    /// All linear extensions in lexicographic order of their label sequences.
    pub fn linear_extensions(&self) -> Vec<TotalOrder> {
        let k = self.size();
        let below: Vec<u32> = (0..k).map(|a| self.below_mask(a)).collect();
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(k);
        extend_orders(&below, 0, &mut prefix, &mut out);
        out
    }

    pub fn count_linear_extensions(&self) -> usize {
        self.linear_extensions().len()
    }

    pub fn transform(&self, op: PosetTransform) -> Poset {
        let k = self.size() as u32;
        let pairs: Vec<(u32, u32)> = match op {
            PosetTransform::ComplementLabels => self
                .relations()
                .into_iter()
                .map(|(a, b)| (k + 1 - a, k + 1 - b))
                .collect(),
            PosetTransform::ReverseRelations => {
                self.relations().into_iter().map(|(a, b)| (b, a)).collect()
            }
        };
        Poset::from_relations(self.size(), &pairs).expect("transform of a poset is a poset")
    }

    /// The fence `labels[0] < labels[1] > labels[2] < labels[3] > ...`, where
    /// the first position is a valley.
    pub fn zigzag(labels: &[u32]) -> Result<Poset, PosetError> {
        Permutation::new(labels.to_vec()).map_err(|_| PosetError::BadLabels(labels.to_vec()))?;
        if labels.is_empty() {
            return Err(PosetError::BadSize(0));
        }
        let mut pairs = Vec::new();
        for peak in (1..labels.len()).step_by(2) {
            pairs.push((labels[peak - 1], labels[peak]));
            if peak + 1 < labels.len() {
                pairs.push((labels[peak + 1], labels[peak]));
            }
        }
        Poset::from_relations(labels.len(), &pairs)
    }

    /// Every distinct zig-zag poset of size `n`, in lexicographic order of the
    /// first labeling that produces it.
    pub fn zigzags(n: usize) -> Result<Vec<Poset>, PosetError> {
        if n == 0 {
            return Err(PosetError::BadSize(0));
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for labels in Permutation::all_of_size(n) {
            let q = Poset::zigzag(labels.values())?;
            if seen.insert(q.clone()) {
                out.push(q);
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let rels: Vec<String> = self
            .covers()
            .iter()
            .map(|(a, b)| format!("{a}<{b}"))
            .collect();
        format!("{}: {}", self.size(), rels.join(", "))
    }
}

fn extend_orders(below: &[u32], placed: u32, prefix: &mut Vec<u32>, out: &mut Vec<TotalOrder>) {
    let k = below.len();
    if prefix.len() == k {
        out.push(TotalOrder(prefix.clone()));
        return;
    }
    for a in 0..k {
        if placed & (1 << a) == 0 && below[a] & !placed == 0 {
            prefix.push(a as u32 + 1);
            extend_orders(below, placed | 1 << a, prefix, out);
            prefix.pop();
        }
    }
}

/// Every labeled poset on `{1..k}` exactly once.
///
/// Posets on `k` elements are grown from posets on `k - 1` elements by adding
/// the element `k` with a down-closed set below it and an up-closed set above
/// it, where everything in the first set already lies below everything in the
/// second. Restriction to `{1..k-1}` makes this a bijection.
pub fn enumerate_posets(k: usize) -> Result<std::vec::IntoIter<Poset>, PosetError> {
    if k == 0 {
        return Err(PosetError::BadSize(0));
    }
    if k > MAX_ENUMERATION_SIZE {
        return Err(PosetError::EnumerationBound(k));
    }
    Ok(grow_posets(k).into_iter())
}

pub(crate) fn grow_posets(k: usize) -> Vec<Poset> {
    let mut level: Vec<Vec<u32>> = vec![vec![0]];
    for j in 1..k {
        let mut next = Vec::new();
        for rows in &level {
            let below: Vec<u32> = (0..j)
                .map(|a| (0..j).filter(|&b| rows[b] & (1 << a) != 0).fold(0, |m, b| m | 1 << b))
                .collect();
            let down_closed = |set: u32| (0..j).all(|a| set & (1 << a) == 0 || below[a] & !set == 0);
            let up_closed = |set: u32| (0..j).all(|a| set & (1 << a) == 0 || rows[a] & !set == 0);
            for down in (0u32..1 << j).filter(|&d| down_closed(d)) {
                let free = !down & ((1 << j) - 1);
                // Iterate subsets of the elements not below the new one.
                let mut up = free;
                loop {
                    if up_closed(up) && (0..j).all(|a| down & (1 << a) == 0 || rows[a] & up == up) {
                        let mut new_rows = rows.clone();
                        for (a, row) in new_rows.iter_mut().enumerate() {
                            if down & (1 << a) != 0 {
                                *row |= 1 << j;
                            }
                        }
                        new_rows.push(up);
                        next.push(new_rows);
                    }
                    if up == 0 {
                        break;
                    }
                    up = (up - 1) & free;
                }
            }
        }
        level = next;
    }
    level.into_iter().map(Poset::from_closed_rows).collect()
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset({self})")
    }
}

/// Parses either the JSON object form or the compact `k: a<b, c<d` form.
/// Chains such as `2<3<1<4` are accepted in the compact form.
impl FromStr for Poset {
    type Err = PosetError;

    fn from_str(s: &str) -> Result<Self, PosetError> {
        let s = s.trim();
        if s.starts_with('{') {
            let file: PosetFile =
                serde_json::from_str(s).map_err(|e| PosetError::Parse(e.to_string()))?;
            return Poset::try_from(file);
        }
        let (size, rest) = s
            .split_once(':')
            .ok_or_else(|| PosetError::Parse(format!("missing ':' in {s:?}")))?;
        let size: usize = size
            .trim()
            .parse()
            .map_err(|_| PosetError::Parse(format!("bad size in {s:?}")))?;
        let mut pairs = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let labels: Vec<u32> = item
                .split('<')
                .map(|t| t.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| PosetError::Parse(format!("bad relation {item:?}")))?;
            if labels.len() < 2 {
                return Err(PosetError::Parse(format!("bad relation {item:?}")));
            }
            pairs.extend(labels.windows(2).map(|w| (w[0], w[1])));
        }
        Poset::from_relations(size, &pairs)
    }
}

/// On-disk JSON form: `{"size": k, "relations": [[a, b], ...]}` meaning `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetFile {
    pub size: usize,
    pub relations: Vec<[u32; 2]>,
}

impl TryFrom<PosetFile> for Poset {
    type Error = PosetError;
    fn try_from(file: PosetFile) -> Result<Self, PosetError> {
        let pairs: Vec<(u32, u32)> = file.relations.iter().map(|r| (r[0], r[1])).collect();
        Poset::from_relations(file.size, &pairs)
    }
}

impl From<&Poset> for PosetFile {
    fn from(p: &Poset) -> Self {
        PosetFile {
            size: p.size(),
            relations: p.covers().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl Serialize for Poset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PosetFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = PosetFile::deserialize(d)?;
        Poset::try_from(file).map_err(serde::de::Error::custom)
    }
}
