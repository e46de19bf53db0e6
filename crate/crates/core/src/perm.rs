//! Permutations in one-line notation, classical pattern containment and the
//! eight symmetries generated by reverse, complement and inverse.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("value {value} is outside 1..={n}")]
    OutOfRange { value: u32, n: usize },
    #[error("value {0} appears more than once")]
    Duplicate(u32),
    #[error("cannot parse permutation from {0:?}")]
    Parse(String),
}

/// A permutation of `{1..n}` stored in one-line notation.
///
/// Ordering is by size first and then lexicographically on the word, which is
/// the order used everywhere a basis is sorted.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self, PermError> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            if v == 0 || v as usize > n {
                return Err(PermError::OutOfRange { value: v, n });
            }
            if std::mem::replace(&mut seen[v as usize - 1], true) {
                return Err(PermError::Duplicate(v));
            }
        }
        Ok(Permutation(values))
    }

    /// Caller guarantees `values` is a bijection on `{1..n}`.
    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(values.clone()).is_ok());
        Permutation(values)
    }

    pub fn empty() -> Self {
        Permutation(Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    /// Value at 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn reverse(&self) -> Self {
        Permutation(self.0.iter().rev().copied().collect())
    }

    pub fn complement(&self) -> Self {
        let n = self.0.len() as u32;
        Permutation(self.0.iter().map(|&v| n + 1 - v).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Permutation(inv)
    }

    /// The permutation order-isomorphic to an arbitrary sequence of distinct values.
    pub fn standardize(word: &[u32]) -> Self {
        let mut idx: Vec<usize> = (0..word.len()).collect();
        idx.sort_by_key(|&i| word[i]);
        let mut out = vec![0; word.len()];
        for (rank, &i) in idx.iter().enumerate() {
            out[i] = rank as u32 + 1;
        }
        Permutation(out)
    }

    pub fn contains(&self, pattern: &Permutation) -> bool {
        contains(self, pattern)
    }

    pub fn avoids(&self, pattern: &Permutation) -> bool {
        !contains(self, pattern)
    }

    /// Every permutation of size `n` in lexicographic order.
    pub fn all_of_size(n: usize) -> AllPermutations {
        AllPermutations {
            next: Some((1..=n as u32).collect()),
        }
    }
}

/// Lexicographic successor iteration over all permutations of one size.
pub struct AllPermutations {
    next: Option<Vec<u32>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let n = succ.len();
        if n >= 2 {
            if let Some(i) = (0..n - 1).rev().find(|&i| succ[i] < succ[i + 1]) {
                let j = (i + 1..n).rev().find(|&j| succ[j] > succ[i]).unwrap();
                succ.swap(i, j);
                succ[i + 1..].reverse();
                self.next = Some(succ);
            }
        }
        Some(Permutation(current))
    }
}

impl Ord for Permutation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Permutation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = PermError;
    fn try_from(v: Vec<u32>) -> Result<Self, PermError> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Vec<u32> {
        p.0
    }
}

/// Digit-string form for `n <= 9`, space separated otherwise.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() <= 9 {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let words: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
            f.write_str(&words.join(" "))
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

/// Accepts space separated integers, or a bare digit string when every
/// value fits in one digit. `"-"` or `""` is the empty permutation.
impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, PermError> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(Permutation::empty());
        }
        let values: Vec<u32> = if s.contains(char::is_whitespace) {
            s.split_whitespace()
                .map(|w| w.parse::<u32>().map_err(|_| PermError::Parse(s.to_string())))
                .collect::<Result<_, _>>()?
        } else {
            if s.len() > 9 {
                return Err(PermError::Parse(s.to_string()));
            }
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| PermError::Parse(s.to_string())))
                .collect::<Result<_, _>>()?
        };
        Permutation::new(values)
    }
}

/// Precomputed left-to-right matching plan for a classical pattern.
///
/// When position `j` of the pattern is placed, its value only has to be
/// compared with the closest smaller and closest larger value among the
/// positions already placed.
#[derive(Debug, Clone)]
pub(crate) struct MatchPlan {
    pub(crate) lower: Vec<Option<usize>>,
    pub(crate) upper: Vec<Option<usize>>,
}

impl MatchPlan {
    pub(crate) fn for_word(word: &[u32]) -> Self {
        let k = word.len();
        let mut lower = Vec::with_capacity(k);
        let mut upper = Vec::with_capacity(k);
        for j in 0..k {
            let below = (0..j).filter(|&a| word[a] < word[j]).max_by_key(|&a| word[a]);
            let above = (0..j).filter(|&a| word[a] > word[j]).min_by_key(|&a| word[a]);
            lower.push(below);
            upper.push(above);
        }
        MatchPlan { lower, upper }
    }

    fn fits(&self, text: &[u32], chosen: &[usize], j: usize, value: u32) -> bool {
        if let Some(a) = self.lower[j] {
            if text[chosen[a]] > value {
                return false;
            }
        }
        if let Some(a) = self.upper[j] {
            if text[chosen[a]] < value {
                return false;
            }
        }
        true
    }

    /// Counts occurrences, stopping as soon as `limit` is reached.
    fn search(&self, text: &[u32], chosen: &mut Vec<usize>, start: usize, limit: u64) -> u64 {
        let j = chosen.len();
        let k = self.lower.len();
        if j == k {
            return 1;
        }
        let mut found = 0;
        let last = text.len() - (k - j);
        for i in start..=last {
            if self.fits(text, chosen, j, text[i]) {
                chosen.push(i);
                found += self.search(text, chosen, i + 1, limit - found);
                chosen.pop();
                if found >= limit {
                    break;
                }
            }
        }
        found
    }
}

pub fn contains(pi: &Permutation, sigma: &Permutation) -> bool {
    if sigma.len() > pi.len() {
        return false;
    }
    let plan = MatchPlan::for_word(&sigma.0);
    plan.search(&pi.0, &mut Vec::with_capacity(sigma.len()), 0, 1) > 0
}

pub fn count_occurrences(pi: &Permutation, sigma: &Permutation) -> u64 {
    if sigma.len() > pi.len() {
        return 0;
    }
    let plan = MatchPlan::for_word(&sigma.0);
    plan.search(&pi.0, &mut Vec::with_capacity(sigma.len()), 0, u64::MAX)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryOp {
    Identity,
    Reverse,
    Complement,
    Inverse,
    ReverseComplement,
    ReverseInverse,
    ComplementInverse,
    ReverseComplementInverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown symmetry {0:?}")]
pub struct UnknownSymmetry(String);

impl SymmetryOp {
    pub const ALL: [SymmetryOp; 8] = [
        SymmetryOp::Identity,
        SymmetryOp::Reverse,
        SymmetryOp::Complement,
        SymmetryOp::Inverse,
        SymmetryOp::ReverseComplement,
        SymmetryOp::ReverseInverse,
        SymmetryOp::ComplementInverse,
        SymmetryOp::ReverseComplementInverse,
    ];

    // Normal form: take the inverse first, then reverse, then complement.
    fn flags(self) -> (bool, bool, bool) {
        use SymmetryOp::*;
        match self {
            Identity => (false, false, false),
            Reverse => (false, true, false),
            Complement => (false, false, true),
            Inverse => (true, false, false),
            ReverseComplement => (false, true, true),
            ReverseInverse => (true, true, false),
            ComplementInverse => (true, false, true),
            ReverseComplementInverse => (true, true, true),
        }
    }

    fn from_flags(inverse: bool, reverse: bool, complement: bool) -> Self {
        SymmetryOp::ALL
            .into_iter()
            .find(|op| op.flags() == (inverse, reverse, complement))
            .unwrap()
    }

    /// The operation equal to applying `self` and then `then`.
    pub fn then(self, then: SymmetryOp) -> SymmetryOp {
        let (i1, r1, c1) = self.flags();
        let (i2, r2, c2) = then.flags();
        // Inverting after reversing is complementing after inverting, and vice versa.
        let (r1, c1) = if i2 { (c1, r1) } else { (r1, c1) };
        SymmetryOp::from_flags(i1 ^ i2, r1 ^ r2, c1 ^ c2)
    }

    pub fn apply(self, pi: &Permutation) -> Permutation {
        let (inverse, reverse, complement) = self.flags();
        let mut out = if inverse { pi.inverse() } else { pi.clone() };
        if reverse {
            out = out.reverse();
        }
        if complement {
            out = out.complement();
        }
        out
    }

    pub fn name(self) -> &'static str {
        use SymmetryOp::*;
        match self {
            Identity => "identity",
            Reverse => "reverse",
            Complement => "complement",
            Inverse => "inverse",
            ReverseComplement => "reverse-complement",
            ReverseInverse => "reverse-inverse",
            ComplementInverse => "complement-inverse",
            ReverseComplementInverse => "reverse-complement-inverse",
        }
    }
}

impl fmt::Display for SymmetryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymmetryOp {
    type Err = UnknownSymmetry;
    fn from_str(s: &str) -> Result<Self, UnknownSymmetry> {
        SymmetryOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| UnknownSymmetry(s.to_string()))
    }
}

pub fn apply_symmetry(pi: &Permutation, op: SymmetryOp) -> Permutation {
    op.apply(pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn all_up_to(n: usize) -> Vec<Permutation> {
        (0..=n).flat_map(Permutation::all_of_size).collect()
    }

    #[test]
    fn construction() {
        assert_eq!(Permutation::new(vec![]).unwrap().len(), 0);
        assert_eq!(Permutation::new(vec![3, 7, 1, 4, 6, 5, 2]).unwrap(), p("3714652"));
        assert_eq!(Permutation::new(vec![1, 1, 2]), Err(PermError::Duplicate(1)));
        assert!(matches!(
            Permutation::new(vec![1, 4]),
            Err(PermError::OutOfRange { value: 4, n: 2 })
        ));
        assert!(Permutation::new(vec![0]).is_err());
    }

    #[test]
    fn text_forms() {
        assert_eq!(p("3 1 2"), p("312"));
        assert_eq!(p("10 1 2 3 4 5 6 7 8 9").len(), 10);
        assert!("1234567891".parse::<Permutation>().is_err());
        assert!("12a".parse::<Permutation>().is_err());
        assert_eq!(p("-"), Permutation::empty());
        let long = p("2 1 3 4 5 6 7 8 9 10");
        assert_eq!(long.to_string(), "2 1 3 4 5 6 7 8 9 10");
        assert_eq!(long.to_string().parse::<Permutation>().unwrap(), long);
    }

    #[test]
    fn containment_examples() {
        let pi = p("3714652");
        assert!(contains(&pi, &p("132")));
        assert!(!contains(&pi, &p("3124")));
        assert!(contains(&pi, &pi));
        assert!(contains(&pi, &Permutation::empty()));
        assert!(contains(&Permutation::empty(), &Permutation::empty()));
        assert!(!contains(&p("12"), &p("123")));
    }

    #[test]
    fn occurrence_counts() {
        assert_eq!(count_occurrences(&p("3714652"), &p("132")), 9);
        assert_eq!(count_occurrences(&p("3714652"), &Permutation::empty()), 1);
        assert_eq!(count_occurrences(&p("12345"), &p("12")), 10);
        assert_eq!(count_occurrences(&p("12345"), &p("21")), 0);
    }

    // Independent oracle: test every index subset and standardize it.
    fn brute_count(pi: &Permutation, sigma: &Permutation) -> u64 {
        let n = pi.len();
        let k = sigma.len();
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .filter(|m| {
                let word: Vec<u32> = (0..n).filter(|i| m & (1 << i) != 0).map(|i| pi.0[i]).collect();
                Permutation::standardize(&word) == *sigma
            })
            .count() as u64
    }

    #[test]
    fn occurrence_count_matches_subset_oracle() {
        let texts = all_up_to(6);
        let patterns = all_up_to(3);
        for pi in texts.iter().step_by(7) {
            for sigma in &patterns {
                let c = count_occurrences(pi, sigma);
                assert_eq!(c, brute_count(pi, sigma), "{pi} {sigma}");
                assert_eq!(c > 0, contains(pi, sigma));
            }
        }
    }

    #[test]
    fn containment_is_transitive() {
        let perms = all_up_to(5);
        for pi in &perms {
            let below: Vec<&Permutation> = perms.iter().filter(|t| contains(pi, t)).collect();
            for tau in &below {
                for sigma in perms.iter().filter(|s| s.len() <= tau.len()) {
                    if contains(tau, sigma) {
                        assert!(contains(pi, sigma));
                    }
                }
            }
        }
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(apply_symmetry(&p("3714652"), SymmetryOp::Reverse), p("2564173"));
        assert_eq!(apply_symmetry(&p("132"), SymmetryOp::Inverse), p("132"));
        assert_eq!(apply_symmetry(&p("1342"), SymmetryOp::Inverse), p("1423"));
        assert_eq!(apply_symmetry(&p("132"), SymmetryOp::Complement), p("312"));
    }

    #[test]
    fn symmetries_preserve_containment() {
        let perms = all_up_to(4);
        for op in SymmetryOp::ALL {
            for pi in &perms {
                for sigma in &perms {
                    assert_eq!(
                        contains(pi, sigma),
                        contains(&op.apply(pi), &op.apply(sigma)),
                        "{op} {pi} {sigma}"
                    );
                }
            }
        }
    }

    #[test]
    fn involutions_and_group_closure() {
        let perms = all_up_to(5);
        for op in [SymmetryOp::Reverse, SymmetryOp::Complement, SymmetryOp::Inverse] {
            for pi in &perms {
                assert_eq!(&op.apply(&op.apply(pi)), pi);
            }
        }
        for a in SymmetryOp::ALL {
            for b in SymmetryOp::ALL {
                let ab = a.then(b);
                for pi in &perms {
                    assert_eq!(ab.apply(pi), b.apply(&a.apply(pi)), "{a} then {b}");
                }
            }
        }
    }

    #[test]
    fn symmetry_names_round_trip() {
        for op in SymmetryOp::ALL {
            assert_eq!(op.name().parse::<SymmetryOp>().unwrap(), op);
        }
        assert!("sideways".parse::<SymmetryOp>().is_err());
    }

    #[test]
    fn lexicographic_generation() {
        let all: Vec<Permutation> = Permutation::all_of_size(4).collect();
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Permutation::all_of_size(0).count(), 1);
    }

    #[test]
    fn ordering_is_size_then_word() {
        assert!(p("21") < p("123"));
        assert!(p("123") < p("132"));
    }
}
