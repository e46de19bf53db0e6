//! POP containment, bases of POP classes and recognition of POP classes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::perm::{contains, PermError, Permutation, SymmetryOp};
use crate::poset::{Poset, TotalOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("basis is not an antichain: {0} contains {1}")]
    NotAntichain(Permutation, Permutation),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A permutation class `Av(B)` given by a finite basis, stored sorted by size
/// and then lexicographically. Equality is set equality of bases.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermClass {
    basis: Vec<Permutation>,
}

impl PermClass {
    pub fn new(basis: impl IntoIterator<Item = Permutation>) -> Result<Self, ClassError> {
        let basis: Vec<Permutation> = basis.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        for (i, big) in basis.iter().enumerate() {
            if let Some(small) = basis[..i].iter().find(|s| s.len() < big.len() && contains(big, s)) {
                return Err(ClassError::NotAntichain(big.clone(), small.clone()));
            }
        }
        Ok(PermClass { basis })
    }

    /// For sets already known to be antichains, such as one-size bases.
    pub(crate) fn from_sorted_unchecked(basis: Vec<Permutation>) -> Self {
        debug_assert!(basis.windows(2).all(|w| w[0] < w[1]));
        PermClass { basis }
    }

    pub fn basis(&self) -> &[Permutation] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains_perm(&self, pi: &Permutation) -> bool {
        self.basis.iter().all(|b| !contains(pi, b))
    }

    /// The image class under a symmetry: every basis element is mapped.
    pub fn map(&self, op: SymmetryOp) -> PermClass {
        let mapped: BTreeSet<Permutation> = self.basis.iter().map(|b| op.apply(b)).collect();
        PermClass { basis: mapped.into_iter().collect() }
    }

    /// Basis elements joined by `", "`.
    pub fn basis_string(&self) -> String {
        self.basis.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", ")
    }

    /// One basis element per line, the basis file format.
    pub fn to_basis_file(&self) -> String {
        self.basis.iter().map(|b| format!("{b}\n")).collect()
    }

    pub fn from_basis_file(text: &str) -> Result<Self, ClassError> {
        let perms = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse::<Permutation>)
            .collect::<Result<Vec<_>, _>>()?;
        PermClass::new(perms)
    }
}

impl fmt::Display for PermClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Av({})", self.basis_string())
    }
}

impl fmt::Debug for PermClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Comma separated permutations, optionally wrapped in `Av(...)`.
impl FromStr for PermClass {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self, ClassError> {
        let mut s = s.trim();
        if let Some(inner) = s.strip_prefix("Av(").and_then(|r| r.strip_suffix(')')) {
            s = inner;
        }
        let perms = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse::<Permutation>)
            .collect::<Result<Vec<_>, _>>()?;
        PermClass::new(perms)
    }
}

/// `(l_1 l_2 ... l_k)^{-1}` for the total order `l_1 < l_2 < ... < l_k`.
pub fn perm_of_total_order(order: &TotalOrder) -> Permutation {
    Permutation::from_vec_unchecked(order.labels().to_vec()).inverse()
}

/// Whether some subword of `pi` satisfies every relation of `poset`.
///
/// This is a direct search over index tuples and never consults the basis.
pub fn pop_contains(pi: &Permutation, poset: &Poset) -> bool {
    let k = poset.size();
    if k > pi.len() {
        return false;
    }
    let plan = PopPlan::new(poset);
    let mut chosen = Vec::with_capacity(k);
    plan.search(pi.values(), &mut chosen, 0)
}

pub fn pop_avoids(pi: &Permutation, poset: &Poset) -> bool {
    !pop_contains(pi, poset)
}

struct PopPlan {
    // For position j, the earlier positions that must hold smaller/larger values.
    smaller: Vec<Vec<usize>>,
    larger: Vec<Vec<usize>>,
}

impl PopPlan {
    fn new(poset: &Poset) -> Self {
        let k = poset.size() as u32;
        let smaller = (1..=k)
            .map(|j| (1..j).filter(|&a| poset.less(a, j)).map(|a| a as usize - 1).collect())
            .collect();
        let larger = (1..=k)
            .map(|j| (1..j).filter(|&a| poset.less(j, a)).map(|a| a as usize - 1).collect())
            .collect();
        PopPlan { smaller, larger }
    }

    fn search(&self, text: &[u32], chosen: &mut Vec<usize>, start: usize) -> bool {
        let j = chosen.len();
        let k = self.smaller.len();
        if j == k {
            return true;
        }
        for i in start..=text.len() - (k - j) {
            let v = text[i];
            if self.smaller[j].iter().all(|&a| text[chosen[a]] < v)
                && self.larger[j].iter().all(|&a| text[chosen[a]] > v)
            {
                chosen.push(i);
                if self.search(text, chosen, i + 1) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
}

/// The basis of `Av(P)`: inverses of the linear extensions of `P`.
pub fn basis_of_pop(poset: &Poset) -> PermClass {
    let mut basis: Vec<Permutation> = poset
        .linear_extensions()
        .iter()
        .map(perm_of_total_order)
        .collect();
    basis.sort();
    PermClass::from_sorted_unchecked(basis)
}

/// The poset `P` with `Av(P) = Av(B)`, if one exists.
///
/// The only candidate is the intersection of the total orders read off the
/// inverses of the basis elements.
pub fn pop_of_class(class: &PermClass) -> Option<Poset> {
    let first = class.basis().first()?;
    let k = first.len();
    if k == 0 || class.basis().iter().any(|b| b.len() != k) {
        return None;
    }
    let mut pairs = Vec::new();
    for a in 1..=k as u32 {
        for b in 1..=k as u32 {
            // a precedes b in the order read from beta^{-1} exactly when beta(a) < beta(b).
            if a != b && class.basis().iter().all(|beta| beta.at(a as usize) < beta.at(b as usize)) {
                pairs.push((a, b));
            }
        }
    }
    let poset = Poset::from_relations(k, &pairs).ok()?;
    (basis_of_pop(&poset) == *class).then_some(poset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{grow_posets, PosetTransform};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn class(s: &str) -> PermClass {
        s.parse().unwrap()
    }

    fn example_poset() -> Poset {
        // 3 < 1 < {2, 4}
        Poset::from_relations(4, &[(3, 1), (1, 2), (1, 4)]).unwrap()
    }

    fn broom_poset() -> Poset {
        Poset::from_relations(5, &[(3, 1), (1, 2), (1, 4), (1, 5)]).unwrap()
    }

    #[test]
    fn class_construction() {
        assert!(matches!(PermClass::new([p("12"), p("132")]), Err(ClassError::NotAntichain(..))));
        let d = class("231, 132, 132");
        assert_eq!(d.basis(), &[p("132"), p("231")]);
        assert_eq!(class("Av(132, 231)"), d);
        assert!(class("").is_empty());
        assert!("12, 1x".parse::<PermClass>().is_err());
    }

    #[test]
    fn total_order_to_permutation() {
        let to = |v: Vec<u32>| perm_of_total_order(&TotalOrder::new(v).unwrap());
        assert_eq!(to(vec![2, 3, 1, 4]), p("3124"));
        assert_eq!(to(vec![1, 2, 3, 4, 5]), Permutation::identity(5));
        assert_eq!(to(vec![2, 1]), p("21"));
    }

    #[test]
    fn pop_containment_examples() {
        let q = example_poset();
        assert!(pop_contains(&p("4726135"), &q));
        assert!(pop_contains(&p("4725136"), &q));
        assert!(!pop_contains(&p("123"), &q));
        assert!(!pop_contains(&p("1234"), &q));
    }

    #[test]
    fn bases_of_examples() {
        let chain = Poset::chain(&[2, 3, 1, 4]).unwrap();
        assert_eq!(basis_of_pop(&chain), class("3124"));
        assert_eq!(
            basis_of_pop(&broom_poset()),
            class("23145, 23154, 24135, 24153, 25134, 25143")
        );
        assert_eq!(basis_of_pop(&Poset::antichain(3).unwrap()), class("123, 132, 213, 231, 312, 321"));
    }

    #[test]
    fn pop_recognition() {
        assert_eq!(pop_of_class(&class("1234, 1432")), None);
        assert_eq!(pop_of_class(&class("123, 132, 312")), None);
        let q = pop_of_class(&class("132, 231")).unwrap();
        assert_eq!(q, Poset::from_relations(3, &[(1, 2), (3, 2)]).unwrap());
        assert!(pop_of_class(&class("123, 132, 231")).is_some());
        assert_eq!(pop_of_class(&class("12, 321")), None);
        assert_eq!(pop_of_class(&class("")), None);
    }

    #[test]
    fn round_trip_over_all_small_posets() {
        for k in 1..=4 {
            for q in grow_posets(k) {
                let basis = basis_of_pop(&q);
                assert_eq!(basis.len(), q.count_linear_extensions());
                assert!(basis.basis().iter().all(|b| b.len() == k));
                assert_eq!(pop_of_class(&basis), Some(q));
            }
        }
    }

    #[test]
    fn basis_avoidance_matches_pop_avoidance() {
        let texts: Vec<Permutation> = (0..=6).flat_map(Permutation::all_of_size).collect();
        for k in 1..=3 {
            for q in grow_posets(k) {
                let basis = basis_of_pop(&q);
                for pi in &texts {
                    assert_eq!(pop_contains(pi, &q), !basis.contains_perm(pi), "{q} {pi}");
                }
            }
        }
    }

    #[test]
    fn avoidance_is_downward_closed() {
        let q = example_poset();
        let avoiders: Vec<Permutation> = Permutation::all_of_size(6)
            .filter(|pi| pop_avoids(pi, &q))
            .collect();
        for pi in &avoiders {
            for sigma in Permutation::all_of_size(5) {
                if contains(pi, &sigma) {
                    assert!(pop_avoids(&sigma, &q));
                }
            }
        }
    }

    #[test]
    fn symmetry_transport_of_bases() {
        for q in grow_posets(4) {
            let basis = basis_of_pop(&q);
            assert_eq!(
                basis_of_pop(&q.transform(PosetTransform::ComplementLabels)),
                basis.map(SymmetryOp::Reverse)
            );
            assert_eq!(
                basis_of_pop(&q.transform(PosetTransform::ReverseRelations)),
                basis.map(SymmetryOp::Complement)
            );
        }
    }

    #[test]
    fn basis_file_round_trip() {
        let c = class("1342, 1432");
        assert_eq!(PermClass::from_basis_file(&c.to_basis_file()).unwrap(), c);
        assert_eq!(c.to_string(), "Av(1342, 1432)");
    }
}
