//! Regular insertion encodings, symmetry orbits, Wilf partitions and the
//! census of POP classes of a given size.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::enumerate::{counting_sequence, pop_counting_sequence, CountingSequence, EnumConfig, EnumError};
use crate::perm::{Permutation, SymmetryOp};
use crate::pop::{basis_of_pop, pop_of_class, PermClass};
use crate::poset::{enumerate_posets, Poset, PosetError, MAX_ENUMERATION_SIZE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("census size {0} is out of range 1..={MAX_ENUMERATION_SIZE}")]
    SizeBound(usize),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("bipartiteness and insertion encoding disagree for {0}")]
    Inconsistent(Poset),
    #[error("bipartiteness is not constant on the orbit of {0}")]
    OrbitSplit(PermClass),
}

/// The four vertical juxtapositions of monotone classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Juxtaposition {
    /// Increasing on top of increasing.
    J1,
    /// Decreasing on top of decreasing.
    J2,
    /// Increasing on top of decreasing.
    J3,
    /// Decreasing on top of increasing.
    J4,
}

impl Juxtaposition {
    pub const ALL: [Juxtaposition; 4] = [Juxtaposition::J1, Juxtaposition::J2, Juxtaposition::J3, Juxtaposition::J4];

    pub fn basis(self) -> &'static [&'static str] {
        match self {
            Juxtaposition::J1 => &["321", "2143", "2413"],
            Juxtaposition::J2 => &["123", "3142", "3412"],
            Juxtaposition::J3 => &["132", "312"],
            Juxtaposition::J4 => &["213", "231"],
        }
    }

    pub fn contains(self, pi: &Permutation) -> bool {
        self.basis().iter().all(|b| pi.avoids(&b.parse().expect("static basis")))
    }
}

impl fmt::Display for Juxtaposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub fn juxtaposition_membership(pi: &Permutation) -> BTreeSet<Juxtaposition> {
    Juxtaposition::ALL.into_iter().filter(|j| j.contains(pi)).collect()
}

/// Each of the four juxtapositions must contain a basis element.
pub fn has_regular_insertion_encoding(class: &PermClass) -> bool {
    let mut seen = BTreeSet::new();
    for beta in class.basis() {
        seen.extend(juxtaposition_membership(beta));
        if seen.len() == 4 {
            return true;
        }
    }
    false
}

pub fn symmetry_orbit(class: &PermClass) -> BTreeSet<PermClass> {
    SymmetryOp::ALL.iter().map(|&op| class.map(op)).collect()
}

/// The orbit member with the lexicographically smallest sorted basis.
pub fn canonical_class(class: &PermClass) -> PermClass {
    symmetry_orbit(class).into_iter().next().expect("orbit contains the class")
}

/// The four linear extensions built from a bipartite poset: lower elements take
/// the values `1..=k`, the rest take `k+1..=n`, each block increasing or
/// decreasing. Returned in the order of [`Juxtaposition::ALL`].
pub fn bipartite_witnesses(poset: &Poset) -> Option<[Permutation; 4]> {
    if !poset.is_bipartite() {
        return None;
    }
    let n = poset.size();
    let lower = poset.lower_elements();
    let upper: Vec<u32> = (1..=n as u32).filter(|a| !lower.contains(a)).collect();
    let k = lower.len() as u32;
    let build = |lower_up: bool, upper_up: bool| {
        let mut values = vec![0u32; n];
        for (i, &a) in lower.iter().enumerate() {
            let i = i as u32;
            values[a as usize - 1] = if lower_up { i + 1 } else { k - i };
        }
        for (i, &a) in upper.iter().enumerate() {
            let i = i as u32;
            values[a as usize - 1] = if upper_up { k + i + 1 } else { n as u32 - i };
        }
        Permutation::new(values).expect("values are a bijection")
    };
    Some([build(true, true), build(false, false), build(false, true), build(true, false)])
}

/// A chain `a < b < c` forces the same pattern at indices `a, b, c` of every
/// basis element, and that pattern is a basis element of some juxtaposition,
/// which then contains no element of the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainObstruction {
    pub chain: [u32; 3],
    pub pattern: Permutation,
    pub excluded: Juxtaposition,
}

pub fn chain_obstruction(poset: &Poset) -> Option<ChainObstruction> {
    let k = poset.size() as u32;
    let chain = (1..=k)
        .flat_map(|a| (1..=k).flat_map(move |b| (1..=k).map(move |c| [a, b, c])))
        .find(|&[a, b, c]| poset.less(a, b) && poset.less(b, c))?;
    let basis = basis_of_pop(poset);
    let patterns: BTreeSet<Permutation> = basis
        .basis()
        .iter()
        .map(|beta| {
            let mut idx = chain;
            idx.sort_unstable();
            Permutation::standardize(&idx.map(|i| beta.at(i as usize)))
        })
        .collect();
    if patterns.len() != 1 {
        return None;
    }
    let pattern = patterns.into_iter().next()?;
    let excluded = Juxtaposition::ALL.into_iter().find(|j| {
        j.basis().iter().any(|b| b.parse::<Permutation>().expect("static basis") == pattern)
    })?;
    Some(ChainObstruction { chain, pattern, excluded })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LandscapeReport {
    pub size: usize,
    pub total_posets: usize,
    pub symmetry_classes: usize,
    pub bipartite_symmetry_classes: usize,
}

impl LandscapeReport {
    pub fn to_record(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}

/// Census of the POP classes of size `k` up to symmetry.
///
/// Fails if bipartiteness and the insertion-encoding test disagree on some
/// poset, or if bipartiteness is not constant on an orbit.
pub fn pop_landscape(k: usize) -> Result<LandscapeReport, ClassifyError> {
    if k == 0 || k > MAX_ENUMERATION_SIZE {
        return Err(ClassifyError::SizeBound(k));
    }
    let posets: Vec<Poset> = enumerate_posets(k)?.collect();
    let rows: Vec<(PermClass, bool, bool, usize)> = posets
        .par_iter()
        .enumerate()
        .map(|(i, q)| {
            let basis = basis_of_pop(q);
            (canonical_class(&basis), q.is_bipartite(), has_regular_insertion_encoding(&basis), i)
        })
        .collect();
    let mut orbits: BTreeMap<PermClass, bool> = BTreeMap::new();
    for (canon, bipartite, rie, i) in rows {
        if bipartite != rie {
            return Err(ClassifyError::Inconsistent(posets[i].clone()));
        }
        if let Some(&seen) = orbits.get(&canon) {
            if seen != bipartite {
                return Err(ClassifyError::OrbitSplit(canon));
            }
        } else {
            orbits.insert(canon, bipartite);
        }
    }
    Ok(LandscapeReport {
        size: k,
        total_posets: posets.len(),
        symmetry_classes: orbits.len(),
        bipartite_symmetry_classes: orbits.values().filter(|&&b| b).count(),
    })
}

/// Counting sequence of a class, through its poset when it is a POP class.
pub fn class_sequence(class: &PermClass, max_size: usize, config: &EnumConfig) -> Result<CountingSequence, EnumError> {
    match pop_of_class(class) {
        Some(q) => pop_counting_sequence(&q, max_size, config),
        None => counting_sequence(class, max_size, config),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WilfPart {
    /// Input classes in this part, sorted and without repeats.
    pub classes: Vec<PermClass>,
    /// Distinct canonical representatives of those classes.
    pub canonical: Vec<PermClass>,
    pub sequence: CountingSequence,
}

impl WilfPart {
    /// More than one symmetry class shares this counting sequence.
    pub fn is_nontrivial(&self) -> bool {
        self.canonical.len() > 1
    }
}

/// Classes grouped by equal counting sequences on `0..=horizon`. Nothing is
/// claimed beyond the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WilfPartition {
    pub horizon: usize,
    pub parts: Vec<WilfPart>,
}

impl WilfPartition {
    pub fn nontrivial(&self) -> impl Iterator<Item = &WilfPart> {
        self.parts.iter().filter(|p| p.is_nontrivial())
    }

    /// One JSON object per part.
    pub fn to_records(&self) -> Vec<String> {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, part)| {
                json!({
                    "part": i,
                    "equal_up_to": self.horizon,
                    "classes": part.classes.len(),
                    "canonical": part.canonical.iter().map(PermClass::basis_string).collect::<Vec<_>>(),
                    "sequence": sequence_json(&part.sequence),
                })
                .to_string()
            })
            .collect()
    }
}

pub(crate) fn sequence_json(seq: &CountingSequence) -> Value {
    Value::Array(
        seq.terms()
            .iter()
            .map(|t| match u64::try_from(t) {
                Ok(v) => json!(v),
                Err(_) => json!(t.to_string()),
            })
            .collect(),
    )
}

/// Partition `classes` by their counting sequences on `0..=horizon`.
///
/// Symmetric classes share a sequence, so each orbit is counted once.
pub fn wilf_partition(classes: &[PermClass], horizon: usize, config: &EnumConfig) -> Result<WilfPartition, EnumError> {
    wilf_partition_by(classes, horizon, |c| class_sequence(c, horizon, config))
}

/// As [`wilf_partition`], with sequences on `0..=horizon` supplied by
/// `sequence_of`, which is called once per canonical class.
pub fn wilf_partition_by<E>(
    classes: &[PermClass],
    horizon: usize,
    mut sequence_of: impl FnMut(&PermClass) -> Result<CountingSequence, E>,
) -> Result<WilfPartition, E> {
    let mut memo: HashMap<PermClass, CountingSequence> = HashMap::new();
    let mut groups: BTreeMap<Vec<num_bigint::BigUint>, BTreeMap<PermClass, BTreeSet<PermClass>>> = BTreeMap::new();
    for class in classes {
        let canon = canonical_class(class);
        let seq = match memo.get(&canon) {
            Some(s) => s.clone(),
            None => {
                let s = sequence_of(&canon)?.truncated(horizon);
                memo.insert(canon.clone(), s.clone());
                s
            }
        };
        groups
            .entry(seq.terms().to_vec())
            .or_default()
            .entry(canon)
            .or_default()
            .insert(class.clone());
    }
    let mut parts: Vec<WilfPart> = groups
        .into_iter()
        .map(|(terms, by_canon)| WilfPart {
            canonical: by_canon.keys().cloned().collect(),
            classes: by_canon.into_values().flatten().collect::<BTreeSet<_>>().into_iter().collect(),
            sequence: CountingSequence::new(terms),
        })
        .collect();
    parts.sort_by(|a, b| a.canonical[0].cmp(&b.canonical[0]));
    Ok(WilfPartition { horizon, parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::grow_posets;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn class(s: &str) -> PermClass {
        s.parse().unwrap()
    }

    fn in_juxtaposition_by_cut(pi: &Permutation, lower_up: bool, upper_up: bool) -> bool {
        let n = pi.len() as u32;
        let monotone = |vals: Vec<u32>, up: bool| vals.windows(2).all(|w| (w[0] < w[1]) == up);
        (0..=n).any(|cut| {
            let low: Vec<u32> = pi.values().iter().copied().filter(|&v| v <= cut).collect();
            let high: Vec<u32> = pi.values().iter().copied().filter(|&v| v > cut).collect();
            monotone(low, lower_up) && monotone(high, upper_up)
        })
    }

    #[test]
    fn juxtaposition_bases_match_their_shapes() {
        let shapes = [(true, true), (false, false), (false, true), (true, false)];
        for n in 0..=7 {
            for pi in Permutation::all_of_size(n) {
                for (j, &(lo, hi)) in Juxtaposition::ALL.iter().zip(&shapes) {
                    assert_eq!(j.contains(&pi), in_juxtaposition_by_cut(&pi, lo, hi), "{j} {pi}");
                }
            }
        }
    }

    #[test]
    fn membership_examples() {
        assert!(juxtaposition_membership(&p("415263")).contains(&Juxtaposition::J1));
        assert!(juxtaposition_membership(&p("435261")).contains(&Juxtaposition::J3));
        // Both blocks decreasing; 635241 contains 213 at 3, 2, 4.
        assert_eq!(juxtaposition_membership(&p("635241")), BTreeSet::from([Juxtaposition::J2]));
        assert!(juxtaposition_membership(&p("615243")).contains(&Juxtaposition::J4));
        assert_eq!(juxtaposition_membership(&p("12")).len(), 4);
    }

    #[test]
    fn insertion_encoding_examples() {
        let q = Poset::from_relations(6, &[(2, 5), (4, 5), (4, 1), (6, 1)]).unwrap();
        assert!(has_regular_insertion_encoding(&basis_of_pop(&q)));
        let g1 = class("31425, 31524, 32415, 32514, 41235, 41325, 42135, 42315, 43125, 43215");
        assert!(!has_regular_insertion_encoding(&g1));
        assert!(!has_regular_insertion_encoding(&class("123")));
        assert!(has_regular_insertion_encoding(&class("1")));
    }

    #[test]
    fn witness_example() {
        let q = Poset::from_relations(6, &[(2, 5), (4, 5), (4, 1), (6, 1)]).unwrap();
        let w = bipartite_witnesses(&q).unwrap();
        assert_eq!(w.clone().map(|x| x.to_string()), ["415263", "635241", "435261", "615243"]);
        let basis = basis_of_pop(&q);
        for (pi, j) in w.iter().zip(Juxtaposition::ALL) {
            assert!(basis.basis().contains(pi));
            assert!(j.contains(pi));
        }
    }

    #[test]
    fn bipartite_iff_regular_encoding_up_to_four() {
        for k in 1..=4 {
            for q in grow_posets(k) {
                let basis = basis_of_pop(&q);
                assert_eq!(q.height() <= 2, has_regular_insertion_encoding(&basis), "{q}");
                match bipartite_witnesses(&q) {
                    Some(w) => {
                        for (pi, j) in w.iter().zip(Juxtaposition::ALL) {
                            assert!(basis.basis().contains(pi) && j.contains(pi), "{q} {pi}");
                        }
                        assert!(chain_obstruction(&q).is_none());
                    }
                    None => {
                        let ob = chain_obstruction(&q).unwrap();
                        assert!(basis.basis().iter().all(|b| !ob.excluded.contains(b)));
                    }
                }
            }
        }
    }

    #[test]
    fn obstruction_example() {
        let q = Poset::from_relations(5, &[(3, 1), (1, 2), (1, 4), (1, 5)]).unwrap();
        let ob = chain_obstruction(&q).unwrap();
        assert_eq!(ob.chain, [3, 1, 2]);
        assert_eq!(ob.pattern, p("231"));
        assert_eq!(ob.excluded, Juxtaposition::J4);
    }

    #[test]
    fn orbits() {
        let orbit = symmetry_orbit(&class("1342, 1432"));
        assert_eq!(orbit.len(), 8);
        assert!(orbit.contains(&class("1423, 1432")));
        assert_eq!(symmetry_orbit(&class("12")), BTreeSet::from([class("12"), class("21")]));
        assert_eq!(symmetry_orbit(&class("1")).len(), 1);
        for k in 1..=4 {
            for q in grow_posets(k) {
                let orbit = symmetry_orbit(&basis_of_pop(&q));
                assert_eq!(8 % orbit.len(), 0);
            }
        }
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canonical_class(&class("1423, 1432")), class("1342, 1432"));
        assert_eq!(canonical_class(&class("21")), class("12"));
        for q in grow_posets(4) {
            let basis = basis_of_pop(&q);
            let canon = canonical_class(&basis);
            assert_eq!(canonical_class(&canon), canon);
            for member in symmetry_orbit(&basis) {
                assert_eq!(canonical_class(&member), canon);
            }
        }
    }

    #[test]
    fn small_landscapes() {
        let reports: Vec<LandscapeReport> = (1..=4).map(|k| pop_landscape(k).unwrap()).collect();
        let totals: Vec<usize> = reports.iter().map(|r| r.total_posets).collect();
        let classes: Vec<usize> = reports.iter().map(|r| r.symmetry_classes).collect();
        assert_eq!(totals, [1, 3, 19, 219]);
        assert_eq!(classes, [1, 2, 7, 64]);
        assert!(reports.iter().all(|r| r.bipartite_symmetry_classes <= r.symmetry_classes));
        assert!(matches!(pop_landscape(0), Err(ClassifyError::SizeBound(0))));
        assert!(matches!(pop_landscape(6), Err(ClassifyError::SizeBound(6))));
        assert_eq!(
            reports[1].to_record(),
            r#"{"size":2,"total_posets":3,"symmetry_classes":2,"bipartite_symmetry_classes":2}"#
        );
    }

    #[test]
    fn wilf_partition_of_small_classes() {
        let input = [class("123"), class("321"), class("132"), class("231"), class("12"), class("1234")];
        let w = wilf_partition(&input, 7, &EnumConfig::default()).unwrap();
        assert_eq!(w.horizon, 7);
        assert_eq!(w.parts.len(), 3);
        assert_eq!(w.parts[0].classes, vec![class("12")]);
        assert_eq!(w.parts[1].canonical, vec![class("123"), class("132")]);
        assert_eq!(w.parts[1].classes.len(), 4);
        assert_eq!(w.parts[1].sequence.terms()[7], 429u32.into());
        assert_eq!(w.nontrivial().count(), 1);
        let records = w.to_records();
        assert_eq!(records.len(), 3);
        let v: Value = serde_json::from_str(&records[1]).unwrap();
        assert_eq!(v["canonical"], json!(["123", "132"]));
        assert_eq!(v["equal_up_to"], json!(7));
    }

    #[test]
    fn symmetric_copies_share_a_part() {
        let c = class("1342, 1432");
        let copies: Vec<PermClass> = symmetry_orbit(&c).into_iter().collect();
        let w = wilf_partition(&copies, 6, &EnumConfig::default()).unwrap();
        assert_eq!(w.parts.len(), 1);
        assert!(!w.parts[0].is_nontrivial());
    }
}
