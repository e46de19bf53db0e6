//! Canned verification pipelines. Each one runs library operations against
//! the shipped fixtures and reports PASS or FAIL per check.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use crate::classify::{
    bipartite_witnesses, canonical_class, chain_obstruction, class_sequence, has_regular_insertion_encoding,
    pop_landscape, wilf_partition_by, ClassifyError, Juxtaposition,
};
use crate::enumerate::{CountingSequence, EnumConfig, EnumError};
use crate::genfunc::{check_sequence_match, shifted_up, AlgebraicGF, GenFunc, GfError, RationalGF, Series};
use crate::oeis::{compare_terms, fixture_dir, OeisClient, OeisError};
use crate::pop::{basis_of_pop, PermClass};
use crate::poset::{enumerate_posets, Poset};

/// Pipeline ids accepted by [`reproduce`], in the order `all` runs them.
pub const TABLE_IDS: &[&str] = &[
    "thm1",
    "landscape5",
    "thm2",
    "gk1",
    "gk2",
    "gk3",
    "gk4",
    "gk5",
    "gk6",
    "table3",
    "table4",
    "table5-a212198",
    "fig2",
    "wilf5",
    "wilf6",
    "degree10",
];

pub const G1_BASIS: &str = "31425, 31524, 32415, 32514, 41235, 41325, 42135, 42315, 43125, 43215";
pub const G2_BASIS: &str = "41235, 41325, 42135, 42315, 43125, 43215";
pub const G3_BASIS: &str = "51423, 51432, 52413, 52431, 53412, 53421, 54312, 54321";
pub const G4_BASIS: &str = "45123, 45213, 54123, 54213";
pub const G5_BASIS: &str = "45123, 45132, 45213, 54123, 54132, 54213";
pub const G6_BASIS: &str = "45123, 45213";
pub const G6_PARTNER: &str = "12345, 12354";
pub const DEGREE10_BASIS: &str = "13542, 14523, 14532, 15324, 15423, 15432, 24513, 25314, 25413";

const G1_GF: &str = include_str!("../fixtures/gf/g1.json");
const G2_GF: &str = include_str!("../fixtures/gf/g2.json");
const G3_GF: &str = include_str!("../fixtures/gf/g3.json");
const G4_GF: &str = include_str!("../fixtures/gf/g4.json");
const A228907_GF: &str = include_str!("../fixtures/gf/a228907.json");
const DEGREE10_GF: &str = include_str!("../fixtures/gf/degree10.json");
const TABLES: &str = include_str!("../fixtures/tables.json");
const ZIGZAG6_GROUPS: &str = include_str!("../fixtures/zigzag6-groups.json");
const MCLASS_GFS: &[&str] = &[
    include_str!("../fixtures/gf/mclass-24253.json"),
    include_str!("../fixtures/gf/mclass-24033.json"),
    include_str!("../fixtures/gf/mclass-24092.json"),
    include_str!("../fixtures/gf/mclass-24394.json"),
    include_str!("../fixtures/gf/mclass-24280.json"),
    include_str!("../fixtures/gf/mclass-23974.json"),
    include_str!("../fixtures/gf/mclass-24234.json"),
    include_str!("../fixtures/gf/mclass-23856.json"),
    include_str!("../fixtures/gf/mclass-23868.json"),
    include_str!("../fixtures/gf/mclass-24211.json"),
    include_str!("../fixtures/gf/mclass-24387.json"),
    include_str!("../fixtures/gf/mclass-24453.json"),
    include_str!("../fixtures/gf/mclass-24361.json"),
    include_str!("../fixtures/gf/mclass-24457.json"),
    include_str!("../fixtures/gf/mclass-24038.json"),
    include_str!("../fixtures/gf/mclass-23879.json"),
    include_str!("../fixtures/gf/mclass-24381.json"),
    include_str!("../fixtures/gf/mclass-24329.json"),
    include_str!("../fixtures/gf/mclass-24079.json"),
    include_str!("../fixtures/gf/mclass-24410.json"),
    include_str!("../fixtures/gf/mclass-24338.json"),
    include_str!("../fixtures/gf/mclass-24414.json"),
    include_str!("../fixtures/gf/mclass-24385.json"),
];

#[derive(Debug, Error)]
pub enum ReproduceError {
    #[error("unknown table id {0:?}")]
    UnknownTable(String),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Oeis(#[from] OeisError),
    #[error("bad fixture: {0}")]
    Fixture(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reproduction {
    pub id: String,
    pub checks: Vec<Check>,
}

impl Reproduction {
    fn new(id: &str) -> Self {
        Reproduction { id: id.to_string(), checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_records(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                json!({
                    "table": self.id,
                    "check": c.name,
                    "status": if c.pass { "PASS" } else { "FAIL" },
                    "detail": c.detail,
                })
                .to_string()
            })
            .collect()
    }
}

impl fmt::Display for Reproduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {}/{}: {}", self.id, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Enumeration settings, the OEIS source, and a cache of counting sequences
/// shared by every pipeline run through this context.
pub struct ReproduceContext {
    pub config: EnumConfig,
    pub oeis: OeisClient,
    sequences: Mutex<HashMap<PermClass, CountingSequence>>,
}

impl Default for ReproduceContext {
    fn default() -> Self {
        ReproduceContext::new(EnumConfig::default(), OeisClient::new(fixture_dir()))
    }
}

impl ReproduceContext {
    pub fn new(config: EnumConfig, oeis: OeisClient) -> Self {
        ReproduceContext { config, oeis, sequences: Mutex::new(HashMap::new()) }
    }

    /// Counting sequence of `class` on `0..=n`, reusing earlier results for
    /// any member of the same symmetry orbit.
    pub fn sequence(&self, class: &PermClass, n: usize) -> Result<CountingSequence, EnumError> {
        let canon = canonical_class(class);
        if let Some(s) = self.sequences.lock().expect("cache lock").get(&canon) {
            if s.len() > n {
                return Ok(s.truncated(n));
            }
        }
        let s = class_sequence(&canon, n, &self.config)?;
        let mut cache = self.sequences.lock().expect("cache lock");
        let entry = cache.entry(canon).or_insert_with(|| s.clone());
        if entry.len() < s.len() {
            *entry = s.clone();
        }
        Ok(s)
    }
}

pub fn reproduce(id: &str, ctx: &ReproduceContext) -> Result<Reproduction, ReproduceError> {
    match id {
        "thm1" => worked_bases(),
        "landscape5" => landscape(ctx),
        "thm2" => bipartite_criterion(),
        "gk1" => gk1(ctx),
        "gk2" => algebraic_check(ctx, "gk2", G2_GF, G2_BASIS, "A054872"),
        "gk3" => algebraic_check(ctx, "gk3", G3_GF, G3_BASIS, "A118376"),
        "gk4" => algebraic_check(ctx, "gk4", G4_GF, G4_BASIS, "A212198"),
        "gk5" => gk5(ctx),
        "gk6" => gk6(ctx),
        "table3" => table(ctx, "table3", "A054872", 10),
        "table4" => table(ctx, "table4", "A118376", 9),
        "table5-a212198" => table(ctx, "table5-a212198", "A212198", 9),
        "fig2" => mclass_rationals(ctx),
        "wilf5" => wilf5(ctx),
        "wilf6" => wilf6(ctx),
        "degree10" => degree10(ctx),
        other => Err(ReproduceError::UnknownTable(other.to_string())),
    }
}

fn class(basis: &str) -> PermClass {
    basis.parse().expect("built-in basis")
}

fn poset(text: &str) -> Poset {
    text.parse().expect("built-in poset")
}

fn worked_bases() -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new("thm1");
    let chain = basis_of_pop(&poset("4: 2<3<1<4"));
    r.check("chain-2314", chain == class("3124"), chain.to_string());
    let broom = basis_of_pop(&poset("5: 3<1, 1<2, 1<4, 1<5"));
    let expected = class("23145, 23154, 24135, 24153, 25134, 25143");
    r.check("broom", broom == expected, broom.to_string());
    Ok(r)
}

fn landscape(ctx: &ReproduceContext) -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new("landscape5");
    let reports = (1..=5).map(pop_landscape).collect::<Result<Vec<_>, _>>()?;
    let totals: Vec<u64> = reports.iter().map(|x| x.total_posets as u64).collect();
    let classes: Vec<u64> = reports.iter().map(|x| x.symmetry_classes as u64).collect();
    r.check("total-posets", totals == [1, 3, 19, 219, 4231], format!("{totals:?}"));
    r.check("symmetry-classes", classes == [1, 2, 7, 64, 1068], format!("{classes:?}"));
    let bip = reports[4].bipartite_symmetry_classes;
    r.check("bipartite-symmetry-classes-5", bip == 223, bip.to_string());
    // Index i holds size i + 1.
    for (name, anum, values) in [("oeis-total-posets", "A001035", &totals), ("oeis-symmetry-classes", "A366705", &classes)] {
        let oeis = ctx.oeis.fetch_sequence(anum)?;
        let report = compare_terms(&CountingSequence::from_u64s(values), &oeis, 1)?;
        r.check(name, report.agrees(), format!("{anum}: {report}"));
    }
    Ok(r)
}

fn bipartite_criterion() -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new("thm2");
    for k in [4, 5] {
        let mut agree = 0;
        let mut total = 0;
        let mut witnesses = 0;
        let mut obstructions = 0;
        let mut bipartite = 0;
        for q in enumerate_posets(k).map_err(ClassifyError::from)? {
            total += 1;
            let basis = basis_of_pop(&q);
            let rie = has_regular_insertion_encoding(&basis);
            if q.is_bipartite() == rie {
                agree += 1;
            }
            if let Some(w) = bipartite_witnesses(&q) {
                bipartite += 1;
                if w.iter().zip(Juxtaposition::ALL).all(|(pi, j)| basis.basis().contains(pi) && j.contains(pi)) {
                    witnesses += 1;
                }
            } else if let Some(ob) = chain_obstruction(&q) {
                if basis.basis().iter().all(|b| !ob.excluded.contains(b)) {
                    obstructions += 1;
                }
            }
        }
        r.check(
            format!("bipartite-iff-rie-{k}"),
            agree == total,
            format!("{agree} of {total} posets agree"),
        );
        r.check(
            format!("witnesses-{k}"),
            witnesses == bipartite,
            format!("{witnesses} of {bipartite} bipartite posets"),
        );
        r.check(
            format!("obstructions-{k}"),
            obstructions == total - bipartite,
            format!("{obstructions} of {} non-bipartite posets", total - bipartite),
        );
    }
    Ok(r)
}

fn algebraic_fixture(text: &str) -> Result<AlgebraicGF, ReproduceError> {
    match GenFunc::from_json(text)? {
        GenFunc::Algebraic(a) => Ok(a),
        GenFunc::Rational(_) => Err(ReproduceError::Fixture("expected an algebraic generating function".into())),
    }
}

/// Series of the fixture's branch with the seed replaced by the first terms
/// of `seed_source`.
fn seeded_series(gf: &AlgebraicGF, seed_source: &[BigInt], n: usize) -> Result<Series, ReproduceError> {
    let seed = seed_source[..gf.seed.len()].to_vec();
    Ok(crate::genfunc::algebraic_series(&gf.with_seed(seed), n)?)
}

fn ints(seq: &CountingSequence) -> Vec<BigInt> {
    seq.terms().iter().map(|t| BigInt::from(t.clone())).collect()
}

fn series_check(r: &mut Reproduction, name: &str, series: &[BigRational], counts: &CountingSequence) -> Result<(), ReproduceError> {
    let report = check_sequence_match(series, counts, 0)?;
    r.check(name, report.agrees(), report.to_string());
    Ok(())
}

fn oeis_check(r: &mut Reproduction, ctx: &ReproduceContext, counts: &CountingSequence, anum: &str, shift: i64) -> Result<(), ReproduceError> {
    let oeis = ctx.oeis.fetch_sequence(anum)?;
    let report = compare_terms(counts, &oeis, shift)?;
    r.check(format!("oeis-{anum}"), report.agrees(), report.to_string());
    Ok(())
}

fn gk1(ctx: &ReproduceContext) -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new("gk1");
    let counts = ctx.sequence(&class(G1_BASIS), 10)?;
    let a10 = &counts.terms()[10];
    r.check("count-10", *a10 == 443592u32.into(), a10.to_string());
    let gf = algebraic_fixture(G1_GF)?;
    series_check(&mut r, "minpoly-series", &seeded_series(&gf, &ints(&counts), 10)?, &counts)?;
    let oeis = ctx.oeis.fetch_sequence("A216879")?;
    let report = compare_terms(&counts, &oeis, 0)?;
    let expected = report.mismatch.as_ref().is_some_and(|m| {
        m.index == 10 && m.series == BigRational::from_integer(443592.into()) && m.sequence == BigRational::from_integer(443594.into())
    });
    r.check("oeis-A216879-differs", expected, report.to_string());
    oeis_check(&mut r, ctx, &counts, "A366706", 0)?;
    Ok(r)
}

fn algebraic_check(ctx: &ReproduceContext, id: &str, fixture: &str, basis: &str, anum: &str) -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new(id);
    let counts = ctx.sequence(&class(basis), 10)?;
    let gf = algebraic_fixture(fixture)?;
    series_check(&mut r, "closed-form-series", &seeded_series(&gf, &ints(&counts), 10)?, &counts)?;
    oeis_check(&mut r, ctx, &counts, anum, 0)?;
    Ok(r)
}

fn gk5(ctx: &ReproduceContext) -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new("gk5");
    let counts = ctx.sequence(&class(G5_BASIS), 10)?;
    let gf = algebraic_fixture(A228907_GF)?;
    // F is seeded from a(1), a(2), ... since the class is counted by 1 + xF.
    let f = seeded_series(&gf, &ints(&counts)[1..], 9)?;
    series_check(&mut r, "one-plus-x-f", &shifted_up(&f), &counts)?;
    oeis_check(&mut r, ctx, &counts, "A228907", -1)?;
    Ok(r)
}

fn gk6(ctx: &ReproduceContext) -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new("gk6");
    let ours = ctx.sequence(&class(G6_BASIS), 10)?;
    let partner = ctx.sequence(&class(G6_PARTNER), 10)?;
    r.check("equal-to-av-12345-12354", ours == partner, format!("{ours}"));
    oeis_check(&mut r, ctx, &ours, "A224295", 0)?;
    Ok(r)
}

#[derive(Deserialize)]
struct Tables {
    tables: HashMap<String, Vec<String>>,
}

/// Basis strings of the classes expected to be counted by `anum`.
pub fn table_classes(anum: &str) -> Result<Vec<PermClass>, ReproduceError> {
    let tables: Tables = serde_json::from_str(TABLES).map_err(|e| ReproduceError::Fixture(e.to_string()))?;
    let rows = tables.tables.get(anum).ok_or_else(|| ReproduceError::Fixture(format!("no table for {anum}")))?;
    rows.iter()
        .map(|b| b.parse().map_err(|e| ReproduceError::Fixture(format!("{b}: {e}"))))
        .collect()
}

fn table(ctx: &ReproduceContext, id: &str, anum: &str, n: usize) -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new(id);
    let classes = table_classes(anum)?;
    let sequences = classes.iter().map(|c| ctx.sequence(c, n)).collect::<Result<Vec<_>, _>>()?;
    let distinct: BTreeSet<String> = sequences.iter().map(|s| s.to_string()).collect();
    r.check(
        "pairwise-equal",
        distinct.len() == 1,
        format!("{} classes, {} distinct sequences to n={n}", classes.len(), distinct.len()),
    );
    oeis_check(&mut r, ctx, &sequences[0], anum, 0)?;
    Ok(r)
}

/// Zig-zag labelings sharing one rational generating function.
pub struct LabeledRational {
    pub labels: Vec<Vec<u32>>,
    pub gf: RationalGF,
}

pub fn mclass_generating_functions() -> Result<Vec<LabeledRational>, ReproduceError> {
    #[derive(Deserialize)]
    struct Labels {
        labels: Vec<Vec<u32>>,
    }
    MCLASS_GFS
        .iter()
        .map(|text| {
            let gf = match GenFunc::from_json(text)? {
                GenFunc::Rational(gf) => gf,
                GenFunc::Algebraic(_) => return Err(ReproduceError::Fixture("expected a rational fixture".into())),
            };
            let Labels { labels } = serde_json::from_str(text).map_err(|e| ReproduceError::Fixture(e.to_string()))?;
            Ok(LabeledRational { labels, gf })
        })
        .collect()
}

fn zigzag_class(labels: &[u32]) -> Result<PermClass, ReproduceError> {
    let q = Poset::zigzag(labels).map_err(|e| ReproduceError::Fixture(e.to_string()))?;
    Ok(basis_of_pop(&q))
}

fn label_string(labels: &[u32]) -> String {
    labels.iter().map(u32::to_string).collect()
}

fn mclass_rationals(ctx: &ReproduceContext) -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new("fig2");
    for entry in mclass_generating_functions()? {
        let series = crate::genfunc::rational_series(&entry.gf, 11)?;
        for labels in &entry.labels {
            let counts = ctx.sequence(&zigzag_class(labels)?, 11)?;
            series_check(&mut r, &format!("zigzag-{}", label_string(labels)), &series, &counts)?;
        }
    }
    Ok(r)
}

fn canonical_groups(groups: &[Vec<Vec<u32>>]) -> Result<BTreeSet<BTreeSet<PermClass>>, ReproduceError> {
    groups
        .iter()
        .map(|g| g.iter().map(|l| zigzag_class(l).map(|c| canonical_class(&c))).collect())
        .collect()
}

fn all_zigzag_classes(n: usize) -> Result<Vec<PermClass>, ReproduceError> {
    let posets = Poset::zigzags(n).map_err(|e| ReproduceError::Fixture(e.to_string()))?;
    Ok(posets.iter().map(basis_of_pop).collect())
}

fn wilf5(ctx: &ReproduceContext) -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new("wilf5");
    let classes = all_zigzag_classes(5)?;
    let w = wilf_partition_by(&classes, 11, |c| ctx.sequence(c, 11))?;
    r.check("parts", w.parts.len() == 23, format!("{} classes, {} parts equal up to 11", classes.len(), w.parts.len()));
    let boxes: Vec<Vec<Vec<u32>>> = mclass_generating_functions()?.into_iter().map(|e| e.labels).collect();
    let expected = canonical_groups(&boxes)?;
    let found: BTreeSet<BTreeSet<PermClass>> = w.parts.iter().map(|p| p.canonical.iter().cloned().collect()).collect();
    r.check("groups-match-reference", found == expected, format!("{} symmetry classes", expected.iter().map(BTreeSet::len).sum::<usize>()));
    Ok(r)
}

#[derive(Deserialize)]
struct Groups {
    groups: Vec<Vec<Vec<u32>>>,
}

fn wilf6(ctx: &ReproduceContext) -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new("wilf6");
    let classes = all_zigzag_classes(6)?;
    let w = wilf_partition_by(&classes, 10, |c| ctx.sequence(c, 10))?;
    r.check("parts", w.parts.len() == 177, format!("{} classes, {} parts equal up to 10", classes.len(), w.parts.len()));
    let groups: Groups = serde_json::from_str(ZIGZAG6_GROUPS).map_err(|e| ReproduceError::Fixture(e.to_string()))?;
    let expected = canonical_groups(&groups.groups)?;
    let found: BTreeSet<BTreeSet<PermClass>> =
        w.nontrivial().map(|p| p.canonical.iter().cloned().collect()).collect();
    r.check("nontrivial-groups-match-reference", found == expected, format!("{} nontrivial parts", found.len()));
    Ok(r)
}

fn degree10(ctx: &ReproduceContext) -> Result<Reproduction, ReproduceError> {
    let mut r = Reproduction::new("degree10");
    let counts = ctx.sequence(&class(DEGREE10_BASIS), 10)?;
    let gf = algebraic_fixture(DEGREE10_GF)?;
    series_check(&mut r, "minpoly-series", &seeded_series(&gf, &ints(&counts), 10)?, &counts)?;
    Ok(r)
}

/// Every fixture generating function, by name.
pub fn algebraic_fixtures() -> Result<Vec<(&'static str, AlgebraicGF)>, ReproduceError> {
    [
        ("g1", G1_GF),
        ("g2", G2_GF),
        ("g3", G3_GF),
        ("g4", G4_GF),
        ("a228907", A228907_GF),
        ("degree10", DEGREE10_GF),
    ]
    .into_iter()
    .map(|(name, text)| Ok((name, algebraic_fixture(text)?)))
    .collect()
}
