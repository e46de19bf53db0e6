//! `popclass`: command-line access to POP classes, enumeration and the
//! verification pipelines.
//!
//! Results go to standard output, one JSON record or b-file line per result.
//! Summaries and errors go to standard error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgGroup, Args, Parser, Subcommand};
use popclass::classify::{
    bipartite_witnesses, canonical_class, class_sequence, has_regular_insertion_encoding, juxtaposition_membership,
    pop_landscape, symmetry_orbit, wilf_partition, ClassifyError, Juxtaposition,
};
use popclass::enumerate::{pop_counting_sequence, CountingSequence, EnumConfig, EnumError};
use popclass::genfunc::{check_sequence_match, GenFunc, GfError, MatchReport};
use popclass::oeis::{compare_terms, OeisClient, OeisError, OeisSequence};
use popclass::reproduce::{reproduce, ReproduceContext, ReproduceError, TABLE_IDS};
use popclass::{basis_of_pop, pop_of_class, PermClass, Poset};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "popclass", version, about = "Permutation classes defined by partially ordered patterns")]
struct Cli {
    /// Aligned human-readable output instead of JSON records.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Basis of Av(P), one permutation per line.
    Basis(PosetInput),
    /// The poset of a POP class, or "not-a-pop".
    IsPop(BasisInput),
    /// Regular insertion encoding test, with the bipartite check for posets.
    Rie(ClassInput),
    /// Counting sequence as a b-file.
    Count {
        #[command(flatten)]
        input: ClassInput,
        #[arg(long)]
        max_size: usize,
        #[command(flatten)]
        run: RunOptions,
    },
    /// Symmetry orbit and canonical representative.
    Symmetries(BasisInput),
    /// Census of POP classes of one size.
    Landscape {
        #[arg(long)]
        size: usize,
    },
    /// Group classes by counting sequence up to a horizon.
    Wilf {
        /// One basis per line, comma separated; '#' starts a comment line.
        #[arg(long)]
        classes: PathBuf,
        #[arg(long)]
        max_size: usize,
        #[command(flatten)]
        run: RunOptions,
    },
    /// Compare a generating function fixture with counts of a class.
    GfCheck {
        #[arg(long)]
        gf: PathBuf,
        #[command(flatten)]
        input: ClassInput,
        #[arg(long)]
        max_size: usize,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
        #[command(flatten)]
        run: RunOptions,
    },
    /// Compare a b-file with an OEIS sequence; our a(n) is paired with A(n + shift).
    Oeis {
        #[arg(long)]
        anum: String,
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
        /// Fetch from oeis.org on a cache miss.
        #[arg(long)]
        fetch: bool,
        /// Timeout for a live fetch, in seconds.
        #[arg(long, default_value_t = 30)]
        timeout: u64,
        /// Cache directory; defaults to $POPCLASS_OEIS_CACHE.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Run a verification pipeline: one of the table ids, or "all".
    Reproduce {
        table_id: String,
        /// OEIS cache directory; defaults to the shipped fixtures.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[command(flatten)]
        run: RunOptions,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("poset_source").required(true).args(["poset", "poset_file"])))]
struct PosetInput {
    /// Inline poset, e.g. "4: 2<3, 3<1, 1<4".
    #[arg(long)]
    poset: Option<String>,
    /// Poset file, JSON or compact text.
    #[arg(long)]
    poset_file: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("basis_source").required(true).args(["basis", "basis_file"])))]
struct BasisInput {
    /// Inline basis, e.g. "1342, 1432".
    #[arg(long)]
    basis: Option<String>,
    /// Basis file, one permutation per line.
    #[arg(long)]
    basis_file: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("class_source").required(true).args(["basis", "basis_file", "poset", "poset_file"])))]
struct ClassInput {
    #[arg(long)]
    basis: Option<String>,
    #[arg(long)]
    basis_file: Option<PathBuf>,
    #[arg(long)]
    poset: Option<String>,
    #[arg(long)]
    poset_file: Option<PathBuf>,
}

#[derive(Args)]
struct RunOptions {
    /// Node budget for enumeration.
    #[arg(long)]
    budget: Option<u64>,
    /// Worker threads; 0 uses the default pool.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl RunOptions {
    fn config(&self) -> EnumConfig {
        EnumConfig { budget: self.budget, workers: self.workers, ..EnumConfig::default() }
    }
}

enum Failure {
    Usage(String),
    Budget(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Budget(m) | Failure::Io(m) => m,
        }
    }
}

impl From<EnumError> for Failure {
    fn from(e: EnumError) -> Self {
        match &e {
            EnumError::Budget { partial, .. } => {
                print!("{}", partial.to_bfile());
                Failure::Budget(e.to_string())
            }
            EnumError::TooLarge(_) => Failure::Usage(e.to_string()),
        }
    }
}

impl From<GfError> for Failure {
    fn from(e: GfError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<OeisError> for Failure {
    fn from(e: OeisError) -> Self {
        match e {
            OeisError::CacheMiss { .. } | OeisError::Network { .. } | OeisError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ReproduceError> for Failure {
    fn from(e: ReproduceError) -> Self {
        match e {
            ReproduceError::Enum(e) => e.into(),
            ReproduceError::Oeis(e) => e.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

/// Whether the command's mathematical result was an agreement.
type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn parse_poset(text: &str) -> Result<Poset, Failure> {
    text.parse().map_err(|e| Failure::Usage(format!("bad poset {text:?}: {e}")))
}

fn load_poset(inline: &Option<String>, file: &Option<PathBuf>) -> Result<Option<Poset>, Failure> {
    match (inline, file) {
        (Some(text), None) => parse_poset(text).map(Some),
        (None, Some(path)) => parse_poset(read(path)?.trim()).map(Some),
        (Some(_), Some(_)) => Err(Failure::Usage("give the poset inline or as a file, not both".into())),
        (None, None) => Ok(None),
    }
}

fn load_basis(inline: &Option<String>, file: &Option<PathBuf>) -> Result<Option<PermClass>, Failure> {
    match (inline, file) {
        (Some(text), None) => text.parse().map(Some).map_err(|e| Failure::Usage(format!("bad basis {text:?}: {e}"))),
        (None, Some(path)) => PermClass::from_basis_file(&read(path)?)
            .map(Some)
            .map_err(|e| Failure::Usage(format!("bad basis file {}: {e}", path.display()))),
        (Some(_), Some(_)) => Err(Failure::Usage("give the basis inline or as a file, not both".into())),
        (None, None) => Ok(None),
    }
}

fn require<T>(value: Option<T>, what: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("missing {what}")))
}

enum Source {
    Basis(PermClass),
    Poset(Poset),
}

impl ClassInput {
    fn load(&self) -> Result<Source, Failure> {
        if let Some(class) = load_basis(&self.basis, &self.basis_file)? {
            return Ok(Source::Basis(class));
        }
        Ok(Source::Poset(require(load_poset(&self.poset, &self.poset_file)?, "--basis or --poset")?))
    }
}

impl Source {
    fn class(&self) -> PermClass {
        match self {
            Source::Basis(c) => c.clone(),
            Source::Poset(q) => basis_of_pop(q),
        }
    }

    fn sequence(&self, max_size: usize, config: &EnumConfig) -> Result<CountingSequence, EnumError> {
        match self {
            Source::Basis(c) => class_sequence(c, max_size, config),
            Source::Poset(q) => pop_counting_sequence(q, max_size, config),
        }
    }
}

fn emit(record: Value) {
    println!("{record}");
}

fn report_json(report: &MatchReport) -> Value {
    json!({
        "agrees": report.agrees(),
        "shift": report.shift,
        "first_index": report.first_index,
        "last_index": report.last_index,
        "mismatch": report.mismatch.as_ref().map(|m| json!({
            "index": m.index,
            "series": m.series.to_string(),
            "sequence": m.sequence.to_string(),
        })),
    })
}

fn terms_json(seq: &CountingSequence) -> Value {
    Value::Array(seq.terms().iter().map(|t| Value::String(t.to_string())).collect())
}

fn run(cli: Cli) -> Outcome {
    let pretty = cli.pretty;
    match cli.command {
        Command::Basis(input) => {
            let poset = require(load_poset(&input.poset, &input.poset_file)?, "--poset")?;
            let basis = basis_of_pop(&poset);
            if pretty {
                println!("{basis}");
            } else {
                print!("{}", basis.to_basis_file());
            }
            eprintln!("{} basis elements of size {}", basis.len(), poset.size());
            Ok(true)
        }
        Command::IsPop(input) => {
            let class = require(load_basis(&input.basis, &input.basis_file)?, "--basis")?;
            match pop_of_class(&class) {
                Some(q) if pretty => println!("{q}"),
                Some(q) => emit(serde_json::to_value(&q).expect("poset serializes")),
                None => println!("not-a-pop"),
            }
            Ok(true)
        }
        Command::Rie(input) => {
            let source = input.load()?;
            let class = source.class();
            let rie = has_regular_insertion_encoding(&class);
            let mut record = json!({ "regular_insertion_encoding": rie });
            for j in Juxtaposition::ALL {
                let witness = class.basis().iter().find(|b| juxtaposition_membership(b).contains(&j));
                record[j.to_string()] = witness.map_or(Value::Null, |b| Value::String(b.to_string()));
            }
            let mut agrees = true;
            if let Source::Poset(q) = &source {
                record["height"] = json!(q.height());
                record["bipartite"] = json!(q.is_bipartite());
                agrees = q.is_bipartite() == rie;
                if let Some(w) = bipartite_witnesses(q) {
                    record["witnesses"] = json!(w.iter().map(|p| p.to_string()).collect::<Vec<_>>());
                }
            }
            if pretty {
                for (k, v) in record.as_object().expect("object") {
                    println!("{k:<28} {v}");
                }
            } else {
                emit(record);
            }
            Ok(agrees)
        }
        Command::Count { input, max_size, run } => {
            let source = input.load()?;
            let seq = source.sequence(max_size, &run.config())?;
            if pretty {
                let width = seq.terms().last().map_or(1, |t| t.to_string().len());
                for (n, t) in seq.terms().iter().enumerate() {
                    println!("{n:>3}  {:>width$}", t.to_string());
                }
            } else {
                print!("{}", seq.to_bfile());
            }
            Ok(true)
        }
        Command::Symmetries(input) => {
            let class = require(load_basis(&input.basis, &input.basis_file)?, "--basis")?;
            let canon = canonical_class(&class);
            for member in symmetry_orbit(&class) {
                let pop = pop_of_class(&member).map(|q| q.to_text());
                if pretty {
                    let mark = if member == canon { "*" } else { " " };
                    println!("{mark} {:<60} {}", member.to_string(), pop.unwrap_or_else(|| "not-a-pop".into()));
                } else {
                    emit(json!({
                        "basis": member.basis_string(),
                        "canonical": member == canon,
                        "pop": pop,
                    }));
                }
            }
            eprintln!("orbit of {} classes; canonical {canon}", symmetry_orbit(&class).len());
            Ok(true)
        }
        Command::Landscape { size } => {
            let report = pop_landscape(size)?;
            if pretty {
                println!("size  total_posets  symmetry_classes  bipartite_symmetry_classes");
                println!(
                    "{:>4}  {:>12}  {:>16}  {:>26}",
                    report.size, report.total_posets, report.symmetry_classes, report.bipartite_symmetry_classes
                );
            } else {
                println!("{}", report.to_record());
            }
            Ok(true)
        }
        Command::Wilf { classes, max_size, run } => {
            let text = read(&classes)?;
            let list = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| l.parse::<PermClass>().map_err(|e| Failure::Usage(format!("bad class {l:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let partition = wilf_partition(&list, max_size, &run.config())?;
            if pretty {
                for (i, part) in partition.parts.iter().enumerate() {
                    let names: Vec<String> = part.canonical.iter().map(|c| c.to_string()).collect();
                    println!("{i:>4}  {}  [{}]", names.join("  "), part.sequence);
                }
            } else {
                for line in partition.to_records() {
                    println!("{line}");
                }
            }
            eprintln!("{} classes, {} parts equal up to {max_size}", list.len(), partition.parts.len());
            Ok(true)
        }
        Command::GfCheck { gf, input, max_size, shift, run } => {
            let gf = GenFunc::from_json(&read(&gf)?)?;
            let seq = input.load()?.sequence(max_size, &run.config())?;
            let series = gf.series(max_size)?;
            let report = check_sequence_match(&series, &seq, shift)?;
            let mut record = report_json(&report);
            record["counts"] = terms_json(&seq);
            if pretty {
                println!("{report}");
            } else {
                emit(record);
            }
            Ok(report.agrees())
        }
        Command::Oeis { anum, seq, shift, fetch, timeout, cache_dir } => {
            let ours = OeisSequence::parse_bfile("A000000".parse()?, &read(&seq)?)?;
            if ours.offset != 0 {
                return Err(Failure::Usage(format!("{} must start at index 0", seq.display())));
            }
            let terms: Vec<num_bigint::BigUint> = ours
                .terms
                .iter()
                .map(|t| t.to_biguint().ok_or_else(|| Failure::Usage("negative term in sequence".into())))
                .collect::<Result<_, _>>()?;
            let ours = CountingSequence::new(terms);
            let mut client = cache_dir.map_or_else(OeisClient::from_env, OeisClient::new);
            if fetch {
                client = client.with_network(Duration::from_secs(timeout));
            }
            let theirs = client.fetch_sequence(&anum)?;
            let report = compare_terms(&ours, &theirs, shift)?;
            let mut record = report_json(&report);
            record["anum"] = json!(anum);
            record["offset"] = json!(theirs.offset);
            if pretty {
                println!("{anum}: {report}");
            } else {
                emit(record);
            }
            Ok(report.agrees())
        }
        Command::Reproduce { table_id, cache_dir, run } => {
            let oeis = match cache_dir {
                Some(dir) => OeisClient::new(dir),
                None => OeisClient::new(popclass::oeis::fixture_dir()),
            };
            let ctx = ReproduceContext::new(run.config(), oeis);
            let ids: Vec<&str> = if table_id == "all" { TABLE_IDS.to_vec() } else { vec![table_id.as_str()] };
            let mut passed = true;
            for id in ids {
                let result = reproduce(id, &ctx)?;
                if pretty {
                    print!("{result}");
                } else {
                    for line in result.to_records() {
                        println!("{line}");
                    }
                }
                eprintln!("{id}: {}", if result.passed() { "PASS" } else { "FAIL" });
                passed &= result.passed();
            }
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
