//! OEIS b-files: parsing, a local cache and optional live fetching.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::enumerate::CountingSequence;
use crate::genfunc::{compare_shifted, GfError, MatchReport};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "POPCLASS_OEIS_CACHE";

const BASE_URL: &str = "https://oeis.org";

#[derive(Debug, Error)]
pub enum OeisError {
    #[error("malformed A-number {0:?}: expected 'A' followed by six digits")]
    MalformedANumber(String),
    #[error("{anum} is not cached in {dir} and network access is disabled")]
    CacheMiss { anum: ANumber, dir: PathBuf },
    #[error("fetching {anum} failed: {message}")]
    Network { anum: ANumber, message: String },
    #[error("malformed b-file line {line}: {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("b-file line {line}: index {found} does not follow {previous}")]
    NonConsecutive { line: usize, previous: i64, found: i64 },
    #[error("b-file for {0} has no terms")]
    Empty(ANumber),
    #[error("cache I/O on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Match(#[from] GfError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ANumber(String);

impl ANumber {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `b001035.txt`, the name OEIS uses for the b-file.
    pub fn bfile_name(&self) -> String {
        format!("b{}.txt", &self.0[1..])
    }
}

impl FromStr for ANumber {
    type Err = OeisError;

    fn from_str(s: &str) -> Result<Self, OeisError> {
        let digits = s.strip_prefix('A').unwrap_or("");
        if digits.len() == 6 && digits.bytes().all(|b| b.is_ascii_digit()) {
            Ok(ANumber(s.to_string()))
        } else {
            Err(OeisError::MalformedANumber(s.to_string()))
        }
    }
}

impl fmt::Display for ANumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Terms of an OEIS sequence indexed consecutively from `offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OeisSequence {
    pub anum: ANumber,
    pub offset: i64,
    pub terms: Vec<BigInt>,
}

impl OeisSequence {
    /// Parse b-file text: `n a(n)` per line, `#` comments and blank lines skipped.
    pub fn parse_bfile(anum: ANumber, text: &str) -> Result<Self, OeisError> {
        let mut offset = None;
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || OeisError::MalformedLine { line: i + 1, text: raw.to_string() };
            let mut fields = line.split_whitespace();
            let (Some(n), Some(a), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(bad());
            };
            let n: i64 = n.parse().map_err(|_| bad())?;
            let a: BigInt = a.parse().map_err(|_| bad())?;
            match offset {
                None => offset = Some(n),
                Some(o) => {
                    let previous = o + terms.len() as i64 - 1;
                    if n != previous + 1 {
                        return Err(OeisError::NonConsecutive { line: i + 1, previous, found: n });
                    }
                }
            }
            terms.push(a);
        }
        let offset = offset.ok_or_else(|| OeisError::Empty(anum.clone()))?;
        Ok(OeisSequence { anum, offset, terms })
    }

    pub fn to_bfile(&self) -> String {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| format!("{} {t}\n", self.offset + i as i64))
            .collect()
    }

    /// The term `a(n)` in OEIS indexing.
    pub fn get(&self, n: i64) -> Option<&BigInt> {
        usize::try_from(n - self.offset).ok().and_then(|i| self.terms.get(i))
    }
}

/// Reads b-files from a cache directory and, when allowed, fetches missing
/// ones from the network and stores them atomically.
#[derive(Debug, Clone)]
pub struct OeisClient {
    cache_dir: PathBuf,
    network: Option<Duration>,
    base_url: String,
}

impl OeisClient {
    /// An offline client over `cache_dir`.
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        OeisClient { cache_dir: cache_dir.into(), network: None, base_url: BASE_URL.to_string() }
    }

    /// Cache directory from [`CACHE_ENV`], else `$XDG_CACHE_HOME/popclass/oeis`,
    /// else `~/.cache/popclass/oeis`.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("XDG_CACHE_HOME").map(|d| PathBuf::from(d).join("popclass/oeis")))
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache/popclass/oeis")))
            .unwrap_or_else(|| PathBuf::from(".popclass-oeis"));
        OeisClient::new(dir)
    }

    /// Allow fetching cache misses, with a per-request timeout.
    pub fn with_network(mut self, timeout: Duration) -> Self {
        self.network = Some(timeout);
        self
    }

    pub fn with_base_url(mut self, url: impl Into<String>) -> Self {
        self.base_url = url.into();
        self
    }

    pub fn cache_dir(&self) -> &Path {
        &self.cache_dir
    }

    fn cache_path(&self, anum: &ANumber) -> PathBuf {
        self.cache_dir.join(anum.bfile_name())
    }

    pub fn cached(&self, anum: &ANumber) -> Result<Option<OeisSequence>, OeisError> {
        let path = self.cache_path(anum);
        match fs::read_to_string(&path) {
            Ok(text) => OeisSequence::parse_bfile(anum.clone(), &text).map(Some),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(source) => Err(OeisError::Io { path, source }),
        }
    }

    /// Cache first, then the network if enabled.
    pub fn fetch_sequence(&self, anum: &str) -> Result<OeisSequence, OeisError> {
        let anum: ANumber = anum.parse()?;
        if let Some(seq) = self.cached(&anum)? {
            return Ok(seq);
        }
        let Some(timeout) = self.network else {
            return Err(OeisError::CacheMiss { anum, dir: self.cache_dir.clone() });
        };
        let text = self.download(&anum, timeout)?;
        let seq = OeisSequence::parse_bfile(anum, &text)?;
        self.store(&seq)?;
        Ok(seq)
    }

    fn download(&self, anum: &ANumber, timeout: Duration) -> Result<String, OeisError> {
        let url = format!("{}/{}/{}", self.base_url.trim_end_matches('/'), anum, anum.bfile_name());
        let network = |message: String| OeisError::Network { anum: anum.clone(), message };
        let response = ureq::AgentBuilder::new()
            .timeout(timeout)
            .build()
            .get(&url)
            .call()
            .map_err(|e| network(e.to_string()))?;
        let mut text = String::new();
        response
            .into_reader()
            .take(64 << 20)
            .read_to_string(&mut text)
            .map_err(|e| network(e.to_string()))?;
        Ok(text)
    }

    /// Write the sequence to the cache through a temporary file and a rename,
    /// so readers never see a partial file.
    pub fn store(&self, seq: &OeisSequence) -> Result<(), OeisError> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| OeisError::Io { path, source }
        };
        fs::create_dir_all(&self.cache_dir).map_err(io_err(&self.cache_dir))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.cache_dir).map_err(io_err(&self.cache_dir))?;
        tmp.write_all(seq.to_bfile().as_bytes()).map_err(io_err(tmp.path()))?;
        let path = self.cache_path(&seq.anum);
        tmp.persist(&path).map_err(|e| OeisError::Io { path, source: e.error })?;
        Ok(())
    }
}

/// Compare `seq[n]` with the OEIS term `a(n + shift)`.
pub fn compare_terms(seq: &CountingSequence, oeis: &OeisSequence, shift: i64) -> Result<MatchReport, OeisError> {
    let ours: Vec<BigRational> = seq
        .terms()
        .iter()
        .map(|t| BigRational::from_integer(BigInt::from(t.clone())))
        .collect();
    let theirs: Vec<BigRational> = oeis.terms.iter().cloned().map(BigRational::from_integer).collect();
    let mut report = compare_shifted(&ours, &theirs, shift - oeis.offset)?;
    report.shift = shift;
    Ok(report)
}

pub fn compare_with_oeis(
    seq: &CountingSequence,
    anum: &str,
    shift: i64,
    client: &OeisClient,
) -> Result<MatchReport, OeisError> {
    let oeis = client.fetch_sequence(anum)?;
    compare_terms(seq, &oeis, shift)
}

/// The directory of b-files shipped with this crate.
pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/oeis")
}
