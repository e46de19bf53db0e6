//! Exact power-series coefficients of rational and algebraic generating
//! functions, and comparison of series against counting sequences.
//!
//! Everything is exact rational arithmetic. An algebraic function is given by
//! a bivariate polynomial `P(x, F)` and a few seed coefficients that single
//! out the branch; further coefficients are solved for one at a time.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::enumerate::CountingSequence;

/// Number of overlapping terms a sequence comparison needs.
pub const MIN_OVERLAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("denominator has zero constant term")]
    ZeroConstantTerm,
    #[error("branch is not determined by the {0} seed terms")]
    BranchNotDetermined(usize),
    #[error("seed disagrees with the minimal polynomial at x^{0}")]
    SeedInconsistent(usize),
    #[error("only {overlap} overlapping terms, need at least {MIN_OVERLAP}")]
    InsufficientOverlap { overlap: usize },
    #[error("bad generating function fixture: {0}")]
    Fixture(String),
}

pub type Series = Vec<BigRational>;

/// `num / den` with integer coefficient lists in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalGF {
    #[serde(with = "int_list")]
    pub num: Vec<BigInt>,
    #[serde(with = "int_list")]
    pub den: Vec<BigInt>,
}

/// A root of `sum c * x^i * F^j = 0` fixed by its first coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicGF {
    #[serde(with = "term_list")]
    pub minpoly: Vec<(usize, usize, BigInt)>,
    #[serde(with = "int_list")]
    pub seed: Vec<BigInt>,
}

/// The fixture file format, tagged by `"kind"`. Unknown keys such as a
/// `"comment"` holding the original closed form are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GenFunc {
    Rational(RationalGF),
    Algebraic(AlgebraicGF),
}

impl GenFunc {
    pub fn from_json(text: &str) -> Result<Self, GfError> {
        serde_json::from_str(text).map_err(|e| GfError::Fixture(e.to_string()))
    }

    pub fn series(&self, max_index: usize) -> Result<Series, GfError> {
        match self {
            GenFunc::Rational(r) => rational_series(r, max_index),
            GenFunc::Algebraic(a) => algebraic_series(a, max_index),
        }
    }
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

impl RationalGF {
    pub fn new(num: &[i64], den: &[i64]) -> Self {
        RationalGF { num: ints(num), den: ints(den) }
    }

    /// Builds `num / den` from factor lists, each factor an ascending
    /// coefficient list, e.g. `(1 - 3x)(1 - 4x + 2x^2)`.
    pub fn from_factors(num: &[&[i64]], den: &[&[i64]]) -> Self {
        let prod = |fs: &[&[i64]]| fs.iter().fold(vec![BigInt::one()], |acc, f| poly_mul(&acc, &ints(f)));
        RationalGF { num: prod(num), den: prod(den) }
    }
}

impl AlgebraicGF {
    pub fn new(minpoly: &[(usize, usize, i64)], seed: &[i64]) -> Self {
        AlgebraicGF {
            minpoly: minpoly.iter().map(|&(i, j, c)| (i, j, BigInt::from(c))).collect(),
            seed: ints(seed),
        }
    }

    pub fn with_seed(&self, seed: Vec<BigInt>) -> Self {
        AlgebraicGF { minpoly: self.minpoly.clone(), seed }
    }

    /// `den * F - num = 0` with no seed.
    pub fn from_rational(gf: &RationalGF) -> Self {
        let mut minpoly: Vec<(usize, usize, BigInt)> = gf
            .den
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, 1, c.clone()))
            .collect();
        minpoly.extend(gf.num.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, 0, -c)));
        AlgebraicGF { minpoly, seed: Vec::new() }
    }

    fn degree_in_f(&self) -> usize {
        self.minpoly.iter().map(|t| t.1).max().unwrap_or(0)
    }

    /// Coefficient polynomials in `x`, indexed by the power of `F`.
    fn by_power(&self) -> Vec<Vec<BigRational>> {
        let mut out = vec![Vec::new(); self.degree_in_f() + 1];
        for (i, j, c) in &self.minpoly {
            let row: &mut Vec<BigRational> = &mut out[*j];
            if row.len() <= *i {
                row.resize(i + 1, BigRational::zero());
            }
            row[*i] += BigRational::from_integer(c.clone());
        }
        out
    }

    /// `P(x, s)` truncated to degree `max_degree`.
    pub fn evaluate(&self, s: &[BigRational], max_degree: usize) -> Series {
        eval_bivariate(&self.by_power(), s, max_degree)
    }

    /// `dP/dF (x, s)` truncated to degree `max_degree`.
    fn derivative(&self, s: &[BigRational], max_degree: usize) -> Series {
        let rows = self.by_power();
        let deriv: Vec<Vec<BigRational>> = (1..rows.len())
            .map(|j| rows[j].iter().map(|c| c * BigRational::from_integer(BigInt::from(j))).collect())
            .collect();
        eval_bivariate(&deriv, s, max_degree)
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_mul(a: &[BigRational], b: &[BigRational], max_degree: usize) -> Series {
    let mut out = vec![BigRational::zero(); max_degree + 1];
    for (i, x) in a.iter().enumerate().take(max_degree + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(max_degree + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation of `sum_j rows[j](x) * s^j` modulo `x^(max_degree+1)`.
fn eval_bivariate(rows: &[Vec<BigRational>], s: &[BigRational], max_degree: usize) -> Series {
    let mut acc = vec![BigRational::zero(); max_degree + 1];
    for row in rows.iter().rev() {
        acc = series_mul(&acc, s, max_degree);
        for (i, c) in row.iter().enumerate().take(max_degree + 1) {
            acc[i] += c;
        }
    }
    acc
}

pub fn rational_series(gf: &RationalGF, max_index: usize) -> Result<Series, GfError> {
    let den0 = match gf.den.first() {
        Some(d) if !d.is_zero() => BigRational::from_integer(d.clone()),
        _ => return Err(GfError::ZeroConstantTerm),
    };
    let mut out: Series = Vec::with_capacity(max_index + 1);
    for n in 0..=max_index {
        let mut c = gf.num.get(n).map_or_else(BigRational::zero, |v| BigRational::from_integer(v.clone()));
        for (i, d) in gf.den.iter().enumerate().skip(1).take(n) {
            c -= BigRational::from_integer(d.clone()) * &out[n - i];
        }
        out.push(c / &den0);
    }
    Ok(out)
}

/// Coefficients `0..=max_index` of the branch of `gf.minpoly` that starts
/// with `gf.seed`.
///
/// With `D = dP/dF` along the seed having lowest term `d x^v`, the unknown
/// coefficient of `x^n` only enters `P(x, F)` at degree `n + v` through
/// `d * a_n` once `n > v`, which gives one linear equation per coefficient.
pub fn algebraic_series(gf: &AlgebraicGF, max_index: usize) -> Result<Series, GfError> {
    let mut s: Series = gf.seed.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let m = s.len();
    let linear = gf.degree_in_f() <= 1;
    // D is exact below degree m whatever the later coefficients are.
    let probe = if linear { max_index + 1 } else { m.saturating_sub(1) };
    let derivative = gf.derivative(&s, probe);
    let v = derivative
        .iter()
        .position(|c| !c.is_zero())
        .filter(|&v| linear || v < m)
        .ok_or(GfError::BranchNotDetermined(m))?;
    let lead = derivative[v].clone();
    let residual = gf.evaluate(&s, m + v);
    if let Some(bad) = residual.iter().take(m + v).position(|c| !c.is_zero()) {
        return Err(GfError::SeedInconsistent(bad));
    }
    while s.len() <= max_index {
        let n = s.len();
        let r = gf.evaluate(&s, n + v);
        s.push(-&r[n + v] / &lead);
    }
    s.truncate(max_index + 1);
    Ok(s)
}

/// `P(x, series)` modulo `x^(series.len())`; all zero for a true root.
pub fn residual(gf: &AlgebraicGF, series: &[BigRational]) -> Series {
    match series.len() {
        0 => Vec::new(),
        len => gf.evaluate(series, len - 1),
    }
}

/// `1 + x * F(x)` from the coefficients of `F`.
pub fn shifted_up(series: &[BigRational]) -> Series {
    std::iter::once(BigRational::one()).chain(series.iter().cloned()).collect()
}

/// Integer coefficients, when every coefficient is integral.
pub fn to_integers(series: &[BigRational]) -> Option<Vec<BigInt>> {
    series.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub index: usize,
    pub series: BigRational,
    pub sequence: BigRational,
}

/// Outcome of comparing `coeffs[n]` against `seq[n + shift]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchReport {
    pub shift: i64,
    /// Series indices that were compared.
    pub first_index: usize,
    pub last_index: usize,
    pub mismatch: Option<Mismatch>,
}

impl MatchReport {
    pub fn agrees(&self) -> bool {
        self.mismatch.is_none()
    }

    pub fn overlap(&self) -> usize {
        self.last_index + 1 - self.first_index
    }
}

fn show(q: &BigRational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        q.to_string()
    }
}

impl fmt::Display for MatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mismatch {
            None => write!(
                f,
                "agree on indices {}..={} (shift {})",
                self.first_index, self.last_index, self.shift
            ),
            Some(m) => write!(
                f,
                "first disagreement at index {}: series {} vs sequence {} (shift {})",
                m.index,
                show(&m.series),
                show(&m.sequence),
                self.shift
            ),
        }
    }
}

pub fn check_sequence_match(coeffs: &[BigRational], seq: &CountingSequence, shift: i64) -> Result<MatchReport, GfError> {
    let terms: Vec<BigRational> = seq.terms().iter().map(|t| BigRational::from_integer(BigInt::from(t.clone()))).collect();
    compare_shifted(coeffs, &terms, shift)
}

pub(crate) fn compare_shifted(coeffs: &[BigRational], terms: &[BigRational], shift: i64) -> Result<MatchReport, GfError> {
    let indices: Vec<usize> = (0..coeffs.len())
        .filter(|&n| {
            let m = n as i64 + shift;
            m >= 0 && (m as usize) < terms.len()
        })
        .collect();
    if indices.len() < MIN_OVERLAP {
        return Err(GfError::InsufficientOverlap { overlap: indices.len() });
    }
    let mismatch = indices.iter().find_map(|&n| {
        let other = &terms[(n as i64 + shift) as usize];
        (coeffs[n] != *other).then(|| Mismatch { index: n, series: coeffs[n].clone(), sequence: other.clone() })
    });
    Ok(MatchReport {
        shift,
        first_index: indices[0],
        last_index: *indices.last().unwrap(),
        mismatch,
    })
}

pub fn integer_series(values: &[i64]) -> Series {
    values.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect()
}

/// Integers in fixtures are JSON numbers when they fit in an `i64` and
/// decimal strings otherwise.
fn int_to_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(small) => serde_json::Value::from(small),
        None => serde_json::Value::from(v.to_string()),
    }
}

fn int_from_json(v: &serde_json::Value) -> Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => n.to_string().parse().map_err(|_| format!("not an integer: {n}")),
        serde_json::Value::String(s) => s.parse().map_err(|_| format!("not an integer: {s:?}")),
        other => Err(format!("not an integer: {other}")),
    }
}

mod int_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(int_to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        raw.iter().map(int_from_json).collect::<Result<_, _>>().map_err(serde::de::Error::custom)
    }
}

mod term_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[(usize, usize, BigInt)], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|(i, j, c)| vec![serde_json::Value::from(*i), serde_json::Value::from(*j), int_to_json(c)])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(usize, usize, BigInt)>, D::Error> {
        let raw = Vec::<[serde_json::Value; 3]>::deserialize(d)?;
        raw.iter()
            .map(|[i, j, c]| {
                let exp = |v: &serde_json::Value| v.as_u64().map(|e| e as usize).ok_or(format!("bad exponent {v}"));
                Ok((exp(i)?, exp(j)?, int_from_json(c)?))
            })
            .collect::<Result<_, String>>()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(values: &[i64]) -> Series {
        integer_series(values)
    }

    #[test]
    fn geometric_series() {
        assert_eq!(rational_series(&RationalGF::new(&[1], &[1, -1]), 4).unwrap(), q(&[1, 1, 1, 1, 1]));
        assert_eq!(rational_series(&RationalGF::new(&[1], &[1, -2]), 4).unwrap(), q(&[1, 2, 4, 8, 16]));
        assert_eq!(rational_series(&RationalGF::new(&[1], &[0, 1]), 2), Err(GfError::ZeroConstantTerm));
        assert_eq!(rational_series(&RationalGF::new(&[1], &[]), 2), Err(GfError::ZeroConstantTerm));
    }

    #[test]
    fn non_integral_coefficients_stay_exact() {
        let s = rational_series(&RationalGF::new(&[1], &[2, -1]), 3).unwrap();
        assert_eq!(s[3], BigRational::new(1.into(), 16.into()));
        assert_eq!(to_integers(&s), None);
    }

    #[test]
    fn rational_times_denominator_is_numerator() {
        let gf = RationalGF::from_factors(&[&[1, -3], &[1, -4, 2]], &[&[1, -4], &[1, -2], &[1, -2]]);
        let s = rational_series(&gf, 15).unwrap();
        let den: Series = gf.den.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let back = series_mul(&s, &den, 15);
        for (n, c) in back.iter().enumerate() {
            let expected = gf.num.get(n).map_or_else(BigRational::zero, |v| BigRational::from_integer(v.clone()));
            assert_eq!(*c, expected);
        }
    }

    #[test]
    fn catalan_branch() {
        // x F^2 - F + 1 = 0
        let gf = AlgebraicGF::new(&[(1, 2, 1), (0, 1, -1), (0, 0, 1)], &[1]);
        let s = algebraic_series(&gf, 5).unwrap();
        assert_eq!(s, q(&[1, 1, 2, 5, 14, 42]));
        assert!(residual(&gf, &s).iter().all(Zero::is_zero));
    }

    #[test]
    fn seed_errors() {
        let gf = AlgebraicGF::new(&[(1, 2, 1), (0, 1, -1), (0, 0, 1)], &[2]);
        assert_eq!(algebraic_series(&gf, 5), Err(GfError::SeedInconsistent(0)));
        // (F - 1)^2 = x^2: the derivative vanishes at x = 0 so one term is not enough.
        let square = AlgebraicGF::new(&[(0, 2, 1), (0, 1, -2), (0, 0, 1), (2, 0, -1)], &[1]);
        assert_eq!(algebraic_series(&square, 4), Err(GfError::BranchNotDetermined(1)));
        let plus = algebraic_series(&square.with_seed(ints(&[1, 1])), 4).unwrap();
        assert_eq!(plus, q(&[1, 1, 0, 0, 0]));
        let minus = algebraic_series(&square.with_seed(ints(&[1, -1])), 4).unwrap();
        assert_eq!(minus, q(&[1, -1, 0, 0, 0]));
        assert_eq!(algebraic_series(&square.with_seed(ints(&[1, 2])), 4), Err(GfError::SeedInconsistent(2)));
    }

    #[test]
    fn rational_through_the_algebraic_route() {
        let gf = RationalGF::new(&[1, -4, -1, 3, -1, -2], &[1, -5, 2, 5, -4, -4]);
        let direct = rational_series(&gf, 14).unwrap();
        let alg = algebraic_series(&AlgebraicGF::from_rational(&gf), 14).unwrap();
        assert_eq!(direct, alg);
    }

    #[test]
    fn seed_longer_than_request() {
        let gf = AlgebraicGF::new(&[(1, 2, 1), (0, 1, -1), (0, 0, 1)], &[1, 1, 2, 5]);
        assert_eq!(algebraic_series(&gf, 1).unwrap(), q(&[1, 1]));
    }

    #[test]
    fn sequence_comparison() {
        let seq = CountingSequence::from_u64s(&[1, 1, 2, 5, 14, 42, 132]);
        let same = check_sequence_match(&q(&[1, 1, 2, 5, 14, 42, 132]), &seq, 0).unwrap();
        assert!(same.agrees());
        assert_eq!(same.overlap(), 7);
        let shifted = check_sequence_match(&q(&[1, 2, 5, 14, 42, 132]), &seq, 1).unwrap();
        assert!(shifted.agrees());
        let back = check_sequence_match(&q(&[0, 1, 1, 2, 5, 14]), &seq, -1).unwrap();
        assert!(back.agrees());
        assert_eq!(back.first_index, 1);
        let off = check_sequence_match(&q(&[1, 1, 2, 5, 15, 42]), &seq, 0).unwrap();
        assert_eq!(off.mismatch.unwrap().index, 4);
        assert_eq!(
            check_sequence_match(&q(&[1, 1, 2]), &seq, 0),
            Err(GfError::InsufficientOverlap { overlap: 3 })
        );
        assert!(check_sequence_match(&q(&[1, 1, 2, 5, 14]), &seq, 3).is_err());
    }

    #[test]
    fn fixture_format() {
        let r = GenFunc::from_json(r#"{"kind":"rational","num":[1],"den":[1,-1]}"#).unwrap();
        assert_eq!(r, GenFunc::Rational(RationalGF::new(&[1], &[1, -1])));
        let a = GenFunc::from_json(r#"{"kind":"algebraic","minpoly":[[1,2,1],[0,1,-1],[0,0,1]],"seed":[1]}"#).unwrap();
        assert_eq!(a.series(3).unwrap(), q(&[1, 1, 2, 5]));
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(GenFunc::from_json(&json).unwrap(), a);
        let big = GenFunc::from_json(r#"{"kind":"rational","num":["123456789012345678901234567890"],"den":[1]}"#).unwrap();
        assert_eq!(GenFunc::from_json(&serde_json::to_string(&big).unwrap()).unwrap(), big);
        assert!(GenFunc::from_json(r#"{"kind":"other"}"#).is_err());
        assert!(GenFunc::from_json(r#"{"kind":"rational","num":[1.5],"den":[1]}"#).is_err());
    }
}
