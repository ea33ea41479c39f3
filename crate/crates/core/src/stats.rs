//! Exact probabilities of run events in uniformly random words, and p-value
//! based model selection among single-run explanations.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::word::{all_words, every_valence, maximal_runs, valence_order, Run, Valence, Word};

/// Exact probabilities and thresholds.
pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(num.into(), den.into())
}

fn pow(r: &Rational, e: usize) -> Rational {
    num_traits::pow(r.clone(), e)
}

/// `"num/den"` in lowest terms.
pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"`, or an integer.
pub fn parse_ratio(text: &str) -> Result<Rational> {
    let bad = || Error::DomainError(format!("not a rational number: {text:?}"));
    let (n, d) = match text.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Six significant digits, rounded half up, computed exactly. Values below
/// 1e-4 use scientific notation.
pub fn decimal(r: &Rational) -> String {
    decimal_digits(r, 6)
}

pub fn decimal_digits(r: &Rational, digits: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let r = r.abs();
    let ten = BigInt::from(10);
    // e = floor(log10 r)
    let mut e = r.numer().to_string().len() as i64 - r.denom().to_string().len() as i64;
    let scale = |e: i64| -> Rational {
        if e >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), e as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
        }
    };
    while r < scale(e) {
        e -= 1;
    }
    while r >= scale(e + 1) {
        e += 1;
    }
    let shift = digits as i64 - 1 - e;
    let scaled = &r * scale(shift);
    let two = BigInt::from(2);
    let mut mantissa = (scaled.numer() * &two + scaled.denom()).div_floor(&(scaled.denom() * &two));
    if mantissa.to_string().len() > digits {
        mantissa /= 10;
        e += 1;
    }
    let m = mantissa.to_string();
    if e < -4 {
        let (lead, rest) = m.split_at(1);
        return format!("{sign}{lead}.{rest}e-{:02}", -e);
    }
    let body = if e < 0 {
        format!("0.{}{m}", "0".repeat((-e - 1) as usize))
    } else if e as usize + 1 >= digits {
        format!("{m}{}", "0".repeat(e as usize + 1 - digits))
    } else {
        let (int, frac) = m.split_at(e as usize + 1);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

fn check_probability(p: &Rational) -> Result<()> {
    if p.is_negative() || *p > Rational::one() {
        return Err(Error::InvalidProbability(format_ratio(p)));
    }
    Ok(())
}

/// `Pr(R_n <= x)`: the longest run of successes in `n` Bernoulli(`p`) trials
/// has length at most `x`. Conditioning on the first failure gives
/// `P[m] = Σ_{i=1}^{x+1} P[m-i] p^{i-1} (1-p)` for `m > x`, with `P[m] = 1`
/// for `m <= x`.
pub fn longest_run_cdf(n: usize, x: usize, p: &Rational) -> Result<Rational> {
    check_probability(p)?;
    if n <= x {
        return Ok(Rational::one());
    }
    let q = Rational::one() - p;
    let weights: Vec<Rational> = (0..=x).map(|i| pow(p, i) * &q).collect();
    let mut table: Vec<Rational> = vec![Rational::one(); x + 1];
    for m in x + 1..=n {
        let v = (1..=x + 1)
            .map(|i| &table[m - i] * &weights[i - 1])
            .fold(Rational::zero(), |a, b| a + b);
        table.push(v);
    }
    Ok(table.swap_remove(n))
}

/// Probability that a uniform word of length `n` over `b` symbols has two
/// equal adjacent symbols: `1 - (1 - 1/b)^(n-1)`.
pub fn p_unary_adjacent(n: usize, b: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::DomainError("n must be at least 1".into()));
    }
    if b == 0 {
        return Err(Error::InvalidAlphabet(b));
    }
    let keep = Rational::one() - ratio(1, b as i64);
    Ok(Rational::one() - pow(&keep, n - 1))
}

/// Union-bound estimate `coefficient · s^r · b^(n-r) / b^n` for a run of
/// length `r` over some size-`s` valence, with coefficient `C(b, s)`.
pub fn run_union_estimate(n: usize, b: usize, s: usize, r: usize) -> Result<Rational> {
    run_union_estimate_with(n, b, s, r, binomial(b as u64, s as u64))
}

pub fn run_union_estimate_with(n: usize, b: usize, s: usize, r: usize, coefficient: u64) -> Result<Rational> {
    if s == 0 || s >= b {
        return Err(Error::InvalidArity { size: s, alphabet: b });
    }
    if r > n {
        return Err(Error::DomainError(format!("run length {r} exceeds n = {n}")));
    }
    let s_r = BigInt::from(s).pow(r as u32);
    let rest = BigInt::from(b).pow((n - r) as u32);
    let all = BigInt::from(b).pow(n as u32);
    Ok(BigRational::new(BigInt::from(coefficient) * s_r * rest, all))
}

/// Largest `b^n` for which exact any-valence probabilities are enumerated.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// Exact probability that a uniform word of length `n` over `b` symbols has a
/// run of length at least `r` over some valence of size `s`, by enumeration.
/// `None` when `b^n` exceeds [`EXHAUSTIVE_LIMIT`].
pub fn any_valence_run_probability(n: usize, b: usize, s: usize, r: usize) -> Option<Rational> {
    longest_window_histogram(n, b, s).map(|h| tail_probability(&h, r))
}

/// `hist[L]`: words of length `n` whose longest window with at most `s`
/// distinct symbols has length `L`. `None` beyond [`EXHAUSTIVE_LIMIT`].
pub fn longest_window_histogram(n: usize, b: usize, s: usize) -> Option<Vec<u64>> {
    (b as u64).checked_pow(n as u32).filter(|&t| t <= EXHAUSTIVE_LIMIT)?;
    let mut hist = vec![0u64; n + 1];
    for w in all_words(n, b) {
        hist[longest_window(w.symbols(), b, s)] += 1;
    }
    Some(hist)
}

fn tail_probability(hist: &[u64], r: usize) -> Rational {
    let total: u64 = hist.iter().sum();
    let hits: u64 = hist.iter().skip(r).sum();
    ratio(hits as i64, total as i64)
}

/// Longest window with at most `s` distinct symbols.
fn longest_window(symbols: &[u8], b: usize, s: usize) -> usize {
    let mut counts = vec![0u32; b];
    let (mut distinct, mut lo, mut best) = (0, 0, 0);
    for (hi, &c) in symbols.iter().enumerate() {
        if counts[c as usize] == 0 {
            distinct += 1;
        }
        counts[c as usize] += 1;
        while distinct > s {
            counts[symbols[lo] as usize] -= 1;
            if counts[symbols[lo] as usize] == 0 {
                distinct -= 1;
            }
            lo += 1;
        }
        best = best.max(hi + 1 - lo);
    }
    best
}

/// Which event [`prob_restricted_alphabet`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphabetRestriction {
    /// The word uses at most two of the `a` symbols.
    BinaryAny,
    /// The word uses only two given symbols.
    BinaryFixed,
    /// The word misses at least one symbol.
    AryMinusOne,
}

pub fn prob_restricted_alphabet(n: usize, a: usize, mode: AlphabetRestriction) -> Result<Rational> {
    if a < 2 {
        return Err(Error::InvalidAlphabet(a));
    }
    if n == 0 {
        return Err(Error::DomainError("n must be at least 1".into()));
    }
    let an = BigInt::from(a).pow(n as u32);
    let a_big = BigInt::from(a);
    Ok(match mode {
        AlphabetRestriction::BinaryAny => {
            let pairs = BigInt::from(binomial(a as u64, 2));
            let num = pairs * BigInt::from(2).pow(n as u32) - &a_big * (&a_big - 2);
            BigRational::new(num, an)
        }
        AlphabetRestriction::BinaryFixed => BigRational::new(BigInt::from(2).pow(n as u32), an),
        AlphabetRestriction::AryMinusOne => {
            // inclusion-exclusion over the set of missing symbols
            let num = (1..a).fold(BigInt::zero(), |acc, k| {
                let term = BigInt::from(binomial(a as u64, k as u64)) * BigInt::from(a - k).pow(n as u32);
                if k % 2 == 1 {
                    acc + term
                } else {
                    acc - term
                }
            });
            BigRational::new(num, an)
        }
    })
}

/// Least `n` at which a uniform word over `a` symbols uses at most two of
/// them with probability below `alpha`.
pub fn min_threshold_n(a: usize, alpha: &Rational) -> Result<usize> {
    if alpha.is_negative() || alpha.is_zero() || *alpha >= Rational::one() {
        return Err(Error::InvalidProbability(format_ratio(alpha)));
    }
    if a <= 2 {
        // every binary word uses at most two symbols
        return Err(Error::DomainError(format!("no threshold exists for a = {a}")));
    }
    // the probability tends to zero, so the search ends
    Ok((1..)
        .find(|&n| prob_restricted_alphabet(n, a, AlphabetRestriction::BinaryAny).unwrap() < *alpha)
        .unwrap())
}

/// Fisher's threshold.
pub fn default_alpha() -> Rational {
    ratio(1, 20)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The uniform-random explanation is rejected.
    Reject,
    Retain,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Reject => "reject",
            Verdict::Retain => "retain",
        })
    }
}

fn ser_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

fn ser_opt_ratio<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format_ratio(r)),
        None => s.serialize_none(),
    }
}

/// P-value of "a run of length at least `run_length` over `valence`".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PValueReport {
    pub n: usize,
    pub b: usize,
    pub valence: Valence,
    pub run_length: usize,
    /// Where the run occurs in the scored word, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
    #[serde(serialize_with = "ser_ratio")]
    pub raw_p: Rational,
    /// `C(b, s)`, the number of comparable valences.
    pub adjustment: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub adjusted_p: Rational,
    /// Decimal form of `adjusted_p`.
    pub decimal: String,
    /// Exact probability of such a run over any size-`s` valence, when small
    /// enough to enumerate.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub exact_p: Option<Rational>,
    pub verdict: Verdict,
    #[serde(serialize_with = "ser_ratio")]
    pub threshold: Rational,
}

pub fn run_event_pvalue(n: usize, b: usize, valence: Valence, r: usize) -> Result<PValueReport> {
    run_event_pvalue_at(n, b, valence, r, &default_alpha())
}

pub fn run_event_pvalue_at(n: usize, b: usize, valence: Valence, r: usize, alpha: &Rational) -> Result<PValueReport> {
    let exact = longest_window_histogram(n, b, valence.size()).map(|h| tail_probability(&h, r));
    event_report(n, b, valence, r, alpha, exact)
}

fn event_report(
    n: usize,
    b: usize,
    valence: Valence,
    r: usize,
    alpha: &Rational,
    exact_p: Option<Rational>,
) -> Result<PValueReport> {
    if r == 0 {
        return Err(Error::DomainError("run length must be at least 1".into()));
    }
    let s = valence.size();
    if s == 0 || !valence.is_subset_of(Valence::full(b)) {
        return Err(Error::InvalidArity { size: s, alphabet: b });
    }
    let p = ratio(s as i64, b as i64);
    let raw_p = Rational::one() - longest_run_cdf(n, r - 1, &p)?;
    let adjustment = binomial(b as u64, s as u64);
    let adjusted_p = (&raw_p * BigInt::from(adjustment)).min(Rational::one());
    Ok(PValueReport {
        n,
        b,
        valence,
        run_length: r,
        start: None,
        decimal: decimal(&adjusted_p),
        exact_p,
        verdict: if adjusted_p < *alpha { Verdict::Reject } else { Verdict::Retain },
        raw_p,
        adjustment,
        adjusted_p,
        threshold: alpha.clone(),
    })
}

/// The single-run automaton behind a selected event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingleRunModel {
    pub run: Run,
    pub states: usize,
    /// Least `m` with `s^r <= b^m`.
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    pub word: String,
    pub b: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub alpha: Rational,
    /// Every candidate event, in valence then position order.
    pub events: Vec<PValueReport>,
    /// The event with the smallest adjusted p-value.
    pub best: Option<PValueReport>,
    pub verdict: Verdict,
    /// `None` means the word is explained as an arbitrary `b`-ary string.
    pub model: Option<SingleRunModel>,
}

/// Scores every maximal run over every proper valence and keeps the one with
/// the smallest adjusted p-value. Ties go to the longer run, then the smaller
/// valence, then the earlier position.
pub fn best_model(w: &Word, alpha: &Rational) -> Result<ModelReport> {
    let n = w.len();
    let b = w.alphabet_size();
    if b > 16 {
        return Err(Error::InvalidAlphabet(b));
    }
    let mut events = Vec::new();
    let mut cache = std::collections::HashMap::new();
    let mut histograms = std::collections::HashMap::new();
    for v in every_valence(b).into_iter().filter(|v| v.size() < b) {
        for run in maximal_runs(w, v) {
            let base = match cache.get(&(v.size(), run.len)) {
                Some(r) => PValueReport::clone(r),
                None => {
                    let hist = histograms
                        .entry(v.size())
                        .or_insert_with(|| longest_window_histogram(n, b, v.size()));
                    let exact = hist.as_ref().map(|h| tail_probability(h, run.len));
                    let r = event_report(n, b, v, run.len, alpha, exact)?;
                    cache.insert((v.size(), run.len), r.clone());
                    r
                }
            };
            events.push(PValueReport {
                valence: v,
                start: Some(run.start),
                ..base
            });
        }
    }
    let best = events
        .iter()
        .min_by(|x, y| {
            x.adjusted_p
                .cmp(&y.adjusted_p)
                .then(y.run_length.cmp(&x.run_length))
                .then(valence_order(x.valence, y.valence))
                .then(x.start.cmp(&y.start))
        })
        .cloned();
    let verdict = match &best {
        Some(e) if e.adjusted_p < *alpha => Verdict::Reject,
        _ => Verdict::Retain,
    };
    let model = match (&best, verdict) {
        (Some(e), Verdict::Reject) => {
            let s = BigUint::from(e.valence.size()).pow(e.run_length as u32);
            let bb = BigUint::from(b);
            let m = (0..=n)
                .find(|&m| s <= bb.pow(m as u32))
                .unwrap_or(n);
            Some(SingleRunModel {
                run: Run {
                    start: e.start.unwrap(),
                    len: e.run_length,
                    valence: e.valence,
                },
                states: n + 1 - e.run_length,
                m,
            })
        }
        _ => None,
    };
    Ok(ModelReport {
        word: w.to_text(),
        b,
        alpha: alpha.clone(),
        events,
        best,
        verdict,
        model,
    })
}

/// Approximate `f64` value, for display and plotting only.
pub fn to_f64(r: &Rational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        decimal_digits(r, 17).parse().unwrap_or(f64::NAN)
    }
}
