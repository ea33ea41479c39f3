//! Words over small alphabets, valences (sub-alphabets) and maximal runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported alphabet; valences are stored as 64-bit masks.
pub const MAX_ALPHABET: usize = 64;

/// A finite word over the alphabet `{0, …, b-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<u8>,
    alphabet_size: usize,
}

impl Word {
    pub fn new(symbols: Vec<u8>, alphabet_size: usize) -> Result<Self> {
        check_alphabet(alphabet_size)?;
        if let Some(&s) = symbols.iter().find(|&&s| s as usize >= alphabet_size) {
            return Err(Error::InvalidSymbol {
                symbol: s as u64,
                alphabet: alphabet_size,
            });
        }
        Ok(Self {
            symbols,
            alphabet_size,
        })
    }

    /// The word whose base-`b` digits spell `index`, most significant first.
    pub fn from_index(mut index: u64, len: usize, alphabet_size: usize) -> Self {
        let b = alphabet_size as u64;
        let mut symbols = vec![0u8; len];
        for slot in symbols.iter_mut().rev() {
            *slot = (index % b) as u8;
            index /= b;
        }
        Self {
            symbols,
            alphabet_size,
        }
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// True when at most one distinct symbol occurs.
    pub fn is_unary(&self) -> bool {
        self.symbols.windows(2).all(|p| p[0] == p[1])
    }

    /// Returns `self` followed by `suffix` (same alphabet).
    pub fn concat(&self, suffix: &[u8]) -> Result<Self> {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(suffix);
        Self::new(symbols, self.alphabet_size)
    }

    /// Applies a permutation of the alphabet.
    pub fn relabel(&self, perm: &[u8]) -> Self {
        Self {
            symbols: self.symbols.iter().map(|&s| perm[s as usize]).collect(),
            alphabet_size: self.alphabet_size,
        }
    }

    pub fn reversed(&self) -> Self {
        let mut symbols = self.symbols.clone();
        symbols.reverse();
        Self {
            symbols,
            alphabet_size: self.alphabet_size,
        }
    }

    /// Set of symbols that occur in `self[range]`.
    pub fn symbol_set(&self, start: usize, len: usize) -> Valence {
        Valence(
            self.symbols[start..start + len]
                .iter()
                .fold(0u64, |m, &s| m | 1 << s),
        )
    }

    /// The word rendered as digits when `b <= 10`, comma-separated otherwise.
    pub fn to_text(&self) -> String {
        if self.alphabet_size <= 10 {
            self.symbols.iter().map(|&s| (b'0' + s) as char).collect()
        } else {
            self.symbols
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn check_alphabet(b: usize) -> Result<()> {
    if b == 0 || b > MAX_ALPHABET {
        Err(Error::InvalidAlphabet(b))
    } else {
        Ok(())
    }
}

/// Parses a digit string (`"0100"`) or a comma-separated list (`"0,1,12"`).
///
/// Without an explicit alphabet size, `b` is one more than the largest symbol.
pub fn parse_word(text: &str, alphabet_size: Option<usize>) -> Result<Word> {
    if let Some(b) = alphabet_size {
        check_alphabet(b)?;
    }
    let text = text.trim();
    let raw: Vec<u64> = if text.contains(',') {
        text.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::MalformedWord(format!("{t:?} is not a symbol")))
            })
            .collect::<Result<_>>()?
    } else {
        text.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(u64::from)
                    .ok_or_else(|| Error::MalformedWord(format!("{c:?} is not a digit")))
            })
            .collect::<Result<_>>()?
    };
    let b = match alphabet_size {
        Some(b) => b,
        None => raw.iter().max().map_or(1, |&m| m as usize + 1),
    };
    check_alphabet(b)?;
    if let Some(&s) = raw.iter().find(|&&s| s >= b as u64) {
        return Err(Error::InvalidSymbol {
            symbol: s,
            alphabet: b,
        });
    }
    Word::new(raw.into_iter().map(|s| s as u8).collect(), b)
}

/// A nonempty sub-alphabet, stored as a bit mask over symbols.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<u8>", try_from = "Vec<u8>")]
pub struct Valence(u64);

impl Valence {
    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    pub fn from_symbols(symbols: &[u8]) -> Self {
        Self(symbols.iter().fold(0, |m, &s| m | 1 << s))
    }

    /// `{0, …, b-1}`.
    pub fn full(alphabet_size: usize) -> Self {
        if alphabet_size >= 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << alphabet_size) - 1)
        }
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, symbol: u8) -> bool {
        symbol < 64 && self.0 >> symbol & 1 == 1
    }

    pub fn is_subset_of(self, other: Valence) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn members(self) -> impl Iterator<Item = u8> {
        (0..64u8).filter(move |&s| self.contains(s))
    }

    /// Lexicographic key over the sorted member list.
    fn lex_key(self) -> Vec<u8> {
        self.members().collect()
    }
}

impl fmt::Debug for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl From<Valence> for Vec<u8> {
    fn from(v: Valence) -> Self {
        v.members().collect()
    }
}

impl TryFrom<Vec<u8>> for Valence {
    type Error = String;

    fn try_from(symbols: Vec<u8>) -> std::result::Result<Self, String> {
        if symbols.is_empty() || symbols.iter().any(|&s| s >= 64) {
            return Err("valence must be a nonempty set of symbols below 64".into());
        }
        Ok(Self::from_symbols(&symbols))
    }
}

/// All valences of size `size` over `{0, …, b-1}`, in lexicographic order.
pub fn all_valences(alphabet_size: usize, size: usize) -> Result<Vec<Valence>> {
    check_alphabet(alphabet_size)?;
    if size == 0 || size > alphabet_size {
        return Err(Error::InvalidArity {
            size,
            alphabet: alphabet_size,
        });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(b: u8, size: usize, next: u8, current: &mut Vec<u8>, out: &mut Vec<Valence>) {
        if current.len() == size {
            out.push(Valence::from_symbols(current));
            return;
        }
        for s in next..b {
            if (b - s) as usize + current.len() < size {
                break;
            }
            current.push(s);
            rec(b, size, s + 1, current, out);
            current.pop();
        }
    }
    rec(alphabet_size as u8, size, 0, &mut current, &mut out);
    Ok(out)
}

/// Every nonempty valence, ordered by size and then lexicographically.
pub fn every_valence(alphabet_size: usize) -> Vec<Valence> {
    (1..=alphabet_size)
        .flat_map(|s| all_valences(alphabet_size, s).unwrap_or_default())
        .collect()
}

/// Orders valences by size, then by sorted member list.
pub fn valence_order(a: Valence, b: Valence) -> std::cmp::Ordering {
    a.size()
        .cmp(&b.size())
        .then_with(|| a.lex_key().cmp(&b.lex_key()))
}

/// A contiguous block `w[start .. start + len]` whose symbols lie in `valence`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Run {
    pub start: usize,
    #[serde(rename = "length")]
    pub len: usize,
    pub valence: Valence,
}

impl Run {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// All maximal runs of `w` over `valence`, sorted by start.
pub fn maximal_runs(w: &Word, valence: Valence) -> Vec<Run> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &s) in w.symbols().iter().enumerate() {
        match (valence.contains(s), start) {
            (true, None) => start = Some(i),
            (false, Some(st)) => {
                runs.push(Run {
                    start: st,
                    len: i - st,
                    valence,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(st) = start {
        runs.push(Run {
            start: st,
            len: w.len() - st,
            valence,
        });
    }
    runs
}

/// Length of the longest run over `valence` (0 if none).
pub fn longest_run(w: &Word, valence: Valence) -> usize {
    maximal_runs(w, valence)
        .iter()
        .map(|r| r.len)
        .max()
        .unwrap_or(0)
}

/// Iterates over all `b^n` words of length `n`, in lexicographic order.
pub fn all_words(len: usize, alphabet_size: usize) -> impl Iterator<Item = Word> {
    let total = (alphabet_size as u64).pow(len as u32);
    (0..total).map(move |i| Word::from_index(i, len, alphabet_size))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_digit_strings() {
        let w = parse_word("0100", Some(2)).unwrap();
        assert_eq!(w.symbols(), &[0, 1, 0, 0]);
        assert_eq!(w.alphabet_size(), 2);

        let w = parse_word("1010020210", Some(3)).unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(w.alphabet_size(), 3);
    }

    #[test]
    fn infers_alphabet_from_max_symbol() {
        assert_eq!(parse_word("0120", None).unwrap().alphabet_size(), 3);
        assert_eq!(parse_word("", None).unwrap().len(), 0);
    }

    #[test]
    fn parses_comma_lists() {
        let w = parse_word("0, 11,3", Some(12)).unwrap();
        assert_eq!(w.symbols(), &[0, 11, 3]);
        assert_eq!(w.to_text(), "0,11,3");
    }

    #[test]
    fn rejects_out_of_range_symbols() {
        assert!(matches!(
            parse_word("013", Some(2)),
            Err(Error::InvalidSymbol { symbol: 3, .. })
        ));
        assert_eq!(parse_word("0", Some(0)), Err(Error::InvalidAlphabet(0)));
        assert!(matches!(
            parse_word("0a", None),
            Err(Error::MalformedWord(_))
        ));
    }

    #[test]
    fn runs_of_worked_example() {
        let w = parse_word("1010020210", Some(3)).unwrap();
        let zeros = maximal_runs(&w, Valence::from_symbols(&[0]));
        assert_eq!(zeros.iter().map(|r| r.len).max(), Some(2));
        let binary = maximal_runs(&w, Valence::from_symbols(&[0, 1]));
        assert_eq!(binary[0].start, 0);
        assert_eq!(binary[0].len, 5);
    }

    #[test]
    fn unary_word_is_one_run() {
        let w = parse_word("0000", Some(2)).unwrap();
        let runs = maximal_runs(&w, Valence::from_symbols(&[0]));
        assert_eq!(runs.len(), 1);
        assert_eq!((runs[0].start, runs[0].len), (0, 4));
    }

    #[test]
    fn valence_listing() {
        let fmt = |v: Vec<Valence>| v.iter().map(|v| v.to_string()).collect::<Vec<_>>();
        assert_eq!(
            fmt(all_valences(3, 2).unwrap()),
            ["{0,1}", "{0,2}", "{1,2}"]
        );
        assert_eq!(fmt(all_valences(3, 1).unwrap()), ["{0}", "{1}", "{2}"]);
        assert_eq!(fmt(all_valences(2, 2).unwrap()), ["{0,1}"]);
        assert_eq!(all_valences(4, 2).unwrap().len(), 6);
        assert!(matches!(
            all_valences(3, 4),
            Err(Error::InvalidArity { .. })
        ));
        assert!(matches!(
            all_valences(3, 0),
            Err(Error::InvalidArity { .. })
        ));
    }

    #[test]
    fn full_valence_covers_word() {
        for w in all_words(5, 2) {
            let runs = maximal_runs(&w, Valence::full(2));
            assert_eq!(runs.len(), 1);
            assert_eq!(runs[0].len, 5);
        }
    }

    #[test]
    fn valence_serde_roundtrip() {
        let v = Valence::from_symbols(&[0, 2]);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "[0,2]");
        let back: Valence = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
