//! Structure functions for chain automata with self-loops.
//!
//! A chain automaton reads `w` left to right along forward edges, except that
//! some states carry self-loops on a loop valence and absorb a block of `w`.
//! Loop states are distinct chain states, so two blocks are always separated
//! by at least one forward edge. With `X` symbols absorbed the automaton has
//! `n + 1 - X` states, and its accepting paths of length `n` number
//! `Σ_{y_1+…+y_ℓ = X} Π |v_i|^{y_i}`.
//!
//! When every block is right-maximal over its valence (the next symbol is not
//! in it, or the word ends), each accepted string has exactly one path, so the
//! path sum is the string count.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nfa::{build_chain_with_loops, Nfa};
use crate::structure::{SfClass, StructureFunction};
use crate::word::{Run, Valence, Word};

/// Blocks absorbed by self-loops, in position order. Each run's `valence` is
/// the loop valence at its state.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RunSelection {
    pub runs: Vec<Run>,
}

impl RunSelection {
    pub fn new(runs: Vec<Run>) -> Self {
        Self { runs }
    }

    /// Number of loop states `ℓ`.
    pub fn loops(&self) -> usize {
        self.runs.len()
    }

    /// `X = Σ x_i`.
    pub fn total_loop_length(&self) -> usize {
        self.runs.iter().map(|r| r.len).sum()
    }

    pub fn valence_sizes(&self) -> Vec<usize> {
        self.runs.iter().map(|r| r.valence.size()).collect()
    }

    /// States of the chain automaton for a word of length `n`.
    pub fn states(&self, n: usize) -> usize {
        n + 1 - self.total_loop_length()
    }

    pub fn automaton(&self, w: &Word) -> Result<Nfa> {
        let pairs: Vec<(Run, Valence)> = self.runs.iter().map(|r| (*r, r.valence)).collect();
        build_chain_with_loops(w, &pairs)
    }
}

/// `Σ_{y_1+…+y_ℓ = total} Π s_i^{y_i}`, by convolution one loop at a time.
pub fn composition_sum(total: usize, sizes: &[usize]) -> BigUint {
    if sizes.is_empty() {
        return if total == 0 { BigUint::one() } else { BigUint::default() };
    }
    let mut f = vec![BigUint::default(); total + 1];
    f[0] = BigUint::one();
    for &s in sizes {
        // g[t] = Σ_y f[t-y] s^y, i.e. g[t] = f[t] + s·g[t-1]
        for t in 1..=total {
            let prev = &f[t - 1] * s;
            f[t] += prev;
        }
    }
    f.swap_remove(total)
}

/// Accepting paths of length `n` through the chain automaton of `sel`.
pub fn selection_count(sel: &RunSelection, n: usize, alphabet_size: usize) -> Result<BigUint> {
    let x = sel.total_loop_length();
    if x > n {
        return Err(Error::InvalidSelection(format!(
            "loops absorb {x} symbols of a word of length {n}"
        )));
    }
    let full = Valence::full(alphabet_size);
    if let Some(r) = sel.runs.iter().find(|r| !r.valence.is_subset_of(full) || r.valence.size() == 0) {
        return Err(Error::InvalidSelection(format!(
            "loop valence {} does not fit an alphabet of size {alphabet_size}",
            r.valence
        )));
    }
    Ok(composition_sum(x, &sel.valence_sizes()))
}

/// Blocks `[p, j)` over their own symbol set that are right-maximal.
fn blocks_from(w: &Word, p: usize) -> Vec<(usize, Valence)> {
    let s = w.symbols();
    let mut out = Vec::new();
    let mut mask = 0u64;
    for j in p + 1..=s.len() {
        mask |= 1 << s[j - 1];
        if j == s.len() || mask >> s[j] & 1 == 0 {
            out.push((j, Valence::from_mask(mask)));
        }
    }
    out
}

#[derive(Debug, Clone)]
struct Best {
    capacity: usize,
    runs: Vec<Run>,
}

fn offer(map: &mut BTreeMap<Vec<u8>, Best>, key: Vec<u8>, cand: Best) {
    let starts = |b: &Best| b.runs.iter().map(|r| r.start).collect::<Vec<_>>();
    match map.get(&key) {
        Some(cur)
            if cur.capacity > cand.capacity
                || (cur.capacity == cand.capacity && starts(cur) <= starts(&cand)) => {}
        _ => {
            map.insert(key, cand);
        }
    }
}

/// For each multiset of loop-valence sizes, the right-maximal selection that
/// absorbs the most symbols.
fn best_per_size_multiset(w: &Word, max_loops: usize) -> BTreeMap<Vec<u8>, Best> {
    let n = w.len();
    let mut layers: Vec<BTreeMap<Vec<u8>, Best>> = vec![BTreeMap::new(); n + 1];
    layers[0].insert(
        Vec::new(),
        Best {
            capacity: 0,
            runs: Vec::new(),
        },
    );
    let mut done = BTreeMap::new();
    for p in 0..=n {
        let layer = std::mem::take(&mut layers[p]);
        for (key, best) in layer {
            if p == n {
                offer(&mut done, key, best);
                continue;
            }
            if key.len() < max_loops {
                for (j, valence) in blocks_from(w, p) {
                    let mut k = key.clone();
                    let size = valence.size() as u8;
                    let at = k.partition_point(|&x| x <= size);
                    k.insert(at, size);
                    let mut runs = best.runs.clone();
                    runs.push(Run {
                        start: p,
                        len: j - p,
                        valence,
                    });
                    let cand = Best {
                        capacity: best.capacity + j - p,
                        runs,
                    };
                    if j == n {
                        offer(&mut done, k, cand);
                    } else {
                        offer(&mut layers[j + 1], k, cand);
                    }
                }
            }
            offer(&mut layers[p + 1], key, best);
        }
    }
    done
}

/// Shortens runs from the left, rightmost first, until exactly `total`
/// symbols are absorbed. Right-maximality is preserved.
fn trim(runs: &[Run], total: usize) -> Vec<Run> {
    let mut runs = runs.to_vec();
    let mut excess = runs.iter().map(|r| r.len).sum::<usize>() - total;
    for r in runs.iter_mut().rev() {
        let cut = excess.min(r.len - 1);
        r.start += cut;
        r.len -= cut;
        excess -= cut;
    }
    debug_assert_eq!(excess, 0);
    runs
}

/// Fewest accepted strings, and a witness, for each state count `q = 1..=n+1`
/// among chain automata with at most `max_loops` loop states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainTable {
    pub word_len: usize,
    pub alphabet_size: usize,
    /// Index `q - 1`; `None` when no chain automaton has exactly `q` states.
    pub per_states: Vec<Option<ChainBest>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainBest {
    pub states: usize,
    #[serde(serialize_with = "crate::as_display")]
    pub count: BigUint,
    pub selection: RunSelection,
}

pub fn chain_table(w: &Word, max_loops: usize) -> ChainTable {
    let n = w.len();
    let done = best_per_size_multiset(w, max_loops);
    let per_states = (1..=n + 1)
        .map(|q| {
            let total = n + 1 - q;
            if total == 0 {
                return Some(ChainBest {
                    states: q,
                    count: BigUint::one(),
                    selection: RunSelection::default(),
                });
            }
            done.iter()
                .filter(|(key, best)| !key.is_empty() && key.len() <= total && total <= best.capacity)
                .map(|(key, best)| {
                    let sizes: Vec<usize> = key.iter().map(|&s| s as usize).collect();
                    let runs = trim(&best.runs, total);
                    let starts: Vec<usize> = runs.iter().map(|r| r.start).collect();
                    (composition_sum(total, &sizes), key.len(), starts, runs)
                })
                .min_by(|a, b| (&a.0, a.1, &a.2).cmp(&(&b.0, b.1, &b.2)))
                .map(|(count, _, _, runs)| ChainBest {
                    states: q,
                    count,
                    selection: RunSelection::new(runs),
                })
        })
        .collect();
    ChainTable {
        word_len: n,
        alphabet_size: w.alphabet_size(),
        per_states,
    }
}

impl ChainTable {
    /// Least `q' <= q` whose best count fits `b^m`, with its witness.
    pub fn decide(&self, m: usize, q: usize) -> Option<&ChainBest> {
        let budget = BigUint::from(self.alphabet_size).pow(m as u32);
        self.per_states
            .iter()
            .take(q)
            .flatten()
            .find(|c| c.count <= budget)
    }

    pub fn structure_function(&self, class: SfClass) -> StructureFunction {
        StructureFunction {
            class,
            values: (0..=self.word_len)
                .map(|m| self.decide(m, self.word_len + 1).expect("the bare chain fits").states)
                .collect(),
        }
    }

    /// Witness for each `m`.
    pub fn witnesses(&self) -> Vec<RunSelection> {
        (0..=self.word_len)
            .map(|m| self.decide(m, self.word_len + 1).unwrap().selection.clone())
            .collect()
    }
}

/// Whether some chain automaton with at most `q` states accepts `w` and at
/// most `b^m` strings of length `n`; returns a witness selection if so.
pub fn multi_run_decide(w: &Word, m: usize, q: usize) -> Option<RunSelection> {
    chain_table(w, usize::MAX)
        .decide(m, q)
        .map(|c| c.selection.clone())
}

pub fn multi_run_sf(w: &Word) -> StructureFunction {
    chain_table(w, usize::MAX).structure_function(SfClass::MultiRun)
}

/// Multi-run structure function with at most `max_loops` loop states.
pub fn multi_run_sf_with(w: &Word, max_loops: usize) -> StructureFunction {
    chain_table(w, max_loops).structure_function(SfClass::MultiRun)
}

/// Longest window with at most `s` distinct symbols, and its first start,
/// for each `s = 1..=b`.
fn longest_windows(w: &Word) -> Vec<(usize, usize)> {
    let s = w.symbols();
    let b = w.alphabet_size();
    (1..=b)
        .map(|limit| {
            let mut counts = vec![0usize; b];
            let (mut distinct, mut lo, mut best) = (0, 0, (0, 0));
            for hi in 0..s.len() {
                if counts[s[hi] as usize] == 0 {
                    distinct += 1;
                }
                counts[s[hi] as usize] += 1;
                while distinct > limit {
                    counts[s[lo] as usize] -= 1;
                    if counts[s[lo] as usize] == 0 {
                        distinct -= 1;
                    }
                    lo += 1;
                }
                if hi + 1 - lo > best.0 {
                    best = (hi + 1 - lo, lo);
                }
            }
            best
        })
        .collect()
}

/// Single-run structure function with a witness per `m`: one loop state of
/// valence size `s` absorbing `r` symbols costs `n + 1 - r` states and
/// accepts `s^r` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingleRunAnalysis {
    pub sf: StructureFunction,
    pub witnesses: Vec<RunSelection>,
}

pub fn single_run_analysis(w: &Word) -> SingleRunAnalysis {
    let n = w.len();
    let b = w.alphabet_size();
    let windows = longest_windows(w);
    // absorbed[s-1][m]: longest run over a size-s valence with s^r <= b^m
    let absorbed: Vec<Vec<usize>> = windows
        .iter()
        .enumerate()
        .map(|(i, &(longest, _))| {
            let s = BigUint::from(i + 1);
            let base = BigUint::from(b);
            let (mut r, mut sp, mut bp) = (0usize, BigUint::one(), BigUint::one());
            (0..=n)
                .map(|m| {
                    if m > 0 {
                        bp *= &base;
                    }
                    while r < longest && &sp * &s <= bp {
                        r += 1;
                        sp *= &s;
                    }
                    r
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(n + 1);
    let mut witnesses = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let (r, size_index) = absorbed
            .iter()
            .enumerate()
            .map(|(i, row)| (row[m], i))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
            .unwrap_or((0, 0));
        values.push(n + 1 - r);
        let runs = if r == 0 {
            Vec::new()
        } else {
            let start = windows[size_index].1;
            vec![Run {
                start,
                len: r,
                valence: w.symbol_set(start, r),
            }]
        };
        witnesses.push(RunSelection::new(runs));
    }
    SingleRunAnalysis {
        sf: StructureFunction {
            class: SfClass::SingleRun,
            values,
        },
        witnesses,
    }
}

pub fn single_run_sf(w: &Word) -> StructureFunction {
    single_run_analysis(w).sf
}
