//! Brute-force reference implementations. They share no code with the
//! searches they check beyond the word and automaton types.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::BigRational;

use crate::nfa::build_chain_with_loops;
use crate::par::Exec;
use crate::runs::composition_sum;
use crate::word::{all_words, Run, Valence, Word};

/// Minima over every binary automaton with `k` states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteTables {
    pub k_max: usize,
    pub n_max: usize,
    /// `min_strings[k-1][n][i]`: fewest strings of length `n` accepted by a
    /// `k`-state automaton accepting word number `i`.
    pub min_strings: Vec<Vec<Vec<u64>>>,
    /// `unique_path[n][i]`: least `k` such that some `k`-state automaton has
    /// exactly one accepting path of length `n`, reading word `i`.
    pub unique_path: Vec<Vec<Option<usize>>>,
}

impl BruteTables {
    pub fn min_strings(&self, k: usize, w: &Word) -> u64 {
        self.min_strings[k - 1][w.len()][index(w)]
    }

    /// Least `k <= k_max` with at most `2^m` strings, if any.
    pub fn h(&self, w: &Word, m: usize) -> Option<usize> {
        (1..=self.k_max).find(|&k| self.min_strings(k, w) <= 1 << m)
    }

    pub fn automatic_complexity(&self, w: &Word) -> Option<usize> {
        self.unique_path[w.len()][index(w)]
    }
}

fn index(w: &Word) -> usize {
    w.symbols().iter().fold(0, |i, &s| i << 1 | s as usize)
}

/// Enumerates every binary automaton with at most `k_max <= 3` states (start
/// state fixed to 0, every nonempty accepting set, every transition relation)
/// and every word of length at most `n_max <= 6`.
pub fn brute_force_tables(k_max: usize, n_max: usize, exec: Exec) -> BruteTables {
    assert!(k_max <= 3 && n_max <= 6, "brute force is limited to k <= 3, n <= 6");
    let mut min_strings = Vec::new();
    let mut unique_path = vec![Vec::new(); n_max + 1];
    for (n, row) in unique_path.iter_mut().enumerate() {
        *row = vec![None; 1 << n];
    }
    for k in 1..=k_max {
        let (strings, unique) = brute_force_k(k, n_max, exec);
        for n in 0..=n_max {
            for (i, &u) in unique[n].iter().enumerate() {
                if u && unique_path[n][i].is_none() {
                    unique_path[n][i] = Some(k);
                }
            }
        }
        min_strings.push(strings);
    }
    BruteTables {
        k_max,
        n_max,
        min_strings,
        unique_path,
    }
}

type Tables = (Vec<Vec<u64>>, Vec<Vec<bool>>);

fn brute_force_k(k: usize, n_max: usize, exec: Exec) -> Tables {
    let edge_bits = 2 * k * k;
    let relations = 1usize << edge_bits;
    let chunk = 1usize << 10.min(edge_bits);
    let parts = exec.map_range(relations.div_ceil(chunk), |c| {
        let mut strings: Vec<Vec<u64>> = (0..=n_max).map(|n| vec![u64::MAX; 1 << n]).collect();
        let mut unique: Vec<Vec<bool>> = (0..=n_max).map(|n| vec![false; 1 << n]).collect();
        for rel in c * chunk..((c + 1) * chunk).min(relations) {
            // edge (p, a, q) is bit (p * 2 + a) * k + q
            let edge = |p: usize, a: usize, q: usize| rel >> ((p * 2 + a) * k + q) & 1 == 1;
            for accepting in 1usize..1 << k {
                // acc[q]: strings of the current length accepted from q,
                // first symbol most significant
                let mut acc: Vec<u64> = (0..k).map(|q| (accepting >> q & 1) as u64).collect();
                let mut paths: Vec<u64> = acc.clone();
                for n in 0..=n_max {
                    if n > 0 {
                        let shift = 1u32 << (n - 1);
                        let mut next = vec![0u64; k];
                        let mut next_paths = vec![0u64; k];
                        for p in 0..k {
                            for a in 0..2 {
                                for q in 0..k {
                                    if edge(p, a, q) {
                                        next[p] |= acc[q] << (a as u32 * shift);
                                        next_paths[p] += paths[q];
                                    }
                                }
                            }
                        }
                        acc = next;
                        paths = next_paths;
                    }
                    let set = acc[0];
                    let count = set.count_ones() as u64;
                    let mut rest = set;
                    while rest != 0 {
                        let i = rest.trailing_zeros() as usize;
                        let slot = &mut strings[n][i];
                        *slot = (*slot).min(count);
                        rest &= rest - 1;
                    }
                    if paths[0] == 1 {
                        unique[n][set.trailing_zeros() as usize] = true;
                    }
                }
            }
        }
        (strings, unique)
    });
    let mut strings: Vec<Vec<u64>> = (0..=n_max).map(|n| vec![u64::MAX; 1 << n]).collect();
    let mut unique: Vec<Vec<bool>> = (0..=n_max).map(|n| vec![false; 1 << n]).collect();
    for (s, u) in parts {
        for n in 0..=n_max {
            for i in 0..1 << n {
                strings[n][i] = strings[n][i].min(s[n][i]);
                unique[n][i] |= u[n][i];
            }
        }
    }
    (strings, unique)
}

/// Exact `Pr(longest run over the first s symbols <= x)` for uniform words of
/// length `n` over `b` symbols, by enumeration.
pub fn longest_run_cdf_brute(n: usize, x: usize, s: usize, b: usize) -> BigRational {
    let valence = Valence::from_symbols(&(0..s as u8).collect::<Vec<_>>());
    let hits = all_words(n, b)
        .filter(|w| crate::word::longest_run(w, valence) <= x)
        .count();
    BigRational::new(hits.into(), BigUint::from(b).pow(n as u32).into())
}

/// `hist[L]`: words of length `n` over `b` symbols whose longest run over
/// `{0, …, s-1}` has length `L`.
pub fn longest_run_histogram(n: usize, s: usize, b: usize) -> Vec<u64> {
    let valence = Valence::from_symbols(&(0..s as u8).collect::<Vec<_>>());
    let mut hist = vec![0u64; n + 1];
    for w in all_words(n, b) {
        hist[crate::word::longest_run(&w, valence)] += 1;
    }
    hist
}

/// Every placement of non-adjacent blocks in which each block is
/// right-maximal over its loop valence (the next symbol is outside it).
pub fn unambiguous_selections(w: &Word, mut visit: impl FnMut(&[(Run, Valence)])) {
    placements(w, |sel| {
        let s = w.symbols();
        if sel
            .iter()
            .all(|(r, v)| r.end() == s.len() || !v.contains(s[r.end()]))
        {
            visit(sel);
        }
    });
}

/// Fewest accepting paths and strings among chain automata with `q` states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMin {
    pub paths: BigUint,
    pub strings: Option<BigUint>,
}

type Selection = [(Run, Valence)];

/// Every placement of pairwise non-adjacent blocks, each with every loop
/// valence containing its symbols.
fn placements(w: &Word, mut visit: impl FnMut(&[(Run, Valence)])) {
    let full = Valence::full(w.alphabet_size()).mask();
    fn rec(
        w: &Word,
        p: usize,
        full: u64,
        cur: &mut Vec<(Run, Valence)>,
        visit: &mut dyn FnMut(&Selection),
    ) {
        visit(cur);
        for i in p..w.len() {
            for j in i + 1..=w.len() {
                let used = w.symbol_set(i, j - i).mask();
                // every superset of the used symbols
                let free = full & !used;
                let mut extra = free;
                loop {
                    let v = Valence::from_mask(used | extra);
                    let run = Run {
                        start: i,
                        len: j - i,
                        valence: v,
                    };
                    cur.push((run, v));
                    rec(w, j + 1, full, cur, visit);
                    cur.pop();
                    if extra == 0 {
                        break;
                    }
                    extra = (extra - 1) & free;
                }
            }
        }
    }
    rec(w, 0, full, &mut Vec::new(), &mut visit);
}

/// Per state count `q = 1..=n+1`, the fewest paths over all placements.
pub fn chain_minima(w: &Word) -> Vec<Option<ChainMin>> {
    chain_minima_impl(w, false)
}

/// As [`chain_minima`], additionally counting accepted strings of every
/// placement's automaton. Slow; for short words.
pub fn chain_minima_with_strings(w: &Word) -> Vec<Option<ChainMin>> {
    chain_minima_impl(w, true)
}

fn chain_minima_impl(w: &Word, strings: bool) -> Vec<Option<ChainMin>> {
    let n = w.len();
    let mut seen = BTreeSet::new();
    let mut best: Vec<Option<ChainMin>> = vec![None; n + 1];
    placements(w, |sel| {
        let x: usize = sel.iter().map(|(r, _)| r.len).sum();
        let q = n + 1 - x;
        let slot = &mut best[q - 1];
        let mut sizes: Vec<usize> = sel.iter().map(|(_, v)| v.size()).collect();
        sizes.sort_unstable();
        let string_count = strings.then(|| {
            build_chain_with_loops(w, sel)
                .expect("placements are valid")
                .count_accepted_strings(n)
        });
        let fresh = seen.insert((x, sizes.clone()));
        if !fresh && string_count.is_none() {
            return;
        }
        let paths = composition_sum(x, &sizes);
        match slot {
            None => {
                *slot = Some(ChainMin {
                    paths,
                    strings: string_count,
                })
            }
            Some(cur) => {
                if paths < cur.paths {
                    cur.paths = paths;
                }
                if let (Some(s), Some(c)) = (string_count, cur.strings.as_mut()) {
                    if s < *c {
                        *c = s;
                    }
                }
            }
        }
    });
    best
}
