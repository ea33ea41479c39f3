//! Exact structure functions over the class of all finite automata.
//!
//! An automaton that accepts `w` can be cut down to the transitions used by a
//! single accepting run on `w`, with the run's final state as the only
//! accepting state, and this never increases the number of accepted strings
//! of length `n`. Such a pruned automaton is determined by its state sequence
//! `q_0 … q_n`. Naming states in order of first visit makes the sequence
//! canonical (a restricted growth string), so the search enumerates those
//! sequences and nothing else.
//!
//! One pass per word records, for every number of distinct states `d`, the
//! smallest accepted-string count of any path-induced automaton. The whole
//! structure function follows from that table.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nfa::Nfa;
use crate::par::Exec;
use crate::structure::{SfClass, StructureFunction};
use crate::word::{all_words, Word};

/// Largest word length the exact search accepts, per alphabet size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchLimits {
    pub binary: usize,
    pub ternary: usize,
    pub other: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            binary: 10,
            ternary: 8,
            other: 6,
        }
    }
}

impl SearchLimits {
    pub fn limit_for(&self, alphabet_size: usize) -> usize {
        match alphabet_size {
            0..=2 => self.binary,
            3 => self.ternary,
            _ => self.other,
        }
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        let limit = self.limit_for(w.alphabet_size()).min(count_bound(w.alphabet_size()));
        if w.len() > limit {
            return Err(Error::SearchLimitExceeded {
                len: w.len(),
                limit,
                alphabet: w.alphabet_size(),
            });
        }
        Ok(())
    }
}

/// Longest length whose `b^n` string count fits the search's counters.
fn count_bound(alphabet_size: usize) -> usize {
    if alphabet_size <= 1 {
        return usize::MAX;
    }
    let mut n = 0;
    let mut p: u128 = 1;
    while let Some(next) = p.checked_mul(alphabet_size as u128) {
        p = next;
        n += 1;
    }
    n
}

fn check_countable(w: &Word) -> Result<()> {
    let limit = count_bound(w.alphabet_size());
    if w.len() > limit {
        return Err(Error::SearchLimitExceeded {
            len: w.len(),
            limit,
            alphabet: w.alphabet_size(),
        });
    }
    Ok(())
}

/// Knobs for the exhaustive searches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExactConfig {
    pub limits: SearchLimits,
    pub exec: Exec,
}

/// `⌊n/2⌋ + 1`, the upper bound on automatic complexity for length `n`.
pub fn complexity_bound(n: usize) -> usize {
    n / 2 + 1
}

fn power(b: usize, e: usize) -> u128 {
    (b as u128).saturating_pow(e as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Objective {
    /// Fewest accepted strings of length `n`, per distinct-state count.
    MinStrings,
    /// Any automaton whose only accepting path of length `n` reads `w`.
    UniquePath,
}

/// `(count, canonical sequence)`; ordering picks the smaller count, then the
/// lexicographically first sequence.
type Candidate = (u128, Vec<u8>);

/// Best candidate per number of distinct states (index `d - 1`).
type PerDistinct = Vec<Option<Candidate>>;

fn merge_into(acc: &mut PerDistinct, other: PerDistinct) {
    for (slot, cand) in acc.iter_mut().zip(other) {
        if let Some(c) = cand {
            if slot.as_ref().is_none_or(|s| c < *s) {
                *slot = Some(c);
            }
        }
    }
}

const PREFIX_DEPTH: usize = 6;

fn canonical_prefixes(len: usize, k_max: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8];
    fn rec(len: usize, k_max: usize, used: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for q in 0..=used.min(k_max - 1) {
            cur.push(q as u8);
            rec(len, k_max, used.max(q + 1), cur, out);
            cur.pop();
        }
    }
    rec(len, k_max, 1, &mut cur, &mut out);
    out
}

fn search(word: &Word, k_max: usize, objective: Objective, exec: Exec) -> PerDistinct {
    let n = word.len();
    let k_max = k_max.clamp(1, n + 1);
    assert!(k_max <= 32, "state sets are 32-bit masks");
    let prefixes = canonical_prefixes((n + 1).min(PREFIX_DEPTH), k_max);
    let parts = exec.map(prefixes, |prefix| {
        let mut walker = Walker::new(word, k_max, objective);
        walker.run(&prefix);
        walker.best
    });
    let mut best = vec![None; k_max];
    for part in parts {
        merge_into(&mut best, part);
    }
    if objective == Objective::UniquePath {
        // per-task pruning can leave larger witnesses behind; keep the smallest
        if let Some(d) = best.iter().position(Option::is_some) {
            best.iter_mut().skip(d + 1).for_each(|slot| *slot = None);
        }
    }
    best
}

struct Walker<'a> {
    word: &'a [u8],
    b: usize,
    k: usize,
    objective: Objective,
    seq: Vec<u8>,
    /// `succ[a * k + p]` is the mask of targets of `p` on symbol `a`.
    succ: Vec<u32>,
    best: PerDistinct,
    memo: Option<HashMap<u128, u128>>,
    unique_bound: usize,
    layer: Vec<(u32, u128)>,
    next: Vec<(u32, u128)>,
}

impl<'a> Walker<'a> {
    fn new(word: &'a Word, k: usize, objective: Objective) -> Self {
        let b = word.alphabet_size();
        let memo_fits = b * k * k + 5 <= 128;
        Self {
            word: word.symbols(),
            b,
            k,
            objective,
            seq: vec![0; word.len() + 1],
            succ: vec![0; b * k],
            best: vec![None; k],
            memo: (memo_fits && objective == Objective::MinStrings).then(HashMap::new),
            unique_bound: usize::MAX,
            layer: Vec::new(),
            next: Vec::new(),
        }
    }

    fn run(&mut self, prefix: &[u8]) {
        let mut used = 1;
        for (i, &q) in prefix.iter().enumerate().skip(1) {
            let p = self.seq[i - 1] as usize;
            self.succ[self.word[i - 1] as usize * self.k + p] |= 1 << q;
            self.seq[i] = q;
            used = used.max(q as usize + 1);
        }
        self.dfs(prefix.len() - 1, used);
    }

    fn dfs(&mut self, i: usize, used: usize) {
        if i == self.word.len() {
            self.evaluate(used);
            return;
        }
        let slot = self.word[i] as usize * self.k + self.seq[i] as usize;
        for q in 0..=used.min(self.k - 1) {
            let now_used = used.max(q + 1);
            if now_used >= self.unique_bound {
                continue;
            }
            let bit = 1u32 << q;
            let fresh = self.succ[slot] & bit == 0;
            self.succ[slot] |= bit;
            self.seq[i + 1] = q as u8;
            self.dfs(i + 1, now_used);
            if fresh {
                self.succ[slot] &= !bit;
            }
        }
    }

    fn evaluate(&mut self, used: usize) {
        let last = *self.seq.last().unwrap();
        match self.objective {
            Objective::MinStrings => {
                let count = self.string_count(last);
                let slot = &mut self.best[used - 1];
                if slot.as_ref().is_none_or(|(c, _)| count < *c) {
                    *slot = Some((count, self.seq.clone()));
                }
            }
            Objective::UniquePath => {
                if self.has_unique_path(last) {
                    self.best[used - 1] = Some((1, self.seq.clone()));
                    self.unique_bound = used;
                }
            }
        }
    }

    fn memo_key(&self, last: u8) -> u128 {
        self.succ
            .iter()
            .fold(0u128, |key, &mask| key << self.k | mask as u128)
            << 5
            | last as u128
    }

    /// Strings of length `n` accepted from state 0 into `last`, by subset DP.
    fn string_count(&mut self, last: u8) -> u128 {
        let key = self.memo.as_ref().map(|_| self.memo_key(last));
        if let (Some(memo), Some(key)) = (&self.memo, key) {
            if let Some(&c) = memo.get(&key) {
                return c;
            }
        }
        let (b, k) = (self.b, self.k);
        self.layer.clear();
        self.layer.push((1, 1));
        for _ in 0..self.word.len() {
            self.next.clear();
            for &(mask, count) in &self.layer {
                for a in 0..b {
                    let row = &self.succ[a * k..a * k + k];
                    let mut rest = mask;
                    let mut target = 0u32;
                    while rest != 0 {
                        target |= row[rest.trailing_zeros() as usize];
                        rest &= rest - 1;
                    }
                    if target != 0 {
                        self.next.push((target, count));
                    }
                }
            }
            self.next.sort_unstable_by_key(|e| e.0);
            self.layer.clear();
            for &(mask, count) in &self.next {
                match self.layer.last_mut() {
                    Some(top) if top.0 == mask => top.1 += count,
                    _ => self.layer.push((mask, count)),
                }
            }
        }
        let total = self
            .layer
            .iter()
            .filter(|(mask, _)| mask >> last & 1 == 1)
            .map(|&(_, c)| c)
            .sum();
        if let (Some(memo), Some(key)) = (&mut self.memo, key) {
            memo.insert(key, total);
        }
        total
    }

    /// Whether exactly one path of length `n` runs from state 0 to `last`.
    fn has_unique_path(&self, last: u8) -> bool {
        let (b, k) = (self.b, self.k);
        let mut counts = vec![0u64; k];
        counts[0] = 1;
        for _ in 0..self.word.len() {
            let mut next = vec![0u64; k];
            for (p, &c) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
                for a in 0..b {
                    let mut rest = self.succ[a * k + p];
                    while rest != 0 {
                        let q = rest.trailing_zeros() as usize;
                        next[q] = next[q].saturating_add(c);
                        rest &= rest - 1;
                    }
                }
            }
            counts = next;
        }
        counts[last as usize] == 1
    }
}

/// The automaton induced by a state sequence: exactly the traversed edges,
/// start `q_0`, accepting `{q_n}`.
pub fn induced_nfa(word: &Word, sequence: &[u8]) -> Result<Nfa> {
    if sequence.len() != word.len() + 1 {
        return Err(Error::MalformedNfa(format!(
            "a path over a word of length {} has {} states, not {}",
            word.len(),
            word.len() + 1,
            sequence.len()
        )));
    }
    let states = *sequence.iter().max().unwrap() as usize + 1;
    let transitions = word
        .symbols()
        .iter()
        .enumerate()
        .map(|(i, &a)| (sequence[i] as usize, a, sequence[i + 1] as usize));
    Nfa::new(
        states,
        word.alphabet_size(),
        transitions,
        sequence[0] as usize,
        [*sequence.last().unwrap() as usize],
    )
}

/// Minimum accepted-string count among automata with at most `states` states
/// that accept the word, with a witness in pruned normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinCount {
    pub states: usize,
    #[serde(serialize_with = "crate::as_display")]
    pub count: BigUint,
    pub witness: Nfa,
}

fn cumulative_min_counts(word: &Word, per: PerDistinct) -> Vec<MinCount> {
    let mut out: Vec<MinCount> = Vec::with_capacity(per.len());
    let mut running: Option<Candidate> = None;
    for (i, cand) in per.into_iter().enumerate() {
        if let Some(c) = cand {
            if running.as_ref().is_none_or(|r| c.0 < r.0) {
                running = Some(c);
            }
        }
        let (count, seq) = running
            .clone()
            .expect("one state always suffices when k >= 1 for some sequence");
        out.push(MinCount {
            states: i + 1,
            count: BigUint::from(count),
            witness: induced_nfa(word, &seq).expect("sequence matches the word"),
        });
    }
    out
}

/// For `k = 1 ..= k_max`: the fewest strings of length `n` accepted by any
/// `k`-state automaton that accepts `w`. Nonincreasing in `k`.
pub fn min_count_per_k(w: &Word, k_max: usize) -> Result<Vec<BigUint>> {
    Ok(min_count_per_k_with(w, k_max, &ExactConfig::default())?
        .into_iter()
        .map(|m| m.count)
        .collect())
}

pub fn min_count_per_k_with(w: &Word, k_max: usize, cfg: &ExactConfig) -> Result<Vec<MinCount>> {
    cfg.limits.check(w)?;
    if k_max == 0 {
        return Ok(Vec::new());
    }
    let k_max = k_max.min(w.len() + 1);
    Ok(cumulative_min_counts(
        w,
        search(w, k_max, Objective::MinStrings, cfg.exec),
    ))
}

/// Structure function of a word for the class of all automata, with the
/// per-`k` minima it was derived from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactAnalysis {
    pub sf: StructureFunction,
    pub min_counts: Vec<MinCount>,
}

impl ExactAnalysis {
    /// A smallest automaton realizing `h(m)`.
    pub fn witness(&self, m: usize) -> &Nfa {
        &self.min_counts[self.sf.h(m) - 1].witness
    }
}

fn sf_from_counts(n: usize, b: usize, counts: &[MinCount]) -> Option<Vec<usize>> {
    (0..=n)
        .map(|m| {
            let budget = BigUint::from(power(b, m));
            counts.iter().find(|c| c.count <= budget).map(|c| c.states)
        })
        .collect()
}

pub fn exact_h(w: &Word) -> Result<StructureFunction> {
    Ok(exact_analysis(w, &ExactConfig::default())?.sf)
}

pub fn exact_analysis(w: &Word, cfg: &ExactConfig) -> Result<ExactAnalysis> {
    cfg.limits.check(w)?;
    let n = w.len();
    let b = w.alphabet_size();
    let mut k_max = complexity_bound(n);
    loop {
        let min_counts =
            cumulative_min_counts(w, search(w, k_max, Objective::MinStrings, cfg.exec));
        if let Some(values) = sf_from_counts(n, b, &min_counts) {
            return Ok(ExactAnalysis {
                sf: StructureFunction {
                    class: SfClass::Exact,
                    values,
                },
                min_counts,
            });
        }
        // ⌊n/2⌋+1 states always suffice; the bare chain (n+1 states) is a
        // guaranteed fallback should that ever fail.
        assert!(k_max < n + 1, "the bare chain accepts exactly one string");
        k_max = n + 1;
    }
}

/// Automatic complexity with a witness automaton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Complexity {
    pub value: usize,
    pub witness: Nfa,
}

/// Least number of states of an automaton with exactly one accepting path of
/// length `n`, that path reading `w`.
pub fn automatic_complexity(w: &Word) -> Result<usize> {
    Ok(automatic_complexity_with(w, &ExactConfig::default())?.value)
}

pub fn automatic_complexity_with(w: &Word, cfg: &ExactConfig) -> Result<Complexity> {
    cfg.limits.check(w)?;
    let n = w.len();
    for k_max in [complexity_bound(n), n + 1] {
        let per = search(w, k_max, Objective::UniquePath, cfg.exec);
        if let Some((d, (_, seq))) = per
            .into_iter()
            .enumerate()
            .find_map(|(i, c)| c.map(|c| (i + 1, c)))
        {
            return Ok(Complexity {
                value: d,
                witness: induced_nfa(w, &seq)?,
            });
        }
    }
    unreachable!("the bare chain has a unique accepting path")
}

/// `⌊n/2⌋ + 1 - A_N(w)`.
pub fn deficiency(w: &Word) -> Result<usize> {
    deficiency_with(w, &ExactConfig::default())
}

pub fn deficiency_with(w: &Word, cfg: &ExactConfig) -> Result<usize> {
    let an = automatic_complexity_with(w, cfg)?.value;
    complexity_bound(w.len())
        .checked_sub(an)
        .ok_or_else(|| Error::DomainError(format!("A_N = {an} exceeds ⌊n/2⌋+1 for {w}")))
}

/// `g_w(m) = h_w(n - m)`. At most `m + 1` states are ever needed, so the
/// search is bounded by that and ignores the length limits.
pub fn g_of(w: &Word, m: usize) -> Result<usize> {
    g_of_with(w, m, Exec::Sequential)
}

pub fn g_of_with(w: &Word, m: usize, exec: Exec) -> Result<usize> {
    let n = w.len();
    if m > n {
        return Err(Error::DomainError(format!("m = {m} exceeds the length {n}")));
    }
    check_countable(w)?;
    let per = search(w, m + 1, Objective::MinStrings, exec);
    let budget = power(w.alphabet_size(), n - m);
    let mut best = u128::MAX;
    for (i, cand) in per.iter().enumerate() {
        if let Some((c, _)) = cand {
            best = best.min(*c);
        }
        if best <= budget {
            return Ok(i + 1);
        }
    }
    unreachable!("m determined edges followed by a full loop accept b^(n-m) strings")
}

/// `G_n(m) = max_{|x| = n} g_x(m)` for `m = 0 ..= m_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GTable {
    pub n: usize,
    pub alphabet_size: usize,
    pub entries: Vec<usize>,
    /// For each `m`, the lexicographically first word attaining the maximum.
    pub witnesses: Vec<Word>,
}

/// Exhaustive over all words of length `n`, reduced by the symmetries that
/// preserve `h` (alphabet permutations and reversal).
pub fn g_table(n: usize, m_max: usize, alphabet_size: usize, exec: Exec) -> Result<GTable> {
    if alphabet_size == 0 || alphabet_size > 6 {
        return Err(Error::InvalidAlphabet(alphabet_size));
    }
    let m_max = m_max.min(n);
    let probe = Word::from_index(0, n, alphabet_size);
    check_countable(&probe)?;
    let perms = permutations(alphabet_size);
    let reps: Vec<Word> = all_words(n, alphabet_size)
        .filter(|w| is_canonical(w, &perms))
        .collect();
    let rows = exec.map(reps, |w| {
        let per = search(&w, m_max + 1, Objective::MinStrings, Exec::Sequential);
        let g: Vec<usize> = (0..=m_max)
            .map(|m| {
                let budget = power(alphabet_size, n - m);
                let mut best = u128::MAX;
                per.iter()
                    .take(m + 1)
                    .enumerate()
                    .find_map(|(i, c)| {
                        if let Some((c, _)) = c {
                            best = best.min(*c);
                        }
                        (best <= budget).then_some(i + 1)
                    })
                    .expect("m + 1 states suffice")
            })
            .collect();
        (w, g)
    });
    let mut entries = vec![0; m_max + 1];
    let mut witnesses = vec![Word::from_index(0, n, alphabet_size); m_max + 1];
    for (w, g) in rows {
        for m in 0..=m_max {
            if g[m] > entries[m] {
                entries[m] = g[m];
                witnesses[m] = w.clone();
            }
        }
    }
    Ok(GTable {
        n,
        alphabet_size,
        entries,
        witnesses,
    })
}

fn permutations(b: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..b as u8).collect();
    fn heap(k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            cur.swap(j, k - 1);
        }
    }
    heap(b, &mut cur, &mut out);
    out.sort();
    out
}

/// Least word in its orbit under relabeling and reversal.
fn is_canonical(w: &Word, perms: &[Vec<u8>]) -> bool {
    let rev = w.reversed();
    perms
        .iter()
        .all(|p| w.symbols() <= w.relabel(p).symbols() && w.symbols() <= rev.relabel(p).symbols())
}

/// Finite evidence about `G_n(k)` for one `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KEvidence {
    pub k: usize,
    /// `(n, G_n(k))` for `k <= n <= n_max`.
    pub sequence: Vec<(usize, usize)>,
    /// `n` with `G_n(k) > G_{n+1}(k)`, and a word attaining `G_n(k)`.
    pub monotone_violations: Vec<(usize, String)>,
    /// `n` with `G_n(k) > G_{n+1}(k+1)`; these would contradict a theorem.
    pub shift_violations: Vec<usize>,
    /// First `n` with `G_n(k) = k + 1`.
    pub reaches_k_plus_1: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub n_max: usize,
    pub k_max: usize,
    pub alphabet_size: usize,
    pub note: &'static str,
    pub tables: Vec<GTable>,
    pub evidence: Vec<KEvidence>,
}

/// Tabulates `G_n(k)` over binary words for `n <= n_max + 1`, `k <= k_max + 1`
/// and reports, per `k <= k_max`, whether `G_n(k) <= G_{n+1}(k)`,
/// `G_n(k) <= G_{n+1}(k+1)` and `G_n(k) = k + 1` were observed.
pub fn verify_conjectures(n_max: usize, k_max: usize, exec: Exec) -> Result<ConjectureReport> {
    let tables = (0..=n_max + 1)
        .map(|n| g_table(n, k_max + 1, 2, exec))
        .collect::<Result<Vec<_>>>()?;
    let at = |n: usize, k: usize| tables[n].entries.get(k).copied();
    let evidence = (0..=k_max)
        .map(|k| {
            let sequence: Vec<(usize, usize)> =
                (k..=n_max).filter_map(|n| at(n, k).map(|g| (n, g))).collect();
            let monotone_violations = (k..=n_max)
                .filter(|&n| matches!((at(n, k), at(n + 1, k)), (Some(a), Some(b)) if a > b))
                .map(|n| (n, tables[n].witnesses[k].to_text()))
                .collect();
            let shift_violations = (k..=n_max)
                .filter(|&n| matches!((at(n, k), at(n + 1, k + 1)), (Some(a), Some(b)) if a > b))
                .collect();
            let reaches_k_plus_1 = sequence.iter().find(|&&(_, g)| g == k + 1).map(|&(n, _)| n);
            KEvidence {
                k,
                sequence,
                monotone_violations,
                shift_violations,
                reaches_k_plus_1,
            }
        })
        .collect();
    Ok(ConjectureReport {
        n_max,
        k_max,
        alphabet_size: 2,
        note: "finite evidence over binary words, not a proof; the alphabet of the supremum is assumed binary",
        tables,
        evidence,
    })
}
