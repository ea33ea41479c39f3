//! Explicit nondeterministic automata without ε-moves, exact counting of
//! accepting paths and accepted strings, and the automaton families used as
//! structure-function witnesses.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Run, Valence, Word};

/// A transition `(from, symbol, to)`.
pub type Transition = (usize, u8, usize);

/// A finite automaton with labeled transitions, one start state and a set of
/// accepting states. Every transition consumes exactly one symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NfaRepr", into = "NfaRepr")]
pub struct Nfa {
    state_count: usize,
    alphabet_size: usize,
    transitions: BTreeSet<Transition>,
    start: usize,
    accepting: BTreeSet<usize>,
    // successors[state][symbol]
    successors: Vec<Vec<Vec<usize>>>,
}

/// Wire form: `{states, alphabet, start, accepting, transitions: [[from, symbol, to], …]}`.
#[derive(Serialize, Deserialize)]
struct NfaRepr {
    states: usize,
    alphabet: usize,
    start: usize,
    accepting: Vec<usize>,
    transitions: Vec<Transition>,
}

impl TryFrom<NfaRepr> for Nfa {
    type Error = Error;

    fn try_from(r: NfaRepr) -> Result<Self> {
        Nfa::new(r.states, r.alphabet, r.transitions, r.start, r.accepting)
    }
}

impl From<Nfa> for NfaRepr {
    fn from(m: Nfa) -> Self {
        NfaRepr {
            states: m.state_count,
            alphabet: m.alphabet_size,
            start: m.start,
            accepting: m.accepting.into_iter().collect(),
            transitions: m.transitions.into_iter().collect(),
        }
    }
}

impl Nfa {
    pub fn new(
        state_count: usize,
        alphabet_size: usize,
        transitions: impl IntoIterator<Item = Transition>,
        start: usize,
        accepting: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        if state_count == 0 {
            return Err(Error::MalformedNfa("an automaton needs at least one state".into()));
        }
        if alphabet_size == 0 || alphabet_size > crate::word::MAX_ALPHABET {
            return Err(Error::InvalidAlphabet(alphabet_size));
        }
        let transitions: BTreeSet<Transition> = transitions.into_iter().collect();
        let accepting: BTreeSet<usize> = accepting.into_iter().collect();
        let bad_state = |q: usize| q >= state_count;
        if bad_state(start) || accepting.iter().any(|&q| bad_state(q)) {
            return Err(Error::MalformedNfa(format!(
                "state index out of range (k = {state_count})"
            )));
        }
        let mut successors = vec![vec![Vec::new(); alphabet_size]; state_count];
        for &(p, a, q) in &transitions {
            if bad_state(p) || bad_state(q) {
                return Err(Error::MalformedNfa(format!(
                    "transition ({p}, {a}, {q}) uses a state outside 0..{state_count}"
                )));
            }
            if a as usize >= alphabet_size {
                return Err(Error::InvalidSymbol {
                    symbol: a as u64,
                    alphabet: alphabet_size,
                });
            }
            successors[p][a as usize].push(q);
        }
        Ok(Self {
            state_count,
            alphabet_size,
            transitions,
            start,
            accepting,
            successors,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn transitions(&self) -> &BTreeSet<Transition> {
        &self.transitions
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if w.alphabet_size() != self.alphabet_size {
            return Err(Error::AlphabetMismatch {
                automaton: self.alphabet_size,
                word: w.alphabet_size(),
            });
        }
        Ok(())
    }

    pub fn accepts(&self, w: &Word) -> Result<bool> {
        Ok(!self.count_accepting_paths(w)?.is_zero())
    }

    /// Number of accepting state sequences `q_0 … q_n` that read `w`.
    pub fn count_accepting_paths(&self, w: &Word) -> Result<BigUint> {
        self.check_word(w)?;
        let mut counts = vec![BigUint::zero(); self.state_count];
        counts[self.start] = BigUint::one();
        for &a in w.symbols() {
            let mut next = vec![BigUint::zero(); self.state_count];
            for (p, c) in counts.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for &q in &self.successors[p][a as usize] {
                    next[q] += c;
                }
            }
            counts = next;
        }
        Ok(self.accepting.iter().map(|&q| &counts[q]).sum())
    }

    /// Number of accepting paths of length `n`, summed over all input strings.
    pub fn count_all_accepting_paths(&self, n: usize) -> BigUint {
        let mut counts = vec![BigUint::zero(); self.state_count];
        counts[self.start] = BigUint::one();
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); self.state_count];
            for &(p, _, q) in &self.transitions {
                if !counts[p].is_zero() {
                    next[q] += &counts[p];
                }
            }
            counts = next;
        }
        self.accepting.iter().map(|&q| &counts[q]).sum()
    }

    /// `|L(M) ∩ Σ^n|`, by on-the-fly subset construction restricted to subsets
    /// reachable in at most `n` steps.
    pub fn count_accepted_strings(&self, n: usize) -> BigUint {
        let mut det = SubsetGraph::new(self);
        let start = det.intern(StateSet::singleton(self.state_count, self.start));
        let mut layer: HashMap<usize, BigUint> = HashMap::from([(start, BigUint::one())]);
        for _ in 0..n {
            let mut next: HashMap<usize, BigUint> = HashMap::with_capacity(layer.len() * 2);
            for (id, count) in layer {
                for a in 0..self.alphabet_size {
                    if let Some(t) = det.step(id, a) {
                        *next.entry(t).or_insert_with(BigUint::zero) += &count;
                    }
                }
            }
            layer = next;
        }
        layer
            .into_iter()
            .filter(|&(id, _)| det.is_accepting(id))
            .map(|(_, c)| c)
            .sum()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct StateSet(Vec<u64>);

impl StateSet {
    fn empty(k: usize) -> Self {
        Self(vec![0; k.div_ceil(64)])
    }

    fn singleton(k: usize, q: usize) -> Self {
        let mut s = Self::empty(k);
        s.insert(q);
        s
    }

    fn insert(&mut self, q: usize) {
        self.0[q / 64] |= 1 << (q % 64);
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }
}

/// Memoized powerset determinization.
struct SubsetGraph<'a> {
    nfa: &'a Nfa,
    index: HashMap<StateSet, usize>,
    sets: Vec<StateSet>,
    accepting: Vec<bool>,
    // per subset, per symbol: None = not yet computed, Some(None) = dead
    step: Vec<Vec<Option<Option<usize>>>>,
}

impl<'a> SubsetGraph<'a> {
    fn new(nfa: &'a Nfa) -> Self {
        Self {
            nfa,
            index: HashMap::new(),
            sets: Vec::new(),
            accepting: Vec::new(),
            step: Vec::new(),
        }
    }

    fn intern(&mut self, set: StateSet) -> usize {
        if let Some(&id) = self.index.get(&set) {
            return id;
        }
        let id = self.sets.len();
        self.accepting
            .push(set.iter().any(|q| self.nfa.accepting.contains(&q)));
        self.step.push(vec![None; self.nfa.alphabet_size]);
        self.index.insert(set.clone(), id);
        self.sets.push(set);
        id
    }

    fn step(&mut self, id: usize, a: usize) -> Option<usize> {
        if let Some(t) = self.step[id][a] {
            return t;
        }
        let mut next = StateSet::empty(self.nfa.state_count);
        for p in self.sets[id].iter() {
            for &q in &self.nfa.successors[p][a] {
                next.insert(q);
            }
        }
        let t = if next.is_empty() {
            None
        } else {
            Some(self.intern(next))
        };
        self.step[id][a] = Some(t);
        t
    }

    fn is_accepting(&self, id: usize) -> bool {
        self.accepting[id]
    }
}

/// The `⌊n/2⌋ + 1`-state automaton for an odd-length word: forward edges
/// `x_1 … x_m`, a self-loop `x_{m+1}` on the last state, return edges
/// `x_{m+2} … x_n`, with the first state both initial and accepting.
pub fn build_kayleigh(x: &Word) -> Result<Nfa> {
    let n = x.len();
    if n.is_multiple_of(2) {
        return Err(Error::EvenLengthUnsupported(n));
    }
    let m = n / 2;
    let s = x.symbols();
    let mut transitions = Vec::with_capacity(n);
    for (i, &a) in s[..m].iter().enumerate() {
        transitions.push((i, a, i + 1));
    }
    transitions.push((m, s[m], m));
    // x_{m+2+j} leads from state m-j back to m-j-1
    for j in 0..m {
        transitions.push((m - j, s[m + 1 + j], m - j - 1));
    }
    Nfa::new(m + 1, x.alphabet_size(), transitions, 0, [0])
}

/// Chain automaton for `w` in which every selected run collapses into one
/// state carrying self-loops on its loop valence; the remaining symbols are
/// forward edges. The result has `n + 1 - Σ len` states and accepts `w`.
pub fn build_chain_with_loops(w: &Word, selection: &[(Run, Valence)]) -> Result<Nfa> {
    let s = w.symbols();
    let mut prev_end: Option<usize> = None;
    for (run, loop_valence) in selection {
        if run.len == 0 || run.end() > s.len() {
            return Err(Error::InvalidSelection(format!(
                "run at {} of length {} does not fit the word",
                run.start, run.len
            )));
        }
        if let Some(end) = prev_end {
            if run.start < end {
                return Err(Error::OverlappingRuns);
            }
            if run.start == end {
                return Err(Error::AdjacentRuns);
            }
        }
        if !w.symbol_set(run.start, run.len).is_subset_of(*loop_valence)
            || !loop_valence.is_subset_of(Valence::full(w.alphabet_size()))
        {
            return Err(Error::InvalidSelection(format!(
                "w[{}..{}] is not over the loop valence {loop_valence}",
                run.start,
                run.end()
            )));
        }
        prev_end = Some(run.end());
    }

    let mut transitions = Vec::new();
    let mut state = 0usize;
    let mut pos = 0usize;
    for (run, loop_valence) in selection {
        while pos < run.start {
            transitions.push((state, s[pos], state + 1));
            state += 1;
            pos += 1;
        }
        transitions.extend(loop_valence.members().map(|a| (state, a, state)));
        pos = run.end();
    }
    while pos < s.len() {
        transitions.push((state, s[pos], state + 1));
        state += 1;
        pos += 1;
    }
    Nfa::new(state + 1, w.alphabet_size(), transitions, 0, [state])
}

/// Chain of `z + 1` states linked by edges labeled `counted`, where `z` is the
/// number of occurrences of `counted` in `x`, and every state loops on all
/// other symbols. Accepts exactly the strings of length `n` with `z`
/// occurrences of `counted`.
pub fn build_symbol_counter(x: &Word, counted: u8) -> Result<Nfa> {
    let b = x.alphabet_size();
    if counted as usize >= b {
        return Err(Error::InvalidSymbol {
            symbol: counted as u64,
            alphabet: b,
        });
    }
    let z = x.symbols().iter().filter(|&&s| s == counted).count();
    let mut transitions = Vec::new();
    for q in 0..=z {
        if q < z {
            transitions.push((q, counted, q + 1));
        }
        for a in (0..b as u8).filter(|&a| a != counted) {
            transitions.push((q, a, q));
        }
    }
    Nfa::new(z + 1, b, transitions, 0, [z])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{all_words, parse_word};
    use num_integer::binomial;

    fn w(text: &str) -> Word {
        parse_word(text, Some(2)).unwrap()
    }

    /// Enumerates every state sequence, independent of the DP.
    fn brute_force_paths(m: &Nfa, word: &Word) -> u64 {
        let n = word.len();
        let k = m.state_count();
        let total = (k as u64).pow(n as u32 + 1);
        (0..total)
            .filter(|&code| {
                let mut seq = Vec::with_capacity(n + 1);
                let mut c = code;
                for _ in 0..=n {
                    seq.push((c % k as u64) as usize);
                    c /= k as u64;
                }
                seq[0] == m.start()
                    && m.accepting().contains(&seq[n])
                    && (0..n).all(|i| {
                        m.transitions()
                            .contains(&(seq[i], word.symbols()[i], seq[i + 1]))
                    })
            })
            .count() as u64
    }

    #[test]
    fn accepting_paths_small_examples() {
        let one_state = Nfa::new(1, 2, [(0, 0, 0), (0, 1, 0)], 0, [0]).unwrap();
        assert_eq!(
            one_state.count_accepting_paths(&w("0110")).unwrap(),
            BigUint::one()
        );

        let m = Nfa::new(2, 2, [(0, 0, 0), (0, 0, 1), (1, 0, 1)], 0, [1]).unwrap();
        let word = w("000");
        let expected = brute_force_paths(&m, &word);
        assert_eq!(expected, 3);
        assert_eq!(
            m.count_accepting_paths(&word).unwrap(),
            BigUint::from(expected)
        );
    }

    #[test]
    fn alphabet_mismatch_is_reported() {
        let m = Nfa::new(1, 3, [(0, 0, 0)], 0, [0]).unwrap();
        assert!(matches!(
            m.count_accepting_paths(&w("00")),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn malformed_automata_are_rejected() {
        assert!(Nfa::new(0, 2, [], 0, [0]).is_err());
        assert!(Nfa::new(2, 2, [(0, 2, 1)], 0, [1]).is_err());
        assert!(Nfa::new(2, 2, [(0, 1, 2)], 0, [1]).is_err());
        assert!(Nfa::new(2, 2, [], 0, [5]).is_err());
    }

    #[test]
    fn full_loop_accepts_everything() {
        let m = Nfa::new(1, 2, [(0, 0, 0), (0, 1, 0)], 0, [0]).unwrap();
        for n in 0..12 {
            assert_eq!(m.count_accepted_strings(n), BigUint::from(1u64 << n));
        }
    }

    #[test]
    fn chain_of_unary_loops_matches_binomial() {
        // q states in a chain with ℓ unary loops accepts C(n+1-q+ℓ-1, ℓ-1) strings
        // when the loops are all labeled 1 and the chain edges 0.
        for q in 1..5usize {
            for loops in 1..=q {
                let mut t = Vec::new();
                for s in 0..q - 1 {
                    t.push((s, 0u8, s + 1));
                }
                for s in 0..loops {
                    t.push((s, 1u8, s));
                }
                let m = Nfa::new(q, 2, t, 0, [q - 1]).unwrap();
                for n in q - 1..10 {
                    let free = n + 1 - q;
                    assert_eq!(
                        m.count_accepted_strings(n),
                        BigUint::from(binomial(free + loops - 1, loops - 1) as u64),
                        "q={q} loops={loops} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn kayleigh_small_cases() {
        let m = build_kayleigh(&w("010")).unwrap();
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.count_accepted_strings(3), BigUint::one());
        assert!(m.accepts(&w("010")).unwrap());

        let m = build_kayleigh(&w("0")).unwrap();
        assert_eq!(m.state_count(), 1);
        assert_eq!(m.transitions().iter().copied().collect::<Vec<_>>(), [(0, 0, 0)]);

        assert_eq!(
            build_kayleigh(&w("01")),
            Err(Error::EvenLengthUnsupported(2))
        );
    }

    #[test]
    fn kayleigh_accepts_only_its_word() {
        for n in (1..=9).step_by(2) {
            for x in all_words(n, 2) {
                let m = build_kayleigh(&x).unwrap();
                assert_eq!(m.state_count(), n / 2 + 1);
                assert_eq!(m.count_accepting_paths(&x).unwrap(), BigUint::one());
                assert_eq!(m.count_all_accepting_paths(n), BigUint::one());
                assert_eq!(m.count_accepted_strings(n), BigUint::one());
            }
        }
    }

    #[test]
    fn chain_with_loops_examples() {
        let word = w("0011");
        let run = Run {
            start: 0,
            len: 2,
            valence: Valence::from_symbols(&[0]),
        };
        let m = build_chain_with_loops(&word, &[(run, run.valence)]).unwrap();
        assert_eq!(m.state_count(), 3);
        assert_eq!(m.count_accepted_strings(4), BigUint::one());
        assert!(m.accepts(&word).unwrap());

        let bare = build_chain_with_loops(&word, &[]).unwrap();
        assert_eq!(bare.state_count(), 5);
        assert_eq!(bare.count_accepted_strings(4), BigUint::one());
        assert!(bare.accepts(&word).unwrap());
    }

    #[test]
    fn chain_with_loops_rejects_bad_selections() {
        let word = w("0011");
        let zeros = Run {
            start: 0,
            len: 2,
            valence: Valence::from_symbols(&[0]),
        };
        let ones = Run {
            start: 2,
            len: 2,
            valence: Valence::from_symbols(&[1]),
        };
        let overlapping = Run {
            start: 1,
            len: 2,
            valence: Valence::full(2),
        };
        assert_eq!(
            build_chain_with_loops(&word, &[(zeros, zeros.valence), (ones, ones.valence)]),
            Err(Error::AdjacentRuns)
        );
        assert_eq!(
            build_chain_with_loops(&word, &[(zeros, zeros.valence), (overlapping, Valence::full(2))]),
            Err(Error::OverlappingRuns)
        );
        assert!(matches!(
            build_chain_with_loops(&word, &[(ones, Valence::from_symbols(&[0]))]),
            Err(Error::InvalidSelection(_))
        ));
    }

    #[test]
    fn symbol_counter_counts_binomially() {
        let x = w("0110100");
        let m = build_symbol_counter(&x, 0).unwrap();
        assert_eq!(m.state_count(), 5);
        assert!(m.accepts(&x).unwrap());
        assert_eq!(m.count_accepted_strings(7), BigUint::from(binomial(7u64, 4)));

        let t = parse_word("0120", Some(3)).unwrap();
        let m = build_symbol_counter(&t, 0).unwrap();
        // two 0s among 4 positions, the other two from {1,2}
        assert_eq!(m.count_accepted_strings(4), BigUint::from(6u32 * 4));
    }

    #[test]
    fn json_shape() {
        let m = Nfa::new(2, 2, [(0, 1, 1), (1, 0, 1)], 0, [1]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"{"states":2,"alphabet":2,"start":0,"accepting":[1],"transitions":[[0,1,1],[1,0,1]]}"#
        );
        let back: Nfa = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Nfa>(
            r#"{"states":1,"alphabet":2,"start":0,"accepting":[0],"transitions":[[0,1,3]]}"#
        )
        .is_err());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::word::all_words;
    use proptest::prelude::*;

    fn nfa_strategy() -> impl Strategy<Value = Nfa> {
        (1usize..=4, 1usize..=2).prop_flat_map(|(k, extra)| {
            let b = extra + 1;
            (
                proptest::collection::btree_set((0..k, 0..b as u8, 0..k), 0..=k * b * 2),
                0..k,
                proptest::collection::btree_set(0..k, 1..=k),
            )
                .prop_map(move |(t, s, acc)| Nfa::new(k, b, t, s, acc).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Subset construction agrees with filtering all b^n strings.
        #[test]
        fn string_count_matches_enumeration(m in nfa_strategy(), n in 0usize..=6) {
            let brute = all_words(n, m.alphabet_size())
                .filter(|x| m.accepts(x).unwrap())
                .count();
            prop_assert_eq!(m.count_accepted_strings(n), BigUint::from(brute));
        }

        #[test]
        fn string_count_bounded_by_paths(m in nfa_strategy(), n in 0usize..=6) {
            let strings = m.count_accepted_strings(n);
            prop_assert!(strings <= m.count_all_accepting_paths(n));
            prop_assert!(strings <= BigUint::from(m.alphabet_size()).pow(n as u32));
            let per_word: BigUint = all_words(n, m.alphabet_size())
                .map(|x| m.count_accepting_paths(&x).unwrap())
                .sum();
            prop_assert_eq!(per_word, m.count_all_accepting_paths(n));
        }

        #[test]
        fn json_roundtrip(m in nfa_strategy()) {
            let text = serde_json::to_string(&m).unwrap();
            let back: Nfa = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
