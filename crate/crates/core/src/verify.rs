//! Exhaustive check suites over small words. Each check counts the cases it
//! examined and the violations it found, keeping the first as an example.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    automatic_complexity_with, complexity_bound, exact_analysis, min_count_per_k_with,
    verify_conjectures, ExactConfig,
};
use crate::nfa::{build_chain_with_loops, build_kayleigh};
use crate::oracle::{brute_force_tables, chain_minima, longest_run_histogram, unambiguous_selections};
use crate::par::Exec;
use crate::runs::{multi_run_sf, selection_count, single_run_sf, RunSelection};
use crate::stats::{longest_run_cdf, Rational};
use crate::structure::StructureFunction;
use crate::word::{all_words, Word};

/// Whether a failed check signals a bug (a proven statement) or only
/// finite evidence against a conjecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Theorem,
    Evidence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: CheckKind,
    pub cases: u64,
    pub violations: u64,
    pub example: Option<String>,
}

impl CheckResult {
    fn new(name: &str, kind: CheckKind) -> Self {
        Self {
            name: name.to_string(),
            kind,
            cases: 0,
            violations: 0,
            example: None,
        }
    }

    fn record(&mut self, ok: bool, example: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.example.is_none() {
                self.example = Some(example());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// True when no theorem check failed.
pub fn all_theorems_hold(checks: &[CheckResult]) -> bool {
    checks
        .iter()
        .all(|c| c.kind == CheckKind::Evidence || c.passed())
}

struct Profile {
    word: Word,
    exact: StructureFunction,
    complexity: usize,
    multi: StructureFunction,
    single: StructureFunction,
}

fn binary_words_upto(n_max: usize) -> Vec<Word> {
    (0..=n_max).flat_map(|n| all_words(n, 2)).collect()
}

/// Invariants of the structure function over every binary word with
/// `n <= n_max`. Extension checks use pairs with both words in range.
pub fn invariant_suite(n_max: usize, cfg: &ExactConfig) -> Result<Vec<CheckResult>> {
    let words = binary_words_upto(n_max);
    if let Some(w) = words.last() {
        cfg.limits.check(w)?;
    }
    let profiles = cfg
        .exec
        .map(words, |w| -> Result<Profile> {
            // one search at a time per word; the words themselves run in parallel
            let inner = ExactConfig {
                exec: Exec::Sequential,
                ..*cfg
            };
            Ok(Profile {
                exact: exact_analysis(&w, &inner)?.sf,
                complexity: automatic_complexity_with(&w, &inner)?.value,
                multi: multi_run_sf(&w),
                single: single_run_sf(&w),
                word: w,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let by_word: HashMap<&[u8], &Profile> =
        profiles.iter().map(|p| (p.word.symbols(), p)).collect();

    let mut monotone = CheckResult::new("h(m) >= h(m+1)", CheckKind::Theorem);
    let mut linear = CheckResult::new("1 <= h(m) <= n-m+1", CheckKind::Theorem);
    let mut zero = CheckResult::new("h(0) = A_N", CheckKind::Theorem);
    let mut bound = CheckResult::new("A_N <= floor(n/2)+1", CheckKind::Theorem);
    let mut extend = CheckResult::new("h_x(m) <= h_xy(m), |y| <= 2", CheckKind::Theorem);
    let mut extend_cost = CheckResult::new("h_xy(m) <= h_x(m) + |y|, |y| <= 2", CheckKind::Theorem);
    let mut last = CheckResult::new("h_xb(|x|-1) <= h_x(|x|-1) + 1", CheckKind::Theorem);
    let mut shift = CheckResult::new("g_x(k) <= g_xb(k+1) <= g_x(k) + 1", CheckKind::Theorem);
    let mut two = CheckResult::new("h_x(n-k) >= 2 unless unary or k = 0", CheckKind::Theorem);
    let mut classes = CheckResult::new("exact <= multi-run <= single-run", CheckKind::Theorem);

    for p in &profiles {
        let x = &p.word;
        let n = x.len();
        let h = &p.exact;
        let text = x.to_text();
        monotone.record(h.is_nonincreasing(), || format!("{text}: {}", h.to_text()));
        linear.record(h.within_linear_bound(), || format!("{text}: {}", h.to_text()));
        zero.record(h.h(0) == p.complexity, || {
            format!("{text}: h(0) = {}, A_N = {}", h.h(0), p.complexity)
        });
        bound.record(p.complexity <= complexity_bound(n), || {
            format!("{text}: A_N = {}", p.complexity)
        });
        for k in 1..=n {
            two.record(x.is_unary() || h.h(n - k) >= 2, || format!("{text}: k = {k}"));
        }
        let ordered = (0..=n).all(|m| h.h(m) <= p.multi.h(m) && p.multi.h(m) <= p.single.h(m));
        classes.record(ordered, || {
            format!(
                "{text}: {} / {} / {}",
                h.to_text(),
                p.multi.to_text(),
                p.single.to_text()
            )
        });

        for y_len in 1..=2 {
            if n + y_len > n_max {
                break;
            }
            for y in all_words(y_len, 2) {
                let xy = x.concat(y.symbols())?;
                let hy = &by_word[xy.symbols()].exact;
                for m in 0..=n {
                    extend.record(h.h(m) <= hy.h(m), || format!("{text} . {} at m = {m}", y.to_text()));
                    extend_cost.record(hy.h(m) <= h.h(m) + y_len, || {
                        format!("{text} . {} at m = {m}", y.to_text())
                    });
                }
                if y_len == 1 {
                    if n >= 1 {
                        last.record(hy.h(n - 1) <= h.h(n - 1) + 1, || {
                            format!("{text} . {}", y.to_text())
                        });
                    }
                    for k in 0..=n {
                        let (g, gb) = (h.g(k), hy.g(k + 1));
                        shift.record(g <= gb && gb <= g + 1, || {
                            format!("{text} . {} at k = {k}: {g}, {gb}", y.to_text())
                        });
                    }
                }
            }
        }
    }
    Ok(vec![
        monotone, linear, zero, bound, extend, extend_cost, last, shift, two, classes,
    ])
}

/// Fast implementations against independent enumerations. `n_max` bounds the
/// chain, counting, Kayleigh and CDF checks; the automaton brute force always
/// covers `k <= 3`, `n <= min(n_max, 6)`.
pub fn oracle_suite(n_max: usize, cfg: &ExactConfig) -> Result<Vec<CheckResult>> {
    let exec = cfg.exec;
    let mut out = vec![
        search_vs_brute_force(n_max.min(6), cfg)?,
        counting_oracle(n_max, exec)?,
        chain_oracle(n_max, exec),
        kayleigh_check(n_max, exec)?,
    ];
    out.push(cdf_oracle(n_max, 2, exec)?);
    out.push(cdf_oracle(n_max.min(8), 3, exec)?);
    Ok(out)
}

/// Canonical exact search against every binary automaton with `k <= 3`.
pub fn search_vs_brute_force(n_max: usize, cfg: &ExactConfig) -> Result<CheckResult> {
    let n_max = n_max.min(6);
    let k_max = 3;
    let tables = brute_force_tables(k_max, n_max, cfg.exec);
    let mut check = CheckResult::new(
        "canonical search = unrestricted brute force (k <= 3)",
        CheckKind::Theorem,
    );
    for w in binary_words_upto(n_max) {
        let text = w.to_text();
        let counts = min_count_per_k_with(&w, k_max, cfg)?;
        for (i, c) in counts.iter().enumerate() {
            let k = i + 1;
            let brute = BigUint::from(tables.min_strings(k, &w));
            check.record(c.count == brute, || {
                format!("{text}, k = {k}: search {} vs brute {brute}", c.count)
            });
        }
        let a = automatic_complexity_with(&w, cfg)?.value;
        let agrees = match tables.automatic_complexity(&w) {
            Some(k) => a == k,
            None => a > k_max,
        };
        check.record(agrees, || {
            format!("{text}: A_N {a} vs brute {:?}", tables.automatic_complexity(&w))
        });
    }
    Ok(check)
}

/// Composition sums against subset-construction counts on every selection of
/// right-maximal, non-adjacent blocks of every binary word.
pub fn counting_oracle(n_max: usize, exec: Exec) -> Result<CheckResult> {
    let results = exec.map(binary_words_upto(n_max), |w| -> Result<(u64, Option<String>)> {
        let mut cases = 0;
        let mut bad = None;
        let mut err = None;
        unambiguous_selections(&w, |sel| {
            if err.is_some() {
                return;
            }
            let run = || -> Result<bool> {
                let runs = sel.iter().map(|(r, _)| *r).collect();
                let formula = selection_count(&RunSelection::new(runs), w.len(), 2)?;
                let strings = build_chain_with_loops(&w, sel)?.count_accepted_strings(w.len());
                Ok(formula == strings)
            };
            match run() {
                Ok(ok) => {
                    cases += 1;
                    if !ok && bad.is_none() {
                        let blocks: Vec<String> = sel
                            .iter()
                            .map(|(r, v)| format!("[{},{}){v}", r.start, r.end()))
                            .collect();
                        bad = Some(format!("{}: {}", w.to_text(), blocks.join(" ")));
                    }
                }
                Err(e) => err = Some(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok((cases, bad)),
        }
    });
    let mut check = CheckResult::new(
        "selection_count = accepted strings (unambiguous selections)",
        CheckKind::Theorem,
    );
    for r in results {
        let (cases, bad) = r?;
        check.cases += cases;
        if let Some(b) = bad {
            check.violations += 1;
            check.example.get_or_insert(b);
        }
    }
    Ok(check)
}

/// Multi-run DP against an exhaustive placement search.
pub fn chain_oracle(n_max: usize, exec: Exec) -> CheckResult {
    let results = exec.map(binary_words_upto(n_max), |w| {
        let fast = crate::runs::chain_table(&w, usize::MAX);
        let slow = chain_minima(&w);
        let ok = fast
            .per_states
            .iter()
            .zip(&slow)
            .all(|(f, s)| f.as_ref().map(|c| &c.count) == s.as_ref().map(|c| &c.paths));
        (ok, w.to_text())
    });
    let mut check = CheckResult::new("multi-run DP = placement search", CheckKind::Theorem);
    for (ok, text) in results {
        check.record(ok, || text);
    }
    check
}

/// For every binary word of odd length `n <= n_max`: `⌊n/2⌋+1` states, one
/// accepting path for the word, one accepted string of its length.
pub fn kayleigh_check(n_max: usize, exec: Exec) -> Result<CheckResult> {
    let words: Vec<Word> = (1..=n_max)
        .step_by(2)
        .flat_map(|n| all_words(n, 2))
        .collect();
    let results = exec.map(words, |w| -> Result<(bool, String)> {
        let nfa = build_kayleigh(&w)?;
        let one = BigUint::from(1u32);
        let ok = nfa.state_count() == complexity_bound(w.len())
            && nfa.count_accepting_paths(&w)? == one
            && nfa.count_accepted_strings(w.len()) == one;
        Ok((ok, w.to_text()))
    });
    let mut check = CheckResult::new("Kayleigh automaton is precise", CheckKind::Theorem);
    for r in results {
        let (ok, text) = r?;
        check.record(ok, || text);
    }
    Ok(check)
}

/// `longest_run_cdf` against enumeration for every `n <= n_max`, valence
/// size `s < b` and threshold `x`.
pub fn cdf_oracle(n_max: usize, b: usize, exec: Exec) -> Result<CheckResult> {
    let jobs: Vec<(usize, usize)> = (0..=n_max)
        .flat_map(|n| (1..=b).map(move |s| (n, s)))
        .collect();
    let results = exec.map(jobs, |(n, s)| -> Result<Vec<(bool, String)>> {
        let hist = longest_run_histogram(n, s, b);
        let total = BigUint::from(b).pow(n as u32);
        let p = Rational::new((s as i64).into(), (b as i64).into());
        let mut below = 0u64;
        (0..=n)
            .map(|x| {
                below += hist[x];
                let exact = Rational::new(below.into(), total.clone().into());
                let fast = longest_run_cdf(n, x, &p)?;
                Ok((fast == exact, format!("n = {n}, s = {s}, x = {x}: {fast} vs {exact}")))
            })
            .collect()
    });
    let mut check = CheckResult::new(&format!("longest-run CDF = enumeration (b = {b})"), CheckKind::Theorem);
    for r in results {
        for (ok, text) in r? {
            check.record(ok, || text);
        }
    }
    Ok(check)
}

/// `h(m)/n <= u(m/n) + slack` for binary words with `n_min <= n <= n_max`.
/// `u` bounds the limit superior only, so a failure is not a bug. Words
/// starting with 1 are skipped: complementing preserves `h`.
pub fn trend_check(n_min: usize, n_max: usize, slack: f64, cfg: &ExactConfig) -> Result<CheckResult> {
    let words: Vec<Word> = (n_min.max(1)..=n_max)
        .flat_map(|n| all_words(n, 2))
        .filter(|w| w.symbols()[0] == 0)
        .collect();
    if let Some(w) = words.last() {
        cfg.limits.check(w)?;
    }
    let inner = ExactConfig {
        exec: Exec::Sequential,
        ..*cfg
    };
    let results = cfg.exec.map(words, |w| -> Result<Vec<(bool, String)>> {
        let sf = exact_analysis(&w, &inner)?.sf;
        let n = w.len() as f64;
        (0..=w.len())
            .map(|m| {
                let bound = crate::entropy::u_bound(m as f64 / n, 2)? + slack;
                let ratio = sf.h(m) as f64 / n;
                // u comes from a bisection; allow for its rounding
                Ok((ratio <= bound + 1e-9, format!("{w}: h({m})/n = {ratio:.4} > {bound:.4}")))
            })
            .collect()
    });
    let mut check = CheckResult::new(
        &format!("h(m)/n <= u(m/n) + {slack}, {n_min} <= n <= {n_max}"),
        CheckKind::Evidence,
    );
    for r in results {
        for (ok, text) in r? {
            check.record(ok, || text);
        }
    }
    Ok(check)
}

/// Checks on the `G_n(k)` tables for binary `n <= n_max`, `k <= k_max`.
pub fn gn_suite(n_max: usize, k_max: usize, exec: Exec) -> Result<(Vec<CheckResult>, crate::exact::ConjectureReport)> {
    if k_max > n_max {
        return Err(Error::DomainError(format!("k_max {k_max} exceeds n_max {n_max}")));
    }
    let report = verify_conjectures(n_max, k_max, exec)?;
    let mut zero = CheckResult::new("G_n(0) = 1", CheckKind::Theorem);
    let mut bounded = CheckResult::new("G_n(k) <= k + 1", CheckKind::Theorem);
    let mut shift = CheckResult::new("G_n(k) <= G_{n+1}(k+1)", CheckKind::Theorem);
    let mut monotone = CheckResult::new("G_n(k) <= G_{n+1}(k) (conjecture)", CheckKind::Evidence);
    let mut reaches = CheckResult::new("G_n(k) reaches k + 1 (conjecture)", CheckKind::Evidence);
    for t in &report.tables {
        for (k, &g) in t.entries.iter().enumerate() {
            bounded.record(g <= k + 1, || format!("G_{}({k}) = {g}", t.n));
        }
        if let Some(&g) = t.entries.first() {
            zero.record(g == 1, || format!("G_{}(0) = {g}", t.n));
        }
    }
    for e in &report.evidence {
        let k = e.k;
        for &(n, _) in &e.sequence {
            shift.record(!e.shift_violations.contains(&n), || format!("n = {n}, k = {k}"));
            monotone.record(
                !e.monotone_violations.iter().any(|(v, _)| *v == n),
                || format!("n = {n}, k = {k}"),
            );
        }
        reaches.record(e.reaches_k_plus_1.is_some(), || format!("k = {k}: not reached by n = {n_max}"));
    }
    Ok((vec![zero, bounded, shift, monotone, reaches], report))
}
