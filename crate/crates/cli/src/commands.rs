//! Subcommand bodies. Each word-level command turns one word into an
//! [`Item`] carrying its JSON value, text block and CSV rows.

use std::fmt::Write as _;

use anyhow::anyhow;
use autostruct::entropy::{bound_constants, bounds_table, BoundConstants};
use autostruct::exact::{
    automatic_complexity_with, complexity_bound, exact_analysis, ConjectureReport, ExactConfig,
};
use autostruct::runs::{chain_table, single_run_analysis};
use autostruct::stats::{best_model, format_ratio, ModelReport, Rational};
use autostruct::verify::{all_theorems_hold, gn_suite, invariant_suite, oracle_suite, CheckResult};
use autostruct::word::{every_valence, maximal_runs};
use autostruct::{selection_count, Exec, Nfa, RunSelection, SfClass, Word};
use serde_json::{json, Value};

use crate::CliError;

/// One word's output in every format.
pub struct Item {
    pub json: Value,
    pub text: String,
    pub rows: Vec<Vec<String>>,
}

/// `n` states, start, accepting set and one line per transition.
pub fn nfa_text(nfa: &Nfa, indent: &str) -> String {
    let accepting: Vec<String> = nfa.accepting().iter().map(|q| q.to_string()).collect();
    let mut out = format!(
        "{indent}{} states, start {}, accepting {{{}}}\n",
        nfa.state_count(),
        nfa.start(),
        accepting.join(",")
    );
    for (p, a, q) in nfa.transitions() {
        let _ = writeln!(out, "{indent}  {p} --{a}--> {q}");
    }
    out
}

fn selection_text(sel: &RunSelection) -> String {
    if sel.runs.is_empty() {
        return "no loops".into();
    }
    let parts: Vec<String> = sel
        .runs
        .iter()
        .map(|r| format!("[{},{}){}", r.start, r.end(), r.valence))
        .collect();
    format!("loops {}", parts.join(" "))
}

fn float(x: f64) -> String {
    format!("{x:.12}")
}

pub fn an(w: &Word, cfg: &ExactConfig, witness: bool) -> Result<Item, CliError> {
    let c = automatic_complexity_with(w, cfg)?;
    let n = w.len();
    let bound = complexity_bound(n);
    let deficiency = bound.checked_sub(c.value).ok_or_else(|| {
        CliError::invariant(anyhow!("{w}: A_N = {} exceeds the bound {bound}", c.value))
    })?;
    let mut json = json!({
        "word": w.to_text(),
        "n": n,
        "b": w.alphabet_size(),
        "a_n": c.value,
        "bound": bound,
        "deficiency": deficiency,
    });
    let mut text = format!("{w}  A_N={}  b(n)={bound}  D={deficiency}\n", c.value);
    if witness {
        json["witness"] = serde_json::to_value(&c.witness).expect("automata serialize");
        text.push_str(&nfa_text(&c.witness, "  "));
    }
    let rows = vec![vec![
        w.to_text(),
        n.to_string(),
        w.alphabet_size().to_string(),
        c.value.to_string(),
        bound.to_string(),
        deficiency.to_string(),
    ]];
    Ok(Item { json, text, rows })
}

pub const AN_HEADER: &[&str] = &["word", "n", "b", "a_n", "bound", "deficiency"];

pub fn sf(w: &Word, class: SfClass, cfg: &ExactConfig, witness: bool) -> Result<Item, CliError> {
    let n = w.len();
    let b = w.alphabet_size();
    // per m: (states, strings, witness detail for text, witness json)
    let (values, witnesses): (Vec<usize>, Vec<(String, String, Value)>) = match class {
        SfClass::Exact => {
            let a = exact_analysis(w, cfg)?;
            let ws = (0..=n)
                .map(|m| {
                    let best = &a.min_counts[a.sf.h(m) - 1];
                    let mut j = json!({ "m": m, "states": a.sf.h(m), "strings": best.count.to_string() });
                    if witness {
                        j["automaton"] = serde_json::to_value(a.witness(m)).expect("automata serialize");
                    }
                    (best.count.to_string(), nfa_text(a.witness(m), "    "), j)
                })
                .collect();
            (a.sf.values, ws)
        }
        SfClass::MultiRun | SfClass::SingleRun => {
            let (sf, sels) = if class == SfClass::MultiRun {
                let t = chain_table(w, usize::MAX);
                (t.structure_function(class), t.witnesses())
            } else {
                let a = single_run_analysis(w);
                (a.sf, a.witnesses)
            };
            let ws = sels
                .into_iter()
                .enumerate()
                .map(|(m, sel)| {
                    let strings = selection_count(&sel, n, b)?.to_string();
                    let j = json!({ "m": m, "states": sf.h(m), "strings": strings, "loops": sel });
                    Ok((strings, format!("    {}\n", selection_text(&sel)), j))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            (sf.values, ws)
        }
    };
    let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    let mut text = format!("{w} {class}: {}\n", shown.join(" "));
    if witness {
        for (m, (strings, detail, _)) in witnesses.iter().enumerate() {
            let _ = writeln!(text, "  m={m} h={} strings={strings}", values[m]);
            text.push_str(detail);
        }
    }
    let rows = witnesses
        .iter()
        .enumerate()
        .map(|(m, (strings, _, _))| {
            vec![
                w.to_text(),
                class.to_string(),
                m.to_string(),
                values[m].to_string(),
                strings.clone(),
            ]
        })
        .collect();
    let json = json!({
        "word": w.to_text(),
        "n": n,
        "b": b,
        "class": class,
        "values": values,
        "witnesses": witnesses.into_iter().map(|(_, _, j)| j).collect::<Vec<_>>(),
    });
    Ok(Item { json, text, rows })
}

pub const SF_HEADER: &[&str] = &["word", "class", "m", "h", "strings"];

fn event_line(e: &autostruct::PValueReport) -> String {
    let start = e.start.map_or("-".into(), |s| s.to_string());
    let exact = e.exact_p.as_ref().map_or("-".into(), format_ratio);
    format!(
        "{} at {start} length {}: raw {} adjusted {} ({}) exact {exact} {}",
        e.valence,
        e.run_length,
        format_ratio(&e.raw_p),
        format_ratio(&e.adjusted_p),
        e.decimal,
        e.verdict
    )
}

pub fn pvalue(w: &Word, alpha: &Rational) -> Result<Item, CliError> {
    let report: ModelReport = best_model(w, alpha)?;
    let mut text = format!(
        "{w} (b={}, alpha={}): {}\n",
        report.b,
        format_ratio(alpha),
        match report.verdict {
            autostruct::stats::Verdict::Reject => "null model rejected",
            autostruct::stats::Verdict::Retain => "null model retained",
        }
    );
    if let Some(best) = &report.best {
        let _ = writeln!(text, "  best: {}", event_line(best));
    }
    if let Some(model) = &report.model {
        let _ = writeln!(
            text,
            "  model: loop over {} on [{},{}), {} states, m = {}",
            model.run.valence,
            model.run.start,
            model.run.end(),
            model.states,
            model.m
        );
    }
    let _ = writeln!(text, "  {} candidate events", report.events.len());
    for e in &report.events {
        let _ = writeln!(text, "    {}", event_line(e));
    }
    let rows = report
        .events
        .iter()
        .map(|e| {
            vec![
                w.to_text(),
                e.valence.to_string(),
                e.start.map_or(String::new(), |s| s.to_string()),
                e.run_length.to_string(),
                format_ratio(&e.raw_p),
                format_ratio(&e.adjusted_p),
                e.decimal.clone(),
                e.exact_p.as_ref().map_or(String::new(), format_ratio),
                e.verdict.to_string(),
                (report.best.as_ref() == Some(e)).to_string(),
            ]
        })
        .collect();
    let json = serde_json::to_value(&report).expect("reports serialize");
    Ok(Item { json, text, rows })
}

pub const PVALUE_HEADER: &[&str] = &[
    "word",
    "valence",
    "start",
    "run_length",
    "raw_p",
    "adjusted_p",
    "decimal",
    "exact_p",
    "verdict",
    "selected",
];

/// Largest alphabet `runs` enumerates valences for.
const RUNS_MAX_ALPHABET: usize = 16;

pub fn runs(w: &Word) -> Result<Item, CliError> {
    let b = w.alphabet_size();
    if b > RUNS_MAX_ALPHABET {
        return Err(CliError::usage(anyhow!(
            "runs lists every valence and supports alphabets up to {RUNS_MAX_ALPHABET}, got {b}"
        )));
    }
    let mut text = format!("{w}\n");
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for v in every_valence(b) {
        let found = maximal_runs(w, v);
        let longest = found.iter().map(|r| r.len).max().unwrap_or(0);
        let spans: Vec<String> = found
            .iter()
            .map(|r| format!("[{},{})", r.start, r.end()))
            .collect();
        let _ = writeln!(text, "  {v}: {}  longest {longest}", if spans.is_empty() { "-".into() } else { spans.join(" ") });
        for r in &found {
            rows.push(vec![w.to_text(), v.to_string(), r.start.to_string(), r.len.to_string()]);
        }
        entries.push(json!({
            "valence": v,
            "longest": longest,
            "runs": found.iter().map(|r| json!({ "start": r.start, "length": r.len })).collect::<Vec<_>>(),
        }));
    }
    let json = json!({ "word": w.to_text(), "b": b, "valences": entries });
    Ok(Item { json, text, rows })
}

pub const RUNS_HEADER: &[&str] = &["word", "valence", "start", "length"];

pub struct Bounds {
    pub constants: BoundConstants,
    pub rows: Vec<(&'static str, f64, f64)>,
}

pub fn bounds(b: usize, grid: usize) -> Result<Bounds, CliError> {
    Ok(Bounds {
        constants: bound_constants(b)?,
        rows: bounds_table(b, grid)?,
    })
}

impl Bounds {
    pub fn csv(&self) -> String {
        let k = &self.constants;
        let mut out = format!(
            "# b={} c_b={} L_b={} alpha_b={} a1={} a2={}\n",
            k.b,
            float(k.c_b),
            float(k.l_b),
            float(k.alpha_b),
            float(k.a1),
            float(k.a2)
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["series", "x", "y"]).expect("in-memory write");
        for (series, x, y) in &self.rows {
            w.write_record([series.to_string(), float(*x), float(*y)])
                .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory write")).expect("ascii"));
        out
    }

    pub fn json(&self) -> Value {
        let k = &self.constants;
        json!({
            "constants": {
                "b": k.b,
                "c_b": float(k.c_b),
                "L_b": float(k.l_b),
                "alpha_b": float(k.alpha_b),
                "a1": float(k.a1),
                "a2": float(k.a2),
            },
            "rows": self.rows.iter().map(|(s, x, y)| json!({ "series": s, "x": float(*x), "y": float(*y) })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Gn,
    Inequalities,
    Oracles,
}

pub struct Verification {
    pub suite: Suite,
    pub max_n: usize,
    pub max_k: Option<usize>,
    pub checks: Vec<CheckResult>,
    pub report: Option<ConjectureReport>,
}

pub fn verify(suite: Suite, max_n: usize, max_k: usize, cfg: &ExactConfig) -> Result<Verification, CliError> {
    let (checks, report, max_k) = match suite {
        Suite::Inequalities => (invariant_suite(max_n, cfg)?, None, None),
        Suite::Oracles => (oracle_suite(max_n, cfg)?, None, None),
        Suite::Gn => {
            let (checks, report) = gn_suite(max_n, max_k, cfg.exec)?;
            (checks, Some(report), Some(max_k))
        }
    };
    Ok(Verification {
        suite,
        max_n,
        max_k,
        checks,
        report,
    })
}

impl Verification {
    pub fn passed(&self) -> bool {
        all_theorems_hold(&self.checks)
    }

    fn suite_name(&self) -> &'static str {
        match self.suite {
            Suite::Gn => "gn",
            Suite::Inequalities => "inequalities",
            Suite::Oracles => "oracles",
        }
    }

    pub fn text(&self) -> String {
        let mut out = format!("suite {}, binary words, n <= {}", self.suite_name(), self.max_n);
        if let Some(k) = self.max_k {
            let _ = write!(out, ", k <= {k}");
        }
        out.push('\n');
        for c in &self.checks {
            let status = match (c.passed(), c.kind) {
                (true, _) => "PASS",
                (false, autostruct::verify::CheckKind::Theorem) => "FAIL",
                (false, autostruct::verify::CheckKind::Evidence) => "OPEN",
            };
            let _ = write!(
                out,
                "{status}  {:<58} {:>8} cases {:>4} violations",
                c.name, c.cases, c.violations
            );
            if let Some(e) = &c.example {
                let _ = write!(out, "  e.g. {e}");
            }
            out.push('\n');
        }
        if let Some(r) = &self.report {
            out.push_str("G_n(k) over binary words (evidence, not proof)\n");
            let k_cols = r.k_max + 1;
            let head: Vec<String> = (0..=k_cols).map(|k| format!("k={k}")).collect();
            let _ = writeln!(out, "  n    {}", head.join("  "));
            for t in &r.tables {
                let cells: Vec<String> = (0..=k_cols)
                    .map(|k| t.entries.get(k).map_or("  -".into(), |g| format!("{g:>3}")))
                    .collect();
                let _ = writeln!(out, "  {:<4} {}", t.n, cells.join(" "));
            }
            let _ = writeln!(out, "  note: {}", r.note);
        }
        let _ = writeln!(
            out,
            "{}",
            if self.passed() { "all proven statements hold" } else { "a proven statement failed" }
        );
        out
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        self.checks
            .iter()
            .map(|c| {
                vec![
                    self.suite_name().to_string(),
                    c.name.clone(),
                    serde_json::to_value(c.kind).unwrap().as_str().unwrap().to_string(),
                    c.cases.to_string(),
                    c.violations.to_string(),
                    c.example.clone().unwrap_or_default(),
                ]
            })
            .collect()
    }

    pub fn json(&self) -> Value {
        let mut j = json!({
            "suite": self.suite_name(),
            "max_n": self.max_n,
            "passed": self.passed(),
            "checks": self.checks,
        });
        if let Some(k) = self.max_k {
            j["max_k"] = json!(k);
        }
        if let Some(r) = &self.report {
            j["label"] = json!("evidence, not proof");
            j["report"] = serde_json::to_value(r).expect("reports serialize");
        }
        j
    }
}

pub const VERIFY_HEADER: &[&str] = &["suite", "check", "kind", "cases", "violations", "example"];

/// Maps words to items in input order, possibly in parallel.
pub fn batch<F>(words: Vec<Word>, exec: Exec, f: F) -> Result<Vec<Item>, CliError>
where
    F: Fn(&Word) -> Result<Item, CliError> + Send + Sync,
{
    exec.map(words, |w| f(&w)).into_iter().collect()
}

