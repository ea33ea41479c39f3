//! `autostruct`: structure functions, run statistics and entropy bounds from
//! the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 resource or search limit,
//! 3 a proven invariant failed.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use autostruct::exact::{ExactConfig, SearchLimits};
use autostruct::stats::{format_ratio, parse_ratio, Rational};
use autostruct::{parse_word, Exec, SfClass, Word};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::{Item, Suite};
use config::FileConfig;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    error: anyhow::Error,
}

impl CliError {
    pub fn usage(error: anyhow::Error) -> Self {
        Self { code: 1, error }
    }

    pub fn resource(error: anyhow::Error) -> Self {
        Self { code: 2, error }
    }

    pub fn invariant(error: anyhow::Error) -> Self {
        Self { code: 3, error }
    }
}

impl From<autostruct::Error> for CliError {
    fn from(e: autostruct::Error) -> Self {
        match e {
            autostruct::Error::SearchLimitExceeded { .. } => Self::resource(e.into()),
            _ => Self::usage(e.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Class {
    Exact,
    SingleRun,
    MultiRun,
}

impl From<Class> for SfClass {
    fn from(c: Class) -> Self {
        match c {
            Class::Exact => SfClass::Exact,
            Class::SingleRun => SfClass::SingleRun,
            Class::MultiRun => SfClass::MultiRun,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "autostruct", version, about = "Automatic structure functions of words")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// `key = value` file with defaults (binary_limit, ternary_limit,
    /// other_limit, alpha, grid, b, max_n, max_k); flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Longest binary word the exact search accepts.
    #[arg(long, global = true, value_name = "N")]
    binary_limit: Option<usize>,
    /// Longest ternary word the exact search accepts.
    #[arg(long, global = true, value_name = "N")]
    ternary_limit: Option<usize>,
    /// Longest word over four or more symbols the exact search accepts.
    #[arg(long, global = true, value_name = "N")]
    other_limit: Option<usize>,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct WordArgs {
    /// Words as digit strings (`0100`) or comma-separated symbols (`0,1,12`).
    words: Vec<String>,
    /// File with one word per line; blank lines and `#` comments are skipped.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Alphabet size (default: one more than the largest symbol, at least 2).
    #[arg(long, value_name = "B")]
    alphabet: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Automatic complexity A_N, the bound floor(n/2)+1 and the deficiency.
    An {
        #[command(flatten)]
        words: WordArgs,
        /// Print a minimal automaton with a unique accepting path.
        #[arg(long)]
        witness: bool,
    },
    /// Structure function h(0..=n) for an automaton class.
    Sf {
        #[command(flatten)]
        words: WordArgs,
        #[arg(long, value_enum, default_value = "exact")]
        class: Class,
        /// Print a witness automaton for every m.
        #[arg(long)]
        witness: bool,
    },
    /// Run-event p-values and the selected single-run model.
    Pvalue {
        #[command(flatten)]
        words: WordArgs,
        /// Significance threshold as num/den (default 1/20).
        #[arg(long, value_name = "NUM/DEN")]
        alpha: Option<String>,
    },
    /// Maximal runs of each word over every valence.
    Runs {
        #[command(flatten)]
        words: WordArgs,
    },
    /// Samples of the upper bound u(a) and its inverse psi(p) as CSV.
    Bounds {
        /// Points per curve (at least 2; default 101).
        #[arg(long)]
        grid: Option<usize>,
        /// Alphabet size (default 2).
        #[arg(long)]
        b: Option<usize>,
        /// Write to this file instead of standard output.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Exhaustive checks over binary words.
    Verify {
        #[arg(long, value_enum, default_value = "inequalities")]
        suite: Suite,
        /// Longest word length (default 6, or 7 for the gn suite).
        #[arg(long)]
        max_n: Option<usize>,
        /// Largest k for the gn suite (default 2).
        #[arg(long)]
        max_k: Option<usize>,
    },
}

/// Settings after merging the config file and flags.
struct Settings {
    format: Format,
    exact: ExactConfig,
    file: FileConfig,
}

impl Settings {
    fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(path) => FileConfig::load(path).map_err(CliError::usage)?,
            None => FileConfig::default(),
        };
        let defaults = SearchLimits::default();
        let limits = SearchLimits {
            binary: cli.binary_limit.or(file.binary_limit).unwrap_or(defaults.binary),
            ternary: cli.ternary_limit.or(file.ternary_limit).unwrap_or(defaults.ternary),
            other: cli.other_limit.or(file.other_limit).unwrap_or(defaults.other),
        };
        let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
        Ok(Self {
            format: cli.format,
            exact: ExactConfig { limits, exec },
            file,
        })
    }

    fn config_json(&self, alpha: Option<&Rational>) -> Value {
        let l = self.exact.limits;
        let mut j = json!({
            "limits": { "binary": l.binary, "ternary": l.ternary, "other": l.other },
        });
        if let Some(a) = alpha {
            j["alpha"] = json!(format_ratio(a));
        }
        j
    }
}

fn read_words(args: &WordArgs) -> Result<Vec<Word>, CliError> {
    let mut texts = args.words.clone();
    if let Some(path) = &args.input {
        let content = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read input file {}", path.display()))
            .map_err(CliError::usage)?;
        texts.extend(
            content
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from),
        );
    }
    if texts.is_empty() {
        return Err(CliError::usage(anyhow!("no words given (pass words or --input FILE)")));
    }
    texts
        .iter()
        .map(|t| {
            let w = parse_word(t, args.alphabet)?;
            if args.alphabet.is_none() && w.alphabet_size() < 2 {
                return Ok(Word::new(w.symbols().to_vec(), 2)?);
            }
            Ok(w)
        })
        .collect()
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 fields")
}

fn envelope(command: &str, inputs: Value, results: Value, config: Value) -> String {
    let mut s = serde_json::to_string_pretty(&json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "format": "json",
        "config": config,
        "inputs": inputs,
        "results": results,
    }))
    .expect("values serialize");
    s.push('\n');
    s
}

fn render_items(
    command: &str,
    settings: &Settings,
    words: &[Word],
    items: Vec<Item>,
    header: &[&str],
    alpha: Option<&Rational>,
) -> String {
    match settings.format {
        Format::Text => items.into_iter().map(|i| i.text).collect(),
        Format::Csv => csv_text(header, items.into_iter().flat_map(|i| i.rows)),
        Format::Json => envelope(
            command,
            json!(words.iter().map(Word::to_text).collect::<Vec<_>>()),
            Value::Array(items.into_iter().map(|i| i.json).collect()),
            settings.config_json(alpha),
        ),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(CliError::resource),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .context("cannot write to standard output")
                .map_err(CliError::resource)
        }
    }
}

fn parse_alpha(text: &str) -> Result<Rational, CliError> {
    let a = parse_ratio(text)?;
    if a <= Rational::from_integer(0.into()) || a >= Rational::from_integer(1.into()) {
        return Err(CliError::usage(anyhow!("alpha must lie strictly between 0 and 1, got {text}")));
    }
    Ok(a)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::from_cli(&cli)?;
    let exec = settings.exact.exec;
    let cfg = settings.exact;
    match &cli.command {
        Command::An { words, witness } => {
            let ws = read_words(words)?;
            let items = commands::batch(ws.clone(), exec, |w| commands::an(w, &cfg, *witness))?;
            write_out(None, &render_items("an", &settings, &ws, items, commands::AN_HEADER, None))
        }
        Command::Sf { words, class, witness } => {
            let ws = read_words(words)?;
            let class = SfClass::from(*class);
            let items = commands::batch(ws.clone(), exec, |w| commands::sf(w, class, &cfg, *witness))?;
            write_out(None, &render_items("sf", &settings, &ws, items, commands::SF_HEADER, None))
        }
        Command::Pvalue { words, alpha } => {
            let alpha = match alpha.as_deref().or(settings.file.alpha.as_deref()) {
                Some(text) => parse_alpha(text)?,
                None => autostruct::stats::default_alpha(),
            };
            let ws = read_words(words)?;
            let items = commands::batch(ws.clone(), exec, |w| commands::pvalue(w, &alpha))?;
            write_out(
                None,
                &render_items("pvalue", &settings, &ws, items, commands::PVALUE_HEADER, Some(&alpha)),
            )
        }
        Command::Runs { words } => {
            let ws = read_words(words)?;
            let items = commands::batch(ws.clone(), exec, commands::runs)?;
            write_out(None, &render_items("runs", &settings, &ws, items, commands::RUNS_HEADER, None))
        }
        Command::Bounds { grid, b, out } => {
            let grid = grid.or(settings.file.grid).unwrap_or(101);
            let b = b.or(settings.file.b).unwrap_or(2);
            let bounds = commands::bounds(b, grid)?;
            let text = match settings.format {
                Format::Json => envelope(
                    "bounds",
                    json!({ "b": b, "grid": grid }),
                    bounds.json(),
                    settings.config_json(None),
                ),
                Format::Text | Format::Csv => bounds.csv(),
            };
            write_out(out.as_deref(), &text)
        }
        Command::Verify { suite, max_n, max_k } => {
            let default_n = if *suite == Suite::Gn { 7 } else { 6 };
            let max_n = max_n.or(settings.file.max_n).unwrap_or(default_n);
            let max_k = max_k.or(settings.file.max_k).unwrap_or(2);
            let v = commands::verify(*suite, max_n, max_k, &cfg)?;
            let text = match settings.format {
                Format::Text => v.text(),
                Format::Csv => csv_text(commands::VERIFY_HEADER, v.rows()),
                Format::Json => envelope(
                    "verify",
                    json!({ "suite": v.json()["suite"], "max_n": max_n, "max_k": v.max_k }),
                    v.json(),
                    settings.config_json(None),
                ),
            };
            write_out(None, &text)?;
            if v.passed() {
                Ok(())
            } else {
                Err(CliError::invariant(anyhow!("a proven statement failed; see the report above")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
