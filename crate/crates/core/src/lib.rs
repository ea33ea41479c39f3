//! Structure functions of words under finite-automaton complexity.
//!
//! `h_w(m)` is the fewest states of a nondeterministic automaton that accepts
//! `w` and at most `b^m` strings of length `|w|`. The crate computes it
//! exactly by exhaustive search ([`exact`]), for chain automata with
//! self-loops ([`runs`]), and relates run events to exact p-values
//! ([`stats`]) and to the asymptotic entropy bounds ([`entropy`]).

pub mod entropy;
pub mod error;
pub mod exact;
pub mod nfa;
pub mod oracle;
pub mod par;
pub mod runs;
pub mod stats;
pub mod structure;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use exact::{automatic_complexity, deficiency, exact_h, g_of, g_table, min_count_per_k, ExactConfig, SearchLimits};
pub use nfa::{build_chain_with_loops, build_kayleigh, build_symbol_counter, Nfa};
pub use par::Exec;
pub use runs::{multi_run_decide, multi_run_sf, selection_count, single_run_sf, RunSelection};
pub use stats::{best_model, longest_run_cdf, run_event_pvalue, PValueReport, Rational};
pub use structure::{SfClass, StructureFunction};
pub use word::{maximal_runs, parse_word, Run, Valence, Word};

/// Serializes a value through its `Display` form (big integers, rationals).
pub(crate) fn as_display<T: std::fmt::Display, S: serde::Serializer>(
    value: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(value)
}
