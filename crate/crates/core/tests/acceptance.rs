//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::time::{Duration, Instant};

use autostruct::entropy::{
    bound_constants, check_phi_slope, check_stationary_r, check_symmetric_split, entropy,
    entropy_inv, psi, u_bound,
};
use autostruct::exact::ExactConfig;
use autostruct::stats::{
    any_valence_run_probability, decimal_digits, min_threshold_n, p_unary_adjacent,
    prob_restricted_alphabet, ratio, run_union_estimate_with, AlphabetRestriction,
};
use autostruct::verify::{
    all_theorems_hold, cdf_oracle, counting_oracle, gn_suite, invariant_suite, kayleigh_check,
    search_vs_brute_force, CheckResult,
};
use autostruct::{build_symbol_counter, exact_h, parse_word, single_run_sf, Exec, Word};
use num_bigint::BigUint;
use num_integer::binomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, format!("{what} took {took:.2?}, limit {limit:?}"))
}

fn checks_pass(checks: &[CheckResult]) -> Result<String, String> {
    for c in checks {
        ensure(c.cases > 0, format!("{}: no cases", c.name))?;
        ensure(
            c.passed(),
            format!("{}: {} violations, e.g. {:?}", c.name, c.violations, c.example),
        )?;
    }
    let cases: u64 = checks.iter().map(|c| c.cases).sum();
    Ok(format!("{} checks, {cases} cases", checks.len()))
}

fn word(text: &str, b: usize) -> Word {
    parse_word(text, Some(b)).unwrap()
}

fn exact_vectors() -> Outcome {
    for (text, expected) in [("0100", vec![3, 3, 2, 2, 1]), ("01000", vec![3, 3, 2, 2, 2, 1])] {
        let start = Instant::now();
        let sf = exact_h(&word(text, 2)).map_err(|e| e.to_string())?;
        within(start, Duration::from_secs(5), text)?;
        ensure(sf.values == expected, format!("{text}: got {}", sf.to_text()))?;
    }
    Ok("0100 -> 3 3 2 2 1, 01000 -> 3 3 2 2 2 1".into())
}

fn single_run_vector() -> Outcome {
    let start = Instant::now();
    let sf = single_run_sf(&word("1010020210", 3));
    within(start, Duration::from_secs(1), "single-run")?;
    ensure(sf.values == [9, 9, 8, 7, 6, 6, 5, 4, 3, 2, 1], sf.to_text())?;
    Ok(sf.to_text())
}

fn probabilities() -> Outcome {
    let e = |e: autostruct::Error| e.to_string();
    let p = p_unary_adjacent(3, 3).map_err(e)?;
    ensure(p == ratio(5, 9), format!("p_unary_adjacent(3,3) = {p}"))?;
    let q = any_valence_run_probability(3, 3, 2, 3);
    ensure(q == Some(ratio(7, 9)), format!("binary run of 3: {q:?}"))?;
    let r = p_unary_adjacent(10, 3).map_err(e)?;
    let expected = ratio(1, 1) - ratio(512, 19683);
    ensure(r == expected, format!("p_unary_adjacent(10,3) = {r}"))?;
    ensure(decimal_digits(&r, 3) == "0.974", decimal_digits(&r, 3))?;
    let u = run_union_estimate_with(10, 3, 2, 5, 6).map_err(e)?;
    ensure(decimal_digits(&u, 4) == "0.7901", decimal_digits(&u, 4))?;
    Ok(format!("5/9, 7/9, {r} ~ 0.974, {u} ~ 0.7901"))
}

fn thresholds() -> Outcome {
    let alpha = ratio(1, 20);
    for (a, n, num, den) in [(3, 11, 2047, 59049), (4, 7, 760, 16384), (5, 6, 625, 15625)] {
        let got = min_threshold_n(a, &alpha).map_err(|e| e.to_string())?;
        ensure(got == n, format!("a = {a}: threshold {got}, expected {n}"))?;
        let p = prob_restricted_alphabet(n, a, AlphabetRestriction::BinaryAny).unwrap();
        ensure(p == ratio(num, den), format!("a = {a}: probability {p}"))?;
        ensure(p < alpha, format!("a = {a}: {p} is not below 1/20"))?;
        let before = prob_restricted_alphabet(n - 1, a, AlphabetRestriction::BinaryAny).unwrap();
        ensure(before >= alpha, format!("a = {a}: n - 1 already below 1/20"))?;
    }
    Ok("11, 7, 6".into())
}

fn cdf_oracles() -> Outcome {
    let start = Instant::now();
    let checks = [
        cdf_oracle(12, 2, Exec::default()).map_err(|e| e.to_string())?,
        cdf_oracle(12, 3, Exec::default()).map_err(|e| e.to_string())?,
    ];
    within(start, Duration::from_secs(60), "CDF oracle")?;
    checks_pass(&checks)
}

fn counting_oracles() -> Outcome {
    let cfg = ExactConfig::default();
    let checks = [
        counting_oracle(8, cfg.exec).map_err(|e| e.to_string())?,
        search_vs_brute_force(6, &cfg).map_err(|e| e.to_string())?,
    ];
    checks_pass(&checks)
}

fn invariants() -> Outcome {
    let checks = invariant_suite(8, &ExactConfig::default()).map_err(|e| e.to_string())?;
    checks_pass(&checks)
}

fn kayleigh() -> Outcome {
    checks_pass(&[kayleigh_check(11, Exec::default()).map_err(|e| e.to_string())?])
}

fn entropy_numerics() -> Outcome {
    let e = |e: autostruct::Error| e.to_string();
    let k = bound_constants(2).map_err(e)?;
    ensure(k.c_b == 2.0, format!("c_2 = {}", k.c_b))?;
    ensure((k.alpha_b - 3.79994).abs() <= 5e-5, format!("alpha = {}", k.alpha_b))?;
    let x: f64 = 0.5 - 3f64.sqrt() / 4.0;
    let slope = ((1.0 - x) / x).log2();
    ensure((k.alpha_b - slope).abs() <= 1e-4, format!("alpha {} vs H'(x) {slope}", k.alpha_b))?;

    // one-sided values at the two breakpoints
    let entropy_side = 0.5 - entropy_inv(k.a1).map_err(e)?;
    let linear_at_a1 = (k.c_b - k.a1) / k.alpha_b;
    ensure(
        (entropy_side - linear_at_a1).abs() <= 1e-9,
        format!("u jumps at a1: {entropy_side} vs {linear_at_a1}"),
    )?;
    let linear_at_a2 = (k.c_b - k.a2) / k.alpha_b;
    ensure(
        (linear_at_a2 - (1.0 - k.a2)).abs() <= 1e-9,
        format!("u jumps at a2: {linear_at_a2} vs {}", 1.0 - k.a2),
    )?;
    ensure(
        (entropy(0.5 - entropy_side).map_err(e)? - k.a1).abs() <= 1e-9,
        "entropy piece does not invert at a1",
    )?;

    for i in 1..=49 {
        let p = i as f64 / 100.0;
        let back = u_bound(psi(p, 2).map_err(e)?, 2).map_err(e)?;
        ensure((back - p).abs() <= 1e-8, format!("u(psi({p})) = {back}"))?;
    }
    for check in [check_symmetric_split(2), check_stationary_r(2), check_phi_slope(2)] {
        let c = check.map_err(e)?;
        ensure(c.passed(), format!("{}: {} failures, worst {}", c.name, c.failures, c.worst))?;
    }
    Ok(format!("c_2 = 2, alpha = {:.5}, a1 = {:.4}", k.alpha_b, k.a1))
}

fn conjectures() -> Outcome {
    let start = Instant::now();
    let (checks, report) = gn_suite(7, 2, Exec::default()).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(600), "G_n tables")?;
    ensure(all_theorems_hold(&checks), format!("{checks:?}"))?;
    let shift = &checks.iter().find(|c| c.name == "G_n(k) <= G_{n+1}(k+1)").unwrap();
    ensure(shift.cases > 0 && shift.passed(), format!("{shift:?}"))?;
    for t in &report.tables {
        ensure(t.entries[0] == 1, format!("G_{}(0) = {}", t.n, t.entries[0]))?;
    }
    let k1 = &report.evidence[1];
    let reached = k1.reaches_k_plus_1.ok_or("G_n(1) never reaches 2")?;
    Ok(format!("shift held in {} cases, G_n(1) = 2 from n = {reached}", shift.cases))
}

fn lower_entropy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..200 {
        let symbols: Vec<u8> = (0..20).map(|_| rng.gen_range(0..2)).collect();
        let w = Word::new(symbols, 2).map_err(|e| e.to_string())?;
        let z = w.symbols().iter().filter(|&&s| s == 0).count();
        let nfa = build_symbol_counter(&w, 0).map_err(|e| e.to_string())?;
        ensure(nfa.state_count() == z + 1, format!("{}: {} states", w.to_text(), nfa.state_count()))?;
        ensure(nfa.accepts(&w).unwrap(), format!("{} rejected", w.to_text()))?;
        let count = nfa.count_accepted_strings(20);
        ensure(
            count == BigUint::from(binomial(20u64, z as u64)),
            format!("{}: {count} strings", w.to_text()),
        )?;
    }
    Ok("200 words".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("exact structure function vectors", exact_vectors),
        ("single-run vector", single_run_vector),
        ("exact probabilities", probabilities),
        ("significance thresholds", thresholds),
        ("longest-run CDF oracle, n <= 12", cdf_oracles),
        ("counting and search oracles", counting_oracles),
        ("invariant suite, binary n <= 8", invariants),
        ("Kayleigh automata, odd n <= 11", kayleigh),
        ("entropy bound numerics", entropy_numerics),
        ("G_n tables, n <= 7, k <= 2", conjectures),
        ("lower-entropy construction", lower_entropy),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} ({detail}) [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
