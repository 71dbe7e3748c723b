//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are expected to fail; the binary exits
//! non-zero if any other criterion fails or if a known-red one starts passing.

mod common;

use std::time::{Duration, Instant};

use common::{build_session, random_session, schoolbook, F};
use num_bigint::BigUint;
use num_rational::Ratio;
use privpoly::audit::{audit_query_invariance, audit_with_builder, AuditConfig};
use privpoly::codec::recover_product;
use privpoly::figures::{figure2, reductions, Figure2Row};
use privpoly::protocol::LeakyQueries;
use privpoly::sim::{simulate, SimConfig};
use privpoly::timing::{
    average_over_groupings, comm_load, enumerate_groupings, grouping_count, t_async_for_grouping, t_conv,
    t_one_for_grouping, t_rpir, Convention, DelayModel, Metric, Scheme, DEFAULT_GROUPING_CAP,
};
use privpoly::{Error, PartitionSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const REFERENCE_ASYNC: f64 = 1.5861;
const REFERENCE_TOL: f64 = 0.01;
const SIM_TOL: f64 = 0.10;
const SIM_TRIALS: usize = 100_000;
const SESSIONS: u64 = 100;

/// Criteria that fail for structural reasons documented alongside the project.
const KNOWN_RED: &[&str] = &["timing-sim-means"];

struct Outcome {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn record(out: &mut Vec<Outcome>, id: &'static str, passed: bool, detail: String) {
    let tag = match (passed, KNOWN_RED.contains(&id)) {
        (true, false) => "PASS",
        (true, true) => "PASS (unexpected, listed as known red)",
        (false, true) => "FAIL (known red)",
        (false, false) => "FAIL",
    };
    println!("{tag} [{id}] {detail}");
    out.push(Outcome { id, passed, detail });
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let t = start.elapsed();
    (t <= limit, format!("{:.2}s of {:.0}s", t.as_secs_f64(), limit.as_secs_f64()))
}

fn exact_decoding(out: &mut Vec<Outcome>) {
    let start = Instant::now();
    let mut bad = Vec::new();
    for seed in 0..SESSIONS {
        let s = random_session(seed);
        let got = recover_product(s.stream.iter().cloned(), &s.spec, s.plan.assignment.group_points());
        let want = schoolbook(&s.a, &s.library[s.plan.desired]);
        if got.map(|r| r.product) != Ok(want) {
            bad.push(seed);
        }
    }
    let (fast, time) = within(Duration::from_secs(10), start);
    record(
        out,
        "exact-decoding",
        bad.is_empty() && fast,
        format!("{} sessions, mismatched seeds {bad:?}, {time}", SESSIONS),
    );
}

fn recovery_threshold(out: &mut Vec<Outcome>) {
    let mut problems = Vec::new();
    let mut withheld = 0usize;
    for seed in 0..SESSIONS {
        let s = random_session(seed);
        let points = s.plan.assignment.group_points();
        let k = s.spec.m() * s.spec.n();
        let rec = match recover_product(s.stream.iter().cloned(), &s.spec, points) {
            Ok(r) => r,
            Err(e) => {
                problems.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        if rec.consumed.len() != k {
            problems.push(format!("seed {seed}: consumed {} for K = {k}", rec.consumed.len()));
        }
        let used: Vec<_> = s
            .stream
            .iter()
            .filter(|r| rec.consumed.iter().any(|c| c.worker == r.worker && c.index == r.index))
            .cloned()
            .collect();
        for skip in 0..used.len() {
            let rest = used.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, r)| r.clone());
            withheld += 1;
            if !matches!(recover_product(rest, &s.spec, points), Err(Error::Insufficient { .. })) {
                problems.push(format!("seed {seed}: withholding result {skip} did not fail"));
            }
        }
    }
    record(
        out,
        "recovery-threshold",
        problems.is_empty(),
        format!("{withheld} withheld-result decodes, problems {problems:?}"),
    );
}

fn worked_examples(out: &mut Vec<Outcome>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut check = |m, l, want_k, r| {
        let spec = PartitionSpec::new(m, 3, 2, 12, l).unwrap();
        let s = build_session(spec, 0, r, 2, 4, &mut rng);
        let rec = recover_product(s.stream.iter().cloned(), &s.spec, s.plan.assignment.group_points()).unwrap();
        let ok = spec.recovery_threshold() == want_k
            && rec.consumed.len() == want_k
            && rec.product == schoolbook(&s.a, &s.library[0]);
        (ok, format!("K = {} consumed {}", spec.recovery_threshold(), rec.consumed.len()))
    };
    let (ok1, d1) = check(2, 1, 6, 4);
    let (ok2, d2) = check(100, 100, 300, 100);
    record(out, "worked-examples", ok1 && ok2, format!("example 1: {d1}; example 2: {d2}"));
}

fn privacy_audit(out: &mut Vec<Outcome>) {
    let start = Instant::now();
    let spec = PartitionSpec::new(2, 3, 4, 12, 1).unwrap();
    let config = AuditConfig::default();
    let honest = audit_query_invariance::<F>(&spec, &config).unwrap();
    let leaky = audit_with_builder::<F, _>(&spec, &config, &LeakyQueries).unwrap();
    let worst_p = honest.marginals.iter().map(|m| m.p_value).fold(f64::INFINITY, f64::min);
    let (fast, time) = within(Duration::from_secs(30), start);
    let ok = honest.coupling_passed()
        && honest.shares_passed()
        && honest.marginals_passed()
        && honest.passed()
        && !leaky.coupling_passed()
        && fast;
    record(
        out,
        "privacy-audit",
        ok,
        format!(
            "{} queries, {} shares compared, {} marginal tests (min p = {worst_p:.4}), mutant coupling {}, {time}",
            honest.queries_compared,
            honest.shares_compared,
            honest.marginals.len(),
            if leaky.coupling_passed() { "passed" } else { "failed" },
        ),
    );
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |a, i| a * BigUint::from(i))
}

fn figure2_value(out: &mut Vec<Outcome>) -> Option<(Convention, Vec<Figure2Row<f64>>)> {
    let start = Instant::now();
    let oracle = factorial(12) / (num_traits::pow(factorial(6), 2) * factorial(2));
    let count = grouping_count(12, 2).unwrap();
    let groupings = enumerate_groupings(12, 2, DEFAULT_GROUPING_CAP, 0).unwrap();
    let exhaustive = groupings.is_exhaustive();
    let enumerated = groupings.count();
    let mut matching = None;
    let mut values = Vec::new();
    for conv in Convention::ALL {
        let rows = figure2::<f64>(conv).unwrap();
        let v = rows[0].t_a_async;
        values.push(format!("{} = {v:.6}", conv.name()));
        if matching.is_none() && ((v - REFERENCE_ASYNC) / REFERENCE_ASYNC).abs() <= REFERENCE_TOL {
            matching = Some((conv, rows));
        }
    }
    let (fast, time) = within(Duration::from_secs(5), start);
    let counted = BigUint::from(count) == oracle && enumerated as u128 == count && exhaustive;
    record(
        out,
        "figure2-async-value",
        matching.is_some() && counted && fast,
        format!(
            "target {REFERENCE_ASYNC} ±1%: {}; matching convention {}; {enumerated} groupings enumerated (formula {oracle}); {time}",
            values.join(", "),
            matching.as_ref().map_or("none", |(c, _)| c.name()),
        ),
    );
    matching
}

fn figure2_ordering(out: &mut Vec<Outcome>) {
    let mut detail = Vec::new();
    let mut ok = true;
    for conv in Convention::ALL {
        let rows = figure2::<f64>(conv).unwrap();
        let all = rows.iter().all(|r| r.t_a_one > r.t_rpir);
        ok &= all;
        detail.push(format!(
            "{}: {}",
            conv.name(),
            rows.iter()
                .map(|r| format!("K={} {:.4}>{:.4}", r.k, r.t_a_one, r.t_rpir))
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    record(out, "figure2-ordering", ok, detail.join("; "));
}

fn reduction_report(out: &mut Vec<Outcome>, matched: Option<&(Convention, Vec<Figure2Row<f64>>)>) {
    let Some((conv, rows)) = matched else {
        record(out, "reduction-report", false, "no convention matches the reference value".into());
        return;
    };
    let rep = reductions(rows);
    let per_k: Vec<String> = rep
        .per_k
        .iter()
        .map(|r| format!("K={} {:.1}%/{:.1}%", r.k, 100.0 * r.vs_one_shot, 100.0 * r.vs_rpir))
        .collect();
    record(
        out,
        "reduction-report",
        rep.max_vs_one_shot >= 0.60 && rep.max_vs_rpir >= 0.20,
        format!(
            "{} convention, vs one-shot/vs RPIR: {}; max {:.1}% / {:.1}%",
            conv.name(),
            per_k.join(" "),
            100.0 * rep.max_vs_one_shot,
            100.0 * rep.max_vs_rpir
        ),
    );
}

fn communication_loads(out: &mut Vec<Outcome>) {
    let mut ok = true;
    for workers in [4usize, 12, 24] {
        for m in 1..=8 {
            let rpir = comm_load(Scheme::Rpir, workers, m, 1).unwrap();
            let one = comm_load(Scheme::OneShot, workers, m, 1).unwrap();
            ok &= rpir / one == Ratio::from_integer(m as u64);
            ok &= comm_load(Scheme::Async, workers, m, m).unwrap() == rpir;
        }
    }
    record(out, "communication-loads", ok, "rpir/one-shot = m and async(L = m) = rpir for N in {4,12,24}, m in 1..=8".into());
}

fn timing_properties(out: &mut Vec<Outcome>) {
    let model = DelayModel::new(0.1, 0.1).unwrap();
    let h = Convention::Harmonic;

    let mut plans = 0;
    let mut dominated = true;
    for n in [2, 4] {
        for plan in enumerate_groupings(8, n, DEFAULT_GROUPING_CAP, 0).unwrap() {
            let fast = t_async_for_grouping(&plan, &model, h).unwrap();
            for m in 1..=plan.group_size() {
                plans += 1;
                dominated &= fast <= t_one_for_grouping(&plan, m, &model, h).unwrap();
            }
        }
    }
    record(out, "timing-per-plan-dominance", dominated, format!("{plans} (plan, m) pairs at N = 8, n in {{2,4}}"));

    let exact = (1..=12).all(|k| t_rpir(12, k, 1, &model, h).unwrap() == t_conv(12, k, &model, h).unwrap());
    record(out, "timing-rpir-reduces-to-conv", exact, "t_rpir(M = 1) == t_conv for K = 1..=12".into());

    let start = Instant::now();
    let cfg = SimConfig { workers: 12, n: 2, m: 2, per_worker: 2, library_size: 4, trials: SIM_TRIALS, seed: 2024 };
    let sim = simulate(&cfg, &model).unwrap();
    let (fast, time) = within(Duration::from_secs(60), start);
    record(
        out,
        "timing-sim-dominance",
        sim.dominance_violations == 0 && fast,
        format!("{} trials, {} with async slower than one-shot, {time}", sim.trials, sim.dominance_violations),
    );

    let closed_rpir = t_rpir(12, 4, 4, &model, h).unwrap();
    let closed_one = average_over_groupings(Metric::OneShot, 12, 2, 2, &model, h, DEFAULT_GROUPING_CAP, 0).unwrap().mean;
    let closed_async = average_over_groupings(Metric::Async, 12, 2, 2, &model, h, DEFAULT_GROUPING_CAP, 0).unwrap().mean;
    let rel = |sim: f64, closed: f64| (sim - closed).abs() / closed;
    let pairs = [
        ("rpir", sim.rpir_mean.unwrap(), closed_rpir),
        ("one-shot", sim.one_shot_mean.unwrap(), closed_one),
        ("async", sim.async_mean, closed_async),
    ];
    let ok = pairs.iter().all(|&(_, s, c)| rel(s, c) <= SIM_TOL);
    let detail = pairs
        .iter()
        .map(|&(name, s, c)| format!("{name} sim {s:.4} vs closed {c:.4} ({:.1}%)", 100.0 * rel(s, c)))
        .collect::<Vec<_>>()
        .join(", ");
    record(out, "timing-sim-means", ok, format!("{detail}; tolerance 10%"));
}

fn main() {
    let mut out = Vec::new();
    exact_decoding(&mut out);
    recovery_threshold(&mut out);
    worked_examples(&mut out);
    privacy_audit(&mut out);
    let matched = figure2_value(&mut out);
    figure2_ordering(&mut out);
    reduction_report(&mut out, matched.as_ref());
    communication_loads(&mut out);
    timing_properties(&mut out);

    let unexpected: Vec<&Outcome> = out
        .iter()
        .filter(|o| o.passed == KNOWN_RED.contains(&o.id))
        .collect();
    let passed = out.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria passed, known red: {KNOWN_RED:?}", out.len());
    if !unexpected.is_empty() {
        for o in &unexpected {
            eprintln!("unexpected outcome for [{}]: {}", o.id, o.detail);
        }
        std::process::exit(1);
    }
}
