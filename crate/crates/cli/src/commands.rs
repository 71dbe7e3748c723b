//! The `demo`, `simulate` and `audit` subcommands.

use std::io::Write;

use anyhow::{bail, Context, Result};
use privpoly::audit::{audit_query_invariance, audit_with_builder, AuditConfig, AuditReport};
use privpoly::figures::{figure2, figure2_csv, figure3, figure3_csv, reductions};
use privpoly::protocol::{arrival_order_from_delays, orchestrate, plan_session, LeakyQueries};
use privpoly::sim::{sample_worker_delays, simulate, SimConfig};
use privpoly::timing::{comm_load, Scheme};
use privpoly::{DelayModel, Fp, Matrix, PartitionSpec, PrimeField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;

pub const SUPPORTED_PRIMES: [u64; 6] = [
    101,
    65537,
    2147483647,
    4294967291,
    2305843009213693951,
    18446744073709551557,
];

const STREAM_DEMO_DATA: u64 = 16;
const STREAM_DEMO_DELAYS: u64 = 17;

macro_rules! with_prime {
    ($p:expr, $func:ident ( $($arg:expr),* )) => {
        match $p {
            101 => $func::<Fp<101>>($($arg),*),
            65537 => $func::<Fp<65537>>($($arg),*),
            2147483647 => $func::<Fp<2147483647>>($($arg),*),
            4294967291 => $func::<Fp<4294967291>>($($arg),*),
            2305843009213693951 => $func::<Fp<2305843009213693951>>($($arg),*),
            18446744073709551557 => $func::<Fp<18446744073709551557>>($($arg),*),
            other => bail!("unsupported prime {other}; choose one of {:?}", SUPPORTED_PRIMES),
        }
    };
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn round_up(v: usize, k: usize) -> usize {
    v.div_ceil(k) * k
}

/// Runs one full session and checks the result against a direct product.
/// Returns whether the decoded product matched.
pub fn cmd_demo(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let (spec, desired) = cfg.validate()?;
    with_prime!(cfg.prime, demo_in(cfg, &spec, desired, out))
}

fn demo_in<F: PrimeField>(cfg: &RunConfig, spec: &PartitionSpec, desired: usize, out: &mut dyn Write) -> Result<bool> {
    let (r, s, t) = cfg.dims;
    let (rp, tp) = (round_up(r, spec.m()), round_up(t, spec.col_blocks()));
    let mut rng = rng_for(cfg.seed, STREAM_DEMO_DATA);
    let a = Matrix::<F>::random(r, s, &mut rng);
    let library: Vec<Matrix<F>> = (0..spec.library_size()).map(|_| Matrix::random(s, t, &mut rng)).collect();
    let padded: Vec<Matrix<F>> = library.iter().map(|b| b.pad_to(s, tp)).collect();

    let plan = plan_session::<F>(spec, desired, cfg.seed)?;
    let model = DelayModel::new(cfg.gamma, cfg.mu)?;
    let delays = sample_worker_delays(&model, spec.workers(), &mut rng_for(cfg.seed, STREAM_DEMO_DELAYS));
    let order = arrival_order_from_delays(&delays, spec.per_worker());
    let outcome = orchestrate(&plan, &a.pad_to(rp, s), &padded, &order)?;

    let decoded = outcome.product.crop(r, t);
    let oracle = a.matmul(&library[desired])?;
    let ok = decoded == oracle;

    writeln!(out, "field: p = {}", F::MODULUS)?;
    writeln!(out, "dims: A {r}x{s}, B {s}x{t} (padded to {rp}x{s}, {s}x{tp})")?;
    writeln!(
        out,
        "spec: N = {}, n = {}, m = {}, M = {}, L = {}, D = {}, seed = {}",
        spec.workers(),
        spec.n(),
        spec.m(),
        spec.library_size(),
        spec.per_worker(),
        desired + 1,
        cfg.seed
    )?;
    writeln!(out, "groups: {:?}", plan.grouping)?;
    writeln!(out, "recovery threshold: K = {}", spec.recovery_threshold())?;
    write!(out, "transcript: {}", outcome.transcript.to_text())?;
    let loads = [Scheme::Rpir, Scheme::OneShot, Scheme::Async]
        .map(|sch| comm_load(sch, spec.workers(), spec.m(), spec.per_worker()));
    writeln!(
        out,
        "communication load (x |A|): rpir = {}, one-shot = {}, async = {}",
        loads[0].clone()?,
        loads[1].clone()?,
        loads[2].clone()?
    )?;
    writeln!(
        out,
        "verification: {}",
        if ok { "decoded product matches the direct product" } else { "MISMATCH against the direct product" }
    )?;
    Ok(ok)
}

/// Writes the figure CSV to `cfg.out` (or `out` when unset) and a summary
/// to `log`.
pub fn cmd_simulate(cfg: &RunConfig, out: &mut dyn Write, log: &mut dyn Write) -> Result<()> {
    let csv = match cfg.figure {
        2 => {
            let rows = figure2::<f64>(cfg.convention)?;
            let rep = reductions(&rows);
            writeln!(log, "convention: {}", cfg.convention.name())?;
            for r in &rep.per_k {
                writeln!(
                    log,
                    "K = {}: async saves {:.1}% vs one-shot, {:.1}% vs RPIR",
                    r.k,
                    100.0 * r.vs_one_shot,
                    100.0 * r.vs_rpir
                )?;
            }
            writeln!(
                log,
                "max saving: {:.1}% vs one-shot, {:.1}% vs RPIR",
                100.0 * rep.max_vs_one_shot,
                100.0 * rep.max_vs_rpir
            )?;
            figure2_csv(&rows)
        }
        3 => {
            writeln!(log, "convention: {}", cfg.convention.name())?;
            figure3_csv(&figure3::<f64>(cfg.convention)?)
        }
        other => bail!("unknown figure {other}; expected 2 or 3"),
    };
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            writeln!(log, "wrote {}", path.display())?;
        }
        None => out.write_all(csv.as_bytes())?,
    }
    if cfg.trials > 0 {
        let sim_cfg = SimConfig {
            workers: cfg.workers,
            n: cfg.n,
            m: cfg.m,
            per_worker: cfg.per_worker,
            library_size: cfg.library_size,
            trials: cfg.trials,
            seed: cfg.seed,
        };
        let rep = simulate(&sim_cfg, &DelayModel::new(cfg.gamma, cfg.mu)?)?;
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.6}"));
        writeln!(
            log,
            "event sim ({} trials, N = {}, n = {}, m = {}, L = {}): rpir {}, one-shot {}, async {:.6}, async slower in {} trials",
            rep.trials,
            cfg.workers,
            cfg.n,
            cfg.m,
            cfg.per_worker,
            fmt(rep.rpir_mean),
            fmt(rep.one_shot_mean),
            rep.async_mean,
            rep.dominance_violations
        )?;
    }
    Ok(())
}

/// Runs the privacy audit; `leaky` swaps in the query builder that embeds
/// the desired index. Returns whether every check passed.
pub fn cmd_audit(cfg: &RunConfig, leaky: bool, out: &mut dyn Write) -> Result<bool> {
    let spec = cfg.spec()?;
    let mut audit = AuditConfig { base_seed: cfg.seed, ..AuditConfig::default() };
    if cfg.trials > 0 {
        audit.marginal_seeds = cfg.trials as u64;
    }
    let report = with_prime!(cfg.prime, audit_in(&spec, &audit, leaky))?;
    writeln!(
        out,
        "audit: N = {}, n = {}, m = {}, M = {}, L = {}, p = {}{}",
        spec.workers(),
        spec.n(),
        spec.m(),
        spec.library_size(),
        spec.per_worker(),
        cfg.prime,
        if leaky { " (leaky queries)" } else { "" }
    )?;
    writeln!(
        out,
        "coupling: {} query pairs compared, {}",
        report.queries_compared,
        if report.coupling_passed() { "pass" } else { "FAIL" }
    )?;
    writeln!(
        out,
        "shares of A: {} pairs compared, {}",
        report.shares_compared,
        if report.shares_passed() { "pass" } else { "FAIL" }
    )?;
    for m in &report.marginals {
        writeln!(
            out,
            "marginal D = {} position {}: chi2 = {:.3} (dof {}), p = {:.4}, {}",
            m.desired + 1,
            m.position + 1,
            m.chi2,
            m.dof,
            m.p_value,
            if m.passed { "pass" } else { "FAIL" }
        )?;
    }
    match report.findings.first() {
        None => writeln!(out, "result: PASS")?,
        Some(first) => writeln!(out, "result: FAIL, {first}")?,
    }
    Ok(report.passed())
}

fn audit_in<F: PrimeField>(spec: &PartitionSpec, config: &AuditConfig, leaky: bool) -> Result<AuditReport> {
    Ok(if leaky {
        audit_with_builder::<F, _>(spec, config, &LeakyQueries)?
    } else {
        audit_query_invariance::<F>(spec, config)?
    })
}
