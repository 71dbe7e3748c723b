//! Monte Carlo check of the closed-form timing models.
//!
//! Each trial draws fresh worker delays, then times RPIR, one-shot and
//! asynchronous schemes on that same draw. Trials are independent ChaCha
//! streams of one seed, so results do not depend on thread count.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::timing::{lit, DelayModel, Real};

/// Parameters of one simulation run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub workers: usize,
    pub n: usize,
    pub m: usize,
    pub per_worker: usize,
    pub library_size: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimReport<T> {
    pub trials: usize,
    /// `None` when `K = mn` exceeds `N`.
    pub rpir_mean: Option<T>,
    /// `None` when `m` exceeds the group size.
    pub one_shot_mean: Option<T>,
    pub async_mean: T,
    /// Trials where the asynchronous scheme finished after one-shot.
    pub dominance_violations: usize,
}

/// `count` independent delays.
pub fn sample_worker_delays<T: Real, R: Rng + ?Sized>(model: &DelayModel<T>, count: usize, rng: &mut R) -> Vec<T> {
    (0..count)
        .map(|_| model.quantile(lit(rng.random::<f64>())))
        .collect()
}

struct Trial<T> {
    rpir: Option<T>,
    one_shot: Option<T>,
    asynch: T,
}

fn kth_smallest<T: Real>(values: &mut [T], k: usize) -> T {
    let (_, v, _) = values.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).expect("finite delays"));
    *v
}

fn run_trial<T: Real>(cfg: &SimConfig, model: &DelayModel<T>, trial: u64) -> Trial<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    let delays = sample_worker_delays(model, cfg.workers, &mut rng);
    let mut order: Vec<usize> = (0..cfg.workers).collect();
    order.shuffle(&mut rng);
    let size = cfg.workers / cfg.n;
    let k = cfg.m * cfg.n;

    let rpir = (k <= cfg.workers).then(|| {
        let kk = lit::<T>(k as f64);
        let mut mult = T::zero();
        let mut pow = T::one();
        for _ in 0..cfg.library_size {
            pow = pow / kk;
            mult = mult + pow;
        }
        mult * kth_smallest(&mut delays.clone(), k)
    });

    // a block is 1/(m(n-1)) of the full job
    let block = T::one() / lit((cfg.m * (cfg.n - 1)) as f64);
    let mut one_shot = (cfg.m <= size).then(T::neg_infinity);
    let mut asynch = T::neg_infinity();
    let mut arrivals = Vec::with_capacity(size * cfg.per_worker);
    for group in order.chunks(size) {
        if let Some(t) = one_shot.as_mut() {
            let mut own: Vec<T> = group.iter().map(|&w| delays[w]).collect();
            *t = t.max(block * kth_smallest(&mut own, cfg.m));
        }
        arrivals.clear();
        for &w in group {
            for j in 1..=cfg.per_worker {
                arrivals.push(lit::<T>(j as f64) * block * delays[w]);
            }
        }
        asynch = asynch.max(kth_smallest(&mut arrivals, cfg.m));
    }
    Trial { rpir, one_shot, asynch }
}

/// Simulates `cfg.trials` rounds and averages each scheme's completion time.
pub fn simulate<T: Real>(cfg: &SimConfig, model: &DelayModel<T>) -> Result<SimReport<T>> {
    if cfg.n < 2 || cfg.workers % cfg.n != 0 {
        return Err(Error::InvalidArgument(format!(
            "need n ≥ 2 dividing N (N = {}, n = {})",
            cfg.workers, cfg.n
        )));
    }
    if cfg.m == 0 || cfg.per_worker == 0 || cfg.trials == 0 || cfg.library_size == 0 {
        return Err(Error::InvalidArgument("m, L, M and trials must be positive".into()));
    }
    if cfg.per_worker > cfg.m {
        return Err(Error::InvalidArgument(format!(
            "L ≤ m violated (L = {}, m = {})",
            cfg.per_worker, cfg.m
        )));
    }
    let size = cfg.workers / cfg.n;
    if cfg.per_worker * size < cfg.m {
        return Err(Error::InvalidArgument(format!(
            "L·N/n ≥ m violated (L·N/n = {} < m = {})",
            cfg.per_worker * size,
            cfg.m
        )));
    }
    let trials: Vec<Trial<T>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, model, t))
        .collect();

    let count = lit::<T>(cfg.trials as f64);
    let mean = |f: &dyn Fn(&Trial<T>) -> Option<T>| -> Option<T> {
        let mut sum = T::zero();
        for t in &trials {
            sum = sum + f(t)?;
        }
        Some(sum / count)
    };
    let dominance_violations = trials
        .iter()
        .filter(|t| t.one_shot.is_some_and(|o| t.asynch > o))
        .count();
    Ok(SimReport {
        trials: cfg.trials,
        rpir_mean: mean(&|t| t.rpir),
        one_shot_mean: mean(&|t| t.one_shot),
        async_mean: mean(&|t| Some(t.asynch)).expect("async always defined"),
        dominance_violations,
    })
}
