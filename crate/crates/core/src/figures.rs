//! Tables comparing RPIR, one-shot and asynchronous schemes.

use std::fmt::Write as _;

use crate::error::Result;
use crate::timing::{average_over_groupings, lit, t_rpir, Convention, DelayModel, Metric, Real, DEFAULT_GROUPING_CAP};

pub const FIGURE_WORKERS: usize = 12;
pub const FIGURE_LIBRARY: usize = 4;
pub const FIGURE_GROUPS: usize = 2;
pub const FIGURE2_KS: [usize; 5] = [2, 4, 6, 8, 10];
pub const FIGURE3_K: usize = 4;
pub const FIGURE3_POINTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Figure2Row<T> {
    pub k: usize,
    pub t_rpir: T,
    pub t_a_one: T,
    pub t_a_async: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Figure3Row<T> {
    pub mu: T,
    pub t_rpir: T,
    pub t_a_one: T,
    pub t_a_async: T,
}

fn scheme_times<T: Real>(k: usize, model: &DelayModel<T>, conv: Convention) -> Result<(T, T, T)> {
    let m = k / FIGURE_GROUPS;
    let rpir = t_rpir(FIGURE_WORKERS, k, FIGURE_LIBRARY, model, conv)?;
    let avg = |metric| {
        average_over_groupings(metric, FIGURE_WORKERS, FIGURE_GROUPS, m, model, conv, DEFAULT_GROUPING_CAP, 0)
            .map(|a| a.mean)
    };
    Ok((rpir, avg(Metric::OneShot)?, avg(Metric::Async)?))
}

/// Times against `K` with `N = 12`, `M = 4`, `n = 2`, `gamma = mu = 0.1`.
pub fn figure2<T: Real>(conv: Convention) -> Result<Vec<Figure2Row<T>>> {
    let model = DelayModel::new(lit(0.1), lit(0.1))?;
    FIGURE2_KS
        .iter()
        .map(|&k| {
            let (t_rpir, t_a_one, t_a_async) = scheme_times(k, &model, conv)?;
            Ok(Figure2Row { k, t_rpir, t_a_one, t_a_async })
        })
        .collect()
}

/// `points` values spaced evenly in log scale over `[lo, hi]`.
pub fn log_grid<T: Real>(lo: T, hi: T, points: usize) -> Vec<T> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let steps = lit::<T>((points - 1) as f64);
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                (a + (b - a) * lit::<T>(i as f64) / steps).exp()
            }
        })
        .collect()
}

/// Times against `mu` in `[0.1, 10]` with `K = 4`, `gamma = 1`.
pub fn figure3<T: Real>(conv: Convention) -> Result<Vec<Figure3Row<T>>> {
    log_grid(lit::<T>(0.1), lit::<T>(10.0), FIGURE3_POINTS)
        .into_iter()
        .map(|mu| {
            let model = DelayModel::new(T::one(), mu)?;
            let (t_rpir, t_a_one, t_a_async) = scheme_times(FIGURE3_K, &model, conv)?;
            Ok(Figure3Row { mu, t_rpir, t_a_one, t_a_async })
        })
        .collect()
}

/// Relative saving of the asynchronous scheme at one `K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reduction<T> {
    pub k: usize,
    pub vs_one_shot: T,
    pub vs_rpir: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionReport<T> {
    pub per_k: Vec<Reduction<T>>,
    pub max_vs_one_shot: T,
    pub max_vs_rpir: T,
    pub min_vs_one_shot: T,
    pub min_vs_rpir: T,
}

pub fn reductions<T: Real>(rows: &[Figure2Row<T>]) -> ReductionReport<T> {
    let per_k: Vec<Reduction<T>> = rows
        .iter()
        .map(|r| Reduction {
            k: r.k,
            vs_one_shot: T::one() - r.t_a_async / r.t_a_one,
            vs_rpir: T::one() - r.t_a_async / r.t_rpir,
        })
        .collect();
    let fold = |f: fn(&Reduction<T>) -> T, max: bool| {
        per_k.iter().map(f).fold(if max { T::neg_infinity() } else { T::infinity() }, |a, b| {
            if max {
                a.max(b)
            } else {
                a.min(b)
            }
        })
    };
    ReductionReport {
        max_vs_one_shot: fold(|r| r.vs_one_shot, true),
        max_vs_rpir: fold(|r| r.vs_rpir, true),
        min_vs_one_shot: fold(|r| r.vs_one_shot, false),
        min_vs_rpir: fold(|r| r.vs_rpir, false),
        per_k,
    }
}

fn f6<T: Real>(v: T) -> String {
    format!("{:.6}", v.to_f64().unwrap_or(f64::NAN))
}

pub fn figure2_csv<T: Real>(rows: &[Figure2Row<T>]) -> String {
    let mut out = String::from("K,t_rpir,t_a_one,t_a_async\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.k, f6(r.t_rpir), f6(r.t_a_one), f6(r.t_a_async));
    }
    out
}

pub fn figure3_csv<T: Real>(rows: &[Figure3Row<T>]) -> String {
    let mut out = String::from("mu,t_rpir,t_a_one,t_a_async\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", f6(r.mu), f6(r.t_rpir), f6(r.t_a_one), f6(r.t_a_async));
    }
    out
}
