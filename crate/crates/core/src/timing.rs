//! Closed-form computation-time and communication-load models.
//!
//! Worker `i` of `N` is the `i`-th fastest (ranks start at 1), and its time is
//! modelled by the expected `i`-th order statistic of `N` shifted
//! exponentials. Everything is generic over the float type.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Float type usable by the timing models.
pub trait Real: Float + FromPrimitive + Debug + Send + Sync + 'static {}

impl<T: Float + FromPrimitive + Debug + Send + Sync + 'static> Real for T {}

pub(crate) fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("representable constant")
}

/// Shifted-exponential completion time: `P(T ≤ t) = 1 - exp(-mu (t - gamma))`
/// for `t ≥ gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayModel<T> {
    gamma: T,
    mu: T,
}

impl<T: Real> DelayModel<T> {
    pub fn new(gamma: T, mu: T) -> Result<Self> {
        if !(gamma >= T::zero()) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("shift must be ≥ 0, got {gamma:?}")));
        }
        if !(mu > T::zero()) || !mu.is_finite() {
            return Err(Error::InvalidArgument(format!("straggling parameter must be > 0, got {mu:?}")));
        }
        Ok(DelayModel { gamma, mu })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// Inverse-transform draw from a uniform `u` in `[0, 1)`.
    pub fn quantile(&self, u: T) -> T {
        self.gamma - (T::one() - u).ln() / self.mu
    }
}

/// How the harmonic difference `H_N - H_{N-k}` in the expected order
/// statistic is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    /// Exact harmonic numbers.
    #[default]
    Harmonic,
    /// `ln(N / (N - k))`, undefined at `k = N`.
    NaturalLog,
    /// `log2(N / (N - k))`, undefined at `k = N`.
    Log2,
}

impl Convention {
    pub const ALL: [Convention; 3] = [Convention::Harmonic, Convention::NaturalLog, Convention::Log2];

    pub fn name(self) -> &'static str {
        match self {
            Convention::Harmonic => "harmonic",
            Convention::NaturalLog => "log",
            Convention::Log2 => "log2",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "harmonic" => Ok(Convention::Harmonic),
            "log" | "ln" => Ok(Convention::NaturalLog),
            "log2" => Ok(Convention::Log2),
            other => Err(Error::Parse(format!(
                "unknown convention `{other}` (expected harmonic, log or log2)"
            ))),
        }
    }
}

/// `H_n = Σ_{i=1}^{n} 1/i`.
pub fn harmonic<T: Real>(n: usize) -> T {
    harmonic_tail(n, n)
}

/// `H_n - H_{n-k}`, summed smallest terms first.
fn harmonic_tail<T: Real>(n: usize, k: usize) -> T {
    (n - k + 1..=n)
        .rev()
        .fold(T::zero(), |acc, i| acc + T::one() / lit::<T>(i as f64))
}

/// Expected `k`-th smallest of `n` i.i.d. delays: `gamma + (H_n - H_{n-k}) / mu`
/// or its logarithmic approximation.
pub fn expected_order_stat<T: Real>(n: usize, k: usize, model: &DelayModel<T>, conv: Convention) -> Result<T> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("order statistic {k} of {n} out of range")));
    }
    let spread = match conv {
        Convention::Harmonic => harmonic_tail::<T>(n, k),
        Convention::NaturalLog | Convention::Log2 => {
            if k == n {
                return Err(Error::Divergent { n, k });
            }
            let ratio = lit::<T>(n as f64) / lit::<T>((n - k) as f64);
            if conv == Convention::Log2 {
                ratio.log2()
            } else {
                ratio.ln()
            }
        }
    };
    Ok(model.gamma + spread / model.mu)
}

/// Conventional coded computation: the `k`-th fastest worker does `1/k` of
/// the work.
pub fn t_conv<T: Real>(n: usize, k: usize, model: &DelayModel<T>, conv: Convention) -> Result<T> {
    Ok(expected_order_stat(n, k, model, conv)? / lit(k as f64))
}

/// Robust PIR baseline: `(1/K + … + 1/K^M)` times the `K`-th order statistic.
pub fn t_rpir<T: Real>(n: usize, k: usize, library_size: usize, model: &DelayModel<T>, conv: Convention) -> Result<T> {
    if library_size == 0 {
        return Err(Error::InvalidArgument("library must be non-empty".into()));
    }
    let kk = lit::<T>(k as f64);
    let mut term = expected_order_stat(n, k, model, conv)?;
    let mut total = T::zero();
    for _ in 0..library_size {
        term = term / kk;
        total = total + term;
    }
    Ok(total)
}

/// Partition of ranks `1..=N` into equal groups, each sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupingPlan {
    groups: Vec<Vec<usize>>,
}

impl GroupingPlan {
    pub fn new(mut groups: Vec<Vec<usize>>) -> Result<Self> {
        let size = groups.first().map_or(0, Vec::len);
        if size == 0 || groups.iter().any(|g| g.len() != size) {
            return Err(Error::InvalidArgument("groups must be non-empty and equal-sized".into()));
        }
        let total = size * groups.len();
        let mut seen = vec![false; total + 1];
        for &r in groups.iter().flatten() {
            if r == 0 || r > total || std::mem::replace(&mut seen[r], true) {
                return Err(Error::InvalidArgument(format!(
                    "groups must partition ranks 1..={total}"
                )));
            }
        }
        for g in &mut groups {
            g.sort_unstable();
        }
        Ok(GroupingPlan { groups })
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn workers(&self) -> usize {
        self.groups.len() * self.groups[0].len()
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn group_size(&self) -> usize {
        self.groups[0].len()
    }
}

/// One-shot time for a grouping: the slowest group's `m`-th fastest member
/// finishing one block of size `1/(m(n-1))`.
pub fn t_one_for_grouping<T: Real>(plan: &GroupingPlan, m: usize, model: &DelayModel<T>, conv: Convention) -> Result<T> {
    let n = plan.group_count();
    if m == 0 || m > plan.group_size() {
        return Err(Error::Infeasible(format!(
            "one-shot needs m ≤ N/n (m = {m}, N/n = {})",
            plan.group_size()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("n ≥ 2 required".into()));
    }
    let workers = plan.workers();
    let mut slowest = T::neg_infinity();
    for g in plan.groups() {
        slowest = slowest.max(expected_order_stat(workers, g[m - 1], model, conv)?);
    }
    Ok(slowest / lit((m * (n - 1)) as f64))
}

/// Asynchronous time for a grouping: each group finishes its `1/(n-1)` share
/// with all members working at rate `1 / E[T_(s_i)]`; the slowest group
/// decides. Members whose order statistic diverges contribute no rate.
pub fn t_async_for_grouping<T: Real>(plan: &GroupingPlan, model: &DelayModel<T>, conv: Convention) -> Result<T> {
    let n = plan.group_count();
    if n < 2 {
        return Err(Error::InvalidArgument("n ≥ 2 required".into()));
    }
    let workers = plan.workers();
    let share = T::one() / lit((n - 1) as f64);
    let mut slowest = T::neg_infinity();
    for g in plan.groups() {
        let mut rate = T::zero();
        for &s in g {
            match expected_order_stat(workers, s, model, conv) {
                Ok(t) => rate = rate + T::one() / t,
                Err(Error::Divergent { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        if rate == T::zero() {
            return Err(Error::Divergent { n: workers, k: g[g.len() - 1] });
        }
        slowest = slowest.max(share / rate);
    }
    Ok(slowest)
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Number of unordered partitions of `workers` into `n` equal groups,
/// `N! / ((N/n)!^n n!)`; `None` on overflow.
pub fn grouping_count(workers: usize, n: usize) -> Option<u128> {
    if n == 0 || workers % n != 0 {
        return Some(0);
    }
    let g = (workers / n) as u128;
    let mut total: u128 = 1;
    for level in 0..n as u128 {
        // the smallest remaining rank anchors the next group
        let remaining = workers as u128 - level * g;
        total = total.checked_mul(binomial(remaining - 1, g - 1)?)?;
    }
    Some(total)
}

fn next_combination(c: &mut [usize], pool: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < pool - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Lexicographic enumeration of every unordered equal partition, each once.
#[derive(Clone, Debug)]
pub struct ExhaustiveGroupings {
    workers: usize,
    size: usize,
    groups: usize,
    combos: Vec<Vec<usize>>,
    done: bool,
}

impl ExhaustiveGroupings {
    fn new(workers: usize, groups: usize) -> Self {
        let size = workers / groups;
        ExhaustiveGroupings {
            workers,
            size,
            groups,
            combos: vec![(0..size - 1).collect(); groups.saturating_sub(1)],
            done: false,
        }
    }

    fn current(&self) -> GroupingPlan {
        let mut remaining: Vec<usize> = (1..=self.workers).collect();
        let mut groups = Vec::with_capacity(self.groups);
        for combo in &self.combos {
            let mut g = vec![remaining[0]];
            g.extend(combo.iter().map(|&i| remaining[i + 1]));
            remaining.retain(|r| !g.contains(r));
            groups.push(g);
        }
        groups.push(remaining);
        GroupingPlan { groups }
    }
}

impl Iterator for ExhaustiveGroupings {
    type Item = GroupingPlan;

    fn next(&mut self) -> Option<GroupingPlan> {
        if self.done {
            return None;
        }
        let plan = self.current();
        self.done = true;
        for level in (0..self.combos.len()).rev() {
            let pool = self.workers - level * self.size - 1;
            if next_combination(&mut self.combos[level], pool) {
                for deeper in &mut self.combos[level + 1..] {
                    for (i, c) in deeper.iter_mut().enumerate() {
                        *c = i;
                    }
                }
                self.done = false;
                break;
            }
        }
        Some(plan)
    }
}

/// Uniform random partitions, drawn with replacement.
#[derive(Clone, Debug)]
pub struct SampledGroupings {
    rng: ChaCha8Rng,
    workers: usize,
    groups: usize,
    remaining: usize,
}

impl Iterator for SampledGroupings {
    type Item = GroupingPlan;

    fn next(&mut self) -> Option<GroupingPlan> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let mut ranks: Vec<usize> = (1..=self.workers).collect();
        ranks.shuffle(&mut self.rng);
        let size = self.workers / self.groups;
        let groups = ranks
            .chunks(size)
            .map(|c| {
                let mut g = c.to_vec();
                g.sort_unstable();
                g
            })
            .collect();
        Some(GroupingPlan { groups })
    }
}

pub enum Groupings {
    Exhaustive(ExhaustiveGroupings),
    Sampled(SampledGroupings),
}

impl Groupings {
    pub fn is_exhaustive(&self) -> bool {
        matches!(self, Groupings::Exhaustive(_))
    }
}

impl Iterator for Groupings {
    type Item = GroupingPlan;

    fn next(&mut self) -> Option<GroupingPlan> {
        match self {
            Groupings::Exhaustive(it) => it.next(),
            Groupings::Sampled(it) => it.next(),
        }
    }
}

pub const DEFAULT_GROUPING_CAP: usize = 1_000_000;

/// All groupings when there are at most `cap`, otherwise `cap` uniformly
/// sampled ones.
pub fn enumerate_groupings(workers: usize, n: usize, cap: usize, seed: u64) -> Result<Groupings> {
    if n == 0 || workers == 0 || workers % n != 0 {
        return Err(Error::InvalidArgument(format!(
            "n must divide N (N = {workers}, n = {n})"
        )));
    }
    match grouping_count(workers, n) {
        Some(count) if count <= cap as u128 => Ok(Groupings::Exhaustive(ExhaustiveGroupings::new(workers, n))),
        _ => Ok(Groupings::Sampled(SampledGroupings {
            rng: ChaCha8Rng::seed_from_u64(seed),
            workers,
            groups: n,
            remaining: cap,
        })),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    OneShot,
    Async,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupingAverage<T> {
    pub mean: T,
    pub plans: usize,
    pub exhaustive: bool,
}

/// Mean of the per-grouping time over all (or `cap` sampled) groupings.
#[allow(clippy::too_many_arguments)]
pub fn average_over_groupings<T: Real>(
    metric: Metric,
    workers: usize,
    n: usize,
    m: usize,
    model: &DelayModel<T>,
    conv: Convention,
    cap: usize,
    seed: u64,
) -> Result<GroupingAverage<T>> {
    let groupings = enumerate_groupings(workers, n, cap, seed)?;
    let exhaustive = groupings.is_exhaustive();
    let mut sum = T::zero();
    let mut plans = 0usize;
    for plan in groupings {
        sum = sum
            + match metric {
                Metric::OneShot => t_one_for_grouping(&plan, m, model, conv)?,
                Metric::Async => t_async_for_grouping(&plan, model, conv)?,
            };
        plans += 1;
    }
    if plans == 0 {
        return Err(Error::InvalidArgument("no groupings to average over".into()));
    }
    Ok(GroupingAverage {
        mean: sum / lit(plans as f64),
        plans,
        exhaustive,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Rpir,
    OneShot,
    Async,
}

/// Master-to-workers load as an exact multiple of `|A|`.
pub fn comm_load(scheme: Scheme, workers: usize, m: usize, per_worker: usize) -> Result<Ratio<u64>> {
    if m == 0 || per_worker == 0 {
        return Err(Error::InvalidArgument("m and L must be positive".into()));
    }
    if per_worker > m {
        return Err(Error::InvalidArgument(format!(
            "L ≤ m violated (L = {per_worker}, m = {m})"
        )));
    }
    let n = workers as u64;
    Ok(match scheme {
        Scheme::Rpir => Ratio::from_integer(n),
        Scheme::OneShot => Ratio::new(n, m as u64),
        Scheme::Async => Ratio::new(n * per_worker as u64, m as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_bigint::BigUint;
    use std::collections::HashSet;

    fn model() -> DelayModel<f64> {
        DelayModel::new(0.1, 0.1).unwrap()
    }

    #[test]
    fn order_stat_examples() {
        let one = DelayModel::new(0.7, 2.0).unwrap();
        assert_abs_diff_eq!(expected_order_stat(1, 1, &one, Convention::Harmonic).unwrap(), 0.7 + 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            expected_order_stat(12, 6, &model(), Convention::Harmonic).unwrap(),
            6.632107,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            expected_order_stat(12, 12, &model(), Convention::Harmonic).unwrap(),
            31.132107,
            epsilon = 1e-6
        );
        assert_eq!(
            expected_order_stat(12, 12, &model(), Convention::NaturalLog),
            Err(Error::Divergent { n: 12, k: 12 })
        );
        assert!(expected_order_stat(12, 0, &model(), Convention::Harmonic).is_err());
        assert!(expected_order_stat(12, 13, &model(), Convention::Harmonic).is_err());
    }

    #[test]
    fn order_stat_increasing_in_k() {
        for conv in Convention::ALL {
            let vals: Vec<f64> = (1..12)
                .map(|k| expected_order_stat(12, k, &model(), conv).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[0] < w[1]), "{conv:?}");
        }
    }

    #[test]
    fn t_conv_examples() {
        let one = DelayModel::new(0.25, 4.0).unwrap();
        assert_abs_diff_eq!(t_conv(1, 1, &one, Convention::Harmonic).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t_conv(12, 6, &model(), Convention::Harmonic).unwrap(), 1.105351, epsilon = 1e-6);
        assert_abs_diff_eq!(t_conv(12, 6, &model(), Convention::NaturalLog).unwrap(), 1.171912, epsilon = 1e-6);
    }

    #[test]
    fn t_rpir_examples() {
        for k in 1..12 {
            assert_eq!(
                t_rpir(12, k, 1, &model(), Convention::Harmonic).unwrap(),
                t_conv(12, k, &model(), Convention::Harmonic).unwrap()
            );
        }
        let stat = expected_order_stat(12, 2, &model(), Convention::Harmonic).unwrap();
        assert_abs_diff_eq!(t_rpir(12, 2, 2, &model(), Convention::Harmonic).unwrap(), 0.75 * stat, epsilon = 1e-12);
        assert_abs_diff_eq!(t_rpir(12, 4, 4, &model(), Convention::Harmonic).unwrap(), 1.312697, epsilon = 1e-6);
    }

    fn plan(groups: Vec<Vec<usize>>) -> GroupingPlan {
        GroupingPlan::new(groups).unwrap()
    }

    #[test]
    fn t_one_examples() {
        let h = Convention::Harmonic;
        let e = |n, k| expected_order_stat(n, k, &model(), h).unwrap();
        assert_eq!(t_one_for_grouping(&plan(vec![vec![1], vec![2]]), 1, &model(), h).unwrap(), e(2, 2));
        assert_abs_diff_eq!(
            t_one_for_grouping(&plan(vec![vec![1, 2], vec![3, 4]]), 2, &model(), h).unwrap(),
            e(4, 4) / 2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            t_one_for_grouping(&plan(vec![vec![1, 4], vec![2, 3]]), 2, &model(), h).unwrap(),
            e(4, 4) / 2.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            t_one_for_grouping(&plan(vec![vec![1, 4], vec![2, 3]]), 3, &model(), h),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn t_async_examples() {
        let h = Convention::Harmonic;
        // singleton groups: slowest worker alone
        let p = plan(vec![vec![1], vec![2], vec![3]]);
        assert_abs_diff_eq!(
            t_async_for_grouping(&p, &model(), h).unwrap(),
            0.5 * expected_order_stat(3, 3, &model(), h).unwrap(),
            epsilon = 1e-12
        );
        let p = plan(vec![(1..=6).collect(), (7..=12).collect()]);
        assert_abs_diff_eq!(t_async_for_grouping(&p, &model(), h).unwrap(), 2.287482, epsilon = 1e-6);
    }

    #[test]
    fn async_skips_divergent_member_under_log() {
        let p = plan(vec![(1..=6).collect(), (7..=12).collect()]);
        let e = |k| expected_order_stat(12, k, &model(), Convention::NaturalLog).unwrap();
        let want = 1.0 / (7..=11).map(|k| 1.0 / e(k)).sum::<f64>();
        assert_abs_diff_eq!(
            t_async_for_grouping(&p, &model(), Convention::NaturalLog).unwrap(),
            want,
            epsilon = 1e-12
        );
        let lonely = plan(vec![vec![1], vec![2]]);
        assert!(matches!(
            t_async_for_grouping(&lonely, &model(), Convention::NaturalLog),
            Err(Error::Divergent { .. })
        ));
    }

    fn count_oracle(workers: usize, n: usize) -> BigUint {
        let fact = |k: usize| (1..=k).fold(BigUint::from(1u32), |a, i| a * BigUint::from(i));
        fact(workers) / (num_traits::pow(fact(workers / n), n) * fact(n))
    }

    #[test]
    fn grouping_counts() {
        for (w, n) in [(4, 2), (12, 2), (12, 3), (12, 4), (8, 4), (6, 6), (16, 4), (20, 2)] {
            assert_eq!(BigUint::from(grouping_count(w, n).unwrap()), count_oracle(w, n), "{w} {n}");
        }
        assert_eq!(grouping_count(12, 2), Some(462));
        assert_eq!(grouping_count(400, 2), None);
    }

    #[test]
    fn enumerate_small() {
        let all: Vec<Vec<Vec<usize>>> = enumerate_groupings(4, 2, 100, 0)
            .unwrap()
            .map(|p| p.groups().to_vec())
            .collect();
        assert_eq!(
            all,
            vec![
                vec![vec![1, 2], vec![3, 4]],
                vec![vec![1, 3], vec![2, 4]],
                vec![vec![1, 4], vec![2, 3]],
            ]
        );
        assert!(enumerate_groupings(3, 2, 100, 0).is_err());
    }

    #[test]
    fn enumerate_is_exhaustive_and_unique() {
        for (w, n) in [(12, 2), (12, 3), (8, 4), (9, 3), (6, 1)] {
            let plans: Vec<GroupingPlan> = enumerate_groupings(w, n, DEFAULT_GROUPING_CAP, 0).unwrap().collect();
            let unique: HashSet<Vec<Vec<usize>>> = plans
                .iter()
                .map(|p| {
                    let mut g = p.groups().to_vec();
                    g.sort();
                    g
                })
                .collect();
            assert_eq!(plans.len() as u128, grouping_count(w, n).unwrap());
            assert_eq!(unique.len(), plans.len());
        }
    }

    #[test]
    fn sampled_when_over_cap() {
        let g = enumerate_groupings(12, 2, 10, 5).unwrap();
        assert!(!g.is_exhaustive());
        let a: Vec<_> = g.collect();
        let b: Vec<_> = enumerate_groupings(12, 2, 10, 5).unwrap().collect();
        assert_eq!(a.len(), 10);
        assert_eq!(a, b);
    }

    #[test]
    fn average_examples() {
        let h = Convention::Harmonic;
        let single = average_over_groupings(Metric::Async, 3, 3, 1, &model(), h, 100, 0).unwrap();
        let p = plan(vec![vec![1], vec![2], vec![3]]);
        assert_eq!(single.plans, 1);
        assert_eq!(single.mean, t_async_for_grouping(&p, &model(), h).unwrap());

        // N = 4, n = 2, m = 1: slowest group's fastest member is rank 3, 2, 2
        let e = |k| expected_order_stat(4, k, &model(), h).unwrap();
        let want = (e(3) + e(2) + e(2)) / 3.0;
        let got = average_over_groupings(Metric::OneShot, 4, 2, 1, &model(), h, 100, 0).unwrap();
        assert_abs_diff_eq!(got.mean, want, epsilon = 1e-12);
        assert!(got.exhaustive);
    }

    #[test]
    fn comm_load_examples() {
        for s in [Scheme::Rpir, Scheme::OneShot, Scheme::Async] {
            assert_eq!(comm_load(s, 12, 1, 1).unwrap(), Ratio::from_integer(12));
        }
        assert_eq!(comm_load(Scheme::Async, 12, 5, 5).unwrap(), comm_load(Scheme::Rpir, 12, 5, 5).unwrap());
        assert_eq!(comm_load(Scheme::OneShot, 12, 4, 1).unwrap(), Ratio::from_integer(3));
        assert!(comm_load(Scheme::Async, 12, 2, 3).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let m = DelayModel::new(0.1f32, 0.1f32).unwrap();
        let v = expected_order_stat(12, 6, &m, Convention::Harmonic).unwrap();
        assert!((v - 6.632107f32).abs() < 1e-4);
    }

    #[test]
    fn convention_parsing() {
        assert_eq!("log2".parse::<Convention>().unwrap(), Convention::Log2);
        assert_eq!("harmonic".parse::<Convention>().unwrap(), Convention::Harmonic);
        assert!("nope".parse::<Convention>().is_err());
    }
}
