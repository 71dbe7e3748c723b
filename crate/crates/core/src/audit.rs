//! Executable privacy audit: what a single worker sees must not depend on the
//! desired index.
//!
//! Two checks. The coupling check is exact: for every pair of desired
//! indices it builds, for each worker, a plan under the other index in which
//! that worker's point list is unchanged, and requires the serialized queries
//! to be byte-identical; it also requires the shares of `A` to be identical
//! across desired indices. The marginal check is statistical: every
//! position of the point list must look uniform over the nonzero residues.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::codec::PointAssignment;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{Matrix, PartitionSpec};
use crate::protocol::{plan_session, HonestQueries, QueryBuilder, SessionPlan, WorkerView};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditConfig {
    /// Seeds for the coupling and share checks.
    pub coupling_seeds: u64,
    /// Seeds for the marginal uniformity check.
    pub marginal_seeds: u64,
    pub base_seed: u64,
    pub significance: f64,
    pub bins: usize,
    /// Worker whose point list feeds the marginal check.
    pub observed_worker: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            coupling_seeds: 100,
            marginal_seeds: 10_000,
            base_seed: 0,
            significance: 0.01,
            bins: 16,
            observed_worker: 0,
        }
    }
}

/// Result of the chi-square test for one (desired index, library position).
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalStat {
    pub desired: usize,
    pub position: usize,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Bin with the largest contribution to `chi2`.
    pub worst_bin: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AuditFinding {
    /// Query bytes differ although the worker's point list is the same.
    QueryCoupling {
        seed: u64,
        desired: usize,
        other: usize,
        worker: usize,
        offset: usize,
    },
    /// The worker's share of `A` differs between desired indices.
    ShareDependence {
        seed: u64,
        desired: usize,
        other: usize,
        worker: usize,
        offset: usize,
    },
    /// A position of the point list fails the uniformity test.
    Marginal {
        desired: usize,
        position: usize,
        p_value: f64,
        worst_bin: usize,
    },
}

impl std::fmt::Display for AuditFinding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AuditFinding::QueryCoupling { seed, desired, other, worker, offset } => write!(
                f,
                "coupling check failed: seed {seed}, D = {} vs D' = {}, worker {worker}, first differing query byte at offset {offset}",
                desired + 1,
                other + 1
            ),
            AuditFinding::ShareDependence { seed, desired, other, worker, offset } => write!(
                f,
                "share check failed: seed {seed}, D = {} vs D' = {}, worker {worker}, first differing byte at offset {offset}",
                desired + 1,
                other + 1
            ),
            AuditFinding::Marginal { desired, position, p_value, worst_bin } => write!(
                f,
                "marginal check failed: D = {}, position {}, p = {p_value:.4}, worst bin {worst_bin}",
                desired + 1,
                position + 1
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuditReport {
    pub queries_compared: usize,
    pub shares_compared: usize,
    pub marginals: Vec<MarginalStat>,
    pub findings: Vec<AuditFinding>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn coupling_passed(&self) -> bool {
        !self
            .findings
            .iter()
            .any(|f| matches!(f, AuditFinding::QueryCoupling { .. }))
    }

    pub fn shares_passed(&self) -> bool {
        !self
            .findings
            .iter()
            .any(|f| matches!(f, AuditFinding::ShareDependence { .. }))
    }

    pub fn marginals_passed(&self) -> bool {
        self.marginals.iter().all(|m| m.passed)
    }
}

/// Runs the audit with the honest query builder.
pub fn audit_query_invariance<F: PrimeField>(spec: &PartitionSpec, config: &AuditConfig) -> Result<AuditReport> {
    audit_with_builder::<F, _>(spec, config, &HonestQueries)
}

/// Runs the audit against an arbitrary query builder.
pub fn audit_with_builder<F, B>(spec: &PartitionSpec, config: &AuditConfig, builder: &B) -> Result<AuditReport>
where
    F: PrimeField,
    B: QueryBuilder<F> + ?Sized,
{
    let library_size = spec.library_size();
    if library_size < 2 {
        return Err(Error::InvalidArgument("audit requires M ≥ 2".into()));
    }
    if config.observed_worker >= spec.workers() {
        return Err(Error::InvalidArgument("observed worker out of range".into()));
    }
    let mut report = AuditReport::default();

    let mut rng = ChaCha8Rng::seed_from_u64(config.base_seed);
    let a: Matrix<F> = Matrix::random(spec.m(), 2, &mut rng);

    for seed in config.base_seed..config.base_seed + config.coupling_seeds {
        let plans: Vec<SessionPlan<F>> = (0..library_size)
            .map(|d| plan_session(spec, d, seed))
            .collect::<Result<_>>()?;
        let shares: Vec<Vec<Vec<u8>>> = plans
            .iter()
            .map(|plan| {
                (0..spec.workers())
                    .map(|w| Ok(share_bytes(&WorkerView::new(plan, &a, w)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        for desired in 0..library_size {
            for other in 0..library_size {
                for worker in 0..spec.workers() {
                    let base = builder.build(&plans[desired], worker).to_bytes();
                    let coupled = coupled_plan(&plans[desired], worker, other)?;
                    let moved = builder.build(&coupled, worker).to_bytes();
                    report.queries_compared += 1;
                    if let Some(offset) = first_difference(&base, &moved) {
                        report.findings.push(AuditFinding::QueryCoupling {
                            seed,
                            desired,
                            other,
                            worker,
                            offset,
                        });
                    }

                    report.shares_compared += 1;
                    if let Some(offset) = first_difference(&shares[desired][worker], &shares[other][worker]) {
                        report.findings.push(AuditFinding::ShareDependence {
                            seed,
                            desired,
                            other,
                            worker,
                            offset,
                        });
                    }
                }
            }
        }
    }

    marginal_check::<F>(spec, config, &mut report)?;
    Ok(report)
}

fn share_bytes<F: PrimeField>(view: &WorkerView<F>) -> Vec<u8> {
    view.encoded_a
        .evaluations
        .iter()
        .flat_map(Matrix::to_le_bytes)
        .collect()
}

fn first_difference(a: &[u8], b: &[u8]) -> Option<usize> {
    a.iter()
        .zip(b)
        .position(|(x, y)| x != y)
        .or_else(|| (a.len() != b.len()).then(|| a.len().min(b.len())))
}

/// A plan for desired index `other` in which `worker` sees exactly the point
/// list it sees under `plan`: the worker's group point becomes the entry at
/// `other`, and every other entry becomes a shared point.
fn coupled_plan<F: PrimeField>(plan: &SessionPlan<F>, worker: usize, other: usize) -> Result<SessionPlan<F>> {
    let group = plan.group_of[worker];
    let list = plan.assignment.per_matrix_points(group);
    let mut group_points = plan.assignment.group_points().to_vec();
    group_points[group] = list[other];
    let shared = list
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != other)
        .map(|(_, p)| *p)
        .collect();
    let mut coupled = plan.clone();
    coupled.desired = other;
    coupled.assignment = PointAssignment::new(other, group_points, shared)?;
    Ok(coupled)
}

/// Probability of each residue bin under the uniform law on `1..p`.
fn bin_probabilities(p: u64, bins: usize) -> Vec<f64> {
    // bin(v) = floor(v * bins / p); lower edge of bin b is ceil(b * p / bins)
    let edge = |b: usize| ((b as u128 * p as u128).div_ceil(bins as u128)) as u64;
    (0..bins)
        .map(|b| {
            let mut count = edge(b + 1) - edge(b);
            if b == 0 {
                count -= 1; // zero is never drawn
            }
            count as f64 / (p - 1) as f64
        })
        .collect()
}

fn bin_of(v: u64, p: u64, bins: usize) -> usize {
    (v as u128 * bins as u128 / p as u128) as usize
}

fn marginal_check<F: PrimeField>(spec: &PartitionSpec, config: &AuditConfig, report: &mut AuditReport) -> Result<()> {
    if config.marginal_seeds == 0 {
        return Ok(());
    }
    let m_lib = spec.library_size();
    let bins = config.bins;
    let mut counts = vec![vec![vec![0u64; bins]; m_lib]; m_lib];
    for seed in config.base_seed..config.base_seed + config.marginal_seeds {
        for (desired, per_pos) in counts.iter_mut().enumerate() {
            let plan: SessionPlan<F> = plan_session(spec, desired, seed)?;
            let points = plan
                .assignment
                .per_matrix_points(plan.group_of[config.observed_worker]);
            for (k, p) in points.iter().enumerate() {
                per_pos[k][bin_of(p.residue(), F::MODULUS, bins)] += 1;
            }
        }
    }

    let probs = bin_probabilities(F::MODULUS, bins);
    let used = probs.iter().filter(|&&q| q > 0.0).count();
    let dof = used.saturating_sub(1).max(1);
    let law = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let total = config.marginal_seeds as f64;
    for (desired, per_pos) in counts.iter().enumerate() {
        for (position, observed) in per_pos.iter().enumerate() {
            let mut chi2 = 0.0;
            let mut worst = (0usize, f64::MIN);
            for (b, (&o, &q)) in observed.iter().zip(&probs).enumerate() {
                if q == 0.0 {
                    continue;
                }
                let e = total * q;
                let term = (o as f64 - e).powi(2) / e;
                chi2 += term;
                if term > worst.1 {
                    worst = (b, term);
                }
            }
            let p_value = 1.0 - law.cdf(chi2);
            let passed = p_value >= config.significance;
            if !passed {
                report.findings.push(AuditFinding::Marginal {
                    desired,
                    position,
                    p_value,
                    worst_bin: worst.0,
                });
            }
            report.marginals.push(MarginalStat {
                desired,
                position,
                chi2,
                dof,
                p_value,
                worst_bin: worst.0,
                passed,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::protocol::{LeakyQueries, QUERY_MAGIC};

    type F = Fp<2305843009213693951>;

    fn small_config() -> AuditConfig {
        AuditConfig {
            coupling_seeds: 3,
            marginal_seeds: 500,
            ..AuditConfig::default()
        }
    }

    #[test]
    fn bins_cover_nonzero_residues() {
        let probs = bin_probabilities(101, 16);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let counted: Vec<usize> = (1..101u64).fold(vec![0; 16], |mut acc, v| {
            acc[bin_of(v, 101, 16)] += 1;
            acc
        });
        for (c, q) in counted.iter().zip(&probs) {
            assert!((*c as f64 / 100.0 - q).abs() < 1e-12);
        }
    }

    #[test]
    fn coupled_plan_keeps_the_worker_view() {
        let spec = PartitionSpec::new(2, 3, 4, 12, 1).unwrap();
        let plan = plan_session::<F>(&spec, 2, 5).unwrap();
        for other in 0..4 {
            let c = coupled_plan(&plan, 7, other).unwrap();
            assert_eq!(c.desired, other);
            assert_eq!(
                c.assignment.per_matrix_points(c.group_of[7]),
                plan.assignment.per_matrix_points(plan.group_of[7])
            );
        }
    }

    #[test]
    fn honest_audit_passes() {
        let spec = PartitionSpec::new(2, 3, 4, 12, 1).unwrap();
        let report = audit_query_invariance::<F>(&spec, &small_config()).unwrap();
        assert!(report.passed(), "{:?}", report.findings);
        assert_eq!(report.queries_compared, 3 * 16 * 12);
        assert_eq!(report.marginals.len(), 16);
    }

    #[test]
    fn leaky_builder_fails_at_opcode() {
        let spec = PartitionSpec::new(2, 3, 4, 12, 1).unwrap();
        let report = audit_with_builder::<F, _>(&spec, &small_config(), &LeakyQueries).unwrap();
        assert!(!report.coupling_passed());
        assert!(report.shares_passed());
        let opcode_offset = QUERY_MAGIC.len() + 1 + 24 + 8 * 4;
        for f in &report.findings {
            if let AuditFinding::QueryCoupling { offset, desired, other, .. } = f {
                assert_eq!(*offset, opcode_offset);
                assert_ne!(desired, other);
            }
        }
    }

    #[test]
    fn audit_needs_two_matrices() {
        let spec = PartitionSpec::new(2, 3, 1, 12, 1).unwrap();
        let err = audit_query_invariance::<F>(&spec, &small_config()).unwrap_err();
        assert!(err.to_string().contains("audit requires M ≥ 2"));
    }
}
