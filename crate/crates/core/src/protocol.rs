//! Master/worker session: planning, per-worker queries, worker execution and
//! orchestration of a full decode.
//!
//! Workers and groups are indexed from zero. A worker never learns its group
//! or the desired index: its [`WorkerView`] is the query (a point per library
//! matrix plus `n` and `L`) and its share of the encoded `A`.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codec::{
    encode_library, worker_subcompute, ConsumedResult, EncodedShareA, PointAssignment, SubResult,
};
use crate::error::{Error, Result};
use crate::field::{sample_distinct_points, PrimeField, SampleScalar, Scalar};
use crate::matrix::{Matrix, PartitionSpec};

pub const QUERY_MAGIC: [u8; 4] = *b"PPCQ";
pub const QUERY_VERSION: u8 = 1;
pub const OPCODE_MULTIPLY: u8 = 1;

// Independent ChaCha streams per sampling purpose, so that e.g. the x-points
// do not shift when the number of library points changes.
pub(crate) const STREAM_GROUPING: u64 = 1;
pub(crate) const STREAM_LIBRARY_POINTS: u64 = 2;
pub(crate) const STREAM_X_POINTS: u64 = 3;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Instruction record sent to one worker: partition the library into
/// `n - 1` column bands, evaluate matrix `k` at `points[k]`, sum, and
/// multiply each of the `per_worker` shares by the sum.
#[derive(Clone, Debug, PartialEq)]
pub struct Query<F> {
    pub version: u8,
    pub n: u64,
    pub per_worker: u64,
    pub points: Vec<F>,
    pub opcode: u8,
}

impl<F> Query<F> {
    pub fn new(n: usize, per_worker: usize, points: Vec<F>) -> Self {
        Query {
            version: QUERY_VERSION,
            n: n as u64,
            per_worker: per_worker as u64,
            points,
            opcode: OPCODE_MULTIPLY,
        }
    }

    pub fn library_size(&self) -> usize {
        self.points.len()
    }
}

impl<F: PrimeField> Query<F> {
    /// Canonical wire form: `"PPCQ"`, version byte, `n`, `L`, `M` and the `M`
    /// point residues as little-endian u64, then the opcode byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 1 + 24 + 8 * self.points.len() + 1);
        out.extend_from_slice(&QUERY_MAGIC);
        out.push(self.version);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.per_worker.to_le_bytes());
        out.extend_from_slice(&(self.points.len() as u64).to_le_bytes());
        for p in &self.points {
            out.extend_from_slice(&p.residue().to_le_bytes());
        }
        out.push(self.opcode);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let err = |msg: &str| Error::Parse(format!("query: {msg}"));
        if bytes.len() < 4 + 1 + 24 + 1 {
            return Err(err("truncated"));
        }
        if bytes[..4] != QUERY_MAGIC {
            return Err(err("bad magic"));
        }
        let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
        let version = bytes[4];
        let (n, per_worker, m) = (word(5), word(13), word(21));
        let expected = 29usize
            .checked_add((m as usize).checked_mul(8).ok_or_else(|| err("length overflow"))?)
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| err("length overflow"))?;
        if bytes.len() != expected {
            return Err(err(&format!("expected {expected} bytes, got {}", bytes.len())));
        }
        let mut points = Vec::with_capacity(m as usize);
        for i in 0..m as usize {
            let v = word(29 + 8 * i);
            if v >= F::MODULUS {
                return Err(err("point residue not reduced"));
            }
            points.push(F::from_u64(v));
        }
        Ok(Query {
            version,
            n,
            per_worker,
            points,
            opcode: bytes[expected - 1],
        })
    }
}

/// Everything the master decides before a session starts.
#[derive(Clone, Debug, PartialEq)]
pub struct SessionPlan<F> {
    pub spec: PartitionSpec,
    pub desired: usize,
    /// `n` groups of `N / n` worker indices each, sorted within a group.
    pub grouping: Vec<Vec<usize>>,
    /// Group of every worker.
    pub group_of: Vec<usize>,
    pub assignment: PointAssignment<F>,
    /// `L` distinct `x` points per worker, distinct across the session.
    pub x_points: Vec<Vec<F>>,
    pub seed: u64,
}

/// Samples a grouping, the library points and the `x` points for a session.
///
/// Grouping and `x` points come from streams that do not involve `desired`,
/// so the shares of `A` are identical for every choice of desired index.
pub fn plan_session<F: SampleScalar>(spec: &PartitionSpec, desired: usize, seed: u64) -> Result<SessionPlan<F>> {
    if desired >= spec.library_size() {
        return Err(Error::InvalidArgument(format!(
            "desired index {desired} outside a library of {}",
            spec.library_size()
        )));
    }
    let n = spec.n();
    let workers = spec.workers();
    let size = spec.group_size();

    let mut rng = stream_rng(seed, STREAM_GROUPING);
    let mut ranks: Vec<usize> = (0..workers).collect();
    ranks.shuffle(&mut rng);
    let grouping: Vec<Vec<usize>> = ranks
        .chunks(size)
        .map(|c| {
            let mut g = c.to_vec();
            g.sort_unstable();
            g
        })
        .collect();
    let mut group_of = vec![0; workers];
    for (t, g) in grouping.iter().enumerate() {
        for &w in g {
            group_of[w] = t;
        }
    }

    let mut rng = stream_rng(seed, STREAM_LIBRARY_POINTS);
    let mut ys = sample_distinct_points::<F, _>(n + spec.library_size() - 1, &HashSet::new(), &mut rng)?;
    let shared = ys.split_off(n);
    let assignment = PointAssignment::new(desired, ys, shared)?;

    let mut rng = stream_rng(seed, STREAM_X_POINTS);
    let per = spec.per_worker();
    let xs = sample_distinct_points::<F, _>(workers * per, &HashSet::new(), &mut rng)?;
    let x_points = xs.chunks(per).map(<[F]>::to_vec).collect();

    Ok(SessionPlan {
        spec: *spec,
        desired,
        grouping,
        group_of,
        assignment,
        x_points,
        seed,
    })
}

/// The query for `worker`: its group point at the desired position, the
/// shared points elsewhere.
pub fn build_query<F: Scalar>(plan: &SessionPlan<F>, worker: usize) -> Query<F> {
    Query::new(
        plan.spec.n(),
        plan.spec.per_worker(),
        plan.assignment.per_matrix_points(plan.group_of[worker]),
    )
}

/// Strategy for turning a plan into per-worker queries. The audit runs
/// against any builder so that a leaking one can be shown to fail it.
pub trait QueryBuilder<F> {
    fn build(&self, plan: &SessionPlan<F>, worker: usize) -> Query<F>;
}

/// [`build_query`].
#[derive(Clone, Copy, Debug, Default)]
pub struct HonestQueries;

impl<F: Scalar> QueryBuilder<F> for HonestQueries {
    fn build(&self, plan: &SessionPlan<F>, worker: usize) -> Query<F> {
        build_query(plan, worker)
    }
}

/// Deliberately broken builder that writes the desired index into the
/// opcode byte. Exists only to exercise the audit.
#[derive(Clone, Copy, Debug, Default)]
pub struct LeakyQueries;

impl<F: Scalar> QueryBuilder<F> for LeakyQueries {
    fn build(&self, plan: &SessionPlan<F>, worker: usize) -> Query<F> {
        let mut q = build_query(plan, worker);
        q.opcode = OPCODE_MULTIPLY.wrapping_add(plan.desired as u8);
        q
    }
}

/// What one worker receives.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkerView<F> {
    pub query: Query<F>,
    pub encoded_a: EncodedShareA<F>,
}

impl<F: Scalar> WorkerView<F> {
    pub fn new(plan: &SessionPlan<F>, a: &Matrix<F>, worker: usize) -> Result<Self> {
        Self::with_builder(plan, a, worker, &HonestQueries)
    }

    pub fn with_builder<B: QueryBuilder<F> + ?Sized>(
        plan: &SessionPlan<F>,
        a: &Matrix<F>,
        worker: usize,
        builder: &B,
    ) -> Result<Self> {
        if worker >= plan.spec.workers() {
            return Err(Error::InvalidArgument(format!(
                "worker {worker} outside 0..{}",
                plan.spec.workers()
            )));
        }
        Ok(WorkerView {
            query: builder.build(plan, worker),
            encoded_a: EncodedShareA::new(a, plan.spec.m(), worker, plan.x_points[worker].clone())?,
        })
    }
}

/// A result as delivered by a worker: who produced it and its position in
/// that worker's sequence. The master maps it to a group and `x` point.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkerOutput<F> {
    pub worker: usize,
    pub index: usize,
    pub value: Matrix<F>,
}

/// Runs one worker: encode the library per the query, then multiply each
/// share in order.
pub fn run_worker<F: Scalar>(view: &WorkerView<F>, library: &[Matrix<F>]) -> Result<Vec<WorkerOutput<F>>> {
    let q = &view.query;
    if q.per_worker as usize != view.encoded_a.evaluations.len() {
        return Err(Error::InvalidArgument(format!(
            "query asks for {} sub-computations but {} shares were sent",
            q.per_worker,
            view.encoded_a.evaluations.len()
        )));
    }
    let encoded_b = encode_library(library, q.n as usize, &q.points)?;
    view.encoded_a
        .evaluations
        .iter()
        .enumerate()
        .map(|(index, share)| {
            Ok(WorkerOutput {
                worker: view.encoded_a.worker,
                index,
                value: worker_subcompute(share, &encoded_b)?,
            })
        })
        .collect()
}

/// Round-robin delivery: every worker's first result, then every second
/// result, and so on.
pub fn sequential_arrival_order(workers: usize, per_worker: usize) -> Vec<(usize, usize)> {
    (0..per_worker)
        .flat_map(|j| (0..workers).map(move |w| (w, j)))
        .collect()
}

/// Delivery order when worker `w` needs `delays[w]` per sub-computation, so
/// its `j`-th result lands at `(j + 1) * delays[w]`. Ties go to the lower
/// worker index, then the lower sequence index.
pub fn arrival_order_from_delays(delays: &[f64], per_worker: usize) -> Vec<(usize, usize)> {
    let mut events: Vec<(f64, usize, usize)> = delays
        .iter()
        .enumerate()
        .flat_map(|(w, &d)| (0..per_worker).map(move |j| ((j + 1) as f64 * d, w, j)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    events.into_iter().map(|(_, w, j)| (w, j)).collect()
}

/// Which results the master consumed, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub recovery_threshold: usize,
    pub consumed: Vec<ConsumedResult>,
    /// Results delivered before decoding became possible.
    pub read: usize,
}

impl Transcript {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "K = {} consumed = {} read = {}\n",
            self.recovery_threshold,
            self.consumed.len(),
            self.read
        );
        for c in &self.consumed {
            let _ = writeln!(s, "worker {} result {} group {}", c.worker, c.index, c.group);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionOutcome<F> {
    pub product: Matrix<F>,
    pub transcript: Transcript,
}

/// Runs every worker, delivers their outputs in `arrival_order` and decodes.
///
/// `arrival_order` must list every `(worker, index)` pair exactly once.
pub fn orchestrate<F: Scalar>(
    plan: &SessionPlan<F>,
    a: &Matrix<F>,
    library: &[Matrix<F>],
    arrival_order: &[(usize, usize)],
) -> Result<SessionOutcome<F>> {
    let spec = &plan.spec;
    if library.len() != spec.library_size() {
        return Err(Error::InvalidArgument(format!(
            "library has {} matrices, plan expects {}",
            library.len(),
            spec.library_size()
        )));
    }
    spec.check_dims(a.rows(), library[0].cols())?;
    check_arrival_order(arrival_order, spec.workers(), spec.per_worker())?;

    let outputs: Vec<Vec<WorkerOutput<F>>> = (0..spec.workers())
        .into_par_iter()
        .map(|w| run_worker(&WorkerView::new(plan, a, w)?, library))
        .collect::<Result<_>>()?;

    let stream = arrival_order.iter().map(|&(w, j)| {
        let out = &outputs[w][j];
        SubResult {
            worker: w,
            index: j,
            group: plan.group_of[w],
            x_point: plan.x_points[w][j].clone(),
            value: out.value.clone(),
        }
    });
    let recovery = crate::codec::recover_product(stream, spec, plan.assignment.group_points())?;
    Ok(SessionOutcome {
        product: recovery.product,
        transcript: Transcript {
            recovery_threshold: spec.recovery_threshold(),
            consumed: recovery.consumed,
            read: recovery.read,
        },
    })
}

fn check_arrival_order(order: &[(usize, usize)], workers: usize, per_worker: usize) -> Result<()> {
    let mut seen = vec![false; workers * per_worker];
    for &(w, j) in order {
        if w >= workers || j >= per_worker {
            return Err(Error::InvalidArgument(format!(
                "arrival ({w}, {j}) outside {workers} workers x {per_worker} results"
            )));
        }
        if std::mem::replace(&mut seen[w * per_worker + j], true) {
            return Err(Error::InvalidArgument(format!("arrival ({w}, {j}) listed twice")));
        }
    }
    if order.len() != seen.len() {
        return Err(Error::InvalidArgument(format!(
            "arrival order covers {} of {} results",
            order.len(),
            seen.len()
        )));
    }
    Ok(())
}
