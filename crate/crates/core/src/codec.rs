//! The private polynomial code: encoding of `A` and of the library, the
//! worker's sub-computation, and the twofold decoder.
//!
//! `A` is split into `m` row bands and encoded as `Ã(x) = Σ_{l<m} A_l x^l`.
//! Each library matrix `B_k` is split into `n - 1` column bands and encoded
//! as `B̃_k(y) = Σ_{l=1}^{n-1} B_{k,l} y^l` (no constant term). A worker
//! evaluates every `B̃_k` at one point from its query and sums them; for a
//! worker in group `t` the desired matrix sits at the group point `y_t` and
//! every other matrix at a point shared by all workers. The master first
//! interpolates in `x` within each group, then in `y` across groups, where the
//! contribution of the undesired matrices is the constant term and is thrown
//! away.

use crate::error::{Error, Result};
use crate::field::{pairwise_distinct, LagrangeBasis, Poly, Scalar};
use crate::matrix::{assemble_product, Matrix, PartitionSpec};

/// Evaluations of `Ã` handed to one worker.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedShareA<F> {
    pub worker: usize,
    pub x_points: Vec<F>,
    pub evaluations: Vec<Matrix<F>>,
}

impl<F: Scalar> EncodedShareA<F> {
    pub fn new(a: &Matrix<F>, m: usize, worker: usize, x_points: Vec<F>) -> Result<Self> {
        let evaluations = encode_a(a, m, &x_points)?;
        Ok(EncodedShareA {
            worker,
            x_points,
            evaluations,
        })
    }
}

/// Evaluation points for the library in one session.
///
/// `group_points[t]` is where the desired matrix is evaluated for workers of
/// group `t`; `shared_points` holds one point per undesired matrix, in
/// library order with the desired index skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct PointAssignment<F> {
    desired: usize,
    group_points: Vec<F>,
    shared_points: Vec<F>,
}

impl<F: Scalar> PointAssignment<F> {
    pub fn new(desired: usize, group_points: Vec<F>, shared_points: Vec<F>) -> Result<Self> {
        let library_size = shared_points.len() + 1;
        if desired >= library_size {
            return Err(Error::InvalidArgument(format!(
                "desired index {desired} outside a library of {library_size}"
            )));
        }
        if group_points.len() < 2 {
            return Err(Error::InvalidArgument("at least two group points required".into()));
        }
        let all: Vec<F> = group_points.iter().chain(&shared_points).cloned().collect();
        if all.iter().any(F::is_zero) {
            return Err(Error::InvalidPoint("library evaluation points must be nonzero".into()));
        }
        if !pairwise_distinct(&all) {
            return Err(Error::InvalidPoint(
                "group and shared points must be pairwise distinct".into(),
            ));
        }
        Ok(PointAssignment {
            desired,
            group_points,
            shared_points,
        })
    }

    pub fn desired(&self) -> usize {
        self.desired
    }

    pub fn library_size(&self) -> usize {
        self.shared_points.len() + 1
    }

    pub fn group_points(&self) -> &[F] {
        &self.group_points
    }

    pub fn shared_points(&self) -> &[F] {
        &self.shared_points
    }

    /// Shared point of undesired library position `k`.
    pub fn shared_point(&self, k: usize) -> Option<&F> {
        match k.cmp(&self.desired) {
            std::cmp::Ordering::Less => self.shared_points.get(k),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => self.shared_points.get(k - 1),
        }
    }

    /// The per-matrix point list seen by a worker of `group`, in library
    /// order.
    pub fn per_matrix_points(&self, group: usize) -> Vec<F> {
        (0..self.library_size())
            .map(|k| {
                if k == self.desired {
                    self.group_points[group].clone()
                } else {
                    self.shared_point(k).expect("k != desired").clone()
                }
            })
            .collect()
    }
}

/// One sub-computation result, tagged by the master with the producing
/// worker's group and evaluation point.
#[derive(Clone, Debug, PartialEq)]
pub struct SubResult<F> {
    pub worker: usize,
    pub index: usize,
    pub group: usize,
    pub x_point: F,
    pub value: Matrix<F>,
}

/// `[Ã(x) for x in x_points]` where `Ã(x) = Σ_{l<m} A_l x^l`.
pub fn encode_a<F: Scalar>(a: &Matrix<F>, m: usize, x_points: &[F]) -> Result<Vec<Matrix<F>>> {
    if !pairwise_distinct(x_points) {
        return Err(Error::SingularSystem);
    }
    let poly = Poly::new(a.partition_rows(m)?)?;
    Ok(x_points.iter().map(|x| poly.eval(x)).collect())
}

/// `B̃_k` for one library matrix: zero constant term, then the column bands.
fn library_poly<F: Scalar>(b: &Matrix<F>, col_blocks: usize) -> Result<Poly<F>> {
    let bands = b.partition_cols(col_blocks)?;
    let (rows, cols) = bands[0].shape();
    let mut coeffs = Vec::with_capacity(col_blocks + 1);
    coeffs.push(Matrix::zeros(rows, cols));
    coeffs.extend(bands);
    Poly::new(coeffs)
}

/// Worker-side library encoding `Σ_k B̃_k(points[k])`.
///
/// Every matrix is treated the same way; the worker cannot tell which one is
/// desired from this computation.
pub fn encode_library<F: Scalar>(library: &[Matrix<F>], n: usize, points: &[F]) -> Result<Matrix<F>> {
    if library.is_empty() {
        return Err(Error::InvalidArgument("empty library".into()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n ≥ 2 required, got {n}")));
    }
    if points.len() != library.len() {
        return Err(Error::InvalidArgument(format!(
            "{} evaluation points for a library of {}",
            points.len(),
            library.len()
        )));
    }
    if points.iter().any(F::is_zero) {
        return Err(Error::InvalidPoint("library evaluation points must be nonzero".into()));
    }
    if !pairwise_distinct(points) {
        return Err(Error::InvalidPoint("library evaluation points must be distinct".into()));
    }
    let shape = library[0].shape();
    if library.iter().any(|b| b.shape() != shape) {
        return Err(Error::Shape("library matrices differ in shape".into()));
    }
    let mut acc: Option<Matrix<F>> = None;
    for (b, y) in library.iter().zip(points) {
        let term = library_poly(b, n - 1)?.eval(y);
        match acc.as_mut() {
            None => acc = Some(term),
            Some(sum) => sum.add_assign_matrix(&term)?,
        }
    }
    Ok(acc.expect("non-empty library"))
}

/// The worker's sub-computation: one evaluation of `Ã` times the encoded
/// library.
pub fn worker_subcompute<F: Scalar>(share: &Matrix<F>, encoded_b: &Matrix<F>) -> Result<Matrix<F>> {
    share.matmul(encoded_b)
}

/// First decoding stage: from `m` results of one group, recover the
/// coefficients `Z_{t,0..m-1}` of `Ã(x)·(encoded library of the group)`.
///
/// Uses the first `m` results if more are given.
pub fn decode_stage1<F: Scalar>(group_results: &[SubResult<F>], m: usize) -> Result<Poly<F>> {
    let group = group_results.first().map_or(0, |r| r.group);
    if group_results.len() < m || m == 0 {
        return Err(Error::Insufficient {
            group,
            have: group_results.len(),
            need: m,
        });
    }
    let used = &group_results[..m];
    if used.iter().any(|r| r.group != group) {
        return Err(Error::InvalidArgument(
            "stage-one decoding mixes results from different groups".into(),
        ));
    }
    let points: Vec<F> = used.iter().map(|r| r.x_point.clone()).collect();
    let values: Vec<Matrix<F>> = used.iter().map(|r| r.value.clone()).collect();
    LagrangeBasis::new(&points)?.apply(&values)
}

/// Full interpolation in `y` of one coefficient index across the groups,
/// including the constant (noise) term.
pub fn interpolate_in_y<F: Scalar>(per_group_coeff: &[Matrix<F>], group_points: &[F]) -> Result<Poly<F>> {
    if per_group_coeff.len() != group_points.len() {
        return Err(Error::Shape(format!(
            "{} coefficients for {} group points",
            per_group_coeff.len(),
            group_points.len()
        )));
    }
    LagrangeBasis::new(group_points)?.apply(per_group_coeff)
}

/// Second decoding stage: returns `[A_l B_{D,r}]` for `r = 1..n-1`, dropping
/// the constant term contributed by the undesired matrices.
pub fn decode_stage2<F: Scalar>(per_group_coeff: &[Matrix<F>], group_points: &[F]) -> Result<Vec<Matrix<F>>> {
    let mut coeffs = interpolate_in_y(per_group_coeff, group_points)?.into_coeffs();
    coeffs.remove(0);
    Ok(coeffs)
}

/// The constant terms `c_l = A_l · Σ_{k≠D} B̃_k(y_{j_k})` the decoder
/// discards, recomputed from the public library.
pub fn noise_terms<F: Scalar>(
    a: &Matrix<F>,
    library: &[Matrix<F>],
    assignment: &PointAssignment<F>,
    m: usize,
) -> Result<Vec<Matrix<F>>> {
    let n = assignment.group_points().len();
    let mut noise: Option<Matrix<F>> = None;
    for (k, b) in library.iter().enumerate() {
        let Some(y) = assignment.shared_point(k) else {
            continue;
        };
        let term = library_poly(b, n - 1)?.eval(y);
        match noise.as_mut() {
            None => noise = Some(term),
            Some(sum) => sum.add_assign_matrix(&term)?,
        }
    }
    let bands = a.partition_rows(m)?;
    let cols = library
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty library".into()))?
        .cols()
        / (n - 1);
    bands
        .iter()
        .map(|al| match &noise {
            Some(sum) => al.matmul(sum),
            None => Ok(Matrix::zeros(al.rows(), cols)),
        })
        .collect()
}

/// Identifies a consumed result in the decoding transcript.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConsumedResult {
    pub worker: usize,
    pub index: usize,
    pub group: usize,
}

/// Output of a successful decode.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery<F> {
    pub product: Matrix<F>,
    /// The `mn` results actually used, in arrival order.
    pub consumed: Vec<ConsumedResult>,
    /// How many results were read from the stream before decoding became
    /// possible.
    pub read: usize,
}

/// Streaming twofold decoder.
///
/// Keeps the first `m` results of every group in arrival order and ignores
/// the rest; decoding needs exactly `mn` results.
#[derive(Clone, Debug)]
pub struct Decoder<F> {
    spec: PartitionSpec,
    group_points: Vec<F>,
    buffers: Vec<Vec<SubResult<F>>>,
    consumed: Vec<ConsumedResult>,
    read: usize,
    expected_noise: Option<Vec<Matrix<F>>>,
}

impl<F: Scalar> Decoder<F> {
    pub fn new(spec: PartitionSpec, group_points: Vec<F>) -> Result<Self> {
        if group_points.len() != spec.n() {
            return Err(Error::InvalidArgument(format!(
                "{} group points for n = {}",
                group_points.len(),
                spec.n()
            )));
        }
        Ok(Decoder {
            spec,
            group_points,
            buffers: vec![Vec::new(); spec.n()],
            consumed: Vec::new(),
            read: 0,
            expected_noise: None,
        })
    }

    /// Debug mode: compare every discarded constant term against `noise`
    /// (see [`noise_terms`]) and fail on mismatch.
    pub fn with_noise_check(mut self, noise: Vec<Matrix<F>>) -> Self {
        self.expected_noise = Some(noise);
        self
    }

    pub fn is_complete(&self) -> bool {
        self.buffers.iter().all(|b| b.len() >= self.spec.m())
    }

    /// Offers one result; returns whether every group now has `m`.
    pub fn push(&mut self, result: SubResult<F>) -> Result<bool> {
        if result.group >= self.spec.n() {
            return Err(Error::InvalidArgument(format!(
                "result tagged with group {} but n = {}",
                result.group,
                self.spec.n()
            )));
        }
        self.read += 1;
        let buf = &mut self.buffers[result.group];
        if buf.len() < self.spec.m() {
            self.consumed.push(ConsumedResult {
                worker: result.worker,
                index: result.index,
                group: result.group,
            });
            buf.push(result);
        }
        Ok(self.is_complete())
    }

    /// Runs both decoding stages.
    pub fn finish(self) -> Result<Recovery<F>> {
        let m = self.spec.m();
        if let Some((group, buf)) = self.buffers.iter().enumerate().find(|(_, b)| b.len() < m) {
            return Err(Error::Insufficient {
                group,
                have: buf.len(),
                need: m,
            });
        }
        let per_group: Vec<Vec<Matrix<F>>> = self
            .buffers
            .iter()
            .map(|b| decode_stage1(b, m).map(Poly::into_coeffs))
            .collect::<Result<_>>()?;

        let y_basis = LagrangeBasis::new(&self.group_points)?;
        let mut grid = Vec::with_capacity(m);
        for l in 0..m {
            let column: Vec<Matrix<F>> = per_group.iter().map(|z| z[l].clone()).collect();
            let mut coeffs = y_basis.apply(&column)?.into_coeffs();
            let constant = coeffs.remove(0);
            if let Some(noise) = &self.expected_noise {
                if noise.get(l) != Some(&constant) {
                    return Err(Error::NoiseMismatch { block: l });
                }
            }
            grid.push(coeffs);
        }
        Ok(Recovery {
            product: assemble_product(&grid)?,
            consumed: self.consumed,
            read: self.read,
        })
    }
}

/// Feeds `results` in arrival order until every group has `m`, then
/// decodes. Results after that point are not read.
pub fn recover_product<F, I>(results: I, spec: &PartitionSpec, group_points: &[F]) -> Result<Recovery<F>>
where
    F: Scalar,
    I: IntoIterator<Item = SubResult<F>>,
{
    let mut decoder = Decoder::new(*spec, group_points.to_vec())?;
    for r in results {
        if decoder.push(r)? {
            break;
        }
    }
    decoder.finish()
}
