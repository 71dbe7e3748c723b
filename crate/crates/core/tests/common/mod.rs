#![allow(dead_code)]

use privpoly::codec::SubResult;
use privpoly::protocol::{arrival_order_from_delays, plan_session, run_worker, SessionPlan, WorkerView};
use privpoly::{Fp61, Matrix, PartitionSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type F = Fp61;

/// A fully materialised session with every worker's results in arrival order.
pub struct Session {
    pub spec: PartitionSpec,
    pub plan: SessionPlan<F>,
    pub a: Matrix<F>,
    pub library: Vec<Matrix<F>>,
    pub arrivals: Vec<(usize, usize)>,
    pub stream: Vec<SubResult<F>>,
}

/// Textbook triple loop, independent of `Matrix::matmul`.
pub fn schoolbook(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut acc = F::new(0);
        for k in 0..a.cols() {
            acc = acc + *a.get(i, k) * *b.get(k, j);
        }
        acc
    })
}

pub fn random_session(seed: u64) -> Session {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = [4usize, 8, 12];
    let r = dims[rng.random_range(0..3)];
    let s = dims[rng.random_range(0..3)];
    let t = dims[rng.random_range(0..3)];
    let m = [1usize, 2, 4][rng.random_range(0..3)];
    let n = [2usize, 3][rng.random_range(0..2)];
    let big_m = [1usize, 2, 4][rng.random_range(0..3)];
    let workers = 12;
    let per_worker = rng.random_range(1..=m);
    let spec = PartitionSpec::new(m, n, big_m, workers, per_worker).expect("valid geometry");
    let desired = rng.random_range(0..big_m);
    build_session(spec, desired, r, s, t, &mut rng)
}

pub fn build_session(spec: PartitionSpec, desired: usize, r: usize, s: usize, t: usize, rng: &mut ChaCha8Rng) -> Session {
    let a = Matrix::<F>::random(r, s, rng);
    let library: Vec<Matrix<F>> = (0..spec.library_size()).map(|_| Matrix::random(s, t, rng)).collect();
    let plan = plan_session::<F>(&spec, desired, rng.random()).expect("plan");
    let delays: Vec<f64> = (0..spec.workers()).map(|_| rng.random::<f64>()).collect();
    let arrivals = arrival_order_from_delays(&delays, spec.per_worker());
    let outputs: Vec<_> = (0..spec.workers())
        .map(|w| run_worker(&WorkerView::new(&plan, &a, w).expect("view"), &library).expect("worker"))
        .collect();
    let stream = arrivals
        .iter()
        .map(|&(w, j)| SubResult {
            worker: w,
            index: j,
            group: plan.group_of[w],
            x_point: plan.x_points[w][j],
            value: outputs[w][j].value.clone(),
        })
        .collect();
    Session { spec, plan, a, library, arrivals, stream }
}
