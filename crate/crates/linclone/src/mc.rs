//! Monte Carlo runs spread over the rayon pool.

use linclone_core::trajectory::{assemble, chunk_ranges, MomentAccumulator, TrajectoryModel, TrajectoryRun};
use linclone_core::{CloneOutput, ClonerConfig, GaussianState, Result};
use rayon::prelude::*;

use crate::report::{EmpiricalClone, Moments, MonteCarlo};

/// Same output as the serial `run_trajectories`, bit for bit: chunks run in
/// parallel and are merged in index order.
pub fn run_parallel(input: &GaussianState, cfg: &ClonerConfig, n: u64, seed: u64) -> Result<TrajectoryRun> {
    if n == 0 {
        return Err(linclone_core::Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "must be >= 1",
        });
    }
    let model = TrajectoryModel::new(input, cfg)?;
    let ranges: Vec<_> = chunk_ranges(n).collect();
    let chunks = ranges
        .par_iter()
        .map(|&(a, b)| model.run_range(seed, a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(n, seed, chunks))
}

fn compare(acc: &MomentAccumulator, exact: &GaussianState) -> EmpiricalClone {
    let mean = acc.mean();
    let se = acc.mean_standard_error();
    let z = |d: f64, s: f64| if s > 0.0 { d.abs() / s } else if d == 0.0 { 0.0 } else { f64::INFINITY };
    let diff = mean - exact.mean;
    let cov = acc.covariance();
    let exact_cov = exact.cov.to_mat2();
    EmpiricalClone {
        empirical: Moments::new(mean, cov),
        analytic: Moments::from(exact),
        mean_standard_error: [se.x, se.y],
        max_mean_z: z(diff.x, se.x).max(z(diff.y, se.y)),
        cov_rel_error: cov.max_abs_diff(exact_cov) / exact_cov.max_abs(),
    }
}

/// Empirical against analytic clone moments.
pub fn summarize(run: &TrajectoryRun, exact: &CloneOutput, residual: f64) -> MonteCarlo {
    MonteCarlo {
        n: run.batch.n,
        chunks: chunk_ranges(run.batch.n).count() as u64,
        clone1: compare(&run.clone1, &exact.clone1),
        clone2: compare(&run.clone2, &exact.clone2),
        total_covariance_residual: residual,
    }
}
