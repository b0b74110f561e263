//! Monte Carlo simulation of the measure-and-feed-forward loop.
//!
//! Each trajectory draws a double-homodyne record `m ~ N(X₂, Σ)`, conditions
//! the transmitted mode on it, displaces by `g·m` and splits the result on
//! the second beam splitter. Averaging the per-trajectory clone moments
//! reproduces the outcome-averaged clones of [`crate::run_cloner`] in
//! [`Propagation::Physical`](crate::Propagation::Physical) mode; the sampled
//! loop always realizes that propagation.
//!
//! Trajectory `i` uses a ChaCha8 generator seeded with `seed` on stream `i`,
//! and moments are merged in fixed chunks of [`CHUNK`] trajectories, so any
//! schedule that merges chunk results in index order gives identical bits.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::math::sqrt;
use crate::phase_space::{CovMat, GaussianState, Mat2, ModeIndex, QuadVector, Symplectic4, TwoModeGaussianState};
use crate::pipeline::{feedforward_averaged_state, outcome_statistics, ClonerConfig, Propagation};

/// Trajectories per merge unit.
pub const CHUNK: u64 = 1024;

/// A measured double-homodyne record in quadrature units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    /// Record `X_M`.
    pub m: QuadVector,
}

impl Outcome {
    /// The record as a complex amplitude `(m_x + i m_y)/√2`.
    pub fn amplitude(&self) -> num_complex::Complex64 {
        self.m.to_amplitude()
    }
}

/// Draws a record from the bivariate normal `dist`.
pub fn sample_outcome<R: RngCore + ?Sized>(dist: &GaussianState, rng: &mut R) -> Outcome {
    let (s11, s12, s22) = (dist.cov.g11(), dist.cov.g12(), dist.cov.g22());
    let l11 = sqrt(s11);
    let l21 = s12 / l11;
    let l22 = sqrt((s22 - l21 * l21).max(0.0));
    let z1: f64 = StandardNormal.sample(rng);
    let z2: f64 = StandardNormal.sample(rng);
    Outcome {
        m: QuadVector::new(dist.mean.x + l11 * z1, dist.mean.y + l21 * z1 + l22 * z2),
    }
}

/// State of the transmitted mode given record `m`: covariance
/// `A − CΣ⁻¹Cᵀ`, mean `X₁ + CΣ⁻¹(m − X₂)`.
pub fn conditional_state(two_mode: &TwoModeGaussianState, m: &Outcome, eta: f64) -> Result<GaussianState> {
    let record = outcome_statistics(two_mode, eta)?;
    let kalman = two_mode.c * record.cov.to_mat2().inverse()?;
    let cov = two_mode.a.to_mat2() - kalman * two_mode.c.transpose();
    let mean = two_mode.mean1 + kalman.apply(m.m - record.mean);
    GaussianState::new(mean, CovMat::from_mat2(cov.symmetrized())?)
}

/// Largest entry of `A − CΣ⁻¹Cᵀ + (gI + CΣ⁻¹)Σ(gI + CΣ⁻¹)ᵀ − σ_d`, with
/// `σ_d` the physical outcome-averaged covariance.
pub fn total_covariance_residual(input: &GaussianState, cfg: &ClonerConfig) -> Result<f64> {
    cfg.validate()?;
    let two_mode = after_first_splitter(input, cfg)?;
    let record = outcome_statistics(&two_mode, cfg.eta)?;
    let sigma = record.cov.to_mat2();
    let kalman = two_mode.c * sigma.inverse()?;
    let conditional = two_mode.a.to_mat2() - kalman * two_mode.c.transpose();
    let spread = Mat2::scalar(cfg.g) + kalman;
    let total = conditional + spread * sigma * spread.transpose();
    let averaged = feedforward_averaged_state(&two_mode, cfg.g, cfg.eta, Propagation::Physical)?;
    Ok(total.max_abs_diff(averaged.cov.to_mat2()))
}

fn after_first_splitter(input: &GaussianState, cfg: &ClonerConfig) -> Result<TwoModeGaussianState> {
    input
        .tensor_with_vacuum()
        .apply_symplectic(&Symplectic4::beam_splitter(cfg.tau1)?)
}

/// Running moments of a Gaussian mixture: count, mean of component means,
/// summed squared deviations of those means, and summed component
/// covariances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean: QuadVector,
    scatter: Mat2,
    intrinsic: Mat2,
}

impl Default for MomentAccumulator {
    fn default() -> Self {
        Self {
            count: 0,
            mean: QuadVector::ZERO,
            scatter: Mat2::ZERO,
            intrinsic: Mat2::ZERO,
        }
    }
}

impl MomentAccumulator {
    /// Adds one mixture component.
    pub fn push(&mut self, state: &GaussianState) {
        self.count += 1;
        let delta = state.mean - self.mean;
        self.mean = self.mean + (1.0 / self.count as f64) * delta;
        let delta_after = state.mean - self.mean;
        self.scatter = self.scatter + Mat2::outer(delta, delta_after).symmetrized();
        self.intrinsic = self.intrinsic + state.cov.to_mat2();
    }

    /// Combines with another accumulator (Chan et al. pairwise update).
    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean = self.mean + (nb / n) * delta;
        self.scatter = self.scatter + other.scatter + (na * nb / n) * Mat2::outer(delta, delta);
        self.intrinsic = self.intrinsic + other.intrinsic;
        self.count += other.count;
    }

    /// Number of components.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Mixture mean.
    pub fn mean(&self) -> QuadVector {
        self.mean
    }

    /// Population covariance of the component means.
    pub fn mean_covariance(&self) -> Mat2 {
        if self.count == 0 {
            return Mat2::ZERO;
        }
        (1.0 / self.count as f64) * self.scatter
    }

    /// Mixture covariance `E[cov] + Cov[mean]`.
    pub fn covariance(&self) -> Mat2 {
        if self.count == 0 {
            return Mat2::ZERO;
        }
        (1.0 / self.count as f64) * self.intrinsic + self.mean_covariance()
    }

    /// Standard error of each mean component.
    pub fn mean_standard_error(&self) -> QuadVector {
        if self.count < 2 {
            return QuadVector::new(f64::INFINITY, f64::INFINITY);
        }
        let n = self.count as f64;
        let var = (1.0 / (n - 1.0)) * self.scatter;
        QuadVector::new(sqrt(var.m11 / n), sqrt(var.m22 / n))
    }
}

/// One sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Measured record.
    pub outcome: Outcome,
    /// Transmitted mode after the feed-forward displacement.
    pub displaced: GaussianState,
}

/// The sampled trajectories of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBatch {
    /// Number of trajectories.
    pub n: u64,
    /// Base seed.
    pub seed: u64,
    /// Samples in index order.
    pub samples: Vec<TrajectorySample>,
}

/// Empirical clone moments for a contiguous range of trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkResult {
    /// First clone moments.
    pub clone1: MomentAccumulator,
    /// Second clone moments.
    pub clone2: MomentAccumulator,
    /// Samples in index order.
    pub samples: Vec<TrajectorySample>,
}

impl ChunkResult {
    fn empty() -> Self {
        Self {
            clone1: MomentAccumulator::default(),
            clone2: MomentAccumulator::default(),
            samples: Vec::new(),
        }
    }

    /// Appends `later`, which must cover the following index range.
    pub fn append(&mut self, later: ChunkResult) {
        self.clone1.merge(&later.clone1);
        self.clone2.merge(&later.clone2);
        self.samples.extend(later.samples);
    }
}

/// Precomputed pieces shared by every trajectory of a run.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryModel {
    two_mode: TwoModeGaussianState,
    record: GaussianState,
    splitter: Symplectic4,
    cfg: ClonerConfig,
}

impl TrajectoryModel {
    /// Builds the model for `input` under `cfg`.
    pub fn new(input: &GaussianState, cfg: &ClonerConfig) -> Result<Self> {
        cfg.validate()?;
        let two_mode = after_first_splitter(input, cfg)?;
        let record = outcome_statistics(&two_mode, cfg.eta)?;
        Ok(Self {
            two_mode,
            record,
            splitter: Symplectic4::beam_splitter(cfg.tau2)?,
            cfg: *cfg,
        })
    }

    /// Runs trajectory `index` with base `seed`, returning the sample and
    /// both clones.
    pub fn trajectory(&self, seed: u64, index: u64) -> Result<(TrajectorySample, GaussianState, GaussianState)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let outcome = sample_outcome(&self.record, &mut rng);
        let conditional = conditional_state(&self.two_mode, &outcome, self.cfg.eta)?;
        let displaced = conditional.displace(self.cfg.g * outcome.m);
        let out = displaced.tensor_with_vacuum().apply_symplectic(&self.splitter)?;
        Ok((
            TrajectorySample { outcome, displaced },
            out.marginal(ModeIndex::First),
            out.marginal(ModeIndex::Second),
        ))
    }

    /// Runs trajectories `start..end`.
    pub fn run_range(&self, seed: u64, start: u64, end: u64) -> Result<ChunkResult> {
        let mut acc = ChunkResult::empty();
        for i in start..end {
            let (sample, c1, c2) = self.trajectory(seed, i)?;
            acc.clone1.push(&c1);
            acc.clone2.push(&c2);
            acc.samples.push(sample);
        }
        Ok(acc)
    }
}

/// Index ranges of the merge chunks for `n` trajectories.
pub fn chunk_ranges(n: u64) -> impl Iterator<Item = (u64, u64)> {
    (0..n.div_ceil(CHUNK)).map(move |c| (c * CHUNK, ((c + 1) * CHUNK).min(n)))
}

/// Output of [`run_trajectories`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRun {
    /// Empirical first-clone moments.
    pub clone1: MomentAccumulator,
    /// Empirical second-clone moments.
    pub clone2: MomentAccumulator,
    /// All samples.
    pub batch: TrajectoryBatch,
}

/// Assembles per-chunk results, given in chunk order, into a run.
pub fn assemble(n: u64, seed: u64, chunks: impl IntoIterator<Item = ChunkResult>) -> TrajectoryRun {
    let mut total = ChunkResult::empty();
    for c in chunks {
        total.append(c);
    }
    TrajectoryRun {
        clone1: total.clone1,
        clone2: total.clone2,
        batch: TrajectoryBatch {
            n,
            seed,
            samples: total.samples,
        },
    }
}

/// Runs `n` trajectories serially.
pub fn run_trajectories(input: &GaussianState, cfg: &ClonerConfig, n: u64, seed: u64) -> Result<TrajectoryRun> {
    if n == 0 {
        return Err(invalid("n", 0.0, "must be >= 1"));
    }
    let model = TrajectoryModel::new(input, cfg)?;
    let chunks = chunk_ranges(n)
        .map(|(a, b)| model.run_range(seed, a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(n, seed, chunks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::run_cloner;
    use num_complex::Complex64;

    #[test]
    fn outcome_sampler_moments() {
        let dist = GaussianState::new(QuadVector::ZERO, CovMat::scalar(1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut acc = MomentAccumulator::default();
        let n = 100_000;
        for _ in 0..n {
            let o = sample_outcome(&dist, &mut rng);
            acc.push(&GaussianState::new(o.m, CovMat::VACUUM).unwrap());
        }
        let bound = 4.0 / sqrt(n as f64);
        assert!(acc.mean().x.abs() < bound && acc.mean().y.abs() < bound);
        let c = acc.mean_covariance();
        assert!((c.m11 - 1.0).abs() < 0.02 && (c.m22 - 1.0).abs() < 0.02 && c.m12.abs() < 0.02);
    }

    #[test]
    fn correlated_sampler_covariance() {
        let dist = GaussianState::new(QuadVector::new(1.0, -2.0), CovMat::new(2.0, 0.8, 0.7).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut acc = MomentAccumulator::default();
        for _ in 0..100_000 {
            let o = sample_outcome(&dist, &mut rng);
            acc.push(&GaussianState::new(o.m, CovMat::VACUUM).unwrap());
        }
        let c = acc.mean_covariance();
        assert!((c.m11 / 2.0 - 1.0).abs() < 0.02);
        assert!((c.m12 / 0.8 - 1.0).abs() < 0.02);
        assert!((c.m22 / 0.7 - 1.0).abs() < 0.02);
    }

    #[test]
    fn sampler_is_deterministic() {
        let dist = GaussianState::vacuum();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..100).map(|_| sample_outcome(&dist, &mut rng).m).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    fn two_mode(input: &GaussianState) -> TwoModeGaussianState {
        after_first_splitter(input, &ClonerConfig::symmetric(1.0)).unwrap()
    }

    #[test]
    fn coherent_conditioning_ignores_record() {
        let tm = two_mode(&GaussianState::coherent(0.7, 0.2));
        let o = Outcome { m: QuadVector::new(5.0, -3.0) };
        let s = conditional_state(&tm, &o, 1.0).unwrap();
        assert!(s.cov.to_mat2().max_abs_diff(tm.a.to_mat2()) < 1e-15);
        assert!(s.mean.max_abs_diff(tm.mean1) < 1e-15);
    }

    #[test]
    fn record_at_mean_leaves_mean() {
        let input = GaussianState::squeezed(Complex64::new(0.4, -0.3), 0.8, 0.5).unwrap();
        let tm = two_mode(&input);
        let s = conditional_state(&tm, &Outcome { m: tm.mean2 }, 1.0).unwrap();
        assert!(s.mean.max_abs_diff(tm.mean1) < 1e-14);
    }

    #[test]
    fn squeezed_conditioning_shrinks_covariance() {
        let input = GaussianState::squeezed(Complex64::new(0.0, 0.0), 1.0, 0.0).unwrap();
        let tm = two_mode(&input);
        let s = conditional_state(&tm, &Outcome { m: QuadVector::ZERO }, 1.0).unwrap();
        let shrink = tm.a.to_mat2() - s.cov.to_mat2();
        assert!(shrink.m11 > 1e-3 && shrink.det() > 1e-6);
    }

    #[test]
    fn total_covariance_identity() {
        let inputs = [
            GaussianState::coherent(1.0, 0.0),
            GaussianState::squeezed(Complex64::new(0.2, 0.1), 1.2, 2.0).unwrap(),
            GaussianState::thermal(Complex64::new(-1.0, 0.5), 2.5).unwrap(),
        ];
        for input in &inputs {
            for (tau1, g, eta) in [(0.5, 1.0, 1.0), (0.2, 1.7, 0.6), (0.9, 0.3, 0.85)] {
                let cfg = ClonerConfig::new(tau1, 0.5, g, eta, Propagation::Physical).unwrap();
                assert!(total_covariance_residual(input, &cfg).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn accumulator_merge_matches_sequential() {
        let states: Vec<GaussianState> = (0..37)
            .map(|i| {
                let t = i as f64;
                GaussianState::new(QuadVector::new(t.sin() * 3.0, (t * 0.7).cos()), CovMat::new(1.0 + t * 0.01, 0.1, 0.6).unwrap())
                    .unwrap()
            })
            .collect();
        let mut all = MomentAccumulator::default();
        states.iter().for_each(|s| all.push(s));
        let (mut a, mut b) = (MomentAccumulator::default(), MomentAccumulator::default());
        states[..10].iter().for_each(|s| a.push(s));
        states[10..].iter().for_each(|s| b.push(s));
        a.merge(&b);
        assert_eq!(a.count(), 37);
        assert!(a.mean().max_abs_diff(all.mean()) < 1e-13);
        assert!(a.covariance().max_abs_diff(all.covariance()) < 1e-12);
    }

    #[test]
    fn monte_carlo_matches_analytic_clones() {
        let input = GaussianState::coherent(1.0, 0.0);
        let cfg = ClonerConfig::symmetric(1.0);
        let run = run_trajectories(&input, &cfg, 100_000, 7).unwrap();
        let exact = run_cloner(&input, &cfg).unwrap();
        let cov = run.clone1.covariance();
        assert!((cov.m11 - 1.0).abs() < 0.02 && (cov.m22 - 1.0).abs() < 0.02 && cov.m12.abs() < 0.02);
        let se = run.clone1.mean_standard_error();
        assert!((run.clone1.mean().x - exact.clone1.mean.x).abs() < 4.0 * se.x);
        assert!((run.clone1.mean().y - exact.clone1.mean.y).abs() < 4.0 * se.y);
        assert_eq!(run.batch.samples.len(), 100_000);
    }

    #[test]
    fn zero_gain_is_splitters_only() {
        let cfg = ClonerConfig::new(0.5, 0.5, 0.0, 1.0, Propagation::Physical).unwrap();
        // Coherent input: no correlations, so every trajectory is the same state.
        let input = GaussianState::coherent(0.5, 0.2);
        let run = run_trajectories(&input, &cfg, 1000, 1).unwrap();
        let exact = run_cloner(&input, &cfg).unwrap();
        assert!(run.clone1.covariance().max_abs_diff(exact.clone1.cov.to_mat2()) < 1e-14);
        assert!(run.clone1.mean().max_abs_diff(exact.clone1.mean) < 1e-14);
        // Squeezed input: conditional means scatter, the mixture does not.
        let input = GaussianState::squeezed(Complex64::new(0.5, 0.0), 0.5, 0.0).unwrap();
        let run = run_trajectories(&input, &cfg, 100_000, 1).unwrap();
        let exact = run_cloner(&input, &cfg).unwrap();
        let se = run.clone1.mean_standard_error();
        assert!((run.clone1.mean().x - exact.clone1.mean.x).abs() < 4.0 * se.x);
        assert!((run.clone1.mean().y - exact.clone1.mean.y).abs() < 4.0 * se.y);
        let cov = run.clone1.covariance();
        let target = exact.clone1.cov.to_mat2();
        assert!((cov.m11 / target.m11 - 1.0).abs() < 0.02 && (cov.m22 / target.m22 - 1.0).abs() < 0.02);
    }

    #[test]
    fn runs_are_bitwise_reproducible() {
        let input = GaussianState::thermal(Complex64::new(0.3, 0.0), 0.5).unwrap();
        let cfg = ClonerConfig::symmetric(0.8);
        let a = run_trajectories(&input, &cfg, 3000, 42).unwrap();
        let b = run_trajectories(&input, &cfg, 3000, 42).unwrap();
        assert_eq!(a, b);
        let model = TrajectoryModel::new(&input, &cfg).unwrap();
        let reversed: Vec<_> = chunk_ranges(3000).collect::<Vec<_>>().into_iter().rev()
            .map(|(s, e)| model.run_range(42, s, e).unwrap())
            .collect();
        let c = assemble(3000, 42, reversed.into_iter().rev());
        assert_eq!(a, c);
    }

    #[test]
    fn zero_trajectories_rejected() {
        assert!(run_trajectories(&GaussianState::vacuum(), &ClonerConfig::symmetric(1.0), 0, 0).is_err());
    }
}
