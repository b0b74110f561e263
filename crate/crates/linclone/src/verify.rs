//! Cross-checks between closed forms, the compositional pipeline, sampling
//! and the Fock-space oracle.

use linclone_core::ensemble::{
    amplitude_averaged_fidelity, amplitude_averaged_fidelity_quadrature, clone_fidelity, optimal_amplitude_fidelity_reference,
    optimal_gain_coherent,
};
use linclone_core::fock::{apply_cloner_fock, moments, to_fock, uhlmann_fidelity_fock, OutcomeGrid};
use linclone_core::quadrature::QuadratureSpec;
use linclone_core::trajectory::total_covariance_residual;
use linclone_core::{
    coherent_clone_fidelity, gaussian_fidelity, run_cloner, run_cloner_closed_form, squeezed_clone_fidelity,
    thermal_clone_fidelity, ClonerConfig, CovMat, GaussianState, Propagation, QuadVector, Result,
};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::args::Level;
use crate::mc::{run_parallel, summarize};
use crate::report::Check;

const ETAS: [f64; 3] = [1.0, 0.75, 0.5];

/// Uniform draws from a seeded stream.
pub struct Draws(ChaCha8Rng);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + (hi - lo) * u
    }

    /// Displaced squeezed thermal state with `N ≤ max_n`, `r ≤ max_r` and
    /// `|Re α|, |Im α| ≤ max_alpha`.
    pub fn mixed_state(&mut self, max_n: f64, max_r: f64, max_alpha: f64) -> GaussianState {
        let n = self.uniform(0.0, max_n);
        let r = self.uniform(0.0, max_r);
        let phase = self.uniform(0.0, std::f64::consts::TAU);
        let alpha = Complex64::new(self.uniform(-max_alpha, max_alpha), self.uniform(-max_alpha, max_alpha));
        mixed_state(n, r, phase, alpha)
    }
}

/// Displaced squeezed thermal state.
pub fn mixed_state(n_th: f64, r: f64, phase: f64, alpha: Complex64) -> GaussianState {
    let sq = GaussianState::squeezed(Complex64::new(0.0, 0.0), r, phase).expect("valid squeezing");
    let k = 2.0 * n_th + 1.0;
    let c = sq.cov;
    let cov = CovMat::new(k * c.g11(), k * c.g12(), k * c.g22()).expect("scaled covariance is physical");
    GaussianState::new(QuadVector::from_amplitude(alpha), cov).expect("finite mean")
}

fn worst<I: IntoIterator<Item = Result<f64>>>(it: I) -> f64 {
    let mut m = 0.0f64;
    for v in it {
        match v {
            Ok(x) if x.is_finite() => m = m.max(x),
            _ => return f64::NAN,
        }
    }
    m
}

fn coherent_closed_form() -> Check {
    let err = worst([1.0, 0.75, 0.5, 0.3].map(|eta| {
        let f = clone_fidelity(&GaussianState::coherent(0.7, -0.4), &ClonerConfig::symmetric(eta))?.value();
        Ok((f - coherent_clone_fidelity(eta)?.value()).abs())
    }));
    Check::new("coherent_closed_form", err, 1e-12)
}

fn squeezed_closed_form() -> Check {
    let err = worst((0..=8).flat_map(|i| {
        ETAS.map(move |eta| {
            let xi = 0.25 * i as f64;
            let s = GaussianState::squeezed(Complex64::new(0.0, 0.0), xi, 0.0)?;
            let f = clone_fidelity(&s, &ClonerConfig::symmetric(eta))?.value();
            Ok((f - squeezed_clone_fidelity(xi, eta)?.value()).abs())
        })
    }));
    Check::new("squeezed_closed_form", err, 1e-10)
}

fn thermal_closed_form() -> Check {
    let err = worst((0..=20).map(|i| {
        let n = 0.25 * i as f64;
        let s = GaussianState::thermal(Complex64::new(0.0, 0.0), n)?;
        let f = clone_fidelity(&s, &ClonerConfig::symmetric(1.0))?.value();
        Ok((f - thermal_clone_fidelity(n)?.value()).abs())
    }));
    Check::new("thermal_closed_form", err, 1e-10)
}

fn random_config(d: &mut Draws) -> ClonerConfig {
    let prop = if d.uniform(0.0, 1.0) < 0.5 { Propagation::Physical } else { Propagation::PaperLinearG };
    ClonerConfig::new(d.uniform(0.0, 1.0), d.uniform(0.0, 1.0), d.uniform(0.0, 2.5), d.uniform(0.05, 1.0), prop)
        .expect("drawn inside the domain")
}

fn composition_vs_closed_form(d: &mut Draws, cases: usize) -> Check {
    let mut cases_in = Vec::with_capacity(cases);
    for _ in 0..cases {
        cases_in.push((d.mixed_state(2.0, 1.0, 2.0), random_config(d)));
    }
    let err = worst(cases_in.iter().map(|(s, cfg)| {
        let a = run_cloner(s, cfg)?;
        let b = run_cloner_closed_form(s, cfg)?;
        Ok(a.max_abs_diff(&b) / a.displaced.cov.to_mat2().max_abs().max(1.0))
    }));
    Check::new("composition_vs_closed_form", err, 1e-11)
}

fn total_covariance(d: &mut Draws, cases: usize) -> Check {
    let mut cases_in = Vec::with_capacity(cases);
    for _ in 0..cases {
        let cfg = random_config(d).with_propagation(Propagation::Physical);
        cases_in.push((d.mixed_state(2.0, 1.0, 2.0), cfg));
    }
    let err = worst(cases_in.iter().map(|(s, cfg)| total_covariance_residual(s, cfg)));
    Check::new("law_of_total_covariance", err, 1e-10)
}

fn amplitude_average() -> Check {
    let spec = QuadratureSpec::default();
    let err = worst([0.3, 1.0, 4.0, 15.0].iter().flat_map(|&s2| {
        [ClonerConfig::symmetric(1.0), ClonerConfig::new(0.3, 0.6, 0.8, 0.75, Propagation::Physical).unwrap()].map(|cfg| {
            let closed = amplitude_averaged_fidelity(s2, &cfg)?.value();
            let quad = amplitude_averaged_fidelity_quadrature(s2, &cfg, &spec)?.fidelity.value();
            Ok((closed - quad).abs())
        })
    }));
    Check::new("amplitude_average_quadrature", err, 1e-8)
}

fn optimal_gain_reference() -> Check {
    let err = worst((0..=20).map(|i| {
        let s2 = 0.1 + (20.0 - 0.1) * i as f64 / 20.0;
        let o = optimal_gain_coherent(s2, 1.0, Propagation::Physical)?;
        Ok((o.fidelity.value() - optimal_amplitude_fidelity_reference(s2)).abs())
    }));
    Check::new("optimal_gain_reference", err, 1e-3)
}

/// Fock dimension for state-level oracle checks.
pub const ORACLE_DIM: usize = 60;

/// Largest `|F_Uhlmann − F_Gaussian|` over `pairs` random mixed pairs.
pub fn uhlmann_agreement(d: &mut Draws, pairs: usize) -> f64 {
    let states: Vec<_> = (0..pairs).map(|_| (d.mixed_state(1.0, 0.3, 1.1), d.mixed_state(1.0, 0.3, 1.1))).collect();
    let errs: Vec<Result<f64>> = states
        .par_iter()
        .map(|(a, b)| {
            let oracle = uhlmann_fidelity_fock(&to_fock(a, ORACLE_DIM)?, &to_fock(b, ORACLE_DIM)?)?;
            Ok((oracle.fidelity.value() - gaussian_fidelity(a, b)?.value()).abs())
        })
        .collect();
    worst(errs)
}

fn moment_round_trip(d: &mut Draws, cases: usize) -> Check {
    let states: Vec<_> = (0..cases).map(|_| d.mixed_state(1.0, 0.3, 1.1)).collect();
    let err = worst(states.iter().map(|s| {
        let m = moments(&to_fock(s, ORACLE_DIM)?);
        Ok(m.mean.max_abs_diff(s.mean).max(m.cov.max_abs_diff(s.cov.to_mat2())))
    }));
    Check::new("fock_moment_round_trip", err, 1e-6)
}

/// Channel check inputs at unit efficiency.
pub fn channel_inputs() -> Vec<(&'static str, GaussianState)> {
    let origin = Complex64::new(0.0, 0.0);
    vec![
        ("vacuum", GaussianState::vacuum()),
        ("coherent_0.5", GaussianState::coherent(0.5, 0.0)),
        ("thermal_1", GaussianState::thermal(origin, 1.0).unwrap()),
        ("squeezed_0.5", GaussianState::squeezed(origin, 0.5, 0.0).unwrap()),
    ]
}

/// Fock dimension of channel inputs.
pub const CHANNEL_INPUT_DIM: usize = 30;

/// Moment and fidelity discrepancies of the Fock channel against the
/// phase-space pipeline.
pub fn channel_discrepancy(input: &GaussianState, cfg: &ClonerConfig) -> Result<(f64, f64)> {
    let grid = OutcomeGrid::default();
    let out = apply_cloner_fock(&to_fock(input, CHANNEL_INPUT_DIM)?, cfg, &grid)?;
    let exact = run_cloner(input, cfg)?;
    let mut moment_err = 0.0f64;
    for (rho, s) in [(&out.clone1, &exact.clone1), (&out.clone2, &exact.clone2)] {
        let m = moments(rho);
        moment_err = moment_err.max(m.mean.max_abs_diff(s.mean)).max(m.cov.max_abs_diff(s.cov.to_mat2()));
    }
    let image = to_fock(input, grid.output_dim)?;
    let f_fock = uhlmann_fidelity_fock(&image, &out.clone1)?.fidelity.value();
    let f_exact = gaussian_fidelity(input, &exact.clone1)?.value();
    Ok((moment_err, (f_fock - f_exact).abs()))
}

fn channel_checks() -> Vec<Check> {
    let cfg = ClonerConfig::symmetric(1.0);
    channel_inputs()
        .par_iter()
        .map(|(name, s)| match channel_discrepancy(s, &cfg) {
            Ok((m, f)) => vec![
                Check::new(format!("fock_channel_moments_{name}"), m, 1e-3),
                Check::new(format!("fock_channel_fidelity_{name}"), f, 1e-3),
            ],
            Err(_) => vec![Check::new(format!("fock_channel_{name}"), f64::NAN, 1e-3)],
        })
        .flatten()
        .collect()
}

fn monte_carlo(n: u64, seed: u64, cov_tol: f64) -> Vec<Check> {
    let input = GaussianState::coherent(1.0, 0.0);
    let cfg = ClonerConfig::symmetric(1.0);
    let run = run_parallel(&input, &cfg, n, seed).and_then(|r| Ok((r, run_cloner(&input, &cfg)?)));
    match run {
        Ok((run, exact)) => {
            let s = summarize(&run, &exact, 0.0);
            vec![
                Check::new("mc_clone_covariance", s.clone1.cov_rel_error.max(s.clone2.cov_rel_error), cov_tol),
                Check::new("mc_clone_mean_z", s.clone1.max_mean_z.max(s.clone2.max_mean_z), 4.0),
            ]
        }
        Err(_) => vec![Check::new("mc", f64::NAN, 0.0)],
    }
}

/// Runs the suite.
pub fn run_checks(level: Level, seed: u64) -> Vec<Check> {
    let mut d = Draws::new(seed);
    let full = level == Level::Full;
    let mut checks = vec![
        coherent_closed_form(),
        squeezed_closed_form(),
        thermal_closed_form(),
        composition_vs_closed_form(&mut d, if full { 2000 } else { 200 }),
        total_covariance(&mut d, if full { 500 } else { 50 }),
        amplitude_average(),
        moment_round_trip(&mut d, if full { 20 } else { 4 }),
        Check::new("uhlmann_vs_gaussian", uhlmann_agreement(&mut d, if full { 50 } else { 6 }), 1e-6),
    ];
    if full {
        checks.push(optimal_gain_reference());
        checks.extend(channel_checks());
        checks.extend(monte_carlo(100_000, seed, 0.02));
    } else {
        checks.extend(monte_carlo(20_000, seed, 0.05));
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_in_range() {
        let mut a = Draws::new(5);
        let mut b = Draws::new(5);
        for _ in 0..100 {
            let x = a.uniform(-2.0, 3.0);
            assert_eq!(x, b.uniform(-2.0, 3.0));
            assert!((-2.0..3.0).contains(&x));
        }
    }

    #[test]
    fn quick_suite_passes() {
        let checks = run_checks(Level::Quick, 2024);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
