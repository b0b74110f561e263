use linclone_core::ensemble::{average_fidelity, optimal_amplitude_fidelity_reference, optimal_gain_coherent, optimize_gain_fixed_tau1, Ensemble};
use linclone_core::quadrature::QuadratureSpec;
use linclone_core::trajectory::total_covariance_residual;
use linclone_core::{gaussian_fidelity, run_cloner, symmetric_gain, ClonerConfig, GaussianState, Propagation};
use num_complex::Complex64;

use crate::args::{AverageArgs, ClonerArgs, CloneArgs, EnsembleKind, McArgs, OptimizeGainArgs, StateArgs, SweepArgs, VerifyArgs, WeightMode};
use crate::error::{CliError, CliResult};
use crate::mc::{run_parallel, summarize};
use crate::report::{Clones, ConfigEcho, EnsembleEcho, InputEcho, Moments, OptimumEcho, RunReport};
use crate::sweep::{render, SweepSpec};
use crate::verify::run_checks;

/// What a command produced.
#[derive(Debug, Clone)]
pub enum Output {
    /// JSON report.
    Report(Box<RunReport>),
    /// CSV table with its default file name.
    Table { csv: String, file_name: String },
}

pub fn cloner_config(a: &ClonerArgs) -> CliResult<ClonerConfig> {
    let g = match a.g {
        Some(g) => g,
        None => symmetric_gain(a.tau1)?,
    };
    Ok(ClonerConfig::new(a.tau1, a.tau2, g, a.eta, a.prop.into())?)
}

pub fn input_state(a: &StateArgs) -> CliResult<(&'static str, GaussianState)> {
    let k = &a.kind;
    let alpha = a.alpha.unwrap_or(Complex64::new(0.0, 0.0));
    if a.alpha.is_some() && (k.vacuum || k.coherent.is_some()) {
        return Err(CliError::Usage("--alpha applies to --squeezed and --thermal only".into()));
    }
    let state = if let Some(c) = k.coherent {
        ("coherent", GaussianState::coherent(c.re, c.im))
    } else if let Some(r) = k.squeezed {
        ("squeezed", GaussianState::squeezed(alpha, r, a.squeeze_phase)?)
    } else if let Some(n) = k.thermal {
        ("thermal", GaussianState::thermal(alpha, n)?)
    } else {
        ("vacuum", GaussianState::vacuum())
    };
    Ok(state)
}

fn input_echo(kind: &'static str, s: &GaussianState) -> InputEcho {
    InputEcho {
        kind,
        moments: Moments::from(s),
        mean_photon_number: s.mean_photon_number(),
    }
}

pub fn clone(a: &CloneArgs) -> CliResult<Output> {
    let (kind, input) = input_state(&a.state)?;
    let cfg = cloner_config(&a.cloner)?;
    let out = run_cloner(&input, &cfg)?;
    let mut r = RunReport::new("clone");
    r.config = Some(ConfigEcho::from(&cfg));
    r.input = Some(input_echo(kind, &input));
    r.clones = Some(Clones {
        clone1: Moments::from(&out.clone1),
        clone2: Moments::from(&out.clone2),
        cross: crate::report::matrix(out.cross),
        displaced: Moments::from(&out.displaced),
    });
    r.fidelities.insert("clone1", gaussian_fidelity(&input, &out.clone1)?.value());
    r.fidelities.insert("clone2", gaussian_fidelity(&input, &out.clone2)?.value());
    Ok(Output::Report(Box::new(r)))
}

pub fn sweep(a: &SweepArgs) -> CliResult<Output> {
    let spec = SweepSpec::from_args(a)?;
    Ok(Output::Table {
        csv: render(&spec)?,
        file_name: format!("sweep_{}.csv", spec.quantity.column()),
    })
}

pub fn average(a: &AverageArgs) -> CliResult<Output> {
    let cfg = cloner_config(&a.cloner)?;
    let w = a.width;
    let (ensemble, kind) = match a.ensemble {
        EnsembleKind::Amplitude => (Ensemble::GaussianAmplitude { sigma_a2: w }, "amplitude"),
        EnsembleKind::Squeezing => (Ensemble::GaussianSqueezing { sigma_s: w, weight: a.squeezing_weight.into() }, "squeezing"),
        EnsembleKind::Tophat => (Ensemble::TopHatThermal { max_photons: w }, "tophat"),
        EnsembleKind::Halfgauss => (Ensemble::HalfGaussianThermal { mu_n: w }, "halfgauss"),
    };
    let avg = average_fidelity(&ensemble, &cfg, &QuadratureSpec::default())?;
    let mut r = RunReport::new("average");
    r.config = Some(ConfigEcho::from(&cfg));
    r.ensemble = Some(EnsembleEcho {
        kind,
        width: w,
        squeezing_weight: (a.ensemble == EnsembleKind::Squeezing).then_some(match a.squeezing_weight {
            WeightMode::Prior => "prior",
            WeightMode::Printed => "printed",
        }),
        fidelity: avg.fidelity.value(),
        abs_error: avg.abs_error,
    });
    r.fidelities.insert("average", avg.fidelity.value());
    Ok(Output::Report(Box::new(r)))
}

pub fn optimize_gain(a: &OptimizeGainArgs) -> CliResult<Output> {
    let prop: Propagation = a.prop.into();
    let opt = match a.tau1 {
        Some(t) => optimize_gain_fixed_tau1(a.sigma_a2, &ClonerConfig::new(t, 0.5, 1.0, a.eta, prop)?)?,
        None => optimal_gain_coherent(a.sigma_a2, a.eta, prop)?,
    };
    let cfg = ClonerConfig::new(opt.tau1, 0.5, opt.g, a.eta, prop)?;
    let mut r = RunReport::new("optimize-gain");
    r.config = Some(ConfigEcho::from(&cfg));
    r.optimum = Some(OptimumEcho {
        sigma_a2: a.sigma_a2,
        g: opt.g,
        tau1: opt.tau1,
        tau1_optimized: a.tau1.is_none(),
        fidelity: opt.fidelity.value(),
        reference: (a.eta == 1.0 && a.tau1.is_none() && prop == Propagation::Physical)
            .then(|| optimal_amplitude_fidelity_reference(a.sigma_a2)),
        unimodal: opt.unimodal,
    });
    r.fidelities.insert("optimal", opt.fidelity.value());
    Ok(Output::Report(Box::new(r)))
}

pub fn mc(a: &McArgs) -> CliResult<Output> {
    let (kind, input) = input_state(&a.state)?;
    let cfg = cloner_config(&a.cloner)?;
    if cfg.propagation != Propagation::Physical {
        return Err(CliError::Usage("mc samples the physical model; use --prop physical".into()));
    }
    let run = run_parallel(&input, &cfg, a.n, a.seed)?;
    let exact = run_cloner(&input, &cfg)?;
    let residual = total_covariance_residual(&input, &cfg)?;
    let mut r = RunReport::new("mc");
    r.config = Some(ConfigEcho::from(&cfg));
    r.input = Some(input_echo(kind, &input));
    r.clones = Some(Clones {
        clone1: Moments::from(&exact.clone1),
        clone2: Moments::from(&exact.clone2),
        cross: crate::report::matrix(exact.cross),
        displaced: Moments::from(&exact.displaced),
    });
    r.fidelities.insert("clone1", gaussian_fidelity(&input, &exact.clone1)?.value());
    r.fidelities.insert("clone2", gaussian_fidelity(&input, &exact.clone2)?.value());
    r.monte_carlo = Some(summarize(&run, &exact, residual));
    r.seed = Some(a.seed);
    Ok(Output::Report(Box::new(r)))
}

pub fn verify(a: &VerifyArgs) -> CliResult<Output> {
    let mut r = RunReport::new("verify");
    r.checks = Some(run_checks(a.level, a.seed));
    r.seed = Some(a.seed);
    Ok(Output::Report(Box::new(r)))
}
