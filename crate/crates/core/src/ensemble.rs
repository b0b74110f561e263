//! Cloning fidelity averaged over ensembles of input states.
//!
//! Amplitude ensembles of coherent states have a closed-form Gaussian
//! average (with a quadrature cross-check); squeezing and thermal-photon
//! ensembles are integrated numerically at unity gain, where the average
//! over displacements is trivial.

use core::f64::consts::{PI, SQRT_2};

use crate::error::{invalid, Result};
use crate::fidelity::{gaussian_fidelity, Fidelity};
use crate::math::{cos, erfc, exp, sin, sqrt};
use crate::optimize::{maximize, SearchSpec};
use crate::phase_space::{GaussianState, QuadVector};
use crate::pipeline::{run_cloner, ClonerConfig, Propagation};
use crate::quadrature::{integrate, integrate_against, HalfLineDensity, QuadratureSpec};

use num_complex::Complex64;

/// Radial weight used for Gaussian squeezing priors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SqueezingWeight {
    /// `(2ρ/σ²) exp{−ρ²/σ²}`: the radial marginal of the complex Gaussian
    /// prior `exp{−|ξ|²/σ²}/(πσ²)`.
    #[default]
    Prior,
    /// `(ρ/σ²) exp{−ρ²/(2σ²)}`: the printed radial integrand, renormalized.
    Printed,
}

/// A distribution over input states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ensemble {
    /// A single known state.
    PointState(GaussianState),
    /// Coherent states with `p(α) = exp{−|α|²/σ_a²}/(πσ_a²)`.
    GaussianAmplitude {
        /// Amplitude variance `σ_a²`.
        sigma_a2: f64,
    },
    /// Squeezed states with Gaussian-distributed `ξ`.
    GaussianSqueezing {
        /// Width `σ_s`.
        sigma_s: f64,
        /// Radial weight convention.
        weight: SqueezingWeight,
    },
    /// Thermal states with `N` uniform on `[0, 𝒩]`.
    TopHatThermal {
        /// Upper bound `𝒩`.
        max_photons: f64,
    },
    /// Thermal states with half-Gaussian `N`, width `μ_N`.
    HalfGaussianThermal {
        /// Width `μ_N`.
        mu_n: f64,
    },
}

impl Ensemble {
    /// Checks width parameters.
    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, v, "must be finite and > 0"))
            }
        };
        match *self {
            Self::PointState(_) => Ok(()),
            Self::GaussianAmplitude { sigma_a2 } => positive("sigma_a2", sigma_a2),
            Self::GaussianSqueezing { sigma_s, .. } => positive("sigma_s", sigma_s),
            Self::HalfGaussianThermal { mu_n } => positive("mu_N", mu_n),
            Self::TopHatThermal { max_photons } => {
                if max_photons >= 0.0 && max_photons.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("bigN", max_photons, "must be finite and >= 0"))
                }
            }
        }
    }
}

/// An averaged fidelity with its numerical error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageFidelity {
    /// Averaged fidelity.
    pub fidelity: Fidelity,
    /// Estimated absolute integration error.
    pub abs_error: f64,
}

/// Radial density of `|ξ|` under a squeezing prior of width `sigma_s`.
pub fn squeezing_radial_weight(rho: f64, sigma_s: f64, weight: SqueezingWeight) -> f64 {
    let s2 = sigma_s * sigma_s;
    match weight {
        SqueezingWeight::Prior => 2.0 * rho / s2 * exp(-rho * rho / s2),
        SqueezingWeight::Printed => rho / s2 * exp(-rho * rho / (2.0 * s2)),
    }
}

/// Radial squeezing density as a [`HalfLineDensity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingDensity {
    /// Width `σ_s`.
    pub sigma_s: f64,
    /// Weight convention.
    pub weight: SqueezingWeight,
}

impl HalfLineDensity for SqueezingDensity {
    fn density(&self, x: f64) -> f64 {
        squeezing_radial_weight(x, self.sigma_s, self.weight)
    }

    fn mode(&self) -> f64 {
        match self.weight {
            SqueezingWeight::Prior => self.sigma_s / SQRT_2,
            SqueezingWeight::Printed => self.sigma_s,
        }
    }

    fn scale(&self) -> f64 {
        self.sigma_s
    }

    fn tail_mass(&self, x: f64) -> f64 {
        let s2 = self.sigma_s * self.sigma_s;
        match self.weight {
            SqueezingWeight::Prior => exp(-x * x / s2),
            SqueezingWeight::Printed => exp(-x * x / (2.0 * s2)),
        }
    }
}

/// Half-Gaussian density `2/√(2πμ²) exp{−N²/(2μ²)}` on `N ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfGaussian {
    /// Width `μ_N`.
    pub mu: f64,
}

impl HalfLineDensity for HalfGaussian {
    fn density(&self, x: f64) -> f64 {
        2.0 / sqrt(2.0 * PI * self.mu * self.mu) * exp(-x * x / (2.0 * self.mu * self.mu))
    }

    fn mode(&self) -> f64 {
        0.0
    }

    fn scale(&self) -> f64 {
        self.mu
    }

    fn tail_mass(&self, x: f64) -> f64 {
        erfc(x / (SQRT_2 * self.mu))
    }
}

/// Fidelity between `input` and the first clone under `cfg`.
pub fn clone_fidelity(input: &GaussianState, cfg: &ClonerConfig) -> Result<Fidelity> {
    let out = run_cloner(input, cfg)?;
    gaussian_fidelity(input, &out.clone1)
}

fn squeezed_input(rho: f64) -> Result<GaussianState> {
    GaussianState::squeezed(Complex64::new(0.0, 0.0), rho, 0.0)
}

fn thermal_input(n: f64) -> Result<GaussianState> {
    GaussianState::thermal(Complex64::new(0.0, 0.0), n)
}

/// Runs `f` inside a closure that cannot return errors, keeping the first
/// error for later.
fn fallible<F>(mut f: F) -> (impl FnMut(f64) -> f64, alloc::rc::Rc<core::cell::Cell<Option<crate::Error>>>)
where
    F: FnMut(f64) -> Result<f64>,
{
    let slot = alloc::rc::Rc::new(core::cell::Cell::new(None));
    let inner = slot.clone();
    let g = move |x| match f(x) {
        Ok(v) => v,
        Err(e) => {
            let prev = inner.take();
            inner.set(prev.or(Some(e)));
            0.0
        }
    };
    (g, slot)
}

/// `F̄ = ∫ dλ p(λ) F(λ)` for the given ensemble and cloner.
///
/// Squeezing and thermal ensembles require a unity-gain configuration.
pub fn average_fidelity(
    ensemble: &Ensemble,
    cfg: &ClonerConfig,
    spec: &QuadratureSpec,
) -> Result<AverageFidelity> {
    ensemble.validate()?;
    cfg.validate()?;
    let exact = |f: Fidelity| AverageFidelity {
        fidelity: f,
        abs_error: 0.0,
    };
    let integral = match *ensemble {
        Ensemble::PointState(s) => return Ok(exact(clone_fidelity(&s, cfg)?)),
        Ensemble::GaussianAmplitude { sigma_a2 } => {
            return Ok(exact(amplitude_averaged_fidelity(sigma_a2, cfg)?))
        }
        Ensemble::GaussianSqueezing { sigma_s, weight } => {
            cfg.require_unity_gain()?;
            let density = SqueezingDensity { sigma_s, weight };
            let (f, err) = fallible(|rho| Ok(clone_fidelity(&squeezed_input(rho)?, cfg)?.value()));
            let r = integrate_against(f, &density, 1.0, spec)?;
            if let Some(e) = err.take() {
                return Err(e);
            }
            r
        }
        Ensemble::TopHatThermal { max_photons } => {
            cfg.require_unity_gain()?;
            if max_photons == 0.0 {
                return Ok(exact(clone_fidelity(&thermal_input(0.0)?, cfg)?));
            }
            let (f, err) = fallible(|n| Ok(clone_fidelity(&thermal_input(n)?, cfg)?.value()));
            let mut r = integrate(f, 0.0, max_photons, spec)?;
            if let Some(e) = err.take() {
                return Err(e);
            }
            r.value /= max_photons;
            r.abs_error /= max_photons;
            r
        }
        Ensemble::HalfGaussianThermal { mu_n } => {
            cfg.require_unity_gain()?;
            let (f, err) = fallible(|n| Ok(clone_fidelity(&thermal_input(n)?, cfg)?.value()));
            let r = integrate_against(f, &HalfGaussian { mu: mu_n }, 1.0, spec)?;
            if let Some(e) = err.take() {
                return Err(e);
            }
            r
        }
    };
    Ok(AverageFidelity {
        fidelity: Fidelity::new(integral.value)?,
        abs_error: integral.abs_error,
    })
}

/// Average over coherent states with amplitude prior of variance `sigma_a2`,
/// at an arbitrary (not necessarily unity) gain.
///
/// The clone mean is `G·X_in` with `G = √τ₂(√τ₁ + g√(1−τ₁))`; with
/// `S = σ_in + 𝒜₁` the Gaussian average of the mismatch exponential is
/// `norm(S) / √Det[I + (1−G)²σ_a² S⁻¹]`.
pub fn amplitude_averaged_fidelity(sigma_a2: f64, cfg: &ClonerConfig) -> Result<Fidelity> {
    if !(sigma_a2 >= 0.0) || !sigma_a2.is_finite() {
        return Err(invalid("sigma_a2", sigma_a2, "must be finite and >= 0"));
    }
    let input = GaussianState::vacuum();
    let clone = run_cloner(&input, cfg)?.clone1;
    let s = input.cov.to_mat2() + clone.cov.to_mat2();
    let det = s.det();
    // Pure input, so δ = 0 and the prefactor is 1/√Det S.
    let mismatch = 1.0 - cfg.clone1_mean_gain();
    let k = mismatch * mismatch * sigma_a2;
    let spread = crate::phase_space::Mat2::IDENTITY + k * s.inverse()?;
    Fidelity::new(1.0 / (sqrt(det) * sqrt(spread.det())))
}

/// Quadrature evaluation of [`amplitude_averaged_fidelity`]: polar
/// integration of the single-state fidelity over the amplitude prior.
pub fn amplitude_averaged_fidelity_quadrature(
    sigma_a2: f64,
    cfg: &ClonerConfig,
    spec: &QuadratureSpec,
) -> Result<AverageFidelity> {
    if !(sigma_a2 > 0.0) {
        return Err(invalid("sigma_a2", sigma_a2, "must be > 0"));
    }
    let sigma = sqrt(sigma_a2);
    // |α| has density (2r/σ²) e^{−r²/σ²}, the Prior radial weight.
    let density = SqueezingDensity {
        sigma_s: sigma,
        weight: SqueezingWeight::Prior,
    };
    let (f, err) = fallible(|r| {
        let (inner, inner_err) = fallible(|phi| {
            let input = GaussianState::coherent(r * cos(phi), r * sin(phi));
            Ok(clone_fidelity(&input, cfg)?.value())
        });
        let v = integrate(inner, 0.0, 2.0 * PI, spec)?.value / (2.0 * PI);
        match inner_err.take() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    });
    let r = integrate_against(f, &density, 1.0, spec)?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(AverageFidelity {
        fidelity: Fidelity::new(r.value)?,
        abs_error: r.abs_error,
    })
}

/// Best operating point for a Gaussian amplitude ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainOptimum {
    /// Optimal feed-forward gain.
    pub g: f64,
    /// First-splitter transmissivity used with it.
    pub tau1: f64,
    /// Averaged fidelity at the optimum.
    pub fidelity: Fidelity,
    /// Whether every pre-scan looked unimodal.
    pub unimodal: bool,
}

/// Upper end of the gain search interval.
pub const MAX_GAIN: f64 = 4.0;

/// Maximizes the amplitude-averaged fidelity over `g` at the fixed `τ₁`,
/// `τ₂`, `η` of `base`.
pub fn optimize_gain_fixed_tau1(sigma_a2: f64, base: &ClonerConfig) -> Result<GainOptimum> {
    base.validate()?;
    let (f, err) = fallible(|g| {
        let cfg = ClonerConfig { g, ..*base };
        Ok(amplitude_averaged_fidelity(sigma_a2, &cfg)?.value())
    });
    let best = maximize(f, 0.0, MAX_GAIN, &SearchSpec::default())?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(GainOptimum {
        g: best.x,
        tau1: base.tau1,
        fidelity: Fidelity::new(best.value)?,
        unimodal: best.unimodal,
    })
}

/// Maximizes the amplitude-averaged fidelity of the symmetric-splitter
/// (`τ₂ = ½`) cloner over the gain, choosing the best `τ₁ ∈ [0, 1]` for
/// each trial gain.
pub fn optimal_gain_coherent(sigma_a2: f64, eta: f64, propagation: Propagation) -> Result<GainOptimum> {
    if !(sigma_a2 > 0.0) || !sigma_a2.is_finite() {
        return Err(invalid("sigma_a2", sigma_a2, "must be finite and > 0"));
    }
    let base = ClonerConfig::new(0.5, 0.5, 1.0, eta, propagation)?;
    let mut all_unimodal = true;
    let (outer, err) = fallible(|g| {
        let inner = optimize_tau1(sigma_a2, &ClonerConfig { g, ..base })?;
        all_unimodal &= inner.unimodal;
        Ok(inner.fidelity.value())
    });
    let best = maximize(outer, 0.0, MAX_GAIN, &SearchSpec::default())?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    let at_best = optimize_tau1(sigma_a2, &ClonerConfig { g: best.x, ..base })?;
    Ok(GainOptimum {
        g: best.x,
        tau1: at_best.tau1,
        fidelity: at_best.fidelity,
        unimodal: all_unimodal && best.unimodal,
    })
}

fn optimize_tau1(sigma_a2: f64, base: &ClonerConfig) -> Result<GainOptimum> {
    let (f, err) = fallible(|tau1| {
        let cfg = ClonerConfig { tau1, ..*base };
        Ok(amplitude_averaged_fidelity(sigma_a2, &cfg)?.value())
    });
    let best = maximize(f, 0.0, 1.0, &SearchSpec { prescan: 33, x_tol: 1e-10 })?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(GainOptimum {
        g: base.g,
        tau1: best.x,
        fidelity: Fidelity::new(best.value)?,
        unimodal: best.unimodal,
    })
}

/// Piecewise optimum at unit efficiency:
/// `2(1+σ²)/(1+3σ²)` for `σ² ≥ 1+√2`, else `2/(2 + (3−2√2)σ²)`.
pub fn optimal_amplitude_fidelity_reference(sigma_a2: f64) -> f64 {
    if sigma_a2 >= 1.0 + SQRT_2 {
        2.0 * (1.0 + sigma_a2) / (1.0 + 3.0 * sigma_a2)
    } else {
        2.0 / (2.0 + (3.0 - 2.0 * SQRT_2) * sigma_a2)
    }
}

/// Fidelity of `input` against its clone for each `α` on a grid, used to
/// check displacement covariance.
pub fn fidelity_over_displacements(
    seed: &GaussianState,
    cfg: &ClonerConfig,
    displacements: &[QuadVector],
) -> Result<alloc::vec::Vec<f64>> {
    displacements
        .iter()
        .map(|&d| Ok(clone_fidelity(&seed.displace(d), cfg)?.value()))
        .collect()
}
