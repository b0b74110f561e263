//! Analytic propagation through the cloner: first beam splitter,
//! double-homodyne measurement, averaged feed-forward displacement, second
//! beam splitter.
//!
//! Two independent routes produce the clones. [`run_cloner`] composes the
//! phase-space maps step by step; [`run_cloner_closed_form`] evaluates the
//! entrywise map `Γ(σ_in)` and the clone blocks `𝒜_k`, `𝒳_k`, `𝒞` directly.
//!
//! The feed-forward displaces the transmitted beam by `g` times a measured
//! record with covariance `Σ`, which adds `g²Σ` to its covariance. The
//! [`Propagation::PaperLinearG`] mode instead uses a covariance that is
//! linear in `g`; both agree at `g = 1`.

use crate::error::{invalid, Error, Result};
use crate::math::sqrt;
use crate::phase_space::{CovMat, GaussianState, Mat2, ModeIndex, Symplectic4, TwoModeGaussianState};

/// How the averaged feed-forward state's covariance depends on the gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagation {
    /// `σ_d = A + g²Σ + g(C + Cᵀ)`.
    #[default]
    Physical,
    /// `σ_d = A + g(Σ + 2Cᵀ)`.
    PaperLinearG,
}

/// Operating point of the cloner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClonerConfig {
    /// Transmissivity of the first beam splitter, in `[0, 1]`.
    pub tau1: f64,
    /// Transmissivity of the second beam splitter, in `[0, 1]`.
    pub tau2: f64,
    /// Feed-forward amplitude gain, `≥ 0`.
    pub g: f64,
    /// Homodyne quantum efficiency, in `(0, 1]`.
    pub eta: f64,
    /// Covariance propagation rule.
    pub propagation: Propagation,
}

impl Default for ClonerConfig {
    fn default() -> Self {
        Self::symmetric(1.0)
    }
}

impl ClonerConfig {
    /// Validated configuration.
    pub fn new(tau1: f64, tau2: f64, g: f64, eta: f64, propagation: Propagation) -> Result<Self> {
        let cfg = Self {
            tau1,
            tau2,
            g,
            eta,
            propagation,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `τ₁ = τ₂ = ½`, `g = 1`: the balanced optimal coherent-state cloner.
    pub fn symmetric(eta: f64) -> Self {
        Self {
            tau1: 0.5,
            tau2: 0.5,
            g: 1.0,
            eta,
            propagation: Propagation::Physical,
        }
    }

    /// `τ₂ = ½`, `g = g_s(τ₁)`: both clone means equal the input mean.
    pub fn unity_gain(tau1: f64, eta: f64, propagation: Propagation) -> Result<Self> {
        Self::new(tau1, 0.5, symmetric_gain(tau1)?, eta, propagation)
    }

    /// Same configuration with another propagation rule.
    pub fn with_propagation(mut self, propagation: Propagation) -> Self {
        self.propagation = propagation;
        self
    }

    /// Checks all parameter ranges.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tau1) {
            return Err(invalid("tau1", self.tau1, "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.tau2) {
            return Err(invalid("tau2", self.tau2, "must lie in [0, 1]"));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(invalid("g", self.g, "must be finite and >= 0"));
        }
        check_eta(self.eta)
    }

    /// Fails unless `τ₂ = ½` and `g = g_s(τ₁)` to within `1e-9`.
    pub fn require_unity_gain(&self) -> Result<()> {
        let expected = symmetric_gain(self.tau1)?;
        if (self.tau2 - 0.5).abs() > 1e-9 || (self.g - expected).abs() > 1e-9 {
            return Err(Error::NotUnityGain {
                tau2: self.tau2,
                g: self.g,
                expected,
            });
        }
        Ok(())
    }

    /// Mean amplitude gain of clone 1: `√τ₂ (√τ₁ + g√(1−τ₁))`.
    pub fn clone1_mean_gain(&self) -> f64 {
        sqrt(self.tau2) * self.transmitted_gain()
    }

    /// Mean amplitude gain of clone 2: `√(1−τ₂) (√τ₁ + g√(1−τ₁))`.
    pub fn clone2_mean_gain(&self) -> f64 {
        sqrt(1.0 - self.tau2) * self.transmitted_gain()
    }

    fn transmitted_gain(&self) -> f64 {
        sqrt(self.tau1) + self.g * sqrt(1.0 - self.tau1)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta", eta, "must lie in (0, 1]"));
    }
    Ok(())
}

/// Both clones, their cross-correlation block and the pre-splitter state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneOutput {
    /// Transmitted output of the second beam splitter.
    pub clone1: GaussianState,
    /// Reflected output of the second beam splitter.
    pub clone2: GaussianState,
    /// Cross block `𝒞` between the clones.
    pub cross: Mat2,
    /// Outcome-averaged displaced state before the second splitter.
    pub displaced: GaussianState,
}

impl CloneOutput {
    /// Largest absolute difference over all moments of both outputs.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.clone1
            .max_abs_diff(&other.clone1)
            .max(self.clone2.max_abs_diff(&other.clone2))
            .max(self.cross.max_abs_diff(other.cross))
            .max(self.displaced.max_abs_diff(&other.displaced))
    }
}

/// `Δ² = (2 − η)/(2η)`: variance of the double-homodyne record per quadrature.
pub fn measurement_noise(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok((2.0 - eta) / (2.0 * eta))
}

/// Covariance `Δ²·I` of the detection POVM.
pub fn measurement_covariance(eta: f64) -> Result<CovMat> {
    CovMat::scalar(measurement_noise(eta)?)
}

/// Gain `g_s = √(2/(1−τ₁)) − √(τ₁/(1−τ₁))` giving unity-gain clones at `τ₂ = ½`.
pub fn symmetric_gain(tau1: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&tau1) {
        return Err(invalid("tau1", tau1, "must lie in [0, 1)"));
    }
    Ok(sqrt(2.0 / (1.0 - tau1)) - sqrt(tau1 / (1.0 - tau1)))
}

/// Distribution of the measured record: mean `X₂`, covariance `Σ = B + Δ²I`.
pub fn outcome_statistics(after_bs1: &TwoModeGaussianState, eta: f64) -> Result<GaussianState> {
    let sigma = after_bs1.b.to_mat2() + Mat2::scalar(measurement_noise(eta)?);
    GaussianState::new(after_bs1.mean2, CovMat::from_mat2(sigma)?)
}

/// State of the transmitted mode after feed-forward, averaged over outcomes.
pub fn feedforward_averaged_state(
    two_mode: &TwoModeGaussianState,
    g: f64,
    eta: f64,
    propagation: Propagation,
) -> Result<GaussianState> {
    let record = outcome_statistics(two_mode, eta)?;
    let sigma = record.cov.to_mat2();
    let (a, c) = (two_mode.a.to_mat2(), two_mode.c);
    let cov = match propagation {
        Propagation::Physical => a + (g * g) * sigma + g * (c + c.transpose()),
        Propagation::PaperLinearG => a + g * (sigma + 2.0 * c.transpose()),
    };
    let mean = two_mode.mean1 + g * two_mode.mean2;
    GaussianState::new(mean, CovMat::from_mat2(cov)?)
}

/// Closed-form `Γ(σ_in)`, the covariance of the averaged feed-forward state.
///
/// Diagonal entries are `ℱ(γ) = c₀ + 𝒢(γ)` and off-diagonal entries `𝒢(γ)`,
/// with `𝒢(γ) = k·γ`. For `r = √(τ₁(1−τ₁))`:
///
/// * physical: `k = τ₁ + g²(1−τ₁) + 2gr`, `c₀ = (1−τ₁)/2 + g²(τ₁/2 + Δ²) − gr`;
/// * linear in `g`: `k = τ₁ + g(1−τ₁ + 2r)`, `c₀ = (1−τ₁)/2 + g(τ₁/2 + Δ² − r)`.
pub fn gamma_matrix(
    sigma_in: &CovMat,
    tau1: f64,
    g: f64,
    eta: f64,
    propagation: Propagation,
) -> Result<Mat2> {
    let delta2 = measurement_noise(eta)?;
    if !(0.0..=1.0).contains(&tau1) {
        return Err(invalid("tau1", tau1, "must lie in [0, 1]"));
    }
    let r = sqrt(tau1 * (1.0 - tau1));
    let (k, c0) = match propagation {
        Propagation::Physical => (
            tau1 + g * g * (1.0 - tau1) + 2.0 * g * r,
            0.5 * (1.0 - tau1) + g * g * (0.5 * tau1 + delta2) - g * r,
        ),
        Propagation::PaperLinearG => (
            tau1 + g * (1.0 - tau1 + 2.0 * r),
            0.5 * (1.0 - tau1) + g * (0.5 * tau1 + delta2 - r),
        ),
    };
    Ok(Mat2::scalar(c0) + k * sigma_in.to_mat2())
}

/// `Γ(σ_in)` with the diagonal constant `1 − τ₁ + g[τ₁ − 2√(τ₁(1−τ₁)) + Δ²]`
/// taken literally. It matches [`gamma_matrix`] only at `τ₁ = ½`, `g = 1`;
/// kept for comparison against published curves.
pub fn printed_gamma_matrix(sigma_in: &CovMat, tau1: f64, g: f64, eta: f64) -> Result<Mat2> {
    let delta2 = measurement_noise(eta)?;
    let r = sqrt(tau1 * (1.0 - tau1));
    let k = tau1 + g * (1.0 - tau1 + 2.0 * r);
    let c0 = 1.0 - tau1 + g * (tau1 - 2.0 * r + delta2);
    Ok(Mat2::scalar(c0) + k * sigma_in.to_mat2())
}

/// Composes the phase-space maps: `⊗|0⟩ → BS₁ → feed-forward → ⊗|0⟩ → BS₂`.
pub fn run_cloner(input: &GaussianState, cfg: &ClonerConfig) -> Result<CloneOutput> {
    cfg.validate()?;
    let after_bs1 = input
        .tensor_with_vacuum()
        .apply_symplectic(&Symplectic4::beam_splitter(cfg.tau1)?)?;
    let displaced = feedforward_averaged_state(&after_bs1, cfg.g, cfg.eta, cfg.propagation)?;
    let out = displaced
        .tensor_with_vacuum()
        .apply_symplectic(&Symplectic4::beam_splitter(cfg.tau2)?)?;
    Ok(CloneOutput {
        clone1: out.marginal(ModeIndex::First),
        clone2: out.marginal(ModeIndex::Second),
        cross: out.c,
        displaced,
    })
}

/// Evaluates the clone blocks directly from `Γ(σ_in)`:
/// `𝒜₁ = ½(1−τ₂)I + τ₂Γ`, `𝒜₂ = ½τ₂I + (1−τ₂)Γ`,
/// `𝒳₁ = √τ₂(√τ₁ + g√(1−τ₁))X_in`, `𝒳₂ = √(1−τ₂)(…)X_in`,
/// `𝒞 = √(τ₂(1−τ₂)) (Γ − ½I)`.
pub fn run_cloner_closed_form(input: &GaussianState, cfg: &ClonerConfig) -> Result<CloneOutput> {
    cfg.validate()?;
    let gamma = gamma_matrix(&input.cov, cfg.tau1, cfg.g, cfg.eta, cfg.propagation)?;
    let tau2 = cfg.tau2;
    let a1 = Mat2::scalar(0.5 * (1.0 - tau2)) + tau2 * gamma;
    let a2 = Mat2::scalar(0.5 * tau2) + (1.0 - tau2) * gamma;
    let cross = sqrt(tau2 * (1.0 - tau2)) * (gamma - Mat2::scalar(0.5));
    let gain = cfg.transmitted_gain();
    Ok(CloneOutput {
        clone1: GaussianState::new(cfg.clone1_mean_gain() * input.mean, CovMat::from_mat2(a1)?)?,
        clone2: GaussianState::new(cfg.clone2_mean_gain() * input.mean, CovMat::from_mat2(a2)?)?,
        cross,
        displaced: GaussianState::new(gain * input.mean, CovMat::from_mat2(gamma)?)?,
    })
}

/// `σ²_GN = ½ + Δ²`, the added-noise variance of the effective
/// classical-noise channel at `τ₁ = ½`, `g = 1`.
///
/// The identity `σ_d = σ_in + σ²_GN·I` holds for coherent inputs only;
/// for other inputs the averaged state is `2σ_in + Δ²I`.
pub fn equivalent_added_noise(eta: f64) -> Result<f64> {
    Ok(0.5 + measurement_noise(eta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::QuadVector;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    const E2: f64 = core::f64::consts::E * core::f64::consts::E;

    #[test]
    fn measurement_covariance_values() {
        assert_eq!(measurement_covariance(1.0).unwrap().to_mat2(), Mat2::scalar(0.5));
        assert_abs_diff_eq!(measurement_noise(0.5).unwrap(), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(measurement_noise(0.75).unwrap(), 5.0 / 6.0, epsilon = 1e-15);
        assert!(measurement_covariance(0.0).is_err());
        assert!(measurement_covariance(1.2).is_err());
        assert!(measurement_covariance(f64::NAN).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn symmetric_gain_values() {
        assert_abs_diff_eq!(symmetric_gain(0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(symmetric_gain(0.0).unwrap(), 1.414214, epsilon = 1e-6);
        assert_abs_diff_eq!(
            symmetric_gain(0.75).unwrap(),
            sqrt(8.0) - sqrt(3.0),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(symmetric_gain(0.75).unwrap(), 1.096376, epsilon = 1e-6);
        assert!(symmetric_gain(1.0).is_err());
    }

    #[test]
    fn unity_gain_rejected_at_full_transmission_but_feedforward_allowed() {
        assert!(ClonerConfig::unity_gain(1.0, 1.0, Propagation::Physical).is_err());
        let cfg = ClonerConfig::new(1.0, 0.5, 0.7, 1.0, Propagation::Physical).unwrap();
        let out = run_cloner(&GaussianState::vacuum(), &cfg).unwrap();
        // Pure measurement noise fed forward: Σ = ½ + ½.
        assert_abs_diff_eq!(out.displaced.cov.g11(), 0.5 + 0.49, epsilon = 1e-14);
    }

    #[test]
    fn outcome_statistics_examples() {
        let vac = GaussianState::vacuum()
            .tensor_with_vacuum()
            .apply_symplectic(&Symplectic4::beam_splitter(0.5).unwrap())
            .unwrap();
        let d = outcome_statistics(&vac, 1.0).unwrap();
        assert_eq!(d.mean, QuadVector::ZERO);
        assert!(d.cov.to_mat2().max_abs_diff(Mat2::IDENTITY) < 1e-15);

        let coh = GaussianState::coherent(1.0, 0.0)
            .tensor_with_vacuum()
            .apply_symplectic(&Symplectic4::beam_splitter(0.5).unwrap())
            .unwrap();
        let d = outcome_statistics(&coh, 0.6).unwrap();
        assert_abs_diff_eq!(d.mean.x, 1.0, epsilon = 1e-15);
        let floor = measurement_noise(0.6).unwrap();
        assert!(d.cov.g11() >= floor && d.cov.g22() >= floor);
    }

    fn after_bs1(s: &GaussianState, tau1: f64) -> TwoModeGaussianState {
        s.tensor_with_vacuum()
            .apply_symplectic(&Symplectic4::beam_splitter(tau1).unwrap())
            .unwrap()
    }

    #[test]
    fn feedforward_examples() {
        let coh = after_bs1(&GaussianState::coherent(0.4, -0.2), 0.5);
        for mode in [Propagation::Physical, Propagation::PaperLinearG] {
            let d = feedforward_averaged_state(&coh, 1.0, 1.0, mode).unwrap();
            assert!(d.cov.to_mat2().max_abs_diff(Mat2::diag(1.5, 1.5)) < 1e-14);
        }
        let sq = GaussianState::squeezed(Complex64::new(0.0, 0.0), 1.0, 0.0).unwrap();
        let d = feedforward_averaged_state(&after_bs1(&sq, 0.5), 1.0, 1.0, Propagation::Physical)
            .unwrap();
        assert!(d.cov.to_mat2().max_abs_diff(Mat2::diag(E2 + 0.5, 1.0 / E2 + 0.5)) < 1e-12);

        let two = after_bs1(&sq, 0.3);
        let d = feedforward_averaged_state(&two, 0.0, 0.8, Propagation::Physical).unwrap();
        assert_eq!(d.cov, two.a);
        assert_eq!(d.mean, two.mean1);
    }

    #[test]
    fn gamma_examples() {
        for mode in [Propagation::Physical, Propagation::PaperLinearG] {
            let g = gamma_matrix(&CovMat::VACUUM, 0.5, 1.0, 1.0, mode).unwrap();
            assert!(g.max_abs_diff(Mat2::diag(1.5, 1.5)) < 1e-15);
            let g = gamma_matrix(&CovMat::VACUUM, 0.5, 1.0, 0.5, mode).unwrap();
            assert!(g.max_abs_diff(Mat2::diag(2.5, 2.5)) < 1e-15);
        }
        // 𝒢 is linear in γ, so off-diagonal entries vanish with γ12.
        let c = CovMat::new(2.0, 0.0, 0.7).unwrap();
        let g = gamma_matrix(&c, 0.23, 1.7, 0.66, Propagation::Physical).unwrap();
        assert_eq!(g.m12, 0.0);
    }

    #[test]
    fn printed_gamma_agrees_only_at_balanced_point() {
        let s = CovMat::new(1.1, 0.2, 0.8).unwrap();
        let lin = gamma_matrix(&s, 0.5, 1.0, 0.9, Propagation::PaperLinearG).unwrap();
        let printed = printed_gamma_matrix(&s, 0.5, 1.0, 0.9).unwrap();
        assert!(lin.max_abs_diff(printed) < 1e-15);
        let lin = gamma_matrix(&s, 0.3, 1.0, 0.9, Propagation::PaperLinearG).unwrap();
        let printed = printed_gamma_matrix(&s, 0.3, 1.0, 0.9).unwrap();
        assert!(lin.max_abs_diff(printed) > 1e-3);
    }

    #[test]
    fn balanced_coherent_clones() {
        let input = GaussianState::coherent(0.7, 1.1);
        let out = run_cloner(&input, &ClonerConfig::symmetric(1.0)).unwrap();
        for clone in [out.clone1, out.clone2] {
            assert!(clone.mean.max_abs_diff(input.mean) < 1e-14);
            assert!(clone.cov.to_mat2().max_abs_diff(Mat2::IDENTITY) < 1e-14);
        }
    }

    #[test]
    fn transparent_path() {
        let input = GaussianState::squeezed(Complex64::new(0.3, 0.2), 0.5, 0.4).unwrap();
        let cfg = ClonerConfig::new(1.0, 1.0, 0.0, 1.0, Propagation::Physical).unwrap();
        let out = run_cloner(&input, &cfg).unwrap();
        assert!(out.clone1.max_abs_diff(&input) < 1e-15);
        assert!(out.clone2.max_abs_diff(&GaussianState::vacuum()) < 1e-15);
    }

    #[test]
    fn added_noise_values() {
        assert_abs_diff_eq!(equivalent_added_noise(1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(equivalent_added_noise(0.5).unwrap(), 2.0);
        for eta in [1.0, 0.8, 0.5] {
            let input = GaussianState::coherent(-0.3, 0.9);
            let d = run_cloner(&input, &ClonerConfig::symmetric(eta)).unwrap().displaced;
            let expected = input.cov.to_mat2() + Mat2::scalar(equivalent_added_noise(eta).unwrap());
            assert!(d.cov.to_mat2().max_abs_diff(expected) < 1e-14);
        }
        // Not a valid description of squeezed inputs.
        let sq = GaussianState::squeezed(Complex64::new(0.0, 0.0), 0.5, 0.0).unwrap();
        let d = run_cloner(&sq, &ClonerConfig::symmetric(1.0)).unwrap().displaced;
        let naive = sq.cov.to_mat2() + Mat2::scalar(1.0);
        assert!(d.cov.to_mat2().max_abs_diff(naive) > 0.1);
    }

    #[test]
    fn config_validation() {
        assert!(ClonerConfig::new(1.1, 0.5, 1.0, 1.0, Propagation::Physical).is_err());
        assert!(ClonerConfig::new(0.5, -0.5, 1.0, 1.0, Propagation::Physical).is_err());
        assert!(ClonerConfig::new(0.5, 0.5, -1.0, 1.0, Propagation::Physical).is_err());
        assert!(ClonerConfig::new(0.5, 0.5, 1.0, 0.0, Propagation::Physical).is_err());
        let cfg = ClonerConfig::new(0.5, 0.5, 1.2, 1.0, Propagation::Physical).unwrap();
        assert!(matches!(cfg.require_unity_gain(), Err(Error::NotUnityGain { .. })));
        assert!(ClonerConfig::symmetric(0.7).require_unity_gain().is_ok());
    }
}
