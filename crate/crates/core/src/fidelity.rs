//! Uhlmann fidelity between single-mode Gaussian states, and closed forms
//! for the balanced cloner acting on coherent, squeezed and thermal inputs.

use crate::error::{invalid, Error, Result};
use crate::math::{exp, fabs, sinh, sqrt};
use crate::phase_space::{CovMat, GaussianState};
use crate::pipeline::measurement_noise;

/// A fidelity value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fidelity(f64);

impl Fidelity {
    /// Accepts `value ∈ [0, 1 + 1e-9]`, clamping the excess to 1.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value > 1.0 + 1e-9 {
            return Err(Error::FidelityOutOfRange(value));
        }
        if value < -1e-9 {
            return Err(invalid("fidelity", value, "must be >= 0"));
        }
        Ok(Self(value.clamp(0.0, 1.0)))
    }

    /// The numeric value.
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Fidelity> for f64 {
    fn from(f: Fidelity) -> f64 {
        f.0
    }
}

/// `F = exp{−½ dᵀ(σ_a+σ_b)⁻¹d} / (√(Det[σ_a+σ_b] + δ) − √δ)` with
/// `δ = 4(Det σ_a − ¼)(Det σ_b − ¼)` and `d` the mean difference.
pub fn gaussian_fidelity(a: &GaussianState, b: &GaussianState) -> Result<Fidelity> {
    let sum = a.cov.to_mat2() + b.cov.to_mat2();
    // Det ≥ 1 for physical inputs; adjugate form, no conditioning test.
    let det = sum.det();
    if !(det > 0.0) {
        return Err(crate::Error::Singular(det));
    }
    let d = a.mean - b.mean;
    let q = (sum.m22 * d.x * d.x - 2.0 * sum.m12 * d.x * d.y + sum.m11 * d.y * d.y) / det;
    let delta = 4.0 * purity_excess(&a.cov) * purity_excess(&b.cov);
    // 1/(√(D+δ) − √δ) rewritten as (√(D+δ) + √δ)/D to avoid cancellation.
    let norm = (sqrt(det + delta) + sqrt(delta)) / det;
    Fidelity::new(norm * exp(-0.5 * q))
}

/// `Det σ − ¼`, set to zero when within the rounding error of the
/// determinant so that `√δ` does not amplify it.
fn purity_excess(cov: &CovMat) -> f64 {
    let (g11, g12, g22) = (cov.g11(), cov.g12(), cov.g22());
    let noise = 8.0 * f64::EPSILON * (fabs(g11 * g22) + g12 * g12);
    let excess = cov.det() - 0.25;
    if excess <= noise {
        0.0
    } else {
        excess
    }
}

/// Balanced-cloner fidelity for coherent inputs: `2η/(1 + 2η)`.
pub fn coherent_clone_fidelity(eta: f64) -> Result<Fidelity> {
    measurement_noise(eta)?;
    Fidelity::new(2.0 * eta / (1.0 + 2.0 * eta))
}

/// Balanced-cloner fidelity for squeezed inputs,
/// `4/√((5 + 2Δ²)² + 16(1 + 2Δ²) sinh²|ξ|)`.
pub fn squeezed_clone_fidelity(xi_mod: f64, eta: f64) -> Result<Fidelity> {
    if !(xi_mod >= 0.0) {
        return Err(invalid("xi_mod", xi_mod, "must be >= 0"));
    }
    let d2 = measurement_noise(eta)?;
    let sh = sinh(xi_mod);
    let a = 5.0 + 2.0 * d2;
    Fidelity::new(4.0 / sqrt(a * a + 16.0 * (1.0 + 2.0 * d2) * sh * sh))
}

/// Balanced-cloner fidelity for thermal inputs at unit efficiency,
/// `1/(3/2 + N(3 + 2N) − √(N(2N+1)(2N²+5N+3)))`.
pub fn thermal_clone_fidelity(n_thermal: f64) -> Result<Fidelity> {
    if !(n_thermal >= 0.0) || !n_thermal.is_finite() {
        return Err(invalid("N", n_thermal, "must be finite and >= 0"));
    }
    let n = n_thermal;
    let head = 1.5 + n * (3.0 + 2.0 * n);
    let root = sqrt(n * (2.0 * n + 1.0) * (2.0 * n * n + 5.0 * n + 3.0));
    // head² − root² = (2N + 3/2)², so 1/(head − root) = (head + root)/(2N + 3/2)².
    let d = 2.0 * n + 1.5;
    Fidelity::new((head + root) / (d * d))
}
