//! The cloner as an explicit Fock-space channel.
//!
//! For an input `ρ = Σ_j λ_j |v_j⟩⟨v_j|` the first beam splitter followed by
//! projection of the reflected mode on `|β⟩` acts on the transmitted mode as
//! `K_β|m⟩ = e^{−|β|²/2} Σ_{n≤m} t^n (rβ*)^{m−n} √(m!/n!)/(m−n)! |n⟩`.
//! The outcome-averaged state after feed-forward is
//! `ρ_d = ∫ d²β/π D(gβ) K_β ρ K_β† D(gβ)†`,
//! evaluated on a tensor Gauss–Hermite grid matched to the factor
//! `e^{−(1+g²)|β|²}` carried by the integrand. Detector inefficiency adds
//! independent Gaussian noise of quadrature variance `(1−η)/η` to the
//! record, which after feed-forward is a random displacement of variance
//! `g²(1−η)/η`; it is applied as a second Gauss–Hermite average. The clones
//! are the two outputs of a beam splitter with vacuum, i.e. pure-loss
//! channels of transmissivity `τ₂` and `1 − τ₂`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::density::FockDensityMatrix;
use super::hermite::gauss_hermite;
use super::operators::{displacement_block, loss_channel, LadderTable};
use crate::error::{invalid, Error, Result};
use crate::math::{exp, sqrt};
use crate::pipeline::ClonerConfig;

/// Outcome-plane quadrature and output truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeGrid {
    /// Gauss–Hermite nodes per quadrature.
    pub nodes_per_axis: usize,
    /// Fock levels kept for the displaced state and the clones.
    pub output_dim: usize,
    /// Grid terms whose bound on their contribution falls below this are skipped.
    pub skip_below: f64,
    /// Largest accepted `|1 − Tr ρ|` for the outputs.
    pub trace_tol: f64,
}

impl Default for OutcomeGrid {
    fn default() -> Self {
        Self {
            nodes_per_axis: 64,
            output_dim: 50,
            skip_below: 1e-18,
            trace_tol: 1e-4,
        }
    }
}

/// States produced by [`apply_cloner_fock`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockCloneOutput {
    /// First clone.
    pub clone1: FockDensityMatrix,
    /// Second clone.
    pub clone2: FockDensityMatrix,
    /// Outcome-averaged state after feed-forward.
    pub displaced: FockDensityMatrix,
}

/// Grid points `(β, w)` for `∫ d²β/π e^{−s|β|²} f(β)`, returned as
/// `(β, w·e^{s|β|²})` so that `Σ w f(β)` approximates `∫ d²β/π f(β)`.
fn plane_rule(nodes: usize, s: f64) -> Vec<(Complex64, f64)> {
    let rule = gauss_hermite(nodes);
    let scale = 1.0 / sqrt(s);
    let norm = 1.0 / (core::f64::consts::PI * s);
    let mut out = Vec::with_capacity(nodes * nodes);
    for (i, &u) in rule.nodes.iter().enumerate() {
        for (j, &v) in rule.nodes.iter().enumerate() {
            let w = rule.scaled_weights[i] * rule.scaled_weights[j] * norm;
            out.push((Complex64::new(u * scale, v * scale), w));
        }
    }
    out
}

fn accumulate(rho: &mut DMatrix<Complex64>, z: &[Complex64], weight: f64) {
    let d = z.len();
    for j in 0..d {
        let zj = z[j].conj() * weight;
        if zj == Complex64::new(0.0, 0.0) {
            continue;
        }
        for i in 0..d {
            rho[(i, j)] += z[i] * zj;
        }
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

fn check_trace(rho: &FockDensityMatrix, tol: f64) -> Result<()> {
    let err = (1.0 - rho.trace()).abs();
    if err > tol || err.is_nan() {
        return Err(Error::GridTooCoarse(err));
    }
    Ok(())
}

/// Averages `D(γ) ρ D(γ)†` over `γ` with density `e^{−|γ|²/v}/(πv)`.
fn displacement_noise(
    rho: &FockDensityMatrix,
    v: f64,
    grid: &OutcomeGrid,
) -> FockDensityMatrix {
    let dim = rho.dim();
    let components = rho.spectral_components(1e-16);
    let rule = plane_rule(grid.nodes_per_axis, 1.0 / v);
    let mut out = DMatrix::zeros(dim, dim);
    for &(gamma, w) in &rule {
        let w = w * exp(-gamma.norm_sqr() / v) / v;
        if w < grid.skip_below {
            continue;
        }
        let block = displacement_block(gamma, dim, dim);
        for (lambda, vec) in &components {
            let z = &block * vec;
            accumulate(&mut out, z.as_slice(), w * lambda);
        }
    }
    FockDensityMatrix::from_trusted(out)
}

/// Runs the full scheme on a truncated input state.
pub fn apply_cloner_fock(
    input: &FockDensityMatrix,
    cfg: &ClonerConfig,
    grid: &OutcomeGrid,
) -> Result<FockCloneOutput> {
    cfg.validate()?;
    if grid.nodes_per_axis == 0 || grid.output_dim == 0 {
        return Err(invalid("grid", 0.0, "nodes and output_dim must be >= 1"));
    }
    let out_dim = grid.output_dim;
    let table = LadderTable::new(input.dim());
    let (t, r, g) = (sqrt(cfg.tau1), sqrt(1.0 - cfg.tau1), cfg.g);
    let components = input.spectral_components(1e-15);
    let rule = plane_rule(grid.nodes_per_axis, 1.0 + g * g);
    let mut rho = DMatrix::zeros(out_dim, out_dim);
    let t_powers: Vec<f64> = (0..input.dim()).map(|n| libm::pow(t, n as f64)).collect();
    for &(beta, w) in &rule {
        let damp = exp(-0.5 * beta.norm_sqr());
        let mut block = None;
        for (lambda, v) in &components {
            // K_β v: lower with c = rβ*, then scale level n by t^n.
            let mut k = table.lower(v.as_slice(), r * beta.conj(), input.dim());
            for (n, e) in k.iter_mut().enumerate() {
                *e *= t_powers[n] * damp;
            }
            // ‖D z‖ ≤ ‖z‖ bounds the skipped contribution.
            if w * lambda * norm_sqr(&k) < grid.skip_below {
                continue;
            }
            let block = block.get_or_insert_with(|| displacement_block(g * beta, out_dim, input.dim()));
            let z = &*block * DVector::from_vec(k);
            accumulate(&mut rho, z.as_slice(), w * lambda);
        }
    }
    let mut displaced = FockDensityMatrix::from_trusted(rho);
    let noise = g * g * (1.0 - cfg.eta) / cfg.eta;
    if noise > 0.0 {
        displaced = displacement_noise(&displaced, noise, grid);
    }
    check_trace(&displaced, grid.trace_tol)?;
    let clone1 = FockDensityMatrix::from_trusted(loss_channel(displaced.matrix(), cfg.tau2));
    let clone2 = FockDensityMatrix::from_trusted(loss_channel(displaced.matrix(), 1.0 - cfg.tau2));
    check_trace(&clone1, grid.trace_tol)?;
    check_trace(&clone2, grid.trace_tol)?;
    Ok(FockCloneOutput {
        clone1,
        clone2,
        displaced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::density::{moments, to_fock, uhlmann_fidelity_fock};
    use crate::phase_space::GaussianState;
    use crate::pipeline::{run_cloner, Propagation};

    #[test]
    fn plane_rule_normalizes() {
        let rule = plane_rule(30, 2.0);
        let total: f64 = rule.iter().map(|(b, w)| w * exp(-2.0 * b.norm_sqr())).sum();
        assert!((total - 0.5).abs() < 1e-12);
    }

    #[test]
    fn vacuum_clone_moments() {
        let input = to_fock(&GaussianState::vacuum(), 12).unwrap();
        let out = apply_cloner_fock(&input, &ClonerConfig::symmetric(1.0), &OutcomeGrid::default()).unwrap();
        let mo = moments(&out.clone1);
        assert!(mo.mean.norm_sq() < 1e-12);
        assert!(mo.cov.max_abs_diff(crate::Mat2::scalar(1.0)) < 1e-6);
    }

    #[test]
    fn coherent_clone_fidelity_two_thirds() {
        let state = GaussianState::coherent(0.5, 0.0);
        let input = to_fock(&state, 30).unwrap();
        let grid = OutcomeGrid::default();
        let out = apply_cloner_fock(&input, &ClonerConfig::symmetric(1.0), &grid).unwrap();
        let image = to_fock(&state, grid.output_dim).unwrap();
        let f = uhlmann_fidelity_fock(&image, &out.clone1).unwrap().fidelity.value();
        assert!((f - 2.0 / 3.0).abs() < 1e-3, "{f}");
        let f2 = uhlmann_fidelity_fock(&image, &out.clone2).unwrap().fidelity.value();
        assert!((f - f2).abs() < 1e-9);
    }

    #[test]
    fn asymmetric_config_matches_phase_space() {
        let state = GaussianState::squeezed(Complex64::new(0.2, 0.1), 0.3, 0.7).unwrap();
        let cfg = ClonerConfig::new(0.3, 0.7, 0.8, 0.8, Propagation::Physical).unwrap();
        let input = to_fock(&state, 30).unwrap();
        let out = apply_cloner_fock(&input, &cfg, &OutcomeGrid::default()).unwrap();
        let exact = run_cloner(&state, &cfg).unwrap();
        let m1 = moments(&out.clone1);
        let m2 = moments(&out.clone2);
        assert!(m1.cov.max_abs_diff(exact.clone1.cov.to_mat2()) < 1e-4);
        assert!(m1.mean.max_abs_diff(exact.clone1.mean) < 1e-4);
        assert!(m2.cov.max_abs_diff(exact.clone2.cov.to_mat2()) < 1e-4);
        assert!(m2.mean.max_abs_diff(exact.clone2.mean) < 1e-4);
    }

    #[test]
    fn coarse_grid_is_reported() {
        let input = to_fock(&GaussianState::coherent(1.0, 0.0), 20).unwrap();
        let grid = OutcomeGrid { nodes_per_axis: 2, ..OutcomeGrid::default() };
        assert!(matches!(
            apply_cloner_fock(&input, &ClonerConfig::symmetric(1.0), &grid),
            Err(Error::GridTooCoarse(_))
        ));
    }
}
