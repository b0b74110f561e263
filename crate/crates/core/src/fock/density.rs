//! Truncated density matrices, Gaussian-state images, moments and the
//! Uhlmann fidelity.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::operators::FockOperator;
use crate::error::{invalid, Error, Result};
use crate::fidelity::Fidelity;
use crate::math::{acosh, atan2, sqrt};
use crate::phase_space::{CovMat, GaussianState, Mat2, QuadVector};

/// Largest truncated weight accepted by [`to_fock`].
pub const MAX_LEAKAGE: f64 = 1e-8;
/// Eigenvalues below `−NEGATIVE_TOL` are treated as errors, not rounding.
pub const NEGATIVE_TOL: f64 = 1e-8;
const HERMITIAN_TOL: f64 = 1e-10;

/// A Hermitian, positive semidefinite matrix on `dim` Fock levels. Its
/// trace may fall short of one by the truncated weight.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    matrix: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    /// Validates shape, Hermiticity and positivity to `−NEGATIVE_TOL`.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(matrix.nrows(), matrix.ncols()));
        }
        let asym = (&matrix - matrix.adjoint()).camax();
        if asym > HERMITIAN_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let matrix = hermitize(matrix);
        let min = matrix.clone().symmetric_eigen().eigenvalues.min();
        if min < -NEGATIVE_TOL {
            return Err(Error::NegativeEigenvalue(min));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix already known to be a valid state.
    pub(crate) fn from_trusted(matrix: DMatrix<Complex64>) -> Self {
        Self {
            matrix: hermitize(matrix),
        }
    }

    /// `|0⟩⟨0|`.
    pub fn vacuum(dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        Self { matrix: m }
    }

    /// `ν_th = (1+N)⁻¹ Σ_m (N/(1+N))^m |m⟩⟨m|`, truncated.
    pub fn thermal(n_thermal: f64, dim: usize) -> Result<Self> {
        if !(n_thermal >= 0.0) || !n_thermal.is_finite() {
            return Err(invalid("N", n_thermal, "must be finite and >= 0"));
        }
        let ratio = n_thermal / (1.0 + n_thermal);
        let mut p = 1.0 / (1.0 + n_thermal);
        let mut m = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = Complex64::new(p, 0.0);
            p *= ratio;
        }
        Ok(Self { matrix: m })
    }

    /// Truncation dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Matrix elements `⟨m|ρ|n⟩`.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `1 − Tr ρ`.
    pub fn leakage(&self) -> f64 {
        1.0 - self.trace()
    }

    /// The leading `dim` levels.
    pub fn truncated(&self, dim: usize) -> Self {
        let d = dim.min(self.dim());
        Self {
            matrix: self.matrix.view((0, 0), (d, d)).into_owned(),
        }
    }

    /// Conjugation `O ρ O†`.
    pub fn conjugate_by(&self, op: &FockOperator) -> Result<Self> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch(op.dim(), self.dim()));
        }
        Ok(Self::from_trusted(op.matrix() * &self.matrix * op.matrix().adjoint()))
    }

    /// Eigenpairs with eigenvalue above `floor`, largest first.
    pub fn spectral_components(&self, floor: f64) -> Vec<(f64, DVector<Complex64>)> {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut out: Vec<(f64, DVector<Complex64>)> = (0..self.dim())
            .filter(|&i| eig.eigenvalues[i] > floor)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
            .collect();
        out.sort_by(|a, b| b.0.total_cmp(&a.0));
        out
    }
}

fn hermitize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = m.adjoint();
    (m + adj) * Complex64::new(0.5, 0.0)
}

/// Photon number, squeezing and displacement reproducing a Gaussian state
/// as `D(α) S(ζ) ν_th(N) S(ζ)† D(α)†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDecomposition {
    /// Thermal photons `N = √Det σ − ½`.
    pub n_thermal: f64,
    /// Squeezing `ζ` in `exp{½(ζ a†² − ζ* a²)}`.
    pub zeta: Complex64,
    /// Displacement amplitude.
    pub alpha: Complex64,
}

/// Splits `σ = 2ν·P` with `ν = √Det σ`; `P` is the covariance of `S(ζ)|0⟩`,
/// so `cosh 2r = Tr P`, `sinh 2r cos θ = P₁₁ − P₂₂`, `sinh 2r sin θ = 2P₁₂`.
pub fn decompose(state: &GaussianState) -> GaussianDecomposition {
    let nu = sqrt(state.cov.det().max(0.25));
    let p = (1.0 / (2.0 * nu)) * state.cov.to_mat2();
    let r = 0.5 * acosh(p.trace().max(1.0));
    let theta = atan2(2.0 * p.m12, p.m11 - p.m22);
    GaussianDecomposition {
        n_thermal: (nu - 0.5).max(0.0),
        zeta: Complex64::from_polar(r, theta),
        alpha: state.mean.to_amplitude(),
    }
}

/// Image of a Gaussian state on `dim` levels.
///
/// The state is assembled on `2·dim + 20` levels and cut to `dim`; the
/// discarded weight must stay below [`MAX_LEAKAGE`].
pub fn to_fock(state: &GaussianState, dim: usize) -> Result<FockDensityMatrix> {
    if dim == 0 {
        return Err(invalid("dim", 0.0, "must be >= 1"));
    }
    let parts = decompose(state);
    let big = 2 * dim + 20;
    let thermal = FockDensityMatrix::thermal(parts.n_thermal, big)?;
    let t = FockOperator::displacement(parts.alpha, big).matrix() * FockOperator::squeezing(parts.zeta, big).matrix();
    let t = t.view((0, 0), (dim, big)).into_owned();
    let weights = DMatrix::from_diagonal(&thermal.matrix.diagonal());
    let rho = &t * weights * t.adjoint();
    let out = FockDensityMatrix::from_trusted(rho);
    let leakage = out.leakage();
    if leakage.abs() > MAX_LEAKAGE {
        return Err(Error::InsufficientTruncation { dim, leakage });
    }
    Ok(out)
}

/// First and symmetrized second quadrature moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    /// `(⟨x̂⟩, ⟨ŷ⟩)`.
    pub mean: QuadVector,
    /// Symmetrized covariance.
    pub cov: Mat2,
}

impl FockMoments {
    /// As a Gaussian state, when physical.
    pub fn to_gaussian(&self) -> Result<GaussianState> {
        GaussianState::new(self.mean, CovMat::from_mat2(self.cov.symmetrized())?)
    }
}

/// Moments from `⟨a⟩`, `⟨a²⟩` and `⟨a†a⟩`, normalized by the trace.
pub fn moments(rho: &FockDensityMatrix) -> FockMoments {
    let m = &rho.matrix;
    let d = rho.dim();
    let mut a1 = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut n = 0.0;
    for k in 0..d {
        n += k as f64 * m[(k, k)].re;
        if k >= 1 {
            a1 += m[(k, k - 1)] * sqrt(k as f64);
        }
        if k >= 2 {
            a2 += m[(k, k - 2)] * sqrt((k * (k - 1)) as f64);
        }
    }
    let tr = rho.trace();
    let (a1, a2, n) = (a1 / tr, a2 / tr, n / tr);
    let mean = QuadVector::from_amplitude(a1);
    let xx = a2.re + n + 0.5 - mean.x * mean.x;
    let yy = -a2.re + n + 0.5 - mean.y * mean.y;
    let xy = a2.im - mean.x * mean.y;
    FockMoments {
        mean,
        cov: Mat2::new(xx, xy, xy, yy),
    }
}

/// Uhlmann fidelity together with the largest eigenvalue clamped to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockFidelity {
    /// `(Tr √(√ρ_a ρ_b √ρ_a))²`.
    pub fidelity: Fidelity,
    /// Magnitude of the most negative eigenvalue set to zero.
    pub clamped: f64,
}

fn clamped_sqrt(m: &DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, f64)> {
    let eig = m.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min < -NEGATIVE_TOL {
        return Err(Error::NegativeEigenvalue(min));
    }
    let roots = eig.eigenvalues.map(|l| Complex64::new(sqrt(l.max(0.0)), 0.0));
    let v = &eig.eigenvectors;
    Ok((v * DMatrix::from_diagonal(&roots) * v.adjoint(), (-min).max(0.0)))
}

/// `F = (Tr √(√ρ_a ρ_b √ρ_a))²` via Hermitian eigen-decompositions.
pub fn uhlmann_fidelity_fock(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<FockFidelity> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let (root_a, clamp_a) = clamped_sqrt(&a.matrix)?;
    let inner = hermitize(&root_a * &b.matrix * &root_a);
    let eig = inner.symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min < -NEGATIVE_TOL {
        return Err(Error::NegativeEigenvalue(min));
    }
    let tr: f64 = eig.eigenvalues.iter().map(|l| sqrt(l.max(0.0))).sum();
    Ok(FockFidelity {
        fidelity: Fidelity::new(tr * tr)?,
        clamped: clamp_a.max((-min).max(0.0)),
    })
}
