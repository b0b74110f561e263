//! First- and second-moment representation of one- and two-mode Gaussian
//! states, and the linear-optics maps acting on them.
//!
//! Quadratures are `x = (a + a†)/√2`, `y = (a − a†)/(i√2)`, so the vacuum
//! has covariance `½·I` and a coherent state `|α⟩` has mean `√2 (Re α, Im α)`.
//! Two-mode states are transformed as `σ → Sᵀ σ S`, `X → Sᵀ X`.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::math::{cos, cosh, sin, sinh, sqrt, SQRT_2};
use crate::PHYSICALITY_TOL;

/// A quadrature-space 2-vector `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadVector {
    /// Position-quadrature component.
    pub x: f64,
    /// Momentum-quadrature component.
    pub y: f64,
}

impl QuadVector {
    /// The origin.
    pub const ZERO: Self = Self { x: 0.0, y: 0.0 };

    /// Builds a vector from its components.
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Quadrature vector of a complex amplitude: `√2 (Re α, Im α)`.
    pub fn from_amplitude(alpha: Complex64) -> Self {
        Self::new(SQRT_2 * alpha.re, SQRT_2 * alpha.im)
    }

    /// Complex amplitude whose quadrature vector is `self`.
    pub fn to_amplitude(self) -> Complex64 {
        Complex64::new(self.x / SQRT_2, self.y / SQRT_2)
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    /// `true` when both components are finite.
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for QuadVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for QuadVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for QuadVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl Mul<QuadVector> for f64 {
    type Output = QuadVector;
    fn mul(self, v: QuadVector) -> QuadVector {
        QuadVector::new(self * v.x, self * v.y)
    }
}

/// A general real 2×2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    /// Row 1, column 1.
    pub m11: f64,
    /// Row 1, column 2.
    pub m12: f64,
    /// Row 2, column 1.
    pub m21: f64,
    /// Row 2, column 2.
    pub m22: f64,
}

impl Mat2 {
    /// The zero matrix.
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    /// The identity matrix.
    pub const IDENTITY: Self = Self::scalar(1.0);

    /// Builds a matrix from its entries in row-major order.
    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    /// `s·I`.
    pub const fn scalar(s: f64) -> Self {
        Self::new(s, 0.0, 0.0, s)
    }

    /// Diagonal matrix.
    pub const fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, 0.0, b)
    }

    /// Transpose.
    pub fn transpose(self) -> Self {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }

    /// Determinant.
    pub fn det(self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Trace.
    pub fn trace(self) -> f64 {
        self.m11 + self.m22
    }

    /// Inverse, failing on a vanishing determinant.
    pub fn inverse(self) -> Result<Self> {
        let det = self.det();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if !(det.abs() > 1e-300 && det.abs() > 1e-14 * scale * scale) {
            return Err(Error::Singular(det));
        }
        Ok(Self::new(
            self.m22 / det,
            -self.m12 / det,
            -self.m21 / det,
            self.m11 / det,
        ))
    }

    /// Matrix–vector product.
    pub fn apply(self, v: QuadVector) -> QuadVector {
        QuadVector::new(
            self.m11 * v.x + self.m12 * v.y,
            self.m21 * v.x + self.m22 * v.y,
        )
    }

    /// Quadratic form `vᵀ M v`.
    pub fn quadratic_form(self, v: QuadVector) -> f64 {
        let w = self.apply(v);
        v.x * w.x + v.y * w.y
    }

    /// Outer product `u vᵀ`.
    pub fn outer(u: QuadVector, v: QuadVector) -> Self {
        Self::new(u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y)
    }

    /// Largest absolute entry.
    pub fn max_abs(self) -> f64 {
        self.m11
            .abs()
            .max(self.m12.abs())
            .max(self.m21.abs())
            .max(self.m22.abs())
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self - other).max_abs()
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetrized(self) -> Self {
        let off = 0.5 * (self.m12 + self.m21);
        Self::new(self.m11, off, off, self.m22)
    }
}

impl Add for Mat2 {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(
            self.m11 + r.m11,
            self.m12 + r.m12,
            self.m21 + r.m21,
            self.m22 + r.m22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(
            self.m11 - r.m11,
            self.m12 - r.m12,
            self.m21 - r.m21,
            self.m22 - r.m22,
        )
    }
}

impl Mul for Mat2 {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.m11 * r.m11 + self.m12 * r.m21,
            self.m11 * r.m12 + self.m12 * r.m22,
            self.m21 * r.m11 + self.m22 * r.m21,
            self.m21 * r.m12 + self.m22 * r.m22,
        )
    }
}

impl Mul<Mat2> for f64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        Mat2::new(self * m.m11, self * m.m12, self * m.m21, self * m.m22)
    }
}

/// Symmetric 2×2 covariance matrix satisfying `Det ≥ ¼` and positivity.
///
/// Only three entries are stored, so `γ12 = γ21` holds structurally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMat {
    g11: f64,
    g12: f64,
    g22: f64,
}

impl CovMat {
    /// Vacuum covariance `½·I`.
    pub const VACUUM: Self = Self {
        g11: 0.5,
        g12: 0.0,
        g22: 0.5,
    };

    /// Builds a covariance matrix, rejecting unphysical entries.
    pub fn new(g11: f64, g12: f64, g22: f64) -> Result<Self> {
        let det = g11 * g22 - g12 * g12;
        let min_diag = g11.min(g22);
        let finite = g11.is_finite() && g12.is_finite() && g22.is_finite();
        if !finite || min_diag <= 0.0 || det < 0.25 - PHYSICALITY_TOL {
            return Err(Error::Unphysical { det, min_diag });
        }
        Ok(Self { g11, g12, g22 })
    }

    /// `s·I`, with `s ≥ ½`.
    pub fn scalar(s: f64) -> Result<Self> {
        Self::new(s, 0.0, s)
    }

    /// Builds from a general matrix, which must be symmetric to round-off.
    pub fn from_mat2(m: Mat2) -> Result<Self> {
        let asym = (m.m12 - m.m21).abs();
        if asym > 1e-9 * m.max_abs().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let s = m.symmetrized();
        Self::new(s.m11, s.m12, s.m22)
    }

    /// `γ11`.
    pub fn g11(&self) -> f64 {
        self.g11
    }

    /// `γ12 = γ21`.
    pub fn g12(&self) -> f64 {
        self.g12
    }

    /// `γ22`.
    pub fn g22(&self) -> f64 {
        self.g22
    }

    /// Expanded 2×2 matrix.
    pub fn to_mat2(&self) -> Mat2 {
        Mat2::new(self.g11, self.g12, self.g12, self.g22)
    }

    /// Determinant.
    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    /// Trace.
    pub fn trace(&self) -> f64 {
        self.g11 + self.g22
    }

    /// `true` when `Det = ¼` within `tol`.
    pub fn is_pure(&self, tol: f64) -> bool {
        (self.det() - 0.25).abs() <= tol
    }
}

/// Single-mode Gaussian state: mean quadrature vector and covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    /// Mean quadrature vector.
    pub mean: QuadVector,
    /// Covariance matrix.
    pub cov: CovMat,
}

impl GaussianState {
    /// Pairs a mean vector with a covariance matrix.
    pub fn new(mean: QuadVector, cov: CovMat) -> Result<Self> {
        if !mean.is_finite() {
            return Err(invalid("mean", f64::NAN, "must be finite"));
        }
        Ok(Self { mean, cov })
    }

    /// The vacuum `|0⟩`.
    pub fn vacuum() -> Self {
        Self {
            mean: QuadVector::ZERO,
            cov: CovMat::VACUUM,
        }
    }

    /// Coherent state `|α⟩` with `α = alpha_re + i·alpha_im`.
    pub fn coherent(alpha_re: f64, alpha_im: f64) -> Self {
        Self {
            mean: QuadVector::from_amplitude(Complex64::new(alpha_re, alpha_im)),
            cov: CovMat::VACUUM,
        }
    }

    /// Displaced squeezed state `D(α) S(ξ)|0⟩`, `ξ = xi_mod·e^{i·xi_phase}`.
    pub fn squeezed(alpha: Complex64, xi_mod: f64, xi_phase: f64) -> Result<Self> {
        if !(xi_mod >= 0.0) || !xi_mod.is_finite() {
            return Err(invalid("xi_mod", xi_mod, "must be finite and >= 0"));
        }
        let (c, s) = (cosh(2.0 * xi_mod), sinh(2.0 * xi_mod));
        let (cp, sp) = (cos(xi_phase), sin(xi_phase));
        // The smaller diagonal entry follows from g11·g22 = ¼(1 + s² sin²φ)
        // without cancellation.
        let big = 0.5 * (c + s * cp.abs());
        let small = 0.25 * (1.0 + s * s * sp * sp) / big;
        let (g11, g22) = if cp >= 0.0 { (big, small) } else { (small, big) };
        let g12 = -0.5 * s * sp;
        Self::new(QuadVector::from_amplitude(alpha), CovMat::new(g11, g12, g22)?)
    }

    /// Displaced thermal state with `n_thermal` mean photons.
    pub fn thermal(alpha: Complex64, n_thermal: f64) -> Result<Self> {
        if !(n_thermal >= 0.0) || !n_thermal.is_finite() {
            return Err(invalid("N", n_thermal, "must be finite and >= 0"));
        }
        Self::new(
            QuadVector::from_amplitude(alpha),
            CovMat::scalar(n_thermal + 0.5)?,
        )
    }

    /// Shifts the mean by `d`; the covariance is untouched.
    pub fn displace(&self, d: QuadVector) -> Self {
        Self {
            mean: self.mean + d,
            cov: self.cov,
        }
    }

    /// `true` when the covariance has `Det = ¼` within `tol`.
    pub fn is_pure(&self, tol: f64) -> bool {
        self.cov.is_pure(tol)
    }

    /// Mean photon number `(Tr σ + |X|²)/2 − ½`.
    pub fn mean_photon_number(&self) -> f64 {
        0.5 * (self.cov.trace() + self.mean.norm_sq()) - 0.5
    }

    /// Largest absolute difference over means and covariance entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.mean
            .max_abs_diff(other.mean)
            .max(self.cov.to_mat2().max_abs_diff(other.cov.to_mat2()))
    }

    /// Product state `self ⊗ |0⟩⟨0|`.
    pub fn tensor_with_vacuum(&self) -> TwoModeGaussianState {
        TwoModeGaussianState {
            mean1: self.mean,
            mean2: QuadVector::ZERO,
            a: self.cov,
            b: CovMat::VACUUM,
            c: Mat2::ZERO,
        }
    }
}

/// Selects one mode of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeIndex {
    /// Mode 1.
    First,
    /// Mode 2.
    Second,
}

impl TryFrom<usize> for ModeIndex {
    type Error = Error;

    fn try_from(k: usize) -> Result<Self> {
        match k {
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            _ => Err(Error::InvalidMode(k)),
        }
    }
}

/// Two-mode Gaussian state with covariance `[[A, C], [Cᵀ, B]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeGaussianState {
    /// Mean of mode 1.
    pub mean1: QuadVector,
    /// Mean of mode 2.
    pub mean2: QuadVector,
    /// Covariance block of mode 1.
    pub a: CovMat,
    /// Covariance block of mode 2.
    pub b: CovMat,
    /// Cross block `⟨mode 1, mode 2⟩`.
    pub c: Mat2,
}

impl TwoModeGaussianState {
    /// Full 4×4 covariance matrix.
    pub fn covariance(&self) -> [[f64; 4]; 4] {
        let (a, b, c) = (self.a.to_mat2(), self.b.to_mat2(), self.c);
        [
            [a.m11, a.m12, c.m11, c.m12],
            [a.m21, a.m22, c.m21, c.m22],
            [c.m11, c.m21, b.m11, b.m12],
            [c.m12, c.m22, b.m21, b.m22],
        ]
    }

    /// Mean 4-vector `(X₁, X₂)`.
    pub fn mean(&self) -> [f64; 4] {
        [self.mean1.x, self.mean1.y, self.mean2.x, self.mean2.y]
    }

    /// Reassembles a state from a full covariance matrix and mean.
    pub fn from_parts(cov: &[[f64; 4]; 4], mean: &[f64; 4]) -> Result<Self> {
        let block = |r: usize, c: usize| {
            Mat2::new(cov[r][c], cov[r][c + 1], cov[r + 1][c], cov[r + 1][c + 1])
        };
        let upper = block(0, 2);
        let lower = block(2, 0);
        let asym = upper.max_abs_diff(lower.transpose());
        if asym > 1e-9 * upper.max_abs().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let state = Self {
            mean1: QuadVector::new(mean[0], mean[1]),
            mean2: QuadVector::new(mean[2], mean[3]),
            a: CovMat::from_mat2(block(0, 0))?,
            b: CovMat::from_mat2(block(2, 2))?,
            c: upper,
        };
        if !state.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(state)
    }

    /// Cholesky test of the full covariance.
    pub fn is_positive_definite(&self) -> bool {
        let m = self.covariance();
        let mut l = [[0.0f64; 4]; 4];
        for i in 0..4 {
            for j in 0..=i {
                let mut s = m[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return false;
                    }
                    l[i][i] = sqrt(s);
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        true
    }

    /// Reduced state of one mode; the cross block is discarded.
    pub fn marginal(&self, mode: ModeIndex) -> GaussianState {
        match mode {
            ModeIndex::First => GaussianState {
                mean: self.mean1,
                cov: self.a,
            },
            ModeIndex::Second => GaussianState {
                mean: self.mean2,
                cov: self.b,
            },
        }
    }

    /// Applies `σ → Sᵀ σ S`, `X → Sᵀ X`.
    pub fn apply_symplectic(&self, s: &Symplectic4) -> Result<Self> {
        let sigma = self.covariance();
        let x = self.mean();
        let m = &s.0;
        let mut tmp = [[0.0f64; 4]; 4];
        let mut out = [[0.0f64; 4]; 4];
        let mut mean = [0.0f64; 4];
        // tmp = Sᵀ σ
        for i in 0..4 {
            for j in 0..4 {
                tmp[i][j] = (0..4).map(|k| m[k][i] * sigma[k][j]).sum();
            }
            mean[i] = (0..4).map(|k| m[k][i] * x[k]).sum();
        }
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|k| tmp[i][k] * m[k][j]).sum();
            }
        }
        // Exact symmetry of the result; the two triangles differ by round-off.
        for i in 0..4 {
            for j in 0..i {
                let v = 0.5 * (out[i][j] + out[j][i]);
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        // Symplectic images of valid states are valid.
        let block = |r: usize, c: usize| {
            Mat2::new(out[r][c], out[r][c + 1], out[r + 1][c], out[r + 1][c + 1])
        };
        Ok(Self {
            mean1: QuadVector::new(mean[0], mean[1]),
            mean2: QuadVector::new(mean[2], mean[3]),
            a: CovMat::from_mat2(block(0, 0))?,
            b: CovMat::from_mat2(block(2, 2))?,
            c: block(0, 2),
        })
    }
}

/// Real 4×4 matrix acting on two-mode phase space as `σ → Sᵀ σ S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Symplectic4(pub [[f64; 4]; 4]);

impl Symplectic4 {
    /// The identity map.
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self(m)
    }

    /// Beam splitter of transmissivity `tau`:
    /// `[[√τ·I, √(1−τ)·I], [−√(1−τ)·I, √τ·I]]`.
    pub fn beam_splitter(tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(invalid("tau", tau, "must lie in [0, 1]"));
        }
        let (t, r) = (sqrt(tau), sqrt(1.0 - tau));
        Ok(Self([
            [t, 0.0, r, 0.0],
            [0.0, t, 0.0, r],
            [-r, 0.0, t, 0.0],
            [0.0, -r, 0.0, t],
        ]))
    }

    /// Largest entry of `|SᵀS − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let m = &self.0;
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let v: f64 = (0..4).map(|k| m[k][i] * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// Largest entry of `|SᵀΩS − Ω|` with `Ω = J ⊕ J`, `J = [[0, 1], [−1, 0]]`.
    pub fn symplectic_defect(&self) -> f64 {
        let mut omega = [[0.0f64; 4]; 4];
        omega[0][1] = 1.0;
        omega[1][0] = -1.0;
        omega[2][3] = 1.0;
        omega[3][2] = -1.0;
        let m = &self.0;
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let mut v = 0.0;
                for k in 0..4 {
                    for l in 0..4 {
                        v += m[k][i] * omega[k][l] * m[l][j];
                    }
                }
                worst = worst.max((v - omega[i][j]).abs());
            }
        }
        worst
    }
}
