//! Truncated Fock-space operators.
//!
//! Matrix elements on the truncated space are those of the untruncated
//! operators: displacement follows a ladder recurrence in `m` and `n`,
//! squeezing its disentangled form, in which every intermediate photon
//! number is at most `min(m, n)`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::math::{cosh, exp, log, sqrt, tanh};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `ln k!` for `k = 0..n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    for k in 0..n {
        if k > 1 {
            acc += log(k as f64);
        }
        out.push(acc);
    }
    out
}

/// Table `T[m][k] = √(m!/k!)/(m−k)!` for `k ≤ m < dim`.
///
/// Matrix elements of `e^{c a}` are `⟨k|e^{c a}|n⟩ = c^{n−k}·T[n][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderTable {
    dim: usize,
    coef: Vec<f64>,
}

impl LadderTable {
    /// Builds the table for photon numbers below `dim`.
    pub fn new(dim: usize) -> Self {
        let lf = ln_factorials(dim);
        let mut coef = vec![0.0; dim * dim];
        for m in 0..dim {
            for k in 0..=m {
                coef[m * dim + k] = exp(0.5 * (lf[m] - lf[k]) - lf[m - k]);
            }
        }
        Self { dim, coef }
    }

    /// Largest supported photon number plus one.
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn at(&self, m: usize, k: usize) -> f64 {
        self.coef[m * self.dim + k]
    }

    /// `(e^{c a} v)_k = Σ_{n≥k} c^{n−k} T[n][k] v_n` for `k < out`.
    pub fn lower(&self, v: &[Complex64], c: Complex64, out: usize) -> Vec<Complex64> {
        let powers = powers(c, v.len());
        (0..out)
            .map(|k| {
                (k..v.len())
                    .map(|n| powers[n - k] * (self.at(n, k) * v[n]))
                    .fold(ZERO, |a, b| a + b)
            })
            .collect()
    }

}

/// `⟨m|D(γ)|n⟩` for `m < rows`, `n < cols`, from
/// `⟨0|D|n⟩ = e^{−|γ|²/2}(−γ*)ⁿ/√n!` and
/// `√(m+1) D_{m+1,n} = γ D_{m,n} + √n D_{m,n−1}` (from `aD = D(a + γ)`).
/// Every term stays bounded by one, unlike the normally ordered sum.
pub fn displacement_block(gamma: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let mut d = DMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return d;
    }
    let roots: Vec<f64> = (0..rows.max(cols) + 1).map(|k| sqrt(k as f64)).collect();
    let mut top = Complex64::new(exp(-0.5 * gamma.norm_sqr()), 0.0);
    let step = -gamma.conj();
    for n in 0..cols {
        d[(0, n)] = top;
        top = top * step / roots[n + 1];
    }
    for m in 0..rows - 1 {
        for n in 0..cols {
            let mut next = gamma * d[(m, n)];
            if n > 0 {
                next += d[(m, n - 1)] * roots[n];
            }
            d[(m + 1, n)] = next / roots[m + 1];
        }
    }
    d
}

fn powers(c: Complex64, n: usize) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(n.max(1));
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..n.max(1) {
        p.push(acc);
        acc *= c;
    }
    p
}

/// A square operator on the `dim`-level truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: DMatrix<Complex64>,
}

impl FockOperator {
    /// Wraps a square matrix.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> crate::Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(crate::Error::DimensionMismatch(matrix.nrows(), matrix.ncols()));
        }
        Ok(Self { matrix })
    }

    /// Truncation dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Matrix elements `⟨m|O|n⟩`.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Annihilation operator `a`.
    pub fn annihilation(dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            m[(n - 1, n)] = Complex64::new(sqrt(n as f64), 0.0);
        }
        Self { matrix: m }
    }

    /// `D(α) = exp{α a† − α* a}`.
    pub fn displacement(alpha: Complex64, dim: usize) -> Self {
        Self {
            matrix: displacement_block(alpha, dim, dim),
        }
    }

    /// `S(ζ) = exp{½(ζ a†² − ζ* a²)}`, from
    /// `S = e^{½e^{iθ}tanh r·a†²} (cosh r)^{−(a†a+½)} e^{−½e^{−iθ}tanh r·a²}`
    /// with `ζ = r e^{iθ}`.
    pub fn squeezing(zeta: Complex64, dim: usize) -> Self {
        let r = zeta.norm();
        let phase = if r > 0.0 { zeta / r } else { Complex64::new(1.0, 0.0) };
        let t = tanh(r);
        let c_raise = 0.5 * t * phase;
        let c_lower = -0.5 * t * phase.conj();
        let lf = ln_factorials(dim);
        let ln_sech = -log(cosh(r));
        // ⟨m|e^{c a†²}|k⟩ = c^j/j! √(m!/k!) for m = k + 2j.
        let pair = |c: Complex64, hi: usize, lo: usize| -> Complex64 {
            let j = (hi - lo) / 2;
            pow(c, j) * exp(0.5 * (lf[hi] - lf[lo]) - lf[j])
        };
        let mut m = DMatrix::zeros(dim, dim);
        for row in 0..dim {
            for col in 0..dim {
                if (row + col) % 2 == 1 {
                    continue;
                }
                let mut acc = ZERO;
                let mut k = row.min(col);
                loop {
                    let mid = exp(ln_sech * (k as f64 + 0.5));
                    acc += pair(c_raise, row, k) * mid * pair(c_lower, col, k);
                    if k < 2 {
                        break;
                    }
                    k -= 2;
                }
                m[(row, col)] = acc;
            }
        }
        Self { matrix: m }
    }

    /// `‖O†O − I‖_max` over the leading `keep` levels.
    pub fn unitarity_defect(&self, keep: usize) -> f64 {
        let keep = keep.min(self.dim());
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..keep {
            for j in 0..keep {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }
}

fn pow(c: Complex64, j: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..j {
        acc *= c;
    }
    acc
}

/// Pure-loss channel of transmissivity `tau`, the marginal of a beam
/// splitter with vacuum in the other port:
/// `ρ'_{m,m'} = Σ_k √C(m+k,k) √C(m'+k,k) t^{m+m'} r^{2k} ρ_{m+k,m'+k}`.
pub fn loss_channel(rho: &DMatrix<Complex64>, tau: f64) -> DMatrix<Complex64> {
    let dim = rho.nrows();
    let (t, r2) = (sqrt(tau), 1.0 - tau);
    let lf = ln_factorials(dim);
    // b[m][k] = √C(m+k,k) t^m r^k.
    let mut b = vec![0.0; dim * dim];
    for m in 0..dim {
        for k in 0..dim - m {
            let binom = exp(0.5 * (lf[m + k] - lf[m] - lf[k]));
            b[m * dim + k] = binom * ipow(t, m) * sqrt(ipow(r2, k));
        }
    }
    let mut out = DMatrix::zeros(dim, dim);
    for m in 0..dim {
        for mp in 0..dim {
            let mut acc = ZERO;
            for k in 0..dim - m.max(mp) {
                acc += rho[(m + k, mp + k)] * (b[m * dim + k] * b[mp * dim + k]);
            }
            out[(m, mp)] = acc;
        }
    }
    out
}

fn ipow(x: f64, n: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= x;
    }
    acc
}
