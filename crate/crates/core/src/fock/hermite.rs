//! Gauss–Hermite nodes and weights for `∫ e^{−u²} f(u) du`.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::math::{exp, sqrt};

/// Nodes in ascending order with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    /// Abscissae.
    pub nodes: Vec<f64>,
    /// Weights, summing to `√π`.
    pub weights: Vec<f64>,
    /// `weights[i]·e^{nodes[i]²}`, accurate even where the weight underflows
    /// in relative terms.
    pub scaled_weights: Vec<f64>,
}

/// Hermite functions `h_k(x) = H_k(x) e^{−x²/2} / √(2^k k! √π)` for
/// `k = n−1` and `k = n`.
fn hermite_functions(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = exp(-0.5 * x * x) / sqrt(sqrt(core::f64::consts::PI));
    // Σ_{k<n} h_k² accumulated alongside.
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += cur * cur;
        let next = sqrt(2.0 / (k as f64 + 1.0)) * x * cur - sqrt(k as f64 / (k as f64 + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    (prev, cur, sum_sq)
}

/// `n`-point rule. Nodes start from the eigenvalues of the Jacobi matrix
/// (Golub–Welsch) and are polished by Newton steps on `h_n`; weights come
/// from `w_i e^{x_i²} = 1 / Σ_{k<n} h_k(x_i)²`.
pub fn gauss_hermite(n: usize) -> GaussHermite {
    if n == 0 {
        return GaussHermite {
            nodes: Vec::new(),
            weights: Vec::new(),
            scaled_weights: Vec::new(),
        };
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = sqrt(k as f64 / 2.0);
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigen().eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    // Symmetrize against eigen-solver rounding.
    for i in 0..n / 2 {
        let x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let root_2n = sqrt(2.0 * n as f64);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (hm1, h, _) = hermite_functions(n, *x);
            // h_n' = √(2n) h_{n−1} − x h_n.
            let dh = root_2n * hm1 - *x * h;
            if dh != 0.0 {
                *x -= h / dh;
            }
        }
    }
    let scaled_weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let (_, _, sum_sq) = hermite_functions(n, x);
            1.0 / sum_sq
        })
        .collect();
    let weights = nodes
        .iter()
        .zip(&scaled_weights)
        .map(|(&x, &s)| s * exp(-x * x))
        .collect();
    GaussHermite {
        nodes,
        weights,
        scaled_weights,
    }
}
