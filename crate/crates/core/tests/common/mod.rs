use linclone_core::{CovMat, GaussianState, QuadVector};
use num_complex::Complex64;
use proptest::prelude::*;

/// Displaced squeezed thermal state.
pub fn mixed_state(n_th: f64, r: f64, phase: f64, alpha: (f64, f64)) -> GaussianState {
    let sq = GaussianState::squeezed(Complex64::new(0.0, 0.0), r, phase).unwrap();
    let k = 2.0 * n_th + 1.0;
    let c = &sq.cov;
    let cov = CovMat::new(k * c.g11(), k * c.g12(), k * c.g22()).unwrap();
    GaussianState::new(QuadVector::from_amplitude(Complex64::new(alpha.0, alpha.1)), cov).unwrap()
}

pub fn any_state(max_n: f64, max_r: f64, max_alpha: f64) -> impl Strategy<Value = GaussianState> {
    (
        0.0..=max_n,
        0.0..=max_r,
        0.0..core::f64::consts::TAU,
        -max_alpha..=max_alpha,
        -max_alpha..=max_alpha,
    )
        .prop_map(|(n, r, p, a, b)| mixed_state(n, r, p, (a, b)))
}
