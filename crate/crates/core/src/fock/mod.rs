//! Truncated Fock-space engine, independent of the phase-space formalism,
//! used to check it by brute force: state images, quadrature moments,
//! Uhlmann fidelity by matrix square roots, and the cloner as an explicit
//! measure-and-displace channel.

mod channel;
mod density;
mod hermite;
mod operators;

pub use channel::{apply_cloner_fock, FockCloneOutput, OutcomeGrid};
pub use density::{
    decompose, moments, to_fock, uhlmann_fidelity_fock, FockDensityMatrix, FockFidelity, FockMoments,
    GaussianDecomposition, MAX_LEAKAGE, NEGATIVE_TOL,
};
pub use hermite::{gauss_hermite, GaussHermite};
pub use operators::{displacement_block, loss_channel, FockOperator, LadderTable};
