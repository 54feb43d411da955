//! Exact free-fermion solution of the ring-frustrated non-Hermitian XY chain,
//! with a brute-force exact-diagonalization oracle to check it against.
//!
//! * [`model`]: parameters, momentum grids, dispersion, phase classification.
//! * [`spectrum`]: many-body levels channel by channel, ground state and gap.
//! * [`ed`]: dense and momentum-resolved diagonalization of the spin matrix.
//! * [`phase_map`]: `(h, δ)` scans and phase boundaries.
//! * [`topology`]: Bloch vector, winding number, loop trajectories.
//! * [`verification`]: multiset matching of analytic levels against ED.

pub mod ed;
pub mod error;
pub mod model;
pub mod output;
pub mod phase_map;
pub mod spectrum;
pub mod topology;
pub mod verification;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use model::{
    classify_phase, f_min, hermitian_counterpart, momentum_grid, omega, reality_function, Channel,
    ModelParams, MomentumGrid, Parity, PhaseKind, PhaseLabel,
};
pub use spectrum::{
    enumerate_spectrum, ground_state, low_lying, spectral_gap, EnergyShell, LevelDescriptor,
    PairChoice, SpectrumSet,
};
pub use verification::{channel_match, match_multisets, MatchReport};
