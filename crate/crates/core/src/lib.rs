//! Dissipative Jaynes-Cummings toolkit.
//!
//! Builds the dressed basis of the resonant JC Hamiltonian, the dressed-state
//! jump operators and their Bohr frequencies, thermal bath coefficients, and
//! four master-equation generators as dense superoperators:
//!
//! * [`GeneratorKind::PhenomBare`]: cavity-only damping built from the bare
//!   annihilation operator.
//! * [`GeneratorKind::PhenomDressed`]: the same equation expanded term by term
//!   over dressed-state jump operators.
//! * [`GeneratorKind::SecularRwa`]: microscopic generator keeping only
//!   diagonal jump pairs.
//! * [`GeneratorKind::QuasiRwa`]: microscopic generator keeping every
//!   cross-label product oscillating at Rabi-scale frequencies.
//!
//! Units are `hbar = k_B = 1`. Superoperators act on column-stacked density
//! matrices expressed in the dressed basis.

// `!(x > 0.0)` is the NaN-rejecting form used by the validators.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bath;
pub mod error;
pub mod evolve;
pub mod generators;
pub mod hilbert;
pub mod jumps;
pub mod linalg;
mod quadrature;

pub use analysis::{
    compare_generators, delta_n_surface, fit_damped_cosine, fit_rabi, rate_spread,
    timescale_check, ComparisonReport, DampedCosineFit, DeltaNSurface, RabiFit, RateSource,
    RateSpreadReport, TimescaleRecord,
};
pub use bath::{
    bose_occupation, gamma_coefficient, lamb_shift, thermal_spectral_density, BathModel,
    GammaCoefficient, LambShiftPolicy, SpectralModel,
};
pub use error::{JcError, Result};
pub use evolve::{
    evolve, health, observables, DensityMatrix, Health, IntegratorConfig, Observables, Trajectory,
};
pub use generators::{
    build_phenom_bare, build_phenom_dressed, build_quasi_rwa, build_secular, kossakowski_report,
    GeneratorKind, KossakowskiReport, Liouvillian,
};
pub use hilbert::{
    annihilation_dressed, build_dressed_basis, jc_hamiltonian, Atom, BareState, BasisKind,
    Branch, DressedBasis, DressedLabel, OperatorMatrix, SystemParams,
};
pub use jumps::{
    bohr_frequency, enumerate_jumps, frequency_difference, frequency_sum, jump_operator,
    BohrFrequency, JumpLabel,
};
pub use linalg::{CMatrix, C64};

/// Formats a float for CSV output: 17 significant digits, lowercase
/// scientific notation.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}
