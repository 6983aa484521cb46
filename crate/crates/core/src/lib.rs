//! Strictly-dissipative dynamics of a particle in a viscous medium, the
//! position-only re-parameterization of its friction force, and the
//! quantum problems that follow from treating the resulting source
//! function as a potential.
//!
//! * [`classical`]: trajectories, energy bookkeeping, SD classification.
//! * [`reparam`]: velocity field, transformed force, source function and
//!   the time-integral / position-integral equivalence check.
//! * [`quantum`]: analytic oscillator spectrum and a finite-difference oracle.
//! * [`tunnelling`]: barrier transmission by closed form, by the literal
//!   matching conditions, and by a transfer-matrix integration.

// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod ode;
pub mod quadrature;
pub mod quantum;
pub mod reparam;
pub mod tunnelling;

pub use classical::{
    analytic_trajectory, classify_sd, dissipated_work, integrate_eom, kinetic_energy,
    rayleigh_power, ClassifyOptions, EnergyLedger, EomForm, SDParams, SDReport, TimeGrid,
    Trajectory,
};
pub use error::{Error, Result};
pub use quadrature::PartitionRule;
pub use quantum::{
    analytic_energy, analytic_state, hermite, solve_spectrum_fd, time_factor, QuantumParams,
    SpatialGrid, Spectrum, WaveSample,
};
pub use reparam::{
    build_hamiltonian, characteristic_roots, source_function, theorem1_check, transformed_force,
    velocity_field, HamiltonianSpec, IntegralCheck, RootPair, VelocityField,
};
pub use tunnelling::{
    baseline_transmission, numeric_transmission, paper_matching, paper_transmission,
    suppression_fit, BarrierConfig, Interior, MatchedAmplitudes, ModeTag, SuppressionFit,
    TransmissionMode, TransmissionResult, TransmissionRow,
};
