//! Multichannel scattering of two atoms in a harmonic waveguide with an
//! anisotropic transverse trap.
//!
//! Units throughout: `hbar = mu = 1`, the weaker transverse frequency
//! `omega2 = 1`, lengths in `a_perp = sqrt(hbar / (mu omega2))`.
#![no_std]

extern crate alloc;

pub mod banded;
pub mod basis;
pub mod channels;
pub mod config;
pub mod error;
pub mod exec;
pub mod interaction;
pub mod numerics;
pub mod observables;
pub mod solver;
pub mod spectra;

pub use channels::{channel_momentum, enumerate_channels, threshold_energy, Channel, ChannelSet, MomentumValue};
pub use config::TrapConfig;
pub use error::{Error, Result};
pub use interaction::{
    calibrate_depth, calibrate_depth_in, coupling_matrix, Calibration, CalibrationTarget, DepthWindow,
    GaussianPotential, ScatteringLength, UnitCoupling,
};
pub use solver::{
    amplitudes_from_k, extract_k, propagate_logderiv, solve, Diagnostics, GridSpec, ScatteringSolution, Solver, C64,
};
pub use exec::{Executor, Sequential};
pub use observables::{
    flux_budget, partial_transmission, reflection, total_transmission, total_transmission_over,
    transition_probability, unitarity_defect, PopulationWeights,
};
pub use spectra::{
    bound_state_energy, detect_splitting, locate_cir, locate_transmission_minimum, resonance_energy, spectrum,
    BoundState, Resonance, ScanSettings, SpectrumKind, SpectrumPoint, SplitMinimum, TransmissionMinimum,
};
