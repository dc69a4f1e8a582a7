//! Two-photon (Hanbury Brown–Twiss) intensity interferometry for small,
//! short-lived chaotic light sources such as sonoluminescing bubbles.
//!
//! Units throughout: energies in eV, lengths in nm, times in fs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlator;
pub mod error;
pub mod extraction;
pub mod filter;
pub mod io;
pub mod kinematics;
pub mod moments;
pub mod quadrature;
pub mod source;
pub mod spectrum;
pub mod units;

pub use correlator::{
    gaussian_correlator, mc_correlator, numeric_correlator, scan, CorrelatorPoint, Engine, EnergyMode,
    ScanKind, ScanModel, ScanRequest, ScanResult,
};
pub use error::{Error, Result};
pub use extraction::{fit_scan, pulse_length_from_intercept, FitMethod, FitResult, ResolvabilityReport};
pub use filter::{effective_intercept, FilterSpec};
pub use kinematics::{PairKinematics, PhotonMomentum};
pub use moments::{HbtRadii, SpaceTimeVariances};
pub use source::{EmissionFunction, FlowBoost, FlowProfile, GaussianSource};
pub use spectrum::Spectrum;
pub use units::{TransparencyWindow, C_LIGHT, HBAR_C, LAMBDA_CHAOTIC};
