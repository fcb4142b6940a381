//! Grover-mixer and transverse-field QAOA on higher-order binary
//! optimization problems.
//!
//! The crate covers instance generation and exact spectra ([`hubo`]),
//! statevector simulation ([`simulator`]), layer-wise angle optimization
//! ([`variational`]), the Gaussian amplitude model used for classical angle
//! pre-optimization ([`analytic`]), extreme-value estimates of the ground
//! energy ([`evt`]), and ensemble experiments ([`harness`]).

pub mod analytic;
pub mod error;
pub mod evt;
pub mod harness;
pub mod hubo;
pub mod rng;
pub mod search;
pub mod simulator;
pub mod variational;

pub use analytic::{preoptimize_gm_angles, AnalyticSchedule, AnalyticState, DampingMode};
pub use error::{Error, Result};
pub use evt::{constant_angles, emin_estimate_closed_form, emin_estimate_quantile, gumbel_params, inv_norm_cdf, GumbelParams};
pub use harness::{run_cell, run_sweep, run_sweep_with, CurveSet, ExperimentConfig, Figure, Method, SweepResults};
pub use hubo::{enumerate_spectrum, HuboInstance, HuboTerm, Problem, Spectrum, MAX_QUBITS};
pub use search::OptBudget;
pub use simulator::{run_circuit, Mixer, ParamSchedule, StateVector};
pub use variational::{optimize_layer, optimize_layerwise, LayerwiseTrace};
