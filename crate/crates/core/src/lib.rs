//! Density-matrix simulation of unitary pre/post-processing around
//! single-qubit noise channels acting on every qubit of a register.
//!
//! The pipeline is `ρ_out = V · E^{⊗n}[U |Ψ⟩⟨Ψ| U†] · V†`, scored by
//! `F = ⟨Ψ|ρ_out|Ψ⟩`, with `|Ψ⟩ = cos(θ/2)|+…+⟩ + sin(θ/2)|−…−⟩`.

pub mod channels;
pub mod circuits;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod optimizer;
pub mod par;
pub mod qmath;
pub mod schemes;
pub mod validation;

pub use channels::{apply_product_channel, choi_matrix, make_channel, ChannelKind, KrausChannel};
pub use circuits::{b_op, compile, d_op, u_prep, x_all, CircuitDef};
pub use error::{Error, Result};
pub use estimation::{fidelity_exact, fidelity_sampled, point_seed, FidelityEstimate, Mode};
pub use harness::{run_sweep, serialize, FidelityCurve, OutputFormat, SweepConfig, SweepReport};
pub use optimizer::{calibrate_xi_sampled, optimize_xi_exact, Calibration, XiOptimum};
pub use qmath::{ComplexMatrix, DensityMatrix, GateKind, GateSpec, StateVector};
pub use schemes::{input_state, resolve_scheme, run_protected, Scheme, SchemeInstance};
