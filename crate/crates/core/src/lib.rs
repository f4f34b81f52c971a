//! Generalized Thouless pumping on a two-level Rice-Mele-type model driven
//! by a phase ramp `φ(τ)`.
//!
//! Every numerical routine is generic over the scalar type ([`Real`], f32 or
//! f64). The `*F64` aliases below fix the usual double-precision choice.

// `!(x > 0)` comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apt;
pub mod charge;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod pulses;
pub mod quad;
pub mod scalar;
pub mod spin;

pub use apt::{
    designed_components, first_order_density, linear_ramp_split, n_cycle_charge, q_ibc_general,
    q_ibc_linear, q_ng, q_os, q_st, q_tp, LinearRampSplit, PumpComponents,
};
pub use charge::{
    peak_finder, q_of_k, sweep, total_charge, velocity_map, KGrid, Peak, SweepCurve, SweepOptions,
    SweepResult, TauSampling, VelocityMap,
};
pub use dynamics::{propagate, PropagationConfig, PropagationMethod, Trajectory};
pub use error::{Error, Result};
pub use model::{
    berry_curvature, chern_number, eigensystem, hamiltonian, initial_state, velocity_operator,
    Band, ModelParams, ProtocolKind, QubitState, RampProtocol,
};
pub use pulses::{
    calibrate_rabi, compile_sequence, measurement_axis, rwa_fidelity, simulate_lab_frame,
    CalibrationFit, PulseSegment, PulseSequence,
};
pub use scalar::Real;
pub use spin::{SpinOperator, Spinor};

pub type ModelParamsF64 = ModelParams<f64>;
pub type RampProtocolF64 = RampProtocol<f64>;
pub type QubitStateF64 = QubitState<f64>;
pub type SpinOperatorF64 = SpinOperator<f64>;
pub type TrajectoryF64 = Trajectory<f64>;
pub type KGridF64 = KGrid<f64>;
pub type TauSamplingF64 = TauSampling<f64>;
pub type SweepResultF64 = SweepResult<f64>;
pub type PumpComponentsF64 = PumpComponents<f64>;
pub type PulseSequenceF64 = PulseSequence<f64>;

pub type ModelParamsF32 = ModelParams<f32>;
pub type RampProtocolF32 = RampProtocol<f32>;
pub type QubitStateF32 = QubitState<f32>;
