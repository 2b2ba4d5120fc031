//! Transmit-power minimization for a two-user downlink aided by a STAR-RIS
//! under the coupled phase-shift model.
//!
//! The math is generic over the scalar through [`Real`] (implemented for
//! `f32` and `f64`); the `*F64` / `*F32` aliases below pin the common
//! instantiations.

// NaN must fail comparisons, so `!(a <= b)` is used on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod channel;
pub mod error;
pub mod link;
pub mod optimizer;
pub mod oracle;
pub mod scalar;
pub mod star;

pub use baselines::{solve_conventional_split, solve_independent_phase};
pub use channel::{realize_channels, ChannelSet, Scenario};
pub use error::{Error, Result};
pub use link::{Access, DecodingOrder, EffectiveGains, NomaOrder, PowerBreakdown, RateTargets, User};
pub use optimizer::{ao_solve, solve_instance, AOConfig, AmplitudeSolver, PhaseModel, SolveResult, WorkCounters};
pub use oracle::{brute_force_independent, brute_force_solve, OracleResolution};
pub use scalar::Real;
pub use star::{CouplingSign, ElementImpedances, StarCoefficients};

pub type StarCoefficientsF64 = StarCoefficients<f64>;
pub type StarCoefficientsF32 = StarCoefficients<f32>;
pub type ChannelSetF64 = ChannelSet<f64>;
pub type ChannelSetF32 = ChannelSet<f32>;
pub type SolveResultF64 = SolveResult<f64>;
pub type SolveResultF32 = SolveResult<f32>;
pub type PowerBreakdownF64 = PowerBreakdown<f64>;
pub type PowerBreakdownF32 = PowerBreakdown<f32>;
pub type EffectiveGainsF64 = EffectiveGains<f64>;
pub type ElementImpedancesF64 = ElementImpedances<f64>;
