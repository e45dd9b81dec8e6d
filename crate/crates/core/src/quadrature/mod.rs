//! Integral operators: interface velocities, fluid velocity, the Darcy kernel and its
//! Fourier multiplier, hemisphere means and the near/far splitting.

pub mod bessel;
pub mod gauss;
pub mod hemisphere;
pub mod interface;
pub mod kernel;
pub mod rule;
pub mod splitting;
pub mod velocity;

pub use hemisphere::{hemisphere_integral, hemisphere_mean, odd_control_mean};
pub use interface::{interface_rhs, InterfaceOperator, TailCorrection};
pub use kernel::{
    darcy_multiplier, darcy_multiplier_check, velocity_from_density, BallRule, Kernel3,
    PeriodicDensity3,
};
pub use rule::{GridStencil, PolarQuadRule, RuleParams};
pub use splitting::{bound_splitting_eval, SplitEval, SplitRule};
pub use velocity::{fluid_velocity, velocity_sup, SampleSpec, Surface, VelocityEvaluator};
