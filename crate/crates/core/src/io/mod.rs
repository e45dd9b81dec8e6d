//! Scenario input, run artifacts, and the drivers behind the command-line tool.

pub mod artifacts;
mod run;
mod scenario;

pub use run::{rediagnose, run_scenario, squirt_check, RunArtifacts, RunOptions, RunReport};
pub use scenario::{
    parse_scenario, parse_scenario_str, DiagnosticsSpec, GridSpec, ModeSpec, ProbeSpec,
    QuadratureSpec, RandomBand, Scenario, SteppingSpec, SurfaceSpec,
};
