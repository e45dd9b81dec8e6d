//! Contour dynamics for the three-phase Muskat problem in porous media.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod io;
pub mod linear;
pub mod quadrature;
pub mod state;

pub use error::{MuskatError, Result};
pub use state::{ContourPair, Densities, Grid2, SpectralField, SurfaceField};
