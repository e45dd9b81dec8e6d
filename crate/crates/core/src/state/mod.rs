//! Periodic grid, interface graphs and the norm estimators built on them.

mod grid;
pub mod norms;
pub mod spectral;

pub use grid::Grid2;
pub use norms::{contour_distance_sup, holder_norm_grad, mean_height, min_gap, sobolev_norm};
pub use spectral::SpectralField;

use serde::{Deserialize, Serialize};

use crate::error::{MuskatError, Result};

/// Heights of one interface sampled on the grid, plus the level it approaches far away.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceField {
    grid: Grid2,
    values: Vec<f64>,
    far_constant: f64,
}

impl SurfaceField {
    pub fn new(grid: Grid2, values: Vec<f64>, far_constant: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(MuskatError::InvalidInput(format!(
                "expected {} heights, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            let n = grid.resolution();
            return Err(MuskatError::InvalidInput(format!(
                "non-finite height at node ({}, {})",
                idx / n,
                idx % n
            )));
        }
        if !far_constant.is_finite() {
            return Err(MuskatError::InvalidInput("non-finite far constant".into()));
        }
        Ok(SurfaceField {
            grid,
            values,
            far_constant,
        })
    }

    pub fn flat(grid: Grid2, level: f64) -> Self {
        SurfaceField {
            grid,
            values: vec![level; grid.len()],
            far_constant: level,
        }
    }

    /// Samples `h(x1, x2)` at every node.
    pub fn from_fn(grid: Grid2, far_constant: f64, h: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let n = grid.resolution();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..n {
            for j in 0..n {
                let [x1, x2] = grid.coords(i, j);
                values.push(h(x1, x2));
            }
        }
        Self::new(grid, values, far_constant)
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn far_constant(&self) -> f64 {
        self.far_constant
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Values with the far constant removed.
    pub fn deviation(&self) -> Vec<f64> {
        self.values.iter().map(|v| v - self.far_constant).collect()
    }

    /// Same field with every height (and the far constant) raised by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        SurfaceField {
            grid: self.grid,
            values: self.values.iter().map(|v| v + c).collect(),
            far_constant: self.far_constant + c,
        }
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid, values, self.far_constant)
    }

    pub fn max_abs_deviation(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0f64, |m, v| m.max((v - self.far_constant).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn spectral(&self) -> SpectralField {
        SpectralField::forward(self.grid, &self.values)
    }

    pub fn gradient(&self) -> (Vec<f64>, Vec<f64>) {
        spectral::spectral_gradient(self.grid, &self.values)
    }
}

/// The three constant densities, top to bottom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Densities(pub [f64; 3]);

impl Densities {
    pub fn new(rho1: f64, rho2: f64, rho3: f64) -> Self {
        Densities([rho1, rho2, rho3])
    }

    /// Jump across the upper interface, `rho2 - rho1`.
    pub fn upper_jump(&self) -> f64 {
        self.0[1] - self.0[0]
    }

    /// Jump across the lower interface, `rho3 - rho2`.
    pub fn lower_jump(&self) -> f64 {
        self.0[2] - self.0[1]
    }

    pub fn max_jump(&self) -> f64 {
        self.upper_jump().abs().max(self.lower_jump().abs())
    }
}

/// Upper interface `f`, lower interface `g` and the densities they separate.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPair {
    f: SurfaceField,
    g: SurfaceField,
    densities: Densities,
}

impl ContourPair {
    /// Checks that both surfaces share a grid and that `f > g` at every node.
    pub fn new(f: SurfaceField, g: SurfaceField, densities: Densities) -> Result<Self> {
        if f.grid != g.grid {
            return Err(MuskatError::InvalidInput(
                "upper and lower surfaces live on different grids".into(),
            ));
        }
        if densities.0.iter().any(|r| !r.is_finite()) {
            return Err(MuskatError::InvalidInput("non-finite density".into()));
        }
        let pair = ContourPair { f, g, densities };
        let (gap, idx) = pair.min_gap_at();
        if gap <= 0.0 {
            let n = pair.grid().resolution();
            return Err(MuskatError::ContourCollision {
                i: idx / n,
                j: idx % n,
                gap,
            });
        }
        Ok(pair)
    }

    pub fn f(&self) -> &SurfaceField {
        &self.f
    }

    pub fn g(&self) -> &SurfaceField {
        &self.g
    }

    pub fn densities(&self) -> Densities {
        self.densities
    }

    pub fn grid(&self) -> &Grid2 {
        &self.f.grid
    }

    /// Smallest vertical gap `f - g` over the grid and the flat index where it occurs.
    pub fn min_gap_at(&self) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (idx, (a, b)) in self.f.values.iter().zip(&self.g.values).enumerate() {
            let gap = a - b;
            if gap < best.0 {
                best = (gap, idx);
            }
        }
        best
    }

    /// Difference of the surface means, the gap of the flat state both relax to.
    pub fn mean_gap(&self) -> f64 {
        mean_height(&self.f) - mean_height(&self.g)
    }

    pub fn shifted(&self, c: f64) -> Self {
        ContourPair {
            f: self.f.shifted(c),
            g: self.g.shifted(c),
            densities: self.densities,
        }
    }

    pub fn with_densities(&self, densities: Densities) -> Self {
        ContourPair {
            densities,
            ..self.clone()
        }
    }

    pub fn into_surfaces(self) -> (SurfaceField, SurfaceField) {
        (self.f, self.g)
    }
}
