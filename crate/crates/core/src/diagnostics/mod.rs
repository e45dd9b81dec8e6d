//! Runtime observables: energy, contour distance, velocity supremum and its bound bracket,
//! the squirt-volume monitor, and energy growth tables.

mod squirt;

pub use squirt::{
    circle_cell_overlap, disc_volume, squirt_monitor, SquirtProbe, SquirtReport, SquirtSample,
    SquirtVerdict,
};

use serde::{Deserialize, Serialize};

use crate::error::{MuskatError, Result};
use crate::evolution::TimeState;
use crate::quadrature::{velocity_sup, PolarQuadRule, SampleSpec};
use crate::state::norms::{grid_l2, holder_from_gradient};
use crate::state::{contour_distance_sup, mean_height, sobolev_norm, ContourPair};

/// The three summands of the energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub sobolev_f: f64,
    pub sobolev_g: f64,
    pub d_sup: f64,
    pub total: f64,
}

/// `||f - C||_{H^k} + ||g||_{H^k} + ||d(f, g)||_inf`.
pub fn energy(pair: &ContourPair, k: u32) -> Result<Energy> {
    let sobolev_f = sobolev_norm(pair.f(), k)?;
    let sobolev_g = sobolev_norm(pair.g(), k)?;
    let d_sup = contour_distance_sup(pair)?;
    Ok(Energy {
        sobolev_f,
        sobolev_g,
        d_sup,
        total: sobolev_f + sobolev_g + d_sup,
    })
}

/// Bracket of the velocity bound with unit constant:
/// `1 + 1/g + (1/g) ln(1 + H_f + H_g) + ln(1 + ||f - C||_inf + |C| + ||grad f||_2 + ||g||_inf + ||grad g||_2)`.
pub fn bound_bracket(pair: &ContourPair, gamma: f64) -> Result<f64> {
    Ok(bound_brackets(pair, &[gamma])?[0].value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub gamma: f64,
    pub value: f64,
}

/// Brackets for several exponents, sharing the gradient computations.
pub fn bound_brackets(pair: &ContourPair, gammas: &[f64]) -> Result<Vec<BracketEntry>> {
    if let Some(&g) = gammas.iter().find(|g| !(**g > 0.0 && **g < 1.0)) {
        return Err(MuskatError::Parameter(format!(
            "Hoelder exponent must lie in (0, 1), got {g}"
        )));
    }
    let grid = pair.grid();
    let (fx, fy) = pair.f().gradient();
    let (gx, gy) = pair.g().gradient();
    let grad_l2 = |a: &[f64], b: &[f64]| {
        let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| x.hypot(*y)).collect();
        grid_l2(grid, &sq)
    };
    let far = pair.f().far_constant();
    let lower = 1.0
        + pair.f().max_abs_deviation()
        + far.abs()
        + grad_l2(&fx, &fy)
        + pair.g().max_abs()
        + grad_l2(&gx, &gy);
    gammas
        .iter()
        .map(|&gamma| {
            let h = holder_from_gradient(grid, &fx, &fy, gamma)
                + holder_from_gradient(grid, &gx, &gy, gamma);
            let value = 1.0 + 1.0 / gamma + (1.0 + h).ln() / gamma + lower.ln();
            Ok(BracketEntry { gamma, value })
        })
        .collect()
}

/// What a record computes beyond the state itself.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsConfig {
    pub sobolev_order: u32,
    pub holder_exponents: Vec<f64>,
    pub samples: SampleSpec,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            sobolev_order: 4,
            holder_exponents: vec![0.5],
            samples: SampleSpec::default(),
        }
    }
}

/// One time sample; field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub t: f64,
    pub energy: f64,
    pub d_sup: f64,
    pub u_sup: f64,
    pub bound_bracket: Vec<BracketEntry>,
    pub mean_f: f64,
    pub mean_g: f64,
    pub min_gap: f64,
    pub sobolev_f: f64,
    pub sobolev_g: f64,
}

impl DiagnosticsRecord {
    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.energy,
            self.d_sup,
            self.u_sup,
            self.mean_f,
            self.mean_g,
            self.min_gap,
            self.sobolev_f,
            self.sobolev_g,
        ]
        .iter()
        .chain(self.bound_bracket.iter().map(|b| &b.value))
        .all(|v| v.is_finite())
    }
}

/// Record for a state, with `u_sup` either supplied or sampled with `rule`.
pub fn record(
    state: &TimeState,
    rule: &PolarQuadRule,
    config: &DiagnosticsConfig,
    u_sup: Option<f64>,
) -> Result<DiagnosticsRecord> {
    let pair = &state.pair;
    let e = energy(pair, config.sobolev_order)?;
    let u_sup = match u_sup {
        Some(u) => u,
        None => velocity_sup(pair, rule, &config.samples)?,
    };
    let rec = DiagnosticsRecord {
        step: state.step_count,
        t: state.t,
        energy: e.total,
        d_sup: e.d_sup,
        u_sup,
        bound_bracket: bound_brackets(pair, &config.holder_exponents)?,
        mean_f: mean_height(pair.f()),
        mean_g: mean_height(pair.g()),
        min_gap: pair.min_gap_at().0,
        sobolev_f: e.sobolev_f,
        sobolev_g: e.sobolev_g,
    };
    if !rec.is_finite() {
        let n = pair.grid().resolution();
        let (_, idx) = pair.min_gap_at();
        return Err(MuskatError::NumericalFailure {
            i: idx / n,
            j: idx % n,
            what: format!("non-finite diagnostics at t = {}", state.t),
        });
    }
    Ok(rec)
}

/// Row of the energy growth table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QtcRow {
    pub t: f64,
    pub energy: f64,
    pub de_dt: f64,
}

/// `(t, E, dE/dt)` with second-order differences on the (possibly nonuniform) record times.
pub fn qtc_witness(times: &[f64], energies: &[f64]) -> Result<Vec<QtcRow>> {
    if times.len() != energies.len() {
        return Err(MuskatError::InvalidInput(
            "time and energy series differ in length".into(),
        ));
    }
    let n = times.len();
    if n < 3 {
        return Err(MuskatError::TooFewRecords { needed: 3, got: n });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(MuskatError::InvalidInput(
            "record times must increase strictly".into(),
        ));
    }
    // Derivative at t[c] of the parabola through the three points i0, i1, i2.
    let three = |i0: usize, i1: usize, i2: usize, c: usize| {
        let (t0, t1, t2) = (times[i0], times[i1], times[i2]);
        let (e0, e1, e2) = (energies[i0], energies[i1], energies[i2]);
        let x = times[c];
        e0 * ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2))
            + e1 * ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2))
            + e2 * ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1))
    };
    Ok((0..n)
        .map(|c| {
            let de_dt = if c == 0 {
                three(0, 1, 2, 0)
            } else if c == n - 1 {
                three(n - 3, n - 2, n - 1, c)
            } else {
                three(c - 1, c, c + 1, c)
            };
            QtcRow {
                t: times[c],
                energy: energies[c],
                de_dt,
            }
        })
        .collect())
}

/// Rayleigh-Taylor classification of a density ordering, top to bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    UnstableUpper,
    UnstableLower,
    UnstableBoth,
    /// All three densities equal: nothing moves.
    Neutral,
}

pub fn stability_classifier(rho1: f64, rho2: f64, rho3: f64) -> Stability {
    match (rho1 > rho2, rho2 > rho3) {
        (true, true) => Stability::UnstableBoth,
        (true, false) => Stability::UnstableUpper,
        (false, true) => Stability::UnstableLower,
        (false, false) if rho1 == rho2 && rho2 == rho3 => Stability::Neutral,
        (false, false) => Stability::Stable,
    }
}
