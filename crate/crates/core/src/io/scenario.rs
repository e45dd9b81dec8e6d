//! Scenario files: one JSON document that fixes every input of a run.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsConfig, SquirtProbe};
use crate::error::{MuskatError, Result};
use crate::evolution::StepControl;
use crate::quadrature::{InterfaceOperator, PolarQuadRule, RuleParams, SampleSpec};
use crate::state::{ContourPair, Densities, Grid2, SurfaceField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub side_length: f64,
    pub resolution: usize,
}

/// `amplitude * cos(2 pi k.x / L + phase)` with an integer wave vector `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: [i64; 2],
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Every integer wave vector with `k_min <= |k| <= k_max` gets a uniform random amplitude
/// in `[-amplitude, amplitude]` and a uniform random phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomBand {
    pub k_min: f64,
    pub k_max: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub far_constant: f64,
    #[serde(default)]
    pub modes: Vec<ModeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_band: Option<RandomBand>,
}

fn default_angular() -> usize {
    32
}
fn default_grading() -> f64 {
    0.85
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_angular")]
    pub angular_nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial_count: Option<usize>,
    #[serde(default = "default_grading")]
    pub grading: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub far_radius: Option<f64>,
    /// Restore the linearized contribution of the truncated far field.
    #[serde(default = "default_true")]
    pub far_field_correction: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            angular_nodes: default_angular(),
            radial_count: None,
            grading: default_grading(),
            far_radius: None,
            far_field_correction: true,
        }
    }
}

fn default_cfl() -> f64 {
    0.5
}
fn default_cadence() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteppingSpec {
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    pub t_end: f64,
    #[serde(default = "default_cadence")]
    pub record_every: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_cap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub center: [f64; 2],
    pub aperture: f64,
}

fn default_sobolev() -> u32 {
    4
}
fn default_gammas() -> Vec<f64> {
    vec![0.5]
}
fn default_planes() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSpec {
    #[serde(default = "default_sobolev")]
    pub sobolev_order: u32,
    #[serde(default = "default_gammas")]
    pub holder_exponents: Vec<f64>,
    #[serde(default = "default_planes")]
    pub sample_planes: usize,
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
    #[serde(default)]
    pub squirt_probes: Vec<ProbeSpec>,
}

fn default_stride() -> usize {
    1
}

impl Default for DiagnosticsSpec {
    fn default() -> Self {
        DiagnosticsSpec {
            sobolev_order: default_sobolev(),
            holder_exponents: default_gammas(),
            sample_planes: default_planes(),
            sample_stride: 1,
            squirt_probes: Vec::new(),
        }
    }
}

/// A complete, validated run description. The upper surface's far constant is `C_inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// `[rho1, rho2, rho3]`, top to bottom.
    pub densities: [f64; 3],
    pub grid: GridSpec,
    pub upper: SurfaceSpec,
    pub lower: SurfaceSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub stepping: SteppingSpec,
    #[serde(default)]
    pub diagnostics: DiagnosticsSpec,
    #[serde(default)]
    pub seed: u64,
}

fn finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(MuskatError::validation(
            path,
            format!("must be finite, got {v}"),
        ))
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(MuskatError::validation(
            path,
            format!("must be positive, got {v}"),
        ))
    }
}

fn validate_surface(path: &str, s: &SurfaceSpec) -> Result<()> {
    finite(&format!("{path}.far_constant"), s.far_constant)?;
    for (i, m) in s.modes.iter().enumerate() {
        finite(&format!("{path}.modes[{i}].amplitude"), m.amplitude)?;
        finite(&format!("{path}.modes[{i}].phase"), m.phase)?;
    }
    if let Some(b) = &s.random_band {
        let p = format!("{path}.random_band");
        finite(&format!("{p}.amplitude"), b.amplitude)?;
        if !(b.k_min >= 0.0 && b.k_max >= b.k_min && b.k_max.is_finite()) {
            return Err(MuskatError::validation(p, "need 0 <= k_min <= k_max"));
        }
    }
    Ok(())
}

impl Scenario {
    /// Checks every invariant except the gap, which needs the built surfaces.
    fn validate_fields(&self) -> Result<()> {
        for (i, r) in self.densities.iter().enumerate() {
            finite(&format!("densities[{i}]"), *r)?;
        }
        positive("grid.side_length", self.grid.side_length)?;
        Grid2::new(self.grid.side_length, self.grid.resolution)
            .map_err(|e| MuskatError::validation("grid.resolution", e.to_string()))?;
        validate_surface("upper", &self.upper)?;
        validate_surface("lower", &self.lower)?;

        let q = &self.quadrature;
        if q.angular_nodes < 2 || !q.angular_nodes.is_multiple_of(2) {
            return Err(MuskatError::validation(
                "quadrature.angular_nodes",
                format!("must be a positive even count, got {}", q.angular_nodes),
            ));
        }
        if q.radial_count == Some(0) {
            return Err(MuskatError::validation(
                "quadrature.radial_count",
                "must be positive",
            ));
        }
        if !(q.grading > 0.0 && q.grading <= 1.0) {
            return Err(MuskatError::validation(
                "quadrature.grading",
                "must lie in (0, 1]",
            ));
        }
        if let Some(r) = q.far_radius {
            positive("quadrature.far_radius", r)?;
            if r > 0.5 * self.grid.side_length {
                return Err(MuskatError::validation(
                    "quadrature.far_radius",
                    "must not exceed half the box side",
                ));
            }
        }

        let s = &self.stepping;
        if !(s.cfl > 0.0 && s.cfl <= 1.0) {
            return Err(MuskatError::validation(
                "stepping.cfl",
                format!("must lie in (0, 1], got {}", s.cfl),
            ));
        }
        if let Some(d) = s.dt_max {
            positive("stepping.dt_max", d)?;
        }
        if !(s.t_end >= 0.0 && s.t_end.is_finite()) {
            return Err(MuskatError::validation(
                "stepping.t_end",
                "must be finite and nonnegative",
            ));
        }
        if s.record_every == 0 {
            return Err(MuskatError::validation(
                "stepping.record_every",
                "must be positive",
            ));
        }
        if let Some(c) = s.amplitude_cap {
            positive("stepping.amplitude_cap", c)?;
        }

        let d = &self.diagnostics;
        if d.sobolev_order > 8 {
            return Err(MuskatError::validation(
                "diagnostics.sobolev_order",
                "must be at most 8",
            ));
        }
        if d.holder_exponents.is_empty() {
            return Err(MuskatError::validation(
                "diagnostics.holder_exponents",
                "must not be empty",
            ));
        }
        for (i, g) in d.holder_exponents.iter().enumerate() {
            if !(*g > 0.0 && *g < 1.0) {
                return Err(MuskatError::validation(
                    format!("diagnostics.holder_exponents[{i}]"),
                    format!("must lie in (0, 1), got {g}"),
                ));
            }
        }
        if d.sample_stride == 0 {
            return Err(MuskatError::validation(
                "diagnostics.sample_stride",
                "must be positive",
            ));
        }
        for (i, p) in d.squirt_probes.iter().enumerate() {
            finite(
                &format!("diagnostics.squirt_probes[{i}].center[0]"),
                p.center[0],
            )?;
            finite(
                &format!("diagnostics.squirt_probes[{i}].center[1]"),
                p.center[1],
            )?;
            if !(p.aperture > 0.0 && p.aperture < self.grid.side_length) {
                return Err(MuskatError::validation(
                    format!("diagnostics.squirt_probes[{i}].aperture"),
                    format!(
                        "must lie in (0, {}), got {}",
                        self.grid.side_length, p.aperture
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Full validation, including a positive initial gap at every node.
    pub fn validate(&self) -> Result<()> {
        self.build_pair().map(|_| ())
    }

    pub fn grid(&self) -> Result<Grid2> {
        Grid2::new(self.grid.side_length, self.grid.resolution)
            .map_err(|e| MuskatError::validation("grid.resolution", e.to_string()))
    }

    pub fn densities(&self) -> Densities {
        Densities(self.densities)
    }

    fn surface(&self, grid: Grid2, spec: &SurfaceSpec, stream: u64) -> Result<SurfaceField> {
        let unit = 2.0 * PI / grid.side_length();
        let mut terms: Vec<([f64; 2], f64, f64)> = spec
            .modes
            .iter()
            .map(|m| {
                (
                    [m.k[0] as f64 * unit, m.k[1] as f64 * unit],
                    m.amplitude,
                    m.phase,
                )
            })
            .collect();
        if let Some(band) = &spec.random_band {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(stream);
            let top = band.k_max.floor() as i64;
            for a in 0..=top {
                for b in -top..=top {
                    if a == 0 && b <= 0 {
                        continue;
                    }
                    let r = ((a * a + b * b) as f64).sqrt();
                    if r < band.k_min || r > band.k_max {
                        continue;
                    }
                    let amp = band.amplitude * rng.random_range(-1.0..=1.0);
                    let phase = rng.random_range(0.0..2.0 * PI);
                    terms.push(([a as f64 * unit, b as f64 * unit], amp, phase));
                }
            }
        }
        let c = spec.far_constant;
        SurfaceField::from_fn(grid, c, |x1, x2| {
            c + terms
                .iter()
                .map(|(k, a, p)| a * (k[0] * x1 + k[1] * x2 + p).cos())
                .sum::<f64>()
        })
    }

    /// The initial pair; a nonpositive gap is reported at the node where it is smallest.
    pub fn build_pair(&self) -> Result<ContourPair> {
        self.validate_fields()?;
        let grid = self.grid()?;
        let f = self.surface(grid, &self.upper, 0)?;
        let g = self.surface(grid, &self.lower, 1)?;
        let n = grid.resolution();
        let (idx, gap) = f
            .values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| a - b)
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, d)| if d < best.1 { (i, d) } else { best },
            );
        if !(gap > 0.0) {
            let (i, j) = (idx / n, idx % n);
            let x = grid.coords(i, j);
            return Err(MuskatError::validation(
                "lower",
                format!(
                    "initial gap f - g = {gap} is not positive; smallest at node ({i}, {j}), x = ({}, {})",
                    x[0], x[1]
                ),
            ));
        }
        ContourPair::new(f, g, self.densities())
    }

    pub fn rule_params(&self) -> RuleParams {
        RuleParams {
            angular_nodes: self.quadrature.angular_nodes,
            radial_count: self.quadrature.radial_count,
            grading: self.quadrature.grading,
            inner_radius: None,
            far_radius: self.quadrature.far_radius,
        }
    }

    pub fn rule(&self) -> Result<PolarQuadRule> {
        PolarQuadRule::new(&self.grid()?, &self.rule_params())
    }

    /// Operator for this scenario; the far-field cross tail is linearized about the gap of `pair`.
    pub fn operator(&self, pair: &ContourPair) -> Result<InterfaceOperator> {
        let op = InterfaceOperator::new(self.grid()?, self.rule()?)
            .with_grading(self.quadrature.grading);
        Ok(if self.quadrature.far_field_correction {
            op.with_far_field_correction(Some(pair.mean_gap()))
        } else {
            op
        })
    }

    pub fn control(&self) -> Result<StepControl> {
        let grid = self.grid()?;
        let mut c = StepControl::for_grid(&grid, self.stepping.t_end);
        c.cfl = self.stepping.cfl;
        c.dt_max = self.stepping.dt_max.unwrap_or(f64::INFINITY);
        // Unstable orderings grow without bound; by default stop at a tenth of the gap.
        let [r1, r2, r3] = self.densities;
        let unstable = r1 > r2 || r2 > r3;
        let gap = self.upper.far_constant - self.lower.far_constant;
        c.amplitude_cap = self
            .stepping
            .amplitude_cap
            .or((unstable && gap > 0.0).then_some(0.1 * gap));
        Ok(c)
    }

    pub fn diagnostics_config(&self) -> DiagnosticsConfig {
        DiagnosticsConfig {
            sobolev_order: self.diagnostics.sobolev_order,
            holder_exponents: self.diagnostics.holder_exponents.clone(),
            samples: SampleSpec {
                interfaces: true,
                planes: self.diagnostics.sample_planes,
                stride: self.diagnostics.sample_stride,
            },
        }
    }

    pub fn probes(&self) -> Vec<SquirtProbe> {
        self.diagnostics
            .squirt_probes
            .iter()
            .map(|p| SquirtProbe {
                center: p.center,
                aperture: p.aperture,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Parses and fully validates a scenario document.
pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        MuskatError::validation(
            if path == "." {
                "<root>".to_string()
            } else {
                path
            },
            e.into_inner().to_string(),
        )
    })?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario_str(&text)
}
