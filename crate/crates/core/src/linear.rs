//! Dispersion relation of the coupled system linearized about flat interfaces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MuskatError, Result};
use crate::state::SurfaceField;

/// Linear-regime limit on the physical mode amplitude, as a fraction of the gap.
pub const LINEAR_REGIME_FRACTION: f64 = 1e-2;

fn norm(k: [f64; 2]) -> f64 {
    k[0].hypot(k[1])
}

/// Self-interaction rate `-(a/2)|k|`; the mean mode is invariant.
pub fn self_symbol(k: [f64; 2], a: f64) -> f64 {
    let m = norm(k);
    if m == 0.0 {
        0.0
    } else {
        -0.5 * a * m
    }
}

/// Rate at which one interface drives the other across a gap `h`: `-(a/2)|k| exp(-h|k|)`.
pub fn cross_symbol(k: [f64; 2], a: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(MuskatError::Parameter(format!(
            "gap must be positive, got {h}"
        )));
    }
    let m = norm(k);
    Ok(-0.5 * a * m * (-h * m).exp())
}

/// Flat interfaces at heights `h_f > h_g` with the two density jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatBase {
    pub h_f: f64,
    pub h_g: f64,
    pub a12: f64,
    pub a23: f64,
}

impl FlatBase {
    pub fn new(h_f: f64, h_g: f64, a12: f64, a23: f64) -> Result<Self> {
        if !(h_f - h_g > 0.0) {
            return Err(MuskatError::Parameter(format!(
                "upper level {h_f} must lie above lower level {h_g}"
            )));
        }
        Ok(FlatBase { h_f, h_g, a12, a23 })
    }

    pub fn gap(&self) -> f64 {
        self.h_f - self.h_g
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRates {
    pub k: [f64; 2],
    /// Acts on `(f_hat, g_hat)`.
    pub matrix: [[f64; 2]; 2],
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: [Complex64; 2],
}

fn eigen2(m: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let half = 0.5 * tr;
    let disc = Complex64::new(half * half - det, 0.0).sqrt();
    let mut ev = [half - disc, half + disc];
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Eigenvector direction for a real eigenvalue, as an angle in degrees in `(-90, 90]`
/// measured from the `f` axis toward the `g` axis.
fn eigen_angle(m: [[f64; 2]; 2], lambda: f64) -> f64 {
    let v1 = [m[0][1], lambda - m[0][0]];
    let v2 = [lambda - m[1][1], m[1][0]];
    let v = if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) {
        v1
    } else {
        v2
    };
    let mut ang = v[1].atan2(v[0]).to_degrees();
    if ang <= -90.0 {
        ang += 180.0;
    } else if ang > 90.0 {
        ang -= 180.0;
    }
    ang
}

pub fn mode_rates(k: [f64; 2], base: &FlatBase) -> Result<ModeRates> {
    if norm(k) == 0.0 {
        return Err(MuskatError::Parameter(
            "the mean mode has no rate matrix".into(),
        ));
    }
    let h = base.gap();
    let matrix = [
        [self_symbol(k, base.a12), cross_symbol(k, base.a23, h)?],
        [cross_symbol(k, base.a12, h)?, self_symbol(k, base.a23)],
    ];
    Ok(ModeRates {
        k,
        matrix,
        eigenvalues: eigen2(matrix),
    })
}

impl ModeRates {
    /// Eigenvector angles matching `eigenvalues`, when both are real.
    pub fn eigen_angles(&self) -> Option<[f64; 2]> {
        if self.eigenvalues.iter().any(|l| l.im != 0.0) {
            return None;
        }
        Some(self.eigenvalues.map(|l| eigen_angle(self.matrix, l.re)))
    }
}

/// Signed Fourier coefficient of `h - C` at integer wave index `m`.
pub fn mode_coefficient(h: &SurfaceField, m: [i64; 2]) -> Complex64 {
    crate::state::spectral::direct_coefficient(*h.grid(), &h.deviation(), m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSample {
    pub t: f64,
    /// Modulus of the mode's Fourier coefficient.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub rate: f64,
    pub samples_used: usize,
    /// Set when the physical amplitude `2|c|` left the linear regime.
    pub warning: Option<String>,
}

/// Least-squares slope of `ln amplitude` against `t` over the second half of the run.
pub fn fit_growth_rate(samples: &[ModeSample], gap: f64) -> Result<GrowthFit> {
    if samples.len() < 4 {
        return Err(MuskatError::TooFewRecords {
            needed: 4,
            got: samples.len(),
        });
    }
    if samples
        .iter()
        .any(|s| !(s.amplitude > 0.0) || !s.amplitude.is_finite())
    {
        return Err(MuskatError::NoSignal(
            "mode amplitude vanished or is not finite".into(),
        ));
    }
    let t_mid = 0.5 * (samples[0].t + samples[samples.len() - 1].t);
    let tail: Vec<&ModeSample> = samples.iter().filter(|s| s.t >= t_mid).collect();
    if tail.len() < 2 {
        return Err(MuskatError::TooFewRecords {
            needed: 2,
            got: tail.len(),
        });
    }
    let n = tail.len() as f64;
    let mt = tail.iter().map(|s| s.t).sum::<f64>() / n;
    let my = tail.iter().map(|s| s.amplitude.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for s in &tail {
        let dt = s.t - mt;
        sxy += dt * (s.amplitude.ln() - my);
        sxx += dt * dt;
    }
    if sxx == 0.0 {
        return Err(MuskatError::InvalidInput("sample times do not vary".into()));
    }
    let peak = samples
        .iter()
        .map(|s| 2.0 * s.amplitude)
        .fold(0.0, f64::max);
    let warning = (peak > LINEAR_REGIME_FRACTION * gap).then(|| {
        format!(
            "mode amplitude {peak:.3e} exceeded the linear regime ({:.3e})",
            LINEAR_REGIME_FRACTION * gap
        )
    });
    Ok(GrowthFit {
        rate: sxy / sxx,
        samples_used: tail.len(),
        warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeMatrixFit {
    /// Fitted rates, ascending.
    pub rates: [f64; 2],
    /// Eigenvector angles in degrees, matching `rates`.
    pub angles_deg: [f64; 2],
}

/// Recovers the rate matrix from the propagator over time `t`.
///
/// `columns[0]` is `(f_hat, g_hat)(t)` of a run started at `(1, 0)`, `columns[1]` of one
/// started at `(0, 1)` (both normalized by the initial amplitude). The rates are
/// `ln(mu) / t` for the propagator eigenvalues `mu`, which must be real and positive.
pub fn fit_mode_matrix(columns: [[f64; 2]; 2], t: f64) -> Result<ModeMatrixFit> {
    if !(t > 0.0) {
        return Err(MuskatError::Parameter(
            "propagation time must be positive".into(),
        ));
    }
    let p = [
        [columns[0][0], columns[1][0]],
        [columns[0][1], columns[1][1]],
    ];
    let mu = eigen2(p);
    if mu.iter().any(|m| m.im != 0.0 || !(m.re > 0.0)) {
        return Err(MuskatError::NoSignal(
            "propagator eigenvalues are not real and positive".into(),
        ));
    }
    let rates = [mu[0].re.ln() / t, mu[1].re.ln() / t];
    let angles_deg = [eigen_angle(p, mu[0].re), eigen_angle(p, mu[1].re)];
    Ok(ModeMatrixFit { rates, angles_deg })
}
