//! Volume of fluid between the interfaces inside a shrinking-then-growing cylinder.
//!
//! With `R(t) = a/2 - int_t^T u_sup`, the cylinder wall moves outward at least as fast as
//! any fluid particle, so the enclosed volume can only grow.

use serde::{Deserialize, Serialize};

use crate::error::{MuskatError, Result};
use crate::state::ContourPair;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquirtProbe {
    pub center: [f64; 2],
    pub aperture: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquirtVerdict {
    Pass,
    Fail,
    ProbeInactive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquirtSample {
    pub t: f64,
    pub radius: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquirtReport {
    pub verdict: SquirtVerdict,
    pub t0: Option<f64>,
    /// Most negative per-step volume change, relative to the volume at `t0`.
    pub worst_relative_drop: f64,
    pub series: Vec<SquirtSample>,
}

/// Antiderivative of `sqrt(r^2 - x^2)` on `[-r, r]`.
fn chord_primitive(x: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    let s = (r * r - x * x).max(0.0).sqrt();
    0.5 * (x * s + r * r * (x / r).asin())
}

/// Exact area of `[x0, x1] x [y0, y1]` intersected with the disc of radius `r` at the origin.
pub fn circle_cell_overlap(x0: f64, x1: f64, y0: f64, y1: f64, r: f64) -> f64 {
    let a = x0.max(-r);
    let b = x1.min(r);
    if a >= b || y0 >= r || y1 <= -r {
        return 0.0;
    }
    let mut cuts = vec![a, b];
    for y in [y0, y1] {
        if y.abs() < r {
            let c = (r * r - y * y).sqrt();
            cuts.extend([-c, c]);
        }
    }
    cuts.retain(|c| *c >= a && *c <= b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let half = |x: f64| (r * r - x * x).max(0.0).sqrt();
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (p, q) = (w[0], w[1]);
        if q <= p {
            continue;
        }
        let s = half(0.5 * (p + q));
        let top_is_arc = s < y1;
        let bottom_is_arc = -s > y0;
        let top = if top_is_arc { s } else { y1 };
        let bottom = if bottom_is_arc { -s } else { y0 };
        if top <= bottom {
            continue;
        }
        let arc = chord_primitive(q, r) - chord_primitive(p, r);
        let top_int = if top_is_arc { arc } else { y1 * (q - p) };
        let bottom_int = if bottom_is_arc { -arc } else { y0 * (q - p) };
        area += top_int - bottom_int;
    }
    area
}

/// `int_{disc(center, radius)} (f - g) dx`, each node owning the cell centred on it,
/// weighted by its exact overlap with the disc.
pub fn disc_volume(pair: &ContourPair, center: [f64; 2], radius: f64) -> f64 {
    if radius <= 0.0 {
        return 0.0;
    }
    let grid = pair.grid();
    let dx = grid.spacing();
    let n = grid.resolution() as i64;
    let f = pair.f().values();
    let g = pair.g().values();
    let lo = |c: f64| ((c - radius) / dx).floor() as i64 - 1;
    let hi = |c: f64| ((c + radius) / dx).ceil() as i64 + 1;
    let mut vol = 0.0;
    for i in lo(center[0])..=hi(center[0]) {
        let x0 = (i as f64 - 0.5) * dx - center[0];
        for j in lo(center[1])..=hi(center[1]) {
            let y0 = (j as f64 - 0.5) * dx - center[1];
            let w = circle_cell_overlap(x0, x0 + dx, y0, y0 + dx, radius);
            if w > 0.0 {
                let idx = (i.rem_euclid(n) * n + j.rem_euclid(n)) as usize;
                vol += w * (f[idx] - g[idx]);
            }
        }
    }
    vol
}

/// Post-processes a finished run: `times[k]`, `u_sup[k]` and `pairs[k]` describe record `k`.
pub fn squirt_monitor(
    probe: &SquirtProbe,
    times: &[f64],
    u_sup: &[f64],
    pairs: &[&ContourPair],
) -> Result<SquirtReport> {
    if times.len() != u_sup.len() || times.len() != pairs.len() {
        return Err(MuskatError::InvalidInput(
            "squirt series differ in length".into(),
        ));
    }
    if times.is_empty() {
        return Err(MuskatError::TooFewRecords { needed: 1, got: 0 });
    }
    let side = pairs[0].grid().side_length();
    if !(probe.aperture > 0.0 && probe.aperture < side) {
        return Err(MuskatError::Parameter(format!(
            "probe aperture must lie in (0, {side}), got {}",
            probe.aperture
        )));
    }
    // R(t_k) = a/2 - trapezoid integral of u_sup from t_k to the last record.
    let m = times.len();
    let mut radius = vec![0.0; m];
    let mut tail = 0.0;
    radius[m - 1] = 0.5 * probe.aperture;
    for k in (0..m - 1).rev() {
        tail += 0.5 * (u_sup[k] + u_sup[k + 1]) * (times[k + 1] - times[k]);
        radius[k] = 0.5 * probe.aperture - tail;
    }
    // R(T) = a/2 always qualifies, so a window made of the last record alone carries no
    // information and counts as inactive.
    let start = radius
        .iter()
        .position(|r| *r > 0.0 && *r < probe.aperture)
        .filter(|&s| s + 1 < m);
    let Some(start) = start else {
        return Ok(SquirtReport {
            verdict: SquirtVerdict::ProbeInactive,
            t0: None,
            worst_relative_drop: 0.0,
            series: Vec::new(),
        });
    };
    let series: Vec<SquirtSample> = (start..m)
        .map(|k| SquirtSample {
            t: times[k],
            radius: radius[k],
            volume: disc_volume(pairs[k], probe.center, radius[k]),
        })
        .collect();
    let v0 = series[0].volume;
    let scale = v0.abs().max(f64::MIN_POSITIVE);
    let worst = series
        .windows(2)
        .map(|w| (w[1].volume - w[0].volume) / scale)
        .fold(0.0f64, f64::min);
    let verdict = if worst >= -1e-6 {
        SquirtVerdict::Pass
    } else {
        SquirtVerdict::Fail
    };
    Ok(SquirtReport {
        verdict,
        t0: Some(series[0].t),
        worst_relative_drop: worst,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Densities, Grid2, SurfaceField};
    use std::f64::consts::PI;

    #[test]
    fn overlap_limits() {
        assert!((circle_cell_overlap(-2.0, 2.0, -2.0, 2.0, 1.0) - PI).abs() < 1e-14);
        assert!((circle_cell_overlap(0.0, 2.0, 0.0, 2.0, 1.0) - PI / 4.0).abs() < 1e-14);
        assert!((circle_cell_overlap(-0.1, 0.1, -0.1, 0.1, 1.0) - 0.04).abs() < 1e-16);
        assert_eq!(circle_cell_overlap(1.0, 2.0, 0.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn overlaps_tile_the_disc() {
        let r = 0.77;
        let h = 0.1;
        let mut total = 0.0;
        for i in -10..10 {
            for j in -10..10 {
                let x0 = i as f64 * h + 0.013;
                let y0 = j as f64 * h - 0.031;
                total += circle_cell_overlap(x0, x0 + h, y0, y0 + h, r);
            }
        }
        assert!((total - PI * r * r).abs() < 1e-12);
    }

    #[test]
    fn static_flat_pair_is_trivially_monotone() {
        let grid = Grid2::new(2.0 * PI, 32).unwrap();
        let pair = ContourPair::new(
            SurfaceField::flat(grid, 1.5),
            SurfaceField::flat(grid, 0.0),
            Densities::new(1.0, 2.0, 3.0),
        )
        .unwrap();
        let probe = SquirtProbe {
            center: [1.0, 2.0],
            aperture: 1.2,
        };
        let pairs = vec![&pair; 4];
        let rep = squirt_monitor(&probe, &[0.0, 0.1, 0.2, 0.3], &[0.0; 4], &pairs).unwrap();
        assert_eq!(rep.verdict, SquirtVerdict::Pass);
        for s in &rep.series {
            assert_eq!(s.radius, 0.6);
            assert!((s.volume - PI * 0.36 * 1.5).abs() < 1e-12);
        }
        let too_big = SquirtProbe {
            center: [0.0, 0.0],
            aperture: 7.0,
        };
        assert!(matches!(
            squirt_monitor(&too_big, &[0.0], &[0.0], &[&pair]),
            Err(MuskatError::Parameter(_))
        ));
    }
}
