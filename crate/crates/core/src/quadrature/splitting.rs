//! Near/far decomposition of the kernel acting on the indicator of the region above the
//! upper interface, `{f(x) < x3 < M}`.

use std::f64::consts::PI;

use super::gauss::{gauss_legendre, gauss_legendre_on};
use super::interface::{bilinear, pack};
use super::kernel::Kernel3;
use crate::error::{MuskatError, Result};
use crate::state::{holder_norm_grad, ContourPair};

/// Discretization of the ball integral in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRule {
    /// Gauss nodes in `cos(theta)`; azimuths are twice as many.
    pub polar: usize,
    /// Gauss nodes per logarithmic radial panel.
    pub radial_order: usize,
    /// Logarithmic panels per factor of ten in radius.
    pub panels_per_decade: usize,
    /// Innermost radius as a fraction of the splitting radius.
    pub inner_fraction: f64,
    /// Outer truncation; defaults to half the box side.
    pub far_radius: Option<f64>,
}

impl Default for SplitRule {
    fn default() -> Self {
        SplitRule {
            polar: 48,
            radial_order: 6,
            panels_per_decade: 4,
            inner_fraction: 1e-4,
            far_radius: None,
        }
    }
}

/// Pieces of one coordinate of the kernel applied to the indicator, split at `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitEval {
    pub delta: f64,
    pub near: f64,
    pub far: f64,
    /// Accumulated over all nodes in a single pass, independently of the split.
    pub total: f64,
    /// Constant bounding the near piece: `(3 pi / 2)(1 + 2^gamma (1 + 1/gamma))`.
    pub near_bound: f64,
}

pub fn near_constant(gamma: f64) -> f64 {
    1.5 * PI * (1.0 + 2f64.powf(gamma) * (1.0 + 1.0 / gamma))
}

/// Splitting radius `1 / (3 (1 + H_f + H_g)^{1/gamma})` from the gradient Hoelder norms.
pub fn splitting_radius(pair: &ContourPair, gamma: f64) -> Result<f64> {
    let hf = holder_norm_grad(pair.f(), gamma)?;
    let hg = holder_norm_grad(pair.g(), gamma)?;
    Ok(1.0 / (3.0 * (1.0 + hf + hg).powf(1.0 / gamma)))
}

/// Cap `M` of the region: `||f - C||_inf + |C| + ||g||_inf + 1`.
pub fn region_cap(pair: &ContourPair) -> f64 {
    pair.f().max_abs_deviation() + pair.f().far_constant().abs() + pair.g().max_abs() + 1.0
}

fn log_panels(a: f64, b: f64, per_decade: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (la, lb) = (a.ln(), b.ln());
    let count = (((lb - la) / std::f64::consts::LN_10) * per_decade as f64)
        .ceil()
        .max(1.0) as usize;
    let h = (lb - la) / count as f64;
    let mut r = Vec::new();
    let mut w = Vec::new();
    for p in 0..count {
        let (s, sw) = gauss_legendre_on(order, la + p as f64 * h, la + (p + 1) as f64 * h);
        for (x, v) in s.into_iter().zip(sw) {
            r.push(x.exp());
            // dr / r = d(ln r)
            w.push(v);
        }
    }
    (r, w)
}

/// Evaluates coordinate `component` (1, 2 or 3) of `(1/4 pi) PV int K(z) chi(x + z) dz`
/// over the region above the upper interface, split at the splitting radius.
pub fn bound_splitting_eval(
    pair: &ContourPair,
    point: [f64; 3],
    gamma: f64,
    component: usize,
    rule: &SplitRule,
) -> Result<SplitEval> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(MuskatError::Parameter(format!(
            "Hoelder exponent must lie in (0, 1), got {gamma}"
        )));
    }
    if !(1..=3).contains(&component) {
        return Err(MuskatError::Parameter(format!(
            "component must be 1, 2 or 3, got {component}"
        )));
    }
    let grid = *pair.grid();
    let delta = splitting_radius(pair, gamma)?;
    if delta <= grid.spacing() {
        return Err(MuskatError::ResolutionInsufficient {
            delta,
            spacing: grid.spacing(),
        });
    }
    let far = rule.far_radius.unwrap_or(0.5 * grid.side_length());
    if far <= delta {
        return Err(MuskatError::Parameter(
            "far radius must exceed the splitting radius".into(),
        ));
    }
    let cap = region_cap(pair);
    let fd = pack(pair.f());
    let n = grid.resolution();
    let dx = grid.spacing();
    let height = |x: f64, y: f64| {
        let s1 = x / dx;
        let s2 = y / dx;
        let (f1, f2) = (s1.floor(), s2.floor());
        let node = super::rule::StencilNode {
            y1: 0.0,
            y2: 0.0,
            r2: 0.0,
            w: 0.0,
            di: 0,
            dj: 0,
            t1: s1 - f1,
            t2: s2 - f2,
        };
        let i = (f1 as i64).rem_euclid(n as i64) as usize;
        let j = (f2 as i64).rem_euclid(n as i64) as usize;
        bilinear(&fd, n, i, j, &node)[0]
    };

    let kernel = Kernel3;
    let (mu, mw) = gauss_legendre(rule.polar);
    let az = 2 * rule.polar;
    let dphi = 2.0 * PI / az as f64;
    let mut dirs = Vec::with_capacity(rule.polar * az);
    for (&c, &w) in mu.iter().zip(&mw) {
        let s = (1.0 - c * c).sqrt();
        for l in 0..az {
            let (sp, cp) = (dphi * (l as f64 + 0.5)).sin_cos();
            let z = [s * cp, s * sp, c];
            dirs.push((z, w * dphi * kernel.on_sphere(z)[component - 1]));
        }
    }

    let (mut rs, mut ws) = log_panels(
        delta * rule.inner_fraction,
        delta,
        rule.panels_per_decade,
        rule.radial_order,
    );
    let split = rs.len();
    let (r2, w2) = log_panels(delta, far, rule.panels_per_decade, rule.radial_order);
    rs.extend(r2);
    ws.extend(w2);

    let (mut near, mut farp, mut total) = (0.0, 0.0, 0.0);
    for (k, (&r, &wr)) in rs.iter().zip(&ws).enumerate() {
        let mut ring = 0.0;
        for (z, wk) in &dirs {
            let p3 = point[2] + r * z[2];
            if p3 >= cap {
                continue;
            }
            if p3 > height(point[0] + r * z[0], point[1] + r * z[1]) {
                ring += wk;
            }
        }
        let v = wr * ring / (4.0 * PI);
        total += v;
        if k < split {
            near += v;
        } else {
            farp += v;
        }
    }
    Ok(SplitEval {
        delta,
        near,
        far: farp,
        total,
        near_bound: near_constant(gamma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Densities, Grid2, SurfaceField};

    #[test]
    fn near_constant_at_half() {
        let c = near_constant(0.5);
        assert!((c - 1.5 * PI * (1.0 + 2f64.sqrt() * 3.0)).abs() < 1e-12);
    }

    #[test]
    fn point_above_the_region_has_empty_near_part() {
        let grid = Grid2::new(2.0 * PI, 64).unwrap();
        let pair = ContourPair::new(
            SurfaceField::flat(grid, 1.0),
            SurfaceField::flat(grid, 0.0),
            Densities::new(1.0, 2.0, 3.0),
        )
        .unwrap();
        let cap = region_cap(&pair);
        let s = bound_splitting_eval(&pair, [0.1, 0.2, cap + 0.5], 0.5, 3, &SplitRule::default())
            .unwrap();
        assert_eq!(s.near, 0.0);
        assert!((s.near + s.far - s.total).abs() <= 1e-12 * s.total.abs().max(1e-300));
    }

    #[test]
    fn rough_data_on_coarse_grid_is_rejected() {
        let grid = Grid2::new(2.0 * PI, 16).unwrap();
        let pair = ContourPair::new(
            SurfaceField::from_fn(grid, 1.0, |x, _| 1.0 + 0.5 * (3.0 * x).cos()).unwrap(),
            SurfaceField::flat(grid, -1.0),
            Densities::new(1.0, 2.0, 3.0),
        )
        .unwrap();
        assert!(matches!(
            bound_splitting_eval(&pair, [0.0, 0.0, 1.0], 0.5, 1, &SplitRule::default()),
            Err(MuskatError::ResolutionInsufficient { .. })
        ));
    }
}
