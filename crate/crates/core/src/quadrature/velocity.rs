//! Darcy velocity induced by the two density jumps, anywhere in the fluid.

use std::f64::consts::PI;

use super::interface::{bilinear, pack};
use super::rule::{GridStencil, PolarQuadRule, StencilNode};
use crate::error::{MuskatError, Result};
use crate::state::{ContourPair, Grid2};

/// Which interface a limit evaluation sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    Upper,
    Lower,
}

/// Sample set for [`velocity_sup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    /// Include the interface limits on both surfaces.
    pub interfaces: bool,
    /// Horizontal planes evenly spaced between the mean levels of the surfaces.
    pub planes: usize,
    /// Only every `stride`-th node along each axis is sampled.
    pub stride: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            interfaces: true,
            planes: 3,
            stride: 1,
        }
    }
}

/// Evaluates the velocity of one pair at many points, reusing the packed surface data.
pub struct VelocityEvaluator<'a> {
    pair: &'a ContourPair,
    rule: &'a PolarQuadRule,
    stencil: GridStencil,
    nodes: Vec<(f64, f64, f64)>,
    fd: Vec<[f64; 3]>,
    gd: Vec<[f64; 3]>,
    grading: f64,
}

fn node_at(grid: &Grid2, x: [f64; 2], y1: f64, y2: f64, w: f64) -> (usize, usize, StencilNode) {
    let dx = grid.spacing();
    let s1 = (x[0] - y1) / dx;
    let s2 = (x[1] - y2) / dx;
    let f1 = s1.floor();
    let f2 = s2.floor();
    let n = grid.resolution() as i64;
    let node = StencilNode {
        y1,
        y2,
        r2: y1 * y1 + y2 * y2,
        w,
        di: 0,
        dj: 0,
        t1: s1 - f1,
        t2: s2 - f2,
    };
    (
        (f1 as i64).rem_euclid(n) as usize,
        (f2 as i64).rem_euclid(n) as usize,
        node,
    )
}

#[inline(always)]
fn accumulate(acc: &mut [f64; 3], x3: f64, s: &[f64; 3], node: &StencilNode) {
    let dz = x3 - s[0];
    let d = node.r2 + dz * dz;
    let c = node.w / (d * d.sqrt());
    acc[0] += c * node.y1;
    acc[1] += c * node.y2;
    acc[2] += c * (s[1] * node.y1 + s[2] * node.y2);
}

impl<'a> VelocityEvaluator<'a> {
    pub fn new(pair: &'a ContourPair, rule: &'a PolarQuadRule) -> Self {
        VelocityEvaluator {
            pair,
            rule,
            stencil: GridStencil::new(pair.grid(), rule),
            nodes: rule.nodes(),
            fd: pack(pair.f()),
            gd: pack(pair.g()),
            grading: 0.85,
        }
    }

    fn height(&self, data: &[[f64; 3]], x: [f64; 2]) -> f64 {
        let grid = self.pair.grid();
        let (i, j, node) = node_at(grid, x, 0.0, 0.0, 0.0);
        bilinear(data, grid.resolution(), i, j, &node)[0]
    }

    fn integral(
        &self,
        data: &[[f64; 3]],
        x: [f64; 2],
        x3: f64,
        on_node: Option<(usize, usize)>,
    ) -> [f64; 3] {
        let grid = self.pair.grid();
        let n = grid.resolution();
        let dist = (x3 - self.height(data, x)).abs();
        let mut acc = [0.0; 3];
        let refine =
            dist > 0.0 && dist < 4.0 * grid.spacing() && dist / 4.0 < self.rule.inner_radius();
        if refine {
            let fine = self.rule.with_inner_scale(dist / 4.0, self.grading);
            for (y1, y2, w) in fine.nodes() {
                let (i, j, node) = node_at(grid, x, y1, y2, w);
                accumulate(&mut acc, x3, &bilinear(data, n, i, j, &node), &node);
            }
        } else if let Some((i, j)) = on_node {
            for node in &self.stencil.nodes {
                accumulate(&mut acc, x3, &bilinear(data, n, i, j, node), node);
            }
        } else {
            for &(y1, y2, w) in &self.nodes {
                let (i, j, node) = node_at(grid, x, y1, y2, w);
                accumulate(&mut acc, x3, &bilinear(data, n, i, j, &node), &node);
            }
        }
        acc
    }

    fn combine(&self, x: [f64; 2], x3: f64, on_node: Option<(usize, usize)>) -> Result<[f64; 3]> {
        let dens = self.pair.densities();
        let a12 = -dens.upper_jump() / (4.0 * PI);
        let a23 = -dens.lower_jump() / (4.0 * PI);
        let mut u = [0.0; 3];
        if a12 != 0.0 {
            let s = self.integral(&self.fd, x, x3, on_node);
            for k in 0..3 {
                u[k] += a12 * s[k];
            }
        }
        if a23 != 0.0 {
            let s = self.integral(&self.gd, x, x3, on_node);
            for k in 0..3 {
                u[k] += a23 * s[k];
            }
        }
        if u.iter().any(|v| !v.is_finite()) {
            let grid = self.pair.grid();
            let dx = grid.spacing();
            return Err(MuskatError::NumericalFailure {
                i: (x[0] / dx).round() as usize % grid.resolution(),
                j: (x[1] / dx).round() as usize % grid.resolution(),
                what: "non-finite fluid velocity".into(),
            });
        }
        Ok(u)
    }

    /// Velocity at `(x, x3)`. With `limit` set, `x3` is ignored and the interface limit
    /// on that surface is returned (normal-relevant part, tangential terms omitted).
    pub fn at(&self, x: [f64; 2], x3: f64, limit: Option<Surface>) -> Result<[f64; 3]> {
        let x3 = match limit {
            Some(Surface::Upper) => self.height(&self.fd, x),
            Some(Surface::Lower) => self.height(&self.gd, x),
            None => {
                if x3 == self.height(&self.fd, x) || x3 == self.height(&self.gd, x) {
                    return Err(MuskatError::AmbiguousEvaluation);
                }
                x3
            }
        };
        self.combine(x, x3, None)
    }

    /// Velocity at grid node `(i, j)`, using the precomputed stencil where possible.
    pub fn at_node(&self, i: usize, j: usize, x3: f64, limit: Option<Surface>) -> Result<[f64; 3]> {
        let grid = self.pair.grid();
        let idx = grid.index(i, j);
        let x = grid.coords(i, j);
        let x3 = match limit {
            Some(Surface::Upper) => self.fd[idx][0],
            Some(Surface::Lower) => self.gd[idx][0],
            None => {
                if x3 == self.fd[idx][0] || x3 == self.gd[idx][0] {
                    return Err(MuskatError::AmbiguousEvaluation);
                }
                x3
            }
        };
        self.combine(x, x3, Some((i, j)))
    }
}

/// Fluid velocity at a single 3D point; see [`VelocityEvaluator::at`].
pub fn fluid_velocity(
    pair: &ContourPair,
    point: [f64; 3],
    rule: &PolarQuadRule,
    limit: Option<Surface>,
) -> Result<[f64; 3]> {
    VelocityEvaluator::new(pair, rule).at([point[0], point[1]], point[2], limit)
}

fn norm3(u: &[f64; 3]) -> f64 {
    (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt()
}

/// Largest sampled velocity magnitude: a lower estimate of `||u||_inf`.
pub fn velocity_sup(pair: &ContourPair, rule: &PolarQuadRule, spec: &SampleSpec) -> Result<f64> {
    if (!spec.interfaces && spec.planes == 0) || spec.stride == 0 {
        return Err(MuskatError::Parameter(
            "velocity sample set is empty".into(),
        ));
    }
    let grid = pair.grid();
    let n = grid.resolution();
    let eval = VelocityEvaluator::new(pair, rule);

    let invariant_x2 = [pair.f().values(), pair.g().values()]
        .iter()
        .all(|v| (0..n).all(|i| v[i * n..(i + 1) * n].iter().all(|&x| x == v[i * n])));
    let js: Vec<usize> = if invariant_x2 {
        vec![0]
    } else {
        (0..n).step_by(spec.stride).collect()
    };

    let mean_f = crate::state::mean_height(pair.f());
    let mean_g = crate::state::mean_height(pair.g());
    let levels: Vec<f64> = (1..=spec.planes)
        .map(|p| mean_g + (mean_f - mean_g) * p as f64 / (spec.planes + 1) as f64)
        .collect();

    let mut best = 0.0f64;
    for i in (0..n).step_by(spec.stride) {
        for &j in &js {
            if spec.interfaces {
                best = best.max(norm3(&eval.at_node(i, j, 0.0, Some(Surface::Upper))?));
                best = best.max(norm3(&eval.at_node(i, j, 0.0, Some(Surface::Lower))?));
            }
            for &z in &levels {
                match eval.at_node(i, j, z, None) {
                    Ok(u) => best = best.max(norm3(&u)),
                    Err(MuskatError::AmbiguousEvaluation) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(best)
}
