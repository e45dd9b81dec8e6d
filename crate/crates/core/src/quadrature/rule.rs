use std::f64::consts::PI;

use crate::error::{MuskatError, Result};
use crate::state::Grid2;

/// Parameters that determine a [`PolarQuadRule`] on a given grid. `None` fields take
/// grid-relative defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleParams {
    pub angular_nodes: usize,
    /// Number of uniform panels the outer region `(.., R_far]` would need at the coarsest width.
    pub radial_count: Option<usize>,
    pub grading: f64,
    pub inner_radius: Option<f64>,
    pub far_radius: Option<f64>,
}

impl Default for RuleParams {
    fn default() -> Self {
        RuleParams {
            angular_nodes: 32,
            radial_count: None,
            grading: 0.85,
            inner_radius: None,
            far_radius: None,
        }
    }
}

/// Midpoint product rule on the disc `|y| <= R_far` in polar coordinates.
///
/// Radial panels start with `(0, r_min]`, grow geometrically with ratio `1/q` until they
/// reach the cap width `R_far / radial_count`, then continue uniformly. Angular nodes sit
/// at `2 pi (l + 1/2) / M`, and the second half of them is the exact negation of the first,
/// so the rule is invariant under `y -> -y` bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarQuadRule {
    angular: usize,
    edges: Vec<f64>,
}

impl PolarQuadRule {
    pub fn new(grid: &Grid2, params: &RuleParams) -> Result<Self> {
        let dx = grid.spacing();
        let far = params.far_radius.unwrap_or(0.5 * grid.side_length());
        let inner = params.inner_radius.unwrap_or(dx / 8.0);
        let count = params.radial_count.unwrap_or(grid.resolution() / 2);
        Self::build(params.angular_nodes, count, params.grading, inner, far)
    }

    pub fn build(
        angular: usize,
        radial_count: usize,
        grading: f64,
        inner: f64,
        far: f64,
    ) -> Result<Self> {
        if angular < 2 || !angular.is_multiple_of(2) {
            return Err(MuskatError::Parameter(format!(
                "angular node count must be even and >= 2, got {angular}"
            )));
        }
        if radial_count == 0 {
            return Err(MuskatError::Parameter(
                "radial count must be positive".into(),
            ));
        }
        if !(grading > 0.0 && grading < 1.0) {
            return Err(MuskatError::Parameter(format!(
                "grading ratio must lie in (0, 1), got {grading}"
            )));
        }
        if !(far.is_finite() && far > 0.0) {
            return Err(MuskatError::Parameter(format!(
                "far radius must be positive, got {far}"
            )));
        }
        if !(inner > 0.0 && inner < far) {
            return Err(MuskatError::Parameter(format!(
                "inner radius must lie in (0, far radius), got {inner}"
            )));
        }
        let cap = far / radial_count as f64;
        let mut edges = vec![0.0, inner];
        let mut e = inner;
        loop {
            let width = e * (1.0 / grading - 1.0);
            if width >= cap || e + width >= far {
                break;
            }
            e += width;
            edges.push(e);
        }
        let rest = far - e;
        let uniform = (rest / cap).ceil() as usize;
        for m in 1..=uniform {
            edges.push(if m == uniform {
                far
            } else {
                e + rest * m as f64 / uniform as f64
            });
        }
        Ok(PolarQuadRule { angular, edges })
    }

    pub fn angular_nodes(&self) -> usize {
        self.angular
    }

    pub fn radial_nodes(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn len(&self) -> usize {
        self.angular * self.radial_nodes()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn far_radius(&self) -> f64 {
        *self.edges.last().expect("rule has edges")
    }

    pub fn inner_radius(&self) -> f64 {
        self.edges[1]
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Splits every radial panel into `factor` equal pieces and multiplies the angular count.
    pub fn refined(&self, factor: usize) -> Self {
        assert!(factor >= 1);
        let mut edges = vec![0.0];
        for w in self.edges.windows(2) {
            for s in 1..=factor {
                edges.push(if s == factor {
                    w[1]
                } else {
                    w[0] + (w[1] - w[0]) * s as f64 / factor as f64
                });
            }
        }
        PolarQuadRule {
            angular: self.angular * factor,
            edges,
        }
    }

    /// Same outer panels, with the geometric grading restarted from `scale` if that is finer.
    pub fn with_inner_scale(&self, scale: f64, grading: f64) -> Self {
        if scale >= self.inner_radius() || scale <= 0.0 {
            return self.clone();
        }
        let mut edges = vec![0.0, scale];
        let mut e = scale;
        let first = self.inner_radius();
        while e < first {
            let next = e / grading;
            if next >= first {
                break;
            }
            edges.push(next);
            e = next;
        }
        edges.extend_from_slice(&self.edges[1..]);
        PolarQuadRule {
            angular: self.angular,
            edges,
        }
    }

    /// Unit direction vectors; entry `l + M/2` is the negation of entry `l`.
    pub fn directions(&self) -> Vec<[f64; 2]> {
        let m = self.angular;
        let mut dirs = vec![[0.0; 2]; m];
        for l in 0..m / 2 {
            let th = 2.0 * PI * (l as f64 + 0.5) / m as f64;
            let (s, c) = th.sin_cos();
            dirs[l] = [c, s];
            dirs[l + m / 2] = [-c, -s];
        }
        dirs
    }

    /// All nodes as `(y1, y2, weight)`.
    pub fn nodes(&self) -> Vec<(f64, f64, f64)> {
        let dirs = self.directions();
        let dth = 2.0 * PI / self.angular as f64;
        let mut out = Vec::with_capacity(self.len());
        for w in self.edges.windows(2) {
            let r = 0.5 * (w[0] + w[1]);
            let weight = r * (w[1] - w[0]) * dth;
            for d in &dirs {
                out.push((r * d[0], r * d[1], weight));
            }
        }
        out
    }
}

/// Precomputed bilinear sampling data for evaluating `F(x - y)` at every grid node `x`.
#[derive(Debug, Clone)]
pub struct GridStencil {
    pub(crate) nodes: Vec<StencilNode>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct StencilNode {
    pub y1: f64,
    pub y2: f64,
    pub r2: f64,
    pub w: f64,
    pub di: isize,
    pub dj: isize,
    pub t1: f64,
    pub t2: f64,
}

impl GridStencil {
    pub fn new(grid: &Grid2, rule: &PolarQuadRule) -> Self {
        let dx = grid.spacing();
        let nodes = rule
            .nodes()
            .into_iter()
            .map(|(y1, y2, w)| {
                let s1 = -y1 / dx;
                let s2 = -y2 / dx;
                let f1 = s1.floor();
                let f2 = s2.floor();
                StencilNode {
                    y1,
                    y2,
                    r2: y1 * y1 + y2 * y2,
                    w,
                    di: f1 as isize,
                    dj: f2 as isize,
                    t1: s1 - f1,
                    t2: s2 - f2,
                }
            })
            .collect();
        GridStencil { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2 {
        Grid2::new(2.0 * PI, 32).unwrap()
    }

    #[test]
    fn weights_integrate_one_to_disc_area() {
        let rule = PolarQuadRule::new(&grid(), &RuleParams::default()).unwrap();
        let total: f64 = rule.nodes().iter().map(|n| n.2).sum();
        let area = PI * rule.far_radius().powi(2);
        assert!((total - area).abs() <= 1e-12 * area);
        assert_eq!(rule.far_radius(), PI);
    }

    #[test]
    fn nodes_never_hit_the_origin_and_are_symmetric() {
        let rule = PolarQuadRule::new(&grid(), &RuleParams::default()).unwrap();
        let nodes = rule.nodes();
        let m = rule.angular_nodes();
        for (k, n) in nodes.iter().enumerate() {
            assert!(n.0.hypot(n.1) > 0.0);
            let ring = k / m;
            let l = k % m;
            let mirror = nodes[ring * m + (l + m / 2) % m];
            assert_eq!((n.0, n.1, n.2), (-mirror.0, -mirror.1, mirror.2));
        }
    }

    #[test]
    fn rejects_odd_angular_count() {
        let p = RuleParams {
            angular_nodes: 31,
            ..RuleParams::default()
        };
        assert!(PolarQuadRule::new(&grid(), &p).is_err());
    }

    #[test]
    fn refinement_preserves_area_and_multiplies_nodes() {
        let rule = PolarQuadRule::new(&grid(), &RuleParams::default()).unwrap();
        let fine = rule.refined(2);
        assert_eq!(fine.len(), 4 * rule.len());
        let total: f64 = fine.nodes().iter().map(|n| n.2).sum();
        assert!((total - PI * PI * PI).abs() < 1e-11);
    }

    #[test]
    fn inner_scale_only_refines() {
        let rule = PolarQuadRule::new(&grid(), &RuleParams::default()).unwrap();
        let finer = rule.with_inner_scale(rule.inner_radius() / 10.0, 0.85);
        assert!(finer.radial_nodes() > rule.radial_nodes());
        assert_eq!(finer.far_radius(), rule.far_radius());
        assert_eq!(rule.with_inner_scale(1.0, 0.85), rule);
    }
}
