//! The Darcy kernel in three dimensions, its Fourier multiplier, and direct evaluation of
//! the velocity induced by a periodic density.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gauss::{gauss_legendre, gauss_legendre_on};
use crate::error::{MuskatError, Result};

/// `K(z) = (3 z1 z3, 3 z2 z3, 2 z3^2 - z1^2 - z2^2) / |z|^5`, even and homogeneous of degree -3.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kernel3;

impl Kernel3 {
    pub fn eval(&self, z: [f64; 3]) -> [f64; 3] {
        let r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
        let inv5 = 1.0 / (r2 * r2 * r2.sqrt());
        [
            3.0 * z[0] * z[2] * inv5,
            3.0 * z[1] * z[2] * inv5,
            (2.0 * z[2] * z[2] - z[0] * z[0] - z[1] * z[1]) * inv5,
        ]
    }

    /// Values on the unit sphere, where the denominator is one.
    #[inline]
    pub fn on_sphere(&self, w: [f64; 3]) -> [f64; 3] {
        [
            3.0 * w[0] * w[2],
            3.0 * w[1] * w[2],
            2.0 * w[2] * w[2] - w[0] * w[0] - w[1] * w[1],
        ]
    }
}

/// `(xi1 xi3, xi2 xi3, -(xi1^2 + xi2^2)) / |xi|^2`.
pub fn darcy_multiplier(xi: [i64; 3]) -> Result<[f64; 3]> {
    let n2 = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) as f64;
    if n2 == 0.0 {
        return Err(MuskatError::UndefinedMultiplier);
    }
    let [a, b, c] = xi.map(|v| v as f64);
    Ok([a * c / n2, b * c / n2, -(a * a + b * b) / n2])
}

/// Periodic scalar field on an `n^3` grid over the cube of side `side`.
#[derive(Debug, Clone)]
pub struct PeriodicDensity3 {
    n: usize,
    side: f64,
    values: Vec<f64>,
    modes: Vec<([i64; 3], Complex64)>,
}

impl PeriodicDensity3 {
    /// Values indexed `(i * n + j) * n + k`.
    pub fn new(n: usize, side: f64, values: Vec<f64>) -> Result<Self> {
        if n < 2 || values.len() != n * n * n {
            return Err(MuskatError::InvalidInput(format!(
                "expected {} density samples on a grid of {n} per axis",
                n * n * n
            )));
        }
        if !(side > 0.0 && side.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(MuskatError::InvalidInput(
                "density must be finite on a positive box".into(),
            ));
        }
        let mut d = PeriodicDensity3 {
            n,
            side,
            values,
            modes: Vec::new(),
        };
        d.modes = d.spectrum();
        Ok(d)
    }

    pub fn from_fn(n: usize, side: f64, rho: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        let h = side / n as f64;
        let mut values = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    values.push(rho([i as f64 * h, j as f64 * h, k as f64 * h]));
                }
            }
        }
        Self::new(n, side, values)
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    fn signed(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m <= n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Discrete Fourier coefficient by direct summation.
    pub fn coefficient(&self, xi: [i64; 3]) -> Complex64 {
        let n = self.n;
        let base = -2.0 * PI / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let p = (xi[0] * i as i64 + xi[1] * j as i64 + xi[2] * k as i64)
                        .rem_euclid(n as i64);
                    acc += self.values[(i * n + j) * n + k]
                        * Complex64::from_polar(1.0, base * p as f64);
                }
            }
        }
        acc / (n * n * n) as f64
    }

    fn spectrum(&self) -> Vec<([i64; 3], Complex64)> {
        let n = self.n;
        let mut all = Vec::new();
        let mut peak = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let xi = [self.signed(a), self.signed(b), self.signed(c)];
                    let v = self.coefficient(xi);
                    peak = peak.max(v.norm());
                    all.push((xi, v));
                }
            }
        }
        all.retain(|(_, v)| v.norm() > 1e-14 * peak.max(f64::MIN_POSITIVE));
        all
    }

    /// Trigonometric interpolant at an arbitrary point.
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let s = 2.0 * PI / self.side;
        self.modes
            .iter()
            .map(|(xi, c)| {
                let ph = s * (xi[0] as f64 * x[0] + xi[1] as f64 * x[1] + xi[2] as f64 * x[2]);
                c.re * ph.cos() - c.im * ph.sin()
            })
            .sum()
    }

    /// Largest wave number present, `2 pi |xi|_max / side`.
    pub fn bandwidth(&self) -> f64 {
        let m = self
            .modes
            .iter()
            .map(|(xi, _)| ((xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) as f64).sqrt())
            .fold(0.0, f64::max);
        2.0 * PI * m / self.side
    }
}

/// Multiplier applied to the density coefficient at `xi`, per velocity component.
pub fn darcy_multiplier_check(density: &PeriodicDensity3, xi: [i64; 3]) -> Result<[Complex64; 3]> {
    let m = darcy_multiplier(xi)?;
    let c = density.coefficient(xi);
    Ok([c * m[0], c * m[1], c * m[2]])
}

/// Spherical product rule with a smooth radial cutoff for the principal-value integral
/// of the kernel against a bounded periodic density.
#[derive(Debug, Clone, Copy)]
pub struct BallRule {
    /// Outer radius; the cutoff switches smoothly from 1 to 0 on `[radius/2, radius]`.
    pub radius: f64,
    /// Radial panels per unit length and Gauss nodes per panel.
    pub panels_per_unit: f64,
    pub radial_order: usize,
    /// Angular nodes grow with `r` so that `bandwidth * r` stays resolved.
    pub min_polar: usize,
}

impl Default for BallRule {
    fn default() -> Self {
        BallRule {
            radius: 40.0,
            panels_per_unit: 1.0,
            radial_order: 8,
            min_polar: 8,
        }
    }
}

fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

fn cutoff(r: f64, radius: f64) -> f64 {
    smooth_step(2.0 * (1.0 - r / radius))
}

/// Velocity at `x` induced by `density` through the Darcy kernel, by direct quadrature:
/// `u = -(1/4 pi) PV int K(z) rho(x - z) dz - (2/3)(0, 0, rho(x))`.
pub fn velocity_from_density(density: &PeriodicDensity3, x: [f64; 3], rule: &BallRule) -> [f64; 3] {
    let kernel = Kernel3;
    let rho0 = density.eval(x);
    let band = density.bandwidth();
    let panels = (rule.radius * rule.panels_per_unit).ceil().max(1.0) as usize;
    let h = rule.radius / panels as f64;
    let mut acc = [0.0; 3];
    for p in 0..panels {
        let (rs, rw) = gauss_legendre_on(rule.radial_order, p as f64 * h, (p + 1) as f64 * h);
        // One angular rule per panel, sized for its outer edge.
        let polar = rule
            .min_polar
            .max((0.75 * band * (p + 1) as f64 * h).ceil() as usize + 8);
        let (mu, mw) = gauss_legendre(polar);
        let az = 2 * polar;
        let dphi = 2.0 * PI / az as f64;
        let dirs: Vec<([f64; 3], f64)> = mu
            .iter()
            .zip(&mw)
            .flat_map(|(&m, &w)| {
                let s = (1.0 - m * m).sqrt();
                (0..az).map(move |l| {
                    let ph = dphi * (l as f64 + 0.5);
                    ([s * ph.cos(), s * ph.sin(), m], w * dphi)
                })
            })
            .collect();
        for (&r, &wr) in rs.iter().zip(&rw) {
            let weight = wr * cutoff(r, rule.radius) / r;
            if weight == 0.0 {
                continue;
            }
            let mut ring = [0.0; 3];
            for (d, wd) in &dirs {
                let k = kernel.on_sphere(*d);
                let v = density.eval([x[0] - r * d[0], x[1] - r * d[1], x[2] - r * d[2]]) - rho0;
                for c in 0..3 {
                    ring[c] += wd * k[c] * v;
                }
            }
            for c in 0..3 {
                acc[c] += weight * ring[c];
            }
        }
    }
    let s = -1.0 / (4.0 * PI);
    [s * acc[0], s * acc[1], s * acc[2] - 2.0 / 3.0 * rho0]
}
