//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use muskat::evolution::{Simulation, StepControl};
use muskat::quadrature::{InterfaceOperator, PolarQuadRule, RuleParams};
use muskat::{ContourPair, Densities, Grid2, SurfaceField};

/// Gauss-Legendre nodes on [-1, 1] via the Golub-Welsch-free Newton iteration, kept separate
/// from the library's own rule.
pub fn legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, z);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
    }
    (x, w)
}

/// `int_0^{2 pi} cos t sin(s cos t) dt` by the trapezoid rule, exact for this entire
/// periodic integrand once the node count exceeds `s` comfortably.
fn angular(s: f64) -> f64 {
    let m = 2 * (s.ceil() as usize) + 64;
    let h = 2.0 * PI / m as f64;
    (0..m)
        .map(|l| {
            let c = (h * l as f64).cos();
            c * (s * c).sin()
        })
        .sum::<f64>()
        * h
}

/// `int_{R^2} k.y sin(k.y) / (|y|^2 + h^2)^{3/2} dy` for `|k| = kn`, computed in polar
/// coordinates with an oscillatory tail accelerated by repeated averaging of partial sums.
pub fn linearized_kernel_integral(kn: f64, h: f64) -> f64 {
    let (gx, gw) = legendre(12);
    let radial = |r: f64| kn * r * r * angular(kn * r) / (r * r + h * h).powf(1.5);
    let panel = |a: f64, b: f64| {
        let (c, d) = (0.5 * (a + b), 0.5 * (b - a));
        gx.iter()
            .zip(&gw)
            .map(|(x, w)| w * d * radial(c + d * x))
            .sum::<f64>()
    };
    // Resolve the core finely, then integrate half-periods of the oscillation.
    let half = PI / kn;
    let core = 40.0 * half;
    let mut acc = 0.0;
    let fine = 400;
    for p in 0..fine {
        acc += panel(
            core * p as f64 / fine as f64,
            core * (p + 1) as f64 / fine as f64,
        );
    }
    let mut partial = Vec::new();
    let mut a = core;
    for _ in 0..40 {
        acc += panel(a, a + half);
        a += half;
        partial.push(acc);
    }
    while partial.len() > 1 {
        partial = partial.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    partial[0]
}

/// Linearized self rate from direct quadrature: `-(a/4 pi) int k.y sin(k.y)/|y|^3 dy`.
pub fn self_rate_oracle(kn: f64, a: f64) -> f64 {
    -a / (4.0 * PI) * linearized_kernel_integral(kn, 0.0)
}

/// Linearized cross rate from direct quadrature over a gap `h`.
pub fn cross_rate_oracle(kn: f64, a: f64, h: f64) -> f64 {
    -a / (4.0 * PI) * linearized_kernel_integral(kn, h)
}

pub fn grid(n: usize) -> Grid2 {
    Grid2::new(2.0 * PI, n).unwrap()
}

pub fn cosine_surface(grid: Grid2, level: f64, amp: f64, k: [i64; 2]) -> SurfaceField {
    let unit = 2.0 * PI / grid.side_length();
    SurfaceField::from_fn(grid, level, |x1, x2| {
        level + amp * (unit * (k[0] as f64 * x1 + k[1] as f64 * x2)).cos()
    })
    .unwrap()
}

pub fn pair(f: SurfaceField, g: SurfaceField, rho: [f64; 3]) -> ContourPair {
    ContourPair::new(f, g, Densities(rho)).unwrap()
}

pub fn rule(grid: &Grid2) -> PolarQuadRule {
    PolarQuadRule::new(grid, &RuleParams::default()).unwrap()
}

/// Operator with the far-field correction about the pair's mean gap.
pub fn operator(p: &ContourPair) -> InterfaceOperator {
    InterfaceOperator::new(*p.grid(), rule(p.grid())).with_far_field_correction(Some(p.mean_gap()))
}

pub fn simulation(p: ContourPair, t_end: f64) -> Simulation {
    let control = StepControl::for_grid(p.grid(), t_end);
    let op = operator(&p);
    Simulation::new(p, control, op).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
