//! Fourier view of periodic surface data.
//!
//! Coefficients follow `h_hat(xi) = (1/N^2) sum_n h(n) exp(-i 2 pi xi.n / N)`, the
//! discrete counterpart of `(1/L^2) int h(x) exp(-i 2 pi xi.x / L) dx`.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

use super::grid::Grid2;

struct Plan2 {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plan2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Plan2 {
            forward: planner.plan_fft(n, FftDirection::Forward),
            inverse: planner.plan_fft(n, FftDirection::Inverse),
        }
    }
}

fn transform2(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    // Rows are contiguous (fixed i, varying j).
    fft.process(data);
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            column[i] = data[i * n + j];
        }
        fft.process(&mut column);
        for i in 0..n {
            data[i * n + j] = column[i];
        }
    }
}

/// Fourier coefficients of a real periodic field.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid2,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn forward(grid: Grid2, values: &[f64]) -> Self {
        let n = grid.resolution();
        assert_eq!(values.len(), grid.len(), "field length does not match grid");
        let plan = Plan2::new(n);
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform2(&mut data, n, &plan.forward);
        let scale = 1.0 / grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        SpectralField { grid, coeffs: data }
    }

    pub fn from_coefficients(grid: Grid2, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at signed integer wave vector `xi`.
    pub fn coefficient(&self, xi: [i64; 2]) -> Complex64 {
        self.coeffs[self.grid.bin(xi[0]) * self.grid.resolution() + self.grid.bin(xi[1])]
    }

    /// Signed integer wave vector of flat bin `idx`.
    pub fn wave_vector(&self, idx: usize) -> [i64; 2] {
        let n = self.grid.resolution();
        [self.grid.wave_index(idx / n), self.grid.wave_index(idx % n)]
    }

    /// Synthesis back to grid values; the imaginary residue of a real field is dropped.
    pub fn inverse_real(&self) -> Vec<f64> {
        let n = self.grid.resolution();
        let plan = Plan2::new(n);
        let mut data = self.coeffs.clone();
        transform2(&mut data, n, &plan.inverse);
        data.iter().map(|c| c.re).collect()
    }

    /// Apply a real multiplier that depends on the physical wave vector.
    pub fn map_multiplier(&self, mut m: impl FnMut([f64; 2]) -> f64) -> SpectralField {
        let mut out = self.clone();
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            let xi = self.wave_vector(idx);
            *c *= m([self.grid.wavenumber(xi[0]), self.grid.wavenumber(xi[1])]);
        }
        out
    }
}

/// Spectral gradient `(d/dx1, d/dx2)` of a periodic field. The Nyquist bins are
/// zeroed so the derivative of a real field stays real.
pub fn spectral_gradient(grid: Grid2, values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = grid.resolution();
    let nyq = (n / 2) as i64;
    let spec = SpectralField::forward(grid, values);
    let mut d1 = spec.clone();
    let mut d2 = spec;
    for idx in 0..grid.len() {
        let xi = [grid.wave_index(idx / n), grid.wave_index(idx % n)];
        let k1 = if xi[0] == nyq {
            0.0
        } else {
            grid.wavenumber(xi[0])
        };
        let k2 = if xi[1] == nyq {
            0.0
        } else {
            grid.wavenumber(xi[1])
        };
        d1.coeffs[idx] *= Complex64::new(0.0, k1);
        d2.coeffs[idx] *= Complex64::new(0.0, k2);
    }
    (d1.inverse_real(), d2.inverse_real())
}

/// Single Fourier coefficient by direct summation, for spot measurements.
pub fn direct_coefficient(grid: Grid2, values: &[f64], xi: [i64; 2]) -> Complex64 {
    let n = grid.resolution();
    let base = -2.0 * std::f64::consts::PI / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let phase = base * ((xi[0] * i as i64 + xi[1] * j as i64).rem_euclid(n as i64)) as f64;
            acc += values[i * n + j] * Complex64::from_polar(1.0, phase);
        }
    }
    acc / grid.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn field(grid: Grid2, h: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let n = grid.resolution();
        let mut v = vec![0.0; grid.len()];
        for i in 0..n {
            for j in 0..n {
                let [x, y] = grid.coords(i, j);
                v[i * n + j] = h(x, y);
            }
        }
        v
    }

    #[test]
    fn single_mode_coefficients() {
        let g = Grid2::new(2.0 * PI, 16).unwrap();
        let v = field(g, |x, y| (2.0 * x + 3.0 * y).cos());
        let s = SpectralField::forward(g, &v);
        assert!((s.coefficient([2, 3]).re - 0.5).abs() < 1e-14);
        assert!((s.coefficient([-2, -3]).re - 0.5).abs() < 1e-14);
        assert!(s.coefficient([1, 0]).norm() < 1e-14);
        let d = direct_coefficient(g, &v, [2, 3]);
        assert!((d - s.coefficient([2, 3])).norm() < 1e-14);
    }

    #[test]
    fn round_trip_and_conjugate_symmetry() {
        let g = Grid2::new(3.0, 32).unwrap();
        let v = field(g, |x, y| (x * 2.1).sin().exp() + (y * 4.2).cos() * x.cos());
        let s = SpectralField::forward(g, &v);
        for idx in 0..g.len() {
            let xi = s.wave_vector(idx);
            let c = s.coefficient(xi);
            let cm = s.coefficient([-xi[0], -xi[1]]);
            assert!((c - cm.conj()).norm() < 1e-13);
        }
        let back = s.inverse_real();
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn gradient_of_band_limited_field_is_exact() {
        let g = Grid2::new(2.0 * PI, 32).unwrap();
        let v = field(g, |x, y| (x + 2.0 * y).sin());
        let (gx, gy) = spectral_gradient(g, &v);
        let ex = field(g, |x, y| (x + 2.0 * y).cos());
        let ey = field(g, |x, y| 2.0 * (x + 2.0 * y).cos());
        for idx in 0..g.len() {
            assert!((gx[idx] - ex[idx]).abs() < 1e-12);
            assert!((gy[idx] - ey[idx]).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_of_constant_is_exactly_zero() {
        let g = Grid2::new(2.0 * PI, 16).unwrap();
        let (gx, gy) = spectral_gradient(g, &vec![1.75; g.len()]);
        assert!(gx.iter().chain(gy.iter()).all(|&v| v == 0.0));
    }
}
