use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{MuskatError, Result};

/// Doubly periodic square grid. Node `(i, j)` sits at `(i*dx, j*dx)`; `i` runs
/// along x1 and is the slow index of every flat array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    side_length: f64,
    resolution: usize,
}

impl Grid2 {
    pub fn new(side_length: f64, resolution: usize) -> Result<Self> {
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(MuskatError::Parameter(format!(
                "side length must be positive and finite, got {side_length}"
            )));
        }
        if resolution < 8 || !resolution.is_power_of_two() {
            return Err(MuskatError::Parameter(format!(
                "resolution must be a power of two >= 8, got {resolution}"
            )));
        }
        Ok(Grid2 {
            side_length,
            resolution,
        })
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        self.side_length / self.resolution as f64
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        let mask = self.resolution - 1;
        (i & mask) * self.resolution + (j & mask)
    }

    /// Index of node `(i + di, j + dj)` with periodic wrap.
    #[inline]
    pub fn offset_index(&self, i: usize, j: usize, di: isize, dj: isize) -> usize {
        let n = self.resolution as isize;
        let mask = n - 1;
        let ii = ((i as isize + di) & mask) as usize;
        let jj = ((j as isize + dj) & mask) as usize;
        ii * self.resolution + jj
    }

    pub fn coords(&self, i: usize, j: usize) -> [f64; 2] {
        let dx = self.spacing();
        [i as f64 * dx, j as f64 * dx]
    }

    /// Signed wave index of FFT bin `m`, in `(-N/2, N/2]`.
    #[inline]
    pub fn wave_index(&self, m: usize) -> i64 {
        let n = self.resolution as i64;
        let m = m as i64;
        if m <= n / 2 {
            m
        } else {
            m - n
        }
    }

    /// FFT bin holding signed wave index `xi`.
    pub fn bin(&self, xi: i64) -> usize {
        xi.rem_euclid(self.resolution as i64) as usize
    }

    /// Angular wavenumber `2*pi*xi/L`.
    pub fn wavenumber(&self, xi: i64) -> f64 {
        2.0 * PI * xi as f64 / self.side_length
    }

    /// Largest resolved wavenumber magnitude along an axis, `pi*N/L`.
    pub fn max_wavenumber(&self) -> f64 {
        PI * self.resolution as f64 / self.side_length
    }

    /// Minimal periodic image of an integer offset, in `(-N/2, N/2]`.
    pub fn minimal_offset(&self, d: i64) -> i64 {
        self.wave_index(d.rem_euclid(self.resolution as i64) as usize)
    }

    /// Periodic distance between two horizontal points.
    pub fn periodic_distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let l = self.side_length;
        let wrap = |d: f64| {
            let d = d.rem_euclid(l);
            if d > 0.5 * l {
                l - d
            } else {
                d
            }
        };
        wrap(a[0] - b[0]).hypot(wrap(a[1] - b[1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_resolution() {
        assert!(Grid2::new(1.0, 4).is_err());
        assert!(Grid2::new(1.0, 24).is_err());
        assert!(Grid2::new(0.0, 16).is_err());
        assert!(Grid2::new(f64::NAN, 16).is_err());
    }

    #[test]
    fn spacing_times_resolution_is_exact() {
        for &n in &[8usize, 16, 64, 256] {
            let g = Grid2::new(2.0 * PI, n).unwrap();
            assert_eq!(g.spacing() * n as f64, 2.0 * PI);
        }
    }

    #[test]
    fn wave_indices_cover_half_open_band() {
        let g = Grid2::new(1.0, 8).unwrap();
        let idx: Vec<i64> = (0..8).map(|m| g.wave_index(m)).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        for xi in -3..=4 {
            assert_eq!(g.wave_index(g.bin(xi)), xi);
        }
    }

    #[test]
    fn periodic_indexing_is_total() {
        let g = Grid2::new(1.0, 8).unwrap();
        assert_eq!(g.offset_index(0, 0, -1, -1), g.index(7, 7));
        assert_eq!(g.offset_index(7, 3, 1, -4), g.index(0, 7));
        assert_eq!(g.offset_index(2, 2, -18, 16), g.index(0, 2));
    }
}
