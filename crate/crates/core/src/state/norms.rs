//! Grid estimators for the norms that appear in the energy and the velocity bound.

use super::{ContourPair, SpectralField, SurfaceField};
use crate::error::{MuskatError, Result};

fn ensure_finite(h: &SurfaceField) -> Result<()> {
    if h.values().iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(MuskatError::InvalidInput(
            "field contains non-finite values".into(),
        ))
    }
}

/// `H^k` norm of `h - far_constant` with multiplier `(1 + |2 pi xi / L|^2)^k` and an
/// `L^2` prefactor, so that `k = 0` is the grid `L^2` norm.
pub fn sobolev_norm(h: &SurfaceField, k: u32) -> Result<f64> {
    if k > 8 {
        return Err(MuskatError::Parameter(format!(
            "Sobolev order {k} exceeds 8"
        )));
    }
    ensure_finite(h)?;
    let grid = *h.grid();
    let spec = SpectralField::forward(grid, &h.deviation());
    let l = grid.side_length();
    let mut acc = 0.0;
    for (idx, c) in spec.coefficients().iter().enumerate() {
        let xi = spec.wave_vector(idx);
        let k1 = grid.wavenumber(xi[0]);
        let k2 = grid.wavenumber(xi[1]);
        acc += (1.0 + k1 * k1 + k2 * k2).powi(k as i32) * c.norm_sqr();
    }
    Ok(l * acc.sqrt())
}

/// Grid `L^2` norm `(dx^2 sum |h|^2)^{1/2}` of raw values.
pub fn grid_l2(grid: &super::Grid2, values: &[f64]) -> f64 {
    let dx = grid.spacing();
    dx * values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn mean_height(h: &SurfaceField) -> f64 {
    h.values().iter().sum::<f64>() / h.values().len() as f64
}

pub fn min_gap(pair: &ContourPair) -> f64 {
    pair.min_gap_at().0
}

/// `||grad h||_inf` plus the largest difference quotient `|grad h(x) - grad h(x')| / |x - x'|^gamma`
/// over node pairs at periodic separation at most `L/4`. A lower estimate of the continuum norm.
pub fn holder_norm_grad(h: &SurfaceField, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(MuskatError::Parameter(format!(
            "Hoelder exponent must lie in (0, 1), got {gamma}"
        )));
    }
    ensure_finite(h)?;
    let (gx, gy) = h.gradient();
    Ok(holder_from_gradient(h.grid(), &gx, &gy, gamma))
}

pub(crate) fn holder_from_gradient(grid: &super::Grid2, gx: &[f64], gy: &[f64], gamma: f64) -> f64 {
    let n = grid.resolution();
    let dx = grid.spacing();
    let sup = gx
        .iter()
        .zip(gy)
        .fold(0.0f64, |m, (a, b)| m.max(a.hypot(*b)));

    // Half of the admissible offsets suffices since the quotient is symmetric.
    let reach = (n / 4) as i64;
    let mut offsets = Vec::new();
    for di in -reach..=reach {
        for dj in 0..=reach {
            if dj == 0 && di <= 0 {
                continue;
            }
            let r2 = (di * di + dj * dj) as f64;
            if r2 <= (reach * reach) as f64 {
                let inv = (dx * r2.sqrt()).powf(-gamma);
                offsets.push((di as isize, dj as isize, inv));
            }
        }
    }

    let mut best = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let a = grid.index(i, j);
            let (ax, ay) = (gx[a], gy[a]);
            for &(di, dj, inv) in &offsets {
                let b = grid.offset_index(i, j, di, dj);
                let q = (ax - gx[b]).hypot(ay - gy[b]) * inv;
                if q > best {
                    best = q;
                }
            }
        }
    }
    sup + best
}

/// `sup_{x,y} [|y|^2 + (f(x) - g(x-y))^2]^{-1/2}` over grid nodes and periodic grid offsets.
pub fn contour_distance_sup(pair: &ContourPair) -> Result<f64> {
    let grid = pair.grid();
    let n = grid.resolution();
    let (gap, idx) = pair.min_gap_at();
    if gap <= 0.0 {
        return Err(MuskatError::ContourCollision {
            i: idx / n,
            j: idx % n,
            gap,
        });
    }
    let dx = grid.spacing();
    let mut offsets: Vec<(isize, isize, f64)> = Vec::with_capacity(n * n);
    for a in 0..n as i64 {
        for b in 0..n as i64 {
            if a == 0 && b == 0 {
                continue;
            }
            let da = grid.minimal_offset(a);
            let db = grid.minimal_offset(b);
            let r2 = ((da * da + db * db) as f64) * dx * dx;
            offsets.push((da as isize, db as isize, r2));
        }
    }
    offsets.sort_by(|p, q| p.2.total_cmp(&q.2));

    let f = pair.f().values();
    let g = pair.g().values();
    // best holds the largest inverse distance seen, tracked as a smallest squared distance.
    let mut best_sq = gap * gap;
    for i in 0..n {
        for j in 0..n {
            let fx = f[grid.index(i, j)];
            for &(di, dj, r2) in &offsets {
                if r2 >= best_sq {
                    break;
                }
                let dz = fx - g[grid.offset_index(i, j, -di, -dj)];
                let d2 = r2 + dz * dz;
                if d2 < best_sq {
                    best_sq = d2;
                }
            }
        }
    }
    Ok(1.0 / best_sq.sqrt())
}
