//! Bessel function `J1` and the radial tail integrals used to restore the part of the
//! linearized operator that lies outside the truncation disc.

use std::f64::consts::PI;

use super::gauss::gauss_legendre;

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 12.0 {
        let h = 0.5 * ax;
        let h2 = h * h;
        let mut term = h;
        let mut sum = term;
        let mut m = 0.0;
        loop {
            m += 1.0;
            term *= -h2 / (m * (m + 1.0));
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    } else {
        hankel_j1(ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn hankel_j1(x: f64) -> f64 {
    let mu = 4.0;
    let z = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 1.0;
    let mut last = f64::INFINITY;
    loop {
        let odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * z);
        if term.abs() >= last || term.abs() < 1e-18 {
            break;
        }
        last = term.abs();
        // Alternating signs: Q gets terms k = 1, 3, 5, ... and P gets k = 2, 4, ...
        match (k as i64) % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        k += 1.0;
    }
    let chi = x - 0.75 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

const PANEL: f64 = 1.0;
const ORDER: usize = 10;

fn integrate_to(z: f64, f: impl Fn(f64) -> f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let (x, w) = gauss_legendre(ORDER);
    let panels = (z / PANEL).ceil().max(1.0) as usize;
    let h = z / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        let mut s = 0.0;
        for (t, wt) in x.iter().zip(&w) {
            s += wt * f(mid + 0.5 * h * t);
        }
        acc += 0.5 * h * s;
    }
    acc
}

/// Fraction of the self-interaction symbol carried by `|y| > R`, as a function of
/// `z = |k| R`: `1 - int_0^z J1(s)/s ds`.
pub fn self_tail(z: f64) -> f64 {
    1.0 - integrate_to(z, |s| if s == 0.0 { 0.5 } else { bessel_j1(s) / s })
}

/// Fraction of the cross-interaction symbol carried by `|y| > R`, with `z = |k| R` and
/// `hk = |k| h`: `exp(-hk) - int_0^z s^2 J1(s) / (s^2 + hk^2)^{3/2} ds`.
pub fn cross_tail(z: f64, hk: f64) -> f64 {
    (-hk).exp()
        - integrate_to(z, |s| {
            let d = s * s + hk * hk;
            if d == 0.0 {
                0.0
            } else {
                s * s * bessel_j1(s) / (d * d.sqrt())
            }
        })
}
