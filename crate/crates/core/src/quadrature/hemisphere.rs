use std::f64::consts::PI;

use super::gauss::gauss_legendre_on;
use super::kernel::Kernel3;

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    assert!(
        n > 0.0 && n.is_finite(),
        "normal must be a nonzero finite vector"
    );
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orthonormal frame `(e1, e2, n)` completing the unit vector `n`.
pub(crate) fn frame(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if n[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [1.0, 0.0, 0.0]
    };
    let e1 = normalize(cross(n, helper));
    let e2 = cross(n, e1);
    (e1, e2)
}

/// Integral of `h` over the hemisphere `{|z| = 1, n.z >= 0}` with `m` Gauss nodes in
/// `mu = n.z` and `m` equispaced azimuths: `m^2` nodes in all.
pub fn hemisphere_integral(normal: [f64; 3], m: usize, h: impl Fn([f64; 3]) -> f64) -> f64 {
    assert!(
        m > 0,
        "hemisphere rule needs at least one node per direction"
    );
    let n = normalize(normal);
    let (e1, e2) = frame(n);
    let (mu, mw) = gauss_legendre_on(m, 0.0, 1.0);
    let dphi = 2.0 * PI / m as f64;
    let mut acc = 0.0;
    for (&c, &w) in mu.iter().zip(&mw) {
        let s = (1.0 - c * c).sqrt();
        let mut ring = 0.0;
        for l in 0..m {
            let (sp, cp) = (dphi * (l as f64 + 0.5)).sin_cos();
            let z = [
                c * n[0] + s * (cp * e1[0] + sp * e2[0]),
                c * n[1] + s * (cp * e1[1] + sp * e2[1]),
                c * n[2] + s * (cp * e1[2] + sp * e2[2]),
            ];
            ring += h(z);
        }
        acc += w * ring * dphi;
    }
    acc
}

/// Integral of component `component` (1, 2 or 3) of the Darcy kernel over the hemisphere
/// facing `normal`. Vanishes for every normal since the kernel is even with zero spherical mean.
pub fn hemisphere_mean(normal: [f64; 3], component: usize, m: usize) -> f64 {
    assert!((1..=3).contains(&component), "component must be 1, 2 or 3");
    let k = Kernel3;
    hemisphere_integral(normal, m, |z| k.on_sphere(z)[component - 1])
}

/// Same integral for the odd kernel `z1 / |z|^3`, which does not cancel.
pub fn odd_control_mean(normal: [f64; 3], m: usize) -> f64 {
    hemisphere_integral(normal, m, |z| z[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_of_hemisphere() {
        let a = hemisphere_integral([0.3, 0.4, -0.2], 16, |_| 1.0);
        assert!((a - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn vertical_normal_third_component() {
        assert!(hemisphere_mean([0.0, 0.0, 1.0], 3, 256).abs() <= 1e-8);
    }

    #[test]
    fn odd_control_is_pi() {
        assert!((odd_control_mean([1.0, 0.0, 0.0], 64) - PI).abs() < 1e-12);
    }
}
