mod common;

use std::f64::consts::PI;

use common::*;
use muskat::linear::{
    cross_symbol, fit_growth_rate, mode_rates, self_symbol, FlatBase, ModeSample,
};
use muskat::MuskatError;

#[test]
fn self_symbol_matches_direct_quadrature() {
    for kn in [1.0, 2.0, 4.0] {
        for a in [2.0, -1.0] {
            let want = self_rate_oracle(kn, a);
            let got = self_symbol([kn, 0.0], a);
            assert!(
                (got - want).abs() <= 1e-6 * want.abs(),
                "|k|={kn} a={a}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn cross_symbol_matches_direct_quadrature() {
    for kn in [1.0, 2.0, 4.0] {
        for h in [0.5, 1.0] {
            let want = cross_rate_oracle(kn, 2.0, h);
            let got = cross_symbol([kn, 0.0], 2.0, h).unwrap();
            assert!(
                (got - want).abs() <= 1e-6 * want.abs(),
                "|k|={kn} h={h}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn symbols_are_isotropic() {
    for kn in [1.0, 2.5] {
        let s0 = self_symbol([kn, 0.0], 2.0);
        let c0 = cross_symbol([kn, 0.0], 2.0, 0.7).unwrap();
        for d in 0..8 {
            let th = d as f64 * PI / 4.0 + 0.1;
            let k = [kn * th.cos(), kn * th.sin()];
            assert!((self_symbol(k, 2.0) - s0).abs() < 1e-14);
            assert!((cross_symbol(k, 2.0, 0.7).unwrap() - c0).abs() < 1e-14);
        }
    }
}

#[test]
fn cross_symbol_needs_a_positive_gap() {
    assert!(matches!(
        cross_symbol([1.0, 0.0], 2.0, 0.0),
        Err(MuskatError::Parameter(_))
    ));
    assert_eq!(self_symbol([0.0, 0.0], 2.0), 0.0);
}

#[test]
fn mode_matrix_eigenvalues_in_closed_form() {
    let base = FlatBase::new(1.0, 0.0, 2.0, 2.0).unwrap();
    let r = mode_rates([1.0, 0.0], &base).unwrap();
    let e = (-1.0f64).exp();
    assert!((r.eigenvalues[0].re + 1.0 + e).abs() < 1e-14);
    assert!((r.eigenvalues[1].re + 1.0 - e).abs() < 1e-14);
    let [am, ap] = r.eigen_angles().unwrap();
    assert!(
        (am - 45.0).abs() < 1e-9 && (ap + 45.0).abs() < 1e-9,
        "{am} {ap}"
    );
    assert!(FlatBase::new(0.0, 1.0, 2.0, 2.0).is_err());
}

#[test]
fn growth_fit_recovers_an_exponential() {
    let samples: Vec<ModeSample> = (0..20)
        .map(|i| {
            let t = i as f64 * 0.05;
            ModeSample {
                t,
                amplitude: 1e-4 * (-1.7 * t).exp(),
            }
        })
        .collect();
    let fit = fit_growth_rate(&samples, 1.0).unwrap();
    assert!((fit.rate + 1.7).abs() < 1e-10);
    assert!(fit.warning.is_none());
    assert!(matches!(
        fit_growth_rate(&samples[..3], 1.0),
        Err(MuskatError::TooFewRecords { .. })
    ));
    let flat: Vec<ModeSample> = samples
        .iter()
        .map(|s| ModeSample {
            t: s.t,
            amplitude: 0.0,
        })
        .collect();
    assert!(matches!(
        fit_growth_rate(&flat, 1.0),
        Err(MuskatError::NoSignal(_))
    ));
}

#[test]
fn large_amplitude_fit_warns() {
    let samples: Vec<ModeSample> = (0..8)
        .map(|i| ModeSample {
            t: i as f64,
            amplitude: 0.1 * 1.1f64.powi(i),
        })
        .collect();
    assert!(fit_growth_rate(&samples, 1.0).unwrap().warning.is_some());
}
