use meanfield_core::dispersive::*;
use meanfield_core::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

/// For the unit Gaussian, `|| |x|^{-1} psi_t ||^2 = 2 / ((d - 2)(1 + 4t^2))`,
/// so the time integral over `[-T, T]` is `2 atan(2T) / (d - 2)`.
fn truncated_oracle(d: u32, big_t: f64) -> f64 {
    2.0 * (2.0 * big_t).atan() / (d as f64 - 2.0)
}

/// `int_{S^2} de |e - R p|^{-alpha} = 2 pi ((1 + R)^b - |1 - R|^b) / (R b)` with `b = 2 - alpha`.
fn sphere_oracle(radius: f64, alpha: f64) -> f64 {
    let b = 2.0 - alpha;
    if radius == 0.0 {
        return 4.0 * PI;
    }
    2.0 * PI * ((1.0 + radius).powf(b) - (1.0 - radius).abs().powf(b)) / (radius * b)
}

#[test]
fn gaussian_saturates_sharp_constant() {
    for d in 3..=5 {
        let v = gaussian_kato_integral(d, 1e-9).unwrap();
        assert!((v - PI / (d as f64 - 2.0)).abs() < 1e-6, "d={d}: {v}");
        assert!((v - kato_bound(d).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn truncated_integral_increases_to_the_limit() {
    for d in [3, 4] {
        let mut last = 0.0;
        for big_t in [0.25, 1.0, 4.0, 16.0, 64.0] {
            let v = gaussian_kato_truncated(d, big_t, 1e-10).unwrap();
            assert!((v - truncated_oracle(d, big_t)).abs() < 1e-8, "d={d} T={big_t}");
            assert!(v > last && v < kato_bound(d).unwrap());
            last = v;
        }
    }
}

#[test]
fn report_fields() {
    let r = gaussian_kato_report(3, 1e-9).unwrap();
    assert_eq!(r.bound, PI);
    assert!(r.abs_err < 1e-6 && r.gamma.is_none());
    let json = serde_json::to_value(&r).unwrap();
    assert!(json.get("gamma").is_none());
    assert!(json.get("abs_err").is_some());
}

#[test]
fn dimension_guard() {
    assert!(matches!(kato_bound(2), Err(Error::InvalidArgument(_))));
    assert!(gaussian_kato_integral(2, 1e-8).is_err());
    assert!(newton_g(1.0, 2).is_err());
}

#[test]
fn newton_piecewise_values() {
    assert!((newton_g(4.0, 3).unwrap() - 2.0 * PI).abs() < 1e-14);
    assert!((newton_g(0.25, 3).unwrap() - PI).abs() < 1e-14);
    assert!((newton_g(1.0, 3).unwrap() - 2.0 * PI).abs() < 1e-14);
    for v in [1.0 - 1e-6, 1.0 + 1e-6] {
        assert!((newton_g(v, 3).unwrap() - 2.0 * PI).abs() <= 1e-4);
    }
}

#[test]
fn newton_matches_angular_quadrature() {
    for v in [0.1, 0.5, 0.9, 1.1, 4.0] {
        let q = newton_g_quadrature(v, 3, 1e-11).unwrap();
        assert!((q - newton_g(v, 3).unwrap()).abs() < 1e-8, "v={v}: {q}");
        assert!((q - 0.5 * sphere_oracle(1.0 / v.sqrt(), 1.0)).abs() < 1e-8);
    }
    // Newton's theorem holds in every dimension
    for d in [4, 5] {
        for v in [0.3, 2.0] {
            let q = newton_g_quadrature(v, d, 1e-11).unwrap();
            assert!((q - newton_g(v, d).unwrap()).abs() < 1e-8, "d={d} v={v}");
        }
    }
}

#[test]
fn generalized_angular_supremum_is_finite() {
    for gamma in [0.6, 0.75, 1.0, 1.25, 1.4] {
        let alpha = 3.0 - 2.0 * gamma;
        let (sup, _) = angular_supremum(3, gamma, 1e-10).unwrap();
        let brute = (0..=20_000)
            .map(|j| sphere_oracle(j as f64 * 1e-4, alpha))
            .chain([sphere_oracle(1.0, alpha)])
            .fold(0.0f64, f64::max);
        assert!(sup.is_finite());
        assert!((sup - brute).abs() < 1e-6 * brute, "gamma={gamma}: {sup} vs {brute}");
    }
    let r = angular_supremum_report(4, 1.2, 1e-10).unwrap();
    assert!(r.computed.is_finite() && r.computed >= r.bound - 1e-9);
    assert!(angular_supremum(3, 0.5, 1e-8).is_err());
    assert!(angular_supremum(3, 1.5, 1e-8).is_err());
}

#[test]
fn pair_factor() {
    assert_eq!(pair_reduction_factor(1.0), PI / 2.0);
    assert_eq!(pair_reduction_factor(0.0), 0.0);
    assert_eq!(pair_reduction_factor(2.0), 2.0 * PI);
}

#[test]
fn time_l1_norm_obeys_cauchy_schwarz() {
    for t in [0.1, 1.0, 10.0] {
        let v = gaussian_l1_smoothing(3, t, 1e-10).unwrap();
        // int_0^t sqrt(2 / (1 + 4 s^2)) ds
        let oracle = (2.0f64).sqrt() / 2.0 * (2.0 * t).asinh();
        assert!((v - oracle).abs() < 1e-8, "t={t}");
        assert!(v <= l1_smoothing_bound(1.0, t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn newton_g_monotone(v1 in 0.0f64..3.0, v2 in 0.0f64..3.0, d in 3u32..7) {
        let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        let (g_lo, g_hi) = (newton_g(lo, d).unwrap(), newton_g(hi, d).unwrap());
        prop_assert!(g_lo <= g_hi);
        if lo > 1.0 {
            prop_assert_eq!(g_lo, g_hi);
        }
    }

    #[test]
    fn gk_integrates_polynomials(c in proptest::collection::vec(-2.0f64..2.0, 1..10), a in -3.0f64..0.0, b in 0.1f64..3.0) {
        let f = |x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
        let anti = |x: f64| c.iter().enumerate().map(|(j, k)| k * x.powi(j as i32 + 1) / (j + 1) as f64).sum::<f64>();
        let v = integrate(f, a, b, 1e-12).unwrap();
        prop_assert!((v - (anti(b) - anti(a))).abs() < 1e-10);
    }
}
