use super::quadrature::{integrate, integrate_to_infinity};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of a smoothing check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KatoQuery {
    pub d: u32,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default)]
    pub gamma: Option<f64>,
}

fn one() -> f64 {
    1.0
}

/// Outcome of a check, `abs_err = |computed - bound|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KatoReport {
    pub d: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub computed: f64,
    pub bound: f64,
    pub abs_err: f64,
}

fn need_d(d: u32) -> Result<()> {
    if d < 3 {
        return Err(Error::invalid(format!("dimension must be at least 3, got {d}")));
    }
    Ok(())
}

/// `Gamma(n / 2)` for a positive integer `n`.
pub fn half_gamma(n: u32) -> f64 {
    assert!(n > 0);
    let (mut g, mut x) = if n % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while x < n as f64 / 2.0 - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area of the unit sphere in `R^d`.
pub fn sphere_area(d: u32) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / half_gamma(d)
}

/// Sharp constant `pi / (d - 2)` in `int dt || |x|^{-1} e^{it Laplacian} psi ||^2 <= C ||psi||^2`.
pub fn kato_bound(d: u32) -> Result<f64> {
    need_d(d)?;
    Ok(PI / (d as f64 - 2.0))
}

/// `|| |x|^{-1} psi_t ||^2` for the normalized Gaussian `pi^{-d/4} e^{-x^2/2}`; the
/// density of `psi_t` is Gaussian with variance `(1 + 4t^2) / 2` per coordinate.
fn gaussian_weighted_norm(d: u32, t: f64, tol: f64) -> Result<f64> {
    let s2 = 1.0 + 4.0 * t * t;
    let sigma = s2.sqrt();
    let pref = sphere_area(d) * (PI * s2).powf(-(d as f64) / 2.0);
    // integrate in r / sigma so the tolerance is relative to the profile
    let density = |r: f64| r.powi(d as i32 - 3) * (-r * r / s2).exp();
    let radial = sigma * integrate_to_infinity(|rho| density(sigma * rho), 0.0, tol)?;
    Ok(pref * radial)
}

/// `int_{-inf}^{inf} dt || |x|^{-1} e^{it Laplacian} psi ||^2` for the unit Gaussian,
/// by nested adaptive quadrature in `t` and `r`.
pub fn gaussian_kato_integral(d: u32, quad_tol: f64) -> Result<f64> {
    gaussian_kato_truncated(d, f64::INFINITY, quad_tol)
}

/// The same time integral restricted to `[-T, T]`.
pub fn gaussian_kato_truncated(d: u32, big_t: f64, quad_tol: f64) -> Result<f64> {
    need_d(d)?;
    if !(big_t >= 0.0) {
        return Err(Error::invalid("time cutoff must be nonnegative"));
    }
    let inner = quad_tol * 1e-3;
    let f = |t: f64| gaussian_weighted_norm(d, t, inner).unwrap_or(f64::NAN);
    let half = if big_t.is_infinite() {
        integrate_to_infinity(f, 0.0, quad_tol / 4.0)?
    } else {
        integrate(f, 0.0, big_t, quad_tol / 4.0)?
    };
    if half.is_nan() {
        return Err(Error::Quadrature("radial integral did not converge".into()));
    }
    Ok(2.0 * half)
}

pub fn gaussian_kato_report(d: u32, quad_tol: f64) -> Result<KatoReport> {
    let computed = gaussian_kato_integral(d, quad_tol)?;
    let bound = kato_bound(d)?;
    Ok(KatoReport { d, gamma: None, computed, bound, abs_err: (computed - bound).abs() })
}

/// `g(v) = 1/2 int_{S^{d-1}} de |e - p / sqrt v|^{-(d-2)}`, which by Newton's theorem
/// is `1/2 |S^{d-1}| min(v, 1)^{(d-2)/2}`.
pub fn newton_g(v: f64, d: u32) -> Result<f64> {
    need_d(d)?;
    if !(v >= 0.0) {
        return Err(Error::invalid(format!("v must be nonnegative, got {v}")));
    }
    Ok(0.5 * sphere_area(d) * v.min(1.0).powf((d as f64 - 2.0) / 2.0))
}

/// `int_{S^{d-1}} de |e - R p|^{-alpha}` by quadrature over the polar angle.
pub fn angular_integral(d: u32, radius: f64, alpha: f64, tol: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::invalid("angular integral needs d >= 2"));
    }
    let r = radius;
    let f = |theta: f64| {
        let half = (0.5 * theta).sin();
        let dist2 = (1.0 - r) * (1.0 - r) + 4.0 * r * half * half;
        theta.sin().powi(d as i32 - 2) * dist2.powf(-alpha / 2.0)
    };
    // split at pi/2 so a singularity at theta = 0 sits on an endpoint
    let v = integrate(f, 0.0, PI / 2.0, tol / 2.0)? + integrate(f, PI / 2.0, PI, tol / 2.0)?;
    Ok(sphere_area(d - 1) * v)
}

/// `newton_g` evaluated by direct angular quadrature.
pub fn newton_g_quadrature(v: f64, d: u32, tol: f64) -> Result<f64> {
    need_d(d)?;
    if !(v > 0.0) {
        return Err(Error::invalid(format!("v must be positive, got {v}")));
    }
    Ok(0.5 * angular_integral(d, 1.0 / v.sqrt(), d as f64 - 2.0, tol)?)
}

/// `sup_{v >= 0} int_{S^{d-1}} de |e - p / sqrt v|^{-(d - 2 gamma)}`, finite for
/// `1/2 < gamma < d/2`. Returns the supremum and the `v` attaining it on a grid
/// refined by golden-section search.
pub fn angular_supremum(d: u32, gamma: f64, tol: f64) -> Result<(f64, f64)> {
    need_d(d)?;
    if !(gamma > 0.5 && gamma < d as f64 / 2.0) {
        return Err(Error::invalid(format!("gamma must lie in (1/2, {}), got {gamma}", d as f64 / 2.0)));
    }
    let alpha = d as f64 - 2.0 * gamma;
    let f = |v: f64| angular_integral(d, 1.0 / v.sqrt(), alpha, tol);
    // v -> infinity gives |S^{d-1}|; v -> 0 gives 0
    let mut best = (sphere_area(d), f64::INFINITY);
    let grid: Vec<f64> = (-40..=40).map(|j| 10f64.powf(j as f64 / 10.0)).collect();
    let mut at = 0;
    for (i, &v) in grid.iter().enumerate() {
        let val = f(v)?;
        if val > best.0 {
            best = (val, v);
            at = i;
        }
    }
    if best.1.is_finite() {
        let (mut lo, mut hi) = (grid[at.saturating_sub(1)].ln(), grid[(at + 1).min(grid.len() - 1)].ln());
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..40 {
            let (x1, x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
            if f(x1.exp())? > f(x2.exp())? {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        let v = (0.5 * (lo + hi)).exp();
        let val = f(v)?;
        if val > best.0 {
            best = (val, v);
        }
    }
    Ok(best)
}

pub fn angular_supremum_report(d: u32, gamma: f64, tol: f64) -> Result<KatoReport> {
    let (computed, _) = angular_supremum(d, gamma, tol)?;
    // no sharp constant is known; report against the value at v = 1
    let bound = angular_integral(d, 1.0, d as f64 - 2.0 * gamma, tol)?;
    Ok(KatoReport { d, gamma: Some(gamma), computed, bound, abs_err: (computed - bound).abs() })
}

/// Constant `pi kappa^2 / 2` of the two-body estimate. In centre of mass
/// coordinates the free two-body Hamiltonian is `-Laplacian_X / 2 - 2 Laplacian_xi`,
/// and the doubled speed in the relative coordinate halves the one-body constant.
pub fn pair_reduction_factor(kappa: f64) -> f64 {
    PI * kappa * kappa / 2.0
}

/// `int_0^t ds || |x|^{-1} e^{is Laplacian} psi ||` for the unit Gaussian.
pub fn gaussian_l1_smoothing(d: u32, t: f64, quad_tol: f64) -> Result<f64> {
    need_d(d)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t must be finite and nonnegative"));
    }
    let inner = quad_tol * 1e-3;
    let v = integrate(|s| gaussian_weighted_norm(d, s, inner).map(f64::sqrt).unwrap_or(f64::NAN), 0.0, t, quad_tol)?;
    if v.is_nan() {
        return Err(Error::Quadrature("radial integral did not converge".into()));
    }
    Ok(v)
}

/// Cauchy-Schwarz bound `sqrt(pi kappa^2 t / 2)` on the time-`L^1` smoothing norm in `d = 3`.
pub fn l1_smoothing_bound(kappa: f64, t: f64) -> f64 {
    (pair_reduction_factor(kappa) * t).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn bound_values() {
        assert_eq!(kato_bound(3).unwrap(), PI);
        assert_eq!(kato_bound(4).unwrap(), PI / 2.0);
        assert!(kato_bound(2).is_err());
    }

    #[test]
    fn newton_examples() {
        assert!((newton_g(4.0, 3).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((newton_g(0.25, 3).unwrap() - PI).abs() < 1e-14);
    }
}
