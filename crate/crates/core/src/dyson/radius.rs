use serde::Serialize;

use crate::{Error, Result};

/// Inputs for the convergence thresholds. At least one coupling is required.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusParams {
    /// `||w||_inf` of a bounded interaction.
    pub w_norm: Option<f64>,
    /// Strength of a Coulomb interaction `kappa / |x|`.
    pub kappa: Option<f64>,
    /// Density `nu = ||psi||^2`.
    pub nu: f64,
}

/// Thresholds below which the expansion converges, and optionally the
/// position of a given time relative to them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusReport {
    /// `1 / (8 nu ||w||)`.
    pub bounded_threshold: Option<f64>,
    /// `1 / (128 pi kappa^2 nu^2)`.
    pub coulomb_radius: Option<f64>,
    /// `8 nu ||w|| t`, the ratio of the geometric tail.
    pub smallness: Option<f64>,
    pub above_threshold: bool,
    /// `x^{K+1} / (1 - x) (2 nu)^p ||a||` with `x` the smallness; infinite when `x >= 1`.
    pub tail_estimate: Option<f64>,
}

pub fn radius(params: RadiusParams) -> Result<RadiusReport> {
    let RadiusParams { w_norm, kappa, nu } = params;
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::invalid(format!("nu must be positive, got {nu}")));
    }
    if w_norm.is_none() && kappa.is_none() {
        return Err(Error::invalid("need a bounded coupling or a Coulomb strength"));
    }
    if w_norm.is_some_and(|w| !(w >= 0.0)) || kappa.is_some_and(|k| !(k > 0.0)) {
        return Err(Error::invalid("couplings must be nonnegative"));
    }
    Ok(RadiusReport {
        bounded_threshold: w_norm.map(|w| 1.0 / (8.0 * nu * w)),
        coulomb_radius: kappa.map(|k| 1.0 / (128.0 * std::f64::consts::PI * k * k * nu * nu)),
        smallness: None,
        above_threshold: false,
        tail_estimate: None,
    })
}

impl RadiusReport {
    /// Fill in the smallness and tail for time `t`, truncation `K`, an observable
    /// on `p` particles with norm `a_norm`.
    pub fn at_time(mut self, t: f64, k_max: usize, p: usize, a_norm: f64) -> Self {
        if let Some(th) = self.bounded_threshold {
            let x = t / th;
            let nu = 1.0 / (8.0 * th);
            self.smallness = Some(x);
            self.above_threshold = x >= 1.0;
            self.tail_estimate = Some(if x < 1.0 {
                x.powi(k_max as i32 + 1) / (1.0 - x) * (2.0 * nu).powi(p as i32) * a_norm
            } else {
                f64::INFINITY
            });
        } else if let Some(rho) = self.coulomb_radius {
            let x = (t / rho).sqrt();
            self.smallness = Some(x);
            self.above_threshold = x >= 1.0;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_values() {
        let r = radius(RadiusParams { w_norm: Some(1.0), kappa: Some(1.0), nu: 1.0 }).unwrap();
        assert_eq!(r.bounded_threshold, Some(0.125));
        assert!((r.coulomb_radius.unwrap() - 1.0 / (128.0 * std::f64::consts::PI)).abs() < 1e-18);
        let r = r.at_time(0.2, 3, 1, 1.0);
        assert!(r.above_threshold);
        assert!(radius(RadiusParams { w_norm: None, kappa: None, nu: 1.0 }).is_err());
        assert!(radius(RadiusParams { w_norm: Some(1.0), kappa: None, nu: 0.0 }).is_err());
    }
}
