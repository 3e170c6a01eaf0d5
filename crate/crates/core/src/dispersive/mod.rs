//! Quadrature checks of the dispersive inputs: the sharp Kato smoothing
//! constant on Gaussians, Newton's angular integral and the two-body factor.

mod kato;
mod quadrature;

pub use kato::{
    angular_integral, angular_supremum, angular_supremum_report, gaussian_kato_integral, gaussian_kato_report,
    gaussian_kato_truncated, gaussian_l1_smoothing, half_gamma, kato_bound, l1_smoothing_bound, newton_g,
    newton_g_quadrature, pair_reduction_factor, sphere_area, KatoQuery, KatoReport,
};
pub use quadrature::{integrate, integrate_to_infinity, MAX_INTERVALS};
