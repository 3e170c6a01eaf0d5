use serde::{Deserialize, Serialize};

use super::quadrature::{nested_simplex, GaussLegendre};
use super::radius::{radius, RadiusParams, RadiusReport};
use super::terms::{Expansion, Family, PotentialMode};
use crate::fock::{build_hamiltonian, quantize, ModeSpace, QuantizationParams, SectorOperator};
use crate::linalg::{max_abs_diff, propagator, spectral_norm, CMat, C64};
use crate::{Error, Result};

/// `e^{itH_N} A_N(a) e^{-itH_N}` on the `n`-particle sector, by dense diagonalization.
pub fn heisenberg_exact(ms: &ModeSpace, a: &SectorOperator, q: QuantizationParams, t: f64) -> Result<SectorOperator> {
    if a.modes() != ms.modes() {
        return Err(Error::mismatch("observable and mode space have different mode counts"));
    }
    let h = build_hamiltonian(ms, q)?;
    let u = propagator(h.matrix(), t);
    let qa = quantize(a, q)?;
    SectorOperator::new(ms.modes(), q.particles(), u.adjoint() * qa.matrix() * u)
}

/// Truncation of the loop expansion: orders `k <= K`, loops `l < L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionOrder {
    #[serde(rename = "K")]
    pub k_max: usize,
    #[serde(rename = "L")]
    pub l_max: usize,
    pub quad_order: usize,
}

impl ExpansionOrder {
    pub fn new(k_max: usize, l_max: usize, quad_order: usize) -> Result<Self> {
        if l_max == 0 || l_max > k_max + 1 {
            return Err(Error::invalid(format!("need 1 <= L <= K + 1, got K={k_max} L={l_max}")));
        }
        if quad_order == 0 {
            return Err(Error::invalid("quad_order must be positive"));
        }
        Ok(ExpansionOrder { k_max, l_max, quad_order })
    }

    /// All loops up to order `K`.
    pub fn full(k_max: usize, quad_order: usize) -> Self {
        ExpansionOrder { k_max, l_max: k_max + 1, quad_order }
    }
}

/// Operator norm of one integrated expansion coefficient.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermNorm {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub particles: usize,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    #[serde(rename = "K")]
    pub k_max: usize,
    #[serde(rename = "L")]
    pub l_max: usize,
    #[serde(rename = "N")]
    pub big_n: f64,
    pub n: usize,
    pub t: f64,
    pub thresholds: RadiusReport,
    /// `||int G^{(k,l,m)}||` for every retained coefficient.
    #[serde(rename = "per_(k,l)_norms")]
    pub per_kl_norms: Vec<TermNorm>,
    /// Norm on the `n`-sector of the order-`k` contribution `sum_l N^{-l} A_N(G^{(k,l)})`.
    pub order_norms: Vec<f64>,
    /// Max-entry distance to the exact Heisenberg evolution, when computed.
    pub error_vs_exact: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ExpansionResult {
    pub operator: SectorOperator,
    /// Integrated coefficients, one family per order `k`.
    pub coefficients: Vec<Family>,
    pub report: ExpansionReport,
}

/// `sum_{k <= K} sum_{l < L} N^{-l} A_N(int_{t > t_1 > ... > t_k > 0} G^{(k,l)})`.
///
/// Coefficients that cannot act on `n` particles are skipped.
pub fn loop_expansion(
    ms: &ModeSpace,
    a: &SectorOperator,
    q: QuantizationParams,
    t: f64,
    order: ExpansionOrder,
    mode: PotentialMode,
) -> Result<ExpansionResult> {
    if a.modes() != ms.modes() {
        return Err(Error::mismatch("observable and mode space have different mode counts"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("t must be finite and nonnegative, got {t}")));
    }
    crate::fock::check_budget(ms.modes(), q.particles())?;
    let rule = GaussLegendre::new(order.quad_order)?;
    let ex = Expansion::new(ms, a.particles(), mode, order.l_max - 1, Some(q.particles()));
    let init = ex.initial(a, t);
    let coefficients = nested_simplex(order.k_max, t, &rule, init, |f, j, u| ex.step(f, j, u));

    let d = crate::fock::sector_dim(ms.modes(), q.particles());
    let mut total = CMat::zeros(d, d);
    let mut per_kl_norms = Vec::new();
    let mut order_norms = Vec::new();
    for (k, fam) in coefficients.iter().enumerate() {
        let mut term = CMat::zeros(d, d);
        for (l, m, g) in fam.iter() {
            let particles = a.particles() + k - l - m;
            per_kl_norms.push(TermNorm { k, l, m, particles, norm: spectral_norm(g) });
            let op = SectorOperator::new(ms.modes(), particles, g.clone())?;
            term += quantize(&op, q)?.matrix() * C64::from(q.big_n().powi(-(l as i32)));
        }
        order_norms.push(spectral_norm(&term));
        total += term;
    }
    let thresholds = radius(RadiusParams { w_norm: Some(ms.interaction_norm()), kappa: None, nu: q.nu() })?
        .at_time(t, order.k_max, a.particles(), spectral_norm(a.matrix()));
    let report = ExpansionReport {
        k_max: order.k_max,
        l_max: order.l_max,
        big_n: q.big_n(),
        n: q.particles(),
        t,
        thresholds,
        per_kl_norms,
        order_norms,
        error_vs_exact: None,
    };
    Ok(ExpansionResult { operator: SectorOperator::new(ms.modes(), q.particles(), total)?, coefficients, report })
}

/// [`loop_expansion`] plus the comparison with [`heisenberg_exact`].
pub fn loop_expansion_vs_exact(
    ms: &ModeSpace,
    a: &SectorOperator,
    q: QuantizationParams,
    t: f64,
    order: ExpansionOrder,
    mode: PotentialMode,
) -> Result<ExpansionResult> {
    let mut res = loop_expansion(ms, a, q, t, order, mode)?;
    let exact = heisenberg_exact(ms, a, q, t)?;
    res.report.error_vs_exact = Some(max_abs_diff(res.operator.matrix(), exact.matrix()));
    Ok(res)
}
