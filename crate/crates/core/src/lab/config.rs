use serde::{Deserialize, Serialize};
use std::path::Path;

use super::random::random_observable;
use crate::dyson::ExpansionOrder;
use crate::fock::{sector_dim, unflatten, ModeSpace, ModeSpaceDoc, SectorOperator};
use crate::linalg::C64;
use crate::{Error, Result};

/// Observable either given explicitly (row-major `[re, im]` pairs) or drawn from a seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<C64>>,
}

/// Experiment description as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode_space: ModeSpaceDoc,
    pub psi0: Vec<C64>,
    pub a_spec: ObservableSpec,
    pub t_grid: Vec<f64>,
    #[serde(rename = "N_list")]
    pub n_list: Vec<f64>,
    pub nu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<ExpansionOrder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

/// A validated config with its objects built.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub mode_space: ModeSpace,
    pub psi0: Vec<C64>,
    pub a: SectorOperator,
    pub t_grid: Vec<f64>,
    /// `(N, n)` with `n = nu N`.
    pub sizes: Vec<(f64, usize)>,
    pub nu: f64,
    pub orders: ExpansionOrder,
    pub output_path: Option<String>,
}

pub const DEFAULT_ORDERS: ExpansionOrder = ExpansionOrder { k_max: 4, l_max: 2, quad_order: 4 };

const NORM_TOL: f64 = 1e-10;

/// Parse a config from JSON; schema violations carry the offending field path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let path = if path == "." { "(root)".to_string() } else { path };
        Error::config(path, inner.to_string())
    })
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::config(path.as_ref().display().to_string(), e.to_string()))?;
    parse_config(&text)
}

/// Canonical serialization: fixed field order, pretty printed, trailing newline.
pub fn to_canonical_json(cfg: &ExperimentConfig) -> Result<String> {
    Ok(serde_json::to_string_pretty(cfg)? + "\n")
}

impl ExperimentConfig {
    /// Check the documented invariants and build the mode space and observable.
    pub fn resolve(&self) -> Result<Experiment> {
        let mode_space = ModeSpace::from_doc(&self.mode_space).map_err(|e| Error::config("mode_space", e.to_string()))?;
        let m = mode_space.modes();
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::config("nu", format!("must be positive, got {}", self.nu)));
        }
        if self.psi0.len() != m {
            return Err(Error::config("psi0", format!("expected {m} entries, got {}", self.psi0.len())));
        }
        let norm2: f64 = self.psi0.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - self.nu).abs() > NORM_TOL * self.nu.max(1.0) {
            return Err(Error::config("psi0", format!("|psi0|^2 = {norm2} must equal nu = {}", self.nu)));
        }
        if self.t_grid.is_empty() {
            return Err(Error::config("t_grid", "must not be empty"));
        }
        for (i, &t) in self.t_grid.iter().enumerate() {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::config(format!("t_grid[{i}]"), format!("must be finite and nonnegative, got {t}")));
            }
            if i > 0 && t <= self.t_grid[i - 1] {
                return Err(Error::config(format!("t_grid[{i}]"), "grid must be strictly increasing"));
            }
        }
        if self.n_list.is_empty() {
            return Err(Error::config("N_list", "must not be empty"));
        }
        let mut sizes = Vec::with_capacity(self.n_list.len());
        for (i, &big_n) in self.n_list.iter().enumerate() {
            let n = self.nu * big_n;
            if !(big_n > 0.0) || (n - n.round()).abs() > 1e-9 || n.round() < 1.0 {
                return Err(Error::config(
                    format!("N_list[{i}]"),
                    format!("nu * N must be a positive integer, got {n}"),
                ));
            }
            sizes.push((big_n, n.round() as usize));
        }
        let a = self.observable(m)?;
        let orders = match self.orders {
            Some(o) => ExpansionOrder::new(o.k_max, o.l_max, o.quad_order).map_err(|e| Error::config("orders", e.to_string()))?,
            None => DEFAULT_ORDERS,
        };
        Ok(Experiment {
            mode_space,
            psi0: self.psi0.clone(),
            a,
            t_grid: self.t_grid.clone(),
            sizes,
            nu: self.nu,
            orders,
            output_path: self.output_path.clone(),
        })
    }

    fn observable(&self, m: usize) -> Result<SectorOperator> {
        let spec = &self.a_spec;
        if spec.p == 0 {
            return Err(Error::config("a_spec.p", "must be at least 1"));
        }
        match (&spec.seed, &spec.matrix) {
            (Some(seed), None) => random_observable(*seed, spec.p, m),
            (None, Some(flat)) => {
                let d = sector_dim(m, spec.p);
                let mat = unflatten(flat, d).map_err(|e| Error::config("a_spec.matrix", e))?;
                SectorOperator::new(m, spec.p, mat).map_err(|e| Error::config("a_spec.matrix", e.to_string()))
            }
            _ => Err(Error::config("a_spec", "give exactly one of `seed` and `matrix`")),
        }
    }
}
