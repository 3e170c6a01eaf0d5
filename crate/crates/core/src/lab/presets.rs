use super::config::{ExperimentConfig, ObservableSpec};
use super::random::{random_mode_space, random_vector};
use crate::Result;

/// Two modes, `||h|| = ||W|| = 1`, a seeded one-particle observable, `t = 0.2`,
/// `N in {4, 8, 16, 32}` and the coherent-state profile `nu = 1`, `|psi0| = 1`.
pub fn egorov_default(seed: u64) -> Result<ExperimentConfig> {
    let ms = random_mode_space(seed, 2, 1.0)?;
    Ok(ExperimentConfig {
        mode_space: ms.to_doc(),
        psi0: random_vector(seed, 2, 1.0),
        a_spec: ObservableSpec { p: 1, seed: Some(seed), matrix: None },
        t_grid: vec![0.2],
        n_list: vec![4.0, 8.0, 16.0, 32.0],
        nu: 1.0,
        orders: None,
        output_path: None,
    })
}
