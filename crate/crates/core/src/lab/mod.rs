//! Experiment plumbing: JSON configs, seeded instances, the `N`-sweeps that
//! compare quantum and Hartree dynamics, and CSV/JSON output.

mod config;
mod presets;
mod random;
mod records;
mod runs;

pub use config::{
    load_config, parse_config, to_canonical_json, Experiment, ExperimentConfig, ObservableSpec, DEFAULT_ORDERS,
};
pub use presets::egorov_default;
pub use random::{random_mode_space, random_observable, random_vector, stream};
pub use records::{
    emit, emit_results, expansion_csv, read_records_csv, records_csv, table_csv, to_json, trajectory_csv, Format,
    ResultRecord,
    SlopeSummary, Sweep, RECORD_COLUMNS,
};
pub use runs::{run_egorov_sweep, run_expansion, run_hartree, run_marginal_convergence, MIN_SLOPE_POINTS};
