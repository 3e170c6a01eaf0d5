use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use meanfield_core::dispersive::{angular_supremum_report, gaussian_kato_report, KatoReport};
use meanfield_core::graphs::{catalan, count_structures, distinct_structures, enumerate_class, Limits};
use meanfield_core::lab::{self, ExperimentConfig, Format};
use meanfield_core::Error;

/// Finite-mode mean-field experiments: graph counts, expansions, N-sweeps, Hartree flow, Kato checks.
#[derive(Parser, Debug)]
#[command(name = "meanfield", version)]
struct Cli {
    /// Seed for generated observables and instances; overrides `a_spec.seed` in configs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; `-` or absent means stdout (or the config's `output_path`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    /// Record zero wall times so repeated runs are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Overwrite an existing output file.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Graph structures and Catalan numbers.
    Graphs {
        #[command(subcommand)]
        cmd: GraphsCmd,
    },
    /// Loop expansion against exact evolution.
    Dyn {
        #[command(subcommand)]
        cmd: DynCmd,
    },
    /// Quantum expectation against the Hartree value over an N-sweep.
    Egorov {
        #[command(subcommand)]
        cmd: EgorovCmd,
    },
    /// Trace distance of evolved marginals to the Hartree product state.
    Marginals(ConfigArg),
    /// Hartree trajectory with norm and energy.
    Hartree {
        #[command(subcommand)]
        cmd: HartreeCmd,
    },
    /// Smoothing constants by quadrature.
    Kato {
        #[command(subcommand)]
        cmd: KatoCmd,
    },
}

#[derive(Args, Debug)]
struct ClassArgs {
    /// Particle number of the observable (root vertices).
    #[arg(long)]
    p: usize,
    /// Number of interaction vertices.
    #[arg(long)]
    k: usize,
    /// Number of loops.
    #[arg(long)]
    l: usize,
    /// Number of potential vertices.
    #[arg(long, default_value_t = 0)]
    m: usize,
}

#[derive(Subcommand, Debug)]
enum GraphsCmd {
    /// Count graph structures in a class and compare with the bound.
    Count(ClassArgs),
    /// m-ary Catalan number.
    Catalan {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
    },
    /// List canonical representatives of a class.
    List(ClassArgs),
}

#[derive(Args, Debug)]
struct ConfigArg {
    /// Experiment config (JSON). Without it the two-mode default instance is used.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum DynCmd {
    /// Truncated loop expansion for every (t, N) in the config, with term norms and error.
    Expand(ConfigArg),
}

#[derive(Subcommand, Debug)]
enum EgorovCmd {
    Sweep(ConfigArg),
}

#[derive(Subcommand, Debug)]
enum HartreeCmd {
    Evolve(ConfigArg),
}

#[derive(Subcommand, Debug)]
enum KatoCmd {
    /// Gaussian saturation of the sharp constant, or with `--gamma` the angular supremum.
    Check {
        /// Space dimension, at least 3.
        #[arg(long)]
        d: u32,
        /// Exponent in (1/2, 3/2) of the generalized angular check.
        #[arg(long)]
        gamma: Option<f64>,
        /// Quadrature tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn load(cli: &Cli, arg: &ConfigArg) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &arg.config {
        Some(p) => lab::load_config(p)?,
        None => lab::egorov_default(cli.seed.unwrap_or(0))?,
    };
    if let (Some(seed), Some(_)) = (cli.seed, cfg.a_spec.seed) {
        cfg.a_spec.seed = Some(seed);
    }
    Ok(cfg)
}

fn output_path(cli: &Cli, cfg: Option<&ExperimentConfig>) -> Option<PathBuf> {
    cli.out.clone().or_else(|| cfg.and_then(|c| c.output_path.clone()).map(PathBuf::from))
}

fn write(cli: &Cli, text: &str, path: Option<PathBuf>) -> Result<(), Error> {
    if let Some(p) = &path {
        if p.as_os_str() != "-" && p.exists() && !cli.force {
            return Err(Error::Config {
                path: p.display().to_string(),
                message: "output exists; pass --force to overwrite".into(),
            });
        }
    }
    lab::emit(text, path.as_deref())
}

fn kato_csv(r: &KatoReport) -> Result<String, Error> {
    let gamma = r.gamma.map(|g| format!("{g:?}")).unwrap_or_default();
    lab::table_csv(
        &["d", "gamma", "computed", "bound", "abs_err"],
        &[vec![r.d.to_string(), gamma, format!("{:?}", r.computed), format!("{:?}", r.bound), format!("{:?}", r.abs_err)]],
    )
}

fn run(cli: &Cli) -> Result<(), Error> {
    let format = match cli.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    let csv = format == Format::Csv;
    match &cli.cmd {
        Command::Graphs { cmd } => {
            let text = match cmd {
                GraphsCmd::Count(c) => {
                    let r = count_structures(c.p, c.k, c.l, c.m, Limits::default())?;
                    if csv {
                        lab::table_csv(
                            &["p", "k", "l", "m", "count", "admissible", "closed_form", "bound"],
                            &[vec![
                                r.p.to_string(),
                                r.k.to_string(),
                                r.l.to_string(),
                                r.m.to_string(),
                                r.count.to_string(),
                                r.admissible.to_string(),
                                r.closed_form.clone().unwrap_or_default(),
                                r.bound.clone(),
                            ]],
                        )?
                    } else {
                        lab::to_json(&r)?
                    }
                }
                GraphsCmd::Catalan { m, n } => {
                    let v = catalan(*m, *n)?.to_string();
                    if csv {
                        lab::table_csv(&["m", "n", "value"], &[vec![m.to_string(), n.to_string(), v]])?
                    } else {
                        lab::to_json(&serde_json::json!({ "m": m, "n": n, "value": v }))?
                    }
                }
                GraphsCmd::List(c) => {
                    let graphs = enumerate_class(c.p, c.k, c.l, c.m, Limits::default())?;
                    let mut docs: Vec<_> = distinct_structures(&graphs).iter().map(|g| g.to_doc()).collect();
                    docs.sort_by_key(|d| serde_json::to_string(d).unwrap_or_default());
                    if csv {
                        let rows: Vec<Vec<String>> = docs
                            .iter()
                            .map(|d| vec![serde_json::to_string(&d.kinds).unwrap(), serde_json::to_string(&d.edges).unwrap()])
                            .collect();
                        lab::table_csv(&["kinds", "edges"], &rows)?
                    } else {
                        lab::to_json(&docs)?
                    }
                }
            };
            write(cli, &text, output_path(cli, None))
        }
        Command::Dyn { cmd: DynCmd::Expand(arg) } => {
            let cfg = load(cli, arg)?;
            let reports = lab::run_expansion(&cfg.resolve()?)?;
            let text = if csv { lab::expansion_csv(&reports)? } else { lab::to_json(&reports)? };
            write(cli, &text, output_path(cli, Some(&cfg)))
        }
        Command::Egorov { cmd: EgorovCmd::Sweep(arg) } | Command::Marginals(arg) => {
            let cfg = load(cli, arg)?;
            let exp = cfg.resolve()?;
            let mut sweep = match &cli.cmd {
                Command::Marginals(_) => lab::run_marginal_convergence(&exp)?,
                _ => lab::run_egorov_sweep(&exp)?,
            };
            if cli.deterministic {
                sweep.strip_timing();
            }
            for s in &sweep.slopes {
                eprintln!("t = {}: log-log slope {:.4} over {} values of N", s.t, s.slope, s.points);
            }
            let text = if csv { lab::records_csv(&sweep.records)? } else { lab::to_json(&sweep)? };
            write(cli, &text, output_path(cli, Some(&cfg)))
        }
        Command::Hartree { cmd: HartreeCmd::Evolve(arg) } => {
            let cfg = load(cli, arg)?;
            let traj = lab::run_hartree(&cfg.resolve()?)?;
            let text = if csv {
                lab::trajectory_csv(&traj)?
            } else {
                let rows: Vec<_> = traj
                    .iter()
                    .map(|p| serde_json::json!({ "t": p.t, "norm": p.norm, "energy": p.energy, "psi": p.psi }))
                    .collect();
                lab::to_json(&rows)?
            };
            write(cli, &text, output_path(cli, Some(&cfg)))
        }
        Command::Kato { cmd: KatoCmd::Check { d, gamma, tol } } => {
            let r = match gamma {
                Some(g) => angular_supremum_report(*d, *g, *tol)?,
                None => gaussian_kato_report(*d, *tol)?,
            };
            let text = if csv { kato_csv(&r)? } else { lab::to_json(&r)? };
            write(cli, &text, output_path(cli, None))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } | Error::InvalidArgument(_) | Error::Json(_) => 2,
                Error::Budget { .. } => 3,
                _ => 1,
            })
        }
    }
}
