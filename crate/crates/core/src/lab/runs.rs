use rayon::prelude::*;
use std::time::Instant;

use super::config::Experiment;
use super::records::{ResultRecord, SlopeSummary, Sweep};
use crate::dyson::{loop_expansion_vs_exact, ExpansionReport, PotentialMode};
use crate::fock::{
    build_hamiltonian, check_budget, marginal, product_expectation, quantize, DensityMatrix, QuantizationParams,
    SectorState,
};
use crate::hartree::{HartreeFlow, TrajectoryPoint};
use crate::linalg::{ls_slope, Spectral, C64};
use crate::Result;

/// Fewest `N` values for which a slope is fitted.
pub const MIN_SLOPE_POINTS: usize = 4;

fn budget(exp: &Experiment) -> Result<()> {
    let m = exp.mode_space.modes();
    for &(_, n) in &exp.sizes {
        check_budget(m, n)?;
    }
    Ok(())
}

fn unit(psi: &[C64]) -> Vec<C64> {
    let s = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter().map(|z| z / s).collect()
}

/// Hartree states at every grid time.
fn hartree_states(exp: &Experiment) -> Result<Vec<Vec<C64>>> {
    let flow = HartreeFlow::new(&exp.mode_space);
    Ok(flow.trajectory(&exp.psi0, &exp.t_grid)?.into_iter().map(|p| p.psi).collect())
}

/// Evaluates `job(N, n, t_index, Phi_t)` for every size and grid time, where
/// `Phi_t = e^{-itH_N} (psi0 / |psi0|)^{(x)n}`; sizes run in parallel.
fn over_sizes<F>(exp: &Experiment, job: F) -> Result<Vec<ResultRecord>>
where
    F: Fn(QuantizationParams, usize, &SectorState) -> Result<ResultRecord> + Sync,
{
    budget(exp)?;
    let phi = unit(&exp.psi0);
    let per_size: Vec<Result<Vec<ResultRecord>>> = exp
        .sizes
        .par_iter()
        .map(|&(big_n, n)| {
            let q = QuantizationParams::new(big_n, n)?;
            let start = Instant::now();
            let h = build_hamiltonian(&exp.mode_space, q)?;
            let spectral = Spectral::new(h.matrix());
            let state = SectorState::product(&phi, n)?;
            let setup = start.elapsed().as_secs_f64() * 1e3 / exp.t_grid.len() as f64;
            exp.t_grid
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let start = Instant::now();
                    let evolved = state.evolve(&spectral.propagator(t))?;
                    let mut rec = job(q, i, &evolved)?;
                    rec.wall_ms = setup + start.elapsed().as_secs_f64() * 1e3;
                    Ok(rec)
                })
                .collect()
        })
        .collect();
    // (N, t) order: sizes outer, times inner
    let mut out = Vec::new();
    for r in per_size {
        out.extend(r?);
    }
    Ok(out)
}

fn slopes(exp: &Experiment, records: &[ResultRecord]) -> Vec<SlopeSummary> {
    exp.t_grid
        .iter()
        .filter_map(|&t| {
            let pts: Vec<(f64, f64)> = records
                .iter()
                .filter(|r| r.t == t && r.abs_err > 0.0)
                .map(|r| (r.big_n.ln(), r.abs_err.ln()))
                .collect();
            (pts.len() >= MIN_SLOPE_POINTS).then(|| {
                let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                SlopeSummary { t, slope: ls_slope(&x, &y), points: x.len() }
            })
        })
        .collect()
}

/// `<Phi, e^{itH_N} A_N(a) e^{-itH_N} Phi>` against `A(a)(psi(t))` for every `(N, t)`,
/// with a log-log slope of the error in `N` for each `t`.
pub fn run_egorov_sweep(exp: &Experiment) -> Result<Sweep> {
    let classical = hartree_states(exp)?;
    let records = over_sizes(exp, |q, i, state| {
        let qa = quantize(&exp.a, q)?;
        let lhs = state.expectation(&qa)?;
        let rhs = product_expectation(&exp.a, &classical[i])?;
        Ok(ResultRecord::new(q.big_n(), q.particles(), exp.t_grid[i], lhs, rhs))
    })?;
    let slopes = slopes(exp, &records);
    Ok(Sweep { records, slopes })
}

/// Trace distance between the `p`-particle marginal of the evolved product state and
/// `(|phi(t)><phi(t)|)^{(x)p}` with `phi(t)` the normalized Hartree solution; `p` is the
/// degree of the configured observable, whose expectations fill `lhs` and `rhs`.
pub fn run_marginal_convergence(exp: &Experiment) -> Result<Sweep> {
    let p = exp.a.particles();
    let classical: Vec<Vec<C64>> = hartree_states(exp)?.iter().map(|v| unit(v)).collect();
    let records = over_sizes(exp, |q, i, state| {
        let gamma = marginal(state, p)?;
        let pure = DensityMatrix::product(&classical[i], p);
        let lhs = gamma.expectation(&exp.a)?;
        let rhs = product_expectation(&exp.a, &classical[i])?;
        let mut rec = ResultRecord::new(q.big_n(), q.particles(), exp.t_grid[i], lhs, rhs);
        rec.marginal_trace_dist = Some(gamma.trace_distance(&pure)?);
        Ok(rec)
    })?;
    let slopes = slopes(exp, &records);
    Ok(Sweep { records, slopes })
}

/// Truncated loop expansion against the exact Heisenberg evolution for every `(N, t)`.
pub fn run_expansion(exp: &Experiment) -> Result<Vec<ExpansionReport>> {
    budget(exp)?;
    let jobs: Vec<(f64, usize, f64)> =
        exp.sizes.iter().flat_map(|&(big_n, n)| exp.t_grid.iter().map(move |&t| (big_n, n, t))).collect();
    jobs.par_iter()
        .map(|&(big_n, n, t)| {
            let q = QuantizationParams::new(big_n, n)?;
            Ok(loop_expansion_vs_exact(&exp.mode_space, &exp.a, q, t, exp.orders, PotentialMode::Folded)?.report)
        })
        .collect()
}

/// Hartree trajectory of `psi0` on the time grid.
pub fn run_hartree(exp: &Experiment) -> Result<Vec<TrajectoryPoint>> {
    HartreeFlow::new(&exp.mode_space).trajectory(&exp.psi0, &exp.t_grid)
}
