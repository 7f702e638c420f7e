//! Single experiments and parameter sweeps.

use crate::config::{CodeKind, ExperimentConfig, KernelSpec, ModelKind};
use crate::error::{CliError, CliResult};
use crate::output::Table;
use cqec_core::codes::ClassPartition;
use cqec_core::lindblad::{fidelity_markov_1q, MarkovPropagator};
use cqec_core::pmme::{pmme_propagate, xi_chi_closed_form};
use cqec_core::xxbath::{simulate_xx_code, xx_coefficients};
use cqec_core::{BasisConvention, CqecError, DensityMatrix, MarkovModel, PmmeModel, SystemState, XXModel};
use rayon::prelude::*;

fn class_columns(code: CodeKind) -> CliResult<Vec<String>> {
    let part = ClassPartition::for_code(&code.code())?;
    Ok(part.classes.iter().map(|c| format!("q_{}", c.label)).collect())
}

fn with_prefix(prefix: &[&str], rest: Vec<String>) -> Vec<String> {
    prefix.iter().map(|s| s.to_string()).chain(rest).collect()
}

fn class_table(code: CodeKind, grid: &[f64], states: Vec<Vec<f64>>) -> CliResult<Table> {
    let mut t = Table::new(with_prefix(&["t", "fidelity"], class_columns(code)?));
    for (time, q) in grid.iter().zip(states) {
        let mut row = vec![*time, q[0] + q[1]];
        row.extend(q);
        t.rows.push(row);
    }
    Ok(t)
}

fn pmme_1q(cfg: &ExperimentConfig, grid: &[f64]) -> CliResult<Table> {
    let (gamma, eta) = (cfg.rate("gamma"), cfg.rate("eta"));
    let mut t = Table::new(with_prefix(&["t", "fidelity", "xi", "chi"], vec![]));
    if let KernelSpec::Exponential { a, c } = cfg.kernel {
        let closed: Result<Vec<(f64, f64)>, CqecError> = grid.iter().map(|&x| xi_chi_closed_form(a, c, gamma, eta, x)).collect();
        match closed {
            Ok(v) => {
                for (time, (xi, chi)) in grid.iter().zip(v) {
                    t.rows.push(vec![*time, 0.5 * (1.0 + xi) + chi, xi, chi]);
                }
                return Ok(t);
            }
            Err(CqecError::Numerical(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    // y₀ = z₀ = 1 (not a state, but the map is linear): y = ξ/2, z = ξ/2 + χ
    let model = PmmeModel::for_code(&cqec_core::one_qubit_code(), gamma, eta, cfg.kernel.build()?)?;
    let sol = pmme_propagate(&model, &[0.5, 0.0, 0.5, 0.5], grid)?;
    if let Some(n) = &sol.notice {
        eprintln!("notice: {n}");
    }
    for (time, v) in grid.iter().zip(&sol.states) {
        let xi = 2.0 * v[2];
        let chi = v[3] - v[2];
        t.rows.push(vec![*time, 0.5 * (1.0 + xi) + chi, xi, chi]);
    }
    Ok(t)
}

/// Runs one experiment on its own time grid.
pub fn simulate(cfg: &ExperimentConfig) -> CliResult<Table> {
    cfg.validate()?;
    let grid = cfg.time_grid();
    let code = cfg.code.code();
    match (cfg.model, cfg.code) {
        (ModelKind::Markov, CodeKind::Q1) => {
            let (g, e) = (cfg.rate("gamma"), cfg.rate("eta"));
            let mut t = Table::new(with_prefix(&["t", "fidelity"], vec![]));
            t.rows = grid.iter().map(|&x| vec![x, fidelity_markov_1q(g, e, x)]).collect();
            Ok(t)
        }
        (ModelKind::Markov, _) => {
            let model = MarkovModel::for_code(code, cfg.rate("gamma"), cfg.rate("eta"))?;
            let prop = MarkovPropagator::new(&model, BasisConvention::ErrorClass)?;
            let k = prop.liouvillian.dim();
            let states = prop.propagate_grid(&SystemState::no_error(k), &grid)?;
            let qs = states.iter().map(|s| s.as_classes().expect("class state").to_vec()).collect();
            class_table(cfg.code, &grid, qs)
        }
        (ModelKind::Xx, CodeKind::Q1) => {
            let (a, k, e) = (cfg.rate("alpha"), cfg.rate("kappa"), cfg.rate("eta"));
            let mut t = Table::new(with_prefix(&["t", "fidelity", "C", "D"], vec![]));
            for &x in &grid {
                let (c, d) = xx_coefficients(a, k, e, x);
                t.rows.push(vec![x, 0.5 * (1.0 + c + d), c, d]);
            }
            Ok(t)
        }
        (ModelKind::Xx, _) => {
            let model = XXModel::new(code.clone(), cfg.rate("alpha"), cfg.rate("kappa"), cfg.rate("eta"))?;
            let tr = simulate_xx_code(&model, &DensityMatrix::basis_state(code.n, 0), &grid)?;
            let mut t = Table::new(with_prefix(&["t", "fidelity", "trace"], vec![]));
            for i in 0..grid.len() {
                t.rows.push(vec![grid[i], tr.fidelity[i], tr.trace[i]]);
            }
            Ok(t)
        }
        (ModelKind::Pmme, CodeKind::Q1) => pmme_1q(cfg, &grid),
        (ModelKind::Pmme, _) => {
            let model = PmmeModel::for_code(&code, cfg.rate("gamma"), cfg.rate("eta"), cfg.kernel.build()?)?;
            let mut q0 = vec![0.0; model.dim()];
            q0[0] = 1.0;
            let sol = pmme_propagate(&model, &q0, &grid)?;
            if let Some(n) = &sol.notice {
                eprintln!("notice: {n}");
            }
            class_table(cfg.code, &grid, sol.states)
        }
    }
}

/// Worker count from `CQEC_THREADS`, or rayon's default when unset.
pub fn thread_count() -> CliResult<Option<usize>> {
    match std::env::var("CQEC_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("CQEC_THREADS must be a positive integer, got '{v}'"))),
        },
    }
}

/// Maps `f` over `items` on a pool sized by `CQEC_THREADS`, keeping order.
pub fn parallel_map<T, R, F>(items: &[T], f: F) -> CliResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> CliResult<R> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

/// One row per (axis value, t), axis values ascending.
pub fn sweep(cfg: &ExperimentConfig, axis: &str, values: &[f64]) -> CliResult<Table> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one axis value".into()));
    }
    let mut vals = values.to_vec();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage("sweep values must be finite".into()));
    }
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    let configs = vals.iter().map(|&v| cfg.with_axis(axis, v)).collect::<CliResult<Vec<_>>>()?;
    let tables = parallel_map(&configs, simulate)?;
    let mut out = Table::new(std::iter::once(axis.to_string()).chain(tables[0].columns.iter().cloned()).collect());
    for (v, t) in vals.iter().zip(tables) {
        for row in t.rows {
            out.rows.push(std::iter::once(*v).chain(row).collect());
        }
    }
    Ok(out)
}
