//! Parallel sweeps and the `simulate` command.

use std::path::Path;

use exchange_lab_core::cumulant::validate_grid;
use exchange_lab_core::{CumulantConfig, Error as CoreError, ExchangeEngine, InitialState, ModelSpec, TimeSeries};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::LabError;
use crate::output;

pub const THREADS_VAR: &str = "EXCHANGE_LAB_THREADS";

/// Pool size from `EXCHANGE_LAB_THREADS`; unset or 0 means one per core.
pub fn thread_count() -> Result<usize, LabError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| LabError::Schema(format!("{THREADS_VAR}={v:?} is not a thread count"))),
    }
}

pub fn pool() -> Result<rayon::ThreadPool, LabError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| LabError::Schema(format!("thread pool: {e}")))
}

/// Evaluates each grid point independently and keeps grid order, so the
/// result does not depend on the thread count. The first failing point in
/// grid order is reported.
pub fn parallel_sweep(
    model: &ModelSpec,
    state: &InitialState,
    t_grid: &[f64],
    cfg: &CumulantConfig,
) -> Result<TimeSeries, CoreError> {
    validate_grid(t_grid)?;
    let engine = ExchangeEngine::new(model, state, *cfg)?;
    let results: Vec<_> = t_grid.par_iter().map(|&t| engine.sample(t)).collect();
    let samples = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(TimeSeries::from_samples(&engine, &samples))
}

pub fn run(cfg: &RunConfig) -> Result<TimeSeries, LabError> {
    let (model, state) = cfg.build()?;
    let grid = cfg.grid.points();
    let cumulant = cfg.numerics.cumulant();
    pool()?.install(|| parallel_sweep(&model, &state, &grid, &cumulant)).map_err(LabError::Numeric)
}

pub fn cmd_simulate(config: &Path, out: Option<&Path>) -> Result<(), LabError> {
    let cfg = RunConfig::load(config)?;
    let ts = run(&cfg)?;
    let text = output::render(&ts, cfg.output.format);
    let path = out.map(Path::to_path_buf).or_else(|| cfg.output.path.as_ref().map(Into::into));
    output::emit(&text, path.as_deref())
}
