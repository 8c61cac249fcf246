//! Experiment drivers. Samples run on a rayon pool of the requested size; results are
//! collected in sample order and reduced sequentially, so outputs do not depend on the
//! number of workers.

use rayon::prelude::*;
use tfspde_core::bench::{
    collect_records, fit_records, predicted_spatial_rate, predicted_temporal_rate, spatial_sample, temporal_sample,
    ErrorRecord, RateFit, TemporalLadder,
};
use tfspde_core::fem::FemOperator;
use tfspde_core::mlop::MLPropagator;
use tfspde_core::noise::{sample_path, NoisePath, TimeGrid};
use tfspde_core::scheme::{required_times, wellposedness_advisory, Advisory, Record, Stepper, Trajectory};

use crate::config::{Resolved, RunConfig};
use crate::error::AppError;

pub fn pool(workers: usize) -> Result<rayon::ThreadPool, AppError> {
    if workers == 0 {
        return Err(AppError::Validation("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| AppError::Failed(format!("thread pool: {e}")))
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn advisory(resolved: &Resolved, op: &MLPropagator) -> Advisory {
    wellposedness_advisory(&resolved.problem, op.decomposition().min_real_part())
}

fn propagator(resolved: &Resolved, op: &FemOperator, times: &[f64]) -> Result<MLPropagator, AppError> {
    let mut p = MLPropagator::from_operator(resolved.problem.alpha, op)?;
    p.warm(times)?;
    Ok(p)
}

pub struct SolveOutcome {
    pub op: FemOperator,
    pub path: NoisePath,
    pub trajectory: Trajectory,
    pub advisory: Advisory,
}

/// One trajectory of the configured problem on the configured mesh.
pub fn solve(cfg: &RunConfig) -> Result<SolveOutcome, AppError> {
    let resolved = cfg.resolve()?;
    let op = resolved.spatial.operator(cfg.mesh.n_cells).map_err(AppError::validation)?;
    let grid = TimeGrid::new(resolved.problem.horizon, cfg.solve.steps).map_err(AppError::validation)?;
    let prop = propagator(&resolved, &op, &required_times(&grid))?;
    let stepper = Stepper::new(&resolved.problem, &op, &prop)?;
    let p = &resolved.problem;
    let path = sample_path(&p.wiener, &p.jumps, grid, cfg.seed, cfg.solve.sample_index);
    let record = match cfg.solve.record_every {
        0 => Record::Final,
        1 => Record::All,
        k => Record::Every(k),
    };
    let trajectory = stepper.run(&path, record)?;
    let advisory = advisory(&resolved, &prop);
    Ok(SolveOutcome { op, path, trajectory, advisory })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Time,
    Space,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Time => "time",
            Kind::Space => "space",
        }
    }
}

pub struct ExperimentOutcome {
    pub kind: Kind,
    pub records: Vec<ErrorRecord>,
    pub fit: RateFit,
    pub predicted_rate: f64,
    pub aborted: Vec<(u64, String)>,
    pub advisory: Advisory,
}

/// Strong error against the finest step size on shared noise paths, mesh fixed.
pub fn converge_time(cfg: &RunConfig, workers: usize) -> Result<ExperimentOutcome, AppError> {
    let resolved = cfg.resolve()?;
    let e = &cfg.experiment;
    let ladder = TemporalLadder::new(e.time_reference, e.time_ladder.clone()).map_err(AppError::validation)?;
    if ladder.steps.last() == Some(&ladder.reference_steps) && ladder.steps.len() > 1 {
        return Err(AppError::Validation("the reference must be finer than every ladder entry".into()));
    }
    let op = resolved.spatial.operator(cfg.mesh.n_cells).map_err(AppError::validation)?;
    let horizon = resolved.problem.horizon;
    let prop = propagator(&resolved, &op, &ladder.required_times(horizon)?)?;
    let stepper = Stepper::new(&resolved.problem, &op, &prop)?;
    let pool = pool(workers)?;
    let rows: Vec<_> = pool.install(|| {
        (0..e.samples as u64)
            .into_par_iter()
            .map(|s| temporal_sample(&resolved.problem, &stepper, &op, &ladder, cfg.seed, s))
            .collect()
    });
    let resolutions: Vec<f64> = ladder.steps.iter().map(|&s| horizon / s as f64).collect();
    let collected = collect_records(&resolutions, rows)?;
    let fit = fit_records(&collected.records)?;
    Ok(ExperimentOutcome {
        kind: Kind::Time,
        predicted_rate: predicted_temporal_rate(resolved.problem.alpha, e.beta),
        records: collected.records,
        fit,
        aborted: collected.aborted,
        advisory: advisory(&resolved, &prop),
    })
}

/// Strong error against the finest nested mesh on shared noise paths, step fixed.
pub fn converge_space(cfg: &RunConfig, workers: usize) -> Result<ExperimentOutcome, AppError> {
    let resolved = cfg.resolve()?;
    let e = &cfg.experiment;
    if e.space_ladder.is_empty() {
        return Err(AppError::Validation("empty mesh ladder".into()));
    }
    for w in e.space_ladder.windows(2) {
        if w[1] <= w[0] {
            return Err(AppError::Validation("mesh ladder cell counts must strictly increase".into()));
        }
    }
    if e.space_ladder.iter().any(|&n| n < 2 || n >= e.space_reference || e.space_reference % n != 0) {
        return Err(AppError::Validation(format!(
            "every ladder mesh must be at least 2 cells and nest strictly in the {}-cell reference",
            e.space_reference
        )));
    }
    let grid = TimeGrid::new(resolved.problem.horizon, e.space_steps).map_err(AppError::validation)?;
    let times = required_times(&grid);
    let spatial = &resolved.spatial;
    let ref_op = spatial.operator(e.space_reference).map_err(AppError::validation)?;
    let ref_prop = propagator(&resolved, &ref_op, &times)?;
    let ref_stepper = Stepper::new(&resolved.problem, &ref_op, &ref_prop)?;
    let ops = e.space_ladder.iter().map(|&n| spatial.operator(n).map_err(AppError::validation)).collect::<Result<Vec<_>, _>>()?;
    let props = ops.iter().map(|op| propagator(&resolved, op, &times)).collect::<Result<Vec<_>, _>>()?;
    let steppers = ops
        .iter()
        .zip(&props)
        .map(|(op, p)| Stepper::new(&resolved.problem, op, p))
        .collect::<Result<Vec<_>, _>>()?;
    let coarse: Vec<(&FemOperator, &Stepper<'_>)> = ops.iter().zip(&steppers).collect();
    let pool = pool(workers)?;
    let rows: Vec<_> = pool.install(|| {
        (0..e.samples as u64)
            .into_par_iter()
            .map(|s| spatial_sample(&resolved.problem, &coarse, (&ref_op, &ref_stepper), grid, cfg.seed, s))
            .collect()
    });
    let length = spatial.b - spatial.a;
    let resolutions: Vec<f64> = e.space_ladder.iter().map(|&n| length / n as f64).collect();
    let collected = collect_records(&resolutions, rows)?;
    let fit = fit_records(&collected.records)?;
    Ok(ExperimentOutcome {
        kind: Kind::Space,
        predicted_rate: predicted_spatial_rate(e.beta),
        records: collected.records,
        fit,
        aborted: collected.aborted,
        advisory: advisory(&resolved, &ref_prop),
    })
}
