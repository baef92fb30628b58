//! The Bayesian optimization loop: observe the initial points, then for a
//! fixed budget fit the GP, maximize the acquisition, and observe the
//! proposal.

use serde::{Deserialize, Serialize};

use crate::acquisition::{AcquisitionConfig, Incumbent};
use crate::error::{Error, Result};
use crate::gp::{Dataset, GpPosterior};
use crate::kernel::KernelParams;
use crate::objective::{stream_rng, NoisyObjective, RESTART_STREAM};
use crate::optimize::{propose_next_sample, Bounds, Method, OptimizerReport, OptimizerSettings};

/// Points per GP snapshot series.
pub const SNAPSHOT_POINTS: usize = 500;

/// Something that can be observed at a point, possibly noisily.
pub trait BlackBox {
    fn dim(&self) -> usize;
    fn noise_variance(&self) -> f64;
    fn observe(&mut self, x: &[f64]) -> Result<f64>;
}

impl BlackBox for NoisyObjective {
    fn dim(&self) -> usize {
        1
    }

    fn noise_variance(&self) -> f64 {
        NoisyObjective::noise_variance(self)
    }

    fn observe(&mut self, x: &[f64]) -> Result<f64> {
        Error::check_dim(1, x.len())?;
        self.evaluate_noisy(x[0])
    }
}

/// Hooks into a running loop, e.g. for instrumentation.
pub trait RunObserver {
    fn on_fit(&mut self, _n_observations: usize) {}
    fn on_trial(&mut self, _trial: &TrialRecord) {}
}

impl RunObserver for () {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoConfig {
    pub acquisition: AcquisitionConfig,
    pub method: Method,
    pub iterations: usize,
    pub initial_points: Vec<Vec<f64>>,
    pub bounds: Bounds,
    pub noise_std: f64,
    pub kernel: KernelParams,
    pub optimizer: OptimizerSettings,
    pub n_restarts: usize,
    pub seed: u64,
}

impl Default for BoConfig {
    fn default() -> Self {
        Self {
            acquisition: AcquisitionConfig::default(),
            method: Method::Lbfgs,
            iterations: 10,
            initial_points: vec![vec![-0.9], vec![0.9]],
            bounds: Bounds::interval(-2.0, 2.0).expect("valid default bounds"),
            noise_std: 0.2,
            kernel: KernelParams::default(),
            optimizer: OptimizerSettings::default(),
            n_restarts: 25,
            seed: 42,
        }
    }
}

impl BoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::contract("iterations must be at least 1"));
        }
        if self.initial_points.is_empty() {
            return Err(Error::contract("at least one initial point is required"));
        }
        if let Some(p) = self.initial_points.iter().find(|p| !self.bounds.contains(p)) {
            return Err(Error::contract(format!("initial point {p:?} lies outside the bounds")));
        }
        if self.n_restarts == 0 {
            return Err(Error::contract("n_restarts must be at least 1"));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::contract(format!("invalid noise_std {}", self.noise_std)));
        }
        Error::check_dim(self.bounds.dim(), self.kernel.dim())?;
        AcquisitionConfig::new(self.acquisition.kind, self.acquisition.xi)?;
        self.optimizer.validate()
    }

    /// Objective whose noise comes from this config's noise stream.
    pub fn objective(&self) -> Result<NoisyObjective> {
        NoisyObjective::seeded(self.noise_std, self.seed)
    }

    /// `<acquisition>_<optimizer>_<seed>`
    pub fn tag(&self) -> String {
        format!("{}_{}_{}", self.acquisition.kind, self.method, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: Vec<f64>,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// 1-based.
    pub iteration: usize,
    pub x_proposed: Vec<f64>,
    pub y_observed: f64,
    pub best_so_far: f64,
    pub proposal_seconds: f64,
    /// Euclidean distance to the previous proposal; `None` on the first trial.
    pub distance_from_previous: Option<f64>,
    pub acquisition_value: f64,
    pub optimizer: OptimizerReport,
}

/// Posterior mean and standard deviation on the snapshot grid, as fitted
/// before the proposal of `iteration`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpSnapshot {
    pub iteration: usize,
    pub n_observations: usize,
    pub mean: Vec<f64>,
    pub sigma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: BoConfig,
    pub initial_observations: Vec<Observation>,
    pub trials: Vec<TrialRecord>,
    pub final_best: Observation,
    pub mean_proposal_seconds: f64,
    /// Grid shared by every snapshot; empty for multi-dimensional problems.
    pub snapshot_grid: Vec<f64>,
    pub gp_snapshots: Vec<GpSnapshot>,
}

impl RunReport {
    fn new(config: &BoConfig, initial: Vec<Observation>) -> Self {
        let grid = config.bounds.linspace(SNAPSHOT_POINTS).unwrap_or_default();
        Self {
            config: config.clone(),
            final_best: best_observation(&initial, &[]),
            initial_observations: initial,
            trials: Vec::new(),
            mean_proposal_seconds: 0.0,
            snapshot_grid: grid,
            gp_snapshots: Vec::new(),
        }
    }

    pub fn proposals(&self) -> impl Iterator<Item = &[f64]> {
        self.trials.iter().map(|t| t.x_proposed.as_slice())
    }
}

fn best_observation(initial: &[Observation], trials: &[TrialRecord]) -> Observation {
    let all = initial.iter().map(|o| (&o.x, o.y)).chain(trials.iter().map(|t| (&t.x_proposed, t.y_observed)));
    let mut best: Option<(&Vec<f64>, f64)> = None;
    for (x, y) in all {
        if best.is_none_or(|(_, b)| y > b) {
            best = Some((x, y));
        }
    }
    best.map(|(x, y)| Observation { x: x.clone(), y }).unwrap_or(Observation { x: Vec::new(), y: f64::NAN })
}

/// Error from [`run_bo`] with everything recorded up to the failure.
#[derive(Debug, Clone, thiserror::Error)]
#[error("run failed after {} trials: {source}", partial.trials.len())]
pub struct RunError {
    #[source]
    pub source: Error,
    pub partial: Box<RunReport>,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

fn snapshot_series(post: &GpPosterior, grid: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut mean = Vec::with_capacity(grid.len());
    let mut sigma = Vec::with_capacity(grid.len());
    for x in grid {
        let (m, s) = post.predict(&[*x])?;
        mean.push(m);
        sigma.push(s);
    }
    Ok((mean, sigma))
}

fn observe_initial<B: BlackBox>(objective: &mut B, config: &BoConfig) -> Result<(Dataset, Vec<Observation>)> {
    config.validate()?;
    Error::check_dim(config.bounds.dim(), objective.dim())?;
    let mut data = Dataset::new(objective.dim(), objective.noise_variance())?;
    let mut initial = Vec::with_capacity(config.initial_points.len());
    for x in &config.initial_points {
        let y = objective.observe(x)?;
        data.push(x.clone(), y)?;
        initial.push(Observation { x: x.clone(), y });
    }
    Ok((data, initial))
}

pub fn run_bo<B: BlackBox>(objective: &mut B, config: &BoConfig) -> Result<RunReport, RunError> {
    run_bo_observed(objective, config, &mut ())
}

/// [`run_bo`] with instrumentation hooks.
pub fn run_bo_observed<B: BlackBox, O: RunObserver>(
    objective: &mut B,
    config: &BoConfig,
    observer: &mut O,
) -> Result<RunReport, RunError> {
    let empty = || Box::new(RunReport::new(config, Vec::new()));
    let (mut data, initial) =
        observe_initial(objective, config).map_err(|source| RunError { source, partial: empty() })?;
    let mut report = RunReport::new(config, initial);
    let mut restart_rng = stream_rng(config.seed, RESTART_STREAM);

    for iteration in 1..=config.iterations {
        if let Err(source) = step(objective, config, observer, &mut data, &mut report, &mut restart_rng, iteration) {
            finish(&mut report);
            return Err(RunError { source, partial: Box::new(report) });
        }
    }
    finish(&mut report);
    Ok(report)
}

fn finish(report: &mut RunReport) {
    report.final_best = best_observation(&report.initial_observations, &report.trials);
    let n = report.trials.len();
    report.mean_proposal_seconds =
        if n == 0 { 0.0 } else { report.trials.iter().map(|t| t.proposal_seconds).sum::<f64>() / n as f64 };
}

fn step<B: BlackBox, O: RunObserver, R: rand_core::RngCore>(
    objective: &mut B,
    config: &BoConfig,
    observer: &mut O,
    data: &mut Dataset,
    report: &mut RunReport,
    restart_rng: &mut R,
    iteration: usize,
) -> Result<()> {
    observer.on_fit(data.len());
    let post = GpPosterior::fit(data.clone(), config.kernel.clone())?;
    if !report.snapshot_grid.is_empty() {
        let (mean, sigma) = snapshot_series(&post, &report.snapshot_grid)?;
        report.gp_snapshots.push(GpSnapshot { iteration, n_observations: data.len(), mean, sigma });
    }
    let inc = Incumbent::from_dataset(data)?;
    let proposal = propose_next_sample(
        &post,
        &config.acquisition,
        &inc,
        &config.bounds,
        config.method,
        config.n_restarts,
        &config.optimizer,
        restart_rng,
    )?;
    let x = proposal.x_next;
    let y = objective.observe(&x)?;
    data.push(x.clone(), y)?;

    let previous_best = report
        .trials
        .last()
        .map(|t| t.best_so_far)
        .unwrap_or_else(|| best_observation(&report.initial_observations, &[]).y);
    let trial = TrialRecord {
        iteration,
        distance_from_previous: report.trials.last().map(|t| euclidean(&t.x_proposed, &x)),
        x_proposed: x,
        y_observed: y,
        best_so_far: previous_best.max(y),
        proposal_seconds: proposal.report.elapsed,
        acquisition_value: proposal.report.value_best,
        optimizer: proposal.report,
    };
    observer.on_trial(&trial);
    report.trials.push(trial);
    Ok(())
}

/// Data behind a first-iteration plot: the GP fitted on the initial samples,
/// the acquisition surface, and the first proposal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstIterationSnapshot {
    pub config: BoConfig,
    pub initial_observations: Vec<Observation>,
    pub incumbent: Incumbent,
    pub grid: Vec<f64>,
    pub gp_mean: Vec<f64>,
    pub gp_sigma: Vec<f64>,
    pub acquisition: Vec<f64>,
    pub x_proposed: Vec<f64>,
    pub acquisition_at_proposal: f64,
    /// Distance from the proposal to the closest initial point.
    pub distance_to_nearest_initial: f64,
    pub proposal_seconds: f64,
}

/// Reproduces the state of [`run_bo`] right before its first observation:
/// same noise stream, same restart stream, same proposal.
pub fn first_iteration_snapshot<B: BlackBox>(config: &BoConfig, objective: &mut B) -> Result<FirstIterationSnapshot> {
    let (data, initial) = observe_initial(objective, config)?;
    let grid = config
        .bounds
        .linspace(SNAPSHOT_POINTS)
        .ok_or_else(|| Error::contract("snapshots need a one-dimensional search box"))?;
    let post = GpPosterior::fit(data.clone(), config.kernel.clone())?;
    let inc = Incumbent::from_dataset(&data)?;
    let (gp_mean, gp_sigma) = snapshot_series(&post, &grid)?;
    let acquisition =
        grid.iter().map(|x| config.acquisition.value(&post, &[*x], &inc)).collect::<Result<Vec<f64>>>()?;
    let mut rng = stream_rng(config.seed, RESTART_STREAM);
    let proposal = propose_next_sample(
        &post,
        &config.acquisition,
        &inc,
        &config.bounds,
        config.method,
        config.n_restarts,
        &config.optimizer,
        &mut rng,
    )?;
    let distance = config.initial_points.iter().map(|p| euclidean(p, &proposal.x_next)).fold(f64::INFINITY, f64::min);
    Ok(FirstIterationSnapshot {
        config: config.clone(),
        initial_observations: initial,
        incumbent: inc,
        grid,
        gp_mean,
        gp_sigma,
        acquisition,
        acquisition_at_proposal: proposal.report.value_best,
        proposal_seconds: proposal.report.elapsed,
        x_proposed: proposal.x_next,
        distance_to_nearest_initial: distance,
    })
}
