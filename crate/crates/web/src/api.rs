use bayesopt::objective::evaluate;
use bayesopt::{
    first_iteration_snapshot, run_bo, AcquisitionConfig, AcquisitionKind, BoConfig, Bounds, KernelParams, Method,
};
use serde::{Deserialize, Serialize};

/// Settings accepted by every export. Missing fields take the CLI defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoSettings {
    pub acquisition: AcquisitionKind,
    pub optimizer: Method,
    pub iterations: usize,
    pub xi: f64,
    pub noise_std: f64,
    pub seed: u64,
    pub restarts: usize,
    pub lengthscale: f64,
    pub bounds: (f64, f64),
}

impl Default for DemoSettings {
    fn default() -> Self {
        let d = BoConfig::default();
        Self {
            acquisition: d.acquisition.kind,
            optimizer: d.method,
            iterations: d.iterations,
            xi: d.acquisition.xi,
            noise_std: d.noise_std,
            seed: d.seed,
            restarts: d.n_restarts,
            lengthscale: 1.0,
            bounds: (d.bounds.lower()[0], d.bounds.upper()[0]),
        }
    }
}

impl DemoSettings {
    pub fn parse(json: &str) -> Result<Self, String> {
        if json.trim().is_empty() {
            return Ok(Self::default());
        }
        serde_json::from_str(json).map_err(|e| format!("bad settings: {e}"))
    }

    pub fn config(&self) -> Result<BoConfig, String> {
        let (lo, hi) = self.bounds;
        let bounds = Bounds::interval(lo, hi).map_err(|e| e.to_string())?;
        let mut initial_points: Vec<Vec<f64>> =
            BoConfig::default().initial_points.into_iter().filter(|p| bounds.contains(p)).collect();
        if initial_points.is_empty() {
            initial_points.push(vec![0.5 * (lo + hi)]);
        }
        let config = BoConfig {
            acquisition: AcquisitionConfig::new(self.acquisition, self.xi).map_err(|e| e.to_string())?,
            method: self.optimizer,
            iterations: self.iterations,
            initial_points,
            bounds,
            noise_std: self.noise_std,
            kernel: KernelParams::isotropic(1.0, self.lengthscale, 1).map_err(|e| e.to_string())?,
            n_restarts: self.restarts,
            seed: self.seed,
            ..BoConfig::default()
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

#[derive(Debug, Serialize)]
struct Curve {
    x: Vec<f64>,
    f: Vec<f64>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

pub fn objective_curve(settings: &str, n: usize) -> Result<String, String> {
    let config = DemoSettings::parse(settings)?.config()?;
    let x = config.bounds.linspace(n.clamp(2, 100_000)).ok_or("bounds must be one-dimensional")?;
    let f = x.iter().map(|v| evaluate(*v)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    to_json(&Curve { x, f })
}

pub fn first_iteration(settings: &str) -> Result<String, String> {
    let config = DemoSettings::parse(settings)?.config()?;
    let mut objective = config.objective().map_err(|e| e.to_string())?;
    to_json(&first_iteration_snapshot(&config, &mut objective).map_err(|e| e.to_string())?)
}

pub fn run_optimization(settings: &str) -> Result<String, String> {
    let config = DemoSettings::parse(settings)?.config()?;
    let mut objective = config.objective().map_err(|e| e.to_string())?;
    to_json(&run_bo(&mut objective, &config).map_err(|e| e.to_string())?)
}
