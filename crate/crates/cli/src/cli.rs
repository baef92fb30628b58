use std::ffi::OsString;
use std::path::PathBuf;

use bayesopt::{AcquisitionConfig, AcquisitionKind, BoConfig, Bounds, KernelParams, Method};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::harness::{run_matrix, run_single, run_snapshot};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bayesopt", version, about = "Bayesian optimization convergence and proposal-timing experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one acquisition/optimizer configuration.
    Run {
        #[arg(long, value_enum, default_value_t = Acquisition::Ei)]
        acquisition: Acquisition,
        #[arg(long, value_enum, default_value_t = Optimizer::Lbfgs)]
        optimizer: Optimizer,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run all four acquisition/optimizer pairs with a shared seed.
    Matrix {
        /// Tolerance for the iterations-to-optimum column of matrix_detail.csv.
        #[arg(long, default_value_t = 0.1, value_parser = non_negative)]
        delta: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Dump the GP and acquisition surface of the first iteration.
    Snapshot {
        #[arg(long, value_enum, default_value_t = Acquisition::Ei)]
        acquisition: Acquisition,
        #[arg(long, value_enum, default_value_t = Optimizer::Lbfgs)]
        optimizer: Optimizer,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Acquisition {
    Ei,
    Mpi,
}

impl From<Acquisition> for AcquisitionKind {
    fn from(a: Acquisition) -> Self {
        match a {
            Acquisition::Ei => AcquisitionKind::Ei,
            Acquisition::Mpi => AcquisitionKind::Mpi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Optimizer {
    Lbfgs,
    Tnc,
}

impl From<Optimizer> for Method {
    fn from(o: Optimizer) -> Self {
        match o {
            Optimizer::Lbfgs => Method::Lbfgs,
            Optimizer::Tnc => Method::Tnc,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Number of proposals after the initial samples.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    pub iterations: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Standard deviation of the observation noise.
    #[arg(long = "noise-std", default_value_t = 0.2, value_parser = non_negative)]
    pub noise_std: f64,
    /// Search interval as LO,HI.
    #[arg(long, default_value = "-2,2", value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds: (f64, f64),
    /// Improvement margin of both acquisitions.
    #[arg(long, default_value_t = 0.01, value_parser = non_negative)]
    pub xi: f64,
    /// Multi-start restarts per proposal.
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u32).range(1..))]
    pub restarts: u32,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub theta0: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub lengthscale: f64,
    #[arg(long, default_value = "./results")]
    pub out: PathBuf,
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("'{s}' must be non-negative"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("'{s}' must be positive"))
    }
}

fn parse_bounds(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("'{s}' is not of the form LO,HI"))?;
    let (lo, hi) = (parse_real(lo)?, parse_real(hi)?);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(format!("lower bound {lo} must be below upper bound {hi}"))
    }
}

impl CommonArgs {
    pub fn config(&self, acquisition: Acquisition, optimizer: Optimizer) -> Result<BoConfig, bayesopt::Error> {
        let (lo, hi) = self.bounds;
        let defaults = BoConfig::default();
        let initial_points =
            defaults.initial_points.iter().filter(|p| (lo..=hi).contains(&p[0])).cloned().collect::<Vec<_>>();
        let initial_points = if initial_points.is_empty() { vec![vec![0.5 * (lo + hi)]] } else { initial_points };
        Ok(BoConfig {
            acquisition: AcquisitionConfig::new(acquisition.into(), self.xi)?,
            method: optimizer.into(),
            iterations: self.iterations as usize,
            initial_points,
            bounds: Bounds::interval(lo, hi)?,
            noise_std: self.noise_std,
            kernel: KernelParams::isotropic(self.theta0, self.lengthscale, 1)?,
            n_restarts: self.restarts as usize,
            seed: self.seed,
            ..defaults
        })
    }
}

/// Parses `args` (program name first) and executes the command. Returns the
/// process exit code: 0 on success, 1 on runtime failure, 2 on usage error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn execute(command: &Command) -> Result<(), crate::HarnessError> {
    match command {
        Command::Run { acquisition, optimizer, common } => {
            let config = common.config(*acquisition, *optimizer)?;
            let run = run_single(&config, &common.out)?;
            let best = &run.report.final_best;
            println!(
                "{}: best y = {:.6} at x = {:?}, mean proposal time {:.6} s",
                config.tag(),
                best.y,
                best.x,
                run.report.mean_proposal_seconds
            );
            println!("wrote {}", run.report_path.display());
        }
        Command::Matrix { delta, common } => {
            let config = common.config(Acquisition::Ei, Optimizer::Lbfgs)?;
            let outcome = run_matrix(&config, &common.out, *delta)?;
            let s = &outcome.summary;
            println!("grid optimum f* = {:.6} at x = {:.6}", s.oracle_f, s.oracle_x);
            println!("{:<8}{:>14}{:>14}", "", "MPI", "EI");
            for (label, cells) in &s.timing_table().rows {
                println!("{:<8}{:>14.6}{:>14.6}", label.to_uppercase(), cells[0], cells[1]);
            }
            for r in &s.rows {
                let reached = r.iterations_to_within_delta.map_or_else(
                    || format!("never within {} of f*", s.delta),
                    |i| format!("within {} of f* after {i} iterations", s.delta),
                );
                println!("{}/{}: final best {:.6}, {reached}", r.acquisition, r.method, r.final_best);
            }
            println!("wrote {}", outcome.summary_path.display());
        }
        Command::Snapshot { acquisition, optimizer, common } => {
            let config = common.config(*acquisition, *optimizer)?;
            let art = run_snapshot(&config, &common.out)?;
            println!(
                "{}: first proposal x = {:?}, {:.6} from the nearest initial point",
                config.tag(),
                art.snapshot.x_proposed,
                art.snapshot.distance_to_nearest_initial
            );
            println!("wrote {}", art.grid_path.display());
        }
    }
    Ok(())
}
