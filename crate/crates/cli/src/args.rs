//! Command-line surface: one subcommand per mode, flags mirroring the
//! configuration fields.

use crate::config::{
    self, parse_pair, parse_path, AxisRange, ConfigError, CriticalTarget, FitBranch, Mode, Projection, SweepConfig,
};
use aqrm::gaussian::Side;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "aqrm", version, about = "Sweeps and data export for the damped anisotropic Rabi model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Raster of mean-field phase labels.
    PhaseDiagram(Args),
    /// Critical couplings against τ.
    CriticalLines(Args),
    /// Gaussian photon-number fluctuations.
    Fluctuations(Args),
    /// Log-log fit of fluctuation exponents near a critical coupling.
    ExponentFit(Args),
    /// Semiclassical trajectories from given or random initial conditions.
    Dynamics(Args),
    /// Attractor reached from a grid of initial conditions.
    Basin(Args),
    /// Exact truncated-Fock steady states.
    SteadyState(Args),
    /// Wigner function of an exact steady state.
    Wigner(Args),
}

impl Command {
    pub fn split(self) -> (Mode, Args) {
        match self {
            Command::PhaseDiagram(a) => (Mode::PhaseDiagram, a),
            Command::CriticalLines(a) => (Mode::CriticalLines, a),
            Command::Fluctuations(a) => (Mode::Fluctuations, a),
            Command::ExponentFit(a) => (Mode::ExponentFit, a),
            Command::Dynamics(a) => (Mode::Dynamics, a),
            Command::Basin(a) => (Mode::Basin, a),
            Command::SteadyState(a) => (Mode::SteadyState, a),
            Command::Wigner(a) => (Mode::Wigner, a),
        }
    }
}

#[derive(Debug, Default, clap::Args)]
pub struct Args {
    /// JSON file with configuration fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub g_tilde: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_tilde: Option<f64>,
    /// axis:start:stop:count[:linear|geometric]; repeat for a second axis.
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Vec<String>,
    /// fixed-tau:<τ> or counter-rotating:<g_cr>.
    #[arg(long)]
    pub path: Option<String>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// re,im; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha0: Vec<String>,
    #[arg(long)]
    pub random_initial: Option<usize>,
    #[arg(long)]
    pub random_radius: Option<f64>,
    /// Spin branch, 1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    pub branch: Option<i32>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub spacing: Option<f64>,
    /// spin-down or cavity.
    #[arg(long)]
    pub projection: Option<String>,
    #[arg(long)]
    pub peak_fraction: Option<f64>,
    /// g-minus, g-plus, g-b, g-b2, g-c0 or a number.
    #[arg(long)]
    pub critical: Option<String>,
    /// below or above.
    #[arg(long)]
    pub side: Option<String>,
    /// np, srp-minus or srp-plus.
    #[arg(long)]
    pub fit_branch: Option<String>,
    #[arg(long)]
    pub min_distance: Option<f64>,
    #[arg(long)]
    pub max_distance: Option<f64>,
    #[arg(long)]
    pub fit_points: Option<usize>,
    /// lo,hi
    #[arg(long, allow_hyphen_values = true)]
    pub tau_window: Option<String>,
    /// lo,hi
    #[arg(long, allow_hyphen_values = true)]
    pub g_window: Option<String>,
}

fn set<T>(dst: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *dst = v;
    }
}

impl Args {
    /// Config file values overridden by flags. Worker count is left to
    /// [`crate::resolve_workers`].
    pub fn into_config(self, mode: Mode) -> Result<(SweepConfig, Option<usize>), ConfigError> {
        let mut c = match &self.config {
            Some(path) => SweepConfig::from_file(path)?,
            None => SweepConfig::default(),
        };
        let file_workers = c.workers;
        c.mode = mode;
        set(&mut c.omega, self.omega);
        set(&mut c.delta, self.delta);
        set(&mut c.g_tilde, self.g_tilde);
        set(&mut c.tau, self.tau);
        set(&mut c.kappa, self.kappa);
        set(&mut c.gamma_tilde, self.gamma_tilde);
        if !self.sweep.is_empty() {
            c.sweep = self.sweep.iter().map(|s| AxisRange::parse(s)).collect::<Result<_, _>>()?;
        }
        if let Some(p) = &self.path {
            c.path = Some(parse_path(p)?);
        }
        set(&mut c.output, self.output);
        set(&mut c.seed, self.seed);
        if !self.alpha0.is_empty() {
            c.alpha0 = self.alpha0.iter().map(|s| parse_pair("alpha0", s)).collect::<Result<_, _>>()?;
        }
        set(&mut c.random_initial, self.random_initial);
        set(&mut c.random_radius, self.random_radius);
        set(&mut c.branch, self.branch);
        set(&mut c.t_max, self.t_max);
        set(&mut c.tol, self.tol);
        set(&mut c.samples, self.samples);
        set(&mut c.n_max, self.n_max);
        set(&mut c.ratio, self.ratio);
        set(&mut c.half_width, self.half_width);
        set(&mut c.spacing, self.spacing);
        if let Some(p) = &self.projection {
            c.projection = Projection::parse(p)?;
        }
        set(&mut c.peak_fraction, self.peak_fraction);
        if let Some(t) = &self.critical {
            c.critical = CriticalTarget::parse(t)?;
        }
        if let Some(s) = &self.side {
            c.side = match s.as_str() {
                "below" => Side::Below,
                "above" => Side::Above,
                _ => return Err(config::invalid("side", format!("expected below|above, got {s:?}"))),
            };
        }
        if let Some(b) = &self.fit_branch {
            c.fit_branch = match b.as_str() {
                "np" => FitBranch::Np,
                "srp-minus" => FitBranch::SrpMinus,
                "srp-plus" => FitBranch::SrpPlus,
                _ => return Err(config::invalid("fit_branch", format!("expected np|srp-minus|srp-plus, got {b:?}"))),
            };
        }
        set(&mut c.min_distance, self.min_distance);
        set(&mut c.max_distance, self.max_distance);
        set(&mut c.fit_points, self.fit_points);
        if let Some(w) = &self.tau_window {
            c.tau_window = parse_pair("tau_window", w)?;
        }
        if let Some(w) = &self.g_window {
            c.g_window = parse_pair("g_window", w)?;
        }
        c.workers = None;
        Ok((c, file_workers))
    }
}
