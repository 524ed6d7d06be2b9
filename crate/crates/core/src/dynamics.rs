//! Semiclassical cavity flow with the spin slaved to the field.

use crate::meanfield::{sz_roots_any_tau, Branch, MeanFieldState};
use crate::ModelParams;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sign of s_z carried by a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinBranch {
    Down,
    Up,
}

impl SpinBranch {
    pub fn sign(self) -> f64 {
        match self {
            SpinBranch::Down => -1.0,
            SpinBranch::Up => 1.0,
        }
    }

    pub fn from_sign(s: i32) -> Option<Self> {
        match s {
            -1 => Some(SpinBranch::Down),
            1 => Some(SpinBranch::Up),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("t_max must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64, trajectory: Box<Trajectory> },
    #[error("no convergence before t = {t_max}")]
    NoConvergence { t_max: f64, trajectory: Box<Trajectory> },
}

impl DynamicsError {
    /// The partial trajectory, when one was produced.
    pub fn trajectory(&self) -> Option<&Trajectory> {
        match self {
            DynamicsError::StepUnderflow { trajectory, .. } | DynamicsError::NoConvergence { trajectory, .. } => {
                Some(trajectory)
            }
            _ => None,
        }
    }
}

fn field_combo(p: &ModelParams, a: Complex64) -> Complex64 {
    a + p.tau * a.conj()
}

/// Adiabatic s_z for field α.
pub fn spin_z(p: &ModelParams, alpha: Complex64, branch: SpinBranch) -> f64 {
    let b = field_combo(p, alpha);
    branch.sign() / (1.0 + 4.0 * p.g_tilde * p.g_tilde * b.norm_sqr()).sqrt()
}

/// Bloch vector (s_x, s_y, s_z) slaved to α, with s_− = g̃(α+τα*)s_z.
pub fn spin(p: &ModelParams, alpha: Complex64, branch: SpinBranch) -> [f64; 3] {
    let sz = spin_z(p, alpha, branch);
    let sm = p.g_tilde * field_combo(p, alpha) * sz;
    [2.0 * sm.re, -2.0 * sm.im, sz]
}

/// dα/dt of the closed cavity equation.
pub fn rhs(p: &ModelParams, alpha: Complex64, branch: SpinBranch) -> Complex64 {
    let i = Complex64::i();
    let g2 = p.g_tilde * p.g_tilde;
    let sz = spin_z(p, alpha, branch);
    let lin = Complex64::new(1.0, -p.gamma_tilde) * alpha;
    let spin_term = g2 * sz * ((1.0 + p.tau * p.tau) * alpha + 2.0 * p.tau * alpha.conj());
    let kerr = 2.0 * p.kappa * g2 * (alpha + alpha.conj());
    -i * p.omega * (lin + spin_term + kerr)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    /// Horizon in units of 1/ω.
    pub t_max: f64,
    /// Combined absolute and relative per-step tolerance.
    pub tol: f64,
    /// Rate below which the flow counts as stationary, in units of ω.
    pub rate_threshold: f64,
    /// Dwell multiplies 1/(γ̃ω).
    pub dwell_factor: f64,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { t_max: 4000.0, tol: 1e-10, rate_threshold: 1e-8, dwell_factor: 10.0, max_steps: 5_000_000 }
    }
}

impl IntegrateOptions {
    pub fn dwell(&self, p: &ModelParams) -> f64 {
        self.dwell_factor / (p.gamma_tilde * p.omega)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub alpha: Vec<Complex64>,
    /// dα/dt at each sample, used for Hermite interpolation.
    pub rates: Vec<Complex64>,
    pub spin: Vec<[f64; 3]>,
    pub branch: SpinBranch,
    pub converged_to: Option<MeanFieldState>,
    pub steady_time: Option<f64>,
}

impl Trajectory {
    pub fn final_alpha(&self) -> Complex64 {
        *self.alpha.last().expect("trajectory has at least one sample")
    }

    /// Cubic Hermite interpolation of α at time t, clamped to the sampled range.
    pub fn alpha_at(&self, t: f64) -> Complex64 {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return self.alpha[0];
        }
        if t >= self.times[n - 1] {
            return self.alpha[n - 1];
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        self.alpha[k] * h00 + self.rates[k] * (h10 * h) + self.alpha[k + 1] * h01 + self.rates[k + 1] * (h11 * h)
    }

    /// Trajectory on `n` evenly spaced times spanning the integration window.
    pub fn resample(&self, p: &ModelParams, n: usize) -> Trajectory {
        let (t0, t1) = (self.times[0], *self.times.last().unwrap());
        let times: Vec<f64> =
            if n < 2 { vec![t0] } else { (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect() };
        let alpha: Vec<Complex64> = times.iter().map(|&t| self.alpha_at(t)).collect();
        Trajectory {
            rates: alpha.iter().map(|&a| rhs(p, a, self.branch)).collect(),
            spin: alpha.iter().map(|&a| spin(p, a, self.branch)).collect(),
            times,
            alpha,
            branch: self.branch,
            converged_to: self.converged_to,
            steady_time: self.steady_time,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Integrates from α₀ until the flow has stayed below the rate threshold for
/// the dwell time, or until `t_max`.
pub fn integrate(
    p: &ModelParams,
    alpha0: Complex64,
    branch: SpinBranch,
    opts: &IntegrateOptions,
) -> Result<Trajectory, DynamicsError> {
    if !(opts.t_max > 0.0 && opts.t_max.is_finite()) {
        return Err(DynamicsError::InvalidHorizon(opts.t_max));
    }
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(DynamicsError::InvalidTolerance(opts.tol));
    }
    let f = |a: Complex64| rhs(p, a, branch);
    let dwell = opts.dwell(p);
    let threshold = opts.rate_threshold * p.omega;

    let mut t = 0.0;
    let mut y = alpha0;
    let mut k1 = f(y);
    let mut traj = Trajectory {
        times: vec![t],
        alpha: vec![y],
        rates: vec![k1],
        spin: vec![spin(p, y, branch)],
        branch,
        converged_to: None,
        steady_time: None,
    };
    let mut quiet_since = (k1.norm() < threshold).then_some(0.0);
    // Bound on the linear part; keeps |hλ| ≤ 1 so steps cannot park on the
    // stability boundary once α sits at the tolerance floor.
    let g2 = p.g_tilde * p.g_tilde;
    let rho = p.omega
        * ((1.0 + p.gamma_tilde * p.gamma_tilde).sqrt() + g2 * (1.0 + p.tau.abs()).powi(2) + 4.0 * p.kappa * g2);
    let h_max = 1.0 / rho;
    let mut h = (0.01 / p.omega).min(h_max).min(opts.t_max);
    let mut steps = 0;

    while t < opts.t_max && steps < opts.max_steps {
        steps += 1;
        h = h.min(opts.t_max - t);
        let mut k = [Complex64::new(0.0, 0.0); 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys += *kj * (h * A[s][j]);
            }
            k[s] = f(ys);
        }
        // Row 6 of A holds the fifth-order weights (FSAL).
        let mut y5 = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            y5 += *kj * (h * A[6][j]);
        }
        let mut err = Complex64::new(0.0, 0.0);
        for (e, kj) in E.iter().zip(k.iter()) {
            err += *kj * (h * e);
        }
        let scale_re = opts.tol * (1.0 + y.re.abs().max(y5.re.abs()));
        let scale_im = opts.tol * (1.0 + y.im.abs().max(y5.im.abs()));
        let en = (err.re / scale_re).abs().max((err.im / scale_im).abs());
        if !en.is_finite() {
            h *= 0.2;
        } else if en <= 1.0 {
            t += h;
            y = y5;
            k1 = k[6];
            traj.times.push(t);
            traj.alpha.push(y);
            traj.rates.push(k1);
            traj.spin.push(spin(p, y, branch));
            if k1.norm() < threshold {
                let since = *quiet_since.get_or_insert(t);
                if t - since >= dwell {
                    traj.steady_time = Some(since);
                    traj.converged_to = Some(fixed_point_state(p, y, branch));
                    return Ok(traj);
                }
            } else {
                quiet_since = None;
            }
            h = (h * (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)).min(h_max);
        } else {
            h *= (0.9 * en.powf(-0.2)).clamp(0.2, 1.0);
        }
        if h < 1e-14 * (1.0 + t) {
            return Err(DynamicsError::StepUnderflow { t, trajectory: Box::new(traj) });
        }
    }
    Err(DynamicsError::NoConvergence { t_max: t, trajectory: Box::new(traj) })
}

/// Mean-field state for a stationary field, labelled by the nearest s_z root.
pub fn fixed_point_state(p: &ModelParams, alpha: Complex64, branch: SpinBranch) -> MeanFieldState {
    let [s_x, s_y, s_z] = spin(p, alpha, branch);
    let trivial = (s_z.abs() - 1.0).abs() < 1e-9;
    let label = match branch {
        SpinBranch::Up if trivial => Branch::TrivialUp,
        SpinBranch::Down if trivial => Branch::TrivialDown,
        _ => sz_roots_any_tau(p)
            .ok()
            .and_then(|roots| {
                roots
                    .into_iter()
                    .min_by(|a, b| (a.s_z - s_z).abs().total_cmp(&(b.s_z - s_z).abs()))
                    .map(|r| r.sign.branch())
            })
            .unwrap_or(Branch::SuperradiantMinus),
    };
    MeanFieldState { x: alpha.re, y: alpha.im, s_x, s_y, s_z, branch: label }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasinLabel {
    #[serde(rename = "NP")]
    Normal,
    #[serde(rename = "SRP")]
    Superradiant,
    #[serde(rename = "NoConvergence")]
    NoConvergence,
}

impl BasinLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BasinLabel::Normal => "NP",
            BasinLabel::Superradiant => "SRP",
            BasinLabel::NoConvergence => "NoConvergence",
        }
    }

    pub fn of(result: &Result<Trajectory, DynamicsError>) -> Self {
        match result {
            Ok(Trajectory { converged_to: Some(s), .. }) if s.is_superradiant() => BasinLabel::Superradiant,
            Ok(Trajectory { converged_to: Some(_), .. }) => BasinLabel::Normal,
            _ => BasinLabel::NoConvergence,
        }
    }
}

/// Rectangle of initial conditions in the (Re α₀, Im α₀) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinGrid {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl BasinGrid {
    fn axis(lo: f64, hi: f64, n: usize, k: usize) -> f64 {
        if n < 2 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    }

    /// Initial condition of cell (ix, iy).
    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(Self::axis(self.re.0, self.re.1, self.nx, ix), Self::axis(self.im.0, self.im.1, self.ny, iy))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinMap {
    pub grid: BasinGrid,
    /// Row-major over Im α₀ (outer) and Re α₀ (inner).
    pub labels: Vec<BasinLabel>,
}

impl BasinMap {
    pub fn at(&self, ix: usize, iy: usize) -> BasinLabel {
        self.labels[iy * self.grid.nx + ix]
    }

    pub fn count(&self, label: BasinLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Labels every cell by the attractor reached on the spin-down branch.
pub fn basin_map(p: &ModelParams, grid: BasinGrid, opts: &IntegrateOptions) -> BasinMap {
    let labels = (0..grid.nx * grid.ny)
        .into_par_iter()
        .map(|c| {
            let a0 = grid.point(c % grid.nx, c / grid.nx);
            BasinLabel::of(&integrate(p, a0, SpinBranch::Down, opts))
        })
        .collect();
    BasinMap { grid, labels }
}
