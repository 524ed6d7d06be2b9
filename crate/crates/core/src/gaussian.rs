//! Quadratic effective theories for the normal and superradiant phases,
//! their steady-state second moments, and critical-exponent fits.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::meanfield::{self, MeanFieldState, RootSign};
use crate::params::{ModelParams, ParamPath};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("state is not superradiant (s_z = {s_z}, |alpha| = {alpha})")]
    NotSuperradiant { s_z: f64, alpha: f64 },
    #[error("state is not stationary: linear coefficient {residual:e} would survive projection")]
    NonStationary { residual: f64 },
    #[error("moment equations are singular (denominator {denominator:e}, |det K| {det:e})")]
    SingularK { denominator: f64, det: f64 },
    #[error("fit needs >= 20 samples over >= 2 decades, got {samples} over {decades:.2}")]
    InsufficientDecades { samples: usize, decades: f64 },
    #[error("no physical {0:?} root at g = {1}")]
    MissingRoot(RootSign, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaussianPhase {
    Normal,
    Superradiant,
}

/// Extra data carried by the superradiant theory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrpDressing {
    /// Squeeze-mixed rotating coupling ḡ′_r.
    pub g_r: Complex64,
    /// Squeeze-mixed counter-rotating coupling ḡ′_cr.
    pub g_cr: Complex64,
    pub s_z: f64,
    /// Dressed qubit splitting Δ/|s_z|.
    pub delta_eff: f64,
}

/// H = R a†a + P a†² + P* a², with dissipation γD[a cosh r + a† sinh r].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCoeffs {
    pub r_coef: f64,
    pub p_coef: Complex64,
    /// Squeeze parameter r = −¼ ln(1 + 4κg̃²).
    pub squeeze: f64,
    pub phase: GaussianPhase,
    pub srp: Option<SrpDressing>,
}

impl GaussianCoeffs {
    /// γ² + R² − 4|P|²; vanishes at second-order criticality.
    pub fn denominator(&self, gamma: f64) -> f64 {
        gamma * gamma + self.r_coef * self.r_coef - 4.0 * self.p_coef.norm_sqr()
    }
}

fn xi(p: &ModelParams) -> f64 {
    (1.0 + 4.0 * p.kappa * p.g_tilde * p.g_tilde).sqrt()
}

pub fn squeeze_parameter(p: &ModelParams) -> f64 {
    -0.25 * (1.0 + 4.0 * p.kappa * p.g_tilde * p.g_tilde).ln()
}

pub fn np_coeffs(p: &ModelParams) -> GaussianCoeffs {
    let (g2, tau, w) = (p.g_tilde * p.g_tilde, p.tau, p.omega);
    let xi = xi(p);
    let up = (1.0 + tau).powi(2);
    let um = (1.0 - tau).powi(2);
    GaussianCoeffs {
        r_coef: 0.5 * w * (2.0 * xi - g2 * (up / xi + xi * um)),
        p_coef: Complex64::new(0.25 * w * g2 * (xi * um - up / xi), 0.0),
        squeeze: squeeze_parameter(p),
        phase: GaussianPhase::Normal,
        srp: None,
    }
}

/// Coefficients of the superradiant theory built on `state`. P is the a†²
/// coefficient, −ω|s_z| ḡ′_r* ḡ′_cr, and the dressed couplings use the complex
/// square (α+τα*)².
pub fn srp_coeffs(p: &ModelParams, state: &MeanFieldState) -> Result<GaussianCoeffs, GaussianError> {
    let alpha = state.alpha();
    if !(state.s_z > -1.0 && state.s_z < 0.0) || alpha.norm() == 0.0 {
        return Err(GaussianError::NotSuperradiant { s_z: state.s_z, alpha: alpha.norm() });
    }
    let linear = meanfield::residual(p, state)[0];
    if linear > 1e-10 {
        return Err(GaussianError::NonStationary { residual: linear });
    }
    let (g, tau) = (p.g_tilde, p.tau);
    let az = state.s_z.abs();
    let beta = alpha + alpha.conj() * tau;
    let b2 = beta * beta;
    let chi = 1.0 / (state.s_z * state.s_z);
    let den = chi + chi.sqrt();
    let g_r = (-(b2 * (4.0 * tau * g * g / den)) + (1.0 + az)) * (-0.5 * g);
    let g_cr = (-(b2 * (4.0 * g * g / den)) + tau * (1.0 + az)) * (-0.5 * g);
    let r = squeeze_parameter(p);
    let (c, s) = (r.cosh(), r.sinh());
    let gr = g_r * c + g_cr * s;
    let gcr = g_r * s + g_cr * c;
    Ok(GaussianCoeffs {
        r_coef: p.omega * (xi(p) - az * (gr.norm_sqr() + gcr.norm_sqr())),
        p_coef: gr.conj() * gcr * (-p.omega * az),
        squeeze: r,
        phase: GaussianPhase::Superradiant,
        srp: Some(SrpDressing { g_r: gr, g_cr: gcr, s_z: state.s_z, delta_eff: p.delta / az }),
    })
}

/// (l⁻, l⁺) = −γ cosh r ∓ √(γ² sinh²r + 4|P|² − R²).
pub fn liouville_eigs(c: &GaussianCoeffs, gamma: f64) -> [Complex64; 2] {
    let (ch, sh) = (c.squeeze.cosh(), c.squeeze.sinh());
    let root = Complex64::new(gamma * gamma * sh * sh + 4.0 * c.p_coef.norm_sqr() - c.r_coef * c.r_coef, 0.0).sqrt();
    let base = Complex64::new(-gamma * ch, 0.0);
    [base - root, base + root]
}

pub fn np_liouville_eigs(p: &ModelParams) -> [Complex64; 2] {
    liouville_eigs(&np_coeffs(p), p.gamma())
}

/// First-moment generator acting on (⟨a⟩, ⟨a†⟩).
pub fn liouville_matrix(c: &GaussianCoeffs, gamma: f64) -> [[Complex64; 2]; 2] {
    let i = Complex64::i();
    let (ch, sh) = (c.squeeze.cosh(), c.squeeze.sinh());
    let r = c.r_coef;
    let pc = c.p_coef;
    [[-i * r - gamma * ch, -i * pc.conj() * 2.0 - gamma * sh], [i * pc * 2.0 - gamma * sh, i * r - gamma * ch]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    /// ⟨a†a⟩ from the linear solve.
    pub n: f64,
    /// ⟨a²⟩.
    pub a2: Complex64,
    /// ⟨a†a⟩ from the closed-form expression.
    pub n_closed: f64,
    /// Residual |K s + Y|∞.
    pub residual: f64,
}

impl SecondMoments {
    /// Symplectic eigenvalue √((n+½)² − |⟨a²⟩|²); at least ½ for a physical state.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        ((self.n + 0.5).powi(2) - self.a2.norm_sqr()).sqrt()
    }
}

/// Stationary (⟨a†a⟩, ⟨a²⟩, ⟨a†²⟩) from K s + Y = 0.
pub fn second_moments(c: &GaussianCoeffs, gamma: f64) -> Result<SecondMoments, GaussianError> {
    let i = Complex64::i();
    let (r, pc, g) = (c.r_coef, c.p_coef, gamma);
    let re = |v: f64| Complex64::new(v, 0.0);
    let k = Matrix3::new(
        re(-2.0 * g),
        i * pc.conj() * 2.0,
        -i * pc * 2.0,
        -i * pc * 4.0,
        -i * r * 2.0 - 2.0 * g,
        Complex64::new(0.0, 0.0),
        i * pc.conj() * 4.0,
        Complex64::new(0.0, 0.0),
        i * r * 2.0 - 2.0 * g,
    );
    let (sh, s2) = (c.squeeze.sinh(), (2.0 * c.squeeze).sinh());
    let y = Vector3::new(re(2.0 * g * sh * sh), -i * pc * 2.0 - g * s2, i * pc.conj() * 2.0 - g * s2);
    let denominator = c.denominator(g);
    let det = k.determinant().norm();
    if denominator <= 0.0 || det < 1e-14 {
        return Err(GaussianError::SingularK { denominator, det });
    }
    let s = k.lu().solve(&(-y)).ok_or(GaussianError::SingularK { denominator, det })?;
    let residual = (k * s + y).camax();
    let rt2 = r * r + g * g;
    let pt = -g * pc.im - r * pc.re;
    let n_closed = (rt2 * sh * sh + pt * s2 + 2.0 * pc.norm_sqr()) / denominator;
    Ok(SecondMoments { n: s[0].re, a2: s[1], n_closed, residual })
}

/// Which effective theory to evaluate along a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FluctuationBranch {
    Normal,
    Superradiant(RootSign),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationPoint {
    pub coeffs: GaussianCoeffs,
    pub moments: SecondMoments,
    /// (l⁻, l⁺) in energy units.
    pub eigs: [Complex64; 2],
    /// Mean-field state the theory is built on.
    pub state: MeanFieldState,
}

pub fn fluctuation_at(p: &ModelParams, branch: FluctuationBranch) -> Result<FluctuationPoint, GaussianError> {
    let (state, coeffs) = match branch {
        FluctuationBranch::Normal => (MeanFieldState::trivial_down(), np_coeffs(p)),
        FluctuationBranch::Superradiant(sign) => {
            let root = meanfield::sz_roots_any_tau(p)
                .ok()
                .and_then(|rs| rs.into_iter().find(|r| r.sign == sign && r.physical))
                .ok_or(GaussianError::MissingRoot(sign, p.g_tilde))?;
            let [state, _] =
                meanfield::solve_xy(p, root.s_z, sign).map_err(|_| GaussianError::MissingRoot(sign, p.g_tilde))?;
            (state, srp_coeffs(p, &state)?)
        }
    };
    let gamma = p.gamma();
    Ok(FluctuationPoint {
        moments: second_moments(&coeffs, gamma)?,
        eigs: liouville_eigs(&coeffs, gamma),
        coeffs,
        state,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Ordinary least squares y = slope·x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let slope_stderr = if xs.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    LinearFit { slope, intercept, slope_stderr }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

/// Geometric grid of distances |g̃ − g̃_c|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitGrid {
    pub min_distance: f64,
    pub max_distance: f64,
    pub points: usize,
}

impl Default for FitGrid {
    fn default() -> Self {
        Self { min_distance: 1e-6, max_distance: 1e-2, points: 40 }
    }
}

impl FitGrid {
    pub fn distances(&self) -> Vec<f64> {
        let (a, b) = (self.min_distance.ln(), self.max_distance.ln());
        let n = self.points.max(2);
        (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSample {
    pub distance: f64,
    pub n: f64,
    pub re_l_plus: f64,
    pub denominator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    /// ⟨a†a⟩ ∝ |g̃ − g̃_c|^β.
    pub beta: LinearFit,
    /// |Re l⁺| ∝ |g̃ − g̃_c|^ν.
    pub nu: LinearFit,
    pub window: (f64, f64),
    pub samples: usize,
    /// |β + ν| < stderr(β) + stderr(ν) + 0.05.
    pub scaling_consistent: bool,
}

/// Log–log regressions of n and |Re l⁺| against distance. Samples with a
/// denominator below 1e-12 (in ω² units) are dropped first.
pub fn fit_exponents(samples: &[ExponentSample], omega: f64) -> Result<ExponentFit, GaussianError> {
    let kept: Vec<&ExponentSample> = samples
        .iter()
        .filter(|s| {
            s.distance > 0.0
                && s.n > 0.0
                && s.n.is_finite()
                && s.re_l_plus != 0.0
                && s.re_l_plus.is_finite()
                && s.denominator >= 1e-12 * omega * omega
        })
        .collect();
    let lo = kept.iter().map(|s| s.distance).fold(f64::INFINITY, f64::min);
    let hi = kept.iter().map(|s| s.distance).fold(0.0, f64::max);
    let decades = if kept.is_empty() { 0.0 } else { (hi / lo).log10() };
    if kept.len() < 20 || decades < 2.0 - 1e-9 {
        return Err(GaussianError::InsufficientDecades { samples: kept.len(), decades });
    }
    let xs: Vec<f64> = kept.iter().map(|s| s.distance.ln()).collect();
    let ln_n: Vec<f64> = kept.iter().map(|s| s.n.ln()).collect();
    let ln_l: Vec<f64> = kept.iter().map(|s| s.re_l_plus.abs().ln()).collect();
    let beta = linear_fit(&xs, &ln_n);
    let nu = linear_fit(&xs, &ln_l);
    let scaling_consistent = (beta.slope + nu.slope).abs() < beta.slope_stderr + nu.slope_stderr + 0.05;
    Ok(ExponentFit { beta, nu, window: (lo, hi), samples: kept.len(), scaling_consistent })
}

/// Samples the chosen branch at g̃_c ∓ d along `path`. Points where the
/// branch does not exist are skipped.
pub fn exponent_samples(
    base: &ModelParams,
    path: ParamPath,
    g_c: f64,
    side: Side,
    branch: FluctuationBranch,
    grid: FitGrid,
) -> Vec<ExponentSample> {
    grid.distances()
        .into_iter()
        .filter_map(|d| {
            let g = match side {
                Side::Below => g_c - d,
                Side::Above => g_c + d,
            };
            let p = path.params(base, g);
            let f = fluctuation_at(&p, branch).ok()?;
            Some(ExponentSample {
                distance: d,
                n: f.moments.n,
                re_l_plus: f.eigs[1].re,
                denominator: f.coeffs.denominator(p.gamma()),
            })
        })
        .collect()
}

/// [`exponent_samples`] followed by [`fit_exponents`].
pub fn exponent_path(
    base: &ModelParams,
    path: ParamPath,
    g_c: f64,
    side: Side,
    branch: FluctuationBranch,
    grid: FitGrid,
) -> Result<ExponentFit, GaussianError> {
    fit_exponents(&exponent_samples(base, path, g_c, side, branch, grid), base.omega)
}

/// γ̃² + R² − 4P² of the normal theory in ω² units; a g̃-polynomial equal to
/// η (g̃² − g_c^+²)(g̃² − g_c^−²).
pub fn np_denominator(p: &ModelParams) -> f64 {
    np_coeffs(p).denominator(p.gamma()) / (p.omega * p.omega)
}
