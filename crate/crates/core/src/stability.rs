//! Linear stability of mean-field states after adiabatic elimination of the spin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::meanfield::MeanFieldState;
use crate::params::{eta, ModelParams};

/// Margin on max Re λ (in units of ω) below which a state counts as stable.
pub const STABILITY_MARGIN: f64 = 1e-10;

/// Reduced cavity matrix 𝕄 with d(δx, δy)/dt = ω 𝕄 (δx, δy).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
    /// Σ = 1 + 4g̃²[(1+τ)²x² + (1−τ)²y²].
    pub sigma: f64,
    /// Q = Σ det 𝕄, from its closed-form expansion.
    pub q_value: f64,
}

impl StabilityMatrix {
    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Roots of λ² − tr λ + det, dimensionless.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let half = 0.5 * self.trace();
        let root = Complex64::new(half * half - self.det(), 0.0).sqrt();
        [half - root, half + root]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    /// |max Re λ| within the margin.
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    /// Eigenvalues of ω𝕄, ascending real part.
    pub eigenvalues: [Complex64; 2],
    /// ω[−γ̃ ± √(γ̃ − Q/Σ)], the alternative closed form; diagnostic only.
    pub closed_form: [Complex64; 2],
    pub class: Stability,
}

impl StabilityVerdict {
    pub fn max_re(&self) -> f64 {
        self.eigenvalues[0].re.max(self.eigenvalues[1].re)
    }

    pub fn is_stable(&self) -> bool {
        self.class == Stability::Stable
    }
}

/// (δs_x, δs_y) = C (δx, δy) with the transverse spin fluctuations slaved to
/// the cavity.
pub fn spin_eliminate(p: &ModelParams, s: &MeanFieldState) -> [[f64; 2]; 2] {
    let (g, tau) = (p.g_tilde, p.tau);
    let (x, y) = (s.x, s.y);
    let g2 = g * g;
    let sigma = sigma(g, tau, x, y);
    let k = 2.0 * g * s.s_z / sigma;
    let up = (1.0 + tau).powi(2);
    let um = (1.0 - tau).powi(2);
    [
        [k * (1.0 + tau) * (4.0 * g2 * um * y * y + 1.0), -k * (1.0 + tau) * 4.0 * g2 * um * x * y],
        [k * (1.0 - tau) * 4.0 * g2 * up * x * y, -k * (1.0 - tau) * (4.0 * g2 * up * x * x + 1.0)],
    ]
}

fn sigma(g: f64, tau: f64, x: f64, y: f64) -> f64 {
    1.0 + 4.0 * g * g * ((1.0 + tau).powi(2) * x * x + (1.0 - tau).powi(2) * y * y)
}

pub fn build_m(p: &ModelParams, s: &MeanFieldState) -> StabilityMatrix {
    let (g, tau, k, gm) = (p.g_tilde, p.tau, p.kappa, p.gamma_tilde);
    let (x, y, sz) = (s.x, s.y, s.s_z);
    let g2 = g * g;
    let g4 = g2 * g2;
    let sig = sigma(g, tau, x, y);
    let up = (1.0 + tau).powi(2);
    let um = (1.0 - tau).powi(2);
    let w = (1.0 - tau * tau).powi(2);
    let cross = 4.0 * sz * x * y * w * g4 / sig;
    let m11 = -gm - cross;
    let m12 = 1.0 + sz * um * (4.0 * x * x * up * g2 + 1.0) * g2 / sig;
    let m21 = -(1.0 + 4.0 * k * g2) - sz * up * (4.0 * y * y * um * g2 + 1.0) * g2 / sig;
    let m22 = -gm + cross;
    let q_value = (1.0 + gm * gm + 4.0 * k * g2) * sig
        + 2.0 * (1.0 + tau * tau) * sz * g2
        + w * (sz * sz + 4.0 * (x * x + y * y) * sz) * g4
        + 4.0 * k * sz * um * g4 * (4.0 * g2 * up * x * x + 1.0);
    StabilityMatrix { m11, m12, m21, m22, sigma: sig, q_value }
}

/// Q at the normal state: 1 + γ̃² + 2(2κ−τ²−1)g̃² + ηg̃⁴.
pub fn q_np(g: f64, tau: f64, kappa: f64, gamma: f64) -> f64 {
    let g2 = g * g;
    1.0 + gamma * gamma + 2.0 * (2.0 * kappa - tau * tau - 1.0) * g2 + eta(tau, kappa) * g2 * g2
}

pub fn assess(p: &ModelParams, s: &MeanFieldState) -> StabilityVerdict {
    let m = build_m(p, s);
    let mut eigenvalues = m.eigenvalues().map(|l| l * p.omega);
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re));
    let gm = p.gamma_tilde;
    let r = Complex64::new(gm - m.q_value / m.sigma, 0.0).sqrt();
    let closed_form = [(-gm - r) * p.omega, (-gm + r) * p.omega];
    let max_re = eigenvalues[1].re;
    let margin = STABILITY_MARGIN * p.omega;
    let class = if max_re < -margin {
        Stability::Stable
    } else if max_re > margin {
        Stability::Unstable
    } else {
        Stability::Critical
    };
    StabilityVerdict { eigenvalues, closed_form, class }
}
