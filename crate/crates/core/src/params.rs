use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("{name} must be {rule}, got {value}")]
    OutOfRange { name: &'static str, rule: &'static str, value: f64 },
}

/// Parameter tuple of the damped anisotropic Rabi model with the A² term.
///
/// `omega` and `delta` carry energy units; the remaining fields are
/// dimensionless (`g_tilde = g/√(ωΔ)`, `kappa = D/(g²/Δ)`, `gamma_tilde = γ/ω`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub delta: f64,
    pub g_tilde: f64,
    pub tau: f64,
    pub kappa: f64,
    pub gamma_tilde: f64,
}

impl ModelParams {
    pub fn new(
        omega: f64,
        delta: f64,
        g_tilde: f64,
        tau: f64,
        kappa: f64,
        gamma_tilde: f64,
    ) -> Result<Self, ParamError> {
        let p = Self { omega, delta, g_tilde, tau, kappa, gamma_tilde };
        p.validate()?;
        Ok(p)
    }

    /// ω = Δ = 1. Mean-field and Gaussian quantities only depend on the
    /// dimensionless fields, so this is the usual entry point for them.
    pub fn unit(g_tilde: f64, tau: f64, kappa: f64, gamma_tilde: f64) -> Result<Self, ParamError> {
        Self::new(1.0, 1.0, g_tilde, tau, kappa, gamma_tilde)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let checks: [(&'static str, f64, bool, &'static str); 6] = [
            ("omega", self.omega, self.omega > 0.0, "> 0"),
            ("delta", self.delta, self.delta > 0.0, "> 0"),
            ("g_tilde", self.g_tilde, self.g_tilde >= 0.0, ">= 0"),
            ("tau", self.tau, true, "finite"),
            ("kappa", self.kappa, self.kappa >= 0.0, ">= 0"),
            ("gamma_tilde", self.gamma_tilde, self.gamma_tilde >= 0.0, ">= 0"),
        ];
        for (name, value, ok, rule) in checks {
            if !ok || !value.is_finite() {
                return Err(ParamError::OutOfRange { name, rule, value });
            }
        }
        Ok(())
    }

    pub fn with_g(mut self, g_tilde: f64) -> Self {
        self.g_tilde = g_tilde;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    /// Δ/ω.
    pub fn ratio(&self) -> f64 {
        self.delta / self.omega
    }

    /// Damping rate γ in energy units.
    pub fn gamma(&self) -> f64 {
        self.gamma_tilde * self.omega
    }

    /// η = (τ−1)²((1+τ)²−4κ).
    pub fn eta(&self) -> f64 {
        eta(self.tau, self.kappa)
    }
}

pub fn eta(tau: f64, kappa: f64) -> f64 {
    (tau - 1.0).powi(2) * ((1.0 + tau).powi(2) - 4.0 * kappa)
}

/// One-parameter slices through (τ, g̃) used by sweeps and exponent fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum ParamPath {
    /// τ held fixed while g̃ varies.
    FixedTau(f64),
    /// Counter-rotating coupling g_cr = τ g̃ held fixed, so τ = g_cr / g̃.
    FixedCounterRotating(f64),
}

impl ParamPath {
    pub fn tau_at(&self, g_tilde: f64) -> f64 {
        match *self {
            ParamPath::FixedTau(t) => t,
            ParamPath::FixedCounterRotating(gcr) => gcr / g_tilde,
        }
    }

    pub fn params(&self, base: &ModelParams, g_tilde: f64) -> ModelParams {
        base.with_g(g_tilde).with_tau(self.tau_at(g_tilde))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_coupling() {
        assert!(matches!(ModelParams::unit(-0.1, 1.0, 0.0, 0.5), Err(ParamError::OutOfRange { name: "g_tilde", .. })));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ModelParams::unit(0.5, f64::NAN, 0.0, 0.5).is_err());
        assert!(ModelParams::new(0.0, 1.0, 0.5, 1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn counter_rotating_path() {
        let path = ParamPath::FixedCounterRotating(3.0);
        assert_eq!(path.tau_at(1.5), 2.0);
        let base = ModelParams::unit(0.0, 0.0, 3.0, 0.5).unwrap();
        let p = path.params(&base, 0.75);
        assert_eq!((p.tau, p.g_tilde), (4.0, 0.75));
    }
}
