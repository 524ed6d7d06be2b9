//! Semiclassical steady states, critical boundaries and phase labels.
//!
//! With α = x + iy = √(ω/Δ)⟨a⟩ and s_∓ = (s_x ∓ i s_y)/2 the stationary
//! conditions reduce to a 2×2 linear system for (x, y) whose determinant
//! fixes s_z. All functions here are dimensionless (ω = 1 units).

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{eta, ModelParams, ParamPath};
use crate::roots::{bisect, newton_polish, scan_roots};
use crate::stability::{self, Stability, StabilityVerdict};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeanFieldError {
    #[error("|tau| = 1 makes the s_z prefactor (1-tau^2)^2 vanish (tau = {tau})")]
    DegenerateAnisotropy { tau: f64 },
    #[error("no real s_z root (h^2 - q = {discriminant})")]
    NoRealRoot { discriminant: f64 },
    #[error("s_z = {s_z} is outside [-1, 0)")]
    OutOfDomain { s_z: f64 },
    #[error("negative radicand {value} while normalising (x, y)")]
    NegativeRadicand { value: f64 },
    #[error("eta = 0 at tau = {tau}, kappa = {kappa}: g_c^± has an asymptote here")]
    EtaZero { tau: f64, kappa: f64 },
    #[error("no root of the merge condition in ({lo}, {hi})")]
    NoRootInWindow { lo: f64, hi: f64 },
    #[error("window ({lo}, {hi}) must be ordered and exclude tau = 1")]
    InvalidWindow { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    TrivialDown,
    TrivialUp,
    SuperradiantPlus,
    SuperradiantMinus,
}

impl Branch {
    pub fn is_superradiant(self) -> bool {
        matches!(self, Branch::SuperradiantPlus | Branch::SuperradiantMinus)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::TrivialDown => "trivial-down",
            Branch::TrivialUp => "trivial-up",
            Branch::SuperradiantPlus => "superradiant-plus-root",
            Branch::SuperradiantMinus => "superradiant-minus-root",
        }
    }
}

/// Sign in s_z = −(h ∓ √(h²−q)) / ((1−τ²)² g̃²).
///
/// `Minus` takes −√ inside the bracket and gives the larger (less negative) root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootSign {
    Minus,
    Plus,
}

impl RootSign {
    pub fn branch(self) -> Branch {
        match self {
            RootSign::Minus => Branch::SuperradiantMinus,
            RootSign::Plus => Branch::SuperradiantPlus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SzRoot {
    pub s_z: f64,
    pub sign: RootSign,
    /// s_z ∈ (−1, 0).
    pub physical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldState {
    pub x: f64,
    pub y: f64,
    pub s_x: f64,
    pub s_y: f64,
    pub s_z: f64,
    pub branch: Branch,
}

impl MeanFieldState {
    pub fn trivial_down() -> Self {
        Self { x: 0.0, y: 0.0, s_x: 0.0, s_y: 0.0, s_z: -1.0, branch: Branch::TrivialDown }
    }

    pub fn trivial_up() -> Self {
        Self { s_z: 1.0, branch: Branch::TrivialUp, ..Self::trivial_down() }
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// |s|² − 1.
    pub fn norm_defect(&self) -> f64 {
        self.s_x * self.s_x + self.s_y * self.s_y + self.s_z * self.s_z - 1.0
    }

    pub fn is_superradiant(&self) -> bool {
        self.branch.is_superradiant()
    }

    /// s_− = (s_x − i s_y)/2.
    pub fn s_minus(&self) -> Complex64 {
        Complex64::new(self.s_x, -self.s_y) * 0.5
    }
}

/// h² − q, the discriminant of the s_z quadratic. Negative means no
/// superradiant solution exists.
pub fn sz_discriminant(g: f64, tau: f64, kappa: f64, gamma: f64) -> f64 {
    let (h, q) = h_q(g, tau, kappa, gamma);
    h * h - q
}

fn h_q(g: f64, tau: f64, kappa: f64, gamma: f64) -> (f64, f64) {
    let g2 = g * g;
    let h = 1.0 + tau * tau + 2.0 * kappa * g2 * (1.0 - tau).powi(2);
    let q = (1.0 - tau * tau).powi(2) * (1.0 + 4.0 * kappa * g2 + gamma * gamma);
    (h, q)
}

/// Both s_z roots in cancellation-free form. Valid for every τ: at |τ| = 1 the
/// `Minus` root reduces to the isotropic result and the `Plus` root is dropped
/// because it runs off to −∞.
pub(crate) fn sz_roots_any_tau(p: &ModelParams) -> Result<Vec<SzRoot>, MeanFieldError> {
    let (g, tau) = (p.g_tilde, p.tau);
    let (h, q) = h_q(g, tau, p.kappa, p.gamma_tilde);
    let disc = h * h - q;
    if disc < 0.0 || g == 0.0 {
        return Err(MeanFieldError::NoRealRoot { discriminant: disc });
    }
    let sq = disc.sqrt();
    let g2 = g * g;
    let mut out = Vec::with_capacity(2);
    let s_minus = -(1.0 + 4.0 * p.kappa * g2 + p.gamma_tilde * p.gamma_tilde) / ((h + sq) * g2);
    out.push(tag(s_minus, RootSign::Minus));
    let c = (1.0 - tau * tau).powi(2) * g2;
    let s_plus = -(h + sq) / c;
    if s_plus.is_finite() {
        out.push(tag(s_plus, RootSign::Plus));
    }
    Ok(out)
}

fn tag(s_z: f64, sign: RootSign) -> SzRoot {
    SzRoot { s_z, sign, physical: s_z > -1.0 && s_z < 0.0 }
}

/// Nontrivial s_z candidates, `Minus` root first. Unphysical roots are kept
/// and flagged.
pub fn solve_sz(p: &ModelParams) -> Result<Vec<SzRoot>, MeanFieldError> {
    if (1.0 - p.tau * p.tau).abs() < 1e-12 {
        return Err(MeanFieldError::DegenerateAnisotropy { tau: p.tau });
    }
    sz_roots_any_tau(p)
}

/// The two Z₂-related states (x, y) and (−x, −y) for a given s_z; the one with
/// x ≥ 0 comes first. Only correlated signs solve the linear system, so there
/// are two states rather than four. s_z = −1 gives the trivial state twice.
pub fn solve_xy(p: &ModelParams, s_z: f64, sign: RootSign) -> Result<[MeanFieldState; 2], MeanFieldError> {
    if !(-1.0..0.0).contains(&s_z) {
        return Err(MeanFieldError::OutOfDomain { s_z });
    }
    let rad = 1.0 - s_z * s_z;
    if rad < 0.0 {
        return Err(MeanFieldError::NegativeRadicand { value: rad });
    }
    if rad == 0.0 {
        let t = MeanFieldState::trivial_down();
        return Ok([t, t]);
    }
    let (g, tau, gm) = (p.g_tilde, p.tau, p.gamma_tilde);
    let g2 = g * g;
    let a = 1.0 + 4.0 * p.kappa * g2 + g2 * (1.0 + tau).powi(2) * s_z;
    let b = 1.0 + g2 * (1.0 - tau).powi(2) * s_z;
    // Null vector of [[a, γ̃], [γ̃, −b]]; take the better conditioned column.
    let (vx, vy) = if b * b + gm * gm >= a * a + gm * gm { (b, gm) } else { (gm, -a) };
    let w = 4.0 * g2 * s_z * s_z * ((1.0 + tau).powi(2) * vx * vx + (1.0 - tau).powi(2) * vy * vy);
    if !(w > 0.0) {
        return Err(MeanFieldError::NegativeRadicand { value: w });
    }
    let scale = (rad / w).sqrt();
    let (mut x, mut y) = (vx * scale, vy * scale);
    if x < 0.0 || (x == 0.0 && y < 0.0) {
        x = -x;
        y = -y;
    }
    let make = |x: f64, y: f64| MeanFieldState {
        x,
        y,
        s_x: 2.0 * g * (1.0 + tau) * x * s_z,
        s_y: 2.0 * g * (tau - 1.0) * y * s_z,
        s_z,
        branch: sign.branch(),
    };
    Ok([make(x, y), make(-x, -y)])
}

/// Magnitudes of the three stationarity conditions: the cavity equation, the
/// transverse spin equation s_− = g̃(α+τα*)s_z, and Im[(α+τα*)s_+] = 0.
pub fn residual(p: &ModelParams, s: &MeanFieldState) -> [f64; 3] {
    let (g, tau) = (p.g_tilde, p.tau);
    let a = s.alpha();
    let sm = s.s_minus();
    let sp = sm.conj();
    let beta = a + a.conj() * tau;
    let cav = Complex64::new(1.0, -p.gamma_tilde) * a + (sm + sp * tau) * g + (a + a.conj()) * (2.0 * p.kappa * g * g);
    let trans = sm - beta * (g * s.s_z);
    let long = (beta * sp).im;
    [cav.norm(), trans.norm(), long.abs()]
}

/// g_c^± = √((τ²−2κ+1 ± √(4(κ−τ)²−γ̃²η))/η), returned as (minus, plus).
/// A branch is absent when its value is not a positive real.
pub fn critical_g_pm(tau: f64, kappa: f64, gamma: f64) -> Result<(Option<f64>, Option<f64>), MeanFieldError> {
    let e = eta(tau, kappa);
    if e.abs() < 1e-14 {
        return Err(MeanFieldError::EtaZero { tau, kappa });
    }
    let a = 4.0 * (kappa - tau).powi(2);
    let b = gamma * gamma * e;
    let mut rad = a - b;
    if rad < 0.0 {
        if rad > -1e-12 * (a + b.abs()).max(1.0) {
            rad = 0.0;
        } else {
            return Ok((None, None));
        }
    }
    let base = tau * tau - 2.0 * kappa + 1.0;
    let branch = |s: f64| {
        let v = (base + s * rad.sqrt()) / e;
        (v > 0.0 && v.is_finite()).then(|| v.sqrt())
    };
    Ok((branch(-1.0), branch(1.0)))
}

/// First-order boundary couplings g_c^b = √((2τ ± γ̃(1−τ²))/(2κ(τ−1)²)),
/// ascending. Empty for κ = 0, where the boundary is a set of τ values
/// instead (see [`critical_tau_b`]).
pub fn critical_g_b(tau: f64, kappa: f64, gamma: f64) -> Vec<f64> {
    if kappa == 0.0 {
        return Vec::new();
    }
    let den = 2.0 * kappa * (tau - 1.0).powi(2);
    let mut out: Vec<f64> = [1.0, -1.0]
        .iter()
        .filter_map(|s| {
            let v = (2.0 * tau + s * gamma * (1.0 - tau * tau)) / den;
            (v > 0.0 && v.is_finite()).then(|| v.sqrt())
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// κ = 0 boundaries τ_c^b = ±(1 ± √(1+γ̃²))/γ̃, ascending.
pub fn critical_tau_b(gamma: f64) -> Vec<f64> {
    if gamma <= 0.0 {
        return Vec::new();
    }
    let s = (1.0 + gamma * gamma).sqrt();
    let small = gamma / (1.0 + s);
    let large = (1.0 + s) / gamma;
    let mut out = vec![-large, -small, small, large];
    out.sort_by(f64::total_cmp);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergePoint {
    pub tau_c_s: f64,
    /// Common value g_c0 of g_c^+ and g_c^− at τ_c^s.
    pub g_c0: Option<f64>,
}

/// Merge condition squared: 4(κ−τ)² − γ̃²η(τ). Both sides of the unsquared
/// form are nonnegative wherever it is defined, so the root sets coincide.
pub fn merge_function(tau: f64, kappa: f64, gamma: f64) -> f64 {
    4.0 * (kappa - tau).powi(2) - gamma * gamma * eta(tau, kappa)
}

/// Root of |(κ−τ)/(1−τ)| = γ̃√(((1+τ)/2)² − κ) inside `window`, i.e. the
/// anisotropy at which g_c^+ and g_c^− merge.
pub fn merge_tau(kappa: f64, gamma: f64, window: (f64, f64)) -> Result<MergePoint, MeanFieldError> {
    let (lo, hi) = window;
    if !(lo < hi) || (lo <= 1.0 && hi >= 1.0) {
        return Err(MeanFieldError::InvalidWindow { lo, hi });
    }
    let f = |t: f64| merge_function(t, kappa, gamma);
    let root =
        scan_roots(f, lo, hi, 2001, 1e-15).into_iter().next().ok_or(MeanFieldError::NoRootInWindow { lo, hi })?;
    let tau = newton_polish(f, root);
    let e = eta(tau, kappa);
    let g2 = (tau * tau + 1.0 - 2.0 * kappa) / e;
    Ok(MergePoint { tau_c_s: tau, g_c0: (g2 > 0.0 && g2.is_finite()).then(|| g2.sqrt()) })
}

/// Points where the first-order boundary meets a second-order line.
///
/// For κ > 0 they are located along each g_c^b branch as the anisotropy at
/// which the double root s_z = −h/((1−τ²)²g̃²) reaches −1: there s_z = −1 also
/// solves the NP instability condition, so the point lies on g_c^±. The two
/// curves touch rather than cross, which is why the difference g_c^b − g_c^±
/// is not used as the bracketing function. For κ = 0 the boundaries are the
/// vertical lines τ_c^b and the points are g_c^± evaluated on them.
pub fn tricritical_points(kappa: f64, gamma: f64, tau_window: (f64, f64)) -> Vec<(f64, f64)> {
    let (lo, hi) = tau_window;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    if kappa == 0.0 {
        for t in critical_tau_b(gamma) {
            if t < lo || t > hi {
                continue;
            }
            if let Ok((gm, gp)) = critical_g_pm(t, 0.0, gamma) {
                pts.extend(gm.into_iter().chain(gp).map(|g| (t, g)));
            }
        }
    } else {
        for s in [1.0, -1.0] {
            let g_of = move |t: f64| {
                let v = (2.0 * t + s * gamma * (1.0 - t * t)) / (2.0 * kappa * (t - 1.0).powi(2));
                if v > 0.0 {
                    v.sqrt()
                } else {
                    f64::NAN
                }
            };
            let f = |t: f64| {
                let g = g_of(t);
                let (h, _) = h_q(g, t, kappa, gamma);
                1.0 - h / ((1.0 - t * t).powi(2) * g * g)
            };
            for t in scan_roots(f, lo, hi, 8001, 1e-15) {
                pts.push((t, g_of(t)));
            }
        }
    }
    pts.retain(|(t, g)| t.is_finite() && g.is_finite());
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-6 && (a.1 - b.1).abs() < 1e-6);
    pts
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CriticalSet {
    pub g_c_minus: Option<f64>,
    pub g_c_plus: Option<f64>,
    /// τ lies on the η = 0 asymptote of g_c^±.
    pub eta_asymptote: bool,
    pub g_c_b: Vec<f64>,
    pub tau_c_b: Vec<f64>,
    pub tau_c_s: Option<f64>,
    pub g_c0: Option<f64>,
    pub tricritical: Vec<(f64, f64)>,
}

/// Collects every boundary at one anisotropy. The merge and tricritical
/// searches are run over `window`, which should exclude τ = 1.
pub fn critical_set(tau: f64, kappa: f64, gamma: f64, window: (f64, f64)) -> CriticalSet {
    let mut cs = CriticalSet::default();
    match critical_g_pm(tau, kappa, gamma) {
        Ok((m, p)) => {
            cs.g_c_minus = m;
            cs.g_c_plus = p;
        }
        Err(_) => cs.eta_asymptote = true,
    }
    cs.g_c_b = critical_g_b(tau, kappa, gamma);
    if kappa == 0.0 {
        cs.tau_c_b = critical_tau_b(gamma);
    }
    if let Ok(m) = merge_tau(kappa, gamma, window) {
        cs.tau_c_s = Some(m.tau_c_s);
        cs.g_c0 = m.g_c0;
    }
    cs.tricritical = tricritical_points(kappa, gamma, window);
    cs
}

/// Boundary crossings met while moving along a one-parameter path in g̃.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathCrossings {
    pub g_b: Vec<f64>,
    pub g_plus: Vec<f64>,
    pub g_minus: Vec<f64>,
}

pub fn path_crossings(kappa: f64, gamma: f64, path: ParamPath, g_range: (f64, f64), samples: usize) -> PathCrossings {
    let (lo, hi) = g_range;
    let mut out = PathCrossings::default();
    if kappa != 0.0 {
        out.g_b = scan_roots(|g| sz_discriminant(g, path.tau_at(g), kappa, gamma), lo, hi, samples, 1e-15);
    }
    let qnp = |g: f64| stability::q_np(g, path.tau_at(g), kappa, gamma);
    for g in scan_roots(qnp, lo, hi, samples, 1e-15) {
        let Ok((gm, gp)) = critical_g_pm(path.tau_at(g), kappa, gamma) else {
            continue;
        };
        let near = |c: Option<f64>| c.is_some_and(|c| (c - g).abs() < 1e-6 * g.max(1.0));
        if near(gp) {
            out.g_plus.push(g);
        } else if near(gm) {
            out.g_minus.push(g);
        }
    }
    out
}

/// Refines a root of `f` in [lo, hi] to 1e-12 and polishes it.
pub fn refine(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    bisect(&f, lo, hi, 1e-14).map(|r| newton_polish(&f, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    #[serde(rename = "NP")]
    Normal,
    #[serde(rename = "SRP")]
    Superradiant,
    #[serde(rename = "NP+SRP")]
    Bistable,
    /// No mean-field state passes the stability filter (only at critical
    /// margins or in regions with no stable fixed point).
    #[serde(rename = "none")]
    Unresolved,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Normal => "NP",
            PhaseLabel::Superradiant => "SRP",
            PhaseLabel::Bistable => "NP+SRP",
            PhaseLabel::Unresolved => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Normal, Self::Superradiant, Self::Bistable, Self::Unresolved].into_iter().find(|l| l.as_str() == s)
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub state: MeanFieldState,
    pub verdict: StabilityVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub label: PhaseLabel,
    /// Stable states; superradiant ones come in Z₂ pairs.
    pub stable: Vec<MeanFieldState>,
    /// Every candidate examined, including unstable ones.
    pub candidates: Vec<Candidate>,
    /// All s_z roots, physical or not.
    pub roots: Vec<SzRoot>,
}

impl PhaseReport {
    /// Stable superradiant state with x ≥ 0, preferring the `Minus` root.
    pub fn superradiant(&self) -> Option<&MeanFieldState> {
        let mut srp: Vec<&MeanFieldState> = self.stable.iter().filter(|s| s.is_superradiant() && s.x >= 0.0).collect();
        srp.sort_by_key(|s| s.branch != Branch::SuperradiantMinus);
        srp.first().copied()
    }
}

/// Labels a parameter point by which mean-field states are dynamically stable.
/// The spin-up state is not considered.
pub fn classify_phase(p: &ModelParams) -> PhaseReport {
    let np = MeanFieldState::trivial_down();
    let mut candidates = vec![Candidate { state: np, verdict: stability::assess(p, &np) }];
    let roots = sz_roots_any_tau(p).unwrap_or_default();
    for root in roots.iter().filter(|r| r.physical) {
        if let Ok(states) = solve_xy(p, root.s_z, root.sign) {
            for s in states {
                candidates.push(Candidate { state: s, verdict: stability::assess(p, &s) });
            }
        }
    }
    let stable: Vec<MeanFieldState> =
        candidates.iter().filter(|c| c.verdict.class == Stability::Stable).map(|c| c.state).collect();
    let has_np = stable.iter().any(|s| !s.is_superradiant());
    let has_srp = stable.iter().any(|s| s.is_superradiant());
    let label = match (has_np, has_srp) {
        (true, true) => PhaseLabel::Bistable,
        (true, false) => PhaseLabel::Normal,
        (false, true) => PhaseLabel::Superradiant,
        (false, false) => PhaseLabel::Unresolved,
    };
    PhaseReport { label, stable, candidates, roots }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(g: f64, tau: f64) -> ModelParams {
        ModelParams::unit(g, tau, 3.0, 0.5).unwrap()
    }

    #[test]
    fn solve_sz_rejects_isotropic() {
        let q = ModelParams::unit(1.0, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(solve_sz(&q), Err(MeanFieldError::DegenerateAnisotropy { tau: 1.0 }));
    }

    #[test]
    fn bistable_point_has_physical_root() {
        let roots = solve_sz(&p(0.5, 6.0)).unwrap();
        assert!(roots.iter().any(|r| r.physical));
    }

    #[test]
    fn double_root_at_boundary() {
        let (tau, kappa, gamma) = (6.0, 3.0, 0.5);
        let gb = critical_g_b(tau, kappa, gamma)[0];
        let q = ModelParams::unit(gb, tau, kappa, gamma).unwrap();
        let roots = solve_sz(&q).unwrap();
        let (h, _) = h_q(gb, tau, kappa, gamma);
        let double = -h / ((1.0 - tau * tau).powi(2) * gb * gb);
        for r in roots {
            assert!((r.s_z - double).abs() < 1e-6, "{} vs {double}", r.s_z);
        }
    }

    #[test]
    fn endpoint_sz_minus_one_is_trivial() {
        let [a, b] = solve_xy(&p(1.0, 2.0), -1.0, RootSign::Minus).unwrap();
        assert_eq!(a, MeanFieldState::trivial_down());
        assert_eq!(b, MeanFieldState::trivial_down());
    }

    #[test]
    fn solve_xy_rejects_positive_sz() {
        assert!(matches!(solve_xy(&p(1.0, 2.0), 0.2, RootSign::Minus), Err(MeanFieldError::OutOfDomain { .. })));
    }

    #[test]
    fn trivial_states() {
        assert_eq!(MeanFieldState::trivial_up().s_z, 1.0);
        assert_eq!(MeanFieldState::trivial_down().norm_defect(), 0.0);
    }

    #[test]
    fn eta_zero_is_an_error() {
        assert!(matches!(critical_g_pm(1.0, 3.0, 0.5), Err(MeanFieldError::EtaZero { .. })));
        let t = 2.0 * 3f64.sqrt() - 1.0;
        assert!(critical_g_pm(t, 3.0, 0.5).is_err());
    }

    #[test]
    fn g_pm_at_tau_two() {
        let (m, pl) = critical_g_pm(2.0, 3.0, 0.5).unwrap();
        assert!(pl.is_none());
        assert!((m.unwrap() - 1.029_473_9).abs() < 1e-6);
    }

    #[test]
    fn tau_b_count() {
        assert_eq!(critical_tau_b(0.5).len(), 4);
        assert!(critical_tau_b(0.0).is_empty());
        assert!(critical_g_b(2.0, 0.0, 0.5).is_empty());
    }

    #[test]
    fn merge_window_must_exclude_one() {
        assert!(matches!(merge_tau(3.0, 0.5, (0.5, 3.0)), Err(MeanFieldError::InvalidWindow { .. })));
        assert!(matches!(merge_tau(3.0, 0.5, (4.0, 5.0)), Err(MeanFieldError::NoRootInWindow { .. })));
    }

    #[test]
    fn label_strings_round_trip() {
        for l in [PhaseLabel::Normal, PhaseLabel::Superradiant, PhaseLabel::Bistable, PhaseLabel::Unresolved] {
            assert_eq!(PhaseLabel::parse(l.as_str()), Some(l));
        }
    }

    #[test]
    fn srp_window_on_counter_rotating_path() {
        let g = 1.5;
        let r = classify_phase(&p(g, 3.0 / g));
        assert_eq!(r.label, PhaseLabel::Superradiant);
        assert_eq!(r.stable.len(), 2);
    }
}
