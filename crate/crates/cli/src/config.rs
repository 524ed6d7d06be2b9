use aqrm::gaussian::{FitGrid, FluctuationBranch, Side};
use aqrm::meanfield::RootSign;
use aqrm::{ModelParams, ParamPath};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config file {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },
}

pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    PhaseDiagram,
    CriticalLines,
    Fluctuations,
    ExponentFit,
    Dynamics,
    Basin,
    SteadyState,
    Wigner,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::PhaseDiagram => "phase-diagram",
            Mode::CriticalLines => "critical-lines",
            Mode::Fluctuations => "fluctuations",
            Mode::ExponentFit => "exponent-fit",
            Mode::Dynamics => "dynamics",
            Mode::Basin => "basin",
            Mode::SteadyState => "steady-state",
            Mode::Wigner => "wigner",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Tau,
    GTilde,
    Kappa,
    GammaTilde,
    ReAlpha0,
    ImAlpha0,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Tau => "tau",
            Axis::GTilde => "g_tilde",
            Axis::Kappa => "kappa",
            Axis::GammaTilde => "gamma_tilde",
            Axis::ReAlpha0 => "re_alpha0",
            Axis::ImAlpha0 => "im_alpha0",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Axis::Tau, Axis::GTilde, Axis::Kappa, Axis::GammaTilde, Axis::ReAlpha0, Axis::ImAlpha0]
            .into_iter()
            .find(|a| a.as_str() == s)
    }
}

/// Deserialises from either the `axis:start:stop:count[:scale]` string or the field form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AxisRangeRepr")]
pub struct AxisRange {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    /// Zero gives an empty sweep.
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisRangeFields {
    axis: Axis,
    start: f64,
    stop: f64,
    count: usize,
    #[serde(default)]
    scale: Scale,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AxisRangeRepr {
    Text(String),
    Fields(AxisRangeFields),
}

impl TryFrom<AxisRangeRepr> for AxisRange {
    type Error = ConfigError;

    fn try_from(r: AxisRangeRepr) -> Result<Self, ConfigError> {
        match r {
            AxisRangeRepr::Text(s) => Self::parse(&s),
            AxisRangeRepr::Fields(f) => {
                Ok(Self { axis: f.axis, start: f.start, stop: f.stop, count: f.count, scale: f.scale })
            }
        }
    }
}

impl AxisRange {
    /// `axis:start:stop:count[:scale]`.
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(invalid("sweep", format!("expected axis:start:stop:count[:scale], got {s:?}")));
        }
        let axis = Axis::parse(parts[0]).ok_or_else(|| invalid("sweep", format!("unknown axis {:?}", parts[0])))?;
        let num = |t: &str| t.parse::<f64>().map_err(|_| invalid("sweep", format!("bad number {t:?}")));
        let count = parts[3].parse().map_err(|_| invalid("sweep", format!("bad count {:?}", parts[3])))?;
        let scale = match parts.get(4).copied() {
            None | Some("linear") => Scale::Linear,
            Some("geometric") => Scale::Geometric,
            Some(o) => return Err(invalid("sweep", format!("unknown scale {o:?}"))),
        };
        Ok(Self { axis, start: num(parts[1])?, stop: num(parts[2])?, count, scale })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let f = format!("sweep.{}", self.axis.as_str());
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(invalid(&f, "bounds must be finite"));
        }
        if self.count == 1 {
            return Err(invalid(&f, "count must be 0 (empty) or at least 2"));
        }
        if self.scale == Scale::Geometric && !(self.start * self.stop > 0.0) {
            return Err(invalid(&f, "geometric scale needs non-zero bounds of equal sign"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                if k == n - 1 {
                    return self.stop;
                }
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * t,
                    Scale::Geometric => {
                        let s = self.start.signum();
                        s * ((self.start.abs().ln() * (1.0 - t)) + self.stop.abs().ln() * t).exp()
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitBranch {
    #[default]
    Np,
    SrpMinus,
    SrpPlus,
}

impl FitBranch {
    pub fn to_core(self) -> FluctuationBranch {
        match self {
            FitBranch::Np => FluctuationBranch::Normal,
            FitBranch::SrpMinus => FluctuationBranch::Superradiant(RootSign::Minus),
            FitBranch::SrpPlus => FluctuationBranch::Superradiant(RootSign::Plus),
        }
    }
}

/// Critical coupling an exponent fit approaches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalTarget {
    GMinus,
    GPlus,
    /// Lowest first-order boundary on the path.
    GB,
    /// Second first-order boundary on the path.
    GB2,
    /// Merge point; the path is replaced by τ = τ_c^s.
    GC0,
    Value(f64),
}

impl CriticalTarget {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "g-minus" => CriticalTarget::GMinus,
            "g-plus" => CriticalTarget::GPlus,
            "g-b" => CriticalTarget::GB,
            "g-b2" => CriticalTarget::GB2,
            "g-c0" => CriticalTarget::GC0,
            other => CriticalTarget::Value(other.parse().map_err(|_| {
                invalid("critical", format!("expected g-minus|g-plus|g-b|g-b2|g-c0|<number>, got {other:?}"))
            })?),
        })
    }
}

/// Cavity state handed to the Wigner transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    /// Spin-down block, renormalised.
    #[default]
    SpinDown,
    /// Partial trace over the spin.
    Cavity,
}

impl Projection {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "spin-down" => Ok(Projection::SpinDown),
            "cavity" => Ok(Projection::Cavity),
            _ => Err(invalid("projection", format!("expected spin-down|cavity, got {s:?}"))),
        }
    }
}

pub fn parse_path(s: &str) -> Result<ParamPath, ConfigError> {
    let (kind, v) = s.split_once(':').ok_or_else(|| invalid("path", format!("expected kind:value, got {s:?}")))?;
    let v: f64 = v.parse().map_err(|_| invalid("path", format!("bad value {v:?}")))?;
    match kind {
        "fixed-tau" => Ok(ParamPath::FixedTau(v)),
        "fixed-counter-rotating" | "counter-rotating" => Ok(ParamPath::FixedCounterRotating(v)),
        _ => Err(invalid("path", format!("unknown kind {kind:?}"))),
    }
}

pub fn parse_pair(field: &str, s: &str) -> Result<[f64; 2], ConfigError> {
    let (a, b) = s.split_once(',').ok_or_else(|| invalid(field, format!("expected a,b, got {s:?}")))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|_| invalid(field, format!("bad number {t:?}")));
    Ok([p(a)?, p(b)?])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub mode: Mode,
    pub omega: f64,
    pub delta: f64,
    pub g_tilde: f64,
    pub tau: f64,
    pub kappa: f64,
    pub gamma_tilde: f64,
    pub sweep: Vec<AxisRange>,
    /// Ties τ to g̃ on g̃ sweeps and exponent fits.
    pub path: Option<ParamPath>,
    pub output: PathBuf,
    pub workers: Option<usize>,
    pub seed: u64,

    pub alpha0: Vec<[f64; 2]>,
    pub random_initial: usize,
    pub random_radius: f64,
    pub branch: i32,
    pub t_max: f64,
    pub tol: f64,
    /// Evenly spaced samples per exported trajectory; 0 keeps integrator steps.
    pub samples: usize,

    pub n_max: usize,
    pub ratio: f64,
    pub half_width: f64,
    pub spacing: f64,
    pub projection: Projection,
    /// Peaks below this fraction of max W are ignored.
    pub peak_fraction: f64,

    pub critical: CriticalTarget,
    pub side: Side,
    pub fit_branch: FitBranch,
    pub min_distance: f64,
    pub max_distance: f64,
    pub fit_points: usize,

    /// τ window searched for the merge point and tricritical points.
    pub tau_window: [f64; 2],
    /// g̃ window searched for crossings along a path.
    pub g_window: [f64; 2],
}

impl Default for SweepConfig {
    fn default() -> Self {
        let fit = FitGrid::default();
        Self {
            mode: Mode::PhaseDiagram,
            omega: 1.0,
            delta: 1.0,
            g_tilde: 1.0,
            tau: 1.0,
            kappa: 3.0,
            gamma_tilde: 0.5,
            sweep: Vec::new(),
            path: None,
            output: PathBuf::from("aqrm-out"),
            workers: None,
            seed: 0,
            alpha0: Vec::new(),
            random_initial: 0,
            random_radius: 1.5,
            branch: -1,
            t_max: 4000.0,
            tol: 1e-10,
            samples: 400,
            n_max: 40,
            ratio: 50.0,
            half_width: 4.0,
            spacing: 0.05,
            projection: Projection::SpinDown,
            peak_fraction: 0.05,
            critical: CriticalTarget::GMinus,
            side: Side::Below,
            fit_branch: FitBranch::Np,
            min_distance: fit.min_distance,
            max_distance: fit.max_distance,
            fit_points: fit.points,
            tau_window: [1.5, 8.0],
            g_window: [1e-3, 5.0],
        }
    }
}

impl SweepConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    pub fn base_params(&self) -> Result<ModelParams, ConfigError> {
        ModelParams::new(self.omega, self.delta, self.g_tilde, self.tau, self.kappa, self.gamma_tilde)
            .map_err(|e| invalid("params", e.to_string()))
    }

    pub fn fit_grid(&self) -> FitGrid {
        FitGrid { min_distance: self.min_distance, max_distance: self.max_distance, points: self.fit_points }
    }

    pub fn axis(&self, a: Axis) -> Option<&AxisRange> {
        self.sweep.iter().find(|r| r.axis == a)
    }

    /// Canonical JSON of everything that affects data rows.
    pub fn data_json(&self) -> String {
        let mut c = self.clone();
        c.output = PathBuf::new();
        c.workers = None;
        serde_json::to_string(&c).expect("config serialises")
    }

    pub fn hash(&self) -> String {
        let d = Sha256::digest(self.data_json().as_bytes());
        d.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.base_params()?;
        for r in &self.sweep {
            r.validate()?;
        }
        let mut seen = std::collections::HashSet::new();
        for r in &self.sweep {
            if !seen.insert(r.axis) {
                return Err(invalid("sweep", format!("axis {} given twice", r.axis.as_str())));
            }
        }
        let param_axes = [Axis::Tau, Axis::GTilde, Axis::Kappa, Axis::GammaTilde];
        let alpha_axes = [Axis::ReAlpha0, Axis::ImAlpha0];
        let only = |allowed: &[Axis]| -> Result<(), ConfigError> {
            match self.sweep.iter().find(|r| !allowed.contains(&r.axis)) {
                Some(r) => {
                    Err(invalid("sweep", format!("axis {} not allowed in {}", r.axis.as_str(), self.mode.as_str())))
                }
                None => Ok(()),
            }
        };
        let n = self.sweep.len();
        match self.mode {
            Mode::PhaseDiagram | Mode::Fluctuations => {
                only(&param_axes)?;
                if !(1..=2).contains(&n) {
                    return Err(invalid("sweep", "raster modes need one or two axes"));
                }
            }
            Mode::CriticalLines => {
                only(&[Axis::Tau])?;
                if n != 1 {
                    return Err(invalid("sweep", "critical-lines sweeps exactly the tau axis"));
                }
            }
            Mode::Basin => {
                only(&alpha_axes)?;
                if n != 2 {
                    return Err(invalid("sweep", "basin needs re_alpha0 and im_alpha0 axes"));
                }
            }
            Mode::SteadyState => {
                only(&param_axes)?;
                if n > 2 {
                    return Err(invalid("sweep", "at most two axes"));
                }
            }
            Mode::ExponentFit | Mode::Dynamics | Mode::Wigner => {
                if n != 0 {
                    return Err(invalid("sweep", format!("{} takes no sweep", self.mode.as_str())));
                }
            }
        }
        if self.path.is_some() && self.sweep.iter().any(|r| r.axis == Axis::Tau) {
            return Err(invalid("path", "a path fixes tau; do not also sweep it"));
        }
        if let Some(ParamPath::FixedCounterRotating(_)) = self.path {
            if self.sweep.iter().any(|r| r.axis == Axis::GTilde && r.start.min(r.stop) <= 0.0) {
                return Err(invalid("path", "counter-rotating path needs g_tilde > 0"));
            }
        }
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be at least 1"));
        }
        match self.mode {
            Mode::Dynamics | Mode::Basin => {
                if self.branch != 1 && self.branch != -1 {
                    return Err(invalid("branch", "must be 1 or -1"));
                }
                if !(self.t_max > 0.0 && self.t_max.is_finite()) {
                    return Err(invalid("t_max", "must be positive"));
                }
                if !(self.tol > 0.0 && self.tol.is_finite()) {
                    return Err(invalid("tol", "must be positive"));
                }
                if self.mode == Mode::Dynamics && self.alpha0.is_empty() && self.random_initial == 0 {
                    return Err(invalid("alpha0", "give at least one initial condition or random_initial"));
                }
                if self.alpha0.iter().flatten().any(|v| !v.is_finite()) || !self.random_radius.is_finite() {
                    return Err(invalid("alpha0", "must be finite"));
                }
            }
            Mode::SteadyState | Mode::Wigner => {
                if self.n_max < 2 {
                    return Err(invalid("n_max", "must be at least 2"));
                }
                if !(self.ratio > 0.0 && self.ratio.is_finite()) {
                    return Err(invalid("ratio", "must be positive"));
                }
                if self.mode == Mode::Wigner
                    && !(self.half_width > 0.0 && self.spacing > 0.0 && self.spacing < self.half_width)
                {
                    return Err(invalid("spacing", "need 0 < spacing < half_width"));
                }
                if !(self.peak_fraction >= 0.0 && self.peak_fraction < 1.0) {
                    return Err(invalid("peak_fraction", "must lie in [0, 1)"));
                }
            }
            Mode::ExponentFit => {
                let g = self.fit_grid();
                if !(g.min_distance > 0.0 && g.min_distance < g.max_distance && g.max_distance.is_finite()) {
                    return Err(invalid("min_distance", "need 0 < min_distance < max_distance"));
                }
                if g.points < 2 {
                    return Err(invalid("fit_points", "must be at least 2"));
                }
            }
            _ => {}
        }
        if !(self.tau_window[0] < self.tau_window[1]) || !(self.g_window[0] < self.g_window[1]) {
            return Err(invalid("window", "lower bound must be below upper bound"));
        }
        Ok(())
    }
}
