use crate::config::{Axis, ConfigError, CriticalTarget, Mode, Projection, SweepConfig};
use crate::output::{fmt_f64, fmt_opt, fmt_text, CellOut, OutputError, Run, RunSummary, TableSpec};
use aqrm::dynamics::{self, BasinLabel, DynamicsError, IntegrateOptions, SpinBranch, Trajectory};
use aqrm::fockspace::{self, HilbertConfig};
use aqrm::gaussian::{self, FluctuationBranch};
use aqrm::meanfield::{self, MeanFieldState, PhaseLabel, RootSign};
use aqrm::{stability, ModelParams, ParamPath};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Output(#[from] OutputError),
}

/// Samples per g̃ scan when locating crossings along a counter-rotating path.
const PATH_SCAN: usize = 4000;
const WIGNER_EDGE_TOL: f64 = 1e-6;
const WIGNER_EXPANSIONS: usize = 6;
const PEAK_SEPARATION: usize = 3;

/// Swept axes with the first listed one outermost.
struct Raster {
    axes: Vec<Axis>,
    values: Vec<Vec<f64>>,
}

impl Raster {
    fn new(cfg: &SweepConfig) -> Self {
        Self {
            axes: cfg.sweep.iter().map(|r| r.axis).collect(),
            values: cfg.sweep.iter().map(|r| r.values()).collect(),
        }
    }

    fn len(&self) -> usize {
        self.values.iter().map(Vec::len).product()
    }

    fn coords(&self, mut cell: usize) -> Vec<(Axis, f64)> {
        let mut out = vec![(Axis::Tau, 0.0); self.axes.len()];
        for k in (0..self.axes.len()).rev() {
            let n = self.values[k].len();
            out[k] = (self.axes[k], self.values[k][cell % n]);
            cell /= n;
        }
        out
    }
}

/// Parameter columns: τ and g̃ always, κ and γ̃ when swept.
fn param_columns(cfg: &SweepConfig) -> Vec<&'static str> {
    let mut c = vec!["tau", "g_tilde"];
    for a in [Axis::Kappa, Axis::GammaTilde] {
        if cfg.axis(a).is_some() {
            c.push(a.as_str());
        }
    }
    c
}

fn param_values(cfg: &SweepConfig, p: &ModelParams) -> Vec<String> {
    let mut v = vec![fmt_f64(p.tau), fmt_f64(p.g_tilde)];
    if cfg.axis(Axis::Kappa).is_some() {
        v.push(fmt_f64(p.kappa));
    }
    if cfg.axis(Axis::GammaTilde).is_some() {
        v.push(fmt_f64(p.gamma_tilde));
    }
    v
}

/// Fixed parameters with the path applied.
fn point_params(cfg: &SweepConfig) -> Result<ModelParams, ConfigError> {
    let base = cfg.base_params()?;
    let p = match cfg.path {
        Some(path) => path.params(&base, base.g_tilde),
        None => base,
    };
    p.validate().map_err(|e| crate::config::invalid("path", e.to_string()))?;
    Ok(p)
}

/// Parameters of one raster cell. The row still carries the requested
/// coordinates when they are invalid.
fn cell_params(cfg: &SweepConfig, coords: &[(Axis, f64)]) -> (ModelParams, Result<(), String>) {
    let mut p = cfg.base_params().expect("validated");
    for &(a, v) in coords {
        match a {
            Axis::Tau => p.tau = v,
            Axis::GTilde => p.g_tilde = v,
            Axis::Kappa => p.kappa = v,
            Axis::GammaTilde => p.gamma_tilde = v,
            Axis::ReAlpha0 | Axis::ImAlpha0 => {}
        }
    }
    if let Some(path) = cfg.path {
        p.tau = path.tau_at(p.g_tilde);
    }
    let ok = p.validate().map_err(|e| e.to_string());
    (p, ok)
}

fn failed_row(out: &mut CellOut, prefix: Vec<String>, width: usize, error: &str) {
    let mut row = prefix;
    row.resize(width - 1, String::new());
    row.push(fmt_text(error));
    out.push(0, row);
    out.failed = true;
}

fn c_split(z: Complex64) -> [String; 2] {
    [fmt_f64(z.re), fmt_f64(z.im)]
}

fn raster_run<F>(cfg: &SweepConfig, workers: usize, table: TableSpec, f: F) -> Result<RunSummary, RunError>
where
    F: Fn(&ModelParams, &mut CellOut, Vec<String>, usize) + Sync,
{
    let raster = Raster::new(cfg);
    let width = table.columns.len();
    let mut run = Run::open(cfg, vec![table], raster.len(), workers)?;
    run.cells(|i| {
        let mut out = CellOut::new(1);
        let (p, ok) = cell_params(cfg, &raster.coords(i));
        let prefix = param_values(cfg, &p);
        match ok {
            Ok(()) => f(&p, &mut out, prefix, width),
            Err(e) => failed_row(&mut out, prefix, width, &e),
        }
        out
    })?;
    Ok(run.finish()?)
}

fn phase_diagram(cfg: &SweepConfig, workers: usize) -> Result<RunSummary, RunError> {
    let mut cols = param_columns(cfg);
    cols.extend(["label", "s_z", "x", "y", "re_l_plus", "error"]);
    raster_run(cfg, workers, TableSpec::new("phase_diagram.csv", &cols), |p, out, mut row, _| {
        let report = meanfield::classify_phase(p);
        let np = MeanFieldState::trivial_down();
        let state = match report.label {
            PhaseLabel::Superradiant | PhaseLabel::Bistable => report.superradiant().copied().unwrap_or(np),
            PhaseLabel::Normal | PhaseLabel::Unresolved => np,
        };
        let re_l = stability::assess(p, &state).max_re();
        row.extend([
            report.label.as_str().to_string(),
            fmt_f64(state.s_z),
            fmt_f64(state.x),
            fmt_f64(state.y),
            fmt_f64(re_l),
            String::new(),
        ]);
        out.push(0, row);
    })
}

fn fluctuations(cfg: &SweepConfig, workers: usize) -> Result<RunSummary, RunError> {
    let mut cols = param_columns(cfg);
    cols.extend(["n_np", "re_l_plus_np", "n_srp", "re_l_plus_srp", "s_z_srp", "note", "error"]);
    raster_run(cfg, workers, TableSpec::new("fluctuations.csv", &cols), |p, out, mut row, _| {
        let mut notes = Vec::new();
        let np =
            gaussian::fluctuation_at(p, FluctuationBranch::Normal).map_err(|e| notes.push(format!("np: {e}"))).ok();
        let srp = gaussian::fluctuation_at(p, FluctuationBranch::Superradiant(RootSign::Minus))
            .map_err(|e| notes.push(format!("srp: {e}")))
            .ok();
        let vals = [
            np.map(|f| f.moments.n),
            np.map(|f| f.eigs[1].re),
            srp.map(|f| f.moments.n),
            srp.map(|f| f.eigs[1].re),
            srp.map(|f| f.state.s_z),
        ];
        let bad = vals.iter().flatten().any(|v| !v.is_finite());
        row.extend(vals.iter().map(|&v| fmt_opt(v)));
        row.push(fmt_text(&notes.join("; ")));
        row.push(if bad { "non-finite result".into() } else { String::new() });
        out.failed = bad;
        out.push(0, row);
    })
}

fn critical_lines(cfg: &SweepConfig, workers: usize) -> Result<RunSummary, RunError> {
    let tables = vec![
        TableSpec::new(
            "critical_lines.csv",
            &["tau", "g_c_minus", "g_c_plus", "g_c_b_lo", "g_c_b_hi", "eta_asymptote", "error"],
        ),
        TableSpec::new("critical_points.csv", &["name", "tau", "g_tilde"]),
    ];
    let taus = cfg.sweep[0].values();
    let (kappa, gamma) = (cfg.kappa, cfg.gamma_tilde);
    let mut run = Run::open(cfg, tables, taus.len(), workers)?;
    run.cells(|i| {
        let tau = taus[i];
        let mut out = CellOut::new(2);
        let (gm, gp, asym) = match meanfield::critical_g_pm(tau, kappa, gamma) {
            Ok((m, p)) => (m, p, false),
            Err(_) => (None, None, true),
        };
        let gb = meanfield::critical_g_b(tau, kappa, gamma);
        out.push(
            0,
            vec![
                fmt_f64(tau),
                fmt_opt(gm),
                fmt_opt(gp),
                fmt_opt(gb.first().copied()),
                fmt_opt(if gb.len() > 1 { gb.last().copied() } else { None }),
                asym.to_string(),
                String::new(),
            ],
        );
        out
    })?;
    if !taus.is_empty() {
        let window = (cfg.tau_window[0], cfg.tau_window[1]);
        let mut rows = Vec::new();
        if let Ok(m) = meanfield::merge_tau(kappa, gamma, window) {
            rows.push(vec!["merge".into(), fmt_f64(m.tau_c_s), fmt_opt(m.g_c0)]);
        }
        for (t, g) in meanfield::tricritical_points(kappa, gamma, window) {
            rows.push(vec!["tricritical".into(), fmt_f64(t), fmt_f64(g)]);
        }
        if kappa == 0.0 {
            for t in meanfield::critical_tau_b(gamma) {
                rows.push(vec!["tau_c_b".into(), fmt_f64(t), String::new()]);
            }
        }
        run.append(1, rows)?;
    }
    Ok(run.finish()?)
}

/// Critical coupling and the path that reaches it.
fn resolve_critical(cfg: &SweepConfig, base: &ModelParams) -> Result<(ParamPath, f64), String> {
    let path = cfg.path.unwrap_or(ParamPath::FixedTau(cfg.tau));
    let (k, gm) = (base.kappa, base.gamma_tilde);
    let window = (cfg.tau_window[0], cfg.tau_window[1]);
    let missing = || format!("{} not found on this path", critical_name(cfg.critical));
    match (cfg.critical, path) {
        (CriticalTarget::Value(g), _) => Ok((path, g)),
        (CriticalTarget::GC0, _) => {
            let m = meanfield::merge_tau(k, gm, window).map_err(|e| e.to_string())?;
            Ok((ParamPath::FixedTau(m.tau_c_s), m.g_c0.ok_or_else(missing)?))
        }
        (target, ParamPath::FixedTau(t)) => {
            let g = match target {
                CriticalTarget::GMinus => meanfield::critical_g_pm(t, k, gm).map_err(|e| e.to_string())?.0,
                CriticalTarget::GPlus => meanfield::critical_g_pm(t, k, gm).map_err(|e| e.to_string())?.1,
                CriticalTarget::GB => meanfield::critical_g_b(t, k, gm).first().copied(),
                _ => meanfield::critical_g_b(t, k, gm).get(1).copied(),
            };
            Ok((path, g.ok_or_else(missing)?))
        }
        (target, ParamPath::FixedCounterRotating(_)) => {
            let c = meanfield::path_crossings(k, gm, path, (cfg.g_window[0], cfg.g_window[1]), PATH_SCAN);
            let g = match target {
                CriticalTarget::GMinus => c.g_minus.first(),
                CriticalTarget::GPlus => c.g_plus.first(),
                CriticalTarget::GB => c.g_b.first(),
                _ => c.g_b.get(1),
            };
            Ok((path, g.copied().ok_or_else(missing)?))
        }
    }
}

fn critical_name(t: CriticalTarget) -> String {
    match t {
        CriticalTarget::GMinus => "g-minus".into(),
        CriticalTarget::GPlus => "g-plus".into(),
        CriticalTarget::GB => "g-b".into(),
        CriticalTarget::GB2 => "g-b2".into(),
        CriticalTarget::GC0 => "g-c0".into(),
        CriticalTarget::Value(v) => fmt_f64(v),
    }
}

fn exponent_fit(cfg: &SweepConfig, workers: usize) -> Result<RunSummary, RunError> {
    let base = cfg.base_params()?;
    let tables = vec![
        TableSpec::new("exponent_samples.csv", &["distance", "g_tilde", "tau", "n", "re_l_plus", "denominator"]),
        TableSpec::new(
            "exponent_fit.csv",
            &[
                "critical",
                "g_c",
                "tau_c",
                "side",
                "branch",
                "beta",
                "beta_stderr",
                "nu",
                "nu_stderr",
                "beta_plus_nu",
                "scaling_consistent",
                "samples",
                "window_lo",
                "window_hi",
                "error",
            ],
        ),
    ];
    let side = match cfg.side {
        gaussian::Side::Below => "below",
        gaussian::Side::Above => "above",
    };
    let branch = serde_json::to_value(cfg.fit_branch).expect("enum serialises");
    let branch = branch.as_str().unwrap_or_default().to_string();
    let mut run = Run::open(cfg, tables, 1, workers)?;
    run.cells(|_| {
        let mut out = CellOut::new(2);
        let mut fit_row = vec![critical_name(cfg.critical)];
        let (path, g_c) = match resolve_critical(cfg, &base) {
            Ok(r) => r,
            Err(e) => {
                fit_row.extend([String::new(), String::new(), side.into(), branch.clone()]);
                fit_row.resize(14, String::new());
                fit_row.push(fmt_text(&e));
                out.push(1, fit_row);
                out.failed = true;
                return out;
            }
        };
        let samples = gaussian::exponent_samples(&base, path, g_c, cfg.side, cfg.fit_branch.to_core(), cfg.fit_grid());
        for s in &samples {
            let g = match cfg.side {
                gaussian::Side::Below => g_c - s.distance,
                gaussian::Side::Above => g_c + s.distance,
            };
            out.push(
                0,
                vec![
                    fmt_f64(s.distance),
                    fmt_f64(g),
                    fmt_f64(path.tau_at(g)),
                    fmt_f64(s.n),
                    fmt_f64(s.re_l_plus),
                    fmt_f64(s.denominator),
                ],
            );
        }
        fit_row.extend([fmt_f64(g_c), fmt_f64(path.tau_at(g_c)), side.into(), branch.clone()]);
        match gaussian::fit_exponents(&samples, base.omega) {
            Ok(f) => fit_row.extend([
                fmt_f64(f.beta.slope),
                fmt_f64(f.beta.slope_stderr),
                fmt_f64(f.nu.slope),
                fmt_f64(f.nu.slope_stderr),
                fmt_f64(f.beta.slope + f.nu.slope),
                f.scaling_consistent.to_string(),
                f.samples.to_string(),
                fmt_f64(f.window.0),
                fmt_f64(f.window.1),
                String::new(),
            ]),
            Err(e) => {
                fit_row.resize(14, String::new());
                fit_row.push(fmt_text(&e.to_string()));
                out.failed = true;
            }
        }
        out.push(1, fit_row);
        out
    })?;
    Ok(run.finish()?)
}

fn integrate_options(cfg: &SweepConfig) -> IntegrateOptions {
    IntegrateOptions { t_max: cfg.t_max, tol: cfg.tol, ..Default::default() }
}

/// Listed initial conditions followed by seeded draws uniform in a disc.
pub fn initial_conditions(cfg: &SweepConfig) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = cfg.alpha0.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.random_initial {
        let r = cfg.random_radius * rng.random::<f64>().sqrt();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        out.push(Complex64::from_polar(r, phi));
    }
    out
}

/// Endpoint fields shared by dynamics and basin rows.
fn endpoint_fields(
    p: &ModelParams,
    branch: SpinBranch,
    result: &Result<Trajectory, DynamicsError>,
) -> (Vec<String>, String) {
    let label = BasinLabel::of(result).as_str().to_string();
    let traj = match result {
        Ok(t) => Some(t),
        Err(e) => e.trajectory(),
    };
    let error = match result {
        Ok(_) | Err(DynamicsError::NoConvergence { .. }) => String::new(),
        Err(e) => fmt_text(&e.to_string()),
    };
    let mut fields = vec![label];
    match traj {
        Some(t) => {
            let a = t.final_alpha();
            let s = dynamics::spin(p, a, branch);
            fields.extend(c_split(a));
            fields.extend(s.iter().map(|&v| fmt_f64(v)));
            fields.push(fmt_opt(t.steady_time));
        }
        None => fields.resize(7, String::new()),
    }
    (fields, error)
}

fn dynamics_mode(cfg: &SweepConfig, workers: usize) -> Result<RunSummary, RunError> {
    let p = point_params(cfg)?;
    let branch = SpinBranch::from_sign(cfg.branch).expect("validated");
    let opts = integrate_options(cfg);
    let ics = initial_conditions(cfg);
    let tables = vec![
        TableSpec::new("trajectories.csv", &["run", "t", "re_alpha", "im_alpha", "s_x", "s_y", "s_z"]),
        TableSpec::new(
            "endpoints.csv",
            &[
                "run",
                "re_alpha0",
                "im_alpha0",
                "branch",
                "label",
                "re_alpha",
                "im_alpha",
                "s_x",
                "s_y",
                "s_z",
                "steady_time",
                "error",
            ],
        ),
    ];
    let mut run = Run::open(cfg, tables, ics.len(), workers)?;
    run.cells(|i| {
        let mut out = CellOut::new(2);
        let result = dynamics::integrate(&p, ics[i], branch, &opts);
        let traj = match &result {
            Ok(t) => Some(t),
            Err(e) => e.trajectory(),
        };
        if let Some(t) = traj {
            let t = if cfg.samples >= 2 { t.resample(&p, cfg.samples) } else { t.clone() };
            for k in 0..t.times.len() {
                let mut row = vec![i.to_string(), fmt_f64(t.times[k])];
                row.extend(c_split(t.alpha[k]));
                row.extend(t.spin[k].iter().map(|&v| fmt_f64(v)));
                out.push(0, row);
            }
        }
        let (fields, error) = endpoint_fields(&p, branch, &result);
        let mut row = vec![i.to_string()];
        row.extend(c_split(ics[i]));
        row.push(cfg.branch.to_string());
        row.extend(fields);
        out.failed = !error.is_empty();
        row.push(error);
        out.push(1, row);
        out
    })?;
    Ok(run.finish()?)
}

fn basin(cfg: &SweepConfig, workers: usize) -> Result<RunSummary, RunError> {
    let p = point_params(cfg)?;
    let branch = SpinBranch::from_sign(cfg.branch).expect("validated");
    let opts = integrate_options(cfg);
    let raster = Raster::new(cfg);
    let table = TableSpec::new(
        "basin.csv",
        &["re_alpha0", "im_alpha0", "label", "re_alpha", "im_alpha", "s_x", "s_y", "s_z", "steady_time", "error"],
    );
    let mut run = Run::open(cfg, vec![table], raster.len(), workers)?;
    run.cells(|i| {
        let mut out = CellOut::new(1);
        let mut a0 = Complex64::new(0.0, 0.0);
        for (a, v) in raster.coords(i) {
            match a {
                Axis::ReAlpha0 => a0.re = v,
                _ => a0.im = v,
            }
        }
        let result = dynamics::integrate(&p, a0, branch, &opts);
        let (fields, error) = endpoint_fields(&p, branch, &result);
        let mut row = c_split(a0).to_vec();
        row.extend(fields);
        out.failed = !error.is_empty();
        row.push(error);
        out.push(0, row);
        out
    })?;
    Ok(run.finish()?)
}

fn hilbert(cfg: &SweepConfig) -> HilbertConfig {
    HilbertConfig { n_max: cfg.n_max, ratio: cfg.ratio }
}

fn steady_state(cfg: &SweepConfig, workers: usize) -> Result<RunSummary, RunError> {
    let mut cols = param_columns(cfg);
    cols.extend([
        "n",
        "n_over_ratio",
        "re_a",
        "im_a",
        "re_a2",
        "im_a2",
        "sigma_z",
        "parity",
        "trace_down",
        "top_population",
        "cutoff_ok",
        "error",
    ]);
    let hc = hilbert(cfg);
    raster_run(cfg, workers, TableSpec::new("steady_state.csv", &cols), |p, out, mut row, width| {
        match fockspace::solve_steady_state(p, &hc) {
            Ok(ss) => {
                let o = ss.observables;
                row.extend([fmt_f64(o.n), fmt_f64(o.n / hc.ratio)]);
                row.extend(c_split(o.a));
                row.extend(c_split(o.a2));
                row.extend([
                    fmt_f64(o.sigma_z),
                    fmt_f64(o.parity),
                    fmt_f64(ss.rho.spin_down_block().trace().re),
                    fmt_f64(ss.top_population),
                    ss.cutoff_sufficient.to_string(),
                    String::new(),
                ]);
                out.push(0, row);
            }
            Err(e) => failed_row(out, row, width, &e.to_string()),
        }
    })
}

fn wigner(cfg: &SweepConfig, workers: usize) -> Result<RunSummary, RunError> {
    let p = point_params(cfg)?;
    let hc = hilbert(cfg);
    let tables = vec![
        TableSpec::new("wigner.csv", &["x_a", "p_a", "W"]),
        TableSpec::new("wigner_x.csv", &["x_a"]),
        TableSpec::new("wigner_p.csv", &["p_a"]),
        TableSpec::new("wigner_peaks.csv", &["x_a", "p_a", "W", "error"]),
    ];
    let mut run = Run::open(cfg, tables, 1, workers)?;
    run.cells(|_| {
        let mut out = CellOut::new(4);
        let ss = match fockspace::solve_steady_state(&p, &hc) {
            Ok(ss) => ss,
            Err(e) => {
                out.push(3, vec![String::new(), String::new(), String::new(), fmt_text(&e.to_string())]);
                out.failed = true;
                return out;
            }
        };
        let nf = hc.fock_dim();
        let down = ss.rho.spin_down_block();
        let mut cav = match cfg.projection {
            Projection::SpinDown => down,
            Projection::Cavity => ss.rho.data.view((0, 0), (nf, nf)).into_owned() + down,
        };
        let tr = cav.trace().re;
        cav /= Complex64::new(tr, 0.0);
        let w = fockspace::wigner_auto(&cav, cfg.half_width, cfg.spacing, WIGNER_EDGE_TOL, WIGNER_EXPANSIONS);
        for (ip, &pa) in w.p.iter().enumerate() {
            for (ix, &xa) in w.x.iter().enumerate() {
                out.push(0, vec![fmt_f64(xa), fmt_f64(pa), fmt_f64(w.values[(ip, ix)])]);
            }
        }
        out.rows[1] = w.x.iter().map(|&v| vec![fmt_f64(v)]).collect();
        out.rows[2] = w.p.iter().map(|&v| vec![fmt_f64(v)]).collect();
        for pk in fockspace::count_peaks(&w, cfg.peak_fraction, PEAK_SEPARATION) {
            out.push(3, vec![fmt_f64(pk.x), fmt_f64(pk.p), fmt_f64(pk.value), String::new()]);
        }
        out
    })?;
    Ok(run.finish()?)
}

/// Validates `cfg` and writes every output file of its mode.
pub fn run(cfg: &SweepConfig, workers: usize) -> Result<RunSummary, RunError> {
    cfg.validate()?;
    if cfg.path.is_some() {
        point_params(cfg)?;
    }
    match cfg.mode {
        Mode::PhaseDiagram => phase_diagram(cfg, workers),
        Mode::CriticalLines => critical_lines(cfg, workers),
        Mode::Fluctuations => fluctuations(cfg, workers),
        Mode::ExponentFit => exponent_fit(cfg, workers),
        Mode::Dynamics => dynamics_mode(cfg, workers),
        Mode::Basin => basin(cfg, workers),
        Mode::SteadyState => steady_state(cfg, workers),
        Mode::Wigner => wigner(cfg, workers),
    }
}
