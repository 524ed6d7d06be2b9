use aqrm::meanfield::{self, classify_phase};
use aqrm::ModelParams;
use aqrm_cli::config::{AxisRange, CriticalTarget, Mode, SweepConfig};
use aqrm_cli::output::{fmt_f64, Manifest, Status};
use aqrm_cli::reader::read_table;
use aqrm_cli::{exit_code, run};
use std::fs;
use std::path::Path;
use std::process::Command;

fn axis(s: &str) -> AxisRange {
    AxisRange::parse(s).unwrap()
}

fn small_configs(root: &Path) -> Vec<SweepConfig> {
    let base = SweepConfig::default;
    let mk = |mode: Mode, name: &str, c: SweepConfig| SweepConfig { mode, output: root.join(name), ..c };
    vec![
        mk(
            Mode::PhaseDiagram,
            "pd",
            SweepConfig { sweep: vec![axis("tau:-4:8:6"), axis("g_tilde:0:2.5:5")], ..base() },
        ),
        mk(Mode::CriticalLines, "cl", SweepConfig { sweep: vec![axis("tau:-4:8:9")], ..base() }),
        mk(
            Mode::Fluctuations,
            "fl",
            SweepConfig {
                path: Some(aqrm::ParamPath::FixedCounterRotating(3.0)),
                sweep: vec![axis("g_tilde:0.3:2.2:8")],
                ..base()
            },
        ),
        mk(
            Mode::ExponentFit,
            "ef",
            SweepConfig {
                path: Some(aqrm::ParamPath::FixedCounterRotating(3.0)),
                critical: CriticalTarget::GPlus,
                ..base()
            },
        ),
        mk(
            Mode::Dynamics,
            "dy",
            SweepConfig {
                tau: 6.0,
                g_tilde: 0.5,
                alpha0: vec![[0.3, 0.05], [0.7, 0.1]],
                random_initial: 2,
                seed: 5,
                ..base()
            },
        ),
        mk(
            Mode::Basin,
            "ba",
            SweepConfig {
                tau: 6.0,
                g_tilde: 0.5,
                sweep: vec![axis("im_alpha0:-0.25:0.25:3"), axis("re_alpha0:0.1:1.1:3")],
                ..base()
            },
        ),
        mk(
            Mode::SteadyState,
            "ss",
            SweepConfig { tau: 2.0, n_max: 8, ratio: 10.0, sweep: vec![axis("g_tilde:0.5:1.2:2")], ..base() },
        ),
        mk(Mode::Wigner, "wi", SweepConfig { tau: 1.0, g_tilde: 0.5, n_max: 10, ratio: 10.0, spacing: 0.1, ..base() }),
    ]
}

#[test]
fn every_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for cfg in small_configs(dir.path()) {
        let summary = run(&cfg, 2).unwrap();
        assert_eq!(summary.failed_cells, 0, "{:?}", cfg.mode);
        let m = Manifest::read(&cfg.output).unwrap();
        assert_eq!(m.status, Status::Complete);
        assert_eq!(m.config_sha256, cfg.hash());
        assert_eq!(m.completed_cells, m.total_cells);
        for f in &m.files {
            let t = read_table(&cfg.output.join(&f.name)).unwrap();
            assert_eq!(t.header, f.schema);
            assert_eq!(t.rows.len(), f.rows, "{}", f.name);
            assert_eq!(t.meta_value("mode"), Some(cfg.mode.as_str()));
            assert_eq!(t.meta_value("config_sha256"), Some(cfg.hash().as_str()));
            let echoed: SweepConfig = serde_json::from_str(t.meta_value("config").unwrap()).unwrap();
            assert_eq!(echoed.data_json(), cfg.data_json());
            for row in &t.rows {
                assert_eq!(row.len(), t.header.len());
                for v in row {
                    if let Ok(x) = v.parse::<f64>() {
                        if v.contains('e') {
                            assert_eq!(&fmt_f64(x), v, "{}", f.name);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (ca, cb) in small_configs(a.path()).into_iter().zip(small_configs(b.path())) {
        let sa = run(&ca, 1).unwrap();
        let sb = run(&cb, 4).unwrap();
        for (fa, fb) in sa.files.iter().zip(&sb.files) {
            assert_eq!(fs::read(fa).unwrap(), fs::read(fb).unwrap(), "{}", fa.display());
        }
    }
}

#[test]
fn resume_keeps_completed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig {
        output: dir.path().join("pd"),
        sweep: vec![axis("tau:0:6:10"), axis("g_tilde:0.1:2:10")],
        ..Default::default()
    };
    let file = cfg.output.join("phase_diagram.csv");
    run(&cfg, 2).unwrap();
    let original = fs::read_to_string(&file).unwrap();

    // Interrupted after 37 cells; an extra half-written row follows.
    let mut m = Manifest::read(&cfg.output).unwrap();
    m.status = Status::Partial;
    m.completed_cells = 37;
    m.files[0].rows = 37;
    fs::write(cfg.output.join("manifest.json"), serde_json::to_string(&m).unwrap()).unwrap();
    let header_lines = original.lines().take_while(|l| l.starts_with('#')).count() + 1;
    let mut lines: Vec<String> = original.lines().map(String::from).collect();
    // Marks a completed row so recomputation would be visible.
    lines[header_lines + 3] = lines[header_lines + 3].replacen(",NP,", ",TAMPERED,", 1);
    assert!(lines[header_lines + 3].contains("TAMPERED"));
    let mut text = lines[..header_lines + 37].join("\n");
    text.push_str("\n1.0,0.5,SR");
    fs::write(&file, text).unwrap();

    let s = run(&cfg, 3).unwrap();
    assert_eq!(s.resumed_cells, 37);
    let resumed = fs::read_to_string(&file).unwrap();
    let want: Vec<String> = original
        .lines()
        .map(String::from)
        .enumerate()
        .map(|(i, l)| if i == header_lines + 3 { l.replacen(",NP,", ",TAMPERED,", 1) } else { l })
        .collect();
    assert_eq!(resumed.lines().collect::<Vec<_>>(), want);
    assert_eq!(Manifest::read(&cfg.output).unwrap().status, Status::Complete);

    // A changed configuration starts over.
    let cfg2 = SweepConfig { kappa: 2.0, ..cfg.clone() };
    let mut m = Manifest::read(&cfg.output).unwrap();
    m.status = Status::Partial;
    fs::write(cfg.output.join("manifest.json"), serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(run(&cfg2, 2).unwrap().resumed_cells, 0);
    assert!(!fs::read_to_string(&file).unwrap().contains("TAMPERED"));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig { output: dir.path().join("e"), sweep: vec![axis("tau:0:1:0")], ..Default::default() };
    let s = run(&cfg, 1).unwrap();
    assert_eq!(exit_code(&Ok(s)), 0);
    let t = read_table(&cfg.output.join("phase_diagram.csv")).unwrap();
    assert!(t.rows.is_empty());
    assert_eq!(t.header, ["tau", "g_tilde", "label", "s_z", "x", "y", "re_l_plus", "error"]);
    assert_eq!(Manifest::read(&cfg.output).unwrap().files[0].rows, 0);
}

#[test]
fn raster_labels_change_only_across_analytic_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let (nt, ng) = (49, 60);
    let cfg = SweepConfig {
        output: dir.path().join("pd"),
        sweep: vec![axis(&format!("tau:-4:8:{nt}")), axis(&format!("g_tilde:0.01:2.5:{ng}"))],
        ..Default::default()
    };
    run(&cfg, 4).unwrap();
    let t = read_table(&cfg.output.join("phase_diagram.csv")).unwrap();
    let tau = t.column_f64("tau").unwrap();
    let g = t.column_f64("g_tilde").unwrap();
    let label = t.column("label").unwrap();
    let mut changes = 0;
    for i in 0..nt {
        for j in 0..ng - 1 {
            let (a, b) = (i * ng + j, i * ng + j + 1);
            if label[a] == label[b] {
                continue;
            }
            changes += 1;
            let (tau, g0, g1) = (tau[a].unwrap(), g[a].unwrap(), g[b].unwrap());
            let (gm, gp) = meanfield::critical_g_pm(tau, 3.0, 0.5).unwrap_or((None, None));
            let mut lines: Vec<f64> = meanfield::critical_g_b(tau, 3.0, 0.5);
            lines.extend(gm);
            lines.extend(gp);
            assert!(
                lines.iter().any(|&c| c >= g0 && c <= g1),
                "τ={tau}: {} → {} in [{g0}, {g1}] vs {lines:?}",
                label[a],
                label[b]
            );
        }
    }
    assert!(changes > 20);
    let s_z = t.column_f64("s_z").unwrap();
    for k in 0..label.len() {
        let p = ModelParams::unit(g[k].unwrap(), tau[k].unwrap(), 3.0, 0.5).unwrap();
        assert_eq!(label[k], classify_phase(&p).label.as_str());
        let sz = s_z[k].unwrap();
        assert_eq!(label[k] == "NP" || label[k] == "none", sz == -1.0);
    }
}

#[test]
fn dynamics_endpoints_are_meanfield_states() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig {
        mode: Mode::Dynamics,
        output: dir.path().join("dy"),
        tau: 6.0,
        g_tilde: 0.5,
        alpha0: vec![[0.3, 0.05], [0.7, 0.1]],
        random_initial: 6,
        seed: 11,
        ..Default::default()
    };
    run(&cfg, 2).unwrap();
    let e = read_table(&cfg.output.join("endpoints.csv")).unwrap();
    assert_eq!(e.column("label").unwrap()[..2], ["NP", "SRP"]);
    let p = ModelParams::unit(0.5, 6.0, 3.0, 0.5).unwrap();
    let stable = classify_phase(&p).stable;
    let re = e.column_f64("re_alpha").unwrap();
    let im = e.column_f64("im_alpha").unwrap();
    for k in 0..e.rows.len() {
        let a = num_complex::Complex64::new(re[k].unwrap(), im[k].unwrap());
        let d = stable.iter().map(|s| (s.alpha() - a).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-6, "run {k}: {a}");
    }
    let tr = read_table(&cfg.output.join("trajectories.csv")).unwrap();
    assert_eq!(tr.rows.len(), 8 * cfg.samples);
    let (sx, sy, sz) = (tr.column_f64("s_x").unwrap(), tr.column_f64("s_y").unwrap(), tr.column_f64("s_z").unwrap());
    for k in 0..tr.rows.len() {
        let n = sx[k].unwrap().powi(2) + sy[k].unwrap().powi(2) + sz[k].unwrap().powi(2);
        assert!((n - 1.0).abs() < 1e-12);
    }
}

#[test]
fn fluctuations_grow_toward_second_order_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let path = aqrm::ParamPath::FixedCounterRotating(3.0);
    let gp = meanfield::path_crossings(3.0, 0.5, path, (0.05, 5.0), 4000).g_plus[0];
    let cfg = SweepConfig {
        mode: Mode::Fluctuations,
        output: dir.path().join("fl"),
        path: Some(path),
        sweep: vec![AxisRange {
            axis: aqrm_cli::config::Axis::GTilde,
            start: 0.8,
            stop: gp - 1e-5,
            count: 30,
            scale: Default::default(),
        }],
        ..Default::default()
    };
    run(&cfg, 2).unwrap();
    let t = read_table(&cfg.output.join("fluctuations.csv")).unwrap();
    let n: Vec<f64> = t.column_f64("n_np").unwrap().into_iter().map(Option::unwrap).collect();
    let last = *n.last().unwrap();
    assert!(last > 1e3 * n[0], "{n:?}");
    assert!(n[n.len() - 5..].windows(2).all(|w| w[1] > w[0]));
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_aqrm"));
    c.env_remove("AQRM_WORKERS");
    c
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = |n: &str| dir.path().join(n).to_str().unwrap().to_string();

    let ok = bin().args(["critical-lines", "--sweep", "tau:-4:8:4", "-o", &out("a")]).output().unwrap().status;
    assert_eq!(ok.code(), Some(0));
    assert!(dir.path().join("a/critical_points.csv").exists());

    let bad = bin().args(["phase-diagram", "--sweep", "tau:0:1:1", "-o", &out("b")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("count"));

    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"sweep": [{"axis": "tau", "start": 0, "stop": 1, "count": 2}], "bogus": true}"#).unwrap();
    let unknown = bin().args(["phase-diagram", "--config", cfg.to_str().unwrap()]).output().unwrap().status;
    assert_eq!(unknown.code(), Some(2));

    let env = bin()
        .env("AQRM_WORKERS", "0")
        .args(["phase-diagram", "--sweep", "tau:0:1:2", "-o", &out("d")])
        .output()
        .unwrap()
        .status;
    assert_eq!(env.code(), Some(2));

    let partial = bin()
        .args([
            "exponent-fit",
            "--tau",
            "6",
            "--critical",
            "g-b",
            "--side",
            "below",
            "--fit-branch",
            "srp-minus",
            "-o",
            &out("e"),
        ])
        .output()
        .unwrap();
    assert_eq!(partial.status.code(), Some(3));
    let fit = read_table(&dir.path().join("e/exponent_fit.csv")).unwrap();
    assert!(!fit.column("error").unwrap()[0].is_empty());

    let geo =
        bin().args(["phase-diagram", "--sweep", "g_tilde:0:1:3:geometric", "-o", &out("f")]).output().unwrap().status;
    assert_eq!(geo.code(), Some(2));
}

#[test]
fn config_file_and_flags_give_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"tau": 6.0, "g_tilde": 0.5, "workers": 2, "sweep": [{"axis": "re_alpha0", "start": 0.1, "stop": 1.1, "count": 3}, {"axis": "im_alpha0", "start": 0, "stop": 0.1, "count": 2}]}"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let s1 =
        bin().args(["basin", "--config", cfg.to_str().unwrap(), "-o", a.to_str().unwrap()]).output().unwrap().status;
    let s2 = bin()
        .env("AQRM_WORKERS", "3")
        .args([
            "basin",
            "--tau",
            "6",
            "--g-tilde",
            "0.5",
            "--sweep",
            "re_alpha0:0.1:1.1:3",
            "--sweep",
            "im_alpha0:0:0.1:2",
        ])
        .args(["-o", b.to_str().unwrap(), "--workers", "1"])
        .output()
        .unwrap();
    assert_eq!((s1.code(), s2.status.code()), (Some(0), Some(0)));
    assert_eq!(fs::read(a.join("basin.csv")).unwrap(), fs::read(b.join("basin.csv")).unwrap());
}
