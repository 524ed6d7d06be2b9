use aqrm::dynamics::*;
use aqrm::meanfield::{classify_phase, PhaseLabel};
use aqrm::ModelParams;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(g: f64, t: f64) -> ModelParams {
    ModelParams::unit(g, t, 3.0, 0.5).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn run(p: &ModelParams, a0: Complex64, b: SpinBranch) -> Trajectory {
    integrate(p, a0, b, &IntegrateOptions::default()).unwrap()
}

/// Cavity equation written out in real components, stepped with classical RK4.
fn rk4_oracle(p: &ModelParams, a0: Complex64, sign: f64, t_end: f64, n: usize) -> Complex64 {
    let (g, t, k, gm) = (p.g_tilde, p.tau, p.kappa, p.gamma_tilde);
    let f = |v: [f64; 2]| -> [f64; 2] {
        let (x, y) = (v[0], v[1]);
        let (bx, by) = ((1.0 + t) * x, (1.0 - t) * y);
        let sz = sign / (1.0 + 4.0 * g * g * (bx * bx + by * by)).sqrt();
        // α(1−iγ̃) + g̃²s_z[(1+τ²)α + 2τα*] + 4κg̃²x, then multiplied by −i.
        let ur = x + gm * y + g * g * sz * (1.0 + t * t + 2.0 * t) * x + 4.0 * k * g * g * x;
        let ui = y - gm * x + g * g * sz * (1.0 + t * t - 2.0 * t) * y;
        [ui, -ur]
    };
    let h = t_end / n as f64;
    let mut v = [a0.re, a0.im];
    for _ in 0..n {
        let k1 = f(v);
        let k2 = f([v[0] + 0.5 * h * k1[0], v[1] + 0.5 * h * k1[1]]);
        let k3 = f([v[0] + 0.5 * h * k2[0], v[1] + 0.5 * h * k2[1]]);
        let k4 = f([v[0] + h * k3[0], v[1] + h * k3[1]]);
        for i in 0..2 {
            v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    c(v[0], v[1])
}

#[test]
fn matches_fixed_step_oracle() {
    for (g, t, a0, b) in [
        (1.0, 0.5, c(0.2, 0.2), SpinBranch::Down),
        (0.5, 6.0, c(0.7, 0.1), SpinBranch::Down),
        (1.2, 2.0, c(0.1, -0.3), SpinBranch::Down),
        (0.5, 6.0, c(0.7, 0.1), SpinBranch::Up),
    ] {
        let p = unit(g, t);
        let o = IntegrateOptions { t_max: 20.0, ..Default::default() };
        let tr = match integrate(&p, a0, b, &o) {
            Ok(tr) => tr,
            Err(e) => e.trajectory().unwrap().clone(),
        };
        for te in [3.7, 20.0] {
            let want = rk4_oracle(&p, a0, b.sign(), te, 200_000);
            assert!((tr.alpha_at(te) - want).norm() < 1e-7, "{g} {t} {te}: {} vs {want}", tr.alpha_at(te));
        }
    }
}

#[test]
fn meanfield_states_are_fixed_points() {
    for (g, t) in [(1.2, 2.0), (0.5, 6.0), (0.8, 3.75), (1.5, 2.0)] {
        let p = unit(g, t);
        for cand in classify_phase(&p).candidates {
            let r = rhs(&p, cand.state.alpha(), SpinBranch::Down);
            assert!(r.norm() < 1e-9, "{g} {t}: {r}");
        }
    }
}

#[test]
fn isotropic_flow_reaches_printed_modulus() {
    let (g, gm) = (1.0f64, 0.5f64);
    let p = ModelParams::unit(g, 1.0, 0.0, gm).unwrap();
    let tr = run(&p, c(0.4, 0.3), SpinBranch::Down);
    let expect = g * (1.0 - (1.0 + gm * gm).powi(2) / (16.0 * g.powi(4))).sqrt() / (1.0 + gm * gm).sqrt();
    assert!((tr.final_alpha().norm() - expect).abs() < 1e-6);
    assert!((tr.converged_to.unwrap().s_z + (1.0 + gm * gm) / (4.0 * g * g)).abs() < 1e-6);
}

#[test]
fn normal_phase_trajectory() {
    let p = unit(1.0, 0.5);
    let tr = run(&p, c(0.2, 0.2), SpinBranch::Down);
    let s = tr.converged_to.unwrap();
    assert!(!s.is_superradiant());
    assert!((s.s_z + 1.0).abs() < 1e-9);
    assert!(tr.final_alpha().norm() < 1e-6);
    // The spiral is elliptical, so |α| itself oscillates; its envelope decays.
    let fine = tr.resample(&p, 20_000);
    let mags: Vec<f64> = fine.alpha.iter().map(|a| a.norm()).collect();
    let peaks: Vec<f64> = mags.windows(3).filter(|w| w[1] > w[0] && w[1] >= w[2]).map(|w| w[1]).collect();
    assert!(peaks.len() > 10);
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
    assert!(mags.windows(2).any(|w| w[1] > w[0]));
}

#[test]
fn bistable_initial_conditions_split() {
    let p = unit(0.5, 6.0);
    let np = run(&p, c(0.3, 0.05), SpinBranch::Down).converged_to.unwrap();
    assert!(!np.is_superradiant());
    let sr = run(&p, c(0.7, 0.1), SpinBranch::Down).converged_to.unwrap();
    assert!(sr.is_superradiant());
    assert!((sr.alpha() - c(0.283843, -1.000199)).norm() < 1e-5);
    assert!((sr.s_z + 0.182703).abs() < 1e-5);
}

#[test]
fn up_branch_relaxes_to_inverted_spin() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let p = ModelParams::unit(
            rng.random_range(0.1..2.0),
            rng.random_range(-4.0..8.0),
            rng.random_range(0.0..5.0),
            rng.random_range(0.2..1.5),
        )
        .unwrap();
        let a0 = c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let tr = run(&p, a0, SpinBranch::Up);
        assert!(tr.spin.iter().all(|s| s[2] > 0.0));
        assert!((tr.converged_to.unwrap().s_z - 1.0).abs() < 1e-9, "{p:?}");
    }
}

#[test]
fn converged_states_agree_with_meanfield() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut checked = 0;
    while checked < 40 {
        let p = ModelParams::unit(
            rng.random_range(0.1..2.0),
            rng.random_range(-4.0..8.0),
            rng.random_range(0.0..5.0),
            rng.random_range(0.2..1.5),
        )
        .unwrap();
        let a0 = c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let Ok(tr) = integrate(&p, a0, SpinBranch::Down, &IntegrateOptions::default()) else { continue };
        let s = tr.converged_to.unwrap();
        assert!(tr.spin.iter().all(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - 1.0).abs() < 1e-12));
        assert!(tr.spin.iter().all(|v| v[2] < 0.0));
        let report = classify_phase(&p);
        let best = report.stable.iter().map(|m| (m.alpha() - s.alpha()).norm()).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-6, "{p:?}: {s:?} vs {:?}", report.stable);
        checked += 1;
    }
}

#[test]
fn halving_tolerance_is_stable() {
    for (g, t, a0) in [(0.5, 6.0, c(0.7, 0.1)), (1.2, 2.0, c(0.2, 0.2)), (1.0, 0.5, c(0.2, 0.2))] {
        let p = unit(g, t);
        let a = run(&p, a0, SpinBranch::Down).final_alpha();
        let o = IntegrateOptions { tol: 5e-11, ..Default::default() };
        let b = integrate(&p, a0, SpinBranch::Down, &o).unwrap().final_alpha();
        assert!((a - b).norm() < 1e-7);
    }
}

#[test]
fn basin_uniform_in_normal_phase() {
    let p = unit(0.3, 0.5);
    assert_eq!(classify_phase(&p).label, PhaseLabel::Normal);
    let grid = BasinGrid { re: (-1.5, 1.5), im: (-1.5, 1.5), nx: 6, ny: 6 };
    let m = basin_map(&p, grid, &IntegrateOptions::default());
    assert_eq!(m.count(BasinLabel::Normal), 36);
}

#[test]
fn basin_bistable_contains_both() {
    let p = unit(0.5, 6.0);
    assert_eq!(classify_phase(&p).label, PhaseLabel::Bistable);
    let grid = BasinGrid { re: (0.1, 1.1), im: (-0.25, 0.25), nx: 11, ny: 11 };
    let m = basin_map(&p, grid, &IntegrateOptions::default());
    assert!(m.count(BasinLabel::Normal) > 0 && m.count(BasinLabel::Superradiant) > 0);
    assert!((grid.point(2, 6) - c(0.3, 0.05)).norm() < 1e-12);
    assert!((grid.point(6, 7) - c(0.7, 0.1)).norm() < 1e-12);
    assert_eq!(m.at(2, 6), BasinLabel::Normal);
    assert_eq!(m.at(6, 7), BasinLabel::Superradiant);
}

#[test]
fn superradiant_only_point_attracts_everything() {
    let p = unit(1.2, 2.0);
    assert_eq!(classify_phase(&p).label, PhaseLabel::Superradiant);
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..100 {
        let a0 = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let tr = run(&p, a0, SpinBranch::Down);
        assert!(tr.converged_to.unwrap().is_superradiant(), "{a0}");
    }
}
