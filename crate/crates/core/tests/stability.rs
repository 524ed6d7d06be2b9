use aqrm::meanfield::{classify_phase, critical_g_pm, MeanFieldState};
use aqrm::stability::*;
use aqrm::ModelParams;
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Full mean-field flow for (x, y, s_x, s_y) with s_z = sign·√(1 − s_x² − s_y²),
/// ω = 1 and qubit splitting `ratio`.
fn flow(p: &ModelParams, ratio: f64, sign: f64, v: [f64; 4]) -> [f64; 4] {
    let (g, t, k) = (p.g_tilde, p.tau, p.kappa);
    let sz = sign * (1.0 - v[2] * v[2] - v[3] * v[3]).sqrt();
    let i = Complex64::i();
    let a = Complex64::new(v[0], v[1]);
    let sm = Complex64::new(v[2], -v[3]) / 2.0;
    let sp = sm.conj();
    let da = -i * (Complex64::new(1.0, -p.gamma_tilde) * a + g * (sm + t * sp) + 2.0 * k * g * g * (a + a.conj()));
    let dsm = -i * ratio * (sm - g * (a + t * a.conj()) * sz);
    [da.re, da.im, 2.0 * dsm.re, -2.0 * dsm.im]
}

fn jacobian(p: &ModelParams, ratio: f64, s: &MeanFieldState) -> Matrix4<f64> {
    let v0 = [s.x, s.y, s.s_x, s.s_y];
    let sign = s.s_z.signum();
    let mut j = Matrix4::zeros();
    for c in 0..4 {
        let h = 1e-7;
        let (mut a, mut b) = (v0, v0);
        a[c] += h;
        b[c] -= h;
        let (fa, fb) = (flow(p, ratio, sign, a), flow(p, ratio, sign, b));
        for r in 0..4 {
            j[(r, c)] = (fa[r] - fb[r]) / (2.0 * h);
        }
    }
    j
}

fn matrix(m: &StabilityMatrix) -> Matrix2<f64> {
    Matrix2::new(m.m11, m.m12, m.m21, m.m22)
}

#[test]
fn reduced_matrix_matches_slow_modes_of_full_jacobian() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ratio = 1e4;
    let mut checked = 0;
    while checked < 50 {
        let p = ModelParams::unit(
            rng.random_range(0.05..2.5),
            rng.random_range(-4.0..8.0),
            rng.random_range(0.0..5.0),
            rng.random_range(0.05..1.5),
        )
        .unwrap();
        let r = classify_phase(&p);
        for c in r.candidates.iter().step_by(2) {
            let m = build_m(&p, &c.state);
            let lm = matrix(&m).complex_eigenvalues();
            if lm.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min) < 1e-2 {
                continue;
            }
            let mut full: Vec<Complex64> =
                jacobian(&p, ratio, &c.state).complex_eigenvalues().iter().copied().collect();
            full.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
            for l in lm.iter() {
                let best = full[..2].iter().map(|f| (f - l).norm()).fold(f64::INFINITY, f64::min);
                assert!(best / l.norm() < 1e-2, "{p:?} {l} vs {:?}", &full[..2]);
            }
            checked += 1;
        }
    }
}

#[test]
fn spin_block_matches_exact_elimination() {
    for (g, t) in [(1.2, 2.0), (0.5, 6.0), (0.8, 3.75), (1.5, 2.0)] {
        let p = ModelParams::unit(g, t, 3.0, 0.5).unwrap();
        for c in classify_phase(&p).candidates {
            let j = jacobian(&p, 1.0, &c.state);
            let jss = Matrix2::new(j[(2, 2)], j[(2, 3)], j[(3, 2)], j[(3, 3)]);
            let jsc = Matrix2::new(j[(2, 0)], j[(2, 1)], j[(3, 0)], j[(3, 1)]);
            let exact = -jss.try_inverse().unwrap() * jsc;
            let got = spin_eliminate(&p, &c.state);
            for r in 0..2 {
                for k in 0..2 {
                    assert!((exact[(r, k)] - got[r][k]).abs() < 1e-6, "{g} {t} {exact} {got:?}");
                }
            }
        }
    }
}

#[test]
fn reduced_matrix_is_cavity_rows_with_spin_block_inserted() {
    for (g, t) in [(1.2, 2.0), (0.5, 6.0), (0.8, 3.75)] {
        let p = ModelParams::unit(g, t, 3.0, 0.5).unwrap();
        for cand in classify_phase(&p).candidates {
            let c = spin_eliminate(&p, &cand.state);
            let m = build_m(&p, &cand.state);
            let a = g * (1.0 - t) / 2.0;
            let b = g * (1.0 + t) / 2.0;
            assert!((m.m11 - (-0.5 - a * c[1][0])).abs() < 1e-12);
            assert!((m.m12 - (1.0 - a * c[1][1])).abs() < 1e-12);
            assert!((m.m21 - (-(1.0 + 12.0 * g * g) - b * c[0][0])).abs() < 1e-12);
            assert!((m.m22 - (-0.5 - b * c[0][1])).abs() < 1e-12);
        }
    }
}

#[test]
fn q_equals_sigma_times_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let p = ModelParams::unit(
            rng.random_range(0.05..2.5),
            rng.random_range(-4.0..8.0),
            rng.random_range(0.0..5.0),
            rng.random_range(0.0..1.5),
        )
        .unwrap();
        for c in classify_phase(&p).candidates {
            let m = build_m(&p, &c.state);
            assert!((m.q_value - m.det() * m.sigma).abs() < 1e-9 * (1.0 + m.q_value.abs()));
            assert!((m.trace() + 2.0 * p.gamma_tilde).abs() < 1e-12);
            // ω[−γ̃ ± √(γ̃² − Q/Σ)] reproduces the matrix spectrum.
            let r = Complex64::new(p.gamma_tilde.powi(2) - m.q_value / m.sigma, 0.0).sqrt();
            let ev = m.eigenvalues();
            let mut want = [-p.gamma_tilde - r, -p.gamma_tilde + r];
            let mut got = ev;
            want.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            got.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            for (a, b) in want.iter().zip(got) {
                assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()));
            }
        }
    }
}

#[test]
fn np_sign_changes_sit_on_critical_lines() {
    let (k, gm) = (3.0, 0.5);
    for t in [-2.0, 0.5, 2.0, 2.5, 3.3, 6.0] {
        let np = MeanFieldState::trivial_down();
        let n = 20000;
        let h = 3.0 / n as f64;
        let mut prev: Option<f64> = None;
        let mut changes = Vec::new();
        for i in 1..=n {
            let g = h * i as f64;
            let v = assess(&ModelParams::unit(g, t, k, gm).unwrap(), &np).max_re();
            if let Some(pv) = prev {
                if pv.signum() != v.signum() {
                    changes.push(g);
                }
            }
            prev = Some(v);
        }
        let (m, p) = critical_g_pm(t, k, gm).unwrap();
        let analytic: Vec<f64> = m.into_iter().chain(p).filter(|g| *g < 3.0).collect();
        assert_eq!(changes.len(), analytic.len(), "tau {t}: {changes:?} vs {analytic:?}");
        for a in analytic {
            assert!(changes.iter().any(|c| (c - a).abs() <= h), "tau {t}: {a} not in {changes:?}");
        }
    }
}

#[test]
fn eigenvalues_scale_with_omega() {
    let p = ModelParams::new(2.5, 1.0, 0.7, 2.0, 3.0, 0.5).unwrap();
    let q = ModelParams::unit(0.7, 2.0, 3.0, 0.5).unwrap();
    let np = MeanFieldState::trivial_down();
    let (a, b) = (assess(&p, &np), assess(&q, &np));
    for (x, y) in a.eigenvalues.iter().zip(b.eigenvalues) {
        assert!((x - y * 2.5).norm() < 1e-13);
    }
}
