mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rogue_rc::analytic::{akhmediev_field, mode_params, seeded_plane_wave};
use rogue_rc::nls::{
    energies, simulate, simulate_with, split_step, taylor_coefficients, taylor_step, ComplexField, Grid,
    SimulationConfig, Spectral,
};

use common::{nls_rhs, rel_l2};

fn breather_state(rng: &mut ChaCha8Rng) -> ComplexField {
    let a = rng.random_range(0.1..0.45);
    let t = rng.random_range(-3.0..3.0);
    let omega = mode_params(a).unwrap().omega;
    let grid = Grid::for_modulation(64, omega, 1).unwrap();
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
    let f = akhmediev_field(a, t, &grid).unwrap();
    ComplexField::new(grid, f.values().iter().map(|v| v * phase).collect()).unwrap()
}

#[test]
fn first_taylor_coefficient_is_the_equation_right_hand_side() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let psi = breather_state(&mut rng);
        let coeffs = taylor_coefficients(&psi, 2).unwrap();
        let rhs = nls_rhs(psi.values(), psi.grid().length());
        assert!(rel_l2(coeffs[1].values(), &rhs) < 1e-11);
    }
}

#[test]
fn taylor_step_slope_matches_right_hand_side() {
    // second-order one-sided difference of ψ(0), ψ(h), ψ(2h)
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let psi = breather_state(&mut rng);
    let h = 1e-4;
    let one = taylor_step(&psi, h, 6).unwrap();
    let two = taylor_step(&psi, 2.0 * h, 6).unwrap();
    let fd: Vec<Complex64> = psi
        .values()
        .iter()
        .zip(one.values())
        .zip(two.values())
        .map(|((p0, p1), p2)| (-3.0 * p0 + 4.0 * p1 - p2) / (2.0 * h))
        .collect();
    let rhs = nls_rhs(psi.values(), psi.grid().length());
    assert!(rel_l2(&fd, &rhs) < 1e-7);
}

#[test]
fn spectral_derivative_of_every_mode() {
    let grid = Grid::new(32, 7.3).unwrap();
    let mut spectral = Spectral::new(&grid);
    for (i, &k) in grid.wavenumbers().iter().enumerate() {
        if i == grid.len() / 2 {
            continue;
        }
        let f: Vec<Complex64> = grid.nodes().iter().map(|x| Complex64::new(0.0, k * x).exp()).collect();
        let mut d = vec![Complex64::default(); f.len()];
        spectral.first_derivative(&f, &mut d);
        for (fi, di) in f.iter().zip(&d) {
            assert!((di - Complex64::i() * k * fi).norm() < 1e-12, "mode {i}");
        }
    }
}

#[test]
fn taylor_and_split_step_agree_on_breather_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let dt = 2e-4;
    for _ in 0..100 {
        let psi = breather_state(&mut rng);
        let t = taylor_step(&psi, dt, 6).unwrap();
        let s = split_step(&psi, dt).unwrap();
        // step-doubling (Richardson) estimates of each local error
        let t2 = taylor_step(&taylor_step(&psi, dt / 2.0, 6).unwrap(), dt / 2.0, 6).unwrap();
        let s2 = split_step(&split_step(&psi, dt / 2.0).unwrap(), dt / 2.0).unwrap();
        let err_t = rel_l2(t.values(), t2.values()) * 64.0 / 63.0;
        let err_s = rel_l2(s.values(), s2.values()) * 4.0 / 3.0;
        let d = rel_l2(s.values(), t.values());
        assert!(d <= 1.5 * (err_t + err_s) + 1e-14, "{d:e} vs {err_s:e} + {err_t:e}");
    }
}

#[test]
fn breather_tracks_the_exact_solution() {
    let a = 0.4;
    let omega = mode_params(a).unwrap().omega;
    let grid = Grid::for_modulation(128, omega, 1).unwrap();
    let t0 = -2.5;
    let ic = akhmediev_field(a, t0, &grid).unwrap();
    let cfg = SimulationConfig {
        n_steps: 25_000,
        t0,
        ..Default::default()
    };
    let series = simulate(&ic, &cfg).unwrap();
    for j in (0..series.len()).step_by(100) {
        let exact = akhmediev_field(a, series.time(j), &grid).unwrap();
        let err = series.field(j).relative_l2_error(&exact);
        assert!(err <= 1e-6, "t={} err={err:e}", series.time(j));
    }
}

#[test]
fn seeded_plane_wave_conserves_norm_and_hamiltonian() {
    let omega = mode_params(0.4802).unwrap().omega;
    let grid = Grid::for_modulation(256, omega, 1).unwrap();
    let ic = seeded_plane_wave(1e-4, omega, &grid).unwrap();
    let e0 = energies(&ic);
    let cfg = SimulationConfig {
        n_steps: 50_000,
        ..Default::default()
    };
    let (mut dn, mut dh) = (0.0f64, 0.0f64);
    simulate_with(&ic, &cfg, |_, frame| {
        let e = energies(&ComplexField::new(grid, frame.to_vec()).unwrap());
        dn = dn.max(((e.norm_density - e0.norm_density) / e0.norm_density).abs());
        dh = dh.max(((e.hamiltonian - e0.hamiltonian) / e0.hamiltonian).abs());
    })
    .unwrap();
    assert!(dn <= 1e-10, "norm drift {dn:e}");
    assert!(dh <= 1e-8, "hamiltonian drift {dh:e}");
}

#[test]
fn seeded_plane_wave_recurs() {
    let omega = mode_params(0.4802).unwrap().omega;
    let grid = Grid::for_modulation(256, omega, 1).unwrap();
    let ic = seeded_plane_wave(1e-4, omega, &grid).unwrap();
    let cfg = SimulationConfig {
        n_steps: 600_000,
        sample_stride: 250,
        ..Default::default()
    };
    let series = simulate(&ic, &cfg).unwrap();
    // count excursions above 2 separated by returns below 1.5
    let mut peaks = 0;
    let mut high = false;
    for j in 0..series.len() {
        let m = series.max_envelope(j);
        if !high && m > 2.0 {
            peaks += 1;
            high = true;
        } else if high && m < 1.5 {
            high = false;
        }
    }
    assert!(peaks >= 2, "only {peaks} breather events in 120 time units");
}
