//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test --test acceptance`.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rogue_rc::analytic::{akhmediev_field, max_intensity_peak, mode_params, unstable_modes};
use rogue_rc::cli::{dataset_bytes, dataset_from_bytes};
use rogue_rc::esn::{
    build_reservoir, checkpoint_bytes, checkpoint_from_bytes, train_readout, EsnHyperParams, EsnModel, NoiseScale,
    Partition, ReadoutMode, StateMatrix,
};
use rogue_rc::forecast::{autonomous_run, ph_sweep, teacher_forced_run, ForecastOptions};
use rogue_rc::lyapunov::stretching_series;
use rogue_rc::nls::{energies, simulate, split_step, FieldSeries, Grid, SimulationConfig};
use rogue_rc::ocean::{
    nls_initial_condition, positive_wavenumbers, spectral_variance, surface_realization, to_nls_variables,
    CarrierScales, SeaStateParams,
};
use rogue_rc::Result;

use common::spearman;

const REFERENCE_OMEGA: f64 = 0.39799;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

/// The desk-scale pipeline shared by criteria 6 to 9 and 13.
struct Desk {
    train: FieldSeries,
    test: FieldSeries,
    hp: EsnHyperParams,
    model: EsnModel,
}

fn desk_hyperparams(noise_scale: NoiseScale) -> EsnHyperParams {
    EsnHyperParams {
        d_s: 300,
        noise_var: 0.02,
        noise_scale,
        seed: 1,
        ..Default::default()
    }
}

fn build_desk() -> Result<Desk> {
    let a = mode_params(unstable_modes(REFERENCE_OMEGA)?[0].a)?;
    let grid = Grid::for_modulation(256, a.omega, 1)?;
    let ic = rogue_rc::analytic::seeded_plane_wave(1e-4, a.omega, &grid)?;
    let full = simulate(
        &ic,
        &SimulationConfig {
            n_steps: 225_000,
            ..Default::default()
        },
    )?;
    // 20 units of training from t = 15, the next 10 held out
    let train = full.slice(3000..7001)?;
    let test = full.slice(7000..9001)?;
    let hp = desk_hyperparams(NoiseScale::StdDev);
    let model = EsnModel::train(&hp, Partition::new(512, 16, 4)?, std::slice::from_ref(&train), ReadoutMode::Shared)?;
    Ok(Desk { train, test, hp, model })
}

fn criterion_1() -> Result<Outcome> {
    let modes = unstable_modes(REFERENCE_OMEGA)?;
    let expected = [0.39, 0.73, 0.958, 0.964, 0.199];
    let got: Vec<f64> = modes.iter().map(|m| m.gamma).collect();
    let pass = got.len() == 5 && got.iter().zip(expected).all(|(g, e)| (g - e).abs() <= 0.005);
    let list: Vec<String> = got.iter().map(|g| format!("{g:.4}")).collect();
    outcome(pass, format!("{} modes, growth factors [{}]", got.len(), list.join(", ")))
}

fn criterion_2() -> Result<Outcome> {
    let a = 0.25;
    let omega = mode_params(a)?.omega;
    // four breather periods keep order-6 Taylor stable at this dt
    let grid = Grid::for_modulation(256, omega, 4)?;
    let ic = akhmediev_field(a, -5.0, &grid)?;
    let series = simulate(
        &ic,
        &SimulationConfig {
            n_steps: 50_000,
            t0: -5.0,
            ..Default::default()
        },
    )?;
    let e0 = energies(&ic);
    let (mut err, mut dn, mut dh) = (0.0f64, 0.0f64, 0.0f64);
    for j in 0..series.len() {
        let f = series.field(j);
        err = err.max(f.relative_l2_error(&akhmediev_field(a, series.time(j), &grid)?));
        let e = energies(&f);
        dn = dn.max(((e.norm_density - e0.norm_density) / e0.norm_density).abs());
        dh = dh.max(((e.hamiltonian - e0.hamiltonian) / e0.hamiltonian).abs());
    }
    outcome(
        err <= 1e-6 && dn <= 1e-10 && dh <= 1e-8,
        format!("max relative L2 error {err:.2e}, norm drift {dn:.2e}, Hamiltonian drift {dh:.2e}"),
    )
}

fn criterion_3() -> Result<Outcome> {
    let a = 0.25;
    let omega = mode_params(a)?.omega;
    let grid = Grid::for_modulation(256, omega, 1)?;
    let exact = akhmediev_field(a, 2.0, &grid)?;
    let mut errors = Vec::new();
    for dt in [4e-4_f64, 2e-4, 1e-4] {
        let mut f = akhmediev_field(a, 0.0, &grid)?;
        let n = (2.0 / dt).round() as usize;
        for _ in 0..n {
            f = split_step(&f, dt)?;
        }
        errors.push(f.relative_l2_error(&exact));
    }
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    outcome(
        orders.iter().all(|p| (p - 2.0).abs() <= 0.1),
        format!("errors {:.3e} {:.3e} {:.3e}, observed orders {:.3} {:.3}", errors[0], errors[1], errors[2], orders[0], orders[1]),
    )
}

fn criterion_4() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = DMatrix::from_fn(3, 20, |_, _| rng.random_range(-1.0..1.0));
    let y = DMatrix::from_fn(2, 20, |_, _| rng.random_range(-1.0..1.0));
    let sm = StateMatrix { k: 0, states: x.clone(), targets: y.clone() };
    let w = train_readout(std::slice::from_ref(&sm), 0.0, ReadoutMode::Shared, 1)?;
    let pinv = x.clone().pseudo_inverse(1e-14).map_err(|e| rogue_rc::Error::Domain(e.to_string()))?;
    let oracle = &y * pinv;
    let gap = (w.matrix(0) - &oracle).abs().max();
    let independent = train_readout(&[sm], 1e-4, ReadoutMode::Independent, 1)?;
    let shared = train_readout(
        &[StateMatrix { k: 0, states: x, targets: y }],
        1e-4,
        ReadoutMode::Shared,
        1,
    )?;
    let same = independent.matrix(0) == shared.matrix(0);
    outcome(
        gap <= 1e-10 && same,
        format!("max deviation from pseudoinverse {gap:.2e}; shared equals independent at M=1: {same}"),
    )
}

fn criterion_5() -> Result<Outcome> {
    let hp = EsnHyperParams::default();
    let res = build_reservoir(&hp, 16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inputs: Vec<Vec<f64>> = (0..100)
        .map(|_| (0..16).map(|_| rng.random_range(-1.5..1.5)).collect())
        .collect();
    let x0: Vec<f64> = (0..hp.d_s).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x1: Vec<f64> = (0..hp.d_s).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a = res.drive(&x0, &inputs);
    let b = res.drive(&x1, &inputs);
    let gaps: Vec<f64> = a
        .iter()
        .zip(&b)
        .map(|(p, q)| p.iter().zip(q).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max))
        .collect();
    let first = gaps.iter().position(|g| *g <= 1e-12);
    outcome(
        gaps[99] <= 1e-12,
        format!(
            "rho {}: state gap {:.2e} after 100 steps (below 1e-12 from step {})",
            hp.rho,
            gaps[99],
            first.map_or("never".to_string(), |s| (s + 1).to_string())
        ),
    )
}

fn criterion_6(desk: &Desk) -> Result<Outcome> {
    let model = &desk.model;
    let width = model.partition().width();
    let m_out = model.partition().m_out();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let inputs: Vec<Vec<f64>> = (0..30)
        .map(|_| (0..width).map(|_| rng.random_range(-1.5..1.5)).collect())
        .collect();
    let drive = |transform: &dyn Fn(&[f64]) -> Vec<f64>| {
        let mut states = model.zero_states();
        inputs.iter().map(|u| model.step(&mut states, &transform(u))).collect::<Vec<_>>()
    };
    let plain = drive(&|u| u.to_vec());
    let negated = drive(&|u| u.iter().map(|v| -v).collect());
    let odd = plain.iter().zip(&negated).all(|(p, n)| p.iter().zip(n).all(|(a, b)| *a == -*b));
    let mut shift = true;
    for r in 1..model.partition().m_reservoirs() {
        let by = r * m_out;
        let shifted = drive(&|u| {
            let mut v = u.to_vec();
            v.rotate_right(by);
            v
        });
        shift &= plain.iter().zip(&shifted).all(|(p, q)| {
            let mut p = p.clone();
            p.rotate_right(by);
            p == *q
        });
    }
    outcome(
        odd && shift,
        format!("odd symmetry exact: {odd}; equivariance exact for all {} window shifts: {shift}", model.partition().m_reservoirs() - 1),
    )
}

fn criterion_7(desk: &Desk) -> Result<Outcome> {
    let test = &desk.test;
    let steps = test.len() - 101;
    let run = teacher_forced_run(
        &desk.model,
        test,
        &ForecastOptions {
            start_index: 101,
            steps,
            ..Default::default()
        },
    )?;
    let mut sorted = run.nrmse.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let argmax = |v: &[f64]| (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    let envelope: Vec<f64> = (101..test.len()).map(|j| test.max_envelope(j)).collect();
    let t_err = test.time(101 + argmax(&run.nrmse));
    let t_env = test.time(101 + argmax(&envelope));
    let rho = spearman(&run.nrmse, &envelope);
    outcome(
        median < 0.1 && (t_err - t_env).abs() <= 0.5,
        format!(
            "median one-step NRMSE {median:.3e}; largest error at t={t_err:.2}, envelope peak at t={t_env:.2} \
             (rank correlation {rho:.2})"
        ),
    )
}

fn plain_and_combined(model: &EsnModel, test: &FieldSeries, t0: f64) -> Result<(usize, usize, f64, bool)> {
    let j0 = test.index_of(t0).expect("start inside the held-out data");
    let base = ForecastOptions {
        start_index: j0,
        steps: test.len() - j0,
        ..Default::default()
    };
    let plain = autonomous_run(model, test, &base)?;
    let combined = autonomous_run(
        model,
        test,
        &ForecastOptions {
            assimilation_interval: Some(70),
            normalize: true,
            ..base
        },
    )?;
    let norm = |j: usize| combined.predicted.flattened(j).iter().map(|v| v * v).sum::<f64>().sqrt();
    let n0 = norm(0);
    let drift = (0..combined.predicted.len()).map(|j| ((norm(j) - n0) / n0).abs()).fold(0.0, f64::max);
    let h = combined.horizon();
    Ok((plain.horizon().steps, h.steps, drift, h.censored))
}

fn criterion_8(desk: &Desk) -> Result<Outcome> {
    let t0 = 35.6;
    let (plain, combined, drift, censored) = plain_and_combined(&desk.model, &desk.test, t0)?;
    let ratio = combined as f64 / plain as f64;
    // the literal-variance noise reading, reported for comparison only
    let variance = EsnModel::train(
        &desk_hyperparams(NoiseScale::Variance),
        *desk.model.partition(),
        std::slice::from_ref(&desk.train),
        ReadoutMode::Shared,
    )?;
    let (vp, vc, _, _) = plain_and_combined(&variance, &desk.test, t0)?;
    println!(
        "  info: with noise variance 0.02 instead of std 0.02 the same start gives PH {vp} vs {vc} steps (ratio {:.2})",
        vc as f64 / vp as f64
    );
    outcome(
        ratio >= 2.0 && drift <= 1e-12,
        format!(
            "t0={t0}: plain PH {plain} steps, combined PH {combined}{} steps (ratio {ratio:.2}); norm drift {drift:.2e}",
            if censored { "+ (never reached epsilon)" } else { "" }
        ),
    )
}

fn criterion_9(desk: &Desk) -> Result<Outcome> {
    let test = &desk.test;
    let t0s: Vec<f64> = (0..26).map(|i| 35.75 + 0.25 * i as f64).collect();
    let points = ph_sweep(
        &desk.model,
        test,
        &t0s,
        &ForecastOptions {
            steps: 600,
            ..Default::default()
        },
    )?;
    let ph: Vec<f64> = points.iter().map(|p| p.ph_time).collect();
    let local: Vec<f64> = points
        .iter()
        .map(|p| {
            (p.start_index..(p.start_index + 200).min(test.len()))
                .map(|j| test.max_envelope(j))
                .fold(0.0, f64::max)
        })
        .collect();
    let rho = spearman(&ph, &local);
    let (lo, hi) = ph.iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    outcome(
        points.len() >= 20 && rho < 0.0,
        format!(
            "{} start times, PH between {lo:.3} and {hi:.3} time units; rank correlation with local max envelope {rho:.3}",
            points.len()
        ),
    )
}

fn criterion_10() -> Result<Outcome> {
    let grid = Grid::for_modulation(256, REFERENCE_OMEGA, 1)?;
    let dt = 5e-3;
    let n = 4001;
    let frames = (0..n).map(|j| vec![Complex64::from_polar(1.0, j as f64 * dt); grid.len()]).collect();
    let traj = FieldSeries::new(grid, 0.0, dt, frames, "plane wave")?;
    let chi = stretching_series(&traj, dt, 10)?;
    let tail = &chi[chi.len() - 200..];
    let mean = tail.iter().map(|s| s.chi).sum::<f64>() / tail.len() as f64;
    let gamma_max = unstable_modes(REFERENCE_OMEGA)?.iter().map(|m| m.gamma).fold(0.0, f64::max);
    outcome(
        (mean - 0.964).abs() <= 0.02,
        format!("mean stretching over t in [19, 20] is {mean:.4} (largest grid growth factor {gamma_max:.4})"),
    )
}

fn criterion_11() -> Result<Outcome> {
    let p = SeaStateParams::default();
    let fp = p.peak_frequency();
    let hs_spec = 4.0 * spectral_variance(&p, 0.05 * fp, 20.0 * fp, 20_000)?.sqrt();
    let grid = Grid::new(2048, 8000.0)?;
    let k = positive_wavenumbers(&grid);
    let x = grid.nodes();
    let (mut sum, mut sum_sq, mut count) = (0.0, 0.0, 0.0);
    for seed in 0..50 {
        let eta = surface_realization(&p, &k, &x, seed)?;
        sum += eta.iter().sum::<f64>();
        sum_sq += eta.iter().map(|v| v * v).sum::<f64>();
        count += eta.len() as f64;
    }
    let mean = sum / count;
    let hs_ens = 4.0 * (sum_sq / count - mean * mean).sqrt();
    let ic = nls_initial_condition(&p, &Grid::new(256, 40.0)?, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let env = rogue_rc::nls::ComplexField::new(
        Grid::new(128, 900.0)?,
        (0..128).map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect(),
    )?;
    let (psi, _) = to_nls_variables(&env, &CarrierScales::from_sea_state(&p, 0.0))?;
    let unit = (ic.psi.norm_density() - 1.0).abs().max((psi.norm_density() - 1.0).abs());
    outcome(
        (hs_spec - p.hs).abs() <= 0.05 * p.hs && (hs_ens - p.hs).abs() <= 0.1 * p.hs && unit <= 1e-12,
        format!("spectral Hs {hs_spec:.3} m, ensemble Hs {hs_ens:.3} m (50 seeds), unit-norm deviation {unit:.1e}"),
    )
}

fn criterion_12() -> Result<Outcome> {
    let peak = max_intensity_peak(&unstable_modes(REFERENCE_OMEGA)?)?;
    let mut independent = 1.0;
    let mut j = 1.0;
    while j * REFERENCE_OMEGA < 2.0 {
        let half = 0.5 * j * REFERENCE_OMEGA;
        let a = 0.5 * (1.0 - half * half);
        independent += 2.0 * (2.0 * a).sqrt();
        j += 1.0;
    }
    let gap = (peak - independent).abs();
    outcome(
        gap <= 1e-10 && (peak - 7.81).abs() < 0.01,
        format!("peak {peak:.6} vs {independent:.6} recomputed (difference {gap:.1e})"),
    )
}

const CLI_CONFIG: &str = "[solver]\nsteps = 20000\n\n[initial]\nnodes = 64\nseed_amplitude = 0.01\n\n\
[esn]\nd_s = 80\nn_w = 20\n\n[partition]\nreservoirs = 8\n\n[train]\nt_end = 2.5\n\n\
[sweep]\nt0_start = 2.5\nt0_step = 0.5\nsteps = 100\n";

fn cli_products(dir: &Path) -> Result<Vec<Vec<u8>>> {
    std::fs::write(dir.join("run.toml"), CLI_CONFIG).expect("temp dir is writable");
    let steps: [&[&str]; 4] = [
        &["simulate", "-o", "sim.rwf"],
        &["train", "--dataset", "sim.rwf", "--model", "m.rwm"],
        &["predict", "--dataset", "sim.rwf", "--model", "m.rwm", "--mode", "auto", "--t0", "2.6", "--normalize", "--assimilate-every", "70", "-o", "p.csv", "--predicted", "p.rwf"],
        &["sweep", "--dataset", "sim.rwf", "--model", "m.rwm", "-o", "s.csv"],
    ];
    for args in steps {
        let status = Command::new(env!("CARGO_BIN_EXE_rogue-rc"))
            .args(args)
            .args(["--config", "run.toml"])
            .current_dir(dir)
            .env_remove("ROGUE_RC_CONFIG_DIR")
            .status()
            .expect("binary runs");
        if !status.success() {
            return Err(rogue_rc::Error::Config(format!("{args:?} exited with {status}")));
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .expect("temp dir is readable")
        .map(|e| e.expect("entry").file_name())
        .collect();
    names.sort();
    Ok(names.iter().map(|n| std::fs::read(dir.join(n)).expect("readable")).collect())
}

fn criterion_13(desk: &Desk) -> Result<Outcome> {
    let bytes = dataset_bytes(&desk.test);
    let back = dataset_from_bytes(&bytes)?;
    let dataset_ok = back == desk.test && dataset_bytes(&back) == bytes;
    let model_bytes = checkpoint_bytes(&desk.model);
    let model_back = checkpoint_from_bytes(&model_bytes)?;
    let checkpoint_ok = model_back == desk.model && checkpoint_bytes(&model_back) == model_bytes;
    let retrained = EsnModel::train(&desk.hp, *desk.model.partition(), std::slice::from_ref(&desk.train), ReadoutMode::Shared)?;
    let retrain_ok = checkpoint_bytes(&retrained) == model_bytes;
    let a = tempfile::tempdir().expect("temp dir");
    let b = tempfile::tempdir().expect("temp dir");
    let (pa, pb) = (cli_products(a.path())?, cli_products(b.path())?);
    let cli_ok = pa.len() == 11 && pa == pb;
    outcome(
        dataset_ok && checkpoint_ok && retrain_ok && cli_ok,
        format!(
            "dataset round trip {dataset_ok}, checkpoint round trip {checkpoint_ok}, retraining identical {retrain_ok}, \
             {} CLI products identical on rerun {cli_ok}",
            pa.len()
        ),
    )
}

fn report(number: usize, budget: Duration, f: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match result {
        Ok(o) => (o.pass && elapsed <= budget, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let over = if elapsed > budget { " over budget" } else { "" };
    println!(
        "criterion {number:>2} {}: {detail} [{:.1} s of {} s{over}]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let secs = Duration::from_secs;
    let mut all = vec![
        report(1, secs(1), criterion_1),
        report(2, secs(120), criterion_2),
        report(3, secs(120), criterion_3),
        report(4, secs(1), criterion_4),
        report(5, secs(5), criterion_5),
    ];

    let start = Instant::now();
    let desk = build_desk();
    let build_time = start.elapsed();
    match desk {
        Ok(desk) => {
            println!("  desk model: simulation and training took {:.1} s (counted in criterion 7)", build_time.as_secs_f64());
            all.push(report(6, secs(10), || criterion_6(&desk)));
            let budget7 = secs(15 * 60).saturating_sub(build_time);
            all.push(report(7, budget7, || criterion_7(&desk)));
            all.push(report(8, secs(10 * 60), || criterion_8(&desk)));
            all.push(report(9, secs(30 * 60), || criterion_9(&desk)));
            all.push(report(10, secs(120), criterion_10));
            all.push(report(11, secs(120), criterion_11));
            all.push(report(12, secs(1), criterion_12));
            all.push(report(13, secs(60), || criterion_13(&desk)));
        }
        Err(e) => {
            println!("  desk model could not be built: {e}");
            for n in [6, 7, 8, 9] {
                println!("criterion {n:>2} FAIL: desk model unavailable");
                all.push(false);
            }
            all.push(report(10, secs(120), criterion_10));
            all.push(report(11, secs(120), criterion_11));
            all.push(report(12, secs(1), criterion_12));
            println!("criterion 13 FAIL: desk model unavailable");
            all.push(false);
        }
    }
    let passed = all.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", all.len());
    if passed != all.len() {
        std::process::exit(1);
    }
}
