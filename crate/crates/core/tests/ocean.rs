use std::f64::consts::PI;

use rogue_rc::nls::Grid;
use rogue_rc::ocean::{
    analytic_signal, envelope_from_elevation, jonswap_spectrum, nls_initial_condition, positive_wavenumbers,
    spectral_variance, surface_realization, wavenumber_spectrum, CarrierScales, SeaStateParams,
};

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn spectrum_is_non_negative_with_one_peak() {
    let p = SeaStateParams::default();
    let fp = p.peak_frequency();
    let fs: Vec<f64> = (1..4000).map(|i| i as f64 * 1e-4).collect();
    let s: Vec<f64> = fs.iter().map(|&f| jonswap_spectrum(f, &p).unwrap()).collect();
    assert!(s.iter().all(|v| *v >= 0.0));
    let imax = (0..s.len()).max_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap();
    assert!((fs[imax] - fp).abs() <= 1e-4);
    // rises to the peak, falls after it
    assert!(s[..=imax].windows(2).all(|w| w[1] >= w[0]));
    assert!(s[imax..].windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn wavenumber_mapping_keeps_energy() {
    let p = SeaStateParams::default();
    let fp = p.peak_frequency();
    let (f_lo, f_hi) = (0.05 * fp, 20.0 * fp);
    let by_f = simpson(|f| jonswap_spectrum(f, &p).unwrap(), f_lo, f_hi, 200_000);
    let k_of = |f: f64| (2.0 * PI * f).powi(2) / p.g;
    let by_k = simpson(|k| wavenumber_spectrum(k, &p).unwrap(), k_of(f_lo), k_of(f_hi), 2_000_000);
    assert!(((by_k - by_f) / by_f).abs() < 5e-3, "{by_f} vs {by_k}");
    let lib = spectral_variance(&p, f_lo, f_hi, 20_000).unwrap();
    assert!(((lib - by_f) / by_f).abs() < 1e-6);
}

#[test]
fn deep_water_dispersion() {
    let p = SeaStateParams::default();
    let s = CarrierScales::from_sea_state(&p, 0.1);
    assert!((s.omega_p - (p.g * s.k_p).sqrt()).abs() < 1e-12);
}

#[test]
fn envelope_modulus_ignores_carrier_phase() {
    let grid = Grid::new(128, 400.0).unwrap();
    let k_p = 2.0 * PI * 10.0 / grid.length();
    let x = grid.nodes();
    let reference: Vec<f64> = x.iter().map(|x| 1.7 * (k_p * x).cos()).collect();
    let base = envelope_from_elevation(&reference, &grid, k_p).unwrap();
    for theta in [0.3, 1.1, 2.9] {
        let eta: Vec<f64> = x.iter().map(|x| 1.7 * (k_p * x + theta).cos()).collect();
        let env = envelope_from_elevation(&eta, &grid, k_p).unwrap();
        for (a, b) in env.values().iter().zip(base.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
            assert!((a.norm() - 1.7).abs() < 1e-12);
        }
    }
    assert!(analytic_signal(&[0.0; 16]).iter().all(|v| v.norm() == 0.0));
}

#[test]
fn realizations_match_spectral_moments() {
    let p = SeaStateParams::default();
    let grid = Grid::new(1024, 4000.0).unwrap();
    let k = positive_wavenumbers(&grid);
    let x = grid.nodes();
    let dk = k[1] - k[0];
    let discrete_var: f64 = k.iter().map(|&k| wavenumber_spectrum(k, &p).unwrap() * dk).sum();
    let (mut sum, mut sum_sq, mut n) = (0.0, 0.0, 0usize);
    for seed in 0..50 {
        let eta = surface_realization(&p, &k, &x, seed).unwrap();
        sum += eta.iter().sum::<f64>();
        sum_sq += eta.iter().map(|v| v * v).sum::<f64>();
        n += eta.len();
    }
    let mean = sum / n as f64;
    let var = sum_sq / n as f64 - mean * mean;
    assert!(((var - discrete_var) / discrete_var).abs() < 0.1, "{var} vs {discrete_var}");
    // realisations are correlated in space, so bound the mean per realisation
    assert!(mean.abs() <= 3.0 * var.sqrt() / (50f64).sqrt(), "mean {mean}");
}

#[test]
fn nls_initial_condition_scales() {
    let p = SeaStateParams::default();
    let grid = Grid::new(256, 40.0).unwrap();
    let ic = nls_initial_condition(&p, &grid, 7).unwrap();
    assert!((ic.psi.norm_density() - 1.0).abs() < 1e-12);
    assert_eq!(ic.psi.grid(), grid);
    let seconds = ic.scales.physical_time(0.15);
    assert!((seconds - 12.0).abs() < 1.5, "0.15 NLS units = {seconds} s");
    let again = nls_initial_condition(&p, &grid, 7).unwrap();
    assert_eq!(again.psi, ic.psi);
    let coarse = Grid::new(32, 40.0).unwrap();
    assert!(nls_initial_condition(&p, &coarse, 7).is_err());
}
