#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rogue_rc::nls::{FieldSeries, Grid};

/// Second derivative of periodic samples by a direct O(n²) DFT, independent
/// of the library's FFT path.
pub fn dft_second_derivative(values: &[Complex64], length: f64) -> Vec<Complex64> {
    let n = values.len();
    let coeffs: Vec<Complex64> = (0..n)
        .map(|m| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (m * j) as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    (0..n)
        .map(|j| {
            coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| {
                    let idx = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
                    // the Nyquist mode has no well-defined derivative
                    if n.is_multiple_of(2) && m == n / 2 {
                        return Complex64::default();
                    }
                    let k = 2.0 * PI * idx / length;
                    -k * k * c * Complex64::from_polar(1.0, 2.0 * PI * (m * j) as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

/// Right-hand side `i(½ψ_ξξ + |ψ|²ψ)` of the NLS.
pub fn nls_rhs(values: &[Complex64], length: f64) -> Vec<Complex64> {
    let d2 = dft_second_derivative(values, length);
    values
        .iter()
        .zip(d2)
        .map(|(p, d)| Complex64::i() * (0.5 * d + p.norm_sqr() * p))
        .collect()
}

pub fn l2(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    l2(&diff) / l2(b)
}

/// Average ranks, ties sharing the mean rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = mean;
        }
        i = j + 1;
    }
    r
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

/// A travelling plane wave `e^{i(κξ − ωj)}` sampled on a small grid.
pub fn wave_series(n_space: usize, n_time: usize) -> FieldSeries {
    let grid = Grid::new(n_space, 2.0 * PI).unwrap();
    let frames = (0..n_time)
        .map(|j| {
            grid.nodes()
                .iter()
                .map(|x| {
                    let phase = x - 0.07 * j as f64;
                    Complex64::new(phase.cos() + 0.3 * (2.0 * x + 0.05 * j as f64).sin(), phase.sin())
                })
                .collect()
        })
        .collect();
    FieldSeries::new(grid, 0.0, 0.05, frames, "").unwrap()
}
