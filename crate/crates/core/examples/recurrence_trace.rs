//! Print the maximum envelope of the seeded plane-wave recurrence.
//!
//! cargo run --release --example recurrence_trace -- [t_end] [every]

use rogue_rc::analytic::{mode_params, seeded_plane_wave};
use rogue_rc::nls::{simulate_with, Grid, SimulationConfig};

fn main() -> rogue_rc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let t_end: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(60.0);
    let every: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(50);
    let omega = mode_params(0.4802)?.omega;
    let grid = Grid::for_modulation(256, omega, 1)?;
    let ic = seeded_plane_wave(1e-4, omega, &grid)?;
    let cfg = SimulationConfig {
        n_steps: (t_end / 2e-4).round() as usize,
        ..Default::default()
    };
    simulate_with(&ic, &cfg, |j, frame| {
        if j % every == 0 {
            let max = frame.iter().map(|v| v.norm()).fold(0.0, f64::max);
            println!("{:8.3} {:.6}", j as f64 * 5e-3, max);
        }
    })?;
    Ok(())
}
