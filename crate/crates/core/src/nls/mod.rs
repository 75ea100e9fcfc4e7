//! Spectral integration of the focusing nonlinear Schrödinger equation
//!
//! ```text
//! i ψ_t + ½ ψ_ξξ + |ψ|² ψ = 0
//! ```
//!
//! on a periodic grid. Two steppers are provided: a truncated Taylor series in
//! time whose coefficients follow from a recursion on the equation itself
//! (spatial derivatives taken spectrally), and second-order Strang splitting.

mod energy;
mod field;
mod grid;
mod solver;
mod spectral;

pub use energy::{energies, EnergyReport};
pub(crate) use energy::energies_with;
pub use field::{deinterleave, interleave, ComplexField, FieldSeries};
pub(crate) use field::with_t0_entry;
pub use grid::Grid;
pub use solver::{
    simulate, simulate_with, split_step, taylor_coefficients, taylor_step, Method, NlsSolver,
    SimulationConfig, DEFAULT_TAYLOR_ORDER, MAX_TAYLOR_ORDER,
};
pub use spectral::Spectral;
