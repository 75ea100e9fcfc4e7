use num_complex::Complex64;

use super::{ComplexField, Spectral};

/// Length-averaged energy densities of an NLS field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyReport {
    pub kinetic: f64,
    pub potential: f64,
    pub hamiltonian: f64,
    pub norm_density: f64,
}

/// `KE = ⟨½|ψ_ξ|²⟩`, `PE = −⟨½|ψ|⁴⟩`, `H = KE + PE`, `N = ⟨|ψ|²⟩`.
pub fn energies(field: &ComplexField) -> EnergyReport {
    let mut spectral = Spectral::new(&field.grid());
    energies_with(&mut spectral, field.values())
}

pub(crate) fn energies_with(spectral: &mut Spectral, values: &[Complex64]) -> EnergyReport {
    let n = values.len() as f64;
    let mut dpsi = vec![Complex64::default(); values.len()];
    spectral.first_derivative(values, &mut dpsi);
    let kinetic = 0.5 * dpsi.iter().map(|d| d.norm_sqr()).sum::<f64>() / n;
    let potential = -0.5 * values.iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() / n;
    let norm_density = values.iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
    EnergyReport {
        kinetic,
        potential,
        hamiltonian: kinetic + potential,
        norm_density,
    }
}
