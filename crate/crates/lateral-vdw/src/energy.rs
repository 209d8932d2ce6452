//! The dimensionless first-order energy ratio, its proximity-force limit,
//! the classical dipole counterpart, and dimensional conversion.

use crate::error::{Error, Result};
use crate::profile::KernelMatrix;
use crate::response::{response_matrix_raw, Orientation, ResponseMatrix};

/// Quantum (fluctuation-induced) or classical (permanent dipole) coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Quantum,
    Classical,
}

/// Dimensional constants for converting the ratio to Joules and the trap
/// observable to rad/s. Values in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSetup {
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Vacuum permittivity (F/m).
    pub epsilon0: f64,
    /// Corrugation height normalization `a = max |h|` (m).
    pub amplitude_a: f64,
    /// Particle-plane distance (m).
    pub z0: f64,
    /// Integrated isotropic polarizability `Tr A / 3` (C^2 m^2 J^-1 s^-1).
    pub gamma_iso: f64,
    /// Permanent dipole magnitude for the classical mode (C m).
    pub dipole_p: f64,
    /// Particle mass (kg).
    pub mass: f64,
    /// Bare trap frequency (rad/s).
    pub omega_trap: f64,
}

/// Ratio above which the first-order treatment degrades; crossing it is
/// reported as a warning, not an error.
pub const PERTURBATIVE_AMPLITUDE_RATIO: f64 = 0.2;

impl PhysicalSetup {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hbar", self.hbar),
            ("epsilon0", self.epsilon0),
            ("amplitude_a", self.amplitude_a),
            ("z0", self.z0),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::NonPositive { name, value: v });
            }
        }
        Ok(())
    }

    /// Warning text when the amplitude strains the perturbative premise.
    pub fn perturbative_warning(&self) -> Option<String> {
        if self.amplitude_a > PERTURBATIVE_AMPLITUDE_RATIO * self.z0 {
            Some(format!(
                "amplitude a = {:.3e} m exceeds {} z0 = {:.3e} m; first-order results degrade",
                self.amplitude_a,
                PERTURBATIVE_AMPLITUDE_RATIO,
                PERTURBATIVE_AMPLITUDE_RATIO * self.z0
            ))
        } else {
            None
        }
    }

    /// The positive energy scale dividing the ratio:
    /// quantum `hbar gamma_iso a / (64 pi^2 eps0 z0^4)`,
    /// classical `a p^2 / (192 pi eps0 z0^4)`.
    pub fn energy_scale(&self, mode: Mode) -> Result<f64> {
        self.validate()?;
        let pi = std::f64::consts::PI;
        let z4 = self.z0.powi(4);
        match mode {
            Mode::Quantum => {
                if !self.gamma_iso.is_finite() || self.gamma_iso <= 0.0 {
                    return Err(Error::NonPositive {
                        name: "gamma_iso",
                        value: self.gamma_iso,
                    });
                }
                Ok(self.hbar * self.gamma_iso * self.amplitude_a
                    / (64.0 * pi * pi * self.epsilon0 * z4))
            }
            Mode::Classical => {
                if !self.dipole_p.is_finite() || self.dipole_p <= 0.0 {
                    return Err(Error::NonPositive {
                        name: "dipole_p",
                        value: self.dipole_p,
                    });
                }
                Ok(self.amplitude_a * self.dipole_p * self.dipole_p
                    / (192.0 * pi * self.epsilon0 * z4))
            }
        }
    }
}

/// The dimensionless first-order energy, `-Tr(K M)`. Linear in both factors.
pub fn energy_ratio(k: &KernelMatrix, m: &ResponseMatrix) -> f64 {
    -(k.as_matrix() * m.as_matrix()).trace()
}

/// Proximity-force limit of the ratio at local height `h/a`:
/// `-3 (h/a) Tr(diag(1,1,2) M)`.
pub fn energy_ratio_pfa(h_over_a: f64, m: &ResponseMatrix) -> f64 {
    let mm = m.as_matrix();
    -3.0 * h_over_a * (mm[(0, 0)] + mm[(1, 1)] + 2.0 * mm[(2, 2)])
}

/// Classical counterpart: a permanent dipole along the particle's third
/// axis, equal to the quantum ratio evaluated at `gamma_s = 1, gamma_a = 0`.
pub fn classical_ratio(k: &KernelMatrix, o: &Orientation) -> f64 {
    energy_ratio(k, &response_matrix_raw(o, 1.0, 0.0))
}

/// Converts a dimensionless ratio to Joules.
pub fn dimensional_energy(ratio: f64, s: &PhysicalSetup, mode: Mode) -> Result<f64> {
    Ok(ratio * s.energy_scale(mode)?)
}
