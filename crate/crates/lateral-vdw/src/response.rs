//! Particle anisotropy and orientation: gamma parameters, Euler rotations,
//! and the rotated response matrix entering the trace formula.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Euler angles (phi, theta, psi) in the active z-y-z convention,
/// canonicalized to `phi, psi` in `[0, 2pi)` and `theta` in `[0, pi]`.
///
/// The convention is fixed by the mapping it must reproduce: at
/// `(0, pi/2, 0)` the particle axis `e3'` lands on the laboratory `x` axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    phi: f64,
    theta: f64,
    psi: f64,
}

impl Orientation {
    pub fn new(phi: f64, theta: f64, psi: f64) -> Result<Self> {
        for (name, v) in [("phi", phi), ("theta", theta), ("psi", psi)] {
            if !v.is_finite() {
                return Err(Error::NonFinite { name, value: v });
            }
        }
        let mut theta = theta.rem_euclid(TWO_PI);
        let mut phi = phi;
        let mut psi = psi;
        // R_y(theta) with theta in (pi, 2pi) equals
        // R_z(pi) R_y(2pi - theta) R_z(-pi); fold into phi and psi.
        if theta > std::f64::consts::PI {
            theta = TWO_PI - theta;
            phi += std::f64::consts::PI;
            psi -= std::f64::consts::PI;
        }
        Ok(Self {
            phi: phi.rem_euclid(TWO_PI),
            theta,
            psi: psi.rem_euclid(TWO_PI),
        })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }
}

/// Anisotropy parameters of the integrated polarizability.
///
/// `gamma_iso` carries the physical scale (trace / 3); `gamma_s` and
/// `gamma_a` are dimensionless and constrained to `0 <= gamma_s < 1`,
/// `0 <= gamma_a <= min(gamma_s, 1 - gamma_s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    gamma_iso: f64,
    gamma_s: f64,
    gamma_a: f64,
}

/// Slack for boundary cases produced by `gamma_from_polarizability` rounding.
const GAMMA_DOMAIN_TOL: f64 = 1e-12;

impl GammaParams {
    /// Strict constructor enforcing the physical domain.
    pub fn new(gamma_iso: f64, gamma_s: f64, gamma_a: f64) -> Result<Self> {
        if !gamma_iso.is_finite() || gamma_iso <= 0.0 {
            return Err(Error::NonPositive {
                name: "gamma_iso",
                value: gamma_iso,
            });
        }
        let in_domain = gamma_s.is_finite()
            && gamma_a.is_finite()
            && gamma_s >= 0.0
            && gamma_s < 1.0
            && gamma_a >= -GAMMA_DOMAIN_TOL
            && gamma_a <= gamma_s.min(1.0 - gamma_s) + GAMMA_DOMAIN_TOL;
        if !in_domain {
            return Err(Error::GammaOutOfDomain { gamma_s, gamma_a });
        }
        Ok(Self {
            gamma_iso,
            gamma_s,
            gamma_a,
        })
    }

    /// Bypasses the domain check for exploratory sweeps and the classical
    /// counterpart (`gamma_s = 1`).
    pub fn new_unchecked(gamma_iso: f64, gamma_s: f64, gamma_a: f64) -> Self {
        Self {
            gamma_iso,
            gamma_s,
            gamma_a,
        }
    }

    pub fn isotropic(gamma_iso: f64) -> Result<Self> {
        Self::new(gamma_iso, 0.0, 0.0)
    }

    pub fn gamma_iso(&self) -> f64 {
        self.gamma_iso
    }

    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }

    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }

    /// The diagonal anisotropy matrix
    /// `Pi = I + gamma_s diag(-1,-1,2) + gamma_a diag(-3,3,0)`.
    pub fn pi_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(
            1.0 - self.gamma_s - 3.0 * self.gamma_a,
            1.0 - self.gamma_s + 3.0 * self.gamma_a,
            1.0 + 2.0 * self.gamma_s,
        ))
    }
}

/// Gamma parameters from the sorted diagonal of the integrated
/// polarizability matrix `A = diag(a11, a22, a33)`, `a11 <= a22 <= a33`.
pub fn gamma_from_polarizability(a11: f64, a22: f64, a33: f64) -> Result<GammaParams> {
    for (name, v) in [("a11", a11), ("a22", a22), ("a33", a33)] {
        if !v.is_finite() {
            return Err(Error::NonFinite { name, value: v });
        }
    }
    if a11 < 0.0 || !(a11 <= a22 && a22 <= a33) {
        return Err(Error::UnsortedPolarizability { a11, a22, a33 });
    }
    let trace = a11 + a22 + a33;
    if trace <= 0.0 {
        return Err(Error::DegenerateParticle);
    }
    let gamma_iso = trace / 3.0;
    let gamma_s = (a33 - 0.5 * (a22 + a11)) / (3.0 * gamma_iso);
    let gamma_a = 0.5 * (a22 - a11) / (3.0 * gamma_iso);
    GammaParams::new(gamma_iso, gamma_s, gamma_a)
}

/// Active z-y-z Euler rotation `R = R_z(phi) R_y(theta) R_z(psi)`.
pub fn euler_rotation(o: &Orientation) -> Matrix3<f64> {
    rot_z(o.phi) * rot_y(o.theta) * rot_z(o.psi)
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Real symmetric response matrix `M = R Pi R^T` with `Tr M = 3` and the
/// `Pi` diagonal as eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix(Matrix3<f64>);

impl ResponseMatrix {
    pub fn as_matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

/// `M = R Pi(gamma_s, gamma_a) R^T` for a validated particle.
///
/// `R^{-1} = R^T` exactly for the orthogonal Euler matrix.
pub fn response_matrix(o: &Orientation, g: &GammaParams) -> ResponseMatrix {
    response_matrix_raw(o, g.gamma_s, g.gamma_a)
}

/// Same as [`response_matrix`] but without the gamma domain check; used for
/// the classical counterpart (`gamma_s = 1`) and opted-out sweeps.
pub fn response_matrix_raw(o: &Orientation, gamma_s: f64, gamma_a: f64) -> ResponseMatrix {
    let pi = Matrix3::from_diagonal(&Vector3::new(
        1.0 - gamma_s - 3.0 * gamma_a,
        1.0 - gamma_s + 3.0 * gamma_a,
        1.0 + 2.0 * gamma_s,
    ));
    let r = euler_rotation(o);
    ResponseMatrix(r * pi * r.transpose())
}
