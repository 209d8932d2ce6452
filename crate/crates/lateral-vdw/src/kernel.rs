//! The dimensionless 3x3 kernel `J_ij(u)` weighting the corrugation spectrum.
//!
//! With `u = z0 q` and `rho = |u|`, the entries are built from the scaled
//! Bessel products `g2 = rho^2 K_2(rho)` and `g3 = rho^3 K_3(rho)`:
//!
//! ```text
//! J_kl = (3/8) (delta_kl g3 - u_k u_l g2)        k, l in {x, y}
//! J_zz = (2 + (3/8) rho^2) g2 + (1/4) g3
//! J_kz = i u_k (g2 - (3/8) g3)                   k in {x, y}
//! ```
//!
//! In-plane entries are real and even in `u`; the `kz` entries are purely
//! imaginary and odd, so `J(-u) = conj(J(u))`. The matrix is stored in the
//! real even/odd decomposition so profile integrators can assemble manifestly
//! real corrugation kernels.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special;

/// Dimensionless in-plane wavevector `u = z0 q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarVector {
    pub x: f64,
    pub y: f64,
}

impl PlanarVector {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Below this |u| the analytic limit `diag(3, 3, 6)` is returned, avoiding
/// the 0 * inf cancellation in the `x^n K_n` products.
const SMALL_U: f64 = 1e-6;

/// `J(u)` in even/odd decomposition.
///
/// The full complex matrix is `even + i * odd`, where `even` carries the
/// real in-plane block and `J_zz`, and `odd` carries the imaginary parts of
/// the `xz`/`yz` entries. Both parts are symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct JMatrix {
    even: Matrix3<f64>,
    odd: Matrix3<f64>,
}

impl JMatrix {
    /// Real part, even under `u -> -u` (entries xx, yy, zz, xy).
    pub fn even(&self) -> &Matrix3<f64> {
        &self.even
    }

    /// Imaginary part, odd under `u -> -u` (entries xz, yz).
    pub fn odd(&self) -> &Matrix3<f64> {
        &self.odd
    }

    /// The full complex matrix `even + i * odd`.
    pub fn complex(&self) -> Matrix3<Complex64> {
        Matrix3::from_fn(|i, j| Complex64::new(self.even[(i, j)], self.odd[(i, j)]))
    }
}

/// Evaluates `J(u)`; `u = 0` is handled by the analytic limit `diag(3, 3, 6)`.
pub fn j_matrix(u: PlanarVector) -> Result<JMatrix> {
    if !u.x.is_finite() || !u.y.is_finite() {
        return Err(Error::NonFinite {
            name: "j_matrix argument",
            value: if u.x.is_finite() { u.y } else { u.x },
        });
    }
    let rho = u.norm();
    if rho < SMALL_U {
        return Ok(JMatrix {
            even: Matrix3::from_diagonal(&nalgebra::Vector3::new(3.0, 3.0, 6.0)),
            odd: Matrix3::zeros(),
        });
    }

    let (g2, g3) = special::kernel_weights(rho);
    let mut even = Matrix3::zeros();
    let mut odd = Matrix3::zeros();

    even[(0, 0)] = 0.375 * (g3 - u.x * u.x * g2);
    even[(1, 1)] = 0.375 * (g3 - u.y * u.y * g2);
    even[(0, 1)] = -0.375 * u.x * u.y * g2;
    even[(1, 0)] = even[(0, 1)];
    even[(2, 2)] = (2.0 + 0.375 * rho * rho) * g2 + 0.25 * g3;

    let odd_factor = g2 - 0.375 * g3;
    odd[(0, 2)] = u.x * odd_factor;
    odd[(2, 0)] = odd[(0, 2)];
    odd[(1, 2)] = u.y * odd_factor;
    odd[(2, 1)] = odd[(1, 2)];

    Ok(JMatrix { even, odd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Reference values at u = (1, 0) from 40-digit arithmetic.
    const JXX_10: f64 = 2.053_658_972_288_537_6;
    const JZZ_10: f64 = 5.634_308_090_443_032_6;
    const JXZ_IM_10: f64 = -1.038_134_660_641_551_7;

    #[test]
    fn zero_argument_limit() {
        let j = j_matrix(PlanarVector::new(0.0, 0.0)).unwrap();
        assert_eq!(j.even()[(0, 0)], 3.0);
        assert_eq!(j.even()[(1, 1)], 3.0);
        assert_eq!(j.even()[(2, 2)], 6.0);
        assert_eq!(j.even()[(0, 1)], 0.0);
        assert_eq!(*j.odd(), Matrix3::zeros());
    }

    #[test]
    fn unit_x_values() {
        let j = j_matrix(PlanarVector::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(j.even()[(0, 0)], JXX_10, epsilon = 1e-12);
        assert_abs_diff_eq!(j.even()[(2, 2)], JZZ_10, epsilon = 1e-12);
        assert_abs_diff_eq!(j.odd()[(0, 2)], JXZ_IM_10, epsilon = 1e-12);
        // J_yy at (1,0) has no u_y^2 term
        assert_abs_diff_eq!(j.even()[(1, 1)], 0.375 * 7.101_262_824_737_944_5, epsilon = 1e-12);
        assert_eq!(j.even()[(0, 1)], 0.0);
        assert_eq!(j.odd()[(1, 2)], 0.0);
    }

    #[test]
    fn parity_conjugation() {
        let u = PlanarVector::new(0.7, -1.3);
        let plus = j_matrix(u).unwrap();
        let minus = j_matrix(PlanarVector::new(-u.x, -u.y)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(plus.even()[(i, j)], minus.even()[(i, j)], epsilon = 1e-15);
                assert_abs_diff_eq!(plus.odd()[(i, j)], -minus.odd()[(i, j)], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn exponential_decay_envelope() {
        // |J_ij(u)| <= (1 + |u|)^4 e^{-|u|} for |u| > 5
        let mut rho = 5.5;
        while rho <= 60.0 {
            let j = j_matrix(PlanarVector::new(rho / 2.0_f64.sqrt(), rho / 2.0_f64.sqrt())).unwrap();
            let bound = (1.0 + rho).powi(4) * (-rho).exp();
            for i in 0..3 {
                for k in 0..3 {
                    assert!(j.even()[(i, k)].abs() <= bound);
                    assert!(j.odd()[(i, k)].abs() <= bound);
                }
            }
            rho *= 1.3;
        }
    }

    #[test]
    fn non_finite_input_rejected() {
        assert!(j_matrix(PlanarVector::new(f64::NAN, 0.0)).is_err());
        assert!(j_matrix(PlanarVector::new(0.0, f64::INFINITY)).is_err());
    }
}
