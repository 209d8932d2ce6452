//! Kernel of a generic 1D profile through its spectrum.
//!
//! For `h` depending on `x` alone the 2D spectral integral collapses to
//!
//! ```text
//! K_ij(x0/z0) = (1/2pi) int du s(u) e^{i u x0/z0} J_ij(u, 0)
//! ```
//!
//! where `s(u) = h1~(u/z0) / (a z0)` is the dimensionless 1D spectrum
//! supplied by the caller (complex in general; real and even for even
//! profiles). The integrand decays like `e^{-|u|}`, so the line is truncated
//! at `+-u_max`. The real parts assemble the kernel; the imaginary residue
//! is checked against the tolerances and discarded.
//!
//! Tabulated profiles get their spectrum from the exact Fourier transform of
//! the piecewise-linear interpolant with endpoints tapered to zero, which
//! avoids periodization artifacts entirely.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::integrate_adaptive;
use crate::special;

use super::{KernelMatrix, QuadratureSpec};

/// Kernel from a caller-supplied dimensionless spectrum `s(u)`.
///
/// For the strip of width `d/z0` the spectrum is `2 sin(u d / 2 z0) / u`;
/// the result then matches [`super::kernel_strip`] to quadrature accuracy.
pub fn kernel_general_1d(
    x0_over_z0: f64,
    spectrum: &dyn Fn(f64) -> Complex64,
    spec: &QuadratureSpec,
) -> Result<KernelMatrix> {
    spec.validate()?;
    if !x0_over_z0.is_finite() {
        return Err(Error::NonFinite {
            name: "x0_over_z0",
            value: x0_over_z0,
        });
    }

    // components: re/im of xx, yy, zz, xz
    let mut integrand = |u: f64| -> Result<[f64; 8]> {
        let au = u.abs();
        let (g2, g3) = if au < 1e-9 {
            (2.0, 8.0)
        } else {
            special::kernel_weights(au)
        };
        let e_xx = 0.375 * (g3 - u * u * g2);
        let e_yy = 0.375 * g3;
        let e_zz = (2.0 + 0.375 * u * u) * g2 + 0.25 * g3;
        let o_xz = u * (g2 - 0.375 * g3);

        let s = spectrum(u);
        if !s.re.is_finite() || !s.im.is_finite() {
            return Err(Error::InvalidProfile(format!(
                "spectrum returned non-finite value at u = {u}"
            )));
        }
        let phase = Complex64::from_polar(1.0, u * x0_over_z0);
        let w = s * phase;
        // even entries couple through w, the odd xz entry through i*w
        Ok([
            w.re * e_xx,
            w.im * e_xx,
            w.re * e_yy,
            w.im * e_yy,
            w.re * e_zz,
            w.im * e_zz,
            -w.im * o_xz,
            w.re * o_xz,
        ])
    };

    // uniform initial panels, capped so the plane-wave phase is resolved
    let width = (std::f64::consts::TAU / (1.0 + x0_over_z0.abs())).min(4.0);
    let half_panels = (spec.u_max / width).ceil().max(4.0) as usize;
    let step = spec.u_max / half_panels as f64;
    let mut pts = Vec::with_capacity(2 * half_panels + 1);
    for i in -(half_panels as i64)..=(half_panels as i64) {
        pts.push(i as f64 * step);
    }

    let (vals, _err) = integrate_adaptive(
        &mut integrand,
        &pts,
        spec.rel_tol,
        spec.abs_tol,
        spec.max_refinements,
    )?;

    let norm = 1.0 / std::f64::consts::TAU;
    let re = [vals[0] * norm, vals[2] * norm, vals[4] * norm, vals[6] * norm];
    let im = [vals[1] * norm, vals[3] * norm, vals[5] * norm, vals[7] * norm];

    let scale = re.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let residue = im.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let allowed = (10.0 * spec.abs_tol).max(10.0 * spec.rel_tol * scale);
    if residue > allowed {
        return Err(Error::Numerical(format!(
            "imaginary residue {residue:.3e} exceeds {allowed:.3e}; the spectrum does not \
             describe a real profile"
        )));
    }

    Ok(KernelMatrix::from_components(
        re[0], re[1], re[2], 0.0, re[3], 0.0,
    ))
}

/// Exact Fourier transform of the piecewise-linear interpolant through
/// `samples`, with the (already tapered) endpoints held at zero:
/// `s(u) = int h(x) e^{-i u x} dx`.
pub(crate) fn tabulated_spectrum(samples: &[(f64, f64)]) -> impl Fn(f64) -> Complex64 + '_ {
    move |u: f64| {
        let mut total = Complex64::new(0.0, 0.0);
        for w in samples.windows(2) {
            let (x0, h0) = w[0];
            let (x1, h1) = w[1];
            let dx = x1 - x0;
            let slope = (h1 - h0) / dx;
            let (e0, e1) = segment_moments(u, dx);
            total += Complex64::from_polar(1.0, -u * x0) * (h0 * e0 + slope * e1);
        }
        total
    }
}

/// `E0 = int_0^D e^{-iut} dt` and `E1 = int_0^D t e^{-iut} dt`, switching to
/// series below |uD| = 1e-4 to dodge cancellation.
fn segment_moments(u: f64, d: f64) -> (Complex64, Complex64) {
    let w = u * d;
    if w.abs() < 1e-4 {
        let z = Complex64::new(0.0, -w);
        // E0 = D sum w^k/(k+1)!, E1 = D^2 sum w^k/(k! (k+2))
        let mut e0 = Complex64::new(1.0, 0.0);
        let mut e1 = Complex64::new(0.5, 0.0);
        let mut zp = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 1..=4 {
            zp *= z;
            fact *= k as f64;
            e0 += zp / (fact * (k as f64 + 1.0));
            e1 += zp / (fact * (k as f64 + 2.0));
        }
        (e0 * d, e1 * d * d)
    } else {
        let iu = Complex64::new(0.0, u);
        let ph = Complex64::from_polar(1.0, -w);
        let e0 = (Complex64::new(1.0, 0.0) - ph) / iu;
        let e1 = (e0 - d * ph) / iu;
        (e0, e1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::kernel_strip;
    use approx::assert_abs_diff_eq;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn strip_spectrum(d: f64) -> impl Fn(f64) -> Complex64 {
        move |u: f64| {
            let v = if u.abs() < 1e-8 {
                d * (1.0 - (u * d).powi(2) / 24.0)
            } else {
                2.0 * (0.5 * u * d).sin() / u
            };
            Complex64::new(v, 0.0)
        }
    }

    #[test]
    fn strip_spectrum_matches_closed_form() {
        for &(x, d) in &[(0.0, 1.0), (0.7, 0.4), (-1.3, 2.5), (0.2, 0.1), (2.8, 0.9)] {
            let q = kernel_general_1d(x, &strip_spectrum(d), &spec()).unwrap();
            let c = kernel_strip(x, d).unwrap();
            for (a, b) in [
                (q.xx(), c.xx()),
                (q.yy(), c.yy()),
                (q.zz(), c.zz()),
                (q.xz(), c.xz()),
            ] {
                assert_abs_diff_eq!(a, b, epsilon = 1e-8);
            }
            assert_eq!(q.xy(), 0.0);
            assert_eq!(q.yz(), 0.0);
        }
    }

    #[test]
    fn fourier_shift_theorem() {
        // multiplying the spectrum by e^{-ius} moves the profile to +s,
        // so evaluating at x0 matches the unshifted kernel at x0 - s
        let (d, s) = (0.8, 0.6);
        let base = strip_spectrum(d);
        let shifted = move |u: f64| base(u) * Complex64::from_polar(1.0, -u * s);
        for &x in &[0.0, 0.5, 1.4] {
            let k_shift = kernel_general_1d(x, &shifted, &spec()).unwrap();
            let k_base = kernel_strip(x - s, d).unwrap();
            assert_abs_diff_eq!(k_shift.xx(), k_base.xx(), epsilon = 1e-8);
            assert_abs_diff_eq!(k_shift.xz(), k_base.xz(), epsilon = 1e-8);
            assert_abs_diff_eq!(k_shift.zz(), k_base.zz(), epsilon = 1e-8);
        }
    }

    #[test]
    fn zero_spectrum_gives_zero_matrix() {
        let zero = |_u: f64| Complex64::new(0.0, 0.0);
        let k = kernel_general_1d(0.3, &zero, &spec()).unwrap();
        assert_eq!(*k.as_matrix(), nalgebra::Matrix3::zeros());
    }

    #[test]
    fn tabulated_gaussian_ridge_matches_analytic_spectrum() {
        // 1D gaussian ridge h/a = exp(-(x/d)^2): spectrum d sqrt(pi) e^{-(ud/2)^2}
        let d = 0.9_f64;
        let n = 3000;
        let x_max = 6.0 * d;
        let samples: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let x = -x_max + 2.0 * x_max * (i as f64) / (n as f64);
                (x, (-(x / d).powi(2)).exp())
            })
            .collect();
        let table = tabulated_spectrum(&samples);
        let analytic = move |u: f64| {
            Complex64::new(
                d * std::f64::consts::PI.sqrt() * (-(0.5 * u * d).powi(2)).exp(),
                0.0,
            )
        };
        // piecewise-linear interpolation limits the match to ~ (dx)^2 h''
        for &x in &[0.0, 0.4, 1.1] {
            let kt = kernel_general_1d(x, &table, &spec()).unwrap();
            let ka = kernel_general_1d(x, &analytic, &spec()).unwrap();
            assert_abs_diff_eq!(kt.xx(), ka.xx(), epsilon = 3e-5);
            assert_abs_diff_eq!(kt.zz(), ka.zz(), epsilon = 3e-5);
            assert_abs_diff_eq!(kt.xz(), ka.xz(), epsilon = 3e-5);
        }
    }

    #[test]
    fn segment_moment_reference_values() {
        // exact values from 40-digit quadrature, covering both branches
        let cases = [
            // (u, d, E0, E1) -- series branch
            (
                0.005,
                0.01,
                Complex64::new(9.999_999_995_833_334e-3, -2.499_999_999_479_167e-7),
                Complex64::new(4.999_999_996_875_000e-5, -1.666_666_666_25e-9),
            ),
            // closed-form branch, mild oscillation
            (
                0.5,
                0.01,
                Complex64::new(9.999_958_333_385_417e-3, -2.499_994_791_671_007e-5),
                Complex64::new(4.999_968_750_043_403e-5, -1.666_662_500_003_72e-7),
            ),
            // closed-form branch, order-one phase
            (
                3.0,
                0.7,
                Complex64::new(2.877_364_555_496_246e-1, -5.016_153_681_999_524e-1),
                Complex64::new(3.421_039_615_141_973e-2, -2.137_095_762_565_082e-1),
            ),
        ];
        for &(u, d, want0, want1) in &cases {
            let (e0, e1) = segment_moments(u, d);
            assert!((e0 - want0).norm() < 1e-9 * want0.norm(), "E0 at u={u}");
            assert!((e1 - want1).norm() < 1e-8 * want1.norm(), "E1 at u={u}");
        }
    }
}
