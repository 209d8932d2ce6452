//! Closed-form kernels for rectangular strips and N-strip gratings.
//!
//! A strip of width `d` centered at the origin has
//! `K_ij(x0/z0) = (3/16) [f_ij(x0/z0 + d/2z0) - f_ij(x0/z0 - d/2z0)]` with
//! the rational-algebraic antiderivatives `f_ij` below; no quadrature is
//! involved, so these also serve as the reference for the spectral path.

use crate::error::{Error, Result};

use super::KernelMatrix;

fn f_xx(u: f64) -> f64 {
    let u2 = u * u;
    u * u2 * (8.0 * u2 * u2 + 28.0 * u2 + 35.0) / (u2 + 1.0).powf(3.5)
}

fn f_yy(u: f64) -> f64 {
    let u2 = u * u;
    u * (8.0 * u2 * u2 + 20.0 * u2 + 15.0) / (u2 + 1.0).powf(2.5)
}

fn f_zz(u: f64) -> f64 {
    let u2 = u * u;
    u * ((16.0 * u2 + 56.0) * u2 * u2 + 66.0 * u2 + 41.0) / (u2 + 1.0).powf(3.5)
}

fn f_xz(u: f64) -> f64 {
    let u2 = u * u;
    (8.0 * u2 - 7.0) / (u2 + 1.0).powf(3.5)
}

// Derivatives of the f_ij; they collapse to short rational forms.
fn df_xx(u: f64) -> f64 {
    let u2 = u * u;
    105.0 * u2 / (u2 + 1.0).powf(4.5)
}

fn df_yy(u: f64) -> f64 {
    let u2 = u * u;
    15.0 / (u2 + 1.0).powf(3.5)
}

fn df_zz(u: f64) -> f64 {
    let u2 = u * u;
    (16.0 * u2 * u2 - 48.0 * u2 + 41.0) / (u2 + 1.0).powf(4.5)
}

fn df_xz(u: f64) -> f64 {
    let u2 = u * u;
    u * (65.0 - 40.0 * u2) / (u2 + 1.0).powf(4.5)
}

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { name, value: v })
    }
}

/// Kernel of a single strip of width `d_over_z0` centered at `x = 0`,
/// evaluated at `x0_over_z0`. Exact closed form.
pub fn kernel_strip(x0_over_z0: f64, d_over_z0: f64) -> Result<KernelMatrix> {
    check_finite("x0_over_z0", x0_over_z0)?;
    if !d_over_z0.is_finite() || d_over_z0 <= 0.0 {
        return Err(Error::NonPositive {
            name: "d_over_z0",
            value: d_over_z0,
        });
    }
    let hi = x0_over_z0 + 0.5 * d_over_z0;
    let lo = x0_over_z0 - 0.5 * d_over_z0;
    let c = 3.0 / 16.0;
    Ok(KernelMatrix::from_components(
        c * (f_xx(hi) - f_xx(lo)),
        c * (f_yy(hi) - f_yy(lo)),
        c * (f_zz(hi) - f_zz(lo)),
        0.0,
        c * (f_xz(hi) - f_xz(lo)),
        0.0,
    ))
}

/// Analytic `dK/d(x0/z0)` for a single strip.
pub fn kernel_strip_derivative(x0_over_z0: f64, d_over_z0: f64) -> Result<KernelMatrix> {
    check_finite("x0_over_z0", x0_over_z0)?;
    if !d_over_z0.is_finite() || d_over_z0 <= 0.0 {
        return Err(Error::NonPositive {
            name: "d_over_z0",
            value: d_over_z0,
        });
    }
    let hi = x0_over_z0 + 0.5 * d_over_z0;
    let lo = x0_over_z0 - 0.5 * d_over_z0;
    let c = 3.0 / 16.0;
    Ok(KernelMatrix::from_components(
        c * (df_xx(hi) - df_xx(lo)),
        c * (df_yy(hi) - df_yy(lo)),
        c * (df_zz(hi) - df_zz(lo)),
        0.0,
        c * (df_xz(hi) - df_xz(lo)),
        0.0,
    ))
}

fn grating_offsets(d_over_z0: f64, l_over_z0: f64, n: u32) -> impl Iterator<Item = f64> {
    let period = l_over_z0 + d_over_z0;
    let nf = f64::from(n);
    (1..=n).map(move |k| ((nf + 1.0) / 2.0 - f64::from(k)) * period)
}

/// Kernel of `n` strips of width `d` separated by `L`; the sum of shifted
/// single-strip kernels. `n = 1` reduces exactly to [`kernel_strip`].
pub fn kernel_grating(
    x0_over_z0: f64,
    d_over_z0: f64,
    l_over_z0: f64,
    n: u32,
) -> Result<KernelMatrix> {
    if n == 0 {
        return Err(Error::InvalidProfile("grating needs n >= 1".into()));
    }
    if !l_over_z0.is_finite() || l_over_z0 <= 0.0 {
        return Err(Error::NonPositive {
            name: "l_over_z0",
            value: l_over_z0,
        });
    }
    let mut total = KernelMatrix::zeros();
    for off in grating_offsets(d_over_z0, l_over_z0, n) {
        total = total + kernel_strip(x0_over_z0 + off, d_over_z0)?;
    }
    Ok(total)
}

/// Analytic `dK/d(x0/z0)` for the grating.
pub fn kernel_grating_derivative(
    x0_over_z0: f64,
    d_over_z0: f64,
    l_over_z0: f64,
    n: u32,
) -> Result<KernelMatrix> {
    if n == 0 {
        return Err(Error::InvalidProfile("grating needs n >= 1".into()));
    }
    let mut total = KernelMatrix::zeros();
    for off in grating_offsets(d_over_z0, l_over_z0, n) {
        total = total + kernel_strip_derivative(x0_over_z0 + off, d_over_z0)?;
    }
    Ok(total)
}
