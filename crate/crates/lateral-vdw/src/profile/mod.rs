//! Corrugation models and assembly of the kernel matrix `K_ij` for each:
//! Gaussian bump/hole (polar quadrature), strip and N-strip grating (closed
//! form), and tabulated 1D profiles (spectral quadrature path).
//!
//! All positions and widths are dimensionless ratios: lateral coordinates
//! are `x0/z0`, widths `d/z0`, and the height amplitude `a` enters only as
//! the normalization `max |h| = a` of the first-order energy.

mod gaussian;
mod general1d;
mod strip;

pub use gaussian::kernel_gaussian;
pub use general1d::kernel_general_1d;
pub use strip::{kernel_grating, kernel_grating_derivative, kernel_strip, kernel_strip_derivative};

use nalgebra::Matrix3;

use crate::error::{Error, Result};

/// Orientation of the corrugation: bump (`+1`) or hole/trench (`-1`).
///
/// Holes are carried as a sign flag rather than a negative amplitude,
/// keeping `a > 0` as the height normalization; the first-order energy is
/// linear in the profile, so the flag is an exact entrywise factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileSign {
    Bump,
    Hole,
}

impl ProfileSign {
    pub fn factor(self) -> f64 {
        match self {
            ProfileSign::Bump => 1.0,
            ProfileSign::Hole => -1.0,
        }
    }
}

/// Gaussian widths below this ratio are rejected: the closed-form paths have
/// no lower limit, but the polar quadrature's angular resolution cost is
/// bounded by refusing them.
const MIN_GAUSSIAN_WIDTH: f64 = 1e-4;

/// Tabulated profiles must decay at the table edges; endpoint samples up to
/// this magnitude are tapered to exactly zero, larger ones are rejected.
const TABULATED_EDGE_TOL: f64 = 1e-3;

/// A corrugation model.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `h = a exp(-(|r|/d)^2)`, rotationally symmetric.
    Gaussian { d_over_z0: f64, sign: ProfileSign },
    /// Rectangular strip of width `d` centered at `x = 0`.
    Strip { d_over_z0: f64, sign: ProfileSign },
    /// `n_strips` strips of width `d` separated by gaps of width `L`,
    /// centered symmetrically around `x = 0`.
    Grating {
        d_over_z0: f64,
        l_over_z0: f64,
        n_strips: u32,
        sign: ProfileSign,
    },
    /// Sampled 1D profile `(x/z0, h/a)`; piecewise-linear in between,
    /// zero outside the table.
    Tabulated1d {
        samples: Vec<(f64, f64)>,
        sign: ProfileSign,
    },
}

impl Profile {
    pub fn gaussian(d_over_z0: f64, sign: ProfileSign) -> Result<Self> {
        let p = Profile::Gaussian { d_over_z0, sign };
        p.validate()?;
        Ok(p)
    }

    pub fn strip(d_over_z0: f64, sign: ProfileSign) -> Result<Self> {
        let p = Profile::Strip { d_over_z0, sign };
        p.validate()?;
        Ok(p)
    }

    pub fn grating(
        d_over_z0: f64,
        l_over_z0: f64,
        n_strips: u32,
        sign: ProfileSign,
    ) -> Result<Self> {
        let p = Profile::Grating {
            d_over_z0,
            l_over_z0,
            n_strips,
            sign,
        };
        p.validate()?;
        Ok(p)
    }

    /// Tabulated profile from `(x/z0, h/a)` samples. Endpoint values are
    /// tapered to zero; see [`Profile::Tabulated1d`].
    pub fn tabulated(mut samples: Vec<(f64, f64)>, sign: ProfileSign) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidProfile(format!(
                "tabulated profile needs at least 3 samples, got {}",
                samples.len()
            )));
        }
        for (i, &(x, h)) in samples.iter().enumerate() {
            if !x.is_finite() || !h.is_finite() {
                return Err(Error::InvalidProfile(format!(
                    "sample {i} is not finite: ({x}, {h})"
                )));
            }
            if h.abs() > 1.0 + 1e-12 {
                return Err(Error::InvalidProfile(format!(
                    "sample {i}: |h|/a = {} exceeds 1 (heights are normalized by max |h| = a)",
                    h.abs()
                )));
            }
        }
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidProfile(format!(
                    "abscissae must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for idx in [0, samples.len() - 1] {
            if samples[idx].1.abs() > TABULATED_EDGE_TOL {
                return Err(Error::InvalidProfile(format!(
                    "profile must decay to zero at the table edges; |h({})| = {}",
                    samples[idx].0,
                    samples[idx].1.abs()
                )));
            }
            samples[idx].1 = 0.0;
        }
        Ok(Profile::Tabulated1d { samples, sign })
    }

    /// Parses the two-column text table format: whitespace-separated
    /// `x/z0  h/a` pairs, `#` comments and blank lines allowed.
    pub fn tabulated_from_str(text: &str, sign: ProfileSign) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::InvalidProfile(format!(
                    "line {}: expected 2 columns, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let x: f64 = fields[0].parse().map_err(|e| {
                Error::InvalidProfile(format!("line {}: bad x value: {e}", lineno + 1))
            })?;
            let h: f64 = fields[1].parse().map_err(|e| {
                Error::InvalidProfile(format!("line {}: bad h value: {e}", lineno + 1))
            })?;
            samples.push((x, h));
        }
        Profile::tabulated(samples, sign)
    }

    pub fn tabulated_from_path(path: &std::path::Path, sign: ProfileSign) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidProfile(format!("cannot read {}: {e}", path.display()))
        })?;
        Profile::tabulated_from_str(&text, sign)
    }

    pub fn sign(&self) -> ProfileSign {
        match self {
            Profile::Gaussian { sign, .. }
            | Profile::Strip { sign, .. }
            | Profile::Grating { sign, .. }
            | Profile::Tabulated1d { sign, .. } => *sign,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Gaussian { d_over_z0, .. } => {
                if !d_over_z0.is_finite() || *d_over_z0 <= 0.0 {
                    return Err(Error::NonPositive {
                        name: "d_over_z0",
                        value: *d_over_z0,
                    });
                }
                if *d_over_z0 < MIN_GAUSSIAN_WIDTH {
                    return Err(Error::InvalidProfile(format!(
                        "gaussian width d/z0 = {d_over_z0} below the supported minimum {MIN_GAUSSIAN_WIDTH}"
                    )));
                }
            }
            Profile::Strip { d_over_z0, .. } => {
                if !d_over_z0.is_finite() || *d_over_z0 <= 0.0 {
                    return Err(Error::NonPositive {
                        name: "d_over_z0",
                        value: *d_over_z0,
                    });
                }
            }
            Profile::Grating {
                d_over_z0,
                l_over_z0,
                n_strips,
                ..
            } => {
                if !d_over_z0.is_finite() || *d_over_z0 <= 0.0 {
                    return Err(Error::NonPositive {
                        name: "d_over_z0",
                        value: *d_over_z0,
                    });
                }
                if !l_over_z0.is_finite() || *l_over_z0 <= 0.0 {
                    return Err(Error::NonPositive {
                        name: "l_over_z0",
                        value: *l_over_z0,
                    });
                }
                if *n_strips == 0 {
                    return Err(Error::InvalidProfile("n_strips must be >= 1".into()));
                }
            }
            Profile::Tabulated1d { samples, .. } => {
                // constructed through Profile::tabulated; re-check cheaply
                if samples.len() < 3 {
                    return Err(Error::InvalidProfile("tabulated profile too short".into()));
                }
            }
        }
        Ok(())
    }

    /// True for profiles even in `x0` (all built-in shapes; tabulated ones
    /// when the table is mirror-symmetric).
    pub fn is_even(&self) -> bool {
        match self {
            Profile::Gaussian { .. } | Profile::Strip { .. } | Profile::Grating { .. } => true,
            Profile::Tabulated1d { samples, .. } => {
                let n = samples.len();
                samples.iter().zip(samples.iter().rev()).all(|(a, b)| {
                    (a.0 + b.0).abs() <= 1e-9 * (1.0 + a.0.abs()) && (a.1 - b.1).abs() <= 1e-9
                }) && n >= 3
            }
        }
    }

    /// Signed height ratio `h(x, y)/a` of the profile.
    pub fn height_ratio(&self, x0_over_z0: f64, y0_over_z0: f64) -> f64 {
        let s = self.sign().factor();
        match self {
            Profile::Gaussian { d_over_z0, .. } => {
                let r = x0_over_z0.hypot(y0_over_z0);
                s * (-(r / d_over_z0).powi(2)).exp()
            }
            Profile::Strip { d_over_z0, .. } => {
                if x0_over_z0.abs() <= 0.5 * d_over_z0 {
                    s
                } else {
                    0.0
                }
            }
            Profile::Grating {
                d_over_z0,
                l_over_z0,
                n_strips,
                ..
            } => {
                let period = l_over_z0 + d_over_z0;
                for k in 1..=*n_strips {
                    let center = -((f64::from(*n_strips) + 1.0) / 2.0 - f64::from(k)) * period;
                    if (x0_over_z0 - center).abs() <= 0.5 * d_over_z0 {
                        return s;
                    }
                }
                0.0
            }
            Profile::Tabulated1d { samples, .. } => {
                let x = x0_over_z0;
                if x < samples[0].0 || x > samples[samples.len() - 1].0 {
                    return 0.0;
                }
                let idx = samples.partition_point(|&(sx, _)| sx <= x);
                if idx == 0 {
                    return s * samples[0].1;
                }
                if idx >= samples.len() {
                    return s * samples[samples.len() - 1].1;
                }
                let (x0, h0) = samples[idx - 1];
                let (x1, h1) = samples[idx];
                let t = (x - x0) / (x1 - x0);
                s * (h0 + t * (h1 - h0))
            }
        }
    }

    /// The kernel matrix of this profile at `(x0/z0, y0/z0)`, including the
    /// bump/hole sign. 1D profiles (strip, grating, tabulated) do not depend
    /// on `y0`.
    pub fn kernel_at(
        &self,
        x0_over_z0: f64,
        y0_over_z0: f64,
        quad: &QuadratureSpec,
    ) -> Result<KernelMatrix> {
        self.validate()?;
        let k = match self {
            Profile::Gaussian { d_over_z0, .. } => {
                kernel_gaussian(x0_over_z0, y0_over_z0, *d_over_z0, quad)?
            }
            Profile::Strip { d_over_z0, .. } => kernel_strip(x0_over_z0, *d_over_z0)?,
            Profile::Grating {
                d_over_z0,
                l_over_z0,
                n_strips,
                ..
            } => kernel_grating(x0_over_z0, *d_over_z0, *l_over_z0, *n_strips)?,
            Profile::Tabulated1d { samples, .. } => {
                let spectrum = general1d::tabulated_spectrum(samples);
                kernel_general_1d(x0_over_z0, &spectrum, quad)?
            }
        };
        Ok(apply_sign(k, self.sign()))
    }
}

/// Entrywise sign application; models holes/trenches via linearity of the
/// first-order energy in the profile height.
pub fn apply_sign(k: KernelMatrix, sign: ProfileSign) -> KernelMatrix {
    KernelMatrix(k.0 * sign.factor())
}

/// Real symmetric 3x3 corrugation kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix(pub(crate) Matrix3<f64>);

impl KernelMatrix {
    /// Builds from the six independent entries.
    pub fn from_components(xx: f64, yy: f64, zz: f64, xy: f64, xz: f64, yz: f64) -> Self {
        KernelMatrix(Matrix3::new(xx, xy, xz, xy, yy, yz, xz, yz, zz))
    }

    pub fn zeros() -> Self {
        KernelMatrix(Matrix3::zeros())
    }

    pub fn as_matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn xx(&self) -> f64 {
        self.0[(0, 0)]
    }
    pub fn yy(&self) -> f64 {
        self.0[(1, 1)]
    }
    pub fn zz(&self) -> f64 {
        self.0[(2, 2)]
    }
    pub fn xy(&self) -> f64 {
        self.0[(0, 1)]
    }
    pub fn xz(&self) -> f64 {
        self.0[(0, 2)]
    }
    pub fn yz(&self) -> f64 {
        self.0[(1, 2)]
    }
}

impl std::ops::Add for KernelMatrix {
    type Output = KernelMatrix;
    fn add(self, rhs: KernelMatrix) -> KernelMatrix {
        KernelMatrix(self.0 + rhs.0)
    }
}

/// Tolerances and truncation controls for the quadrature-backed kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance on the largest kernel entry.
    pub rel_tol: f64,
    /// Absolute tolerance floor.
    pub abs_tol: f64,
    /// Truncation radius in `u = z0 q`; the integrands decay like
    /// `e^{-|u|}`, so the tail beyond 40 is below 1e-13 of the peak.
    pub u_max: f64,
    /// Budget of adaptive panel splits before giving up.
    pub max_refinements: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            u_max: 40.0,
            max_refinements: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.rel_tol.is_finite() || self.rel_tol <= 0.0 {
            return Err(Error::InvalidQuadratureSpec(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if !self.abs_tol.is_finite() || self.abs_tol <= 0.0 {
            return Err(Error::InvalidQuadratureSpec(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !self.u_max.is_finite() || self.u_max < 20.0 {
            return Err(Error::InvalidQuadratureSpec(format!(
                "u_max must be >= 20, got {}",
                self.u_max
            )));
        }
        if self.max_refinements == 0 {
            return Err(Error::InvalidQuadratureSpec(
                "max_refinements must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Variant with tolerances tightened for derivative stencils, where
    /// quadrature noise is amplified by 1/h^2.
    pub(crate) fn for_derivatives(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.rel_tol.min(1e-11),
            abs_tol: self.abs_tol.min(1e-13),
            u_max: self.u_max,
            max_refinements: self.max_refinements.max(400),
        }
    }
}
