//! Landscape analysis on top of the energy ratio: lateral force, extremum
//! classification, sign-inversion phase boundaries, minima finding, the
//! trap-frequency observable, grating regimes, and 2D energy maps.
//!
//! All coordinates are dimensionless (`x0/z0`, `d/z0`); forces are
//! `-d(U/U_scale)/d(x0/z0)`, so the dimensional lateral force is the ratio
//! times `U_scale/z0`.

use rayon::prelude::*;

use crate::energy::{energy_ratio, Mode, PhysicalSetup};
use crate::error::{Error, Result};
use crate::profile::{
    kernel_grating_derivative, kernel_strip_derivative, Profile, ProfileSign, QuadratureSpec,
};
use crate::response::{response_matrix, response_matrix_raw, GammaParams, Orientation, ResponseMatrix};

/// A complete evaluation context: what surface, what particle, how oriented,
/// which coupling, and how hard to integrate.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub profile: Profile,
    pub gammas: GammaParams,
    pub orientation: Orientation,
    pub mode: Mode,
    pub quad: QuadratureSpec,
}

impl Scenario {
    pub fn new(
        profile: Profile,
        gammas: GammaParams,
        orientation: Orientation,
        mode: Mode,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        profile.validate()?;
        quad.validate()?;
        Ok(Scenario {
            profile,
            gammas,
            orientation,
            mode,
            quad,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        self.quad.validate()
    }

    /// The response matrix this scenario traces against: the particle's for
    /// the quantum mode, `Pi(1, 0)` rotated for the classical dipole.
    pub fn response(&self) -> ResponseMatrix {
        match self.mode {
            Mode::Quantum => response_matrix(&self.orientation, &self.gammas),
            Mode::Classical => response_matrix_raw(&self.orientation, 1.0, 0.0),
        }
    }

    fn ratio_with_quad(&self, x0: f64, y0: f64, quad: &QuadratureSpec) -> Result<f64> {
        let k = self.profile.kernel_at(x0, y0, quad)?;
        Ok(energy_ratio(&k, &self.response()))
    }

    /// Step scale for derivative stencils: the ratio field varies on the
    /// larger of the kernel's intrinsic O(1) width and the profile width.
    fn feature_scale(&self) -> f64 {
        match &self.profile {
            Profile::Gaussian { d_over_z0, .. } | Profile::Strip { d_over_z0, .. } => {
                d_over_z0.max(1.0)
            }
            Profile::Grating { d_over_z0, .. } => d_over_z0.max(1.0),
            Profile::Tabulated1d { samples, .. } => {
                let span = samples[samples.len() - 1].0 - samples[0].0;
                (span / 10.0).max(1.0)
            }
        }
    }
}

/// The energy ratio at `(x0/z0, y0/z0)`; deterministic for a fixed
/// quadrature spec.
pub fn ratio_at(s: &Scenario, x0_over_z0: f64, y0_over_z0: f64) -> Result<f64> {
    s.ratio_with_quad(x0_over_z0, y0_over_z0, &s.quad)
}

/// A derivative estimate paired with its extrapolation-consistency error.
#[derive(Debug, Clone, Copy)]
pub struct ForceEstimate {
    pub value: f64,
    pub error: f64,
}

/// Richardson tolerance for finite-difference derivatives, relative to the
/// local field scale.
const DERIVATIVE_REL_TOL: f64 = 1e-5;

/// Dimensionless lateral force `-d(ratio)/d(x0/z0)` along the x axis at
/// `y0 = 0`.
///
/// Strips and gratings use the exact derivative of the closed form; the
/// quadrature-backed profiles use central differences with one Richardson
/// halving, evaluated at tightened quadrature tolerance. The returned error
/// is the Richardson disagreement (machine-level for the analytic path).
pub fn lateral_force_ratio(s: &Scenario, x0_over_z0: f64) -> Result<ForceEstimate> {
    s.validate()?;
    if !x0_over_z0.is_finite() {
        return Err(Error::NonFinite {
            name: "x0_over_z0",
            value: x0_over_z0,
        });
    }
    match &s.profile {
        Profile::Strip { d_over_z0, sign } => {
            analytic_force(s, kernel_strip_derivative(x0_over_z0, *d_over_z0)?, *sign)
        }
        Profile::Grating {
            d_over_z0,
            l_over_z0,
            n_strips,
            sign,
        } => analytic_force(
            s,
            kernel_grating_derivative(x0_over_z0, *d_over_z0, *l_over_z0, *n_strips)?,
            *sign,
        ),
        _ => finite_difference_force(s, x0_over_z0),
    }
}

fn analytic_force(
    s: &Scenario,
    dk: crate::profile::KernelMatrix,
    sign: ProfileSign,
) -> Result<ForceEstimate> {
    let dk = crate::profile::apply_sign(dk, sign);
    // U = -Tr(K M), so F = -dU/dx = Tr(K' M)
    let value = (dk.as_matrix() * s.response().as_matrix()).trace();
    Ok(ForceEstimate {
        value,
        error: 1e-14 * (1.0 + value.abs()),
    })
}

fn finite_difference_force(s: &Scenario, x0: f64) -> Result<ForceEstimate> {
    let dq = s.quad.for_derivatives();
    let h = 1e-3 * s.feature_scale();
    let eval = |x: f64| s.ratio_with_quad(x, 0.0, &dq);

    let (fp2, fm2) = (eval(x0 + h)?, eval(x0 - h)?);
    let (fp1, fm1) = (eval(x0 + 0.5 * h)?, eval(x0 - 0.5 * h)?);
    let d_h = (fp2 - fm2) / (2.0 * h);
    let d_half = (fp1 - fm1) / h;
    let richardson = (4.0 * d_half - d_h) / 3.0;
    let error = (richardson - d_half).abs();
    let scale = [fp2, fm2, fp1, fm1]
        .iter()
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    if error > DERIVATIVE_REL_TOL * scale {
        return Err(Error::Convergence {
            achieved: error,
            required: DERIVATIVE_REL_TOL * scale,
        });
    }
    Ok(ForceEstimate {
        value: -richardson,
        error,
    })
}

/// Second-derivative estimate of the ratio along x.
#[derive(Debug, Clone, Copy)]
struct CurvatureEstimate {
    curvature: f64,
    error: f64,
    /// max |ratio| over the stencil window, the degeneracy scale
    scale: f64,
    value: f64,
}

/// 5-point second derivative with one Richardson halving; steps escalate
/// geometrically until the two estimates agree.
fn curvature_along_x(s: &Scenario, x0: f64, quad: &QuadratureSpec) -> Result<CurvatureEstimate> {
    let stencil = |h: f64| -> Result<(f64, f64, f64)> {
        let fm2 = s.ratio_with_quad(x0 - 2.0 * h, 0.0, quad)?;
        let fm1 = s.ratio_with_quad(x0 - h, 0.0, quad)?;
        let f0 = s.ratio_with_quad(x0, 0.0, quad)?;
        let fp1 = s.ratio_with_quad(x0 + h, 0.0, quad)?;
        let fp2 = s.ratio_with_quad(x0 + 2.0 * h, 0.0, quad)?;
        let c = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
        let scale = [fm2, fm1, f0, fp1, fp2]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok((c, scale, f0))
    };

    let h0 = 1e-3 * s.feature_scale();
    let mut best: Option<CurvatureEstimate> = None;
    for step in [h0, 4.0 * h0, 16.0 * h0] {
        let (c_h, scale_h, value) = stencil(step)?;
        let (c_half, scale_half, _) = stencil(0.5 * step)?;
        let richardson = (16.0 * c_half - c_h) / 15.0;
        let error = (richardson - c_half).abs();
        let scale = scale_h.max(scale_half);
        let est = CurvatureEstimate {
            curvature: richardson,
            error,
            scale,
            value,
        };
        if error <= (1e-9 * scale).max(1e-5 * richardson.abs()) {
            return Ok(est);
        }
        if best.as_ref().map_or(true, |b| error < b.error) {
            best = Some(est);
        }
    }
    Ok(best.expect("at least one stencil evaluated"))
}

/// Classification of a critical point of the ratio along x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, Copy)]
pub struct ExtremumReport {
    /// x0/z0 of the critical point.
    pub location: f64,
    /// ratio value there.
    pub value: f64,
    pub kind: ExtremumKind,
    /// d^2(ratio)/d(x0/z0)^2.
    pub curvature: f64,
    /// set on the deepest interior minimum of a scan.
    pub is_global: bool,
}

/// Curvatures within this fraction of the window scale classify as
/// degenerate rather than minimum/maximum.
const DEGENERACY_BAND: f64 = 1e-6;

fn kind_from_curvature(curvature: f64, scale: f64) -> ExtremumKind {
    if curvature.abs() < DEGENERACY_BAND * scale.max(f64::MIN_POSITIVE) {
        ExtremumKind::Degenerate
    } else if curvature > 0.0 {
        ExtremumKind::Minimum
    } else {
        ExtremumKind::Maximum
    }
}

/// Classifies the origin of an even 1D profile as a minimum, maximum, or
/// degenerate point of the ratio along x.
pub fn classify_origin(s: &Scenario) -> Result<ExtremumReport> {
    s.validate()?;
    if !s.profile.is_even() {
        return Err(Error::InvalidArgument(
            "classify_origin requires a profile even in x0".into(),
        ));
    }
    let dq = s.quad.for_derivatives();
    let est = curvature_along_x(s, 0.0, &dq)?;
    Ok(ExtremumReport {
        location: 0.0,
        value: est.value,
        kind: kind_from_curvature(est.curvature, est.scale),
        curvature: est.curvature,
        is_global: false,
    })
}

/// Profile family for the phase-diagram operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFamily {
    Gaussian,
    Strip,
}

impl ProfileFamily {
    fn scenario(self, gamma_s: f64, d_over_z0: f64) -> Result<Scenario> {
        let profile = match self {
            ProfileFamily::Gaussian => Profile::gaussian(d_over_z0, ProfileSign::Bump)?,
            ProfileFamily::Strip => Profile::strip(d_over_z0, ProfileSign::Bump)?,
        };
        Scenario::new(
            profile,
            GammaParams::new_unchecked(1.0, gamma_s, 0.0),
            Orientation::new(0.0, std::f64::consts::FRAC_PI_2, 0.0)?,
            Mode::Quantum,
            QuadratureSpec::default(),
        )
    }

    fn origin_curvature(self, gamma_s: f64, d_over_z0: f64) -> Result<f64> {
        let s = self.scenario(gamma_s, d_over_z0)?;
        let dq = s.quad.for_derivatives();
        Ok(curvature_along_x(&s, 0.0, &dq)?.curvature)
    }
}

/// Bracket in `d/z0` searched by [`critical_width`].
pub const WIDTH_BRACKET: (f64, f64) = (1e-3, 20.0);

/// The width ratio at which the origin turns from minimum to maximum for
/// the standard sideways orientation (`gamma_a = 0`, `theta = pi/2`),
/// found by bisecting the origin-curvature sign change over
/// [`WIDTH_BRACKET`] to absolute tolerance `tol`.
pub fn critical_width(gamma_s: f64, family: ProfileFamily, tol: f64) -> Result<f64> {
    if !(gamma_s.is_finite() && (0.0..1.0).contains(&gamma_s)) {
        return Err(Error::GammaOutOfDomain {
            gamma_s,
            gamma_a: 0.0,
        });
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::NonPositive {
            name: "tol",
            value: tol,
        });
    }
    let (mut lo, mut hi) = WIDTH_BRACKET;
    let c_lo = family.origin_curvature(gamma_s, lo)?;
    let c_hi = family.origin_curvature(gamma_s, hi)?;
    if c_lo.signum() == c_hi.signum() {
        return Err(Error::NoSignChange {
            gamma_s,
            lo,
            hi,
        });
    }
    let sign_lo = c_lo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let c_mid = family.origin_curvature(gamma_s, mid)?;
        if c_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Widths used for the zero-width extrapolation of the threshold.
const THRESHOLD_WIDTHS: [f64; 3] = [4e-3, 2e-3, 1e-3];

/// Bracketed Illinois root of a smooth scalar function.
fn illinois_root(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> Result<f64> {
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Numerical(format!(
            "no sign change in [{lo}, {hi}] for root finding"
        )));
    }
    for _ in 0..200 {
        let mid = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let mid = mid.clamp(
            lo + 0.01 * (hi - lo),
            hi - 0.01 * (hi - lo),
        );
        let f_mid = f(mid)?;
        if f_mid == 0.0 || (hi - lo).abs() < xtol {
            return Ok(mid);
        }
        if f_mid.signum() == f_hi.signum() {
            hi = mid;
            f_hi = f_mid;
            f_lo *= 0.5; // Illinois damping keeps the stale end moving
        } else {
            lo = mid;
            f_lo = f_mid;
            f_hi *= 0.5;
        }
        if (hi - lo).abs() < xtol {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::Numerical("root finding did not converge".into()))
}

/// The smallest anisotropy that admits a sign inversion for the family:
/// the zero-width limit of the origin-curvature root in `gamma_s`, obtained
/// from the widths 4e-3, 2e-3, 1e-3 by a linear fit in `(d/z0)^2`.
pub fn threshold_gamma(family: ProfileFamily) -> Result<f64> {
    let mut roots = [0.0_f64; 3];
    for (i, &d) in THRESHOLD_WIDTHS.iter().enumerate() {
        // root uniqueness over the gamma domain, asserted by sign scan
        let mut previous: Option<(f64, f64)> = None;
        let mut bracket = None;
        let mut changes = 0;
        for k in 0..=20 {
            let g = 0.99 * f64::from(k) / 20.0;
            let c = family.origin_curvature(g, d)?;
            if let Some((pg, pc)) = previous {
                if pc.signum() != c.signum() {
                    changes += 1;
                    bracket = Some((pg, g));
                }
            }
            previous = Some((g, c));
        }
        if changes != 1 {
            return Err(Error::Numerical(format!(
                "expected exactly one curvature sign change in gamma_s, found {changes}"
            )));
        }
        let (lo, hi) = bracket.expect("bracket recorded with the sign change");
        roots[i] = illinois_root(|g| family.origin_curvature(g, d), lo, hi, 1e-8)?;
    }

    // two-point extrapolations in d^2 must agree
    let x: Vec<f64> = THRESHOLD_WIDTHS.iter().map(|d| d * d).collect();
    let extrap = |i: usize, j: usize| -> f64 {
        roots[i] - x[i] * (roots[j] - roots[i]) / (x[j] - x[i])
    };
    let e01 = extrap(0, 1);
    let e12 = extrap(1, 2);
    let disagreement = (e01 - e12).abs();
    if disagreement > 1e-3 {
        return Err(Error::Convergence {
            achieved: disagreement,
            required: 1e-3,
        });
    }

    // least-squares line through the three (d^2, root) points
    let n = 3.0;
    let sx: f64 = x.iter().sum();
    let sy: f64 = roots.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(&roots).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok((sy - slope * sx) / n)
}

/// Interior minima plus boundary artifacts from a 1D scan.
#[derive(Debug, Clone)]
pub struct MinimaScan {
    /// Interior local minima sorted by location; the deepest carries
    /// `is_global`.
    pub minima: Vec<ExtremumReport>,
    /// Window-edge minima (the ratio decreases into the boundary); reported
    /// separately because they are artifacts of the scan window.
    pub boundary: Vec<ExtremumReport>,
}

/// Finds all interior minima of the ratio along x in `[x_lo, x_hi]` at
/// `y0 = 0`, by scanning the force on a uniform grid for sign changes and
/// bisecting each bracketed zero.
pub fn find_minima_1d(
    s: &Scenario,
    x_lo: f64,
    x_hi: f64,
    grid_n: usize,
) -> Result<MinimaScan> {
    s.validate()?;
    if grid_n < 16 {
        return Err(Error::InvalidArgument(format!(
            "grid_n must be >= 16, got {grid_n}"
        )));
    }
    if !(x_lo.is_finite() && x_hi.is_finite() && x_lo < x_hi) {
        return Err(Error::InvalidArgument(format!(
            "invalid scan range [{x_lo}, {x_hi}]"
        )));
    }

    let xs: Vec<f64> = (0..=grid_n)
        .map(|i| x_lo + (x_hi - x_lo) * (i as f64) / (grid_n as f64))
        .collect();
    let forces: Vec<ForceEstimate> = xs
        .par_iter()
        .map(|&x| lateral_force_ratio(s, x))
        .collect::<Result<_>>()?;

    let xtol = 1e-7 * (x_hi - x_lo).max(1.0);
    let dq = s.quad.for_derivatives();
    let mut minima = Vec::new();

    let report_at = |x_star: f64| -> Result<ExtremumReport> {
        let est = curvature_along_x(s, x_star, &dq)?;
        Ok(ExtremumReport {
            location: x_star,
            value: est.value,
            kind: kind_from_curvature(est.curvature, est.scale),
            curvature: est.curvature,
            is_global: false,
        })
    };

    for i in 0..grid_n {
        let (fa, fb) = (forces[i].value, forces[i + 1].value);
        if fa > 0.0 && fb < 0.0 {
            // force + -> - is a minimum of the ratio
            let (mut lo, mut hi) = (xs[i], xs[i + 1]);
            while hi - lo > xtol {
                let mid = 0.5 * (lo + hi);
                let fm = lateral_force_ratio(s, mid)?.value;
                if fm > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            minima.push(report_at(0.5 * (lo + hi))?);
        } else if fa == 0.0 {
            // exact zero on a grid node (symmetric profiles at x = 0)
            let before = if i > 0 { forces[i - 1].value } else { f64::NAN };
            if before > 0.0 && fb < 0.0 {
                minima.push(report_at(xs[i])?);
            } else if i == 0 || before.is_nan() {
                // zero at the very first node: classify by curvature
                let rep = report_at(xs[i])?;
                if rep.kind == ExtremumKind::Minimum && i > 0 {
                    minima.push(rep);
                }
            }
        }
    }

    // interior zero nodes flanked by zeros on one side are rare; dedupe by
    // location within the bisection tolerance
    minima.sort_by(|a, b| a.location.total_cmp(&b.location));
    minima.dedup_by(|a, b| (a.location - b.location).abs() < 2.0 * xtol);

    // window-edge artifacts: the ratio keeps decreasing into the edge
    let mut boundary = Vec::new();
    if forces[0].value < 0.0 {
        boundary.push(ExtremumReport {
            location: xs[0],
            value: ratio_at(s, xs[0], 0.0)?,
            kind: ExtremumKind::Minimum,
            curvature: f64::NAN,
            is_global: false,
        });
    }
    if forces[grid_n].value > 0.0 {
        boundary.push(ExtremumReport {
            location: xs[grid_n],
            value: ratio_at(s, xs[grid_n], 0.0)?,
            kind: ExtremumKind::Minimum,
            curvature: f64::NAN,
            is_global: false,
        });
    }

    if let Some(best) = (0..minima.len()).min_by(|&a, &b| {
        minima[a]
            .value
            .total_cmp(&minima[b].value)
            .then(minima[a].location.total_cmp(&minima[b].location))
    }) {
        minima[best].is_global = true;
    }

    Ok(MinimaScan { minima, boundary })
}

/// Where the energy minima of a quasi-periodic grating sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// minima over the strip centers
    Peak,
    /// minima over the gap centers
    Valley,
    /// strip and gap values agree within tolerance
    Degenerate,
}

/// Classifies a grating scenario (`n_strips >= 5`) by comparing the ratio
/// over the central strip with the ratio over the adjacent gap.
pub fn regime_classify(s: &Scenario) -> Result<Regime> {
    s.validate()?;
    let (d, l, n) = match &s.profile {
        Profile::Grating {
            d_over_z0,
            l_over_z0,
            n_strips,
            ..
        } => (*d_over_z0, *l_over_z0, *n_strips),
        _ => {
            return Err(Error::InvalidArgument(
                "regime_classify requires a grating profile".into(),
            ))
        }
    };
    if n < 5 {
        return Err(Error::InvalidArgument(format!(
            "regime classification needs a quasi-periodic interior (n_strips >= 5), got {n}"
        )));
    }
    let period = d + l;
    // odd counts place a strip at the origin, even counts a gap
    let (strip_x, gap_x) = if n % 2 == 1 {
        (0.0, 0.5 * period)
    } else {
        (0.5 * period, 0.0)
    };
    let r_strip = ratio_at(s, strip_x, 0.0)?;
    let r_gap = ratio_at(s, gap_x, 0.0)?;
    let scale = r_strip.abs().max(r_gap.abs()).max(f64::MIN_POSITIVE);
    if (r_strip - r_gap).abs() <= 1e-9 * scale {
        Ok(Regime::Degenerate)
    } else if r_strip < r_gap {
        Ok(Regime::Peak)
    } else {
        Ok(Regime::Valley)
    }
}

/// The trap-frequency observable.
#[derive(Debug, Clone, Copy)]
pub struct TrapReport {
    /// d^2(ratio)/d(x0/z0)^2 at the origin.
    pub curvature_ratio: f64,
    /// d^2 U / d x0^2 in J/m^2.
    pub curvature: f64,
    /// shifted frequency in rad/s.
    pub omega_prime: f64,
    /// omega_prime - omega_trap in rad/s.
    pub delta_omega: f64,
}

/// Frequency deviation of a harmonic trap centered at `x0 = 0` over an even
/// profile: `omega' = sqrt(omega^2 + U''/m)`.
pub fn trap_shift(s: &Scenario, p: &PhysicalSetup) -> Result<TrapReport> {
    p.validate()?;
    for (name, v) in [("mass", p.mass), ("omega_trap", p.omega_trap)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::NonPositive { name, value: v });
        }
    }
    let origin = classify_origin(s)?; // also enforces evenness
    let scale = p.energy_scale(s.mode)?;
    let curvature = origin.curvature * scale / (p.z0 * p.z0);
    if curvature == 0.0 {
        return Ok(TrapReport {
            curvature_ratio: origin.curvature,
            curvature,
            omega_prime: p.omega_trap,
            delta_omega: 0.0,
        });
    }
    let omega_sq_eff = p.omega_trap * p.omega_trap + curvature / p.mass;
    if omega_sq_eff < 0.0 {
        return Err(Error::TrapDestabilized { omega_sq_eff });
    }
    let omega_prime = omega_sq_eff.sqrt();
    Ok(TrapReport {
        curvature_ratio: origin.curvature,
        curvature,
        omega_prime,
        delta_omega: omega_prime - p.omega_trap,
    })
}

/// A per-point failure inside an energy map.
#[derive(Debug, Clone)]
pub struct MapFailure {
    pub ix: usize,
    pub iy: usize,
    pub error: Error,
}

/// Row-major grid of ratio values (`x` outer, `y` inner). Failed points
/// carry NaN in `values` and an entry in `failures`.
#[derive(Debug, Clone)]
pub struct EnergyMap {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
    pub failures: Vec<MapFailure>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * (i as f64) / ((n - 1) as f64))
        .collect()
}

/// Evaluates the ratio over a rectangular grid. Point evaluations are pure,
/// so parallel and serial execution produce identical values.
pub fn energy_map_2d(
    s: &Scenario,
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<EnergyMap> {
    s.validate()?;
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument("grid sizes must be >= 1".into()));
    }
    for (name, (lo, hi)) in [("x", x_range), ("y", y_range)] {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidArgument(format!(
                "invalid {name} range [{lo}, {hi}]"
            )));
        }
    }
    let xs = linspace(x_range.0, x_range.1, nx);
    let ys = linspace(y_range.0, y_range.1, ny);

    let results: Vec<std::result::Result<f64, Error>> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| ratio_at(s, xs[idx / ny], ys[idx % ny]))
        .collect();

    let mut values = Vec::with_capacity(nx * ny);
    let mut failures = Vec::new();
    for (idx, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => values.push(v),
            Err(e) => {
                values.push(f64::NAN);
                failures.push(MapFailure {
                    ix: idx / ny,
                    iy: idx % ny,
                    error: e,
                });
            }
        }
    }
    Ok(EnergyMap {
        xs,
        ys,
        values,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn gaussian_scenario(d: f64, gamma_s: f64, theta: f64) -> Scenario {
        Scenario::new(
            Profile::gaussian(d, ProfileSign::Bump).unwrap(),
            GammaParams::new(1.0, gamma_s, 0.0).unwrap(),
            Orientation::new(0.0, theta, 0.0).unwrap(),
            Mode::Quantum,
            QuadratureSpec::default(),
        )
        .unwrap()
    }

    fn strip_scenario(d: f64, gamma_s: f64) -> Scenario {
        Scenario::new(
            Profile::strip(d, ProfileSign::Bump).unwrap(),
            GammaParams::new(1.0, gamma_s, 0.0).unwrap(),
            Orientation::new(0.0, FRAC_PI_2, 0.0).unwrap(),
            Mode::Quantum,
            QuadratureSpec::default(),
        )
        .unwrap()
    }

    fn two_strip_scenario(d: f64, gamma_s: f64) -> Scenario {
        Scenario::new(
            Profile::grating(d, 0.5, 2, ProfileSign::Bump).unwrap(),
            GammaParams::new(1.0, gamma_s, 0.0).unwrap(),
            Orientation::new(0.0, FRAC_PI_2, 0.0).unwrap(),
            Mode::Quantum,
            QuadratureSpec::default(),
        )
        .unwrap()
    }

    #[test]
    fn strip_force_matches_finite_differences() {
        let s = strip_scenario(0.7, 0.4);
        let h = 1e-5;
        for &x in &[0.0, 0.3, -1.1, 2.2] {
            let analytic = lateral_force_ratio(&s, x).unwrap().value;
            let up = ratio_at(&s, x + h, 0.0).unwrap();
            let dn = ratio_at(&s, x - h, 0.0).unwrap();
            let fd = -(up - dn) / (2.0 * h);
            assert_abs_diff_eq!(analytic, fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn even_profile_zero_force_at_origin() {
        // residue limited by cos(pi/2) = 6.1e-17 in the response matrix
        let s = strip_scenario(0.9, 0.6);
        assert!(lateral_force_ratio(&s, 0.0).unwrap().value.abs() < 1e-14);
        let g = gaussian_scenario(0.5, 0.6, FRAC_PI_2);
        let f = lateral_force_ratio(&g, 0.0).unwrap();
        assert!(f.value.abs() < 1e-8);
    }

    #[test]
    fn gaussian_force_sign_inversion() {
        // wide bump attracts toward the peak, narrow bump repels
        let wide = gaussian_scenario(0.8, 0.6, FRAC_PI_2);
        let narrow = gaussian_scenario(0.2, 0.6, FRAC_PI_2);
        let f_wide = lateral_force_ratio(&wide, 0.05).unwrap().value;
        let f_narrow = lateral_force_ratio(&narrow, 0.05).unwrap().value;
        assert!(f_wide < 0.0, "wide: {f_wide}");
        assert!(f_narrow > 0.0, "narrow: {f_narrow}");
    }

    #[test]
    fn classify_origin_fig1_scenarios() {
        let wide = classify_origin(&gaussian_scenario(0.8, 0.6, FRAC_PI_2)).unwrap();
        assert_eq!(wide.kind, ExtremumKind::Minimum);
        let narrow = classify_origin(&gaussian_scenario(0.2, 0.6, FRAC_PI_2)).unwrap();
        assert_eq!(narrow.kind, ExtremumKind::Maximum);
    }

    #[test]
    fn isotropic_origin_always_minimum() {
        for &d in &[0.1, 0.5, 1.0, 5.0] {
            let rep = classify_origin(&gaussian_scenario(d, 0.0, 0.0)).unwrap();
            assert_eq!(rep.kind, ExtremumKind::Minimum, "d = {d}");
        }
    }

    #[test]
    fn critical_width_brackets() {
        let g = critical_width(0.6, ProfileFamily::Gaussian, 1e-3).unwrap();
        assert!(g > 0.2 && g < 0.8, "gaussian critical width {g}");
        // independent reference: 0.42508 from a boundary trace at 1e-6
        assert_abs_diff_eq!(g, 0.42508, epsilon = 5e-3);

        let st = critical_width(0.6, ProfileFamily::Strip, 1e-4).unwrap();
        assert!(st > 0.1 && st < 1.0, "strip critical width {st}");
        assert_abs_diff_eq!(st, 0.78889, epsilon = 1e-3);
    }

    #[test]
    fn critical_width_below_threshold_errors() {
        assert!(matches!(
            critical_width(0.3, ProfileFamily::Gaussian, 1e-3),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn two_strip_minima_relocate() {
        // wide strips: minima near the strip centers +-0.65
        let scan = find_minima_1d(&two_strip_scenario(0.8, 0.2), -3.0, 3.0, 240).unwrap();
        assert_eq!(scan.minima.len(), 2, "minima: {:?}", scan.minima);
        let locs: Vec<f64> = scan.minima.iter().map(|m| m.location).collect();
        assert_abs_diff_eq!(locs[0], -locs[1], epsilon = 1e-5);
        assert!((locs[1] - 0.65).abs() < 0.2, "minimum at {}", locs[1]);

        // narrow strips: single minimum at the gap center
        let scan = find_minima_1d(&two_strip_scenario(0.2, 0.2), -3.0, 3.0, 240).unwrap();
        assert_eq!(scan.minima.len(), 1, "minima: {:?}", scan.minima);
        assert!(scan.minima[0].location.abs() < 1e-6);
        assert!(scan.minima[0].is_global);
    }

    #[test]
    fn single_strip_minimum_stays_centered() {
        for &d in &[0.8, 0.2] {
            let scan = find_minima_1d(&strip_scenario(d, 0.2), -3.0, 3.0, 240).unwrap();
            assert_eq!(scan.minima.len(), 1, "d = {d}");
            assert!(scan.minima[0].location.abs() < 1e-6, "d = {d}");
        }
    }

    #[test]
    fn monotone_window_reports_no_interior_minima() {
        // window to the right of a single strip: ratio increases away from it
        let scan = find_minima_1d(&strip_scenario(0.5, 0.2), 1.0, 4.0, 64).unwrap();
        assert!(scan.minima.is_empty());
        assert_eq!(scan.boundary.len(), 1);
        assert_eq!(scan.boundary[0].location, 1.0);
    }

    #[test]
    fn grating_regimes() {
        let make = |d: f64, gs: f64| {
            Scenario::new(
                Profile::grating(d, 0.5, 20, ProfileSign::Bump).unwrap(),
                GammaParams::new(1.0, gs, 0.0).unwrap(),
                Orientation::new(0.0, FRAC_PI_2, 0.0).unwrap(),
                Mode::Quantum,
                QuadratureSpec::default(),
            )
            .unwrap()
        };
        assert_eq!(regime_classify(&make(0.8, 0.2)).unwrap(), Regime::Peak);
        assert_eq!(regime_classify(&make(0.2, 0.2)).unwrap(), Regime::Valley);
        // isotropic particles sit over the strips at either width
        let mut iso_wide = make(0.8, 0.2);
        iso_wide.gammas = GammaParams::isotropic(1.0).unwrap();
        let mut iso_narrow = make(0.2, 0.2);
        iso_narrow.gammas = GammaParams::isotropic(1.0).unwrap();
        assert_eq!(regime_classify(&iso_wide).unwrap(), Regime::Peak);
        assert_eq!(regime_classify(&iso_narrow).unwrap(), Regime::Peak);

        let few = Scenario::new(
            Profile::grating(0.8, 0.5, 3, ProfileSign::Bump).unwrap(),
            GammaParams::isotropic(1.0).unwrap(),
            Orientation::new(0.0, 0.0, 0.0).unwrap(),
            Mode::Quantum,
            QuadratureSpec::default(),
        )
        .unwrap();
        assert!(regime_classify(&few).is_err());
    }

    #[test]
    fn trap_shift_signs() {
        let setup = PhysicalSetup {
            hbar: 1.054571817e-34,
            epsilon0: 8.8541878128e-12,
            amplitude_a: 1e-8,
            z0: 1e-7,
            gamma_iso: 1e-22,
            dipole_p: 1e-29,
            mass: 1e-20,
            omega_trap: 1e5,
        };
        let up = trap_shift(&gaussian_scenario(0.8, 0.6, FRAC_PI_2), &setup).unwrap();
        assert!(up.delta_omega > 0.0);
        assert!(up.curvature_ratio > 0.0);
        let down = trap_shift(&gaussian_scenario(0.2, 0.6, FRAC_PI_2), &setup).unwrap();
        assert!(down.delta_omega < 0.0);
        assert!(down.curvature_ratio < 0.0);

        // zero corrugation through a zero-height table
        let flat = Scenario::new(
            Profile::tabulated(vec![(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)], ProfileSign::Bump)
                .unwrap(),
            GammaParams::new(1.0, 0.6, 0.0).unwrap(),
            Orientation::new(0.0, FRAC_PI_2, 0.0).unwrap(),
            Mode::Quantum,
            QuadratureSpec::default(),
        )
        .unwrap();
        let none = trap_shift(&flat, &setup).unwrap();
        assert_eq!(none.delta_omega, 0.0);
        assert_eq!(none.omega_prime, setup.omega_trap);

        // strong negative curvature with a weak trap destabilizes
        let weak = PhysicalSetup {
            omega_trap: 1e-3,
            ..setup
        };
        assert!(matches!(
            trap_shift(&gaussian_scenario(0.2, 0.6, FRAC_PI_2), &weak),
            Err(Error::TrapDestabilized { .. })
        ));
    }

    #[test]
    fn map_mirror_symmetry() {
        let s = gaussian_scenario(0.5, 0.6, 1.1);
        let map = energy_map_2d(&s, (-1.0, 1.0), (-0.8, 0.8), 5, 5).unwrap();
        assert!(map.failures.is_empty());
        // phi = psi = 0 keeps the xz plane a mirror: symmetric under y -> -y
        for ix in 0..5 {
            for iy in 0..5 {
                let v = map.values[ix * 5 + iy];
                let w = map.values[ix * 5 + (4 - iy)];
                assert_abs_diff_eq!(v, w, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn classical_mode_equals_unchecked_gamma_one() {
        let mut s = strip_scenario(0.8, 0.3);
        s.orientation = Orientation::new(0.7, 1.1, 2.3).unwrap();
        let mut classical = s.clone();
        classical.mode = Mode::Classical;
        let mut quantum_limit = s;
        quantum_limit.gammas = GammaParams::new_unchecked(1.0, 1.0, 0.0);
        for &x in &[0.0, 0.4, -1.3] {
            let a = ratio_at(&classical, x, 0.0).unwrap();
            let b = ratio_at(&quantum_limit, x, 0.0).unwrap();
            assert_eq!(a, b);
            let fa = lateral_force_ratio(&classical, x).unwrap().value;
            let fb = lateral_force_ratio(&quantum_limit, x).unwrap().value;
            assert_eq!(fa, fb);
        }
    }

    #[test]
    fn theta_zero_map_is_circular() {
        let s = gaussian_scenario(0.2, 0.6, 0.0);
        for &(x, y) in &[(0.3, 0.4), (0.5, 0.0), (-0.6, 0.25)] {
            let direct = ratio_at(&s, x, y).unwrap();
            let radial = ratio_at(&s, x.hypot(y), 0.0).unwrap();
            assert_abs_diff_eq!(direct, radial, epsilon = 1e-8);
        }
    }
}
