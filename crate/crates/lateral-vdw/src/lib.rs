//! First-order van der Waals interaction between an anisotropic polarizable
//! particle and a corrugated, perfectly conducting plane.
//!
//! The correction to the flat-plane potential factorizes into a real
//! symmetric corrugation kernel `K` (all geometry) traced against a rotated
//! particle response `M` (all anisotropy and orientation):
//!
//! ```text
//! U / U_scale = -Tr(K M)
//! ```
//!
//! with `U_scale > 0` carrying the dimensional prefactor. On top of that
//! trace formula the [`analysis`] module provides the lateral force, the
//! sign-inversion phase diagram over anisotropy and width, collective
//! multi-strip effects, and the trap-frequency observable.
//!
//! # Quick start
//!
//! ```
//! use lateral_vdw::analysis::{classify_origin, ExtremumKind, Scenario};
//! use lateral_vdw::energy::Mode;
//! use lateral_vdw::profile::{Profile, ProfileSign, QuadratureSpec};
//! use lateral_vdw::response::{GammaParams, Orientation};
//!
//! // a sideways-oriented anisotropic particle above a wide Gaussian bump
//! let scenario = Scenario::new(
//!     Profile::gaussian(0.8, ProfileSign::Bump)?,
//!     GammaParams::new(1.0, 0.6, 0.0)?,
//!     Orientation::new(0.0, std::f64::consts::FRAC_PI_2, 0.0)?,
//!     Mode::Quantum,
//!     QuadratureSpec::default(),
//! )?;
//! // the bump's peak traps the particle laterally
//! assert_eq!(classify_origin(&scenario)?.kind, ExtremumKind::Minimum);
//! # Ok::<(), lateral_vdw::Error>(())
//! ```
//!
//! Runnable walkthroughs of every capability live in `examples/`; the
//! `lateral-vdw` binary exposes the same operations behind JSON run configs
//! (see the `cli` module and the `configs/` directory).

pub mod analysis;
pub mod cli;
pub mod energy;
pub mod error;
pub mod kernel;
pub mod profile;
mod quad;
pub mod response;
pub mod special;

pub use analysis::Scenario;
pub use energy::{Mode, PhysicalSetup};
pub use error::{Error, Result};
pub use profile::{KernelMatrix, Profile, ProfileSign, QuadratureSpec};
pub use response::{GammaParams, Orientation, ResponseMatrix};
