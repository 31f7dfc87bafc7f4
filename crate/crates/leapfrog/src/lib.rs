//! Numerical core for the leapfrogging vortex-ring problem.
//!
//! The crate is organised bottom-up: [`specfun`] provides the auxiliary
//! function `J`, [`kernel`] builds the axisymmetric Green kernel on top of it,
//! [`filaments`] integrates the reduced point-vortex dynamics, [`spectral`]
//! holds the torus Fourier toolkit, [`modeone`] the Volterra-type mode-one
//! operators and [`contour`] the ring boundary functional.

pub mod contour;
pub mod error;
pub mod filaments;
pub mod kernel;
pub mod modeone;
pub mod ode;
pub mod quad;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use kernel::{HalfPlanePoint, Planar};
