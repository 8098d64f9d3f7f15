//! Quantum particle in a hard-wall spherical trap whose radius moves.
//!
//! The crate covers the adiabatic solutions for a linearly moving and an
//! oscillating wall, their dynamical and geometric phases, an independent
//! time-dependent Schrödinger propagator that checks those phases, and the
//! sideband line spectrum of dipole transitions in the oscillating trap.
//!
//! Modules, bottom-up:
//!
//! - [`specfun`]: spherical Bessel functions, zeros, Gauss–Legendre quadrature
//! - [`wellmodel`]: units, wall motion, levels, energies, adiabaticity ratios
//! - [`phases`]: dynamical, geometric and Berry phases (printed and oracle)
//! - [`wavefield`]: analytic wavefunctions and their Schrödinger residual
//! - [`tdse`]: co-moving Crank–Nicolson propagation of the radial equation
//! - [`spectra`]: dipole elements, sideband coefficients, transition lines
//! - [`cli`]: run configuration and the command implementations

pub mod cli;
pub mod error;
pub mod phases;
pub mod spectra;
pub mod specfun;
pub mod tdse;
pub mod wavefield;
pub mod wellmodel;

pub use error::{Error, Result};
pub use phases::{GeometricMode, GeometricPhase, PhaseBreakdown};
pub use wellmodel::{LevelIndex, Units, WallMotion};

/// Fixed CSV float format: 17 significant digits, `.` decimal point.
pub fn fmt_f64(x: f64) -> String {
    // no negative zero in output files
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}
