//! Numerical laboratory for one-dimensional scattering with slowly decaying,
//! non-smooth potentials.

pub mod dirac;
pub mod eigen;
pub mod multilinear;
pub mod ode;
pub mod potential;
pub mod quad;
pub mod spectral;
pub mod waveop;
