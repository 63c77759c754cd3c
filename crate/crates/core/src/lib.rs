//! Pseudospectral laboratory for the defocusing cubic nonlinear wave
//! equation `u_tt - Δu + |u|²u = 0` on a periodic box.
//!
//! The crate provides:
//!
//! - exact rational verification of the wave-admissibility and Hölder
//!   exponent calculus ([`exponents`]),
//! - periodic lattice fields, Fourier multipliers and fractional Sobolev
//!   norms ([`spectral`]),
//! - dyadic frequency projections and Bernstein-ratio measurement
//!   ([`littlewood_paley`]),
//! - the exact half-wave propagator with dispersive-decay measurement
//!   ([`propagator`]),
//! - a Picard/Duhamel slab solver for the nonlinear flow plus an
//!   independent method-of-lines oracle ([`solver`]),
//! - energy/Morawetz/almost-periodicity diagnostics ([`diagnostics`]),
//! - the discrete Gronwall recursion and its frequency-decay instance
//!   ([`gronwall`]).

pub mod diagnostics;
pub mod error;
pub mod exponents;
pub mod gronwall;
pub mod littlewood_paley;
pub mod parallel;
pub mod propagator;
pub mod solver;
pub mod spectral;

pub use error::{Result, WaveError};
