//! Discrete-time quantum walks on the lattice δℤ.
//!
//! The walk `U_δ = S_δ C_δ` couples a coin e^{-iδmσ₁} with a spin-dependent
//! shift. This crate evolves it both by direct stepping and through its
//! Fourier symbol, provides the dispersion relation and Littlewood–Paley
//! multiplier calculus on the periodic ring, and measures dispersive decay and
//! Strichartz ratios across lattice widths.

pub mod cli;
pub mod config;
pub mod error;
pub mod fieldio;
pub mod harness;
pub mod lattice;
pub mod manifest;
pub mod mat2;
pub mod multiplier;
pub mod selftest;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use lattice::{
    field_norm, make_state, mixed_norm, support_radius, Exponent, NormSpec, SpaceTimeField, Spinor,
    SpinorField, StateKind, WalkParams,
};
