// `!(x > 0)` deliberately rejects NaN in validation paths.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Spectral harmonic-balance solver for time-periodic solutions of the
//! Blackstock-Crighton equations on intervals and boxes, with Dirichlet and
//! Neumann boundary conditions.
//!
//! The linear theory inverts the operator mode-by-mode through its
//! heat/damped-wave factorization; the nonlinear solve is a Picard iteration
//! on the quadratic terms; an independent time-stepping reference solver
//! cross-validates the fixed point by long-time integration to the periodic
//! attractor.

pub mod error;
pub mod io;
pub mod linear;
pub mod model;
pub mod nonlinear;
pub mod oracle;
pub mod picard;
pub mod scalar;
pub mod spectral;

#[cfg(test)]
mod testutil;

pub use scalar::Scalar;

/// Concrete aliases for the default double-precision instantiation.
pub type Params64 = model::ModelParams<f64>;
pub type Domain64 = model::DomainSpec<f64>;
pub type Problem64 = model::ProblemSpec<f64>;
pub type Basis64 = spectral::Basis<f64>;
pub type Field64 = spectral::SpectralField<f64>;
pub type Physical64 = spectral::PhysicalField<f64>;
pub type Report64 = picard::SolveReport<f64>;

/// Single-precision aliases for the core field types.
pub type Basis32 = spectral::Basis<f32>;
pub type Field32 = spectral::SpectralField<f32>;
