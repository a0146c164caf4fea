//! Numerical heat kernels of two-dimensional relativistic magnetic
//! Hamiltonians `sqrt(P^2 + m^2) - m`.
//!
//! The library has two evaluation routes for the kernel of `e^{-tH}`:
//!
//! * an exact partial-wave route for Aharonov-Bohm flux fields, built on
//!   Bessel/hypergeometric closed forms and damped oscillatory quadrature
//!   ([`ab`]), and
//! * a discretized radial route for compactly supported radial fields:
//!   per-mode tridiagonal spectral solves assembled into the full plane
//!   kernel and pushed through the subordination integral ([`solver`],
//!   [`quad`]).
//!
//! [`bounds`] provides evaluators for the decay bounds the kernels satisfy
//! (polynomial and logarithmic long-time envelopes, sharp exponents) and the
//! power-law fitting used to verify them. [`field`] holds radial field
//! profiles and their flux data; [`specfun`] the special-function kernel.

pub mod ab;
pub mod bounds;
pub mod config;
pub mod field;
pub mod quad;
pub mod sample;
pub mod solver;
pub mod specfun;
pub mod suites;
