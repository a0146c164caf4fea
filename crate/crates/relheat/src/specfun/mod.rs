//! Special-function kernel: Gamma, log-Gamma, Beta, Bessel `J_nu` of
//! arbitrary real order `nu >= 0`, and the Gauss hypergeometric function
//! `F(a,b,c;w)` on `w < 1`.
//!
//! Everything here is a pure function of its arguments; there is no caching
//! and no shared state, so all entry points are safe to call concurrently.

mod bessel;
mod gamma;
mod hyp2f1;

pub use bessel::{bessel_i, bessel_j, BesselOrder};
pub(crate) use bessel::bessel_j_raw;
pub use gamma::{beta_fn, gamma_fn, ln_gamma};
pub use hyp2f1::{gauss_2f1, gauss_2f1_euler, HypergeometricArgs};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },
    #[error("{func} failed to converge (achieved residual {achieved:e})")]
    NoConvergence { func: &'static str, achieved: f64 },
}

impl SpecFunError {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        SpecFunError::Domain {
            func,
            msg: msg.into(),
        }
    }
}
