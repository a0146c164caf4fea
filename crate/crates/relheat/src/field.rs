//! Radial magnetic field profiles, their flux function
//! `a(r) = int_0^r B(rho) rho d rho`, the total normalized flux `alpha`,
//! and the derived spectral quantities `kappa` (distance of `alpha` to the
//! integers) and `eps0` (gap of the `|m + alpha|` ladder above 3/2).
//!
//! Profiles are immutable after construction; the flux function is a closed
//! form per kind (tables are integrated segment-exactly), so two profiles
//! with identical flux functions produce bit-identical downstream kernels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("invalid field profile: {0}")]
    InvalidProfile(String),
    #[error("total flux is a stored parameter for Aharonov-Bohm profiles, not an integral")]
    UnsupportedFlux,
    #[error("Aharonov-Bohm vector potential is singular at the origin")]
    SingularOrigin,
}

/// A radial magnetic field `B(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FieldProfile {
    /// `B = 0` everywhere.
    Zero,
    /// `B = b0` on `r <= r_support`, zero outside.
    Step { b0: f64, r_support: f64 },
    /// `B = b0 e^{-r^2/(2 sigma^2)}` on `r <= r_support`, zero outside.
    GaussianTruncated { b0: f64, sigma: f64, r_support: f64 },
    /// Flux line at the origin: no field away from 0, azimuthal potential
    /// `alpha / r`.
    AharonovBohm { alpha: f64 },
    /// Piecewise-linear `(r, B)` table, clamped to zero beyond the last node.
    Table { nodes: Vec<(f64, f64)> },
}

impl FieldProfile {
    /// Normalizes and validates; table profiles get their last value forced
    /// to zero so compact support holds.
    pub fn validated(self) -> Result<Self, FieldError> {
        match self {
            FieldProfile::Step { b0, r_support } => {
                if !(r_support > 0.0) || !b0.is_finite() {
                    return Err(FieldError::InvalidProfile(format!(
                        "step profile needs r_support > 0 and finite b0 (got {r_support}, {b0})"
                    )));
                }
                Ok(FieldProfile::Step { b0, r_support })
            }
            FieldProfile::GaussianTruncated { b0, sigma, r_support } => {
                if !(r_support > 0.0) || !(sigma > 0.0) || !b0.is_finite() {
                    return Err(FieldError::InvalidProfile(format!(
                        "gaussian profile needs sigma > 0, r_support > 0 (got {sigma}, {r_support})"
                    )));
                }
                Ok(FieldProfile::GaussianTruncated { b0, sigma, r_support })
            }
            FieldProfile::AharonovBohm { alpha } => {
                if !alpha.is_finite() {
                    return Err(FieldError::InvalidProfile("non-finite flux".into()));
                }
                Ok(FieldProfile::AharonovBohm { alpha })
            }
            FieldProfile::Table { mut nodes } => {
                if nodes.len() < 2 {
                    return Err(FieldError::InvalidProfile("table needs at least two nodes".into()));
                }
                if nodes.iter().any(|(r, b)| !r.is_finite() || !b.is_finite() || *r < 0.0) {
                    return Err(FieldError::InvalidProfile("table nodes must be finite with r >= 0".into()));
                }
                if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(FieldError::InvalidProfile("table radii must be strictly increasing".into()));
                }
                let last = nodes.len() - 1;
                nodes[last].1 = 0.0;
                Ok(FieldProfile::Table { nodes })
            }
            FieldProfile::Zero => Ok(FieldProfile::Zero),
        }
    }

    /// Pointwise field value; AB carries no `B(r)`.
    pub fn field_at(&self, r: f64) -> Option<f64> {
        match self {
            FieldProfile::Zero => Some(0.0),
            FieldProfile::Step { b0, r_support } => Some(if r <= *r_support { *b0 } else { 0.0 }),
            FieldProfile::GaussianTruncated { b0, sigma, r_support } => Some(if r <= *r_support {
                b0 * (-r * r / (2.0 * sigma * sigma)).exp()
            } else {
                0.0
            }),
            FieldProfile::AharonovBohm { .. } => None,
            FieldProfile::Table { nodes } => {
                if r <= nodes[0].0 {
                    return Some(nodes[0].1);
                }
                let last = nodes.len() - 1;
                if r >= nodes[last].0 {
                    return Some(0.0);
                }
                let k = nodes.partition_point(|(rn, _)| *rn <= r) - 1;
                let (r0, b0) = nodes[k];
                let (r1, b1) = nodes[k + 1];
                Some(b0 + (b1 - b0) * (r - r0) / (r1 - r0))
            }
        }
    }

    /// Radius beyond which the field vanishes (0 for Zero and AB).
    pub fn support_radius(&self) -> f64 {
        match self {
            FieldProfile::Zero | FieldProfile::AharonovBohm { .. } => 0.0,
            FieldProfile::Step { r_support, .. } | FieldProfile::GaussianTruncated { r_support, .. } => *r_support,
            FieldProfile::Table { nodes } => nodes.last().map(|(r, _)| *r).unwrap_or(0.0),
        }
    }

    pub fn label(&self) -> String {
        match self {
            FieldProfile::Zero => "zero".into(),
            FieldProfile::Step { b0, r_support } => format!("step(b0={b0},R={r_support})"),
            FieldProfile::GaussianTruncated { b0, sigma, r_support } => {
                format!("gaussian(b0={b0},sigma={sigma},R={r_support})")
            }
            FieldProfile::AharonovBohm { alpha } => format!("aharonov_bohm(alpha={alpha})"),
            FieldProfile::Table { nodes } => format!("table({} nodes)", nodes.len()),
        }
    }
}

/// Distance of `alpha` to the nearest integer, in `[0, 1/2]`.
pub fn kappa_of(alpha: f64) -> f64 {
    (alpha - alpha.round()).abs()
}

/// `min { |m + alpha| - 3/2 : m integer, |m + alpha| > 3/2 }`, always in `(0, 1]`.
pub fn eps0_of(alpha: f64) -> f64 {
    let center = (-alpha).round() as i64;
    let mut best = f64::INFINITY;
    for m in (center - 4)..=(center + 4) {
        let v = (m as f64 + alpha).abs();
        if v > 1.5 + 1e-15 {
            best = best.min(v - 1.5);
        }
    }
    best
}

/// A profile together with its flux function and spectral constants.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxData {
    profile: FieldProfile,
    alpha: f64,
    kappa: f64,
    eps0: f64,
}

impl FluxData {
    pub fn new(profile: FieldProfile) -> Result<Self, FieldError> {
        let profile = profile.validated()?;
        let alpha = match &profile {
            FieldProfile::AharonovBohm { alpha } => *alpha,
            _ => flux_alpha(&profile)?,
        };
        Ok(FluxData { kappa: kappa_of(alpha), eps0: eps0_of(alpha), alpha, profile })
    }

    pub fn profile(&self) -> &FieldProfile {
        &self.profile
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// Cumulative flux `a(r) = int_0^r B rho d rho`; constant `alpha` for
    /// `r >= R` and identically `alpha` for AB profiles.
    pub fn flux_fn(&self, r: f64) -> f64 {
        match &self.profile {
            FieldProfile::Zero => 0.0,
            FieldProfile::AharonovBohm { alpha } => *alpha,
            FieldProfile::Step { b0, r_support } => {
                let rc = r.min(*r_support);
                0.5 * b0 * rc * rc
            }
            FieldProfile::GaussianTruncated { b0, sigma, r_support } => {
                let rc = r.min(*r_support);
                let s2 = sigma * sigma;
                b0 * s2 * (1.0 - (-rc * rc / (2.0 * s2)).exp())
            }
            FieldProfile::Table { nodes } => table_flux(nodes, r),
        }
    }
}

/// Segment-exact `int_0^r B rho d rho` for a piecewise-linear table
/// (flat extension of the first value below the first node).
fn table_flux(nodes: &[(f64, f64)], r: f64) -> f64 {
    let mut acc = 0.0;
    let (r0, b0) = nodes[0];
    let head_end = r.min(r0);
    if head_end > 0.0 {
        acc += 0.5 * b0 * head_end * head_end;
    }
    if r <= r0 {
        return acc;
    }
    for w in nodes.windows(2) {
        let (ra, ba) = w[0];
        let (rb, bb) = w[1];
        let hi = r.min(rb);
        if hi <= ra {
            break;
        }
        // B(rho) = ba + s (rho - ra) on [ra, rb]
        let s = (bb - ba) / (rb - ra);
        let c0 = ba - s * ra;
        let prim = |x: f64| 0.5 * c0 * x * x + s * x * x * x / 3.0;
        acc += prim(hi) - prim(ra);
        if hi < rb {
            break;
        }
    }
    acc
}

/// Total normalized flux `int_0^inf B(r) r dr`, exact per profile kind.
pub fn flux_alpha(profile: &FieldProfile) -> Result<f64, FieldError> {
    match profile {
        FieldProfile::AharonovBohm { .. } => Err(FieldError::UnsupportedFlux),
        FieldProfile::Zero => Ok(0.0),
        FieldProfile::Step { b0, r_support } => Ok(0.5 * b0 * r_support * r_support),
        FieldProfile::GaussianTruncated { b0, sigma, r_support } => {
            let s2 = sigma * sigma;
            Ok(b0 * s2 * (1.0 - (-r_support * r_support / (2.0 * s2)).exp()))
        }
        FieldProfile::Table { nodes } => Ok(table_flux(nodes, nodes.last().unwrap().0)),
    }
}

/// Poincare-gauge vector potential `A(x) = (-x2, x1)/|x|^2 a(|x|)`.
pub fn poincare_gauge_at(flux: &FluxData, x: [f64; 2]) -> Result<[f64; 2], FieldError> {
    let r2 = x[0] * x[0] + x[1] * x[1];
    if r2 == 0.0 {
        return match flux.profile() {
            FieldProfile::AharonovBohm { .. } => Err(FieldError::SingularOrigin),
            // continuous B: a(r)/r^2 -> B(0)/2, so A -> 0 with x
            _ => Ok([0.0, 0.0]),
        };
    }
    let a = flux.flux_fn(r2.sqrt());
    Ok([-x[1] * a / r2, x[0] * a / r2])
}
