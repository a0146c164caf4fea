//! Gauss hypergeometric function `F(a, b, c; w)` on `w < 1`.
//!
//! For `w < 0` the argument is first mapped into `[0, 1)` with the Pfaff
//! transformation `F(a,b,c;w) = (1-w)^{-b} F(b, c-a, c; w/(w-1))` (or its
//! `a`-form, whichever gives the slower coefficient growth) and the Gauss
//! series is summed there. When the transformed argument sits too close to 1
//! for the capped series, the Euler integral
//!
//! ```text
//! F(a,b,c;w) = Gamma(c)/(Gamma(b) Gamma(c-b))
//!              int_0^1 s^{b-1} (1-s)^{c-b-1} (1-s w)^{-a} ds,   c > b > 0
//! ```
//!
//! takes over via tanh-sinh quadrature. The Euler route is also exported on
//! its own as the slow reference evaluator.

use super::gamma::ln_gamma;
use super::SpecFunError;
use crate::quad;

const SERIES_MAX_TERMS: usize = 500;
const SERIES_ARG_LIMIT: f64 = 0.95;

/// Arguments of `F(a, b, c; w)`; the supported range is `w < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricArgs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub w: f64,
}

impl HypergeometricArgs {
    pub fn new(a: f64, b: f64, c: f64, w: f64) -> Self {
        HypergeometricArgs { a, b, c, w }
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < 1e-12
}

/// Raw Gauss series at argument `v`; `Err` carries the achieved residual.
fn gauss_series(a: f64, b: f64, c: f64, v: f64) -> Result<f64, f64> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut residual = 1.0f64;
    let mut settled = 0u32;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * v;
        sum += term;
        residual = term.abs() / sum.abs().max(1e-300);
        if residual <= 1e-16 {
            settled += 1;
            if settled >= 2 {
                return Ok(sum);
            }
        } else {
            settled = 0;
        }
    }
    Err(residual)
}

/// Euler-integral evaluation of `F(a, b, c; w)`, `w < 1`. Requires
/// `c > b > 0` (the symmetric `a`-slot is tried as well). Used directly as
/// the reference route and as the fallback for arguments the capped series
/// cannot reach.
pub fn gauss_2f1_euler(args: &HypergeometricArgs) -> Result<f64, SpecFunError> {
    let HypergeometricArgs { a, b, c, w } = *args;
    validate_common(a, b, c, w)?;
    let (a, b) = if c > b && b > 0.0 {
        (a, b)
    } else if c > a && a > 0.0 {
        (b, a)
    } else {
        return Err(SpecFunError::domain(
            "gauss_2f1_euler",
            format!("integral representation needs c > b > 0, got (a, b, c) = ({a}, {b}, {c})"),
        ));
    };
    let prefactor = (ln_gamma(c)? - ln_gamma(b)? - ln_gamma(c - b)?).exp();
    // split at 1/2 and fold the upper half to u = 1 - s, so each algebraic
    // endpoint singularity sits at 0 where tanh-sinh abscissas stay exact
    let lower = move |s: f64| s.powf(b - 1.0) * (1.0 - s).powf(c - b - 1.0) * (1.0 - s * w).powf(-a);
    let upper = move |u: f64| (1.0 - u).powf(b - 1.0) * u.powf(c - b - 1.0) * ((1.0 - w) + u * w).powf(-a);
    let map_err = |e: quad::QuadError| match e {
        quad::QuadError::NonConvergence { estimate, error } => SpecFunError::NoConvergence {
            func: "gauss_2f1_euler",
            achieved: error / estimate.abs().max(1e-300),
        },
        other => SpecFunError::domain("gauss_2f1_euler", other.to_string()),
    };
    let lo = quad::tanh_sinh(&lower, 0.0, 0.5, 1e-15, 5e-13).map_err(map_err)?;
    let hi = quad::tanh_sinh(&upper, 0.0, 0.5, 1e-15, 5e-13).map_err(map_err)?;
    Ok(prefactor * (lo.value + hi.value))
}

fn validate_common(a: f64, b: f64, c: f64, w: f64) -> Result<(), SpecFunError> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("w", w)] {
        if !v.is_finite() {
            return Err(SpecFunError::domain("gauss_2f1", format!("{name} = {v} not finite")));
        }
    }
    if w >= 1.0 {
        return Err(SpecFunError::domain("gauss_2f1", format!("argument w = {w} not below 1")));
    }
    if is_nonpositive_integer(c) {
        return Err(SpecFunError::domain("gauss_2f1", format!("c = {c} is a non-positive integer")));
    }
    Ok(())
}

/// `F(a, b, c; w)` for `w < 1`.
pub fn gauss_2f1(args: &HypergeometricArgs) -> Result<f64, SpecFunError> {
    let HypergeometricArgs { a, b, c, w } = *args;
    validate_common(a, b, c, w)?;
    if w == 0.0 {
        return Ok(1.0);
    }

    let (factor, aa, bb, v) = if w < 0.0 {
        // Pfaff: pull the argument into [0, 1); of the two symmetric forms
        // pick the one whose series coefficients grow slower (k^{A+B-C-1})
        let v = w / (w - 1.0);
        if a <= b {
            ((1.0 - w).powf(-a), a, c - b, v)
        } else {
            ((1.0 - w).powf(-b), b, c - a, v)
        }
    } else {
        (1.0, a, b, w)
    };

    let series_residual = if v < SERIES_ARG_LIMIT {
        match gauss_series(aa, bb, c, v) {
            Ok(s) => return Ok(factor * s),
            Err(res) => Some(res),
        }
    } else {
        None
    };

    match gauss_2f1_euler(&HypergeometricArgs::new(aa, bb, c, v)) {
        Ok(e) => Ok(factor * e),
        Err(SpecFunError::Domain { .. }) => Err(SpecFunError::NoConvergence {
            func: "gauss_2f1",
            achieved: series_residual.unwrap_or(1.0),
        }),
        Err(other) => Err(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn f(a: f64, b: f64, c: f64, w: f64) -> f64 {
        gauss_2f1(&HypergeometricArgs::new(a, b, c, w)).unwrap()
    }

    #[test]
    fn empty_series_and_binomial() {
        assert_eq!(f(0.7, 1.3, 2.2, 0.0), 1.0);
        // F(a, b, b; w) = (1 - w)^{-a}
        for &w in &[-7.0, -0.4, 0.3, 0.9] {
            assert_relative_eq!(f(1.25, 2.0, 2.0, w), (1.0 - w).powf(-1.25), max_relative = 1e-11);
        }
    }

    #[test]
    fn elementary_log_case() {
        // F(1, 1, 2; w) = -ln(1 - w)/w
        for &w in &[-30.0, -2.0, -0.6, 0.5] {
            assert_relative_eq!(f(1.0, 1.0, 2.0, w), -(1.0f64 - w).ln() / w, max_relative = 1e-10);
        }
    }

    #[test]
    fn derived_value_from_euler_oracle() {
        // frozen output of gauss_2f1_euler at (0.5, 1.5, 1; -4); the fast
        // path goes through the Pfaff series and must agree
        let oracle = gauss_2f1_euler(&HypergeometricArgs::new(0.5, 1.5, 1.0, -4.0)).unwrap();
        assert_relative_eq!(oracle, 0.335_521_994_372_439_55, max_relative = 1e-9);
        assert_relative_eq!(f(0.5, 1.5, 1.0, -4.0), oracle, max_relative = 1e-10);
    }

    #[test]
    fn pfaff_transformation_residual() {
        // F(a,b,c;w) = (1-w)^{-b} F(b, c-a, c; w/(w-1)) at (2, 1.5, 3, -5);
        // left side via the Euler integral, right side via the Gauss series,
        // so the two legs of the identity stay independent
        let (a, b, c, w) = (2.0, 1.5, 3.0, -5.0);
        let lhs = gauss_2f1_euler(&HypergeometricArgs::new(a, b, c, w)).unwrap();
        let v = w / (w - 1.0);
        let rhs = (1.0 - w).powf(-b) * gauss_series(b, c - a, c, v).unwrap();
        assert!(
            ((lhs - rhs) / lhs).abs() < 1e-10,
            "transformation residual {:e}",
            ((lhs - rhs) / lhs).abs()
        );
    }

    #[test]
    fn series_and_euler_agree_across_negative_axis() {
        // c > b > 0 so both routes are defined
        let cases = [
            (0.5, 1.5, 2.0),
            (1.0, 0.5, 2.5),
            (2.5, 1.25, 4.0),
            (0.75, 2.0, 3.5),
        ];
        for &(a, b, c) in &cases {
            let mut w = -50.0;
            while w < -0.01 {
                let fast = f(a, b, c, w);
                let slow = gauss_2f1_euler(&HypergeometricArgs::new(a, b, c, w)).unwrap();
                assert_relative_eq!(fast, slow, max_relative = 1e-8);
                w /= 2.7;
            }
        }
    }

    #[test]
    fn deep_negative_argument_uses_fallback() {
        // w = -400 maps to v = 400/401, far beyond the capped series
        let v = f(0.5, 1.5, 1.0, -400.0);
        assert!(v.is_finite() && v > 0.0);
        let slow = gauss_2f1_euler(&HypergeometricArgs::new(0.5, 1.5, 1.0, -400.0)).unwrap();
        assert_relative_eq!(v, slow, max_relative = 1e-9);
    }

    #[test]
    fn domain_errors() {
        assert!(gauss_2f1(&HypergeometricArgs::new(1.0, 1.0, 2.0, 1.0)).is_err());
        assert!(gauss_2f1(&HypergeometricArgs::new(1.0, 1.0, 2.0, 1.5)).is_err());
        assert!(gauss_2f1(&HypergeometricArgs::new(1.0, 1.0, 0.0, 0.5)).is_err());
        assert!(gauss_2f1(&HypergeometricArgs::new(1.0, 1.0, -3.0, 0.5)).is_err());
        assert!(gauss_2f1(&HypergeometricArgs::new(f64::NAN, 1.0, 2.0, 0.5)).is_err());
        // Euler route needs c > b > 0 in one of the two symmetric slots
        assert!(gauss_2f1_euler(&HypergeometricArgs::new(3.0, 2.5, 2.0, -1.0)).is_err());
    }
}
