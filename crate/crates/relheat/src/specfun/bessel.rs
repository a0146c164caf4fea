//! Bessel functions of the first kind of arbitrary real order `nu >= 0`.
//!
//! Three regimes, switched on the argument:
//!
//! * `x <= 10`: ascending power series (cancellation stays below ~1e3, so
//!   absolute accuracy holds near machine precision);
//! * `x >= max(30, nu^2)`: Hankel asymptotic expansion in Stokes form
//!   `sqrt(2/pi x) (P cos chi - Q sin chi)`; the expansion terminates exactly
//!   for half-integer orders;
//! * in between: backward (Miller) recurrence normalized with the series
//!   `sum_k (mu+2k) Gamma(mu+k)/k! J_{mu+2k}(x) = (x/2)^mu`.

use super::gamma::{gamma_fn, ln_gamma};
use super::SpecFunError;

/// Validated Bessel order `nu >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self, SpecFunError> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(SpecFunError::domain("bessel_j", format!("order nu = {nu} not in [0, inf)")));
        }
        Ok(BesselOrder(nu))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `J_nu(x)` for `x >= 0`, `nu >= 0`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64, SpecFunError> {
    if !x.is_finite() || x < 0.0 {
        return Err(SpecFunError::domain("bessel_j", format!("x = {x} not in [0, inf)")));
    }
    Ok(bessel_j_raw(order.get(), x))
}

/// Hot-path variant; callers guarantee `nu >= 0`, `x >= 0` and finite.
pub(crate) fn bessel_j_raw(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= 10.0 {
        series(nu, x)
    } else if x >= (nu * nu).max(30.0) {
        asymptotic(nu, x)
    } else {
        miller(nu, x)
    }
}

/// Ascending series sum_k (-1)^k (x/2)^{nu+2k} / (k! Gamma(nu+k+1)).
fn series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let log_t0 = nu * half.ln() - ln_gamma(nu + 1.0).expect("nu + 1 > 0");
    if log_t0 < -700.0 {
        return 0.0;
    }
    let mut term = log_t0.exp();
    let w = -half * half;
    let mut sum = term;
    for k in 0..300 {
        let kf = k as f64;
        term *= w / ((kf + 1.0) * (nu + kf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Backward recurrence from above the turning point, normalized by the
/// Watson sum; produces the whole ladder J_{mu+j} and picks out j = n.
fn miller(nu: f64, x: f64) -> f64 {
    let n = nu.floor() as usize;
    let mu = nu - n as f64;
    let big = nu.max(x);
    let mut m = (big + 15.0 * big.sqrt() + 20.0).ceil() as usize;
    if m % 2 == 1 {
        m += 1;
    }

    // c_k = (mu + 2k) Gamma(mu + k) / k!, the Watson normalization weights
    let kmax = m / 2;
    let mut c = vec![0.0f64; kmax + 1];
    c[0] = gamma_fn(mu + 1.0).expect("mu + 1 > 0");
    if kmax >= 1 {
        c[1] = (mu + 2.0) * c[0];
        for k in 1..kmax {
            let kf = k as f64;
            c[k + 1] = c[k] * ((mu + 2.0 * kf + 2.0) / (mu + 2.0 * kf)) * ((mu + kf) / (kf + 1.0));
        }
    }

    let mut upper = 0.0f64; // trial j_{mu + j + 1}
    let mut cur = 1e-30f64; // trial j_{mu + j}
    let mut norm = 0.0f64;
    let mut target = 0.0f64;
    let mut target_set = false;

    let mut j = m;
    loop {
        if j % 2 == 0 {
            norm += c[j / 2] * cur;
        }
        if j == n {
            target = cur;
            target_set = true;
        }
        if j == 0 {
            break;
        }
        let next = (2.0 * (mu + j as f64) / x) * cur - upper;
        upper = cur;
        cur = next;
        j -= 1;

        if cur.abs() > 1e250 {
            upper *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            if target_set {
                target *= 1e-250;
            }
        }
    }
    debug_assert!(target_set);
    target * (0.5 * x).powf(mu) / norm
}

/// Hankel expansion: J_nu(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi),
/// chi = x - (nu/2 + 1/4) pi.
fn asymptotic(nu: f64, x: f64) -> f64 {
    let four_nu2 = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (four_nu2 - odd * odd) / (8.0 * kf * x);
        if term.abs() >= prev {
            break; // divergence onset of the asymptotic series
        }
        prev = term.abs();
        // signs follow the pattern +Q, -P, -Q, +P, ...
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Modified Bessel `I_nu(x)` scaled by `e^{-x}`; positive-term series, used
/// for mode-tail estimates. Valid for `nu >= 0`, `x >= 0`.
pub fn bessel_i(nu: f64, x: f64, scaled: bool) -> Result<f64, SpecFunError> {
    if !nu.is_finite() || nu < 0.0 || !x.is_finite() || x < 0.0 {
        return Err(SpecFunError::domain("bessel_i", format!("(nu, x) = ({nu}, {x})")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let half = 0.5 * x;
    let mut log_t0 = nu * half.ln() - ln_gamma(nu + 1.0)?;
    if scaled {
        log_t0 -= x;
    }
    if log_t0 < -700.0 {
        return Ok(0.0);
    }
    let mut term = log_t0.exp();
    let mut sum = term;
    let w = half * half;
    for k in 0..20_000 {
        let kf = k as f64;
        term *= w / ((kf + 1.0) * (nu + kf + 1.0));
        sum += term;
        if term < 1e-17 * sum {
            return Ok(sum);
        }
    }
    Err(SpecFunError::NoConvergence { func: "bessel_i", achieved: term / sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn j(nu: f64, x: f64) -> f64 {
        bessel_j(BesselOrder::new(nu).unwrap(), x).unwrap()
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(j(0.0, 0.0), 1.0);
        assert_eq!(j(0.7, 0.0), 0.0);
    }

    #[test]
    fn half_integer_identity() {
        // J_{1/2}(x) = sqrt(2/(pi x)) sin x, exercised across all three regimes
        for &x in &[0.3, 1.0, std::f64::consts::FRAC_PI_2, 7.0, 18.0, 45.0, 160.0, 900.0] {
            let exact = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
            assert_relative_eq!(j(0.5, x), exact, epsilon = 1e-12, max_relative = 1e-11);
        }
        assert_relative_eq!(
            j(0.5, std::f64::consts::FRAC_PI_2),
            2.0 / std::f64::consts::PI,
            max_relative = 1e-13
        );
    }

    #[test]
    fn three_term_recurrence_closure() {
        // |J_{nu-1} + J_{nu+1} - (2 nu / x) J_nu| <= 1e-10 on the grid
        // x in [0.5, 30], nu in [0.5, 10]; at nu = 1/2 the lower order is
        // J_{-1/2}(x) = sqrt(2/(pi x)) cos x.
        let j_lower = |nu: f64, x: f64| -> f64 {
            if nu == -0.5 {
                (2.0 / (std::f64::consts::PI * x)).sqrt() * x.cos()
            } else {
                j(nu, x)
            }
        };
        let mut nu = 0.5;
        while nu <= 10.0 {
            let mut x = 0.5;
            while x <= 30.0 {
                let r = j_lower(nu - 1.0, x) + j(nu + 1.0, x) - (2.0 * nu / x) * j(nu, x);
                assert!(
                    r.abs() <= 1e-10,
                    "closure residual {r:e} at nu = {nu}, x = {x}"
                );
                x += 1.37;
            }
            nu += 0.75;
        }
    }

    #[test]
    fn reference_values() {
        // frozen from the integer-order FreeBSD/Go implementations' published
        // test points
        assert_relative_eq!(j(0.0, 1.0), 0.765_197_686_557_966_6, max_relative = 1e-12);
        assert_relative_eq!(j(1.0, 1.0), 0.440_050_585_744_933_5, max_relative = 1e-12);
        assert_relative_eq!(j(0.0, 5.0), -0.177_596_771_314_338_3, max_relative = 1e-11);
        assert_relative_eq!(j(2.0, 12.5), -0.173_361_463_438_782_66, max_relative = 1e-10);
    }

    #[test]
    fn regimes_agree_where_they_overlap() {
        // the three evaluation methods at identical arguments
        for &nu in &[0.0, 0.3, 0.5, 1.7, 4.0, 9.5] {
            for &x in &[6.0, 8.5, 10.0] {
                let s = series(nu, x);
                let m = miller(nu, x);
                assert!((s - m).abs() < 1e-12, "series vs Miller at nu = {nu}, x = {x}: {s} vs {m}");
            }
        }
        for &nu in &[0.0, 0.3, 0.5, 1.7, 4.0] {
            for &x in &[30.0, 42.0, 77.0] {
                let m = miller(nu, x);
                let a = asymptotic(nu, x);
                assert!((m - a).abs() < 1e-12, "Miller vs asymptotic at nu = {nu}, x = {x}: {m} vs {a}");
            }
        }
    }

    #[test]
    fn large_order_miller_region() {
        // J_40(50) sits in the Miller region for high order
        let v = j(40.0, 50.0);
        assert_relative_eq!(v, -0.138_176_281_201_161_43, max_relative = 1e-10);
        let rec = j(39.0, 50.0) + j(41.0, 50.0) - (2.0 * 40.0 / 50.0) * v;
        assert!(rec.abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(BesselOrder::new(-0.1).is_err());
        assert!(bessel_j(BesselOrder::new(1.0).unwrap(), -2.0).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn modified_bessel_series() {
        // I_0(1) and I_1(1) reference values
        assert_relative_eq!(bessel_i(0.0, 1.0, false).unwrap(), 1.266_065_877_752_008_3, max_relative = 1e-12);
        assert_relative_eq!(bessel_i(1.0, 1.0, false).unwrap(), 0.565_159_103_992_485_0, max_relative = 1e-12);
        // scaled sum rule: sum_m e^{-x} I_m(x) = 1
        let x = 3.7;
        let mut s = bessel_i(0.0, x, true).unwrap();
        for m in 1..40 {
            s += 2.0 * bessel_i(m as f64, x, true).unwrap();
        }
        assert_relative_eq!(s, 1.0, max_relative = 1e-12);
    }
}
