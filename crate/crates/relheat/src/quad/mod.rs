//! Quadrature on semi-infinite intervals and the subordination operator
//! turning a heat kernel into a relativistic kernel.
//!
//! The subordination identity
//!
//! ```text
//! e^{-t sqrt(H)} = (t / sqrt(4 pi)) int_0^inf s^{-3/2} e^{-t^2/(4s)} e^{-sH} ds
//! ```
//!
//! is integrated in the substituted variable `u = t^2 / (4s)`, which turns
//! the weight into `u^{-1/2} e^{-u} / sqrt(pi)` and removes the essential
//! singularity at `s -> 0`. The massive variant replaces `e^{-u}` with
//! `e^{-(sqrt(u) - m t / (2 sqrt(u)))^2}`.

mod de;
mod gk;

pub use de::{exp_sinh, tanh_sinh};
pub use gk::adaptive;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge: best estimate {estimate:e}, achieved error {error:e}")]
    NonConvergence { estimate: f64, error: f64 },
    #[error("integrand evaluation failed at x = {at}: {what}")]
    Evaluation { at: f64, what: &'static str },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
}

/// Value with a conservative error bound attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error: f64,
}

/// Interval transform used by [`integrate_semi_infinite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// `x = -ln v`, then adaptive Gauss-Kronrod on `(0, 1)`.
    ExpSubstitution,
    /// exp-sinh trapezoid (default).
    DoubleExponential,
    /// dyadic panels `[0,1], [1,2], [2,4], ...`, each adaptive.
    None,
}

/// Tolerances and budget for semi-infinite integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub transform: Transform,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 60,
            transform: Transform::DoubleExponential,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(QuadError::InvalidSpec(format!(
                "tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadError::InvalidSpec("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }
}

/// Base heat kernel sampled at `s > 0` plus the subordination parameters.
pub struct SubordinationInput<'a> {
    pub base_kernel: &'a (dyn Fn(f64) -> f64 + Sync),
    pub t: f64,
    pub mass: f64,
}

/// `int_0^inf f(x) dx` for integrands with eventual exponential or power decay.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: &F,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, QuadError> {
    spec.validate()?;
    match spec.transform {
        Transform::DoubleExponential => exp_sinh(f, 0.0, spec.abs_tol, spec.rel_tol),
        Transform::ExpSubstitution => {
            let g = |v: f64| {
                let x = -v.ln();
                f(x) / v
            };
            adaptive(&g, 0.0, 1.0, spec.abs_tol, spec.rel_tol, spec.max_subdivisions.max(16) * 8, &[])
        }
        Transform::None => {
            let mut total = 0.0;
            let mut err = 0.0;
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..64 {
                let r = adaptive(f, lo, hi, 0.25 * spec.abs_tol, 0.25 * spec.rel_tol, spec.max_subdivisions.max(16) * 4, &[])?;
                total += r.value;
                err += r.error;
                if r.value.abs() <= 0.25 * spec.abs_tol.max(spec.rel_tol * total.abs()) && hi > 64.0 {
                    return Ok(IntegralEstimate { value: total, error: err + r.value.abs() });
                }
                lo = hi;
                hi *= 2.0;
            }
            Err(QuadError::NonConvergence { estimate: total, error: err })
        }
    }
}

fn validate_t_mass(t: f64, mass: f64) -> Result<(), QuadError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(QuadError::InvalidSpec(format!("time t = {t} must be positive")));
    }
    if !(mass >= 0.0) || !mass.is_finite() {
        return Err(QuadError::InvalidSpec(format!("mass = {mass} must be nonnegative")));
    }
    Ok(())
}

/// Massless subordination: the kernel of `e^{-t sqrt(H)}` from samples of
/// `e^{-sH}` at one spatial point.
pub fn subordinate_massless(
    inp: &SubordinationInput<'_>,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, QuadError> {
    validate_t_mass(inp.t, 0.0)?;
    spec.validate()?;
    let t2 = inp.t * inp.t;
    let base = inp.base_kernel;
    let g = move |u: f64| u.powf(-0.5) * (-u).exp() * base(t2 / (4.0 * u));
    let r = exp_sinh(&g, 0.0, spec.abs_tol, spec.rel_tol)?;
    let c = 1.0 / std::f64::consts::PI.sqrt();
    Ok(IntegralEstimate { value: c * r.value, error: c * r.error })
}

/// Massive subordination: kernel of `e^{-t (sqrt(H + m^2) - m)}`.
///
/// For `m t` large the weight peaks at `u = m t / 2`; the integral is split
/// there so both double-exponential halves see endpoint-concentrated mass.
pub fn subordinate_massive(
    inp: &SubordinationInput<'_>,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, QuadError> {
    validate_t_mass(inp.t, inp.mass)?;
    spec.validate()?;
    if inp.mass == 0.0 {
        return subordinate_massless(inp, spec);
    }
    let t2 = inp.t * inp.t;
    let mt = inp.mass * inp.t;
    let base = inp.base_kernel;
    let g = move |u: f64| {
        let su = u.sqrt();
        let arg = su - mt / (2.0 * su);
        u.powf(-0.5) * (-arg * arg).exp() * base(t2 / (4.0 * u))
    };
    let c = 1.0 / std::f64::consts::PI.sqrt();
    let peak = 0.5 * mt;
    let r = if peak > 2.0 {
        let left = tanh_sinh(&g, 0.0, peak, 0.5 * spec.abs_tol, 0.5 * spec.rel_tol)?;
        let right = exp_sinh(&g, peak, 0.5 * spec.abs_tol, 0.5 * spec.rel_tol)?;
        IntegralEstimate { value: left.value + right.value, error: left.error + right.error }
    } else {
        exp_sinh(&g, 0.0, spec.abs_tol, spec.rel_tol)?
    };
    Ok(IntegralEstimate { value: c * r.value, error: c * r.error })
}

/// `int_0^inf r^a e^{-t (r - m/(2r))^2} dr`, the moment controlling the
/// massive long-time bounds. Split at the stationary point `r = sqrt(m/2)`
/// when a mass is present.
pub fn substituted_moment(a: f64, mass: f64, t: f64, spec: &QuadratureSpec) -> Result<IntegralEstimate, QuadError> {
    if !(a > 0.0) {
        return Err(QuadError::InvalidSpec(format!("exponent a = {a} must be positive")));
    }
    validate_t_mass(t, mass)?;
    spec.validate()?;
    let g = move |r: f64| {
        let arg = r - mass / (2.0 * r);
        r.powf(a) * (-t * arg * arg).exp()
    };
    if mass > 0.0 {
        let peak = (0.5 * mass).sqrt();
        let left = tanh_sinh(&g, 0.0, peak, 0.5 * spec.abs_tol, 0.5 * spec.rel_tol)?;
        let right = exp_sinh(&g, peak, 0.5 * spec.abs_tol, 0.5 * spec.rel_tol)?;
        Ok(IntegralEstimate { value: left.value + right.value, error: left.error + right.error })
    } else {
        let g0 = move |r: f64| r.powf(a) * (-t * r * r).exp();
        exp_sinh(&g0, 0.0, spec.abs_tol, spec.rel_tol)
    }
}

/// Free 2D Gaussian heat kernel `(4 pi s)^{-1} e^{-d^2/(4s)}` as a base
/// kernel for subordination fixtures.
pub fn free_gaussian(d: f64) -> impl Fn(f64) -> f64 + Sync + Copy {
    move |s: f64| (-d * d / (4.0 * s)).exp() / (4.0 * std::f64::consts::PI * s)
}

/// Closed form of the free massless relativistic kernel,
/// `t / (2 pi (t^2 + d^2)^{3/2})`.
pub fn free_relativistic(t: f64, d: f64) -> f64 {
    t / (2.0 * std::f64::consts::PI * (t * t + d * d).powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn subordination_weight_moment() {
        // int_0^inf s^{-5/2} e^{-1/(4s)} ds = 4 sqrt(pi)
        let spec = QuadratureSpec::default();
        let r = integrate_semi_infinite(&|s: f64| s.powf(-2.5) * (-1.0 / (4.0 * s)).exp(), &spec).unwrap();
        assert_relative_eq!(r.value, 4.0 * SQRT_PI, max_relative = 1e-10);
    }

    #[test]
    fn gamma_two_and_gaussian() {
        let spec = QuadratureSpec::default();
        let r = integrate_semi_infinite(&|p: f64| p * (-p).exp(), &spec).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-10);
        let g = integrate_semi_infinite(&|s: f64| (-s * s).exp(), &spec).unwrap();
        assert_relative_eq!(g.value, 0.5 * SQRT_PI, max_relative = 1e-10);
    }

    #[test]
    fn all_transforms_agree() {
        for tr in [Transform::DoubleExponential, Transform::ExpSubstitution, Transform::None] {
            let spec = QuadratureSpec { transform: tr, rel_tol: 1e-9, abs_tol: 1e-11, ..Default::default() };
            let r = integrate_semi_infinite(&|p: f64| p * (-p).exp(), &spec).unwrap();
            assert_relative_eq!(r.value, 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn error_estimates_are_honest_on_analytic_examples() {
        let spec = QuadratureSpec::default();
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64)> = vec![
            (Box::new(|s: f64| s.powf(-2.5) * (-1.0 / (4.0 * s)).exp()), 4.0 * SQRT_PI),
            (Box::new(|p: f64| p * (-p).exp()), 1.0),
            (Box::new(|s: f64| (-s * s).exp()), 0.5 * SQRT_PI),
        ];
        for (f, exact) in cases {
            let r = integrate_semi_infinite(&|x| f(x), &spec).unwrap();
            assert!(
                r.error >= (r.value - exact).abs(),
                "reported {:e} < actual {:e}",
                r.error,
                (r.value - exact).abs()
            );
        }
    }

    #[test]
    fn massless_subordination_reproduces_closed_form() {
        let spec = QuadratureSpec::default();
        for &(t, d) in &[(1.0, 0.0), (2.0, 0.0), (1.0, 1.0), (0.5, 2.0), (10.0, 5.0)] {
            let base = free_gaussian(d);
            let inp = SubordinationInput { base_kernel: &base, t, mass: 0.0 };
            let r = subordinate_massless(&inp, &spec).unwrap();
            assert_relative_eq!(r.value, free_relativistic(t, d), max_relative = 1e-9);
        }
        // spot values: 1/(2 pi) at t=1, 1/(8 pi) at t=2, and d=1 off-diagonal
        let base = free_gaussian(0.0);
        let r = subordinate_massless(&SubordinationInput { base_kernel: &base, t: 1.0, mass: 0.0 }, &spec).unwrap();
        assert_relative_eq!(r.value, 0.159_154_943_091_895_35, max_relative = 1e-9);
        let r2 = subordinate_massless(&SubordinationInput { base_kernel: &base, t: 2.0, mass: 0.0 }, &spec).unwrap();
        assert_relative_eq!(r2.value, 0.039_788_735_772_973_84, max_relative = 1e-9);
        let base1 = free_gaussian(1.0);
        let r3 = subordinate_massless(&SubordinationInput { base_kernel: &base1, t: 1.0, mass: 0.0 }, &spec).unwrap();
        assert_relative_eq!(r3.value, 1.0 / (2.0 * std::f64::consts::PI * 2.0f64.powf(1.5)), max_relative = 1e-9);
    }

    #[test]
    fn massive_silences_to_massless_at_zero_mass() {
        let spec = QuadratureSpec::default();
        let base = free_gaussian(0.7);
        let inp = SubordinationInput { base_kernel: &base, t: 1.3, mass: 0.0 };
        let a = subordinate_massless(&inp, &spec).unwrap();
        let b = subordinate_massive(&inp, &spec).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-12);
    }

    #[test]
    fn massive_diagonal_value_against_fixed_quadrature() {
        // independent oracle: plain midpoint sum in u on a wide fixed grid
        let t = 1.0;
        let m = 1.0;
        let exactish = {
            let n = 4_000_000usize;
            let (lo, hi) = (1e-8f64, 60.0f64);
            let h = (hi - lo) / n as f64;
            let mut s = 0.0;
            for i in 0..n {
                let u = lo + (i as f64 + 0.5) * h;
                let su = u.sqrt();
                let arg = su - m * t / (2.0 * su);
                s += u.powf(-0.5) * (-arg * arg).exp() * (u / (std::f64::consts::PI * t * t));
            }
            s * h / std::f64::consts::PI.sqrt()
        };
        let spec = QuadratureSpec::default();
        let base = free_gaussian(0.0);
        let r = subordinate_massive(&SubordinationInput { base_kernel: &base, t, mass: m }, &spec).unwrap();
        assert_relative_eq!(r.value, exactish, max_relative = 1e-7);
    }

    #[test]
    fn massive_monotone_in_mass() {
        let spec = QuadratureSpec::default();
        let base = free_gaussian(0.5);
        for &t in &[1.0, 2.0, 5.0, 20.0] {
            let mut prev = -1.0;
            for &m in &[0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
                let r = subordinate_massive(&SubordinationInput { base_kernel: &base, t, mass: m }, &spec).unwrap();
                assert!(r.value >= prev - 1e-12, "not monotone at t={t}, m={m}");
                prev = r.value;
            }
        }
    }

    #[test]
    fn moment_gaussian_cases() {
        let spec = QuadratureSpec::default();
        // a=2, m=0: int r^2 e^{-t r^2} dr = sqrt(pi)/(4 t^{3/2})
        let r = substituted_moment(2.0, 0.0, 1.0, &spec).unwrap();
        assert_relative_eq!(r.value, SQRT_PI / 4.0, max_relative = 1e-10);
        let r4 = substituted_moment(2.0, 0.0, 4.0, &spec).unwrap();
        assert_relative_eq!(r4.value, SQRT_PI / 32.0, max_relative = 1e-10);
    }

    #[test]
    fn moment_with_mass_against_substitution_oracle() {
        // oracle: substitute r = (s + sqrt(s^2 + 2m))/2, so the exponent is
        // exactly e^{-t s^2}, and integrate over s in (-inf, inf) by a fixed
        // fine midpoint rule
        let (a, m, t) = (2.0, 1.0, 10.0);
        let oracle = {
            let n = 2_000_000usize;
            let (lo, hi) = (-8.0f64, 8.0f64); // e^{-10 * 64} below underflow
            let h = (hi - lo) / n as f64;
            let mut s = 0.0;
            for i in 0..n {
                let u = lo + (i as f64 + 0.5) * h;
                let root = (u * u + 2.0 * m).sqrt();
                let r = 0.5 * (u + root);
                let dr = 0.5 * (1.0 + u / root);
                s += r.powf(a) * (-t * u * u).exp() * dr;
            }
            s * h
        };
        let spec = QuadratureSpec::default();
        let r = substituted_moment(a, m, t, &spec).unwrap();
        assert_relative_eq!(r.value, oracle, max_relative = 1e-8);
    }

    #[test]
    fn invalid_specs_rejected() {
        let bad = QuadratureSpec { abs_tol: 0.0, ..Default::default() };
        assert!(integrate_semi_infinite(&|x: f64| (-x).exp(), &bad).is_err());
        let spec = QuadratureSpec::default();
        assert!(substituted_moment(-1.0, 0.0, 1.0, &spec).is_err());
        let base = free_gaussian(0.0);
        assert!(subordinate_massless(&SubordinationInput { base_kernel: &base, t: 0.0, mass: 0.0 }, &spec).is_err());
    }
}
