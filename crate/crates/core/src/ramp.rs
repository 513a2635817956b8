//! Length schedules `L(t) = γ(t) L_i` for the expansion stroke.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(t, L, L̇, γ, γ̇)` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSample<T> {
    pub t: T,
    pub length: T,
    pub length_rate: T,
    pub gamma: T,
    pub gamma_dot: T,
}

/// A width schedule on `[0, τ]` given by `γ(t)` and its analytic rate.
pub trait Ramp<T: Real>: Send + Sync {
    fn initial_length(&self) -> T;
    fn duration(&self) -> T;
    fn gamma(&self, t: T) -> Result<T>;
    fn gamma_dot(&self, t: T) -> Result<T>;

    fn final_length(&self) -> T {
        self.gamma(self.duration())
            .map(|g| g * self.initial_length())
            .unwrap_or_else(|_| self.initial_length())
    }

    fn sample(&self, t: T) -> Result<RampSample<T>> {
        let gamma = self.gamma(t)?;
        let gamma_dot = self.gamma_dot(t)?;
        let li = self.initial_length();
        Ok(RampSample {
            t,
            length: gamma * li,
            length_rate: gamma_dot * li,
            gamma,
            gamma_dot,
        })
    }

    /// `∫₀^τ |L̇/L| dt`, the total logarithmic width change.
    ///
    /// The default integrates numerically; monotone ramps override it with
    /// `|ln(L_f/L_i)|`.
    fn log_variation(&self) -> T {
        let tau = self.duration();
        let rule = crate::numerics::quadrature::gauss_legendre::<T>(32);
        rule.integrate_composite(T::zero(), tau, 64, |t| {
            let g = self.gamma(t).unwrap_or_else(|_| T::one());
            let gd = self.gamma_dot(t).unwrap_or_else(|_| T::zero());
            (gd / g).abs()
        })
    }
}

/// Quintic smoother step `γ(s) = 1 + (r - 1) s³ (10 + 3s(2s - 5))`, `s = t/τ`,
/// with `r = L_f/L_i`; first and second derivatives vanish at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherStep<T> {
    initial_length: T,
    final_length: T,
    tau: T,
}

/// The only built-in schedule.
pub type RampSpec<T> = SmootherStep<T>;

impl<T: Real> SmootherStep<T> {
    pub fn new(initial_length: T, final_length: T, tau: T) -> Result<Self> {
        if !(initial_length > T::zero() && final_length > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "ramp lengths must be positive (L_i = {initial_length}, L_f = {final_length})"
            )));
        }
        if !(tau > T::zero()) || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("ramp duration must be positive (tau = {tau})")));
        }
        Ok(Self {
            initial_length,
            final_length,
            tau,
        })
    }

    pub fn ratio(&self) -> T {
        self.final_length / self.initial_length
    }

    fn scaled_time(&self, t: T) -> Result<T> {
        let slack = self.tau * T::epsilon() * T::lit(64.0);
        if !(t >= -slack && t <= self.tau + slack) {
            return Err(Error::Domain(format!("t = {t} outside ramp [0, {}]", self.tau)));
        }
        Ok((t / self.tau).max(T::zero()).min(T::one()))
    }

    fn gamma_poly(&self, s: T) -> T {
        let r = self.ratio() - T::one();
        let poly = T::lit(10.0) + T::lit(3.0) * s * (T::lit(2.0) * s - T::lit(5.0));
        T::one() + r * s * s * s * poly
    }

    fn gamma_dot_poly(&self, s: T) -> T {
        let r = self.ratio() - T::one();
        let w = s * (T::one() - s);
        T::lit(30.0) * r * w * w / self.tau
    }
}

impl<T: Real> Ramp<T> for SmootherStep<T> {
    fn initial_length(&self) -> T {
        self.initial_length
    }

    fn final_length(&self) -> T {
        self.final_length
    }

    fn duration(&self) -> T {
        self.tau
    }

    fn gamma(&self, t: T) -> Result<T> {
        let s = self.scaled_time(t)?;
        Ok(self.gamma_poly(s))
    }

    fn gamma_dot(&self, t: T) -> Result<T> {
        let s = self.scaled_time(t)?;
        Ok(self.gamma_dot_poly(s))
    }

    fn log_variation(&self) -> T {
        self.ratio().ln().abs()
    }
}

/// A user-supplied schedule from `(γ, γ̇)` closures.
pub struct CustomRamp<G, D, T> {
    initial_length: T,
    tau: T,
    gamma: G,
    gamma_dot: D,
}

impl<T: Real, G, D> CustomRamp<G, D, T>
where
    G: Fn(T) -> T + Send + Sync,
    D: Fn(T) -> T + Send + Sync,
{
    pub fn new(initial_length: T, tau: T, gamma: G, gamma_dot: D) -> Result<Self> {
        if !(initial_length > T::zero() && tau > T::zero()) {
            return Err(Error::InvalidParameter("custom ramp needs L_i > 0 and tau > 0".into()));
        }
        Ok(Self {
            initial_length,
            tau,
            gamma,
            gamma_dot,
        })
    }

    fn check(&self, t: T) -> Result<T> {
        let slack = self.tau * T::epsilon() * T::lit(64.0);
        if !(t >= -slack && t <= self.tau + slack) {
            return Err(Error::Domain(format!("t = {t} outside ramp [0, {}]", self.tau)));
        }
        Ok(t.max(T::zero()).min(self.tau))
    }
}

impl<T: Real, G, D> Ramp<T> for CustomRamp<G, D, T>
where
    G: Fn(T) -> T + Send + Sync,
    D: Fn(T) -> T + Send + Sync,
{
    fn initial_length(&self) -> T {
        self.initial_length
    }

    fn duration(&self) -> T {
        self.tau
    }

    fn gamma(&self, t: T) -> Result<T> {
        let t = self.check(t)?;
        let g = (self.gamma)(t);
        if g > T::zero() {
            Ok(g)
        } else {
            Err(Error::Domain(format!("custom ramp produced non-positive gamma {g} at t = {t}")))
        }
    }

    fn gamma_dot(&self, t: T) -> Result<T> {
        let t = self.check(t)?;
        Ok((self.gamma_dot)(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::gauss_legendre;
    use std::f64::consts::{PI, SQRT_2};

    fn ramp(tau: f64) -> SmootherStep<f64> {
        SmootherStep::new(PI / SQRT_2, SQRT_2 * PI, tau).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let r = ramp(1.0);
        assert_eq!(r.gamma(0.0).unwrap(), 1.0);
        assert!((r.gamma(1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((r.gamma(0.5).unwrap() - 1.5).abs() < 1e-15);
        let want = 1.0 + 0.25f64.powi(3) * (10.0 + 0.75 * (0.5 - 5.0));
        assert!((r.gamma(0.25).unwrap() - want).abs() < 1e-15);
        assert!((want - 1.1035).abs() < 1e-4);
        assert!(r.gamma(1.5).is_err());
        assert!(r.gamma(-0.1).is_err());
    }

    #[test]
    fn gamma_dot_examples() {
        let r = ramp(1.0);
        assert_eq!(r.gamma_dot(0.0).unwrap(), 0.0);
        assert_eq!(r.gamma_dot(1.0).unwrap(), 0.0);
        assert!((r.gamma_dot(0.5).unwrap() - 1.875).abs() < 1e-15);
        assert!(r.gamma_dot(2.0).is_err());
        for k in 0..=100 {
            assert!(r.gamma_dot(k as f64 / 100.0).unwrap() >= 0.0);
        }
    }

    #[test]
    fn sample_examples() {
        let r = ramp(1.0);
        let end = r.sample(1.0).unwrap();
        assert!((end.length - SQRT_2 * PI).abs() < 1e-14);
        assert_eq!(r.sample(0.0).unwrap().length_rate, 0.0);
        let mid = r.sample(0.5).unwrap();
        assert!((mid.length_rate - 1.875 * PI / SQRT_2).abs() < 1e-14);
        assert!((mid.length - mid.gamma * PI / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let r = ramp(3.0);
        let h = 1e-5;
        for k in 1..30 {
            let t = 3.0 * k as f64 / 30.0;
            let fd = (r.gamma(t + h).unwrap() - r.gamma(t - h).unwrap()) / (2.0 * h);
            assert!((fd - r.gamma_dot(t).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn endpoint_derivatives_vanish() {
        let tau = 2.0;
        let r = ramp(tau);
        let h = 1e-6 * tau;
        for s in [0.0, 1.0] {
            // centred differences of the polynomial, continued past the ends
            let gd = (r.gamma_poly(s + h / tau) - r.gamma_poly(s - h / tau)) / (2.0 * h);
            let gdd = (r.gamma_dot_poly(s + h / tau) - r.gamma_dot_poly(s - h / tau)) / (2.0 * h);
            assert!(gd.abs() < 1e-6);
            assert!(r.gamma_dot(s * tau).unwrap().abs() < 1e-6);
            assert!(gdd.abs() < 1e-6, "{gdd}");
        }
    }

    #[test]
    fn log_rate_integral_matches_ratio() {
        let r = ramp(0.7);
        let rule = gauss_legendre::<f64>(200);
        let v = rule.integrate_on(0.0, 0.7, |t| r.gamma_dot(t).unwrap() / r.gamma(t).unwrap());
        assert!((v - 2f64.ln()).abs() < 1e-10);
        assert!((r.log_variation() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn custom_ramp_defaults() {
        let lin = CustomRamp::new(1.0, 2.0, |t: f64| 1.0 + t / 2.0, |_t: f64| 0.5).unwrap();
        assert!((lin.final_length() - 2.0).abs() < 1e-15);
        assert!((lin.log_variation() - 2f64.ln()).abs() < 1e-12);
        let s = lin.sample(1.0).unwrap();
        assert_eq!(s.length_rate, 0.5);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(SmootherStep::new(1.0, 2.0, 0.0).is_err());
        assert!(SmootherStep::new(-1.0, 2.0, 1.0).is_err());
        assert!(SmootherStep::new(1.0, 2.0, f64::NAN).is_err());
    }
}
