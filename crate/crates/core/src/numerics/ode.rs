//! Adaptive Dormand–Prince 5(4) integration with continuous output.
//!
//! Error control is vector-wise: a step is accepted when
//! `‖e‖₂ ≤ abs_tol + rel_tol · max(‖y_n‖₂, ‖y_{n+1}‖₂)`. For state vectors
//! of quantum amplitudes this bounds the error of the whole state rather
//! than of each (possibly tiny) component.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Element of an ODE state vector: a real or complex number over `T`.
pub trait OdeComponent<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn modulus_sqr(self) -> T;
}

impl<T: Real> OdeComponent<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn modulus_sqr(self) -> T {
        self * self
    }
}

impl<T: Real> OdeComponent<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn modulus_sqr(self) -> T {
        self.norm_sqr()
    }
}

fn norm<T: Real, S: OdeComponent<T>>(v: &[S]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x.modulus_sqr()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Largest step as a fraction of the integration span.
    pub max_step: T,
    /// Number of evenly spaced output samples, endpoints included.
    pub dense_output: usize,
    pub max_steps: usize,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            max_step: T::lit(0.05),
            dense_output: 101,
            max_steps: 20_000_000,
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero() && self.abs_tol > T::zero()) {
            return Err(Error::InvalidParameter("integrator tolerances must be positive".into()));
        }
        if !(self.max_step > T::zero()) {
            return Err(Error::InvalidParameter("max_step fraction must be positive".into()));
        }
        if self.dense_output < 2 {
            return Err(Error::InvalidParameter("dense output needs at least 2 samples".into()));
        }
        Ok(())
    }

    /// `n` evenly spaced times on `[t0, t1]`, both ends exact.
    pub fn sample_times(&self, t0: T, t1: T) -> Vec<T> {
        let n = self.dense_output;
        (0..n)
            .map(|k| {
                if k == n - 1 {
                    t1
                } else {
                    t0 + (t1 - t0) * T::from_count(k) / T::from_count(n - 1)
                }
            })
            .collect()
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone)]
pub struct DenseStep<T, S> {
    pub t0: T,
    pub h: T,
    rcont: [Vec<S>; 5],
}

impl<T: Real, S: OdeComponent<T>> DenseStep<T, S> {
    pub fn t1(&self) -> T {
        self.t0 + self.h
    }

    /// Fourth-order interpolant at `t` within the step.
    pub fn eval_into(&self, t: T, out: &mut [S]) {
        let theta = (t - self.t0) / self.h;
        let theta1 = T::one() - theta;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + (r2[i] + (r3[i] + (r4[i] + r5[i] * theta1) * theta) * theta1) * theta;
        }
    }

    pub fn eval(&self, t: T) -> Vec<S> {
        let mut out = vec![S::zero(); self.rcont[0].len()];
        self.eval_into(t, &mut out);
        out
    }
}

/// Receives every accepted step; used for running integrals of observables.
pub trait StepObserver<T, S> {
    fn on_step(&mut self, step: &DenseStep<T, S>);
}

impl<T, S, F: FnMut(&DenseStep<T, S>)> StepObserver<T, S> for F {
    fn on_step(&mut self, step: &DenseStep<T, S>) {
        self(step)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Samples of the solution at the requested times.
#[derive(Debug, Clone)]
pub struct DenseTrajectory<T, S> {
    pub times: Vec<T>,
    pub states: Vec<Vec<S>>,
    pub stats: SolverStats,
}

impl<T: Real, S: OdeComponent<T>> DenseTrajectory<T, S> {
    pub fn last(&self) -> Option<(T, &[S])> {
        self.times.last().map(|&t| (t, self.states.last().unwrap().as_slice()))
    }
}

// Dormand–Prince 5(4) tableau and Hairer's dense-output coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrates `y' = f(t, y)` over `t_span` and samples at
/// `config.dense_output` evenly spaced times.
pub fn ode_solve<T, S, F>(rhs: F, y0: &[S], t_span: (T, T), config: &IntegratorConfig<T>) -> Result<DenseTrajectory<T, S>>
where
    T: Real,
    S: OdeComponent<T>,
    F: FnMut(T, &[S], &mut [S]),
{
    let times = config.sample_times(t_span.0, t_span.1);
    ode_solve_observed(rhs, y0, t_span, &times, config, &mut |_: &DenseStep<T, S>| {})
}

/// Full form: explicit sorted `sample_times` inside the span and an
/// observer called once per accepted step.
pub fn ode_solve_observed<T, S, F, O>(
    mut rhs: F,
    y0: &[S],
    t_span: (T, T),
    sample_times: &[T],
    config: &IntegratorConfig<T>,
    observer: &mut O,
) -> Result<DenseTrajectory<T, S>>
where
    T: Real,
    S: OdeComponent<T>,
    F: FnMut(T, &[S], &mut [S]),
    O: StepObserver<T, S> + ?Sized,
{
    config.validate()?;
    let (t0, t_end) = t_span;
    if !(t_end > t0) {
        return Err(Error::InvalidParameter(format!("empty integration span [{t0}, {t_end}]")));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0])
        || sample_times.iter().any(|&t| t < t0 || t > t_end)
    {
        return Err(Error::InvalidParameter("sample times must be sorted and inside the span".into()));
    }

    let l = |x: f64| T::lit(x);
    let dim = y0.len();
    let span = t_end - t0;
    let h_max = span * config.max_step;
    let (rtol, atol) = (config.rel_tol, config.abs_tol);
    let mut stats = SolverStats::default();

    let mut y = y0.to_vec();
    let mut k1 = vec![S::zero(); dim];
    let mut k2 = vec![S::zero(); dim];
    let mut k3 = vec![S::zero(); dim];
    let mut k4 = vec![S::zero(); dim];
    let mut k5 = vec![S::zero(); dim];
    let mut k6 = vec![S::zero(); dim];
    let mut k7 = vec![S::zero(); dim];
    let mut tmp = vec![S::zero(); dim];
    let mut y1 = vec![S::zero(); dim];
    let mut err = vec![S::zero(); dim];

    let mut out_times = Vec::with_capacity(sample_times.len());
    let mut out_states = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] == t0 {
        out_times.push(t0);
        out_states.push(y.clone());
        next_sample += 1;
    }

    let mut t = t0;
    rhs(t, &y, &mut k1);
    stats.evaluations += 1;

    // initial step (Hairer & Wanner, II.4)
    let mut h = {
        let sc = atol + rtol * norm(&y);
        let d0 = norm(&y) / sc;
        let d1 = norm(&k1) / sc;
        let h0 = if d0 < l(1e-5) || d1 < l(1e-5) { l(1e-6) * span } else { l(0.01) * d0 / d1 };
        let h0 = h0.min(h_max);
        for i in 0..dim {
            tmp[i] = y[i] + k1[i] * h0;
        }
        rhs(t + h0, &tmp, &mut k2);
        stats.evaluations += 1;
        for i in 0..dim {
            err[i] = k2[i] - k1[i];
        }
        let d2 = norm(&err) / sc / h0;
        let dm = d1.max(d2);
        let h1 = if dm <= l(1e-15) {
            (h0 * l(1e-3)).max(l(1e-6) * span)
        } else {
            (l(0.01) / dm).powf(l(0.2))
        };
        (l(100.0) * h0).min(h1).min(h_max)
    };

    let beta = l(0.04);
    let expo1 = l(0.2) - beta * l(0.75);
    let safe = l(0.9);
    let mut facold = l(1e-4);
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= config.max_steps {
            return Err(Error::Integration {
                t: t.to_f64().unwrap_or(f64::NAN),
                reason: format!("step budget of {} exhausted", config.max_steps),
            });
        }
        let mut last = false;
        if t + h * l(1.01) >= t_end {
            h = t_end - t;
            last = true;
        }
        if h <= t.abs().max(span) * T::epsilon() * l(16.0) {
            return Err(Error::Integration {
                t: t.to_f64().unwrap_or(f64::NAN),
                reason: format!("step size underflow (h = {h:e})"),
            });
        }

        for i in 0..dim {
            tmp[i] = y[i] + k1[i] * (h * l(A21));
        }
        rhs(t + l(C2) * h, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + (k1[i] * l(A31) + k2[i] * l(A32)) * h;
        }
        rhs(t + l(C3) * h, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + (k1[i] * l(A41) + k2[i] * l(A42) + k3[i] * l(A43)) * h;
        }
        rhs(t + l(C4) * h, &tmp, &mut k4);
        for i in 0..dim {
            tmp[i] = y[i] + (k1[i] * l(A51) + k2[i] * l(A52) + k3[i] * l(A53) + k4[i] * l(A54)) * h;
        }
        rhs(t + l(C5) * h, &tmp, &mut k5);
        for i in 0..dim {
            tmp[i] = y[i]
                + (k1[i] * l(A61) + k2[i] * l(A62) + k3[i] * l(A63) + k4[i] * l(A64) + k5[i] * l(A65)) * h;
        }
        let t_new = if last { t_end } else { t + h };
        rhs(t_new, &tmp, &mut k6);
        for i in 0..dim {
            y1[i] = y[i]
                + (k1[i] * l(A71) + k3[i] * l(A73) + k4[i] * l(A74) + k5[i] * l(A75) + k6[i] * l(A76)) * h;
        }
        rhs(t_new, &y1, &mut k7);
        stats.evaluations += 6;

        for i in 0..dim {
            err[i] = (k1[i] * l(E1) + k3[i] * l(E3) + k4[i] * l(E4) + k5[i] * l(E5) + k6[i] * l(E6) + k7[i] * l(E7))
                * h;
        }
        let sc = atol + rtol * norm(&y).max(norm(&y1));
        let err_norm = norm(&err) / sc;
        if !err_norm.is_finite() {
            return Err(Error::Integration {
                t: t.to_f64().unwrap_or(f64::NAN),
                reason: "non-finite error estimate".into(),
            });
        }

        let fac11 = err_norm.powf(expo1);
        if err_norm <= T::one() {
            let fac = (fac11 / facold.powf(beta) / safe).max(l(0.1)).min(l(5.0));
            facold = err_norm.max(l(1e-4));
            stats.accepted += 1;

            let mut rcont5 = vec![S::zero(); dim];
            let mut rcont2 = vec![S::zero(); dim];
            let mut rcont3 = vec![S::zero(); dim];
            let mut rcont4 = vec![S::zero(); dim];
            for i in 0..dim {
                let dy = y1[i] - y[i];
                let bspl = k1[i] * h - dy;
                rcont2[i] = dy;
                rcont3[i] = bspl;
                rcont4[i] = dy - k7[i] * h - bspl;
                rcont5[i] = (k1[i] * l(D1) + k3[i] * l(D3) + k4[i] * l(D4) + k5[i] * l(D5) + k6[i] * l(D6)
                    + k7[i] * l(D7))
                    * h;
            }
            let step = DenseStep {
                t0: t,
                h,
                rcont: [y.clone(), rcont2, rcont3, rcont4, rcont5],
            };
            observer.on_step(&step);

            while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                let ts = sample_times[next_sample];
                out_times.push(ts);
                if ts == t_new {
                    out_states.push(y1.clone());
                } else {
                    out_states.push(step.eval(ts));
                }
                next_sample += 1;
            }

            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            if last {
                break;
            }
            let mut h_new = (h / fac).min(h_max);
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h = h / (fac11 / safe).min(l(5.0));
        }
    }

    Ok(DenseTrajectory {
        times: out_times,
        states: out_states,
        stats,
    })
}
