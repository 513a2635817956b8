//! Fidelity, Bures angle, energies, the cost of the counterdiabatic term
//! and the two quantum speed limits.

use num_complex::Complex;

use crate::dynamics::{width_overlap, BasisState, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::hierarchy::{
    apply_a, eigenstate, energy, energy_gap, EigenIndex, HierarchySpec, PhysicalUnits, ScaledFn,
};
use crate::numerics::quadrature::{gauss_legendre, QuadratureRule};
use crate::ramp::Ramp;
use crate::scalar::Real;

// composite rule used for every time integral over a ramp
const TIME_NODES: usize = 24;
const TIME_PANELS: usize = 32;

fn time_average<T: Real, R: Ramp<T> + ?Sized, F: FnMut(T) -> T>(ramp: &R, f: F) -> T {
    let tau = ramp.duration();
    gauss_legendre::<T>(TIME_NODES).integrate_composite(T::zero(), tau, TIME_PANELS, f) / tau
}

fn gamma_at<T: Real, R: Ramp<T> + ?Sized>(ramp: &R, t: T) -> T {
    ramp.gamma(t).unwrap_or_else(|_| T::one())
}

/// `|c_n|²` of a state expressed in the instantaneous basis, clamped to `[0, 1]`.
pub fn fidelity<T: Real>(state: &BasisState<T>, n: u32) -> T {
    state.population(n).max(T::zero()).min(T::one())
}

/// `|⟨ψ_n(L_f)|ψ_n(L_i)⟩|`.
pub fn bures_overlap<T: Real>(index: EigenIndex, l_i: T, l_f: T, rule: &QuadratureRule<T>) -> T {
    let s = eigenstate::<T>(index);
    width_overlap(&s, l_f, &s, l_i, rule).abs().min(T::one())
}

/// `𝓛 = arccos |⟨ψ_n(L_f)|ψ_n(L_i)⟩|`, in `[0, π/2]`.
pub fn bures_angle<T: Real>(index: EigenIndex, l_i: T, l_f: T, rule: &QuadratureRule<T>) -> T {
    bures_overlap(index, l_i, l_f, rule).acos()
}

/// Bures angle between the evolved state and the initial eigenstate
/// `ψ_n(L_i)`: `arccos |Σ_m c_m ⟨ψ_n(L_i)|ψ_m(L)⟩|`.
pub fn bures_angle_evolved<T: Real>(
    index: EigenIndex,
    l_i: T,
    state: &BasisState<T>,
    rule: &QuadratureRule<T>,
) -> T {
    let initial = eigenstate::<T>(index);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (k, c) in state.coeffs.iter().enumerate() {
        if c.norm_sqr() == T::zero() {
            continue;
        }
        let m = eigenstate::<T>(EigenIndex {
            alpha: index.alpha,
            n: (k + 1) as u32,
        });
        acc = acc + c * width_overlap(&initial, l_i, &m, state.length, rule);
    }
    acc.norm().min(T::one()).acos()
}

/// `⟨E⟩_τ` of a trajectory.
pub fn time_avg_energy<T: Real>(traj: &TrajectoryRecord<T>) -> T {
    traj.avg_energy
}

/// `⟨E_n⟩_AD = (1/τ) ∫ 𝓔_n(L(t)) dt`.
pub fn adiabatic_avg_energy<T: Real, R: Ramp<T> + ?Sized>(index: EigenIndex, ramp: &R, units: &PhysicalUnits<T>) -> T {
    let e0 = energy(index, ramp.initial_length(), units);
    time_average(ramp, |t| {
        let g = gamma_at(ramp, t);
        e0 / (g * g)
    })
}

/// `τ → 0` limit of `⟨E⟩_τ`: the state stays `ψ_n(L_i)` while `H(t)`
/// follows the ramp, so `⟨H(t)⟩ = ⟨T⟩ + ⟨V^(α)(L(t))⟩` on the frozen state.
pub fn sudden_avg_energy<T: Real, R: Ramp<T> + ?Sized>(
    index: EigenIndex,
    ramp: &R,
    units: &PhysicalUnits<T>,
    rule: &QuadratureRule<T>,
) -> T {
    let li = ramp.initial_length();
    let s = eigenstate::<T>(index);
    let kin = units.energy_scale(li) / (T::PI() * T::PI()) * rule.integrate(|y| s.eval_dy(y).powi(2));
    let a = T::from_u32(index.alpha).unwrap();
    let strength = a * (a - T::one());
    if strength == T::zero() {
        return kin;
    }
    let eps_i = units.energy_scale(li);
    time_average(ramp, |t| {
        let g = gamma_at(ramp, t);
        let pot = rule.integrate(|y| {
            let c = (T::PI() * y / g).cos();
            let v = s.eval(y);
            v * v / (c * c)
        });
        kin + strength * eps_i / (g * g) * pot
    })
}

/// `q_n = ⟨χ_n|χ_n⟩`, `χ_n = -φ_n/2 - y φ_n'`.
pub fn shape_factor<T: Real>(index: EigenIndex, rule: &QuadratureRule<T>) -> T {
    let s = eigenstate::<T>(index);
    let chi = s.scale_generator();
    rule.integrate(|y| chi.value(y).powi(2))
}

/// `∂_t C_n = √⟨∂_tψ_n|∂_tψ_n⟩ = (|L̇|/L) √q_n`.
pub fn cost_rate<T: Real>(index: EigenIndex, length: T, length_rate: T, rule: &QuadratureRule<T>) -> T {
    if length_rate == T::zero() {
        return T::zero();
    }
    (length_rate / length).abs() * shape_factor(index, rule).sqrt()
}

/// `N² = √π Γ(α+1)/Γ(α+1/2) = 4^α (α!)² / (2α)!` for `cos^α(πy)`.
pub fn ground_norm_sq<T: Real>(alpha: u32) -> T {
    let mut v = T::one();
    for k in 1..=alpha {
        let kf = T::from_u32(k).unwrap();
        // 4k²/((2k-1)(2k))
        v = v * T::lit(4.0) * kf * kf / ((T::lit(2.0) * kf - T::one()) * T::lit(2.0) * kf);
    }
    v
}

/// Ground-state cost from `-1/4 + ∫ ψ_1² (παx/L · tan(πx/L))² dx` with the
/// closed-form normalization.
pub fn cost_rate_closed_form_gs<T: Real>(alpha: u32, length: T, length_rate: T, rule: &QuadratureRule<T>) -> T {
    if length_rate == T::zero() {
        return T::zero();
    }
    let a = T::from_u32(alpha).unwrap();
    let nsq = ground_norm_sq::<T>(alpha);
    let integral = rule.integrate(|y| {
        let (s, c) = (T::PI() * y).sin_cos();
        // cos^{2α} tan² = cos^{2α-2} sin²
        let w = T::PI() * a * y;
        nsq * c.powi(2 * alpha as i32 - 2) * s * s * w * w
    });
    (length_rate / length).abs() * (integral - T::lit(0.25)).sqrt()
}

/// Cost of `ψ_2^(α-1)` written through the ground state of `H^(α)`:
/// `-1/4 + (2α-1) ∫ ψ_1^(α)² (πx/L)² (1 + (1-α) tan²(πx/L))² dx`.
pub fn cost_rate_closed_form_isospectral<T: Real>(
    alpha: u32,
    length: T,
    length_rate: T,
    rule: &QuadratureRule<T>,
) -> Result<T> {
    if alpha < 2 {
        return Err(Error::Domain(format!("isospectral cost needs alpha >= 2 (got {alpha})")));
    }
    if length_rate == T::zero() {
        return Ok(T::zero());
    }
    let a = T::from_u32(alpha).unwrap();
    let nsq = ground_norm_sq::<T>(alpha);
    let integral = rule.integrate(|y| {
        let (s, c) = (T::PI() * y).sin_cos();
        let w = T::PI() * y;
        // cos^{2α} (1 + (1-α) tan²)² = cos^{2α-4} (c² + (1-α) s²)²
        let inner = c * c + (T::one() - a) * s * s;
        nsq * c.powi(2 * alpha as i32 - 4) * inner * inner * w * w
    });
    Ok((length_rate / length).abs() * (T::lit(-0.25) + (T::lit(2.0) * a - T::one()) * integral).sqrt())
}

/// `⟨∂_t C_n⟩_τ = √q_n · (1/τ) ∫ |L̇/L| dt`.
pub fn time_avg_cost<T: Real, R: Ramp<T> + ?Sized>(index: EigenIndex, ramp: &R, rule: &QuadratureRule<T>) -> T {
    shape_factor(index, rule).sqrt() * ramp.log_variation() / ramp.duration()
}

/// `τ_QSL = ħ sin²𝓛 / (2⟨E⟩_τ)`.
pub fn qsl_nonadiabatic<T: Real>(bures: T, avg_energy: T, units: &PhysicalUnits<T>) -> Result<T> {
    if !(avg_energy > T::zero()) {
        return Err(Error::Domain(format!("average energy must be positive (got {avg_energy})")));
    }
    let s = bures.sin();
    Ok(units.hbar * s * s / (T::lit(2.0) * avg_energy))
}

/// `τ_QSL = ħ τ sin²𝓛 / (2 ∫ √(𝓔_n² + (ħ ∂_tC_n)²) dt)`.
pub fn qsl_sta<T: Real, R: Ramp<T> + ?Sized>(
    index: EigenIndex,
    ramp: &R,
    units: &PhysicalUnits<T>,
    rule: &QuadratureRule<T>,
) -> T {
    let bures = bures_angle(index, ramp.initial_length(), ramp.final_length(), rule);
    let sq = shape_factor(index, rule).sqrt();
    let e0 = energy(index, ramp.initial_length(), units);
    let hbar = units.hbar;
    let mean = time_average(ramp, |t| {
        let g = gamma_at(ramp, t);
        let gd = ramp.gamma_dot(t).unwrap_or_else(|_| T::zero());
        let e = e0 / (g * g);
        let c = hbar * sq * (gd / g).abs();
        (e * e + c * c).sqrt()
    });
    let s = bures.sin();
    hbar * s * s / (T::lit(2.0) * mean)
}

/// Speed-limit summary of one `(α, n, τ)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslReport<T> {
    pub tau: T,
    pub bures: T,
    pub avg_energy: T,
    pub avg_cost_rate: T,
    pub qsl_na: T,
    pub qsl_sta: T,
}

/// Per-sample values of one observable with their time average.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries<T> {
    pub label: String,
    pub samples: Vec<(T, T)>,
    pub average: T,
}

impl<T: Real> ObservableSeries<T> {
    /// Trapezoidal average over the sample span.
    pub fn from_samples(label: impl Into<String>, samples: Vec<(T, T)>) -> Self {
        let average = trapezoid_average(&samples);
        Self {
            label: label.into(),
            samples,
            average,
        }
    }

    pub fn energy(traj: &TrajectoryRecord<T>) -> Self {
        Self::from_samples("energy", traj.samples.iter().map(|s| (s.t, s.energy)).collect())
    }

    pub fn fidelity(traj: &TrajectoryRecord<T>) -> Self {
        Self::from_samples("fidelity", traj.fidelities())
    }
}

fn trapezoid_average<T: Real>(samples: &[(T, T)]) -> T {
    if samples.len() < 2 {
        return samples.first().map(|s| s.1).unwrap_or_else(T::zero);
    }
    let half = T::lit(0.5);
    let area = samples
        .windows(2)
        .fold(T::zero(), |acc, w| acc + (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * half);
    area / (samples[samples.len() - 1].0 - samples[0].0)
}

/// Matrix-level check of the counterdiabatic intertwining relation on the
/// first `dim` states of `H^(α+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdIntertwineReport<T> {
    pub dim: usize,
    /// `max |LHS - RHS|` with the gauge term `iħ (L̇/L) |ψ_n^(α+1)⟩⟨ψ_n^(α+1)|`
    /// from the time dependence of `ΔE` included.
    pub residual: T,
    /// Same without the gauge term.
    pub without_gauge_term: T,
}

/// Compares `iħ|∂_tψ_n^(α+1)⟩⟨ψ_n^(α+1)|` with
/// `(1/ΔE)[A H_CD,n+1^(α) A† + iħ (∂_t A)|ψ_{n+1}^(α)⟩⟨ψ_{n+1}^(α)|A†]`,
/// `ΔE = ΔE_{n+1}^(α)`, element by element.
pub fn cd_intertwine_residual<T: Real>(
    spec: &HierarchySpec<T>,
    n: u32,
    length: T,
    length_rate: T,
    rule: &QuadratureRule<T>,
) -> Result<CdIntertwineReport<T>> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if !(length > T::zero()) || !length_rate.is_finite() {
        return Err(Error::InvalidParameter("need L > 0 and finite L̇".into()));
    }
    let alpha = spec.alpha;
    let units = &spec.units;
    let dim = n as usize + 8;
    let rate = length_rate / length;
    let hbar = units.hbar;
    let lower = eigenstate::<T>(EigenIndex { alpha, n: n + 1 });
    let gap = energy_gap(EigenIndex { alpha, n: n + 1 }, length, units);
    let upper: Vec<_> = (1..=dim as u32)
        .map(|k| eigenstate::<T>(EigenIndex { alpha: alpha + 1, n: k }))
        .collect();
    let target = &upper[n as usize - 1];

    // A ∂_tψ_{n+1}^(α), scaled form divided by L̇/L
    let chi = lower.scale_generator();
    let a_chi = apply_a(alpha, &chi, length, units);
    let a_psi = apply_a(alpha, &lower, length, units);
    // (∂_t W)(x) / (L̇/L) at x = yL
    let a = T::from_u32(alpha).unwrap();
    let w_rate = |y: T| {
        let (s, c) = (T::PI() * y).sin_cos();
        -a * units.kappa() * T::PI() / length * (s / c + T::PI() * y / (c * c))
    };
    let target_chi = target.scale_generator();

    let mut residual = T::zero();
    let mut without = T::zero();
    for (j, pj) in upper.iter().enumerate() {
        // ⟨ψ_j|∂_tψ_n^(α+1)⟩ / (L̇/L)
        let lhs_col = rule.integrate(|y| pj.eval(y) * target_chi.value(y));
        let a_dpsi = rule.integrate(|y| pj.eval(y) * a_chi.value(y));
        let dw_psi = rule.integrate(|y| pj.eval(y) * w_rate(y) * lower.eval(y));
        let left_factor = (a_dpsi + dw_psi) * rate;
        for (k, pk) in upper.iter().enumerate() {
            // ⟨ψ_{n+1}^(α)|A†|ψ_k⟩ = ⟨Aψ_{n+1}^(α)|ψ_k⟩
            let right = rule.integrate(|y| a_psi.value(y) * pk.eval(y));
            let lhs = if k == n as usize - 1 { hbar * rate * lhs_col } else { T::zero() };
            let rhs = hbar * left_factor * right / gap;
            let gauge = if j == k && k == n as usize - 1 { hbar * rate } else { T::zero() };
            // every element is purely imaginary; compare the coefficients of i
            residual = residual.max((lhs - rhs - gauge).abs());
            without = without.max((lhs - rhs).abs());
        }
    }
    Ok(CdIntertwineReport {
        dim,
        residual,
        without_gauge_term: without,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::gauss_legendre;
    use crate::ramp::SmootherStep;
    use std::f64::consts::{LN_2, PI, SQRT_2};

    fn li() -> f64 {
        PI / SQRT_2
    }

    fn idx(a: u32, n: u32) -> EigenIndex {
        EigenIndex::new(a, n).unwrap()
    }

    #[test]
    fn bures_examples() {
        let rule = gauss_legendre::<f64>(200);
        assert!(bures_angle(idx(2, 3), li(), li(), &rule).abs() < 1e-7);
        let b = bures_angle(idx(1, 1), li(), 2.0 * li(), &rule);
        assert!((b - (8.0 / (3.0 * PI)).acos()).abs() < 1e-12);
        assert!((b - 0.55703).abs() < 1e-5);
        let l23 = bures_angle(idx(2, 3), li(), 2.0 * li(), &rule);
        let l32 = bures_angle(idx(3, 2), li(), 2.0 * li(), &rule);
        let l41 = bures_angle(idx(4, 1), li(), 2.0 * li(), &rule);
        assert!(l23 > l32 && l32 > l41);
    }

    #[test]
    fn adiabatic_energy_examples() {
        let units = PhysicalUnits::default();
        let flat = SmootherStep::new(li(), li(), 2.0).unwrap();
        assert!((adiabatic_avg_energy(idx(2, 3), &flat, &units) - 16.0).abs() < 1e-12);
        let r = SmootherStep::new(li(), 2.0 * li(), 1.3).unwrap();
        let e = adiabatic_avg_energy(idx(1, 1), &r, &units);
        let oracle = gauss_legendre::<f64>(400).integrate_on(0.0, 1.0, |s| r.gamma(1.3 * s).unwrap().powi(-2));
        assert!((e - oracle).abs() < 1e-12 && e > 0.25 && e < 1.0);
        let a = adiabatic_avg_energy(idx(2, 3), &r, &units);
        assert_eq!(a, adiabatic_avg_energy(idx(3, 2), &r, &units));
        assert_eq!(a, adiabatic_avg_energy(idx(4, 1), &r, &units));
    }

    #[test]
    fn sudden_energy_matches_eigenvalue_at_start() {
        let units = PhysicalUnits::default();
        let rule = gauss_legendre::<f64>(200);
        for (a, n) in [(1, 1), (2, 1), (3, 2), (4, 1)] {
            let flat = SmootherStep::new(li(), li(), 1.0).unwrap();
            let e = sudden_avg_energy(idx(a, n), &flat, &units, &rule);
            let want = ((n + a - 1) * (n + a - 1)) as f64;
            assert!((e - want).abs() < 1e-9, "{a},{n}: {e}");
        }
    }

    #[test]
    fn cost_examples() {
        let rule = gauss_legendre::<f64>(200);
        assert_eq!(cost_rate(idx(1, 1), 2.0, 0.0, &rule), 0.0);
        let c = cost_rate(idx(1, 1), 2.0, 0.6, &rule);
        let want = 0.3 * (PI * PI / 12.0 + 0.25).sqrt();
        assert!((c - want).abs() < 1e-12);
        assert!(((PI * PI / 12.0 + 0.25).sqrt() - 1.0356).abs() < 1e-4);
        for a in 1..=4 {
            let direct = cost_rate(idx(a, 1), 2.0, 0.6, &rule);
            let closed = cost_rate_closed_form_gs(a, 2.0, 0.6, &rule);
            assert!((direct - closed).abs() < 1e-8, "{a}");
        }
        for a in 2..=4 {
            let direct = cost_rate(idx(a - 1, 2), 2.0, 0.6, &rule);
            let closed = cost_rate_closed_form_isospectral(a, 2.0, 0.6, &rule).unwrap();
            assert!((direct - closed).abs() < 1e-8, "{a}");
        }
        assert!(cost_rate_closed_form_isospectral(1, 2.0, 0.6, &rule).is_err());
        assert_eq!(cost_rate_closed_form_isospectral(3, 2.0, 0.0, &rule).unwrap(), 0.0);
        assert_eq!(cost_rate_closed_form_gs(3, 2.0, 0.0, &rule), 0.0);
    }

    #[test]
    fn ground_norm_matches_eigenstate() {
        for a in 1..=6 {
            let s = eigenstate::<f64>(idx(a, 1));
            assert!((s.norm_constant().powi(2) - ground_norm_sq::<f64>(a)).abs() < 1e-12);
        }
        assert!((ground_norm_sq::<f64>(2) - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cost_times_tau_is_constant() {
        let rule = gauss_legendre::<f64>(200);
        let vals: Vec<f64> = [0.01, 0.1, 1.0, 10.0]
            .iter()
            .map(|&tau| {
                let r = SmootherStep::new(li(), 2.0 * li(), tau).unwrap();
                tau * time_avg_cost(idx(1, 1), &r, &rule)
            })
            .collect();
        for v in &vals {
            assert!((v / vals[0] - 1.0).abs() < 1e-10);
        }
        assert!((vals[0] - (PI * PI / 12.0 + 0.25).sqrt() * LN_2).abs() < 1e-8);
    }

    #[test]
    fn qsl_examples() {
        let units = PhysicalUnits::default();
        let rule = gauss_legendre::<f64>(200);
        assert_eq!(qsl_nonadiabatic(0.0, 3.0, &units).unwrap(), 0.0);
        assert!(qsl_nonadiabatic(0.3, 0.0, &units).is_err());
        let flat = SmootherStep::new(li(), li(), 1.0).unwrap();
        assert!(qsl_sta(idx(2, 1), &flat, &units, &rule) < 1e-14);
        let fast = SmootherStep::new(li(), 2.0 * li(), 1e-4).unwrap();
        let slow = SmootherStep::new(li(), 2.0 * li(), 10.0).unwrap();
        assert!(qsl_sta(idx(2, 1), &fast, &units, &rule) < 1e-3 * qsl_sta(idx(2, 1), &slow, &units, &rule));
    }

    #[test]
    fn cd_intertwining() {
        let rule = gauss_legendre::<f64>(200);
        for (a, n) in [(1, 1), (1, 2), (2, 1)] {
            let spec = HierarchySpec::natural(a).unwrap();
            let rep = cd_intertwine_residual(&spec, n, 2.7, 0.9, &rule).unwrap();
            assert!(rep.residual < 1e-8, "{a},{n}: {}", rep.residual);
            // the printed form misses exactly the gauge term ħ|L̇|/L
            assert!((rep.without_gauge_term - 0.9 / 2.7).abs() < 1e-8);
            let still = cd_intertwine_residual(&spec, n, 2.7, 0.0, &rule).unwrap();
            assert!(still.residual < 1e-12 && still.without_gauge_term < 1e-12);
        }
    }

    #[test]
    fn trapezoid_average_of_linear_series() {
        let s = ObservableSeries::from_samples("x", (0..11).map(|k| (k as f64, 2.0 * k as f64)).collect());
        assert!((s.average - 10.0).abs() < 1e-14);
    }
}
