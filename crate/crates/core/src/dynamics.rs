//! Evolution of an eigenstate through a width ramp in the instantaneous
//! eigenbasis.
//!
//! Writing `Ψ = Σ c_m ψ_m(t)` turns the Schrödinger equation into
//!
//! ```text
//! ċ_m = -i (𝓔_m/ħ) c_m - (L̇/L) Σ_k g_mk c_k
//! ```
//!
//! with the constant coupling matrix `g`. The counterdiabatic term
//! `iħ|∂_t ψ_n⟩⟨ψ_n|` removes column `n` of the coupling. Parity forbids
//! `g_mk` for odd `m + k`, so only modes with the parity of the initial
//! state are integrated.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hierarchy::{eigenstate, EigenIndex, HierarchySpec, PhysicalUnits, ScaledEigenstate};
use crate::numerics::coupling::CouplingMatrix;
use crate::numerics::ode::{ode_solve_observed, DenseStep, IntegratorConfig, SolverStats};
use crate::numerics::quadrature::{gauss_legendre, QuadratureRule};
use crate::ramp::{Ramp, SmootherStep};
use crate::scalar::Real;

/// Number of top modes whose weight flags a truncated basis.
pub const TRUNCATION_WINDOW: usize = 4;
/// Weight above which the truncation warning fires.
pub const TRUNCATION_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Bare,
    Cd,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Bare => "bare",
            Mode::Cd => "cd",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bare" => Ok(Mode::Bare),
            "cd" => Ok(Mode::Cd),
            _ => Err(Error::InvalidParameter(format!("unknown mode '{s}' (expected bare or cd)"))),
        }
    }
}

/// Coefficients over the instantaneous eigenbasis `ψ_1 … ψ_N` of `H^(α)` at
/// width `length` and time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisState<T> {
    pub alpha: u32,
    pub t: T,
    pub length: T,
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> BasisState<T> {
    /// The pure state `ψ_n` in a basis of size `dim`.
    pub fn eigen(index: EigenIndex, dim: usize, length: T) -> Result<Self> {
        let n = index.n as usize;
        if n > dim {
            return Err(Error::InvalidParameter(format!("state n = {n} outside basis of size {dim}")));
        }
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); dim];
        coeffs[n - 1] = Complex::new(T::one(), T::zero());
        Ok(Self {
            alpha: index.alpha,
            t: T::zero(),
            length,
            coeffs,
        })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm_sqr(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// `|c_n|²`, 1-based.
    pub fn population(&self, n: u32) -> T {
        self.coeffs
            .get(n as usize - 1)
            .map(|c| c.norm_sqr())
            .unwrap_or_else(T::zero)
    }

    /// `Σ_m 𝓔_m |c_m|²` at the state's width.
    pub fn energy(&self, units: &PhysicalUnits<T>) -> T {
        let eps = units.energy_scale(self.length);
        self.coeffs.iter().enumerate().fold(T::zero(), |acc, (k, c)| {
            let level = T::from_count(k + self.alpha as usize);
            acc + eps * level * level * c.norm_sqr()
        })
    }

    /// Weight in the top [`TRUNCATION_WINDOW`] modes.
    pub fn tail_weight(&self) -> T {
        let start = self.coeffs.len().saturating_sub(TRUNCATION_WINDOW);
        self.coeffs[start..].iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample<T> {
    pub t: T,
    pub length: T,
    pub length_rate: T,
    pub coeffs: Vec<Complex<T>>,
    /// `⟨Ψ|H(t)|Ψ⟩`.
    pub energy: T,
}

/// One evolution of `ψ_n^(α)(0)` through a ramp.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub spec: HierarchySpec<T>,
    pub index: EigenIndex,
    pub mode: Mode,
    pub tau: T,
    pub initial_length: T,
    pub final_length: T,
    pub samples: Vec<TrajectorySample<T>>,
    /// `(1/τ) ∫ ⟨H⟩ dt`, integrated step by step on the dense output.
    pub avg_energy: T,
    pub max_norm_defect: T,
    pub max_tail_weight: T,
    pub stats: SolverStats,
}

impl<T: Real> TrajectoryRecord<T> {
    pub fn basis_size(&self) -> usize {
        self.samples.first().map(|s| s.coeffs.len()).unwrap_or(0)
    }

    pub fn final_state(&self) -> BasisState<T> {
        let last = self.samples.last().expect("trajectory has samples");
        BasisState {
            alpha: self.index.alpha,
            t: last.t,
            length: last.length,
            coeffs: last.coeffs.clone(),
        }
    }

    /// `|c_n(t)|²` at every sample.
    pub fn fidelities(&self) -> Vec<(T, T)> {
        let k = self.index.n as usize - 1;
        self.samples.iter().map(|s| (s.t, s.coeffs[k].norm_sqr())).collect()
    }

    pub fn end_fidelity(&self) -> T {
        self.final_state().population(self.index.n)
    }
}

/// Bare evolution.
pub fn evolve_bare<T: Real, R: Ramp<T> + ?Sized>(
    spec: &HierarchySpec<T>,
    index: EigenIndex,
    ramp: &R,
    coupling: &CouplingMatrix<T>,
    config: &IntegratorConfig<T>,
) -> Result<TrajectoryRecord<T>> {
    evolve(Mode::Bare, spec, index, ramp, coupling, config)
}

/// Evolution with the counterdiabatic term for state `index.n`.
pub fn evolve_cd<T: Real, R: Ramp<T> + ?Sized>(
    spec: &HierarchySpec<T>,
    index: EigenIndex,
    ramp: &R,
    coupling: &CouplingMatrix<T>,
    config: &IntegratorConfig<T>,
) -> Result<TrajectoryRecord<T>> {
    evolve(Mode::Cd, spec, index, ramp, coupling, config)
}

pub fn evolve<T: Real, R: Ramp<T> + ?Sized>(
    mode: Mode,
    spec: &HierarchySpec<T>,
    index: EigenIndex,
    ramp: &R,
    coupling: &CouplingMatrix<T>,
    config: &IntegratorConfig<T>,
) -> Result<TrajectoryRecord<T>> {
    if index.alpha != spec.alpha || coupling.alpha() != spec.alpha {
        return Err(Error::InvalidParameter(format!(
            "order mismatch: spec {}, state {}, coupling {}",
            spec.alpha,
            index.alpha,
            coupling.alpha()
        )));
    }
    let dim = coupling.dim();
    let n = index.n as usize;
    if n > dim {
        return Err(Error::InvalidParameter(format!("state n = {n} outside basis of size {dim}")));
    }
    if dim < n + 40 {
        log::debug!("basis size {dim} is small for n = {n}; n + 40 or more is recommended");
    }
    let tau = ramp.duration();
    let li = ramp.initial_length();
    let units = spec.units;
    let hbar = units.hbar;

    // parity sector of the initial state
    let sector: Vec<usize> = (1..=dim).filter(|m| (m + n) % 2 == 0).collect();
    let k = sector.len();
    let target = sector.iter().position(|&m| m == n).unwrap();
    let mut g = vec![T::zero(); k * k];
    for (a, &m) in sector.iter().enumerate() {
        for (b, &j) in sector.iter().enumerate() {
            if !(mode == Mode::Cd && b == target) {
                g[a * k + b] = coupling.get(m, j);
            }
        }
    }
    let levels_sq: Vec<T> = sector
        .iter()
        .map(|&m| {
            let l = T::from_count(m + spec.alpha as usize - 1);
            l * l
        })
        .collect();
    // 𝓔_m(t)/ħ = levels_sq[m] · ε(L_i)/(ħ γ²)
    let omega_i = units.energy_scale(li) / hbar;
    let eps_i = units.energy_scale(li);

    let clamp = |t: T| t.max(T::zero()).min(tau);
    let gamma = |t: T| ramp.gamma(clamp(t)).unwrap_or_else(|_| T::one());
    let gamma_dot = |t: T| ramp.gamma_dot(clamp(t)).unwrap_or_else(|_| T::zero());

    let rhs = |t: T, c: &[Complex<T>], dc: &mut [Complex<T>]| {
        let gm = gamma(t);
        let rate = gamma_dot(t) / gm;
        let w0 = omega_i / (gm * gm);
        for a in 0..k {
            let row = &g[a * k..(a + 1) * k];
            let mut acc = Complex::new(T::zero(), T::zero());
            if rate != T::zero() {
                for (gv, cv) in row.iter().zip(c) {
                    acc = acc + cv * *gv;
                }
            }
            let w = w0 * levels_sq[a];
            let ca = c[a];
            dc[a] = Complex::new(w * ca.im - rate * acc.re, -w * ca.re - rate * acc.im);
        }
    };

    let mut y0 = vec![Complex::new(T::zero(), T::zero()); k];
    y0[target] = Complex::new(T::one(), T::zero());
    let times = config.sample_times(T::zero(), tau);

    // ∫⟨H⟩dt with a 4-point Gauss rule on each step's interpolant
    let gl4 = gauss_legendre::<T>(4);
    let mut energy_integral = T::zero();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); k];
    let mut observer = |step: &DenseStep<T, Complex<T>>| {
        let local = gl4.integrate_on(step.t0, step.t1(), |t| {
            step.eval_into(t, &mut buf);
            let gm = gamma(t);
            let s = buf
                .iter()
                .zip(&levels_sq)
                .fold(T::zero(), |acc, (c, &l2)| acc + l2 * c.norm_sqr());
            eps_i * s / (gm * gm)
        });
        energy_integral = energy_integral + local;
    };
    let traj = ode_solve_observed(rhs, &y0, (T::zero(), tau), &times, config, &mut observer)?;

    let mut samples = Vec::with_capacity(traj.times.len());
    let mut max_norm_defect = T::zero();
    let mut max_tail_weight = T::zero();
    for (&t, state) in traj.times.iter().zip(&traj.states) {
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); dim];
        for (a, &m) in sector.iter().enumerate() {
            coeffs[m - 1] = state[a];
        }
        let gm = gamma(t);
        let length = gm * li;
        let bs = BasisState {
            alpha: spec.alpha,
            t,
            length,
            coeffs,
        };
        max_norm_defect = max_norm_defect.max((bs.norm_sqr() - T::one()).abs());
        max_tail_weight = max_tail_weight.max(bs.tail_weight());
        let energy = bs.energy(&units);
        samples.push(TrajectorySample {
            t,
            length,
            length_rate: gamma_dot(t) * li,
            coeffs: bs.coeffs,
            energy,
        });
    }
    if max_tail_weight > T::lit(TRUNCATION_THRESHOLD) {
        log::warn!(
            "basis truncation: weight {max_tail_weight:e} in the top {TRUNCATION_WINDOW} of {dim} modes \
             (alpha={}, n={}, tau={tau})",
            index.alpha,
            index.n
        );
    }
    Ok(TrajectoryRecord {
        spec: *spec,
        index,
        mode,
        tau,
        initial_length: li,
        final_length: ramp.final_length(),
        samples,
        avg_energy: energy_integral / tau,
        max_norm_defect,
        max_tail_weight,
        stats: traj.stats,
    })
}

/// Outcome of [`evolve_protocol`].
#[derive(Debug, Clone, PartialEq)]
pub enum Evolution<T> {
    Ramp(TrajectoryRecord<T>),
    Quench(QuenchResult<T>),
}

impl<T: Real> Evolution<T> {
    pub fn final_state(&self) -> BasisState<T> {
        match self {
            Evolution::Ramp(r) => r.final_state(),
            Evolution::Quench(q) => q.state.clone(),
        }
    }

    pub fn end_fidelity(&self) -> T {
        match self {
            Evolution::Ramp(r) => r.end_fidelity(),
            Evolution::Quench(q) => q.fidelity,
        }
    }
}

/// Smoother-step expansion from `spec.length` to `final_length` over `tau`;
/// `tau = 0` is the sudden quench and is not integrated.
#[allow(clippy::too_many_arguments)]
pub fn evolve_protocol<T: Real>(
    mode: Mode,
    spec: &HierarchySpec<T>,
    index: EigenIndex,
    final_length: T,
    tau: T,
    coupling: &CouplingMatrix<T>,
    rule: &QuadratureRule<T>,
    config: &IntegratorConfig<T>,
) -> Result<Evolution<T>> {
    if tau == T::zero() {
        return sudden_quench(index, spec.length, final_length, coupling.dim(), rule).map(Evolution::Quench);
    }
    let ramp = SmootherStep::new(spec.length, final_length, tau)?;
    evolve(mode, spec, index, &ramp, coupling, config).map(Evolution::Ramp)
}

/// Result of an instantaneous change of width.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchResult<T> {
    /// `|⟨ψ_n(L_f)|ψ_n(L_i)⟩|²`.
    pub fidelity: T,
    /// Projections onto `ψ_m(L_f)`, `m = 1..=N`.
    pub state: BasisState<T>,
}

/// `⟨ψ_m(L_b)|ψ_n(L_a)⟩` for real eigenstates of one member, integrated
/// over the narrower of the two supports.
pub fn width_overlap<T: Real>(
    bra: &ScaledEigenstate<T>,
    l_bra: T,
    ket: &ScaledEigenstate<T>,
    l_ket: T,
    rule: &QuadratureRule<T>,
) -> T {
    if l_bra >= l_ket {
        let r = l_ket / l_bra;
        r.sqrt() * rule.integrate(|y| bra.eval(y * r) * ket.eval(y))
    } else {
        let r = l_bra / l_ket;
        r.sqrt() * rule.integrate(|y| bra.eval(y) * ket.eval(y * r))
    }
}

/// Sudden change of width from `l_i` to `l_f`, projected on `dim` modes.
pub fn sudden_quench<T: Real>(
    index: EigenIndex,
    l_i: T,
    l_f: T,
    dim: usize,
    rule: &QuadratureRule<T>,
) -> Result<QuenchResult<T>> {
    if !(l_i > T::zero() && l_f > T::zero()) {
        return Err(Error::InvalidParameter("quench lengths must be positive".into()));
    }
    if (index.n as usize) > dim {
        return Err(Error::InvalidParameter(format!("state n = {} outside basis of size {dim}", index.n)));
    }
    let initial = eigenstate::<T>(index);
    let coeffs = (1..=dim)
        .map(|m| {
            let fin = eigenstate::<T>(EigenIndex {
                alpha: index.alpha,
                n: m as u32,
            });
            Complex::new(width_overlap(&fin, l_f, &initial, l_i, rule), T::zero())
        })
        .collect::<Vec<_>>();
    let ov = coeffs[index.n as usize - 1].re;
    Ok(QuenchResult {
        fidelity: (ov * ov).min(T::one()),
        state: BasisState {
            alpha: index.alpha,
            t: T::zero(),
            length: l_f,
            coeffs,
        },
    })
}

/// `Ψ(x) = Σ c_m φ_m(x/L)/√L` on a grid; zero outside the walls.
pub fn reconstruct_wavefunction<T: Real>(state: &BasisState<T>, length: T, xs: &[T]) -> Vec<Complex<T>> {
    let states: Vec<ScaledEigenstate<T>> = (1..=state.dim())
        .map(|m| {
            eigenstate(EigenIndex {
                alpha: state.alpha,
                n: m as u32,
            })
        })
        .collect();
    let inv_sqrt = T::one() / length.sqrt();
    xs.iter()
        .map(|&x| {
            let y = x / length;
            states
                .iter()
                .zip(&state.coeffs)
                .filter(|(_, c)| c.norm_sqr() > T::zero())
                .fold(Complex::new(T::zero(), T::zero()), |acc, (s, c)| acc + c * (s.eval(y) * inv_sqrt))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::coupling::coupling_matrix;
    use std::f64::consts::{PI, SQRT_2};

    fn li() -> f64 {
        PI / SQRT_2
    }

    fn run(mode: Mode, alpha: u32, n: u32, tau: f64, ratio: f64, dim: usize) -> TrajectoryRecord<f64> {
        let spec = HierarchySpec::natural(alpha).unwrap();
        let ramp = SmootherStep::new(li(), ratio * li(), tau).unwrap();
        let g = coupling_matrix(alpha, dim, &gauss_legendre(200)).unwrap();
        evolve(mode, &spec, EigenIndex::new(alpha, n).unwrap(), &ramp, &g, &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn static_ramp_only_rotates_phases() {
        let r = run(Mode::Bare, 2, 1, 1.5, 1.0, 24);
        let last = r.final_state();
        assert!((last.population(1) - 1.0).abs() < 1e-9);
        // c_1(τ) = exp(-i 𝓔_1 τ) with 𝓔_1 = 4
        let c = last.coeffs[0];
        assert!((c.re - (-4.0f64 * 1.5).cos()).abs() < 1e-8);
        assert!((c.im - (-4.0f64 * 1.5).sin()).abs() < 1e-8);
        assert!((r.avg_energy - 4.0).abs() < 1e-9);
        let cd = run(Mode::Cd, 2, 1, 1.5, 1.0, 24);
        assert_eq!(cd.final_state().coeffs, last.coeffs);
    }

    #[test]
    fn adiabatic_box_ground_state() {
        let r = run(Mode::Bare, 1, 1, 8.0, 2.0, 48);
        assert!(r.end_fidelity() >= 0.999);
        assert!(r.max_norm_defect < 1e-8);
        assert!(r.samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn cd_keeps_target_population() {
        let r = run(Mode::Cd, 3, 2, 0.05, 2.0, 40);
        for (_, f) in r.fidelities() {
            assert!((f - 1.0).abs() < 1e-6);
        }
        // off-target amplitudes never leave zero
        assert!(r.final_state().coeffs.iter().enumerate().all(|(k, c)| k == 1 || c.norm_sqr() == 0.0));
    }

    #[test]
    fn short_ramp_approaches_quench() {
        let r = run(Mode::Bare, 1, 1, 1e-3, 2.0, 64);
        let q = sudden_quench(EigenIndex::new(1, 1).unwrap(), li(), 2.0 * li(), 64, &gauss_legendre(200)).unwrap();
        assert!((r.end_fidelity() - q.fidelity).abs() < 1e-2);
    }

    #[test]
    fn quench_examples() {
        let rule = gauss_legendre::<f64>(200);
        let q = sudden_quench(EigenIndex::new(1, 1).unwrap(), li(), 2.0 * li(), 64, &rule).unwrap();
        let want = (8.0 / (3.0 * PI)).powi(2);
        assert!((q.fidelity - want).abs() < 1e-12);
        assert!((want - 0.7205).abs() < 1e-4);
        let same = sudden_quench(EigenIndex::new(3, 2).unwrap(), li(), li(), 16, &rule).unwrap();
        assert!((same.fidelity - 1.0).abs() < 1e-12);
        // α = 2 ground state: overlap of cos² profiles, by a direct oracle
        let q2 = sudden_quench(EigenIndex::new(2, 1).unwrap(), li(), 2.0 * li(), 32, &rule).unwrap();
        let n2 = 8.0 / 3.0;
        let ov = (0.5f64).sqrt()
            * gauss_legendre::<f64>(400).integrate(|y| n2 * (PI * y / 2.0).cos().powi(2) * (PI * y).cos().powi(2));
        assert!((q2.fidelity - ov * ov).abs() < 1e-12);
    }

    #[test]
    fn zero_duration_routes_to_quench() {
        let spec = HierarchySpec::natural(1).unwrap();
        let rule = gauss_legendre::<f64>(200);
        let g = coupling_matrix(1, 16, &rule).unwrap();
        let cfg = IntegratorConfig::default();
        let e = evolve_protocol(Mode::Bare, &spec, EigenIndex::new(1, 1).unwrap(), 2.0 * li(), 0.0, &g, &rule, &cfg).unwrap();
        assert!(matches!(e, Evolution::Quench(_)));
        assert!((e.end_fidelity() - (8.0 / (3.0 * PI)).powi(2)).abs() < 1e-12);
        let e = evolve_protocol(Mode::Cd, &spec, EigenIndex::new(1, 1).unwrap(), 2.0 * li(), 0.5, &g, &rule, &cfg).unwrap();
        assert!(matches!(e, Evolution::Ramp(_)));
        assert!((e.end_fidelity() - 1.0).abs() < 1e-9);
        assert!(evolve_protocol(Mode::Cd, &spec, EigenIndex::new(1, 1).unwrap(), 2.0 * li(), -1.0, &g, &rule, &cfg).is_err());
    }

    #[test]
    fn quench_projection_norm() {
        let q = sudden_quench(EigenIndex::new(2, 1).unwrap(), li(), 2.0 * li(), 64, &gauss_legendre(200)).unwrap();
        assert!((q.state.norm_sqr() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reconstruction_examples() {
        let s = BasisState::eigen(EigenIndex::new(1, 2).unwrap(), 8, li()).unwrap();
        assert!(reconstruct_wavefunction(&s, li(), &[0.0])[0].norm() < 1e-15);
        let s = BasisState::eigen(EigenIndex::new(2, 1).unwrap(), 8, li()).unwrap();
        let v = reconstruct_wavefunction(&s, li(), &[0.0])[0];
        assert!((v.re - (8.0 / (3.0 * li())).sqrt()).abs() < 1e-14);
        // grid norm
        let m = 2001;
        let h = li() / (m - 1) as f64;
        let xs: Vec<f64> = (0..m).map(|k| -li() / 2.0 + k as f64 * h).collect();
        let psi = reconstruct_wavefunction(&s, li(), &xs);
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * h;
        assert!((norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let spec = HierarchySpec::natural(2).unwrap();
        let ramp = SmootherStep::new(li(), 2.0 * li(), 1.0).unwrap();
        let g = coupling_matrix(1, 8, &gauss_legendre(50)).unwrap();
        let cfg = IntegratorConfig::default();
        assert!(evolve_bare(&spec, EigenIndex::new(2, 1).unwrap(), &ramp, &g, &cfg).is_err());
        let g = coupling_matrix(2, 8, &gauss_legendre(50)).unwrap();
        assert!(evolve_bare(&spec, EigenIndex::new(2, 9).unwrap(), &ramp, &g, &cfg).is_err());
        assert!("sideways".parse::<Mode>().is_err());
        assert_eq!("cd".parse::<Mode>().unwrap(), Mode::Cd);
    }
}
