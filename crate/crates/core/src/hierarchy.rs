//! Closed-form supersymmetric hierarchy of the infinite box.
//!
//! Member `α` of the hierarchy is the trigonometric Pöschl–Teller well
//! `V(x) = α(α-1) ε(L) sec²(πx/L)` with `ε(L) = ħ²π²/(2mL²)`. Its
//! eigenstates on the scaled coordinate `y = x/L ∈ [-1/2, 1/2]` are
//!
//! ```text
//! φ_n(y) = N · cos^α(πy) · C_{n-1}^{(α)}(sin πy)
//! ```
//!
//! with Gegenbauer polynomials `C^{(α)}` and energies `(n+α-1)² ε(L)`.
//! Member `α + 1` is reached from member `α` with the ladder operators
//! `A = κ d/dx + W^(α)` and `A† = -κ d/dx + W^(α)`, `κ = ħ/√(2m)`.
//!
//! Sign convention: `N > 0`, so every state has the sign of the leading
//! Gegenbauer coefficient (positive next to the right wall). With it,
//! `A ψ_n^(α) = +√ΔE ψ_{n-1}^(α+1)` and `A† ψ_{n-1}^(α+1) = +√ΔE ψ_n^(α)`.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::numerics::quadrature::QuadratureRule;
use crate::scalar::Real;

/// `ħ` and `m`; natural units by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalUnits<T> {
    pub hbar: T,
    pub mass: T,
}

impl<T: Real> Default for PhysicalUnits<T> {
    fn default() -> Self {
        Self {
            hbar: T::one(),
            mass: T::one(),
        }
    }
}

impl<T: Real> PhysicalUnits<T> {
    pub fn new(hbar: T, mass: T) -> Result<Self> {
        if !(hbar > T::zero() && mass > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "hbar and mass must be positive (got {hbar}, {mass})"
            )));
        }
        Ok(Self { hbar, mass })
    }

    /// `κ = ħ/√(2m)`, the coefficient of `d/dx` in the ladder operators.
    pub fn kappa(&self) -> T {
        self.hbar / (T::lit(2.0) * self.mass).sqrt()
    }

    /// `ε(L) = ħ²π²/(2mL²)`, the energy unit of a box of width `L`.
    pub fn energy_scale(&self, length: T) -> T {
        let pi = T::PI();
        self.hbar * self.hbar * pi * pi / (T::lit(2.0) * self.mass * length * length)
    }
}

/// Default initial width `π/√2`, which makes `ε(L_i) = 1` in natural units.
pub fn default_length<T: Real>() -> T {
    T::PI() / T::SQRT_2()
}

/// Identifies one Hamiltonian `H^(α)` of the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchySpec<T> {
    pub alpha: u32,
    pub length: T,
    pub units: PhysicalUnits<T>,
}

impl<T: Real> HierarchySpec<T> {
    pub fn new(alpha: u32, length: T, units: PhysicalUnits<T>) -> Result<Self> {
        if alpha < 1 {
            return Err(Error::InvalidParameter("hierarchy order must be >= 1".into()));
        }
        if !(length > T::zero()) {
            return Err(Error::InvalidParameter(format!("length must be positive (got {length})")));
        }
        Ok(Self {
            alpha,
            length,
            units,
        })
    }

    /// Order `alpha` with the default width and natural units.
    pub fn natural(alpha: u32) -> Result<Self> {
        Self::new(alpha, default_length(), PhysicalUnits::default())
    }
}

/// `(α, n)` with the ground state at `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EigenIndex {
    pub alpha: u32,
    pub n: u32,
}

impl EigenIndex {
    pub fn new(alpha: u32, n: u32) -> Result<Self> {
        if alpha < 1 || n < 1 {
            return Err(Error::InvalidParameter(format!(
                "eigen index needs alpha >= 1 and n >= 1 (got alpha={alpha}, n={n})"
            )));
        }
        Ok(Self { alpha, n })
    }

    /// `n + α - 1`, the box quantum number sharing this energy.
    pub fn level(&self) -> u32 {
        self.n + self.alpha - 1
    }
}

fn check_length<T: Real>(length: T) -> Result<()> {
    if length > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("length must be positive (got {length})")))
    }
}

/// `W^(α)(x) = α ħ π/(√(2m) L) · tan(πx/L)`.
pub fn superpotential<T: Real>(spec: &HierarchySpec<T>, x: T, length: T) -> Result<T> {
    check_length(length)?;
    if x.abs() >= length * T::lit(0.5) {
        return Err(Error::Domain(format!(
            "superpotential diverges at |x| >= L/2 (x = {x}, L = {length})"
        )));
    }
    let a = T::from_u32(spec.alpha).unwrap();
    Ok(a * spec.units.kappa() * T::PI() / length * (T::PI() * x / length).tan())
}

/// Partner potential in the SUSY form `[W^(α-1)]² + κ dW^(α-1)/dx`.
///
/// This is the potential of `H^(α)` up to the additive constant
/// `E_1^(α-1)`; see [`hamiltonian_potential`] for the shifted form whose
/// spectrum is [`energy`]. Order 1 is the box itself: zero inside and
/// `T::infinity()` on or beyond the walls.
pub fn potential<T: Real>(spec: &HierarchySpec<T>, x: T, length: T) -> Result<T> {
    check_length(length)?;
    if x.abs() >= length * T::lit(0.5) {
        return Ok(T::infinity());
    }
    if spec.alpha == 1 {
        return Ok(T::zero());
    }
    let b = T::from_u32(spec.alpha - 1).unwrap();
    let eps = spec.units.energy_scale(length);
    let t = (T::PI() * x / length).tan();
    let sec2 = T::one() + t * t;
    Ok(eps * (b * b * t * t + b * sec2))
}

/// Potential entering `H^(α) = -κ² d²/dx² + V`, i.e. `α(α-1) ε(L) sec²(πx/L)`.
pub fn hamiltonian_potential<T: Real>(spec: &HierarchySpec<T>, x: T, length: T) -> Result<T> {
    check_length(length)?;
    if x.abs() >= length * T::lit(0.5) {
        return Ok(T::infinity());
    }
    let a = T::from_u32(spec.alpha).unwrap();
    let c = (T::PI() * x / length).cos();
    Ok(a * (a - T::one()) * spec.units.energy_scale(length) / (c * c))
}

/// `𝓔_n^(α)(L) = (n+α-1)² π²ħ²/(2mL²)`.
pub fn energy<T: Real>(index: EigenIndex, length: T, units: &PhysicalUnits<T>) -> T {
    let k = T::from_u32(index.level()).unwrap();
    k * k * units.energy_scale(length)
}

/// `ΔE_n^(α) = 𝓔_n^(α) - 𝓔_1^(α)`.
pub fn energy_gap<T: Real>(index: EigenIndex, length: T, units: &PhysicalUnits<T>) -> T {
    let ground = EigenIndex {
        alpha: index.alpha,
        n: 1,
    };
    energy(index, length, units) - energy(ground, length, units)
}

/// Gegenbauer polynomial `C_k^{(λ)}(s)` by the three-term recurrence.
pub fn gegenbauer<T: Real>(k: u32, lambda: T, s: T) -> T {
    let two = T::lit(2.0);
    let mut p0 = T::one();
    if k == 0 {
        return p0;
    }
    let mut p1 = two * lambda * s;
    for j in 2..=k {
        let jf = T::from_u32(j).unwrap();
        let p2 = (two * s * (jf + lambda - T::one()) * p1 - (jf + two * lambda - two) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Same recurrence on a jet argument.
pub fn gegenbauer_jet<T: Real>(k: u32, lambda: T, s: Jet<T>) -> Jet<T> {
    let two = T::lit(2.0);
    let mut p0 = Jet::constant(T::one());
    if k == 0 {
        return p0;
    }
    let mut p1 = s.scale(two * lambda);
    for j in 2..=k {
        let jf = T::from_u32(j).unwrap();
        let p2 = ((s * p1).scale(two * (jf + lambda - T::one())) - p0.scale(jf + two * lambda - two))
            .scale(T::one() / jf);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// A real function on the scaled coordinate that can be expanded to a jet.
///
/// Implementors return the Taylor jet at `y`; ladder operators consume one
/// order each.
pub trait ScaledFn<T: Real> {
    fn jet(&self, y: T) -> Jet<T>;

    fn value(&self, y: T) -> T {
        self.jet(y).value()
    }

    fn deriv(&self, y: T) -> T {
        self.jet(y).derivative(1)
    }
}

impl<T: Real, F: ScaledFn<T> + ?Sized> ScaledFn<T> for &F {
    fn jet(&self, y: T) -> Jet<T> {
        (**self).jet(y)
    }
    fn value(&self, y: T) -> T {
        (**self).value(y)
    }
    fn deriv(&self, y: T) -> T {
        (**self).deriv(y)
    }
}

/// Instantaneous eigenstate `φ_n^(α)(y)` on the scaled coordinate.
///
/// The physical state is `ψ_n(x, t) = φ_n(x/L(t)) / √L(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledEigenstate<T> {
    index: EigenIndex,
    norm_constant: T,
}

/// Builds the normalized eigenstate for `index`.
///
/// The normalization integral `∫ cos^{2α}(πy) C²(sin πy) dy` equals
/// `(1/π) ∫ (1-t²)^α C(t)² dt/√(1-t²)`, which a Gauss–Chebyshev rule with
/// `n + α` nodes integrates exactly.
pub fn eigenstate<T: Real>(index: EigenIndex) -> ScaledEigenstate<T> {
    let alpha = index.alpha;
    let k = index.n - 1;
    let lambda = T::from_u32(alpha).unwrap();
    let nodes = (index.n + alpha) as usize;
    let nf = T::from_count(nodes);
    let mut sum = T::zero();
    for j in 0..nodes {
        let t = (T::PI() * (T::lit(2.0) * T::from_count(j) + T::one()) / (T::lit(2.0) * nf)).cos();
        let c = gegenbauer(k, lambda, t);
        sum = sum + (T::one() - t * t).powi(alpha as i32) * c * c;
    }
    let norm_sq = sum / nf;
    ScaledEigenstate {
        index,
        norm_constant: T::one() / norm_sq.sqrt(),
    }
}

impl<T: Real> ScaledEigenstate<T> {
    pub fn index(&self) -> EigenIndex {
        self.index
    }

    pub fn norm_constant(&self) -> T {
        self.norm_constant
    }

    fn lambda(&self) -> T {
        T::from_u32(self.index.alpha).unwrap()
    }

    /// `φ(y)`; zero on and outside the walls.
    pub fn eval(&self, y: T) -> T {
        if y.abs() >= T::lit(0.5) {
            return T::zero();
        }
        let (s, c) = (T::PI() * y).sin_cos();
        self.norm_constant
            * c.powi(self.index.alpha as i32)
            * gegenbauer(self.index.n - 1, self.lambda(), s)
    }

    /// `φ'(y)`, from `d/ds C_k^{(λ)} = 2λ C_{k-1}^{(λ+1)}`.
    pub fn eval_dy(&self, y: T) -> T {
        if y.abs() > T::lit(0.5) {
            return T::zero();
        }
        let alpha = self.index.alpha;
        let k = self.index.n - 1;
        let lambda = self.lambda();
        let (s, c) = (T::PI() * y).sin_cos();
        let g = gegenbauer(k, lambda, s);
        let dg = if k == 0 {
            T::zero()
        } else {
            T::lit(2.0) * lambda * gegenbauer(k - 1, lambda + T::one(), s)
        };
        self.norm_constant * T::PI() * c.powi(alpha as i32 - 1) * (c * c * dg - lambda * s * g)
    }

    /// `φ''(y)` from the eigenvalue equation
    /// `φ'' = π² [α(α-1) sec²(πy) - (n+α-1)²] φ`, written without division.
    pub fn eval_dy2(&self, y: T) -> T {
        if y.abs() > T::lit(0.5) {
            return T::zero();
        }
        let alpha = self.index.alpha;
        let lambda = self.lambda();
        let level = T::from_u32(self.index.level()).unwrap();
        let (s, c) = (T::PI() * y).sin_cos();
        let g = self.norm_constant * gegenbauer(self.index.n - 1, lambda, s);
        let phi = c.powi(alpha as i32) * g;
        let singular = if alpha >= 2 {
            lambda * (lambda - T::one()) * c.powi(alpha as i32 - 2) * g
        } else {
            T::zero()
        };
        T::PI() * T::PI() * (singular - level * level * phi)
    }

    /// Physical amplitude `ψ(x) = φ(x/L)/√L`.
    pub fn physical(&self, x: T, length: T) -> T {
        self.eval(x / length) / length.sqrt()
    }

    /// Generator of the scale motion, `χ(y) = -φ/2 - y φ'`.
    ///
    /// For a moving wall `∂_t ψ_n = (L̇/L) L^{-1/2} χ(x/L)`.
    pub fn scale_generator(&self) -> ScaleGenerator<'_, T> {
        ScaleGenerator { state: self }
    }
}

impl<T: Real> ScaledFn<T> for ScaledEigenstate<T> {
    fn jet(&self, y: T) -> Jet<T> {
        let (s, c) = Jet::variable(y).scale(T::PI()).sin_cos();
        let g = gegenbauer_jet(self.index.n - 1, self.lambda(), s);
        (c.powi(self.index.alpha) * g).scale(self.norm_constant)
    }

    fn value(&self, y: T) -> T {
        self.eval(y)
    }

    fn deriv(&self, y: T) -> T {
        self.eval_dy(y)
    }
}

/// `χ(y) = -φ(y)/2 - y φ'(y)`; see [`ScaledEigenstate::scale_generator`].
#[derive(Debug, Clone, Copy)]
pub struct ScaleGenerator<'a, T> {
    state: &'a ScaledEigenstate<T>,
}

impl<T: Real> ScaledFn<T> for ScaleGenerator<'_, T> {
    fn jet(&self, y: T) -> Jet<T> {
        let f = self.state.jet(y);
        let half = T::lit(0.5);
        -(f.scale(half) + Jet::variable(y) * f.differentiate())
    }

    fn value(&self, y: T) -> T {
        -self.state.eval(y) * T::lit(0.5) - y * self.state.eval_dy(y)
    }

    fn deriv(&self, y: T) -> T {
        -T::lit(1.5) * self.state.eval_dy(y) - y * self.state.eval_dy2(y)
    }
}

/// Time derivative of the instantaneous eigenstate under wall motion, as a
/// function of the physical position `x`.
pub fn eigenstate_dt<T: Real>(
    state: &ScaledEigenstate<T>,
    length: T,
    length_rate: T,
) -> impl Fn(T) -> T + '_ {
    let pref = length_rate / length / length.sqrt();
    move |x| {
        if pref == T::zero() {
            return T::zero();
        }
        pref * state.scale_generator().value(x / length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    /// `A = κ d/dx + W`
    Lower,
    /// `A† = -κ d/dx + W`
    Raise,
}

/// Ladder operator applied to a scaled function at a fixed width `L`.
///
/// In scaled form `(A f)(y) = (κ/L) [f'(y) + απ tan(πy) f(y)]`; the
/// `1/√L` of physical amplitudes passes through unchanged.
#[derive(Debug, Clone, Copy)]
pub struct Ladder<T, F> {
    kind: LadderKind,
    alpha: u32,
    length: T,
    kappa: T,
    w_scale: T,
    inner: F,
}

impl<T: Real, F: ScaledFn<T>> Ladder<T, F> {
    /// Multiplies the superpotential term by `scale`; used to inject faults
    /// into verification runs.
    pub fn with_superpotential_scale(mut self, scale: T) -> Self {
        self.w_scale = scale;
        self
    }

    pub fn kind(&self) -> LadderKind {
        self.kind
    }
}

impl<T: Real, F: ScaledFn<T>> ScaledFn<T> for Ladder<T, F> {
    fn jet(&self, y: T) -> Jet<T> {
        // the wall zero of f cancels the pole of tan; the limit there is 0
        if y.abs() >= T::lit(0.5) {
            return Jet::zero();
        }
        let f = self.inner.jet(y);
        let (s, c) = Jet::variable(y).scale(T::PI()).sin_cos();
        let a = T::from_u32(self.alpha).unwrap();
        let w = s.div(&c).scale(a * T::PI() * self.w_scale);
        let d = match self.kind {
            LadderKind::Lower => f.differentiate(),
            LadderKind::Raise => -f.differentiate(),
        };
        (d + w * f).scale(self.kappa / self.length)
    }
}

/// `A^(α) f` at width `L`.
pub fn apply_a<T: Real, F: ScaledFn<T>>(alpha: u32, f: F, length: T, units: &PhysicalUnits<T>) -> Ladder<T, F> {
    Ladder {
        kind: LadderKind::Lower,
        alpha,
        length,
        kappa: units.kappa(),
        w_scale: T::one(),
        inner: f,
    }
}

/// `A^(α)† f` at width `L`.
pub fn apply_a_dagger<T: Real, F: ScaledFn<T>>(
    alpha: u32,
    f: F,
    length: T,
    units: &PhysicalUnits<T>,
) -> Ladder<T, F> {
    Ladder {
        kind: LadderKind::Raise,
        alpha,
        length,
        kappa: units.kappa(),
        w_scale: T::one(),
        inner: f,
    }
}

/// The zero function.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl<T: Real> ScaledFn<T> for Zero {
    fn jet(&self, _y: T) -> Jet<T> {
        Jet::zero()
    }
}

/// `√(∫ f² dy)` on the rule.
pub fn l2_norm<T: Real, F: ScaledFn<T>>(f: &F, rule: &QuadratureRule<T>) -> T {
    rule.integrate(|y| {
        let v = f.value(y);
        v * v
    })
    .sqrt()
}

/// `√(∫ (f - g)² dy)` on the rule.
pub fn l2_distance<T: Real, F: ScaledFn<T>, G: ScaledFn<T>>(f: &F, g: &G, rule: &QuadratureRule<T>) -> T {
    rule.integrate(|y| {
        let v = f.value(y) - g.value(y);
        v * v
    })
    .sqrt()
}

/// Residuals of the SUSY identities for one hierarchy member.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport<T> {
    pub alpha: u32,
    pub n_max: u32,
    pub tolerance: T,
    /// `‖(A†A + E_1 - E_n) ψ_n‖` for `n = 1..=n_max`.
    pub factorization: Vec<(u32, T)>,
    /// `‖A ψ_n - √ΔE_n ψ_{n-1}^(α+1)‖`; `None` for the annihilated ground state.
    pub intertwining: Vec<(u32, Option<T>)>,
    /// `‖A† ψ_{n-1}^(α+1) - √ΔE_n ψ_n‖` for `n >= 2`.
    pub raising: Vec<(u32, T)>,
    /// `|‖A ψ_n‖² - ΔE_n|` for `n >= 1`.
    pub norm_identity: Vec<(u32, T)>,
    /// `‖A ψ_1‖`.
    pub ground_annihilation: T,
    /// `max_n |𝓔_n^(α+1) - 𝓔_{n+1}^(α)|`.
    pub isospectral_shift: T,
}

impl<T: Real> FactorizationReport<T> {
    pub fn max_residual(&self) -> T {
        let mut m = self.ground_annihilation.max(self.isospectral_shift);
        for &(_, r) in &self.factorization {
            m = m.max(r);
        }
        for &(_, r) in self.intertwining.iter() {
            if let Some(r) = r {
                m = m.max(r);
            }
        }
        for &(_, r) in self.raising.iter().chain(&self.norm_identity) {
            m = m.max(r);
        }
        m
    }

    pub fn passed(&self) -> bool {
        let m = self.max_residual();
        m.is_finite() && m <= self.tolerance
    }
}

/// Checks `H = A†A + E_1`, `A ψ_n^(α) = √ΔE ψ_{n-1}^(α+1)`, its adjoint,
/// ground-state annihilation and the isospectral shift at the spec width.
pub fn check_factorization<T: Real>(
    spec: &HierarchySpec<T>,
    n_max: u32,
    rule: &QuadratureRule<T>,
    tolerance: T,
) -> Result<FactorizationReport<T>> {
    check_factorization_with(spec, n_max, rule, tolerance, T::one())
}

/// [`check_factorization`] with the superpotential multiplied by
/// `w_scale`; `w_scale = -1` is the sign-error mutation.
pub fn check_factorization_with<T: Real>(
    spec: &HierarchySpec<T>,
    n_max: u32,
    rule: &QuadratureRule<T>,
    tolerance: T,
    w_scale: T,
) -> Result<FactorizationReport<T>> {
    if n_max < 2 {
        return Err(Error::InvalidParameter("n_max must be >= 2".into()));
    }
    let alpha = spec.alpha;
    let length = spec.length;
    let units = &spec.units;
    let e1 = energy(EigenIndex { alpha, n: 1 }, length, units);

    let mut factorization = Vec::new();
    let mut intertwining = Vec::new();
    let mut raising = Vec::new();
    let mut norm_identity = Vec::new();
    let mut ground_annihilation = T::zero();
    let mut isospectral_shift = T::zero();

    for n in 1..=n_max {
        let idx = EigenIndex { alpha, n };
        let psi = eigenstate::<T>(idx);
        let en = energy(idx, length, units);
        let gap = en - e1;

        let lowered = apply_a(alpha, psi, length, units).with_superpotential_scale(w_scale);
        let raised = apply_a_dagger(alpha, lowered, length, units).with_superpotential_scale(w_scale);
        let fres = rule
            .integrate(|y| {
                let v = raised.value(y) + (e1 - en) * psi.eval(y);
                v * v
            })
            .sqrt();
        factorization.push((n, fres));

        let lowered_norm_sq = rule.integrate(|y| {
            let v = lowered.value(y);
            v * v
        });
        norm_identity.push((n, (lowered_norm_sq - gap).abs()));

        if n == 1 {
            ground_annihilation = lowered_norm_sq.sqrt();
            intertwining.push((n, None));
        } else {
            let partner = eigenstate::<T>(EigenIndex { alpha: alpha + 1, n: n - 1 });
            let root = gap.sqrt();
            let ires = rule
                .integrate(|y| {
                    let v = lowered.value(y) - root * partner.eval(y);
                    v * v
                })
                .sqrt();
            intertwining.push((n, Some(ires)));

            let up = apply_a_dagger(alpha, partner, length, units).with_superpotential_scale(w_scale);
            let rres = rule
                .integrate(|y| {
                    let v = up.value(y) - root * psi.eval(y);
                    v * v
                })
                .sqrt();
            raising.push((n, rres));
        }

        let shifted = energy(EigenIndex { alpha: alpha + 1, n }, length, units);
        let next = energy(EigenIndex { alpha, n: n + 1 }, length, units);
        isospectral_shift = isospectral_shift.max((shifted - next).abs());
    }

    Ok(FactorizationReport {
        alpha,
        n_max,
        tolerance,
        factorization,
        intertwining,
        raising,
        norm_identity,
        ground_annihilation,
        isospectral_shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::gauss_legendre;
    use std::f64::consts::{PI, SQRT_2};

    fn li() -> f64 {
        PI / SQRT_2
    }

    #[test]
    fn superpotential_examples() {
        let s1 = HierarchySpec::natural(1).unwrap();
        let s2 = HierarchySpec::natural(2).unwrap();
        assert_eq!(superpotential(&s1, 0.0, li()).unwrap(), 0.0);
        assert!((superpotential(&s2, li() / 4.0, li()).unwrap() - 2.0).abs() < 1e-14);
        let a = superpotential(&s1, -li() / 4.0, li()).unwrap();
        let b = superpotential(&s1, li() / 4.0, li()).unwrap();
        assert_eq!(a, -b);
        assert!(matches!(superpotential(&s1, li() / 2.0, li()), Err(Error::Domain(_))));
        assert!(matches!(superpotential(&s1, -0.7 * li(), li()), Err(Error::Domain(_))));
    }

    #[test]
    fn potential_examples() {
        let l = li();
        let p = |a: u32, x: f64| potential(&HierarchySpec::natural(a).unwrap(), x, l).unwrap();
        assert_eq!(p(1, 0.3 * l), 0.0);
        assert!(p(1, 0.6 * l).is_infinite());
        assert!((p(2, 0.0) - 1.0).abs() < 1e-14);
        assert!((p(3, 0.0) - 2.0).abs() < 1e-14);
        // printed V^(2) = ε (sec² + tan²)
        let x = 0.2 * l;
        let t = (PI * x / l).tan();
        assert!((p(2, x) - (1.0 + t * t + t * t)).abs() < 1e-13);
    }

    #[test]
    fn hamiltonian_potential_is_shifted_partner_potential() {
        let l: f64 = 1.7;
        for alpha in 2..6 {
            let spec = HierarchySpec::new(alpha, l, PhysicalUnits::default()).unwrap();
            let shift = energy(EigenIndex { alpha: alpha - 1, n: 1 }, l, &spec.units);
            for x in [-0.4 * l, -0.1 * l, 0.0, 0.33 * l] {
                let a = hamiltonian_potential(&spec, x, l).unwrap();
                let b = potential(&spec, x, l).unwrap() + shift;
                assert!((a - b).abs() < 1e-11 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn energy_examples() {
        let u = PhysicalUnits::default();
        assert!((energy(EigenIndex { alpha: 1, n: 1 }, li(), &u) - 1.0).abs() < 1e-14);
        for (a, n) in [(2, 3), (3, 2), (4, 1)] {
            assert!((energy(EigenIndex { alpha: a, n }, li(), &u) - 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gegenbauer_special_cases() {
        // C^{(1)} = Chebyshev U: U_3(s) = 8s³ - 4s
        let s: f64 = 0.3;
        assert!((gegenbauer(3, 1.0, s) - (8.0 * s * s * s - 4.0 * s)).abs() < 1e-14);
        // C_2^{(λ)}(s) = 2λ(λ+1)s² - λ
        let l: f64 = 2.5;
        assert!((gegenbauer(2, l, s) - (2.0 * l * (l + 1.0) * s * s - l)).abs() < 1e-14);
        let j = gegenbauer_jet(4, 3.0, Jet::variable(s));
        assert!((j.value() - gegenbauer(4, 3.0, s)).abs() < 1e-13);
        // derivative identity d/ds C_k^λ = 2λ C_{k-1}^{λ+1}
        assert!((j.derivative(1) - 6.0 * gegenbauer(3, 4.0, s)).abs() < 1e-12);
    }

    #[test]
    fn ground_state_of_second_member_at_center() {
        let psi = eigenstate::<f64>(EigenIndex { alpha: 2, n: 1 });
        // the normalized amplitude is √(8/(3L)), twice √(2/(3L))
        let printed = (2.0 / (3.0 * li())).sqrt();
        assert!((printed - 0.5478).abs() < 1e-4);
        let want = (8.0 / (3.0 * li())).sqrt();
        assert!((psi.physical(0.0, li()) - want).abs() < 1e-14);
        assert!((psi.physical(0.0, li()) - 2.0 * printed).abs() < 1e-14);
    }

    #[test]
    fn box_states_match_sine_form_up_to_sign() {
        for n in 1..8u32 {
            let psi = eigenstate::<f64>(EigenIndex { alpha: 1, n });
            let sine = |y: f64| SQRT_2 * (n as f64 * PI * (y + 0.5)).sin();
            let sign = psi.eval(0.31) / sine(0.31);
            assert!((sign.abs() - 1.0).abs() < 1e-12);
            for y in [-0.49, -0.2, 0.0, 0.13, 0.45] {
                assert!((psi.eval(y) - sign * sine(y)).abs() < 1e-12);
            }
        }
        let odd = eigenstate::<f64>(EigenIndex { alpha: 1, n: 2 });
        assert!(odd.eval(0.0).abs() < 1e-15);
    }

    #[test]
    fn states_vanish_at_walls_and_are_positive_near_right_wall() {
        for alpha in 1..5u32 {
            for n in 1..7u32 {
                let psi = eigenstate::<f64>(EigenIndex { alpha, n });
                assert_eq!(psi.eval(0.5), 0.0);
                assert!(psi.eval(0.5 - 1e-3) > 0.0);
                // vanishing order α at the wall
                let r = psi.eval(0.5 - 1e-4) / psi.eval(0.5 - 2e-4);
                assert!((r - 0.5f64.powi(alpha as i32)).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_jets() {
        for alpha in 1..5u32 {
            for n in 1..6u32 {
                let psi = eigenstate::<f64>(EigenIndex { alpha, n });
                for y in [-0.43, -0.1, 0.07, 0.38] {
                    let j = psi.jet(y);
                    assert!((j.value() - psi.eval(y)).abs() < 1e-12);
                    assert!((j.derivative(1) - psi.eval_dy(y)).abs() < 1e-10);
                    assert!((j.derivative(2) - psi.eval_dy2(y)).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn third_state_of_third_member_from_intertwining() {
        let rule = gauss_legendre::<f64>(200);
        let u = PhysicalUnits::default();
        let source = eigenstate::<f64>(EigenIndex { alpha: 2, n: 3 });
        let lowered = apply_a(2, source, li(), &u);
        let norm = l2_norm(&lowered, &rule);
        let target = eigenstate::<f64>(EigenIndex { alpha: 3, n: 2 });
        let d = rule
            .integrate(|y| (lowered.value(y) / norm - target.eval(y)).powi(2))
            .sqrt();
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn ladder_examples() {
        let rule = gauss_legendre::<f64>(200);
        let u = PhysicalUnits::default();
        let l = li();
        // A^(α) annihilates the ground state
        for alpha in 1..5 {
            let g = eigenstate::<f64>(EigenIndex { alpha, n: 1 });
            assert!(l2_norm(&apply_a(alpha, g, l, &u), &rule) < 1e-10);
        }
        // A^(1) ψ_2^(1) = √3 ψ_1^(2)
        let psi2 = eigenstate::<f64>(EigenIndex { alpha: 1, n: 2 });
        let g2 = eigenstate::<f64>(EigenIndex { alpha: 2, n: 1 });
        let lowered = apply_a(1, psi2, l, &u);
        let d = rule
            .integrate(|y| (lowered.value(y) - 3f64.sqrt() * g2.eval(y)).powi(2))
            .sqrt();
        assert!(d < 1e-10);
        // A^(1)† ψ_1^(2) = √3 ψ_2^(1)
        let raised = apply_a_dagger(1, g2, l, &u);
        let d = rule
            .integrate(|y| (raised.value(y) - 3f64.sqrt() * psi2.eval(y)).powi(2))
            .sqrt();
        assert!(d < 1e-10);
        // A A† ... A† A ψ_n = ΔE ψ_n
        let psi = eigenstate::<f64>(EigenIndex { alpha: 2, n: 4 });
        let aa = apply_a_dagger(2, apply_a(2, psi, l, &u), l, &u);
        let gap = energy_gap(EigenIndex { alpha: 2, n: 4 }, l, &u);
        let d = rule.integrate(|y| (aa.value(y) - gap * psi.eval(y)).powi(2)).sqrt();
        assert!(d < 1e-9);
        // linearity on zero
        let z = apply_a_dagger(3, Zero, l, &u);
        assert_eq!(ScaledFn::<f64>::value(&z, 0.1), 0.0);
        // wall limit
        assert_eq!(lowered.value(0.5), 0.0);
    }

    #[test]
    fn ladder_adjointness() {
        let rule = gauss_legendre::<f64>(200);
        let u = PhysicalUnits::default();
        let l = 1.3;
        let f = eigenstate::<f64>(EigenIndex { alpha: 2, n: 3 });
        let g = eigenstate::<f64>(EigenIndex { alpha: 3, n: 4 });
        let lhs = rule.integrate(|y| apply_a(2, f, l, &u).value(y) * g.eval(y));
        let rhs = rule.integrate(|y| f.eval(y) * apply_a_dagger(2, g, l, &u).value(y));
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn eigenstate_dt_closed_forms() {
        let l = 1.9;
        let ldot = 0.7;
        for alpha in 1..5u32 {
            let a = alpha as f64;
            let g = eigenstate::<f64>(EigenIndex { alpha, n: 1 });
            let e = eigenstate::<f64>(EigenIndex { alpha, n: 2 });
            let dg = eigenstate_dt(&g, l, ldot);
            let de = eigenstate_dt(&e, l, ldot);
            for x in [-0.41 * l, -0.2 * l, 0.05 * l, 0.3 * l] {
                let u = PI * x / l;
                let gs = g.physical(x, l) * (-0.5 + a * u * u.tan()) * ldot / l;
                let ex = e.physical(x, l) * (-0.5 - u / u.tan() + a * u * u.tan()) * ldot / l;
                assert!((dg(x) - gs).abs() < 1e-10);
                assert!((de(x) - ex).abs() < 1e-10);
            }
        }
        let g = eigenstate::<f64>(EigenIndex { alpha: 2, n: 1 });
        let at_center = eigenstate_dt(&g, l, ldot)(0.0);
        assert!((at_center - g.physical(0.0, l) * -0.5 * ldot / l).abs() < 1e-14);
        assert_eq!(eigenstate_dt(&g, l, 0.0)(0.2), 0.0);
    }

    #[test]
    fn eigenstate_dt_is_orthogonal_to_state() {
        let rule = gauss_legendre::<f64>(200);
        let psi = eigenstate::<f64>(EigenIndex { alpha: 1, n: 1 });
        let l = 2.0;
        let dt = eigenstate_dt(&psi, l, 0.9);
        let overlap = rule.integrate_on(-l / 2.0, l / 2.0, |x| psi.physical(x, l) * dt(x));
        assert!(overlap.abs() < 1e-14);
    }

    #[test]
    fn factorization_suites() {
        let rule = gauss_legendre::<f64>(200);
        for (alpha, n_max) in [(1, 6), (2, 6), (3, 4), (4, 6)] {
            let spec = HierarchySpec::natural(alpha).unwrap();
            let rep = check_factorization(&spec, n_max, &rule, 1e-10).unwrap();
            assert!(rep.passed(), "alpha {alpha}: {:?}", rep);
            assert_eq!(rep.intertwining[0], (1, None));
        }
        let spec = HierarchySpec::natural(2).unwrap();
        let bad = check_factorization_with(&spec, 4, &rule, 1e-10, -1.0).unwrap();
        assert!(!bad.passed());
        assert!(check_factorization(&spec, 1, &rule, 1e-10).is_err());
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(HierarchySpec::<f64>::natural(0).is_err());
        assert!(HierarchySpec::new(1, -1.0, PhysicalUnits::default()).is_err());
        assert!(PhysicalUnits::new(0.0, 1.0).is_err());
        assert!(EigenIndex::new(1, 0).is_err());
    }
}
