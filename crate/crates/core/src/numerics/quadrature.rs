//! Gauss–Legendre quadrature on the scaled interval `[-1/2, 1/2]`.

use crate::scalar::Real;

/// Nodes and weights on `[-1/2, 1/2]`; the weights sum to the interval length 1.
///
/// An `M`-point rule integrates polynomials of degree `2M - 1` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Polynomial exactness degree, `2M - 1`.
    pub fn exactness_degree(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// `Σ w_i f(y_i)`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&y, &w)| acc + w * f(y))
    }

    /// Integral of `f` over `[a, b]`, using this rule mapped affinely.
    pub fn integrate_on<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = T::lit(0.5);
        let mid = (a + b) * half;
        let len = b - a;
        self.integrate(|y| f(mid + len * y)) * len
    }

    /// Composite rule over `panels` equal sub-intervals of `[a, b]`.
    pub fn integrate_composite<F: FnMut(T) -> T>(&self, a: T, b: T, panels: usize, mut f: F) -> T {
        let width = (b - a) / T::from_count(panels);
        (0..panels).fold(T::zero(), |acc, p| {
            let lo = a + width * T::from_count(p);
            acc + self.integrate_on(lo, lo + width, &mut f)
        })
    }
}

/// Builds the `m`-point Gauss–Legendre rule mapped to `[-1/2, 1/2]`.
///
/// Nodes are roots of `P_m` found by Newton iteration from the
/// Tricomi initial guess, evaluated in the target precision.
pub fn gauss_legendre<T: Real>(m: usize) -> QuadratureRule<T> {
    assert!(m >= 1, "quadrature needs at least one node");
    let mf = T::from_count(m);
    let half = T::lit(0.5);
    let mut nodes = vec![T::zero(); m];
    let mut weights = vec![T::zero(); m];
    let tol = T::epsilon() * T::lit(4.0);
    for i in 0..m.div_ceil(2) {
        let mut x = (T::PI() * (T::from_count(i) + T::lit(0.75)) / (mf + half)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= tol {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != T::zero() {
            dp = d;
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        // map [-1, 1] -> [-1/2, 1/2]: y = x/2, weight halves
        nodes[i] = -x * half;
        weights[i] = w * half;
        nodes[m - 1 - i] = x * half;
        weights[m - 1 - i] = w * half;
    }
    if m % 2 == 1 {
        nodes[m / 2] = T::zero();
    }
    QuadratureRule { nodes, weights }
}

fn legendre_with_derivative<T: Real>(m: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=m {
        let kf = T::from_count(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (T::one(), T::zero());
    }
    let d = T::from_count(m) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Discrete inner product `Σ w_i f(y_i) g(y_i)` on the rule's nodes.
pub fn inner_product<T: Real, F, G>(f: F, g: G, rule: &QuadratureRule<T>) -> T
where
    F: Fn(T) -> T,
    G: Fn(T) -> T,
{
    rule.integrate(|y| f(y) * g(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn weights_positive_and_sum_to_one() {
        for m in [2, 3, 7, 64, 200, 401] {
            let rule = gauss_legendre::<f64>(m);
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "m = {m}: {total}");
            assert!(rule.nodes().iter().all(|y| y.abs() < 0.5));
        }
    }

    #[test]
    fn trig_moments_at_default_size() {
        let rule = gauss_legendre::<f64>(200);
        let c2 = rule.integrate(|y| (PI * y).cos().powi(2));
        let c4 = rule.integrate(|y| (PI * y).cos().powi(4));
        assert!((c2 - 0.5).abs() < 1e-14);
        assert!((c4 - 0.375).abs() < 1e-14);
    }

    #[test]
    fn exact_for_degree_two_m_minus_one() {
        let rule = gauss_legendre::<f64>(5);
        assert_eq!(rule.exactness_degree(), 9);
        // ∫ y^8 over [-1/2,1/2] = 2 (1/2)^9 / 9
        let got = rule.integrate(|y| y.powi(8));
        assert!((got - 2.0 * 0.5f64.powi(9) / 9.0).abs() < 1e-16);
    }

    #[test]
    fn single_precision_rule() {
        let rule = gauss_legendre::<f32>(40);
        let total: f32 = rule.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-5);
    }

    #[test]
    fn composite_and_mapped_integration() {
        let rule = gauss_legendre::<f64>(20);
        let v = rule.integrate_composite(0.0, 3.0, 4, |t| t.exp());
        assert!((v - (3.0f64.exp() - 1.0)).abs() < 1e-12);
    }
}
