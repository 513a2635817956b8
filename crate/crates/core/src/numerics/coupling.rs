//! Derivative couplings `⟨ψ_m|∂_t ψ_n⟩ = (L̇/L) g_mn` between instantaneous
//! eigenstates of one hierarchy member.
//!
//! Scale invariance makes `g_mn = ∫ φ_m (-φ_n/2 - y φ_n') dy` independent of
//! `t` and `L`, so one matrix per `(α, N, M)` serves every ramp.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::hierarchy::{eigenstate, EigenIndex};
use crate::numerics::quadrature::{gauss_legendre, QuadratureRule};
use crate::scalar::Real;

/// Dense `N × N` coupling matrix, row-major, indices `0..N` for `n = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix<T> {
    alpha: u32,
    dim: usize,
    entries: Vec<T>,
    shape_factors: Vec<T>,
}

impl<T: Real> CouplingMatrix<T> {
    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `g_mn` with 1-based quantum numbers.
    pub fn get(&self, m: usize, n: usize) -> T {
        self.entries[(m - 1) * self.dim + (n - 1)]
    }

    /// Row `m` (1-based) as a slice over `n = 1..=N`.
    pub fn row(&self, m: usize) -> &[T] {
        &self.entries[(m - 1) * self.dim..m * self.dim]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// `q_n = ∫ (φ_n/2 + y φ_n')² dy = ⟨∂ψ_n|∂ψ_n⟩ / (L̇/L)²`, computed on
    /// the same rule (1-based).
    pub fn shape_factor(&self, n: usize) -> T {
        self.shape_factors[n - 1]
    }

    /// `max |g_mn + g_nm|` over all pairs, diagonal included.
    pub fn antisymmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for m in 1..=self.dim {
            for n in m..=self.dim {
                worst = worst.max((self.get(m, n) + self.get(n, m)).abs());
            }
        }
        worst
    }
}

/// Builds `g` for order `alpha` and basis size `dim` on `rule`.
pub fn coupling_matrix<T: Real>(alpha: u32, dim: usize, rule: &QuadratureRule<T>) -> Result<CouplingMatrix<T>> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("basis size must be >= 2 (got {dim})")));
    }
    if alpha < 1 {
        return Err(Error::InvalidParameter("hierarchy order must be >= 1".into()));
    }
    let nodes = rule.nodes();
    let weights = rule.weights();
    let m = nodes.len();
    let half = T::lit(0.5);
    // weighted values w_i φ_m(y_i) and generators χ_n(y_i)
    let mut phi = vec![T::zero(); dim * m];
    let mut chi = vec![T::zero(); dim * m];
    for k in 0..dim {
        let state = eigenstate::<T>(EigenIndex {
            alpha,
            n: (k + 1) as u32,
        });
        for (i, (&y, &w)) in nodes.iter().zip(weights).enumerate() {
            let v = state.eval(y);
            phi[k * m + i] = w * v;
            chi[k * m + i] = -half * v - y * state.eval_dy(y);
        }
    }
    let mut entries = vec![T::zero(); dim * dim];
    let mut shape_factors = vec![T::zero(); dim];
    for a in 0..dim {
        let pa = &phi[a * m..(a + 1) * m];
        for b in 0..dim {
            let cb = &chi[b * m..(b + 1) * m];
            entries[a * dim + b] = pa.iter().zip(cb).fold(T::zero(), |acc, (&p, &c)| acc + p * c);
        }
        let ca = &chi[a * m..(a + 1) * m];
        shape_factors[a] = ca
            .iter()
            .zip(weights)
            .fold(T::zero(), |acc, (&c, &w)| acc + w * c * c);
    }
    Ok(CouplingMatrix {
        alpha,
        dim,
        entries,
        shape_factors,
    })
}

/// Shared cache of coupling matrices keyed by `(α, N, M)`.
///
/// Reads proceed concurrently; an insertion takes the write lock, and a
/// matrix computed twice by racing callers is stored once.
#[derive(Debug, Default)]
pub struct CouplingCache<T> {
    matrices: RwLock<HashMap<(u32, usize, usize), Arc<CouplingMatrix<T>>>>,
    rules: RwLock<HashMap<usize, Arc<QuadratureRule<T>>>>,
}

impl<T: Real> CouplingCache<T> {
    pub fn new() -> Self {
        Self {
            matrices: RwLock::new(HashMap::new()),
            rules: RwLock::new(HashMap::new()),
        }
    }

    /// Gauss–Legendre rule with `nodes` points, built once.
    pub fn rule(&self, nodes: usize) -> Arc<QuadratureRule<T>> {
        if let Some(r) = self.rules.read().expect("rule cache poisoned").get(&nodes) {
            return Arc::clone(r);
        }
        let built = Arc::new(gauss_legendre::<T>(nodes));
        let mut w = self.rules.write().expect("rule cache poisoned");
        Arc::clone(w.entry(nodes).or_insert(built))
    }

    pub fn get(&self, alpha: u32, dim: usize, nodes: usize) -> Result<Arc<CouplingMatrix<T>>> {
        let key = (alpha, dim, nodes);
        if let Some(g) = self.matrices.read().expect("coupling cache poisoned").get(&key) {
            return Ok(Arc::clone(g));
        }
        let rule = self.rule(nodes);
        let built = Arc::new(coupling_matrix(alpha, dim, &rule)?);
        let mut w = self.matrices.write().expect("coupling cache poisoned");
        Ok(Arc::clone(w.entry(key).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.matrices.read().expect("coupling cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
