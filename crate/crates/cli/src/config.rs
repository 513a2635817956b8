//! Scenario configuration: a JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelection {
    Bare,
    Cd,
    Both,
}

impl ModeSelection {
    pub fn modes(&self) -> Vec<susy_sta::dynamics::Mode> {
        use susy_sta::dynamics::Mode;
        match self {
            ModeSelection::Bare => vec![Mode::Bare],
            ModeSelection::Cd => vec![Mode::Cd],
            ModeSelection::Both => vec![Mode::Bare, Mode::Cd],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Which Bures angle enters the non-adiabatic speed limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum QslAngle {
    /// Initial eigenstate vs. target instantaneous eigenstate at `τ`.
    Target,
    /// Initial eigenstate vs. the evolved state at `τ`.
    Evolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateSpec {
    pub alpha: u32,
    pub n: u32,
}

/// Everything a run needs. Field names are the JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Initial width `L_i`.
    pub li: f64,
    /// `L_f / L_i`.
    pub ratio: f64,
    pub taus: Vec<f64>,
    pub states: Vec<StateSpec>,
    /// Basis size `N`.
    pub basis: usize,
    /// Quadrature nodes `M`.
    pub nodes: usize,
    pub rtol: f64,
    pub atol: f64,
    /// Output samples per trajectory, endpoints included.
    pub samples: usize,
    pub mode: ModeSelection,
    pub qsl_angle: QslAngle,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            li: std::f64::consts::PI / std::f64::consts::SQRT_2,
            ratio: 2.0,
            taus: default_tau_grid(),
            states: vec![StateSpec { alpha: 1, n: 1 }],
            basis: 64,
            nodes: 200,
            rtol: 1e-10,
            atol: 1e-12,
            samples: 101,
            mode: ModeSelection::Bare,
            qsl_angle: QslAngle::Target,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

/// 40 points log-spaced on `[0.05, 8]`, endpoints exact.
pub fn default_tau_grid() -> Vec<f64> {
    log_grid(0.05, 8.0, 40)
}

pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| match k {
            0 => lo,
            k if k == count - 1 => hi,
            k => (a + (b - a) * k as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

/// Ground states of the first three partners after `H^(1)`.
pub fn ground_state_set() -> Vec<StateSpec> {
    [(2, 1), (3, 1), (4, 1)].iter().map(|&(alpha, n)| StateSpec { alpha, n }).collect()
}

/// States sharing the instantaneous energy `16 ε(L)`.
pub fn isospectral_set() -> Vec<StateSpec> {
    [(2, 3), (3, 2), (4, 1)].iter().map(|&(alpha, n)| StateSpec { alpha, n }).collect()
}

/// Values given on the command line; `None` keeps the file/default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alpha: Option<u32>,
    pub n: Option<u32>,
    pub li: Option<f64>,
    pub ratio: Option<f64>,
    pub taus: Option<Vec<f64>>,
    pub basis: Option<usize>,
    pub nodes: Option<usize>,
    pub rtol: Option<f64>,
    pub mode: Option<ModeSelection>,
    pub qsl_angle: Option<QslAngle>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.li {
            self.li = v;
        }
        if let Some(v) = o.ratio {
            self.ratio = v;
        }
        if let Some(v) = &o.taus {
            self.taus = v.clone();
        }
        if let Some(v) = o.basis {
            self.basis = v;
        }
        if let Some(v) = o.nodes {
            self.nodes = v;
        }
        if let Some(v) = o.rtol {
            self.rtol = v;
        }
        if let Some(v) = o.mode {
            self.mode = v;
        }
        if let Some(v) = o.qsl_angle {
            self.qsl_angle = v;
        }
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        match (o.alpha, o.n) {
            (None, None) => {}
            (alpha, n) => {
                let base = self.states.first().copied().unwrap_or(StateSpec { alpha: 1, n: 1 });
                self.states = vec![StateSpec {
                    alpha: alpha.unwrap_or(base.alpha),
                    n: n.unwrap_or(base.n),
                }];
            }
        }
    }

    /// Checks the invariants; `allow_zero_tau` admits the sudden quench.
    pub fn validate(&self, allow_zero_tau: bool) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        if !(self.li > 0.0 && self.li.is_finite()) {
            return bad(format!("li must be positive (got {})", self.li));
        }
        if !(self.ratio > 0.0 && self.ratio.is_finite()) {
            return bad(format!("ratio must be positive (got {})", self.ratio));
        }
        if self.taus.is_empty() {
            return bad("tau list is empty".into());
        }
        for &t in &self.taus {
            let ok = t.is_finite() && (t > 0.0 || (allow_zero_tau && t == 0.0));
            if !ok {
                return bad(format!("tau must be positive (got {t})"));
            }
        }
        if self.states.is_empty() {
            return bad("state list is empty".into());
        }
        for s in &self.states {
            if s.alpha < 1 || s.n < 1 {
                return bad(format!("state ({}, {}) needs alpha >= 1 and n >= 1", s.alpha, s.n));
            }
            if s.n as usize > self.basis {
                return bad(format!("state n = {} exceeds basis size {}", s.n, self.basis));
            }
        }
        if self.basis < 2 {
            return bad(format!("basis must be >= 2 (got {})", self.basis));
        }
        if self.nodes < 2 {
            return bad(format!("nodes must be >= 2 (got {})", self.nodes));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.samples < 2 {
            return bad(format!("samples must be >= 2 (got {})", self.samples));
        }
        Ok(())
    }

    pub fn integrator(&self) -> susy_sta::IntegratorConfig64 {
        susy_sta::IntegratorConfig64 {
            rel_tol: self.rtol,
            abs_tol: self.atol,
            dense_output: self.samples,
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let g = default_tau_grid();
        assert_eq!(g.len(), 40);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[39], 8.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn overrides_replace_states_and_values() {
        let mut c = ScenarioConfig::default();
        c.apply(&Overrides {
            alpha: Some(3),
            taus: Some(vec![0.1, 1.0]),
            rtol: Some(1e-9),
            ..Default::default()
        });
        assert_eq!(c.states, vec![StateSpec { alpha: 3, n: 1 }]);
        assert_eq!(c.taus, vec![0.1, 1.0]);
        assert_eq!(c.rtol, 1e-9);
        c.validate(false).unwrap();
    }

    #[test]
    fn validation_errors() {
        let mut c = ScenarioConfig::default();
        c.taus.clear();
        assert!(c.validate(false).is_err());
        let mut c = ScenarioConfig::default();
        c.taus = vec![0.0];
        assert!(c.validate(false).is_err());
        assert!(c.validate(true).is_ok());
        let mut c = ScenarioConfig::default();
        c.ratio = -1.0;
        assert!(c.validate(false).is_err());
        let mut c = ScenarioConfig::default();
        c.states = vec![StateSpec { alpha: 2, n: 99 }];
        assert!(c.validate(false).is_err());
    }

    #[test]
    fn partial_json_uses_defaults() {
        let c: ScenarioConfig = serde_json::from_str(r#"{"ratio": 3.0, "mode": "both"}"#).unwrap();
        assert_eq!(c.ratio, 3.0);
        assert_eq!(c.mode, ModeSelection::Both);
        assert_eq!(c.basis, 64);
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
