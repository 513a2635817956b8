//! Subcommand bodies. Each returns the text to emit, or an error.

use serde::Serialize;

use susy_sta::dynamics::{evolve_protocol, Evolution};
use susy_sta::hierarchy::{check_factorization_with, eigenstate, energy, energy_gap, EigenIndex, HierarchySpec, PhysicalUnits};
use susy_sta::numerics::CouplingCache;
use susy_sta::observables::cd_intertwine_residual;
use susy_sta::ramp::{Ramp, SmootherStep};

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::output::{render, Cell, CsvRecord};
use crate::sweep::{figure_preset, run_sweep};

/// Text to write plus the exit status to report afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub status: i32,
}

impl CommandOutput {
    fn ok(text: String) -> Self {
        Self { text, status: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub check: String,
    pub alpha: u32,
    pub n: u32,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CsvRecord for VerifyRow {
    fn header() -> Vec<&'static str> {
        vec!["check", "alpha", "n", "residual", "tolerance", "passed"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.check.clone()),
            Cell::Int(self.alpha as i64),
            Cell::Int(self.n as i64),
            Cell::Float(self.residual),
            Cell::Float(self.tolerance),
            Cell::Text(self.passed.to_string()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub alpha: u32,
    pub n: u32,
    pub length: f64,
    pub energy: f64,
    pub gap: f64,
}

impl CsvRecord for SpectrumRow {
    fn header() -> Vec<&'static str> {
        vec!["alpha", "n", "length", "energy", "gap"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.alpha as i64),
            Cell::Int(self.n as i64),
            Cell::Float(self.length),
            Cell::Float(self.energy),
            Cell::Float(self.gap),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RampRow {
    pub t: f64,
    pub gamma: f64,
    pub gamma_dot: f64,
    pub length: f64,
    pub length_rate: f64,
}

impl CsvRecord for RampRow {
    fn header() -> Vec<&'static str> {
        vec!["t", "gamma", "gamma_dot", "length", "length_rate"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Float(self.t),
            Cell::Float(self.gamma),
            Cell::Float(self.gamma_dot),
            Cell::Float(self.length),
            Cell::Float(self.length_rate),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveRow {
    pub alpha: u32,
    pub n: u32,
    pub mode: String,
    pub tau: f64,
    pub t: f64,
    pub length: f64,
    pub fidelity: f64,
    pub energy: f64,
    pub norm: f64,
}

impl CsvRecord for EvolveRow {
    fn header() -> Vec<&'static str> {
        vec!["alpha", "n", "mode", "tau", "t", "length", "fidelity", "energy", "norm"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.alpha as i64),
            Cell::Int(self.n as i64),
            Cell::Text(self.mode.clone()),
            Cell::Float(self.tau),
            Cell::Float(self.t),
            Cell::Float(self.length),
            Cell::Float(self.fidelity),
            Cell::Float(self.energy),
            Cell::Float(self.norm),
        ]
    }
}

pub const VERIFY_TOLERANCE: f64 = 1e-8;
const VERIFY_ALPHA_MAX: u32 = 4;
const VERIFY_N_MAX: u32 = 6;

/// SUSY identities, counterdiabatic intertwining, coupling antisymmetry and
/// orthonormality. `w_scale = -1` flips the superpotential sign.
pub fn verify_rows(cfg: &ScenarioConfig, cache: &CouplingCache<f64>, w_scale: f64) -> Result<Vec<VerifyRow>, CliError> {
    let units = PhysicalUnits::default();
    let rule = cache.rule(cfg.nodes);
    let tol = VERIFY_TOLERANCE;
    let mut rows = Vec::new();
    let mut push = |check: &str, alpha, n, residual: f64| {
        rows.push(VerifyRow {
            check: check.to_string(),
            alpha,
            n,
            residual,
            tolerance: tol,
            passed: residual.is_finite() && residual <= tol,
        })
    };
    for alpha in 1..=VERIFY_ALPHA_MAX {
        let spec = HierarchySpec::new(alpha, cfg.li, units)?;
        let rep = check_factorization_with(&spec, VERIFY_N_MAX, &rule, tol, w_scale)?;
        for &(n, r) in &rep.factorization {
            push("factorization", alpha, n, r);
        }
        for &(n, r) in &rep.intertwining {
            if let Some(r) = r {
                push("intertwining", alpha, n, r);
            }
        }
        for &(n, r) in &rep.raising {
            push("raising", alpha, n, r);
        }
        for &(n, r) in &rep.norm_identity {
            push("norm_identity", alpha, n, r);
        }
        push("ground_annihilation", alpha, 1, rep.ground_annihilation);
        push("isospectral_shift", alpha, 0, rep.isospectral_shift);

        let mut worst: f64 = 0.0;
        for m in 1..=VERIFY_N_MAX {
            let pm = eigenstate::<f64>(EigenIndex { alpha, n: m });
            for k in m..=VERIFY_N_MAX {
                let pk = eigenstate::<f64>(EigenIndex { alpha, n: k });
                let ip = rule.integrate(|y| pm.eval(y) * pk.eval(y));
                let want = if m == k { 1.0 } else { 0.0 };
                worst = worst.max((ip - want).abs());
            }
        }
        push("orthonormality", alpha, 0, worst);

        let coupling = cache.get(alpha, cfg.basis, cfg.nodes)?;
        push("coupling_antisymmetry", alpha, 0, coupling.antisymmetry_defect());
    }
    for (alpha, n) in [(1, 1), (1, 2), (2, 1)] {
        let spec = HierarchySpec::new(alpha, cfg.li, units)?;
        let rep = cd_intertwine_residual(&spec, n, cfg.li, 0.9, &rule)?;
        push("cd_intertwining", alpha, n, rep.residual);
    }
    Ok(rows)
}

pub fn verify(cfg: &ScenarioConfig, cache: &CouplingCache<f64>, inject_sign_error: bool) -> Result<CommandOutput, CliError> {
    let w_scale = if inject_sign_error { -1.0 } else { 1.0 };
    let rows = verify_rows(cfg, cache, w_scale)?;
    let failed: Vec<_> = rows.iter().filter(|r| !r.passed).collect();
    for r in &rows {
        eprintln!(
            "{:<4} {:<22} alpha={} n={} residual={:.3e}",
            if r.passed { "ok" } else { "FAIL" },
            r.check,
            r.alpha,
            r.n,
            r.residual
        );
    }
    eprintln!("{} checks, {} failed", rows.len(), failed.len());
    Ok(CommandOutput {
        text: render(cfg, &rows, &[])?,
        status: if failed.is_empty() { 0 } else { 2 },
    })
}

/// Levels of `H^(1..=alpha_max)`, `n = 1..=n_max`, at width `li`.
pub fn spectrum(cfg: &ScenarioConfig, alpha_max: u32, n_max: u32) -> Result<CommandOutput, CliError> {
    if alpha_max < 1 || n_max < 1 {
        return Err(CliError::Validation("alpha and n must be >= 1".into()));
    }
    let units = PhysicalUnits::default();
    let mut rows = Vec::new();
    for alpha in 1..=alpha_max {
        for n in 1..=n_max {
            let idx = EigenIndex::new(alpha, n)?;
            rows.push(SpectrumRow {
                alpha,
                n,
                length: cfg.li,
                energy: energy(idx, cfg.li, &units),
                gap: energy_gap(idx, cfg.li, &units),
            });
        }
    }
    Ok(CommandOutput::ok(render(cfg, &rows, &[])?))
}

/// The width protocol for the first τ, on `samples` equispaced times.
pub fn ramp(cfg: &ScenarioConfig) -> Result<CommandOutput, CliError> {
    let tau = cfg.taus[0];
    let ramp = SmootherStep::new(cfg.li, cfg.li * cfg.ratio, tau)?;
    let last = (cfg.samples - 1) as f64;
    let rows = (0..cfg.samples)
        .map(|k| {
            let t = if k + 1 == cfg.samples { tau } else { tau * k as f64 / last };
            let s = ramp.sample(t)?;
            Ok(RampRow {
                t,
                gamma: s.gamma,
                gamma_dot: s.gamma_dot,
                length: s.length,
                length_rate: s.length_rate,
            })
        })
        .collect::<Result<Vec<_>, susy_sta::Error>>()?;
    Ok(CommandOutput::ok(render(cfg, &rows, &[])?))
}

/// Time series of fidelity, energy and norm. `τ = 0` yields one quench row.
pub fn evolve(cfg: &ScenarioConfig, cache: &CouplingCache<f64>) -> Result<CommandOutput, CliError> {
    let units = PhysicalUnits::default();
    let rule = cache.rule(cfg.nodes);
    let lf = cfg.li * cfg.ratio;
    let mut rows = Vec::new();
    for s in &cfg.states {
        let spec = HierarchySpec::new(s.alpha, cfg.li, units)?;
        let index = EigenIndex::new(s.alpha, s.n)?;
        let coupling = cache.get(s.alpha, cfg.basis, cfg.nodes)?;
        for &tau in &cfg.taus {
            for (k, mode) in cfg.mode.modes().into_iter().enumerate() {
                if tau == 0.0 && k > 0 {
                    continue;
                }
                let mode_name = mode.as_str().to_string();
                match evolve_protocol(mode, &spec, index, lf, tau, &coupling, &rule, &cfg.integrator())? {
                    Evolution::Ramp(rec) => {
                        let k = s.n as usize - 1;
                        for smp in &rec.samples {
                            rows.push(EvolveRow {
                                alpha: s.alpha,
                                n: s.n,
                                mode: mode_name.clone(),
                                tau,
                                t: smp.t,
                                length: smp.length,
                                fidelity: smp.coeffs[k].norm_sqr(),
                                energy: smp.energy,
                                norm: smp.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
                            });
                        }
                    }
                    Evolution::Quench(q) => rows.push(EvolveRow {
                        alpha: s.alpha,
                        n: s.n,
                        mode: "quench".into(),
                        tau,
                        t: 0.0,
                        length: lf,
                        fidelity: q.fidelity,
                        energy: q.state.energy(&units),
                        norm: q.state.norm_sqr().sqrt(),
                    }),
                }
            }
        }
    }
    Ok(CommandOutput::ok(render(cfg, &rows, &[])?))
}

/// Full sweep; exits 2 if any row failed, after writing the rest.
pub fn sweep(cfg: &ScenarioConfig, cache: &CouplingCache<f64>) -> Result<CommandOutput, CliError> {
    let out = run_sweep(cfg, cache);
    Ok(CommandOutput {
        text: render(cfg, &out.rows, &out.failures)?,
        status: if out.failures.is_empty() { 0 } else { 2 },
    })
}

/// Figure dataset: Bures angle, fidelity and energies.
pub fn fig2(cfg: &ScenarioConfig, cache: &CouplingCache<f64>) -> Result<CommandOutput, CliError> {
    sweep(&figure_preset(cfg.clone()), cache)
}

/// Figure dataset: cost and speed limits. Same rows as [`fig2`].
pub fn fig3(cfg: &ScenarioConfig, cache: &CouplingCache<f64>) -> Result<CommandOutput, CliError> {
    sweep(&figure_preset(cfg.clone()), cache)
}
