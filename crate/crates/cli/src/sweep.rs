//! Parameter sweeps over states × τ × modes.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use susy_sta::dynamics::{evolve, Mode};
use susy_sta::hierarchy::{EigenIndex, HierarchySpec, PhysicalUnits};
use susy_sta::numerics::CouplingCache;
use susy_sta::observables::{
    adiabatic_avg_energy, bures_angle, bures_angle_evolved, fidelity, qsl_nonadiabatic, qsl_sta, time_avg_cost,
};
use susy_sta::ramp::SmootherStep;

use crate::config::{ground_state_set, isospectral_set, ModeSelection, QslAngle, ScenarioConfig, StateSpec};
use crate::error::CliError;

/// One `(state, τ, mode)` point of the figure datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResultRow {
    pub tau: f64,
    pub alpha: u32,
    pub n: u32,
    pub mode: String,
    pub bures: f64,
    pub fidelity: f64,
    pub avg_energy: f64,
    pub adiabatic_energy: f64,
    pub excess_energy: f64,
    pub avg_cost_rate: f64,
    pub qsl_na: f64,
    pub qsl_sta: f64,
}

pub const SWEEP_HEADER: [&str; 12] = [
    "tau",
    "alpha",
    "n",
    "mode",
    "bures",
    "fidelity",
    "avg_energy",
    "adiabatic_energy",
    "excess_energy",
    "avg_cost_rate",
    "qsl_na",
    "qsl_sta",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFailure {
    pub tau: f64,
    pub alpha: u32,
    pub n: u32,
    pub mode: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepResultRow>,
    pub failures: Vec<RowFailure>,
}

fn order(a: (u32, u32, f64, Mode), b: (u32, u32, f64, Mode)) -> Ordering {
    a.0.cmp(&b.0)
        .then(a.1.cmp(&b.1))
        .then(a.2.total_cmp(&b.2))
        .then(a.3.cmp(&b.3))
}

/// Computes one row.
pub fn compute_row(
    cfg: &ScenarioConfig,
    state: StateSpec,
    tau: f64,
    mode: Mode,
    cache: &CouplingCache<f64>,
) -> Result<SweepResultRow, CliError> {
    let units = PhysicalUnits::default();
    let spec = HierarchySpec::new(state.alpha, cfg.li, units)?;
    let index = EigenIndex::new(state.alpha, state.n)?;
    let rule = cache.rule(cfg.nodes);
    let coupling = cache.get(state.alpha, cfg.basis, cfg.nodes)?;
    let lf = cfg.li * cfg.ratio;
    let ramp = SmootherStep::new(cfg.li, lf, tau)?;
    let record = evolve(mode, &spec, index, &ramp, &coupling, &cfg.integrator())?;
    let end = record.final_state();
    let bures = match cfg.qsl_angle {
        QslAngle::Target => bures_angle(index, cfg.li, lf, &rule),
        QslAngle::Evolved => bures_angle_evolved(index, cfg.li, &end, &rule),
    };
    let avg_energy = record.avg_energy;
    let adiabatic_energy = adiabatic_avg_energy(index, &ramp, &units);
    let row = SweepResultRow {
        tau,
        alpha: state.alpha,
        n: state.n,
        mode: mode.as_str().to_string(),
        bures,
        fidelity: fidelity(&end, state.n),
        avg_energy,
        adiabatic_energy,
        excess_energy: avg_energy - adiabatic_energy,
        avg_cost_rate: time_avg_cost(index, &ramp, &rule),
        qsl_na: qsl_nonadiabatic(bures, avg_energy, &units)?,
        qsl_sta: qsl_sta(index, &ramp, &units, &rule),
    };
    let finite = [
        row.bures,
        row.fidelity,
        row.avg_energy,
        row.adiabatic_energy,
        row.avg_cost_rate,
        row.qsl_na,
        row.qsl_sta,
    ]
    .iter()
    .all(|v| v.is_finite());
    if !finite {
        return Err(CliError::Numerical(format!("non-finite observable in row {row:?}")));
    }
    Ok(row)
}

/// Runs every `(state, τ, mode)` job, concurrently, then sorts by
/// `(alpha, n, tau, mode)`. A failing job is recorded and the rest continue.
pub fn run_sweep(cfg: &ScenarioConfig, cache: &CouplingCache<f64>) -> SweepOutcome {
    let mut jobs = Vec::new();
    for &s in &cfg.states {
        for &tau in &cfg.taus {
            for mode in cfg.mode.modes() {
                jobs.push((s, tau, mode));
            }
        }
    }
    jobs.sort_by(|a, b| order((a.0.alpha, a.0.n, a.1, a.2), (b.0.alpha, b.0.n, b.1, b.2)));
    jobs.dedup();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(s, tau, mode)| (s, tau, mode, compute_row(cfg, s, tau, mode, cache)))
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (s, tau, mode, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                log::error!("row alpha={} n={} tau={tau} mode={mode} failed: {e}", s.alpha, s.n);
                failures.push(RowFailure {
                    tau,
                    alpha: s.alpha,
                    n: s.n,
                    mode: mode.as_str().to_string(),
                    error: e.to_string(),
                });
            }
        }
    }
    SweepOutcome { rows, failures }
}

/// Figure preset: the ground-state and isospectral sets, bare dynamics.
pub fn figure_preset(mut cfg: ScenarioConfig) -> ScenarioConfig {
    let mut states = ground_state_set();
    states.extend(isospectral_set());
    states.sort();
    states.dedup();
    cfg.states = states;
    cfg.mode = ModeSelection::Bare;
    cfg
}
