//! Registry of named, reproducible experiments.
//!
//! Every experiment builds its signals and systems from scratch, runs scans
//! and solves with parameters taken from [`LabConfig`], and returns a
//! [`Report`] whose verdicts are machine-checked against the declared
//! expectations. Reports are byte-identical across re-runs and worker counts.

mod experiments;
mod report;

pub use report::{Cell, Report, Table, Verdict};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{ScanError, SignalError, SolveError};
use crate::scan::GapPolicy;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("unknown experiment '{0}' (known: {})", EXPERIMENT_NAMES.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Names accepted by [`run_experiment`].
pub const EXPERIMENT_NAMES: &[&str] = &[
    "hierarchy",
    "nonlinearity",
    "lacunary",
    "bbak",
    "difference",
    "bohr_neugebauer",
    "esclangon",
    "halfline",
    "chirp_integral",
];

/// One rung of a trajectory-fitted ladder schedule in config form.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RungCfg {
    pub eps: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub range_hi: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HierarchyCfg {
    pub eps: f64,
    pub window_halfwidths: Vec<f64>,
    pub scan_range: f64,
    pub sin_stability_factor: f64,
    pub aa_growth_factor: f64,
    pub ladder_depth: usize,
    pub probes: Vec<f64>,
    pub probe_eps: f64,
    pub probe_range: f64,
}

impl Default for HierarchyCfg {
    fn default() -> Self {
        HierarchyCfg {
            eps: 0.1,
            window_halfwidths: vec![5.0, 20.0, 80.0],
            scan_range: 2000.0,
            sin_stability_factor: 1.10,
            aa_growth_factor: 3.0,
            ladder_depth: 3,
            probes: vec![0.0, 1.0, std::f64::consts::SQRT_2],
            probe_eps: 0.1,
            probe_range: 1e5,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearityCfg {
    pub ladder_depth: usize,
    pub tent_eps: f64,
    pub tent_window: f64,
    pub tent_range_lo: f64,
    pub tent_range_hi: f64,
}

impl Default for NonlinearityCfg {
    fn default() -> Self {
        NonlinearityCfg {
            ladder_depth: 2,
            tent_eps: 0.5,
            tent_window: 2.0,
            tent_range_lo: 5.0,
            tent_range_hi: 1e4,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LacunaryCfg {
    pub order: u32,
    pub bump_eps: f64,
    pub bump_window: f64,
    pub bump_range: f64,
    pub min_gap: f64,
    pub integral_eps: f64,
    pub integral_windows: Vec<f64>,
    pub integral_range: f64,
    pub stability_factor: f64,
}

impl Default for LacunaryCfg {
    fn default() -> Self {
        LacunaryCfg {
            order: 8,
            bump_eps: 0.5,
            bump_window: 4.0,
            bump_range: 256.0,
            min_gap: 64.0,
            integral_eps: 0.2,
            integral_windows: vec![8.0, 32.0],
            integral_range: 200.0,
            stability_factor: 2.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BbakCfg {
    pub dims: Vec<usize>,
    pub eps: f64,
    pub window_halfwidth: f64,
    pub scan_range: f64,
    pub ladder_depth: usize,
    pub oracle_tol: f64,
    pub sup_bound: f64,
    pub first_gap_tol: f64,
}

impl Default for BbakCfg {
    fn default() -> Self {
        BbakCfg {
            dims: vec![1, 2, 4, 8, 16],
            eps: 0.5,
            window_halfwidth: 5.0,
            scan_range: 6000.0,
            ladder_depth: 2,
            oracle_tol: 1e-6,
            sup_bound: 1.0 + 1e-6,
            // Acceptance windows at ε = 1/2 are about ±0.5 wide, so the
            // measured member-to-member gap sits that far below the period.
            first_gap_tol: 1.2,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DifferenceCfg {
    pub h_sin: f64,
    pub h_aa: f64,
    pub h_chirp: f64,
    pub ladder_depth: usize,
}

impl Default for DifferenceCfg {
    fn default() -> Self {
        DifferenceCfg { h_sin: 1.0, h_aa: 0.5, h_chirp: 1.0, ladder_depth: 2 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BohrCfg {
    pub solve_lo: f64,
    pub solve_hi: f64,
    pub residual_tol: f64,
    pub closed_form_tol: f64,
    pub sup_tol: f64,
    pub ladder: Vec<RungCfg>,
    pub uc_delta: f64,
    pub uc_bound: f64,
    pub transfer_eps: f64,
    pub transfer_slack: f64,
    pub transfer_range: f64,
    pub transfer_window: f64,
    pub gap_factor: f64,
    pub gap_range: f64,
    pub closed_form_horizon: f64,
}

impl Default for BohrCfg {
    fn default() -> Self {
        BohrCfg {
            solve_lo: -40.0,
            solve_hi: 3240.0,
            residual_tol: 1e-5,
            closed_form_tol: 1e-5,
            sup_tol: 1e-6,
            ladder: vec![
                RungCfg { eps: 0.5, window_lo: -2.0, window_hi: 2.0, range_hi: 800.0 },
                RungCfg { eps: 0.25, window_lo: -4.0, window_hi: 4.0, range_hi: 3200.0 },
            ],
            uc_delta: 0.01,
            uc_bound: 0.1,
            transfer_eps: 0.2,
            transfer_slack: 0.02,
            transfer_range: 1000.0,
            transfer_window: 5.0,
            gap_factor: 2.0,
            gap_range: 1000.0,
            closed_form_horizon: 40.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EsclangonCfg {
    pub solve_lo: f64,
    pub solve_hi: f64,
    pub ladder: Vec<RungCfg>,
    pub bound_guard: f64,
    pub consistency_tol: f64,
}

impl Default for EsclangonCfg {
    fn default() -> Self {
        EsclangonCfg {
            solve_lo: -40.0,
            solve_hi: 3240.0,
            ladder: vec![
                RungCfg { eps: 0.5, window_lo: -2.0, window_hi: 2.0, range_hi: 800.0 },
                RungCfg { eps: 0.25, window_lo: -4.0, window_hi: 4.0, range_hi: 3200.0 },
            ],
            bound_guard: 100.0,
            consistency_tol: 2e-2,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HalflineCfg {
    pub horizon: f64,
    pub march_step: f64,
    pub match_tol: f64,
    pub match_span: f64,
    pub ladder: Vec<RungCfg>,
    pub blowup_horizon: f64,
    pub guard: f64,
}

impl Default for HalflineCfg {
    fn default() -> Self {
        HalflineCfg {
            horizon: 5100.0,
            march_step: 1e-3,
            match_tol: 1e-5,
            match_span: 200.0,
            ladder: vec![
                RungCfg { eps: 0.5, window_lo: 0.0, window_hi: 5.0, range_hi: 3000.0 },
                RungCfg { eps: 0.25, window_lo: 0.0, window_hi: 8.0, range_hi: 5000.0 },
            ],
            blowup_horizon: 40.0,
            guard: 1e6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChirpIntegralCfg {
    pub eval_point: f64,
    pub limit_tol: f64,
    pub tail_points: Vec<f64>,
    pub tail_coeff: f64,
    pub sweep_hi: f64,
    pub sweep_bound: f64,
    pub diff_eps: f64,
    pub diff_range: f64,
}

impl Default for ChirpIntegralCfg {
    fn default() -> Self {
        ChirpIntegralCfg {
            eval_point: 100.0,
            limit_tol: 0.01,
            tail_points: vec![10.0, 20.0, 50.0, 100.0, 200.0],
            tail_coeff: 0.8,
            sweep_hi: 1000.0,
            // The spiral overshoots its limit on the first turn: the modulus
            // peaks near 1.19 around t ≈ 1.5 before settling at 0.886.
            sweep_bound: 1.25,
            diff_eps: 0.5,
            diff_range: 200.0,
        }
    }
}

/// Central experiment configuration. Every tolerance and threshold used by
/// the registry lives here with its default.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabConfig {
    pub tau_step: f64,
    pub gap_policy: GapPolicy,
    pub hierarchy: HierarchyCfg,
    pub nonlinearity: NonlinearityCfg,
    pub lacunary: LacunaryCfg,
    pub bbak: BbakCfg,
    pub difference: DifferenceCfg,
    pub bohr: BohrCfg,
    pub esclangon: EsclangonCfg,
    pub halfline: HalflineCfg,
    pub chirp_integral: ChirpIntegralCfg,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            tau_step: crate::defaults::TAU_STEP,
            gap_policy: GapPolicy::default(),
            hierarchy: HierarchyCfg::default(),
            nonlinearity: NonlinearityCfg::default(),
            lacunary: LacunaryCfg::default(),
            bbak: BbakCfg::default(),
            difference: DifferenceCfg::default(),
            bohr: BohrCfg::default(),
            esclangon: EsclangonCfg::default(),
            halfline: HalflineCfg::default(),
            chirp_integral: ChirpIntegralCfg::default(),
        }
    }
}

/// Runs one experiment by registry name.
pub fn run_experiment(name: &str, cfg: &LabConfig) -> Result<Report, LabError> {
    match name {
        "hierarchy" => experiments::run_hierarchy(cfg),
        "nonlinearity" => experiments::run_nonlinearity(cfg),
        "lacunary" => experiments::run_lacunary(cfg),
        "bbak" => experiments::run_bbak(cfg),
        "difference" => experiments::run_difference(cfg),
        "bohr_neugebauer" => experiments::run_bohr_neugebauer(cfg),
        "esclangon" => experiments::run_esclangon(cfg),
        "halfline" => experiments::run_halfline(cfg),
        "chirp_integral" => experiments::run_chirp_integral(cfg),
        other => Err(LabError::Unknown(other.to_string())),
    }
}

/// Runs the whole registry in order.
pub fn run_all(cfg: &LabConfig) -> Result<Vec<Report>, LabError> {
    EXPERIMENT_NAMES
        .iter()
        .map(|name| run_experiment(name, cfg))
        .collect()
}
