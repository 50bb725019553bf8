//! Recurrence ladders: escalating (ε, K, range) schedules producing an
//! empirical verdict.
//!
//! A finite scan can never certify recurrence; the ladder only reports that
//! the observed gap bounds stayed small relative to the scanned ranges. The
//! verdict strings say so explicitly.

use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::ScanError;
use crate::signal::Signal;
use crate::window::ProbeWindow;

use super::{almost_period_set, ScanOptions};

/// Pass rule for a rung: the measured gap bound must stay below
/// `fraction · range length`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GapPolicy {
    pub fraction: f64,
    /// Cap applied to ladder-generated scan ranges.
    pub range_cap: f64,
}

impl Default for GapPolicy {
    fn default() -> Self {
        GapPolicy { fraction: defaults::GAP_FRACTION, range_cap: defaults::SCAN_RANGE_CAP }
    }
}

/// One rung of a ladder schedule.
#[derive(Clone, Debug)]
pub struct Rung {
    pub eps: f64,
    pub window: ProbeWindow,
    pub range: (f64, f64),
}

/// The default escalating schedule: rung n scans ε = 2^−n over K = [−2n, 2n]
/// with range [0, min(200·4^n, cap)].
pub fn default_rungs(n_max: usize, policy: &GapPolicy) -> Vec<Rung> {
    (1..=n_max)
        .map(|n| Rung {
            eps: 0.5f64.powi(n as i32),
            window: ProbeWindow::symmetric(2.0 * n as f64),
            range: (0.0, (200.0 * 4f64.powi(n as i32)).min(policy.range_cap)),
        })
        .collect()
}

/// Per-rung scan summary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RungResult {
    pub eps: f64,
    pub window: String,
    pub range_end: f64,
    pub member_count: usize,
    pub max_gap: f64,
    pub gap_bound: f64,
    pub passed: bool,
}

/// Ladder outcome; rung indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LadderOutcome {
    EmpiricallyRecurrent,
    RejectedAtRung(usize),
}

/// Outcome of a recurrence ladder: the per-rung gap table is the certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LadderVerdict {
    pub rungs: Vec<RungResult>,
    pub outcome: LadderOutcome,
    pub summary: String,
}

impl LadderVerdict {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, LadderOutcome::EmpiricallyRecurrent)
    }
}

/// Runs an explicit rung schedule, stopping at the first failing rung.
pub fn run_ladder(
    f: &Signal,
    rungs: &[Rung],
    policy: &GapPolicy,
    opts: &ScanOptions,
) -> Result<LadderVerdict, ScanError> {
    let mut results = Vec::with_capacity(rungs.len());
    for (idx, rung) in rungs.iter().enumerate() {
        let set = almost_period_set(f, rung.eps, &rung.window, rung.range, opts)?;
        let bound = policy.fraction * (rung.range.1 - rung.range.0);
        let passed = set.max_gap <= bound;
        results.push(RungResult {
            eps: rung.eps,
            window: rung.window.describe(),
            range_end: rung.range.1,
            member_count: set.members.len(),
            max_gap: set.max_gap,
            gap_bound: bound,
            passed,
        });
        if !passed {
            let summary = format!(
                "rejected at rung {} (gap {:.4} > bound {:.4} on range {:.0})",
                idx + 1,
                set.max_gap,
                bound,
                rung.range.1
            );
            return Ok(LadderVerdict {
                rungs: results,
                outcome: LadderOutcome::RejectedAtRung(idx + 1),
                summary,
            });
        }
    }
    let max_range = rungs.iter().map(|r| r.range.1).fold(0.0, f64::max);
    let summary = format!(
        "empirically recurrent (up to rung {}, range {:.0})",
        rungs.len(),
        max_range
    );
    Ok(LadderVerdict {
        rungs: results,
        outcome: LadderOutcome::EmpiricallyRecurrent,
        summary,
    })
}

/// Runs the default schedule up to `n_max` rungs.
pub fn recurrence_ladder(
    f: &Signal,
    n_max: usize,
    policy: &GapPolicy,
    opts: &ScanOptions,
) -> Result<LadderVerdict, ScanError> {
    run_ladder(f, &default_rungs(n_max, policy), policy, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::AaBranch;

    #[test]
    fn sine_passes_every_rung() {
        let v = recurrence_ladder(
            &Signal::sin(),
            2,
            &GapPolicy::default(),
            &ScanOptions::default(),
        )
        .unwrap();
        assert!(v.passed(), "{}", v.summary);
        for rung in &v.rungs {
            assert!(rung.max_gap <= 2.0 * std::f64::consts::PI + 0.1);
        }
    }

    #[test]
    fn chirp_rejected_at_first_rung() {
        let v = recurrence_ladder(
            &Signal::chirp(),
            2,
            &GapPolicy::default(),
            &ScanOptions::default(),
        )
        .unwrap();
        assert_eq!(v.outcome, LadderOutcome::RejectedAtRung(1), "{}", v.summary);
        assert_eq!(v.rungs.len(), 1);
    }

    #[test]
    fn aa_extension_passes_low_rungs() {
        let v = recurrence_ladder(
            &Signal::aa_step(AaBranch::Phi),
            2,
            &GapPolicy::default(),
            &ScanOptions::default(),
        )
        .unwrap();
        assert!(v.passed(), "{}", v.summary);
    }
}
