//! Compact scan windows.
//!
//! Interval windows are sampled on a global lattice `{ j · step : j ∈ ℤ }`
//! rather than anchored at the left endpoint. Nested windows then sample
//! nested point sets, which makes monotonicity statements about sampled sups
//! exact rather than approximate.

use serde::{Deserialize, Serialize};

use crate::defaults::LATTICE_EPS;
use crate::error::ScanError;

/// A compact window `K`: an interval with a sampling grid or a finite probe
/// set (discrete-topology semantics, no neighbourhood around the probes).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeWindow {
    Interval { lo: f64, hi: f64, sample_step: f64 },
    Probes { points: Vec<f64> },
}

impl ProbeWindow {
    /// Symmetric interval `[−t, t]` with the default sample step.
    pub fn symmetric(t: f64) -> ProbeWindow {
        ProbeWindow::Interval { lo: -t, hi: t, sample_step: crate::defaults::WINDOW_STEP }
    }

    /// Interval `[lo, hi]` with the default sample step.
    pub fn interval(lo: f64, hi: f64) -> ProbeWindow {
        ProbeWindow::Interval { lo, hi, sample_step: crate::defaults::WINDOW_STEP }
    }

    /// Finite probe set; must be non-empty and strictly ascending.
    pub fn probes(points: Vec<f64>) -> Result<ProbeWindow, ScanError> {
        if points.is_empty() {
            return Err(ScanError::EmptyProbes);
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ScanError::BadWindow("probe points must be strictly ascending".into()));
        }
        Ok(ProbeWindow::Probes { points })
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        match self {
            ProbeWindow::Interval { lo, hi, sample_step } => {
                if !(lo < hi) {
                    return Err(ScanError::BadWindow(format!("empty interval [{lo}, {hi}]")));
                }
                if !(*sample_step > 0.0) {
                    return Err(ScanError::BadStep(*sample_step));
                }
                Ok(())
            }
            ProbeWindow::Probes { points } => {
                if points.is_empty() {
                    return Err(ScanError::EmptyProbes);
                }
                if points.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ScanError::BadWindow("probe points must be strictly ascending".into()));
                }
                Ok(())
            }
        }
    }

    /// Widens an interval window by `pad` on both sides; probe windows are
    /// returned unchanged.
    pub fn widened(&self, pad: f64) -> ProbeWindow {
        match self {
            ProbeWindow::Interval { lo, hi, sample_step } => ProbeWindow::Interval {
                lo: lo - pad,
                hi: hi + pad,
                sample_step: *sample_step,
            },
            p => p.clone(),
        }
    }

    /// Sample points of the window.
    pub fn samples(&self) -> Vec<f64> {
        match self {
            ProbeWindow::Interval { lo, hi, sample_step } => {
                let (jmin, jmax) = lattice_span(*lo, *hi, *sample_step);
                (jmin..=jmax).map(|j| j as f64 * sample_step).collect()
            }
            ProbeWindow::Probes { points } => points.clone(),
        }
    }

    pub fn sample_step(&self) -> Option<f64> {
        match self {
            ProbeWindow::Interval { sample_step, .. } => Some(*sample_step),
            ProbeWindow::Probes { .. } => None,
        }
    }

    /// Lattice index span for interval windows.
    pub fn lattice_span(&self) -> Option<(i64, i64)> {
        match self {
            ProbeWindow::Interval { lo, hi, sample_step } => {
                Some(lattice_span(*lo, *hi, *sample_step))
            }
            ProbeWindow::Probes { .. } => None,
        }
    }

    /// Short human-readable description used in reports.
    pub fn describe(&self) -> String {
        match self {
            ProbeWindow::Interval { lo, hi, .. } => format!("[{lo}, {hi}]"),
            ProbeWindow::Probes { points } => format!("probes({points:?})"),
        }
    }
}

/// Index span of the global lattice `j · step` inside `[lo, hi]`, with a
/// small relative slack so endpoints that are lattice points up to rounding
/// are included.
pub fn lattice_span(lo: f64, hi: f64, step: f64) -> (i64, i64) {
    let jmin = (lo / step - LATTICE_EPS).ceil() as i64;
    let jmax = (hi / step + LATTICE_EPS).floor() as i64;
    (jmin, jmax)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_includes_rounded_endpoints() {
        let (jmin, jmax) = lattice_span(-1.0, 1.0, 0.01);
        assert_eq!((jmin, jmax), (-100, 100));
        let (jmin, jmax) = lattice_span(0.0, 20.0, 0.01);
        assert_eq!((jmin, jmax), (0, 2000));
    }

    #[test]
    fn nested_windows_sample_nested_lattices() {
        let inner = ProbeWindow::interval(-2.0, 2.0).samples();
        let outer = ProbeWindow::interval(-5.0, 5.0).samples();
        for t in &inner {
            assert!(outer.iter().any(|s| s == t));
        }
    }

    #[test]
    fn probes_must_ascend() {
        assert!(ProbeWindow::probes(vec![0.0, 1.0, 1.0]).is_err());
        assert!(ProbeWindow::probes(vec![]).is_err());
        assert!(ProbeWindow::probes(vec![0.0, 1.0, 2.0f64.sqrt() + 1.0]).is_ok());
    }
}
