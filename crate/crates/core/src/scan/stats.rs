//! Range and regularity statistics: ergodic means, greedy range nets, and
//! sampled uniform-continuity moduli.

use crate::error::ScanError;
use crate::signal::Signal;
use crate::value::{scale, sub, sup_dist, zeros, Value, C64};
use crate::window::ProbeWindow;

/// Ergodic-mean estimate along a T ladder.
#[derive(Clone, Debug)]
pub struct ErgodicReport {
    /// Mean estimate: the window average at the largest T, averaged over the
    /// probe offsets.
    pub mean: Value,
    /// `(T, sup_x ‖(1/2T) ∫_{−T}^{T} f(t+x) dt − mean‖)` per ladder entry.
    pub deviations: Vec<(f64, f64)>,
    /// True when the deviations decrease along the ladder and the final one
    /// is below the tolerance.
    pub empirically_ergodic: bool,
}

/// Estimates the ergodic mean of `f`: window averages `(1/2T) ∫_{−T}^{T}
/// f(t+x) dt` are computed through the cumulative integral for every probe
/// offset `x` and ladder entry `T`.
pub fn ergodic_mean(
    f: &Signal,
    t_ladder: &[f64],
    probes: &[f64],
    tolerance: f64,
) -> Result<ErgodicReport, ScanError> {
    if t_ladder.is_empty() || probes.is_empty() {
        return Err(ScanError::EmptyProbes);
    }
    if t_ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ScanError::BadWindow("T ladder must be strictly increasing".into()));
    }
    let p = f.indefinite_integral(0.0);
    let window_avg = |t_half: f64, x: f64| -> Value {
        let upper = p.eval(x + t_half);
        let lower = p.eval(x - t_half);
        scale(C64::new(1.0 / (2.0 * t_half), 0.0), &sub(&upper, &lower))
    };

    let t_max = *t_ladder.last().unwrap();
    let mut mean = zeros(f.dim());
    for &x in probes {
        let avg = window_avg(t_max, x);
        for (m, v) in mean.iter_mut().zip(&avg) {
            *m += v;
        }
    }
    let inv = C64::new(1.0 / probes.len() as f64, 0.0);
    let mean: Value = mean.iter().map(|v| inv * v).collect();

    let mut deviations = Vec::with_capacity(t_ladder.len());
    for &t_half in t_ladder {
        let dev = probes
            .iter()
            .map(|&x| sup_dist(&window_avg(t_half, x), &mean))
            .fold(0.0, f64::max);
        deviations.push((t_half, dev));
    }
    let decreasing = deviations.windows(2).all(|w| w[1].1 <= w[0].1 + tolerance);
    let empirically_ergodic = decreasing && deviations.last().unwrap().1 <= tolerance;
    Ok(ErgodicReport { mean, deviations, empirically_ergodic })
}

/// Size of a greedy ε-net of the sampled range of `f` over the window:
/// samples are taken in order and kept when farther than ε from every kept
/// value. Monotone non-increasing in ε.
pub fn range_net(f: &Signal, window: &ProbeWindow, eps: f64) -> Result<usize, ScanError> {
    if !(eps > 0.0) {
        return Err(ScanError::BadEps(eps));
    }
    window.validate()?;
    let mut centers: Vec<Value> = Vec::new();
    for &t in &window.samples() {
        let v = f.eval(t);
        if centers.iter().all(|c| sup_dist(c, &v) > eps) {
            centers.push(v);
        }
    }
    Ok(centers.len())
}

/// Sampled uniform-continuity modulus: for each δ in the grid,
/// `sup { ‖f(t+s) − f(t)‖ : t ∈ K samples, |s| ≤ δ }` with `s` on the window
/// lattice. The returned table is monotone non-decreasing by construction.
pub fn uc_modulus(
    f: &Signal,
    window: &ProbeWindow,
    deltas: &[f64],
) -> Result<Vec<(f64, f64)>, ScanError> {
    window.validate()?;
    let step = window
        .sample_step()
        .ok_or_else(|| ScanError::BadWindow("uc modulus needs an interval window".into()))?;
    let mut deltas: Vec<f64> = deltas.to_vec();
    deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if deltas.iter().any(|d| *d < 0.0) {
        return Err(ScanError::BadWindow("negative δ in modulus grid".into()));
    }
    let points = window.samples();
    let base: Vec<Value> = points.iter().map(|&t| f.eval(t)).collect();

    let mut table = Vec::with_capacity(deltas.len());
    let mut running = 0.0f64;
    let mut shift = 1i64;
    for &delta in &deltas {
        let max_shift = (delta / step + crate::defaults::LATTICE_EPS).floor() as i64;
        while shift <= max_shift {
            let s = shift as f64 * step;
            for (idx, &t) in points.iter().enumerate() {
                running = running.max(sup_dist(&f.eval(t + s), &base[idx]));
                running = running.max(sup_dist(&f.eval(t - s), &base[idx]));
            }
            shift += 1;
        }
        table.push((delta, running));
    }
    Ok(table)
}
