//! The ε-almost-period scan engine.
//!
//! An almost-period scan walks a τ grid over the scan range and accepts the
//! shifts whose sampled sup distance over the window stays within ε. Interval
//! windows and the τ grid share one global lattice, so the shifted samples
//! land back on lattice points; scans then reduce to comparisons inside a
//! value table, and grid membership is independent of worker count by
//! construction. Near misses, the local minima of the sup profile just above
//! ε, are polished by golden-section refinement so that isolated almost-periods
//! (a period of `sin` under ε = 1e−6, say) are found even though no grid
//! point passes.

pub mod inclusion;
pub mod ladder;
pub mod stats;

pub use inclusion::{difference_cover_search, moving_integral_period_inclusion, CoverSearch, InclusionCheck};
pub use ladder::{default_rungs, recurrence_ladder, run_ladder, GapPolicy, LadderOutcome, LadderVerdict, Rung, RungResult};
pub use stats::{ergodic_mean, range_net, uc_modulus, ErgodicReport};

use rayon::prelude::*;

use crate::defaults;
use crate::error::ScanError;
use crate::signal::Signal;
use crate::value::{sup_dist, sup_dist_sqr, Value, C64};
use crate::window::{lattice_span, ProbeWindow};

/// Options shared by all scans.
#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// τ grid step.
    pub tau_step: f64,
    /// Polish near-miss local minima by golden-section refinement.
    pub refine: bool,
    /// Extra acceptance slack for refinement candidates; `None` estimates it
    /// from the local Lipschitz scale of the signal on the window.
    pub refine_slack: Option<f64>,
    /// Value tables larger than this many complex entries fall back to
    /// direct evaluation.
    pub tabulate_limit: usize,
    /// Inflate the sampled sup by the sampled uniform-continuity modulus at
    /// the grid step, making acceptance a conservative certificate.
    pub strict_certificate: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            tau_step: defaults::TAU_STEP,
            refine: true,
            refine_slack: None,
            tabulate_limit: defaults::TABULATE_LIMIT,
            strict_certificate: false,
        }
    }
}

impl ScanOptions {
    /// Options suited to finite probe windows: no refinement, since sup
    /// profiles over probe sets oscillate too quickly for local minima to
    /// mean anything.
    pub fn discrete() -> Self {
        ScanOptions { refine: false, ..ScanOptions::default() }
    }
}

/// Result of an almost-period scan: the accepted shifts plus gap statistics.
#[derive(Clone, Debug)]
pub struct AlmostPeriodSet {
    pub eps: f64,
    pub window: ProbeWindow,
    pub range: (f64, f64),
    pub step: f64,
    /// Accepted shifts, strictly ascending.
    pub members: Vec<f64>,
    /// Largest distance between consecutive members including the boundary
    /// gaps to the range ends; `+∞` when no shift was accepted.
    pub max_gap: f64,
    /// Whether any member was inserted by local refinement.
    pub refined: bool,
}

impl AlmostPeriodSet {
    /// Recomputes the gap bound from the member list; used by consistency
    /// checks.
    pub fn recompute_max_gap(&self) -> f64 {
        max_gap_of(&self.members, self.range)
    }
}

/// Largest length an interval inside the scan range can have without meeting
/// the member set. `+∞` sentinel when the set is empty.
pub fn max_gap_of(members: &[f64], range: (f64, f64)) -> f64 {
    match (members.first(), members.last()) {
        (Some(&first), Some(&last)) => {
            let mut gap = (first - range.0).max(range.1 - last);
            for w in members.windows(2) {
                gap = gap.max(w[1] - w[0]);
            }
            gap
        }
        _ => f64::INFINITY,
    }
}

/// Sampled sup distance `max_{t ∈ K} ‖f(t) − g(t)‖` over the window samples.
pub fn sup_distance(f: &Signal, g: &Signal, window: &ProbeWindow) -> Result<f64, ScanError> {
    if f.dim() != g.dim() {
        return Err(ScanError::DimMismatch { left: f.dim(), right: g.dim() });
    }
    window.validate()?;
    Ok(window
        .samples()
        .iter()
        .map(|&t| sup_dist(&f.eval(t), &g.eval(t)))
        .fold(0.0, f64::max))
}

/// Stacks signals into a tuple signal whose almost-period sets are exactly
/// the intersections of the component sets (sup norm over the stacked
/// components).
pub fn joint_tuple(signals: Vec<Signal>) -> Result<Signal, ScanError> {
    Ok(Signal::stack(signals)?)
}

/// Scans the ε-almost-period set of `f` over `range` against the window.
pub fn almost_period_set(
    f: &Signal,
    eps: f64,
    window: &ProbeWindow,
    range: (f64, f64),
    opts: &ScanOptions,
) -> Result<AlmostPeriodSet, ScanError> {
    if !(eps > 0.0) {
        return Err(ScanError::BadEps(eps));
    }
    if !(range.0 < range.1) {
        return Err(ScanError::EmptyRange(range.0, range.1));
    }
    if !(opts.tau_step > 0.0) {
        return Err(ScanError::BadStep(opts.tau_step));
    }
    window.validate()?;

    match window {
        ProbeWindow::Interval { sample_step, .. } => {
            let shared = (sample_step - opts.tau_step).abs() < 1e-12 * opts.tau_step;
            if shared {
                scan_lattice(f, eps, window, range, opts)
            } else {
                let points = window.samples();
                scan_points(f, eps, window, &points, range, opts)
            }
        }
        ProbeWindow::Probes { points } => scan_points(f, eps, window, points, range, opts),
    }
}

/// Probe-set scan: identical acceptance rule, but the window is the finite
/// probe set itself, with no neighbourhood fattening around the probes.
pub fn discrete_period_scan(
    f: &Signal,
    eps: f64,
    probes: &[f64],
    range: (f64, f64),
    opts: &ScanOptions,
) -> Result<AlmostPeriodSet, ScanError> {
    let window = ProbeWindow::probes(probes.to_vec())?;
    almost_period_set(f, eps, &window, range, opts)
}

/// Full per-τ sup profile without early exit: `(τ, sup, accepted)` rows for
/// report tables and CSV output.
pub fn scan_profile(
    f: &Signal,
    eps: f64,
    window: &ProbeWindow,
    range: (f64, f64),
    tau_step: f64,
) -> Result<Vec<(f64, f64, bool)>, ScanError> {
    if !(tau_step > 0.0) {
        return Err(ScanError::BadStep(tau_step));
    }
    window.validate()?;
    let points = window.samples();
    let t_side: Vec<Value> = points.iter().map(|&t| f.eval(t)).collect();
    let (kmin, kmax) = lattice_span(range.0, range.1, tau_step);
    let ks: Vec<i64> = (kmin..=kmax).collect();
    Ok(ks
        .par_iter()
        .map(|&k| {
            let tau = k as f64 * tau_step;
            let mut worst = 0.0f64;
            for (idx, &t) in points.iter().enumerate() {
                let shifted = f.eval(t + tau);
                worst = worst.max(sup_dist_sqr(&shifted, &t_side[idx]));
            }
            let sup = worst.sqrt();
            (tau, sup, sup <= eps)
        })
        .collect())
}

#[derive(Clone, Copy, Debug)]
enum Outcome {
    /// Early-exited above the candidate cap.
    Far,
    /// Exact squared sup in `(ε², cap²]`.
    Near(f64),
    /// Accepted on the grid with exact squared sup.
    Member(f64),
}

/// Lattice scan over an interval window whose sample step equals the τ step.
fn scan_lattice(
    f: &Signal,
    eps: f64,
    window: &ProbeWindow,
    range: (f64, f64),
    opts: &ScanOptions,
) -> Result<AlmostPeriodSet, ScanError> {
    let h = opts.tau_step;
    let dim = f.dim();
    let (jmin, jmax) = window.lattice_span().expect("interval window");
    let (kmin, kmax) = lattice_span(range.0, range.1, h);
    if kmin > kmax {
        return Err(ScanError::EmptyRange(range.0, range.1));
    }

    let base = jmin.min(jmin + kmin);
    let top = jmax.max(jmax + kmax);
    let span = (top - base + 1) as usize;
    let table: Option<Vec<C64>> =
        (span * dim <= opts.tabulate_limit).then(|| f.eval_grid(base as f64 * h, h, span));

    let fetch = |idx: i64| -> Value {
        match &table {
            Some(data) => {
                let off = (idx - base) as usize * dim;
                data[off..off + dim].iter().copied().collect()
            }
            None => f.eval(idx as f64 * h),
        }
    };

    // t-side values of the window, cached once.
    let t_side: Vec<Value> = (jmin..=jmax).map(fetch).collect();
    let win_len = t_side.len();

    let eps_eff = effective_eps(f, eps, window, opts)?;
    let slack = opts.refine_slack.unwrap_or_else(|| {
        let lip = t_side
            .windows(2)
            .map(|w| sup_dist(&w[0], &w[1]))
            .fold(0.0, f64::max);
        lip.max(1e-12)
    });
    let cap = if opts.refine { eps_eff + slack } else { eps_eff };
    let cap2 = cap * cap;
    let eps2 = eps_eff * eps_eff;

    let ks: Vec<i64> = (kmin..=kmax).collect();
    let outcomes: Vec<Outcome> = match &table {
        Some(data) => {
            let win_off = (jmin - base) as usize * dim;
            ks.par_iter()
                .map(|&k| {
                    let shift_off = (jmin - base + k) as usize * dim;
                    let mut worst = 0.0f64;
                    for pos in 0..win_len {
                        let a = win_off + pos * dim;
                        let b = shift_off + pos * dim;
                        let d2 = sup_dist_sqr(&data[a..a + dim], &data[b..b + dim]);
                        if d2 > cap2 {
                            return Outcome::Far;
                        }
                        worst = worst.max(d2);
                    }
                    if worst <= eps2 {
                        Outcome::Member(worst)
                    } else {
                        Outcome::Near(worst)
                    }
                })
                .collect()
        }
        None => ks
            .par_iter()
            .map(|&k| {
                let mut worst = 0.0f64;
                for (pos, side) in t_side.iter().enumerate() {
                    let shifted = f.eval((jmin + pos as i64 + k) as f64 * h);
                    let d2 = sup_dist_sqr(&shifted, side);
                    if d2 > cap2 {
                        return Outcome::Far;
                    }
                    worst = worst.max(d2);
                }
                if worst <= eps2 {
                    Outcome::Member(worst)
                } else {
                    Outcome::Near(worst)
                }
            })
            .collect(),
    };

    let grid_members: Vec<f64> = ks
        .iter()
        .zip(&outcomes)
        .filter_map(|(&k, o)| if matches!(o, Outcome::Member(_)) { Some(k as f64 * h) } else { None })
        .collect();

    let mut members = grid_members.clone();
    let mut refined = false;
    if opts.refine {
        let g_value = |o: &Outcome| match o {
            Outcome::Far => f64::INFINITY,
            Outcome::Near(v) | Outcome::Member(v) => *v,
        };
        let candidates: Vec<usize> = (0..outcomes.len())
            .filter(|&i| {
                let here = match outcomes[i] {
                    Outcome::Near(v) => v,
                    _ => return false,
                };
                let left = if i > 0 { g_value(&outcomes[i - 1]) } else { f64::INFINITY };
                let right = if i + 1 < outcomes.len() {
                    g_value(&outcomes[i + 1])
                } else {
                    f64::INFINITY
                };
                here <= left && here <= right
            })
            .collect();

        let t_points: Vec<f64> = (jmin..=jmax).map(|j| j as f64 * h).collect();
        // Refinement probes early-exit at the candidate cap and report a flat
        // sentinel above it, so polishing a dip never costs a full window
        // sweep on hopeless shifts.
        let sentinel = cap * (1.0 + 1e-7);
        let sup_at = |tau: f64| -> f64 {
            let mut worst = 0.0f64;
            for (idx, &t) in t_points.iter().enumerate() {
                let shifted = f.eval(t + tau);
                let d2 = sup_dist_sqr(&shifted, &t_side[idx]);
                if d2 > cap2 {
                    return sentinel;
                }
                worst = worst.max(d2);
            }
            worst.sqrt()
        };
        let polished: Vec<f64> = candidates
            .par_iter()
            .filter_map(|&i| {
                let tau = ks[i] as f64 * h;
                let lo = (tau - h).max(range.0);
                let hi = (tau + h).min(range.1);
                let (t_star, g_star) = golden_min(&sup_at, lo, hi, defaults::REFINE_ITERS);
                (g_star <= eps_eff).then_some(t_star)
            })
            .collect();
        for tau in polished {
            let near_existing = members
                .iter()
                .any(|&m| (m - tau).abs() < 0.5 * h);
            if !near_existing {
                members.push(tau);
                refined = true;
            }
        }
        members.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }

    let max_gap = max_gap_of(&members, range);
    Ok(AlmostPeriodSet {
        eps,
        window: window.clone(),
        range,
        step: h,
        members,
        max_gap,
        refined,
    })
}

/// Point-set scan: the window is an explicit list of sample points (finite
/// probes, or an interval whose sample step differs from the τ step).
fn scan_points(
    f: &Signal,
    eps: f64,
    window: &ProbeWindow,
    points: &[f64],
    range: (f64, f64),
    opts: &ScanOptions,
) -> Result<AlmostPeriodSet, ScanError> {
    let h = opts.tau_step;
    let (kmin, kmax) = lattice_span(range.0, range.1, h);
    if kmin > kmax {
        return Err(ScanError::EmptyRange(range.0, range.1));
    }
    let t_side: Vec<Value> = points.iter().map(|&t| f.eval(t)).collect();

    let eps_eff = effective_eps(f, eps, window, opts)?;
    let slack = opts.refine_slack.unwrap_or_else(|| {
        points
            .iter()
            .zip(&t_side)
            .map(|(&t, v)| sup_dist(&f.eval(t + h), v))
            .fold(0.0, f64::max)
            .max(1e-12)
    });
    let cap = if opts.refine { eps_eff + slack } else { eps_eff };
    let cap2 = cap * cap;
    let eps2 = eps_eff * eps_eff;

    let ks: Vec<i64> = (kmin..=kmax).collect();
    let outcomes: Vec<Outcome> = ks
        .par_iter()
        .map(|&k| {
            let tau = k as f64 * h;
            let mut worst = 0.0f64;
            for (idx, &t) in points.iter().enumerate() {
                let shifted = f.eval(t + tau);
                let d2 = sup_dist_sqr(&shifted, &t_side[idx]);
                if d2 > cap2 {
                    return Outcome::Far;
                }
                worst = worst.max(d2);
            }
            if worst <= eps2 {
                Outcome::Member(worst)
            } else {
                Outcome::Near(worst)
            }
        })
        .collect();

    let mut members: Vec<f64> = ks
        .iter()
        .zip(&outcomes)
        .filter_map(|(&k, o)| if matches!(o, Outcome::Member(_)) { Some(k as f64 * h) } else { None })
        .collect();
    let mut refined = false;

    if opts.refine {
        let g_value = |o: &Outcome| match o {
            Outcome::Far => f64::INFINITY,
            Outcome::Near(v) | Outcome::Member(v) => *v,
        };
        let candidates: Vec<usize> = (0..outcomes.len())
            .filter(|&i| {
                let here = match outcomes[i] {
                    Outcome::Near(v) => v,
                    _ => return false,
                };
                let left = if i > 0 { g_value(&outcomes[i - 1]) } else { f64::INFINITY };
                let right = if i + 1 < outcomes.len() {
                    g_value(&outcomes[i + 1])
                } else {
                    f64::INFINITY
                };
                here <= left && here <= right
            })
            .collect();
        let sentinel = cap * (1.0 + 1e-7);
        let sup_at = |tau: f64| -> f64 {
            let mut worst = 0.0f64;
            for (idx, &t) in points.iter().enumerate() {
                let shifted = f.eval(t + tau);
                let d2 = sup_dist_sqr(&shifted, &t_side[idx]);
                if d2 > cap2 {
                    return sentinel;
                }
                worst = worst.max(d2);
            }
            worst.sqrt()
        };
        let polished: Vec<f64> = candidates
            .par_iter()
            .filter_map(|&i| {
                let tau = ks[i] as f64 * h;
                let lo = (tau - h).max(range.0);
                let hi = (tau + h).min(range.1);
                let (t_star, g_star) = golden_min(&sup_at, lo, hi, defaults::REFINE_ITERS);
                (g_star <= eps_eff).then_some(t_star)
            })
            .collect();
        for tau in polished {
            let near_existing = members.iter().any(|&m| (m - tau).abs() < 0.5 * h);
            if !near_existing {
                members.push(tau);
                refined = true;
            }
        }
        members.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }

    let max_gap = max_gap_of(&members, range);
    Ok(AlmostPeriodSet {
        eps,
        window: window.clone(),
        range,
        step: h,
        members,
        max_gap,
        refined,
    })
}

/// Strict certificates shrink ε by the sampled uniform-continuity modulus at
/// the sample step, so grid acceptance implies the continuous criterion.
fn effective_eps(
    f: &Signal,
    eps: f64,
    window: &ProbeWindow,
    opts: &ScanOptions,
) -> Result<f64, ScanError> {
    if !opts.strict_certificate {
        return Ok(eps);
    }
    match window {
        ProbeWindow::Interval { sample_step, .. } => {
            let table = stats::uc_modulus(f, window, &[*sample_step])?;
            Ok((eps - table[0].1).max(0.0))
        }
        ProbeWindow::Probes { .. } => Ok(eps),
    }
}

/// Golden-section minimization over `[a, b]`; deterministic fixed iteration
/// count.
fn golden_min<F: Fn(f64) -> f64>(g: &F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..iters {
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INVPHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INVPHI * (b - a);
            gd = g(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, g(mid))
}

/// Locally uniform metric between signals, truncated at depth `n_max`:
/// the sup over `n ≤ n_max` of `min(1/n, sup_{|t| ≤ n} ‖f − g‖)`.
#[derive(Clone, Copy, Debug)]
pub struct MetricValue {
    pub value: f64,
    /// Depth achieving the sup.
    pub achieved_n: usize,
}

pub fn metric_d(f: &Signal, g: &Signal, n_max: usize) -> Result<MetricValue, ScanError> {
    if f.dim() != g.dim() {
        return Err(ScanError::DimMismatch { left: f.dim(), right: g.dim() });
    }
    let step = defaults::WINDOW_STEP;
    let mut best = MetricValue { value: 0.0, achieved_n: 1 };
    let mut running_sup = 0.0f64;
    let mut prev_j = 0i64;
    for n in 1..=n_max.max(1) {
        let (_, jmax) = lattice_span(-(n as f64), n as f64, step);
        // Only the new ring [prev, n] needs evaluating; sups are monotone.
        for j in prev_j..=jmax {
            for &t in &[j as f64 * step, -(j as f64) * step] {
                running_sup = running_sup.max(sup_dist(&f.eval(t), &g.eval(t)));
            }
        }
        prev_j = jmax + 1;
        let term = (1.0 / n as f64).min(running_sup);
        if term > best.value {
            best = MetricValue { value: term, achieved_n: n };
        }
    }
    Ok(best)
}

/// Scans the shifts whose locally uniform metric distance to the original
/// signal stays within ε: the return-set criterion phrased through
/// [`metric_d`] instead of a fixed window. Exact shortcut: the depth terms
/// `min(1/n, s_n)` peak where the running sup crosses `1/n`, so each shift
/// needs only the window depths up to that crossing.
pub fn metric_return_scan(
    f: &Signal,
    eps: f64,
    n_max: usize,
    range: (f64, f64),
    opts: &ScanOptions,
) -> Result<AlmostPeriodSet, ScanError> {
    if !(eps > 0.0) {
        return Err(ScanError::BadEps(eps));
    }
    if !(range.0 < range.1) {
        return Err(ScanError::EmptyRange(range.0, range.1));
    }
    let step = defaults::WINDOW_STEP;
    let h = opts.tau_step;
    let n_max = n_max.max(1);
    let (jmin, jmax) = lattice_span(-(n_max as f64), n_max as f64, step);
    let t_points: Vec<f64> = (jmin..=jmax).map(|j| j as f64 * step).collect();
    let base: Vec<Value> = t_points.iter().map(|&t| f.eval(t)).collect();
    let rings: Vec<i64> = (1..=n_max)
        .map(|n| lattice_span(-(n as f64), n as f64, step).1)
        .collect();

    let metric_of = |tau: f64| -> f64 {
        let mut best = 0.0f64;
        let mut running = 0.0f64;
        let mut j = 0i64;
        for (n, &jn) in rings.iter().enumerate() {
            let inv = 1.0 / (n + 1) as f64;
            while j <= jn {
                for signed in [j, -j] {
                    let t = signed as f64 * step;
                    let pos = (signed - jmin) as usize;
                    running = running.max(sup_dist(&f.eval(t + tau), &base[pos]));
                }
                j += 1;
            }
            if running >= inv {
                // Later terms are capped by strictly smaller 1/n.
                return best.max(inv);
            }
            best = best.max(running.min(inv));
        }
        best
    };

    let (kmin, kmax) = lattice_span(range.0, range.1, h);
    let ks: Vec<i64> = (kmin..=kmax).collect();
    let members: Vec<f64> = ks
        .par_iter()
        .filter_map(|&k| {
            let tau = k as f64 * h;
            (metric_of(tau) <= eps).then_some(tau)
        })
        .collect();
    let max_gap = max_gap_of(&members, range);
    Ok(AlmostPeriodSet {
        eps,
        window: ProbeWindow::symmetric(n_max as f64),
        range,
        step: h,
        members,
        max_gap,
        refined: false,
    })
}
