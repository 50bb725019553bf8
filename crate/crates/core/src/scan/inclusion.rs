//! Inclusion checks relating almost-period sets of a signal, its differences
//! and its indefinite integral.

use crate::error::ScanError;
use crate::signal::Signal;
use crate::value::sup_dist;
use crate::window::{lattice_span, ProbeWindow};

use super::{almost_period_set, ScanOptions};

/// Result of checking that a scanned almost-period set is contained in a
/// target set.
#[derive(Clone, Debug)]
pub struct InclusionCheck {
    /// Shifts taken from the source set.
    pub scanned_members: usize,
    /// Violating shifts with their measured sup distance.
    pub violations: Vec<(f64, f64)>,
    pub holds: bool,
    pub source_eps: f64,
    pub target_eps: f64,
}

/// Verifies, member by member, that every scanned `1/m`-almost-period of `g`
/// on `[−m, m]` (with `m = n + ⌊h⌋ + 1`) is a `1/n`-almost-period of the
/// moving integral `Δ_h P g` on `[−n, n]`, up to `grid_tol`.
///
/// The containment follows from integrating the period inequality; this runs
/// it as a concrete scan and reports the first violator if any.
pub fn moving_integral_period_inclusion(
    g: &Signal,
    h: f64,
    n: u32,
    scan_range: (f64, f64),
    grid_tol: f64,
    opts: &ScanOptions,
) -> Result<InclusionCheck, ScanError> {
    if n == 0 {
        return Err(ScanError::BadEps(0.0));
    }
    let m = n as f64 + h.abs().floor() + 1.0;
    let source_eps = 1.0 / m;
    let target_eps = 1.0 / n as f64;

    // Grid members only, so every checked shift stays on the shared lattice
    // and the moving integral can be tabulated once.
    let grid_opts = ScanOptions { refine: false, ..opts.clone() };
    let source = almost_period_set(
        g,
        source_eps,
        &ProbeWindow::symmetric(m),
        scan_range,
        &grid_opts,
    )?;

    let moving = g.indefinite_integral(0.0).difference(h)?;
    let step = grid_opts.tau_step;
    let dim = moving.dim();
    let (jmin, jmax) = lattice_span(-(n as f64), n as f64, step);
    let span_hi = jmax + (scan_range.1 / step + crate::defaults::LATTICE_EPS).floor() as i64;
    let count = (span_hi - jmin + 1) as usize;
    let table = moving.eval_grid(jmin as f64 * step, step, count);
    let at = |idx: i64| -> &[crate::value::C64] {
        let off = (idx - jmin) as usize * dim;
        &table[off..off + dim]
    };

    let mut violations = Vec::new();
    for &tau in &source.members {
        let k = (tau / step).round() as i64;
        let mut worst = 0.0f64;
        for j in jmin..=jmax {
            worst = worst.max(sup_dist(at(j + k), at(j)));
        }
        if worst > target_eps + grid_tol {
            violations.push((tau, worst));
        }
    }
    Ok(InclusionCheck {
        scanned_members: source.members.len(),
        holds: violations.is_empty(),
        violations,
        source_eps,
        target_eps,
    })
}

/// One δ row of a cover search.
#[derive(Clone, Debug)]
pub struct CoverRow {
    pub delta: f64,
    pub intersection_size: usize,
    pub violations: usize,
}

/// Result of a difference-cover search.
#[derive(Clone, Debug)]
pub struct CoverSearch {
    /// Largest δ in the grid for which every scanned shift in the
    /// intersection of the difference sets is an ε-almost-period of `f`.
    pub passing_delta: Option<f64>,
    pub widened_window: ProbeWindow,
    pub rows: Vec<CoverRow>,
}

/// Searches the δ grid for the largest δ such that
/// `∩_j E(Δ_{s_j} f, δ, K_*) ⊆ E(f, ε, K)` on the scanned range, where `K_*`
/// is `K` widened by the largest shift magnitude.
pub fn difference_cover_search(
    f: &Signal,
    eps: f64,
    window: &ProbeWindow,
    shifts: &[f64],
    delta_grid: &[f64],
    range: (f64, f64),
    opts: &ScanOptions,
) -> Result<CoverSearch, ScanError> {
    if shifts.is_empty() {
        return Err(ScanError::EmptyProbes);
    }
    window.validate()?;
    let pad = shifts.iter().map(|s| s.abs()).fold(0.0, f64::max);
    let widened = window.widened(pad);

    // Grid membership must intersect exactly, so refinement is off here.
    let grid_opts = ScanOptions { refine: false, ..opts.clone() };

    let diffs: Vec<Signal> = shifts
        .iter()
        .map(|&s| f.difference(s))
        .collect::<Result<_, _>>()?;

    let t_points = window.samples();
    let base: Vec<_> = t_points.iter().map(|&t| f.eval(t)).collect();
    let check_f = |tau: f64| -> bool {
        let mut worst = 0.0f64;
        for (idx, &t) in t_points.iter().enumerate() {
            worst = worst.max(sup_dist(&f.eval(t + tau), &base[idx]));
            if worst > eps + 1e-12 {
                return false;
            }
        }
        true
    };

    let mut deltas: Vec<f64> = delta_grid.to_vec();
    deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut rows = Vec::new();
    let mut passing = None;
    for &delta in &deltas {
        let mut intersection: Option<Vec<i64>> = None;
        for d in &diffs {
            let set = almost_period_set(d, delta, &widened, range, &grid_opts)?;
            let indices: Vec<i64> = set
                .members
                .iter()
                .map(|&tau| (tau / grid_opts.tau_step).round() as i64)
                .collect();
            intersection = Some(match intersection {
                None => indices,
                Some(prev) => prev
                    .iter()
                    .copied()
                    .filter(|k| indices.binary_search(k).is_ok())
                    .collect(),
            });
        }
        let members = intersection.unwrap_or_default();
        let violations = members
            .iter()
            .filter(|&&k| !check_f(k as f64 * grid_opts.tau_step))
            .count();
        if violations == 0 {
            passing = Some(delta);
        }
        rows.push(CoverRow {
            delta,
            intersection_size: members.len(),
            violations,
        });
    }
    Ok(CoverSearch { passing_delta: passing, widened_window: widened, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::C64;

    #[test]
    fn sine_moving_integral_inclusion_holds() {
        // Exact for shifts in 2πℤ; the scan confirms no violator appears.
        let check = moving_integral_period_inclusion(
            &Signal::sin(),
            1.0,
            3,
            (0.0, 60.0),
            0.05,
            &ScanOptions::default(),
        )
        .unwrap();
        assert!(check.scanned_members > 0);
        assert!(check.holds, "violations: {:?}", check.violations);
    }

    #[test]
    fn constant_inclusion_trivially_holds() {
        let c = Signal::constant_scalar(C64::new(1.5, -0.5));
        let check = moving_integral_period_inclusion(
            &c,
            1.0,
            2,
            (0.0, 20.0),
            0.01,
            &ScanOptions::default(),
        )
        .unwrap();
        assert!(check.holds);
        // Every scanned shift is a period of a constant.
        assert!(check.scanned_members > 1000);
    }

    #[test]
    fn quasiperiodic_inclusion_holds() {
        let f = Signal::sin()
            .add(&Signal::trig_poly(vec![
                (C64::new(0.0, -0.5), 2f64.sqrt()),
                (C64::new(0.0, 0.5), -(2f64.sqrt())),
            ]))
            .unwrap();
        let check = moving_integral_period_inclusion(
            &f,
            0.5,
            2,
            (0.0, 120.0),
            0.05,
            &ScanOptions::default(),
        )
        .unwrap();
        assert!(check.holds, "violations: {:?}", check.violations);
    }

    #[test]
    fn cover_search_on_sine_passes_at_expected_delta() {
        // Δ_π sin = −2 sin, so the δ-set equals E(sin, δ/2, ·): δ = 0.4
        // reproduces E(sin, 0.2) on the widened window, which is contained in
        // E(sin, 0.2, K). δ = 0.8 admits shifts that fail ε = 0.2.
        let search = difference_cover_search(
            &Signal::sin(),
            0.2,
            &ProbeWindow::symmetric(3.0),
            &[std::f64::consts::PI],
            &[0.1, 0.2, 0.4, 0.8],
            (0.0, 80.0),
            &ScanOptions::default(),
        )
        .unwrap();
        assert_eq!(search.passing_delta, Some(0.4), "rows: {:?}", search.rows);
        let row08 = search.rows.iter().find(|r| r.delta == 0.8).unwrap();
        assert!(row08.violations > 0);
    }

    #[test]
    fn cover_search_on_quasi_periodic_finds_positive_delta() {
        let f = Signal::sin()
            .add(&Signal::trig_poly(vec![
                (C64::new(0.0, -0.5), 2f64.sqrt()),
                (C64::new(0.0, 0.5), -(2f64.sqrt())),
            ]))
            .unwrap();
        let search = difference_cover_search(
            &f,
            0.3,
            &ProbeWindow::symmetric(2.0),
            &[1.0, 2f64.sqrt()],
            &[0.05, 0.1, 0.2],
            (0.0, 200.0),
            &ScanOptions::default(),
        )
        .unwrap();
        assert!(search.passing_delta.is_some(), "rows: {:?}", search.rows);
    }

    #[test]
    fn cover_search_on_constant_passes_everywhere() {
        let c = Signal::constant_scalar(C64::new(2.0, 0.0));
        let search = difference_cover_search(
            &c,
            0.1,
            &ProbeWindow::symmetric(2.0),
            &[1.0],
            &[0.5, 1.0],
            (0.0, 30.0),
            &ScanOptions::default(),
        )
        .unwrap();
        assert_eq!(search.passing_delta, Some(1.0));
        for row in &search.rows {
            assert!(row.intersection_size > 0);
            assert_eq!(row.violations, 0);
        }
    }
}
