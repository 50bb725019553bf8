//! Adaptive quadrature and the checkpointed cumulative integral.
//!
//! Both running means and indefinite integrals are backed by adaptive
//! composite Simpson: the interval is cut into a fixed number of panels and
//! each panel is subdivided until the two-level error estimate drops below
//! its tolerance share. Panels split at the irrational ratio `2 − √2` rather
//! than in half: dyadic bisection can phase-lock on a fast oscillation (every
//! node lands on the same phase, so parent and child estimates agree on a
//! wrong value), while no level of an irrational subdivision can alias a
//! fixed frequency. The cumulative integral keeps a chain of checkpoints at
//! fixed spacing so that evaluating `∫_α^t` costs one local quadrature over
//! at most one spacing, independent of `t`.

use std::sync::RwLock;

use crate::value::{add, axpy, scale, sub, sup_norm, zeros, Value, C64};

/// Widest initial panel; short intervals start with fewer panels, unit-scale
/// intervals with four.
const PANEL_SCALE: f64 = 0.25;

/// Maximum subdivision depth per panel.
const MAX_DEPTH: u32 = 30;

/// Interior split ratio, `2 − √2`.
const SPLIT: f64 = 0.585_786_437_626_904_9;

/// Adaptive composite Simpson integral of a vector-valued function over
/// `[a, b]` with absolute tolerance `tol` (sup norm). `a > b` is allowed and
/// yields the negated integral.
pub fn integrate<F>(f: &F, a: f64, b: f64, tol: f64, dim: usize) -> Value
where
    F: Fn(f64) -> Value + ?Sized,
{
    if a == b {
        return zeros(dim);
    }
    if a > b {
        return scale(C64::new(-1.0, 0.0), &integrate(f, b, a, tol, dim));
    }
    let panels = (((b - a) / PANEL_SCALE).ceil() as usize).clamp(2, 8);
    let width = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut acc = zeros(dim);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let hi = if p + 1 == panels { b } else { a + (p + 1) as f64 * width };
        let mid = 0.5 * (lo + hi);
        let flo = f(lo);
        let fmid = f(mid);
        let fhi = f(hi);
        let whole = simpson(lo, hi, &flo, &fmid, &fhi);
        let part = refine(f, lo, hi, &flo, &fhi, whole, panel_tol, MAX_DEPTH);
        acc = add(&acc, &part);
    }
    acc
}

fn simpson(a: f64, b: f64, fa: &Value, fm: &Value, fb: &Value) -> Value {
    let h = (b - a) / 6.0;
    let mut out = zeros(fa.len());
    axpy(&mut out, h, fa);
    axpy(&mut out, 4.0 * h, fm);
    axpy(&mut out, h, fb);
    out
}

/// Splits `[a, b]` at the irrational interior point, compares the two-panel
/// composite against `whole`, and recurses on disagreement. Each level costs
/// three evaluations; sub-midpoints are reused as the midpoints of the next
/// level.
#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: &Value,
    fb: &Value,
    whole: Value,
    tol: f64,
    depth: u32,
) -> Value
where
    F: Fn(f64) -> Value + ?Sized,
{
    let q = a + SPLIT * (b - a);
    let fq = f(q);
    let lm = 0.5 * (a + q);
    let rm = 0.5 * (q + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, q, fa, &flm, &fq);
    let right = simpson(q, b, &fq, &frm, fb);
    let refined = add(&left, &right);
    let err = sup_norm(&sub(&refined, &whole));
    if depth == 0 || err <= 10.0 * tol {
        return refined;
    }
    let l = refine(f, a, q, fa, &fq, left, tol * SPLIT, depth - 1);
    let r = refine(f, q, b, &fq, fb, right, tol * (1.0 - SPLIT), depth - 1);
    add(&l, &r)
}

/// Chain of checkpoint values `∫_base^{base + j·spacing}` grown on demand.
/// Values are appended under a write lock and never mutated afterwards, so
/// concurrent readers always observe a consistent prefix and every checkpoint
/// is the same deterministic chain sum regardless of fill order.
#[derive(Debug)]
pub struct CumulativeIntegral {
    base: f64,
    spacing: f64,
    tol: f64,
    dim: usize,
    /// `pos[j] = ∫_base^{base + j·spacing}`, `neg[j] = ∫_base^{base − j·spacing}`;
    /// both start with the zero integral at index 0.
    table: RwLock<(Vec<Value>, Vec<Value>)>,
}

impl CumulativeIntegral {
    pub fn new(base: f64, spacing: f64, tol: f64, dim: usize) -> Self {
        let zero = zeros(dim);
        CumulativeIntegral {
            base,
            spacing,
            tol,
            dim,
            table: RwLock::new((vec![zero.clone()], vec![zero])),
        }
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// `∫_base^t f`, reusing the nearest checkpoint at or below `t` (above for
    /// negative offsets).
    pub fn eval<F>(&self, f: &F, t: f64) -> Value
    where
        F: Fn(f64) -> Value + ?Sized,
    {
        let offset = (t - self.base) / self.spacing;
        let j = offset.floor() as i64;
        let (checkpoint, anchor) = if j >= 0 {
            (self.checkpoint(f, j), self.base + j as f64 * self.spacing)
        } else {
            // t below base: anchor at the checkpoint just above t.
            let k = -j; // positive index into the negative chain
            (self.neg_checkpoint(f, k), self.base - k as f64 * self.spacing)
        };
        let local = integrate(f, anchor, t, self.tol, self.dim);
        add(&checkpoint, &local)
    }

    fn checkpoint<F>(&self, f: &F, j: i64) -> Value
    where
        F: Fn(f64) -> Value + ?Sized,
    {
        let j = j as usize;
        {
            let guard = self.table.read().unwrap();
            if let Some(v) = guard.0.get(j) {
                return v.clone();
            }
        }
        let mut guard = self.table.write().unwrap();
        while guard.0.len() <= j {
            let k = guard.0.len();
            let lo = self.base + (k - 1) as f64 * self.spacing;
            let hi = self.base + k as f64 * self.spacing;
            let step = integrate(f, lo, hi, self.tol, self.dim);
            let prev = guard.0[k - 1].clone();
            guard.0.push(add(&prev, &step));
        }
        guard.0[j].clone()
    }

    fn neg_checkpoint<F>(&self, f: &F, k: i64) -> Value
    where
        F: Fn(f64) -> Value + ?Sized,
    {
        let k = k as usize;
        {
            let guard = self.table.read().unwrap();
            if let Some(v) = guard.1.get(k) {
                return v.clone();
            }
        }
        let mut guard = self.table.write().unwrap();
        while guard.1.len() <= k {
            let m = guard.1.len();
            let hi = self.base - (m - 1) as f64 * self.spacing;
            let lo = self.base - m as f64 * self.spacing;
            let step = integrate(f, hi, lo, self.tol, self.dim);
            let prev = guard.1[m - 1].clone();
            guard.1.push(add(&prev, &step));
        }
        guard.1[k].clone()
    }
}
