//! Immutable, composable vector-valued signals.
//!
//! A [`Signal`] is a reference-counted expression tree: exact generator
//! formulas at the leaves, calculus combinators above them. Evaluation is
//! deterministic (repeated evaluation at the same point yields bit-identical
//! results) and signals are safe to evaluate concurrently; the only interior
//! state is the checkpoint cache of integral nodes, which grows monotonically
//! under a lock and never changes a published value.

use std::sync::Arc;

use smallvec::smallvec;

use crate::defaults;
use crate::error::SignalError;
use crate::linalg::CMat;
use crate::quad::{integrate, CumulativeIntegral};
use crate::sequence::Sequence;
use crate::value::{add, scale, sub, zeros, Value, C64};

pub use crate::sequence::AaBranch;

#[derive(Debug)]
pub(crate) enum Node {
    /// `Σ_k c_k e^{i ω_k t}`, scalar-valued.
    TrigPoly { terms: Vec<(C64, f64)> },
    /// `p(t) e^{i t²}`, scalar-valued; closed under differentiation.
    PolyChirp { coeffs: Vec<C64> },
    /// Continuous piecewise-linear extension of an integer-indexed sequence.
    LinearExt { seq: Sequence },
    /// Truncated lacunary bump sum of the given order.
    Lacunary { order: u32 },
    Constant { value: Value },
    /// Uniformly sampled data with linear interpolation, clamped at the ends.
    Sampled { start: f64, step: f64, dim: usize, data: Arc<Vec<C64>> },
    Sum { left: Signal, right: Signal },
    Scale { factor: C64, inner: Signal },
    Translate { inner: Signal, offset: f64 },
    Difference { inner: Signal, step: f64 },
    RunningMean { inner: Signal, width: f64, tol: f64 },
    Integral { inner: Signal, cache: CumulativeIntegral },
    CharacterMul { inner: Signal, omega: f64 },
    MatApply { mat: CMat, inner: Signal },
    Stack { parts: Vec<Signal> },
}

/// An immutable evaluable function ℝ → ℂ^d.
#[derive(Clone, Debug)]
pub struct Signal {
    node: Arc<Node>,
    dim: usize,
    quad_tol: f64,
}

impl Signal {
    fn from_node(node: Node, dim: usize, quad_tol: f64) -> Self {
        Signal { node: Arc::new(node), dim, quad_tol }
    }

    /// Codomain dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Quadrature tolerance inherited by mean/integral combinators built from
    /// this signal.
    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// Returns the same signal with a different quadrature tolerance for
    /// subsequently constructed combinators.
    pub fn with_quad_tol(&self, tol: f64) -> Signal {
        Signal { node: self.node.clone(), dim: self.dim, quad_tol: tol }
    }

    pub(crate) fn node(&self) -> &Node {
        &self.node
    }

    // ---- generators -------------------------------------------------------

    /// Trigonometric polynomial `Σ c_k e^{i ω_k t}`.
    pub fn trig_poly(terms: Vec<(C64, f64)>) -> Signal {
        Signal::from_node(Node::TrigPoly { terms }, 1, defaults::QUAD_TOL)
    }

    /// `sin t` as a two-term character sum.
    pub fn sin() -> Signal {
        Signal::trig_poly(vec![
            (C64::new(0.0, -0.5), 1.0),
            (C64::new(0.0, 0.5), -1.0),
        ])
    }

    /// `cos t`.
    pub fn cos() -> Signal {
        Signal::trig_poly(vec![
            (C64::new(0.5, 0.0), 1.0),
            (C64::new(0.5, 0.0), -1.0),
        ])
    }

    /// The character `γ_ω(t) = e^{iωt}`.
    pub fn character(omega: f64) -> Signal {
        Signal::trig_poly(vec![(C64::new(1.0, 0.0), omega)])
    }

    /// The chirp `e^{it²}`.
    pub fn chirp() -> Signal {
        Signal::poly_chirp(vec![C64::new(1.0, 0.0)])
    }

    /// `p(t) e^{it²}` with polynomial coefficients in ascending order.
    pub fn poly_chirp(coeffs: Vec<C64>) -> Signal {
        Signal::from_node(Node::PolyChirp { coeffs }, 1, defaults::QUAD_TOL)
    }

    /// Constant signal; the vector fixes the dimension.
    pub fn constant(value: Value) -> Result<Signal, SignalError> {
        if value.is_empty() {
            return Err(SignalError::ZeroDim);
        }
        let dim = value.len();
        Ok(Signal::from_node(Node::Constant { value }, dim, defaults::QUAD_TOL))
    }

    /// Scalar constant.
    pub fn constant_scalar(c: C64) -> Signal {
        Signal::constant(smallvec![c]).expect("dim 1")
    }

    /// Piecewise-linear extension of an integer-indexed sequence.
    pub fn linear_extension(seq: Sequence) -> Signal {
        Signal::from_node(Node::LinearExt { seq }, 1, defaults::QUAD_TOL)
    }

    /// The extension of one of the almost-automorphic circle steps.
    pub fn aa_step(branch: AaBranch) -> Signal {
        Signal::linear_extension(Sequence::AaStep { branch })
    }

    /// Truncated lacunary bump sum: periodic unit bumps at dyadic sites, one
    /// per order `2..=order`.
    pub fn lacunary(order: u32) -> Result<Signal, SignalError> {
        if !(2..=24).contains(&order) {
            return Err(SignalError::LacunaryOrder(order));
        }
        Ok(Signal::from_node(Node::Lacunary { order }, 1, defaults::QUAD_TOL))
    }

    /// Uniformly sampled data with linear interpolation; evaluation clamps to
    /// the sampled span. `data` is row-major: `data[idx * dim + component]`.
    pub fn sampled(start: f64, step: f64, dim: usize, data: Vec<C64>) -> Result<Signal, SignalError> {
        Signal::sampled_shared(start, step, dim, Arc::new(data))
    }

    /// Like [`Signal::sampled`] but shares an existing sample buffer, so
    /// trajectory adapters avoid copying their rows.
    pub fn sampled_shared(
        start: f64,
        step: f64,
        dim: usize,
        data: Arc<Vec<C64>>,
    ) -> Result<Signal, SignalError> {
        if dim == 0 {
            return Err(SignalError::ZeroDim);
        }
        if step <= 0.0 {
            return Err(SignalError::NonPositiveWidth(step));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(SignalError::Config(format!(
                "sampled data length {} not a multiple of dim {dim}",
                data.len()
            )));
        }
        Ok(Signal::from_node(Node::Sampled { start, step, dim, data }, dim, defaults::QUAD_TOL))
    }

    // ---- combinators ------------------------------------------------------

    /// `t ↦ f(t + s)`. Nested translations merge, so translation composition
    /// is exact.
    pub fn translate(&self, s: f64) -> Signal {
        if s == 0.0 {
            return self.clone();
        }
        if let Node::Translate { inner, offset } = self.node() {
            return Signal::from_node(
                Node::Translate { inner: inner.clone(), offset: offset + s },
                self.dim,
                self.quad_tol,
            );
        }
        Signal::from_node(
            Node::Translate { inner: self.clone(), offset: s },
            self.dim,
            self.quad_tol,
        )
    }

    /// Forward difference `t ↦ f(t + h) − f(t)`; `h = 0` is rejected as the
    /// degenerate identically-zero signal.
    pub fn difference(&self, h: f64) -> Result<Signal, SignalError> {
        if h == 0.0 {
            return Err(SignalError::ZeroStep);
        }
        Ok(Signal::from_node(
            Node::Difference { inner: self.clone(), step: h },
            self.dim,
            self.quad_tol,
        ))
    }

    /// Running mean `t ↦ (1/h) ∫_0^h f(t + s) ds`.
    pub fn running_mean(&self, h: f64) -> Result<Signal, SignalError> {
        if h <= 0.0 {
            return Err(SignalError::NonPositiveWidth(h));
        }
        Ok(Signal::from_node(
            Node::RunningMean { inner: self.clone(), width: h, tol: self.quad_tol },
            self.dim,
            self.quad_tol,
        ))
    }

    /// Indefinite integral `t ↦ ∫_α^t f`, backed by checkpointed cumulative
    /// quadrature so repeated evaluations cost only local work.
    pub fn indefinite_integral(&self, alpha: f64) -> Signal {
        let cache = CumulativeIntegral::new(
            alpha,
            defaults::CHECKPOINT_SPACING,
            self.quad_tol,
            self.dim,
        );
        Signal::from_node(
            Node::Integral { inner: self.clone(), cache },
            self.dim,
            self.quad_tol,
        )
    }

    /// Componentwise multiplication by the character `e^{iωt}`.
    pub fn character_multiply(&self, omega: f64) -> Signal {
        if omega == 0.0 {
            return self.clone();
        }
        Signal::from_node(
            Node::CharacterMul { inner: self.clone(), omega },
            self.dim,
            self.quad_tol,
        )
    }

    /// Scalar multiple. Nested scalings merge.
    pub fn scale(&self, c: C64) -> Signal {
        if let Node::Scale { factor, inner } = self.node() {
            return Signal::from_node(
                Node::Scale { factor: factor * c, inner: inner.clone() },
                self.dim,
                self.quad_tol,
            );
        }
        Signal::from_node(Node::Scale { factor: c, inner: self.clone() }, self.dim, self.quad_tol)
    }

    /// Pointwise sum; dimensions must agree.
    pub fn add(&self, other: &Signal) -> Result<Signal, SignalError> {
        if self.dim != other.dim {
            return Err(SignalError::DimMismatch { left: self.dim, right: other.dim });
        }
        Ok(Signal::from_node(
            Node::Sum { left: self.clone(), right: other.clone() },
            self.dim,
            self.quad_tol.min(other.quad_tol),
        ))
    }

    /// Pointwise difference `self − other`.
    pub fn sub(&self, other: &Signal) -> Result<Signal, SignalError> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Stacks signals into one of dimension `Σ dims`.
    pub fn stack(parts: Vec<Signal>) -> Result<Signal, SignalError> {
        if parts.is_empty() {
            return Err(SignalError::EmptyList);
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        let tol = parts.iter().map(|p| p.quad_tol).fold(f64::INFINITY, f64::min);
        Ok(Signal::from_node(Node::Stack { parts }, dim, tol))
    }

    /// Left-multiplies the value by a constant matrix.
    pub fn mat_apply(&self, mat: CMat) -> Result<Signal, SignalError> {
        if mat.cols() != self.dim {
            return Err(SignalError::MatrixShape {
                rows: mat.rows(),
                cols: mat.cols(),
                dim: self.dim,
            });
        }
        let dim = mat.rows();
        Ok(Signal::from_node(Node::MatApply { mat, inner: self.clone() }, dim, self.quad_tol))
    }

    // ---- evaluation -------------------------------------------------------

    /// Evaluates the signal at `t`.
    pub fn eval(&self, t: f64) -> Value {
        match self.node() {
            Node::TrigPoly { terms } => {
                let mut acc = C64::new(0.0, 0.0);
                for &(c, omega) in terms {
                    acc += c * C64::cis(omega * t);
                }
                smallvec![acc]
            }
            Node::PolyChirp { coeffs } => {
                let mut p = C64::new(0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    p = p * t + c;
                }
                smallvec![p * C64::cis(t * t)]
            }
            Node::LinearExt { seq } => {
                let n = t.floor();
                let theta = t - n;
                let a = seq.value(n as i64);
                let b = seq.value(n as i64 + 1);
                smallvec![a + (b - a) * theta]
            }
            Node::Lacunary { order } => {
                let mut acc = 0.0;
                for n in 2..=*order {
                    acc += lacunary_bump(n, t);
                }
                smallvec![C64::new(acc, 0.0)]
            }
            Node::Constant { value } => value.clone(),
            Node::Sampled { start, step, dim, data } => {
                let len = data.len() / dim;
                if len == 1 {
                    return data[..*dim].iter().copied().collect();
                }
                let pos = ((t - start) / step).clamp(0.0, (len - 1) as f64);
                let idx = (pos.floor() as usize).min(len - 2);
                let theta = pos - idx as f64;
                let lo = &data[idx * dim..(idx + 1) * dim];
                let hi = &data[(idx + 1) * dim..(idx + 2) * dim];
                lo.iter()
                    .zip(hi)
                    .map(|(a, b)| a + (b - a) * theta)
                    .collect()
            }
            Node::Sum { left, right } => add(&left.eval(t), &right.eval(t)),
            Node::Scale { factor, inner } => scale(*factor, &inner.eval(t)),
            Node::Translate { inner, offset } => inner.eval(t + offset),
            Node::Difference { inner, step } => {
                sub(&inner.eval(t + step), &inner.eval(t))
            }
            Node::RunningMean { inner, width, tol } => {
                let f = |s: f64| inner.eval(s);
                let integral = integrate(&f, t, t + width, tol * width, inner.dim);
                scale(C64::new(1.0 / width, 0.0), &integral)
            }
            Node::Integral { inner, cache } => {
                let f = |s: f64| inner.eval(s);
                cache.eval(&f, t)
            }
            Node::CharacterMul { inner, omega } => scale(C64::cis(omega * t), &inner.eval(t)),
            Node::MatApply { mat, inner } => {
                let v = inner.eval(t);
                mat.matvec(&v).into_iter().collect()
            }
            Node::Stack { parts } => {
                let mut out = Value::with_capacity(self.dim);
                for p in parts {
                    out.extend(p.eval(t));
                }
                out
            }
        }
    }

    /// Evaluates the signal along the uniform grid `t0 + i·step`,
    /// `i = 0..count`, returning dim-strided values.
    ///
    /// Semantically this is `eval` mapped over the grid (values may differ at
    /// rounding level for integral nodes, which integrate segment by segment
    /// within each checkpoint unit instead of re-integrating from the anchor
    /// for every point; each unit restarts from its checkpoint, so no error
    /// accumulates across units). Dense scan tables are filled through this
    /// path.
    pub fn eval_grid(&self, t0: f64, step: f64, count: usize) -> Vec<C64> {
        match self.node() {
            Node::Sum { left, right } => {
                let a = left.eval_grid(t0, step, count);
                let b = right.eval_grid(t0, step, count);
                a.iter().zip(&b).map(|(x, y)| x + y).collect()
            }
            Node::Scale { factor, inner } => {
                let mut v = inner.eval_grid(t0, step, count);
                for z in &mut v {
                    *z *= factor;
                }
                v
            }
            Node::Translate { inner, offset } => inner.eval_grid(t0 + offset, step, count),
            Node::Difference { inner, step: h } => {
                let a = inner.eval_grid(t0 + h, step, count);
                let b = inner.eval_grid(t0, step, count);
                a.iter().zip(&b).map(|(x, y)| x - y).collect()
            }
            Node::CharacterMul { inner, omega } => {
                let mut v = inner.eval_grid(t0, step, count);
                let dim = inner.dim;
                for (i, chunk) in v.chunks_mut(dim).enumerate() {
                    let phase = C64::cis(omega * (t0 + i as f64 * step));
                    for z in chunk {
                        *z *= phase;
                    }
                }
                v
            }
            Node::MatApply { mat, inner } => {
                let v = inner.eval_grid(t0, step, count);
                let dim = inner.dim;
                let mut out = Vec::with_capacity(count * mat.rows());
                for chunk in v.chunks(dim) {
                    out.extend(mat.matvec(chunk));
                }
                out
            }
            Node::Stack { parts } => {
                use rayon::prelude::*;
                let grids: Vec<Vec<C64>> = parts
                    .par_iter()
                    .map(|p| p.eval_grid(t0, step, count))
                    .collect();
                let mut out = Vec::with_capacity(count * self.dim);
                for i in 0..count {
                    for (part, grid) in parts.iter().zip(&grids) {
                        out.extend_from_slice(&grid[i * part.dim..(i + 1) * part.dim]);
                    }
                }
                out
            }
            Node::Integral { inner, cache } => {
                let dim = inner.dim;
                let f = |s: f64| inner.eval(s);
                let mut out = Vec::with_capacity(count * dim);
                if count == 0 {
                    return out;
                }
                let seg_tol = self.quad_tol * step.min(1.0);
                let mut prev_t = t0;
                let mut prev_v = cache.eval(&f, t0);
                out.extend_from_slice(&prev_v);
                for i in 1..count {
                    let t = t0 + i as f64 * step;
                    let same_unit = (prev_t - cache.base()).div_euclid(defaults::CHECKPOINT_SPACING)
                        == (t - cache.base()).div_euclid(defaults::CHECKPOINT_SPACING);
                    if same_unit {
                        let seg = integrate(&f, prev_t, t, seg_tol, dim);
                        prev_v = add(&prev_v, &seg);
                    } else {
                        prev_v = cache.eval(&f, t);
                    }
                    out.extend_from_slice(&prev_v);
                    prev_t = t;
                }
                out
            }
            _ => {
                let mut out = Vec::with_capacity(count * self.dim);
                for i in 0..count {
                    out.extend(self.eval(t0 + i as f64 * step));
                }
                out
            }
        }
    }

    // ---- generator-level differentiation -----------------------------------

    /// Exact derivative where the generators admit one (trigonometric
    /// polynomials, chirps, constants and any combinator tree over them).
    pub fn derivative(&self) -> Result<Signal, SignalError> {
        match self.node() {
            Node::TrigPoly { terms } => Ok(Signal::trig_poly(
                terms
                    .iter()
                    .map(|&(c, omega)| (c * C64::new(0.0, omega), omega))
                    .collect(),
            )
            .with_quad_tol(self.quad_tol)),
            Node::PolyChirp { coeffs } => {
                // (p e^{it²})' = (p' + 2it·p) e^{it²}
                let mut q = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
                for (k, &c) in coeffs.iter().enumerate() {
                    if k + 1 < coeffs.len() {
                        q[k] += (k as f64 + 1.0) * coeffs[k + 1];
                    }
                    q[k + 1] += C64::new(0.0, 2.0) * c;
                }
                Ok(Signal::poly_chirp(q).with_quad_tol(self.quad_tol))
            }
            Node::Constant { value } => {
                Signal::constant(zeros(value.len())).map(|s| s.with_quad_tol(self.quad_tol))
            }
            Node::LinearExt { .. } => Err(SignalError::NotDifferentiable("piecewise-linear extension")),
            Node::Lacunary { .. } => Err(SignalError::NotDifferentiable("lacunary sum")),
            Node::Sampled { .. } => Err(SignalError::NotDifferentiable("sampled data")),
            Node::Sum { left, right } => left.derivative()?.add(&right.derivative()?),
            Node::Scale { factor, inner } => Ok(inner.derivative()?.scale(*factor)),
            Node::Translate { inner, offset } => Ok(inner.derivative()?.translate(*offset)),
            Node::Difference { inner, step } => inner.derivative()?.difference(*step),
            Node::RunningMean { inner, width, .. } => {
                // d/dt M_h f = (f(t+h) − f(t)) / h, exactly.
                Ok(inner.difference(*width)?.scale(C64::new(1.0 / width, 0.0)))
            }
            Node::Integral { inner, .. } => Ok(inner.clone()),
            Node::CharacterMul { inner, omega } => {
                let part = inner.scale(C64::new(0.0, *omega)).add(&inner.derivative()?)?;
                Ok(part.character_multiply(*omega))
            }
            Node::MatApply { mat, inner } => inner.derivative()?.mat_apply(mat.clone()),
            Node::Stack { parts } => {
                let derivs = parts
                    .iter()
                    .map(|p| p.derivative())
                    .collect::<Result<Vec<_>, _>>()?;
                Signal::stack(derivs)
            }
        }
    }
}

/// One periodic bump: period `2^{n+1}`, zero on `[−2^n, 2^n − 1]`, a single
/// sine arch of frequency `2^n π` on `[2^n − 1, 2^n]`.
fn lacunary_bump(n: u32, t: f64) -> f64 {
    let half = 2f64.powi(n as i32);
    let period = 2.0 * half;
    let u = t - period * ((t + half) / period).floor();
    if u >= half - 1.0 {
        (half * std::f64::consts::PI * (u - half)).sin()
    } else {
        0.0
    }
}

/// Structural equality ignoring interior caches; used by the config
/// round-trip checks.
impl PartialEq for Signal {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && nodes_eq(self.node(), other.node())
    }
}

fn nodes_eq(a: &Node, b: &Node) -> bool {
    use Node::*;
    match (a, b) {
        (TrigPoly { terms: x }, TrigPoly { terms: y }) => x == y,
        (PolyChirp { coeffs: x }, PolyChirp { coeffs: y }) => x == y,
        (LinearExt { seq: x }, LinearExt { seq: y }) => x == y,
        (Lacunary { order: x }, Lacunary { order: y }) => x == y,
        (Constant { value: x }, Constant { value: y }) => x == y,
        (
            Sampled { start: s1, step: h1, dim: d1, data: x },
            Sampled { start: s2, step: h2, dim: d2, data: y },
        ) => s1 == s2 && h1 == h2 && d1 == d2 && x == y,
        (Sum { left: l1, right: r1 }, Sum { left: l2, right: r2 }) => l1 == l2 && r1 == r2,
        (Scale { factor: c1, inner: i1 }, Scale { factor: c2, inner: i2 }) => c1 == c2 && i1 == i2,
        (
            Translate { inner: i1, offset: o1 },
            Translate { inner: i2, offset: o2 },
        ) => o1 == o2 && i1 == i2,
        (Difference { inner: i1, step: s1 }, Difference { inner: i2, step: s2 }) => {
            s1 == s2 && i1 == i2
        }
        (
            RunningMean { inner: i1, width: w1, .. },
            RunningMean { inner: i2, width: w2, .. },
        ) => w1 == w2 && i1 == i2,
        (Integral { inner: i1, cache: c1 }, Integral { inner: i2, cache: c2 }) => {
            c1.base() == c2.base() && i1 == i2
        }
        (
            CharacterMul { inner: i1, omega: o1 },
            CharacterMul { inner: i2, omega: o2 },
        ) => o1 == o2 && i1 == i2,
        (MatApply { mat: m1, inner: i1 }, MatApply { mat: m2, inner: i2 }) => {
            m1 == m2 && i1 == i2
        }
        (Stack { parts: x }, Stack { parts: y }) => x == y,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{sup_dist, sup_norm};
    use std::f64::consts::PI;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    }

    #[test]
    fn chirp_at_zero_is_one() {
        let g = Signal::chirp();
        assert!((g.eval(0.0)[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn aa_step_at_zero_is_one() {
        let f = Signal::aa_step(AaBranch::Phi);
        assert!((f.eval(0.0)[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sin_generator_matches_libm() {
        let s = Signal::sin();
        assert!((s.eval(PI / 2.0)[0].re - 1.0).abs() < 1e-15);
        for &t in &grid(-8.0, 8.0, 64) {
            let v = s.eval(t);
            assert!((v[0].re - t.sin()).abs() < 1e-14);
            assert!(v[0].im.abs() < 1e-15);
        }
    }

    #[test]
    fn translate_by_full_period_is_identity() {
        let s = Signal::sin();
        let sh = s.translate(2.0 * PI);
        for &t in &grid(-5.0, 5.0, 40) {
            assert!(sup_dist(&s.eval(t), &sh.eval(t)) < 1e-13);
        }
    }

    #[test]
    fn translate_constant_and_chirp() {
        let c = Signal::constant_scalar(C64::new(2.0, -1.0));
        assert_eq!(c.translate(5.0).eval(3.3), c.eval(0.0));
        let g = Signal::chirp().translate(1.0);
        assert!((g.eval(0.0)[0] - C64::cis(1.0)).norm() < 1e-15);
    }

    #[test]
    fn translations_merge_exactly() {
        let f = Signal::chirp();
        let a = f.translate(0.3).translate(0.4);
        let b = f.translate(0.7);
        assert_eq!(a, b);
        for &t in &grid(-3.0, 3.0, 17) {
            assert_eq!(a.eval(t), b.eval(t));
        }
    }

    #[test]
    fn difference_of_full_period_vanishes() {
        let d = Signal::sin().difference(2.0 * PI).unwrap();
        for &t in &grid(-5.0, 5.0, 40) {
            assert!(sup_norm(&d.eval(t)) < 1e-13);
        }
    }

    #[test]
    fn difference_character_identity() {
        // Δ_h e^{iωt} = (e^{iωh} − 1) e^{iωt}; zero when ω = 2π/h.
        let h = 0.7;
        let omega = 2.0 * PI / h;
        let d = Signal::character(omega).difference(h).unwrap();
        for &t in &grid(0.0, 3.0, 10) {
            assert!(sup_norm(&d.eval(t)) < 1e-12);
        }
        let omega = 1.3;
        let d = Signal::character(omega).difference(h).unwrap();
        let expected = |t: f64| (C64::cis(omega * h) - 1.0) * C64::cis(omega * t);
        for &t in &grid(-2.0, 2.0, 10) {
            assert!((d.eval(t)[0] - expected(t)).norm() < 1e-13);
        }
    }

    #[test]
    fn difference_half_period_doubles_negated() {
        // Addition-formula oracle: sin(t+π) − sin t = −2 sin t.
        let d = Signal::sin().difference(PI).unwrap();
        for &t in &grid(-6.0, 6.0, 48) {
            assert!((d.eval(t)[0].re - (-2.0 * t.sin())).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_difference_step_rejected() {
        assert!(matches!(Signal::sin().difference(0.0), Err(SignalError::ZeroStep)));
        assert!(matches!(Signal::sin().running_mean(-1.0), Err(SignalError::NonPositiveWidth(_))));
    }

    #[test]
    fn running_mean_of_constant_is_constant() {
        let c = Signal::constant_scalar(C64::new(0.5, 1.5));
        let m = c.running_mean(2.3).unwrap();
        assert!((m.eval(1.7)[0] - C64::new(0.5, 1.5)).norm() < 1e-10);
    }

    #[test]
    fn running_mean_full_period_vanishes() {
        let m = Signal::sin().running_mean(2.0 * PI).unwrap();
        for &t in &grid(-3.0, 3.0, 12) {
            assert!(sup_norm(&m.eval(t)) < 1e-8);
        }
    }

    #[test]
    fn running_mean_half_period_hits_two_over_pi() {
        // Symbolic antiderivative oracle: (1/π)(cos 0 − cos π) = 2/π.
        let m = Signal::sin().running_mean(PI).unwrap();
        assert!((m.eval(0.0)[0].re - 2.0 / PI).abs() < 1e-8);
    }

    #[test]
    fn integral_of_sine_at_pi_is_two() {
        // Checkpoint errors accumulate linearly across spacing units, so the
        // budget at t = π is a few quadrature tolerances.
        let p = Signal::sin().indefinite_integral(0.0);
        assert!((p.eval(PI)[0].re - 2.0).abs() < 5e-8);
        assert!(sup_norm(&p.eval(0.0)) < 1e-12);
    }

    #[test]
    fn integral_of_zero_is_zero() {
        let z = Signal::constant_scalar(C64::new(0.0, 0.0)).indefinite_integral(0.0);
        for &t in &[0.0, 1.0, -4.5, 20.0] {
            assert!(sup_norm(&z.eval(t)) < 1e-12);
        }
    }

    #[test]
    fn chirp_integral_approaches_fresnel_limit() {
        // √(2π)/4 · (1+i) ≈ 0.6267 (1+i); tail at t=100 is below 0.01.
        let p = Signal::chirp().indefinite_integral(0.0);
        let v = p.eval(100.0)[0];
        let limit = (2.0 * PI).sqrt() / 4.0;
        assert!((v - C64::new(limit, limit)).norm() < 0.01, "Pg(100) = {v}");
    }

    #[test]
    fn character_multiply_examples() {
        let f = Signal::sin();
        assert_eq!(f.character_multiply(0.0), f);
        let one = Signal::constant_scalar(C64::new(1.0, 0.0)).character_multiply(1.3);
        for &t in &grid(-2.0, 2.0, 8) {
            assert!((one.eval(t)[0] - C64::cis(1.3 * t)).norm() < 1e-15);
        }
        let g = f.character_multiply(1.0);
        assert!((g.eval(PI / 2.0)[0] - C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn linear_extension_interpolates() {
        let f = Signal::linear_extension(Sequence::Identity);
        assert!((f.eval(0.5)[0].re - 0.5).abs() < 1e-15);
        assert!((f.eval(-1.25)[0].re + 1.25).abs() < 1e-14);
        let c = Signal::linear_extension(Sequence::Constant { re: 2.0, im: 1.0 });
        assert!((c.eval(17.77)[0] - C64::new(2.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn psi_extension_difference_is_tent() {
        // ψ₁ and ψ₂ agree off n = 0, so g₁ − g₂ is a tent on (−1, 1) with
        // peak 2i at t = 0.
        let g1 = Signal::aa_step(AaBranch::Psi1);
        let g2 = Signal::aa_step(AaBranch::Psi2);
        let tent = g1.sub(&g2).unwrap();
        assert!((tent.eval(0.0)[0] - C64::new(0.0, 2.0)).norm() < 1e-14);
        assert!((tent.eval(0.5)[0] - C64::new(0.0, 1.0)).norm() < 1e-14);
        for &t in &[-1.0, 1.0, 2.3, -5.7, 40.0] {
            assert!(sup_norm(&tent.eval(t)) < 1e-14, "t={t}");
        }
    }

    #[test]
    fn lacunary_vanishes_near_zero_and_peaks_at_top_bump() {
        let f = Signal::lacunary(6).unwrap();
        assert!(sup_norm(&f.eval(0.0)) < 1e-15);
        // Zero on [−4, 3]: every bump of order n ≥ 2 vanishes there.
        for &t in &grid(-4.0, 3.0, 140) {
            assert!(sup_norm(&f.eval(t)) < 1e-15, "t={t}");
        }
        // Grid max over the top bump support reaches the unit arch; the bump
        // oscillates at 2^6 π so the grid must resolve that scale.
        let lo = 2f64.powi(6) - 1.0;
        let sup = grid(lo, lo + 1.0, 20_000)
            .iter()
            .map(|&t| sup_norm(&f.eval(t)))
            .fold(0.0, f64::max);
        assert!(sup >= 1.0 - 1e-4, "sup = {sup}");
        assert!(matches!(Signal::lacunary(30), Err(SignalError::LacunaryOrder(30))));
    }

    #[test]
    fn linearity_is_bitwise() {
        let f = Signal::sin();
        let g = Signal::chirp();
        let s = f.add(&g).unwrap();
        let c = C64::new(0.3, -0.8);
        let sc = f.scale(c);
        for &t in &grid(-3.0, 3.0, 33) {
            assert_eq!(s.eval(t)[0], f.eval(t)[0] + g.eval(t)[0]);
            assert_eq!(sc.eval(t)[0], c * f.eval(t)[0]);
        }
    }

    #[test]
    fn stack_concatenates_and_checks_dims() {
        let f = Signal::sin();
        let g = Signal::cos();
        let st = Signal::stack(vec![f.clone(), g.clone()]).unwrap();
        assert_eq!(st.dim(), 2);
        let v = st.eval(0.7);
        assert_eq!(v[0], f.eval(0.7)[0]);
        assert_eq!(v[1], g.eval(0.7)[0]);
        assert!(f.add(&st).is_err());
    }

    #[test]
    fn derivative_of_sin_is_cos() {
        let d = Signal::sin().derivative().unwrap();
        for &t in &grid(-4.0, 4.0, 32) {
            assert!((d.eval(t)[0].re - t.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_chirp_is_poly_chirp() {
        let d = Signal::chirp().derivative().unwrap();
        for &t in &grid(-2.0, 2.0, 16) {
            let expected = C64::new(0.0, 2.0 * t) * C64::cis(t * t);
            assert!((d.eval(t)[0] - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_integral_recovers_signal() {
        let f = Signal::sin();
        let d = f.indefinite_integral(0.0).derivative().unwrap();
        assert_eq!(d, f);
        assert!(Signal::aa_step(AaBranch::Phi).derivative().is_err());
    }

    #[test]
    fn running_mean_derivative_is_scaled_difference() {
        let f = Signal::cos();
        let d = f.running_mean(0.5).unwrap().derivative().unwrap();
        for &t in &grid(-2.0, 2.0, 10) {
            let expected = ((t + 0.5).cos() - t.cos()) / 0.5;
            assert!((d.eval(t)[0].re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_signal_clamps_and_interpolates() {
        let data = vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ];
        let s = Signal::sampled(0.0, 1.0, 1, data).unwrap();
        assert!((s.eval(0.5)[0].re - 0.5).abs() < 1e-15);
        assert!((s.eval(1.5)[0].re - 0.5).abs() < 1e-15);
        assert!((s.eval(-3.0)[0].re - 0.0).abs() < 1e-15);
        assert!((s.eval(9.0)[0].re - 0.0).abs() < 1e-15);
    }
}
