//! Constant-coefficient difference-differential systems.
//!
//! [`NeutralSystem`] represents the general neutral operator
//! `y ↦ Σ_{j,k} a_{jk} y^{(k)}(· + t_j)`; it is exercised in the forward
//! direction (build `y`, derive the forcing). [`OdeSystem`] is the delay-free
//! special case `y^{(n)} + Σ a_k y^{(k)}`, for which the solvers in
//! [`solve`] construct bounded solutions on the line
//! and initial-value solutions on half lines.

pub mod solve;

pub use solve::{
    bounded_solution, bounded_solution_on, esclangon_check, green_kernel_info, ivp_solve,
    DichotomyOptions, EsclangonReport, KernelInfo, SolveMeta, Trajectory,
};

use crate::error::SolveError;
use crate::linalg::{char_poly, poly_roots, CMat};
use crate::signal::Signal;
use crate::value::C64;

/// The neutral operator: delays `t_1 < … < t_m`, derivative orders `0..=n`,
/// complex `r × r` coefficient blocks `a_{jk}`.
#[derive(Clone, Debug)]
pub struct NeutralSystem {
    delays: Vec<f64>,
    /// `coeffs[j][k]` multiplies `y^{(k)}(t + delays[j])`.
    coeffs: Vec<Vec<CMat>>,
    order: usize,
    block_dim: usize,
}

impl NeutralSystem {
    pub fn new(delays: Vec<f64>, coeffs: Vec<Vec<CMat>>) -> Result<Self, SolveError> {
        if delays.is_empty() {
            return Err(SolveError::BadSystem("at least one delay required".into()));
        }
        if delays.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SolveError::BadSystem("delays must be strictly increasing".into()));
        }
        if coeffs.len() != delays.len() {
            return Err(SolveError::BadSystem(format!(
                "{} delay(s) but {} coefficient row(s)",
                delays.len(),
                coeffs.len()
            )));
        }
        let order_len = coeffs[0].len();
        if order_len == 0 {
            return Err(SolveError::BadSystem("empty coefficient rows".into()));
        }
        let r = coeffs[0][0].rows();
        for row in &coeffs {
            if row.len() != order_len {
                return Err(SolveError::BadSystem("ragged coefficient rows".into()));
            }
            for m in row {
                if m.rows() != r || m.cols() != r {
                    return Err(SolveError::BadSystem("coefficient blocks must be square and uniform".into()));
                }
            }
        }
        let order = order_len - 1;
        if coeffs.iter().all(|row| row[order].is_zero()) {
            return Err(SolveError::BadSystem(
                "leading coefficients all zero; lower the derivative order".into(),
            ));
        }
        Ok(NeutralSystem { delays, coeffs, order, block_dim: r })
    }

    /// Scalar system: `coeffs[j][k]` multiplies `y^{(k)}(t + delays[j])`.
    pub fn scalar(delays: Vec<f64>, coeffs: Vec<Vec<C64>>) -> Result<Self, SolveError> {
        let blocks = coeffs
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|c| CMat::from_rows(1, 1, vec![c]))
                    .collect()
            })
            .collect();
        NeutralSystem::new(delays, blocks)
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn coeff(&self, j: usize, k: usize) -> &CMat {
        &self.coeffs[j][k]
    }

    /// Leading delay symbol `Σ_j a_{jn} e^{iω t_j}`.
    pub fn leading_symbol(&self, omega: f64) -> CMat {
        let mut acc = CMat::zeros(self.block_dim, self.block_dim);
        for (j, &delay) in self.delays.iter().enumerate() {
            let phase = C64::cis(omega * delay);
            acc = acc.add(&self.coeffs[j][self.order].scale(phase));
        }
        acc
    }

    /// Grid check that the leading symbol determinant stays away from zero.
    /// The symbol is almost periodic in ω, so a fine grid over a wide range
    /// is a representative heuristic certificate, not a proof.
    pub fn check_leading_symbol(
        &self,
        omega_range: (f64, f64),
        omega_step: f64,
        det_floor: f64,
    ) -> SymbolCheck {
        let mut min_abs = f64::INFINITY;
        let mut argmin = omega_range.0;
        let steps = ((omega_range.1 - omega_range.0) / omega_step).round() as usize;
        for i in 0..=steps {
            let omega = omega_range.0 + i as f64 * omega_step;
            let d = self.leading_symbol(omega).det().norm();
            if d < min_abs {
                min_abs = d;
                argmin = omega;
            }
        }
        SymbolCheck { non_degenerate: min_abs >= det_floor, min_abs_det: min_abs, argmin_omega: argmin }
    }

    /// Applies the operator forward: `f = Σ_{j,k} a_{jk} y^{(k)}(· + t_j)`.
    /// Requires generator-level derivatives of `y` up to the system order.
    pub fn apply(&self, y: &Signal) -> Result<Signal, SolveError> {
        if y.dim() != self.block_dim {
            return Err(SolveError::ForcingDim { got: y.dim(), expected: self.block_dim });
        }
        let mut derivs = vec![y.clone()];
        for _ in 0..self.order {
            let next = derivs.last().unwrap().derivative()?;
            derivs.push(next);
        }
        let mut acc: Option<Signal> = None;
        for (j, &delay) in self.delays.iter().enumerate() {
            for (k, deriv) in derivs.iter().enumerate() {
                let block = &self.coeffs[j][k];
                if block.is_zero() {
                    continue;
                }
                let term = deriv.mat_apply(block.clone())?.translate(delay);
                acc = Some(match acc {
                    None => term,
                    Some(s) => s.add(&term)?,
                });
            }
        }
        Ok(acc.expect("at least one non-zero block"))
    }
}

/// Result of the leading-symbol non-degeneracy grid check.
#[derive(Clone, Copy, Debug)]
pub struct SymbolCheck {
    pub non_degenerate: bool,
    pub min_abs_det: f64,
    pub argmin_omega: f64,
}

/// Delay-free system `Ly = y^{(n)} + Σ_{k<n} a_k y^{(k)}`.
#[derive(Clone, Debug)]
pub struct OdeSystem {
    order: usize,
    block_dim: usize,
    /// `coeffs[k] = a_k` for `k = 0..n−1`.
    coeffs: Vec<CMat>,
}

impl OdeSystem {
    pub fn new(order: usize, block_dim: usize, coeffs: Vec<CMat>) -> Result<Self, SolveError> {
        if order == 0 || block_dim == 0 {
            return Err(SolveError::BadSystem("order and block dimension must be positive".into()));
        }
        if coeffs.len() != order {
            return Err(SolveError::BadSystem(format!(
                "expected {} coefficient blocks, got {}",
                order,
                coeffs.len()
            )));
        }
        for m in &coeffs {
            if m.rows() != block_dim || m.cols() != block_dim {
                return Err(SolveError::BadSystem("coefficient blocks must be r×r".into()));
            }
        }
        Ok(OdeSystem { order, block_dim, coeffs })
    }

    /// Scalar equation `y^{(n)} + Σ c_k y^{(k)} = f` from the coefficients
    /// `c_0..c_{n−1}`.
    pub fn scalar(coeffs: &[f64]) -> OdeSystem {
        OdeSystem::new(
            coeffs.len(),
            1,
            coeffs
                .iter()
                .map(|&c| CMat::from_rows(1, 1, vec![C64::new(c, 0.0)]))
                .collect(),
        )
        .expect("scalar system")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    /// State dimension of the companion system, `r · n`.
    pub fn state_dim(&self) -> usize {
        self.order * self.block_dim
    }

    /// Companion matrix acting on `(y, y′, …, y^{(n−1)})`.
    pub fn companion(&self) -> CMat {
        let r = self.block_dim;
        let n = self.order;
        let d = r * n;
        let mut a = CMat::zeros(d, d);
        for i in 0..n - 1 {
            for c in 0..r {
                a[(i * r + c, (i + 1) * r + c)] = C64::new(1.0, 0.0);
            }
        }
        for (k, block) in self.coeffs.iter().enumerate() {
            for row in 0..r {
                for col in 0..r {
                    a[((n - 1) * r + row, k * r + col)] = -block[(row, col)];
                }
            }
        }
        a
    }

    /// `λ^n I + Σ λ^k a_k`.
    pub fn char_matrix(&self, lambda: C64) -> CMat {
        let r = self.block_dim;
        let mut acc = CMat::identity(r).scale(lambda.powu(self.order as u32));
        let mut power = C64::new(1.0, 0.0);
        for block in &self.coeffs {
            acc = acc.add(&block.scale(power));
            power *= lambda;
        }
        acc
    }

    /// Characteristic roots with multiplicities: eigenvalues of the companion
    /// matrix, clustered to detect repeats.
    pub fn spectrum(&self) -> Vec<(C64, usize)> {
        let roots = poly_roots(&char_poly(&self.companion()));
        let mut clustered: Vec<(C64, usize)> = Vec::new();
        for root in roots {
            let tol = 1e-6 * (1.0 + root.norm());
            match clustered.iter_mut().find(|(c, _)| (*c - root).norm() <= tol) {
                Some((_, mult)) => *mult += 1,
                None => clustered.push((root, 1)),
            }
        }
        clustered
    }

    /// Distance of the spectrum from the imaginary axis.
    pub fn spectral_gap(&self) -> f64 {
        self.spectrum()
            .iter()
            .map(|(l, _)| l.re.abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// View as a single-delay neutral system at delay 0 with identity leading
    /// block.
    pub fn as_neutral(&self) -> NeutralSystem {
        let mut row = self.coeffs.clone();
        row.push(CMat::identity(self.block_dim));
        NeutralSystem::new(vec![0.0], vec![row]).expect("valid single-delay system")
    }

    /// Applies `L` forward at generator level.
    pub fn apply(&self, y: &Signal) -> Result<Signal, SolveError> {
        self.as_neutral().apply(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_leading_block_symbol_is_identity() {
        let sys = NeutralSystem::scalar(vec![0.0], vec![vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        for omega in [-3.0, 0.0, 17.5] {
            let m = sys.leading_symbol(omega);
            assert!((m[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        }
        let check = sys.check_leading_symbol((-50.0, 50.0), 0.01, 0.5);
        assert!(check.non_degenerate);
        assert!((check.min_abs_det - 1.0).abs() < 1e-12);
    }

    #[test]
    fn opposite_delays_cancel_at_omega_one() {
        // Leading blocks 1 at delays 0 and π: symbol 1 + e^{iωπ} vanishes at ω = 1.
        let sys = NeutralSystem::scalar(
            vec![0.0, PI],
            vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]],
        )
        .unwrap();
        let at_one = sys.leading_symbol(1.0);
        assert!(at_one[(0, 0)].norm() < 1e-12);
        let check = sys.check_leading_symbol((-50.0, 50.0), 0.01, 0.5);
        assert!(!check.non_degenerate);
        assert!(check.min_abs_det < 1e-10);
    }

    #[test]
    fn weighted_delays_stay_non_degenerate() {
        // |2 + e^{iω}| ≥ 1 for all ω; the grid minimum sits at the odd
        // multiples of π.
        let sys = NeutralSystem::scalar(
            vec![0.0, 1.0],
            vec![vec![c(0.0, 0.0), c(2.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]],
        )
        .unwrap();
        let check = sys.check_leading_symbol((-50.0, 50.0), 0.01, 0.5);
        assert!(check.non_degenerate);
        assert!(check.min_abs_det >= 1.0 - 1e-6);
        assert!(check.min_abs_det <= 1.0 + 1e-4);
    }

    #[test]
    fn apply_first_order_ode_to_sine() {
        // (d/dt + 1) sin = cos + sin.
        let ode = OdeSystem::scalar(&[1.0]);
        let f = ode.apply(&Signal::sin()).unwrap();
        for &t in &[-2.0f64, 0.0, 0.7, 3.1] {
            let expected = c(t.cos() + t.sin(), 0.0);
            assert!((f.eval(t)[0] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_neutral_system_to_sine() {
        // y′(t) + y′(t−1) + y(t) with y = sin gives cos t + cos(t−1) + sin t.
        let sys = NeutralSystem::scalar(
            vec![-1.0, 0.0],
            vec![
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(1.0, 0.0), c(1.0, 0.0)],
            ],
        )
        .unwrap();
        let f = sys.apply(&Signal::sin()).unwrap();
        for &t in &[-1.0f64, 0.0, 0.4, 2.9] {
            let expected = c(t.cos() + (t - 1.0).cos() + t.sin(), 0.0);
            assert!((f.eval(t)[0] - expected).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn apply_is_character_eigenrelation() {
        // L e^{iωt} = (Σ_{j,k} a_{jk} (iω)^k e^{iω t_j}) e^{iωt}.
        let sys = NeutralSystem::scalar(
            vec![0.0, 0.5],
            vec![
                vec![c(2.0, 0.0), c(1.0, 0.0)],
                vec![c(0.0, 1.0), c(0.5, 0.0)],
            ],
        )
        .unwrap();
        let omega = 1.7;
        let y = Signal::character(omega);
        let f = sys.apply(&y).unwrap();
        let iw = c(0.0, omega);
        let gain = (c(2.0, 0.0) + c(1.0, 0.0) * iw)
            + (c(0.0, 1.0) + c(0.5, 0.0) * iw) * C64::cis(omega * 0.5);
        for &t in &[-1.2, 0.0, 2.4] {
            let expected = gain * C64::cis(omega * t);
            assert!((f.eval(t)[0] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_rejects_non_differentiable_signals() {
        let ode = OdeSystem::scalar(&[1.0]);
        let aa = Signal::aa_step(crate::sequence::AaBranch::Phi);
        assert!(ode.apply(&aa).is_err());
    }

    #[test]
    fn spectrum_of_scalar_systems() {
        // y″ + 3y′ + 2y: roots −1, −2 (quadratic-formula oracle).
        let spec = OdeSystem::scalar(&[2.0, 3.0]).spectrum();
        assert_eq!(spec.len(), 2);
        assert!((spec[0].0 - c(-2.0, 0.0)).norm() < 1e-8);
        assert!((spec[1].0 - c(-1.0, 0.0)).norm() < 1e-8);

        let spec = OdeSystem::scalar(&[1.0]).spectrum();
        assert!((spec[0].0 - c(-1.0, 0.0)).norm() < 1e-10);

        let spec = OdeSystem::scalar(&[-1.0]).spectrum();
        assert!((spec[0].0 - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn spectrum_roots_satisfy_char_matrix() {
        let ode = OdeSystem::scalar(&[2.0, 3.0]);
        for (root, _) in ode.spectrum() {
            assert!(ode.char_matrix(root).det().norm() <= 1e-8);
        }
        // Oscillator y″ + y: ±i exactly on the axis.
        let osc = OdeSystem::scalar(&[1.0, 0.0]);
        let spec = osc.spectrum();
        assert_eq!(spec.len(), 2);
        for (root, _) in &spec {
            assert!(root.re.abs() < 1e-9);
            assert!((root.im.abs() - 1.0).abs() < 1e-9);
        }
        assert!(osc.spectral_gap() < 1e-9);
    }

    #[test]
    fn double_root_detected_with_multiplicity() {
        // y″ + 2y′ + y: root −1 twice.
        let spec = OdeSystem::scalar(&[1.0, 2.0]).spectrum();
        assert_eq!(spec.len(), 1);
        assert_eq!(spec[0].1, 2);
        assert!((spec[0].0 - c(-1.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn applying_ode_to_stacked_signal_requires_matching_dim() {
        let ode = OdeSystem::scalar(&[1.0]);
        let st = Signal::stack(vec![Signal::sin(), Signal::cos()]).unwrap();
        assert!(matches!(
            ode.apply(&st),
            Err(SolveError::ForcingDim { got: 2, expected: 1 })
        ));
    }
}
