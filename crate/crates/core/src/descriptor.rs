//! Declarative descriptors for signals and systems.
//!
//! A signal document is a generator plus a combinator pipeline; systems carry
//! their delays and coefficient blocks as nested `[re, im]` arrays. Building
//! a descriptor and re-serializing it is idempotent: `parse → serialize →
//! parse` reproduces the same signal (constructors canonicalize nested
//! translations and scalings, and both parses canonicalize identically).

use serde::{Deserialize, Serialize};

use crate::error::{SignalError, SolveError};
use crate::linalg::CMat;
use crate::neutral::{NeutralSystem, OdeSystem};
use crate::sequence::{AaBranch, Sequence};
use crate::signal::{Node, Signal};
use crate::value::{Value, C64};

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

/// One character term of a trigonometric polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub re: f64,
    pub im: f64,
    pub omega: f64,
}

/// Generator descriptors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    TrigPoly { terms: Vec<TrigTerm> },
    Chirp,
    PolyChirp { coeffs: Vec<[f64; 2]> },
    AaStep { branch: AaBranch },
    LinearExtension { seq: Sequence },
    Lacunary { order: u32 },
    Constant { value: Vec<[f64; 2]> },
    Sampled { start: f64, step: f64, dim: usize, data: Vec<[f64; 2]> },
    Sum { parts: Vec<SignalSpec> },
    Stack { parts: Vec<SignalSpec> },
}

/// Pipeline combinators, applied in order on top of the generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OpSpec {
    Translate { s: f64 },
    Difference { h: f64 },
    RunningMean { h: f64 },
    Integral { base: f64 },
    Character { omega: f64 },
    Scale { re: f64, im: f64 },
    MatApply { matrix: Vec<Vec<[f64; 2]>> },
}

/// A full signal document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub generator: GeneratorSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pipeline: Vec<OpSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_tol: Option<f64>,
}

impl SignalSpec {
    /// Builds the signal described by this document.
    pub fn build(&self) -> Result<Signal, SignalError> {
        let mut sig = match &self.generator {
            GeneratorSpec::TrigPoly { terms } => Signal::trig_poly(
                terms
                    .iter()
                    .map(|t| (C64::new(t.re, t.im), t.omega))
                    .collect(),
            ),
            GeneratorSpec::Chirp => Signal::chirp(),
            GeneratorSpec::PolyChirp { coeffs } => {
                Signal::poly_chirp(coeffs.iter().map(|&p| unpair(p)).collect())
            }
            GeneratorSpec::AaStep { branch } => Signal::aa_step(*branch),
            GeneratorSpec::LinearExtension { seq } => Signal::linear_extension(seq.clone()),
            GeneratorSpec::Lacunary { order } => Signal::lacunary(*order)?,
            GeneratorSpec::Constant { value } => {
                let v: Value = value.iter().map(|&p| unpair(p)).collect();
                Signal::constant(v)?
            }
            GeneratorSpec::Sampled { start, step, dim, data } => {
                Signal::sampled(*start, *step, *dim, data.iter().map(|&p| unpair(p)).collect())?
            }
            GeneratorSpec::Sum { parts } => {
                let mut built = parts.iter().map(|p| p.build());
                let first = built
                    .next()
                    .ok_or(SignalError::EmptyList)??;
                built.try_fold(first, |acc, next| acc.add(&next?))?
            }
            GeneratorSpec::Stack { parts } => {
                let built: Result<Vec<_>, _> = parts.iter().map(|p| p.build()).collect();
                Signal::stack(built?)?
            }
        };
        if let Some(tol) = self.quad_tol {
            if !(tol > 0.0) {
                return Err(SignalError::Config(format!("quad_tol must be positive, got {tol}")));
            }
            sig = sig.with_quad_tol(tol);
        }
        for op in &self.pipeline {
            sig = match op {
                OpSpec::Translate { s } => sig.translate(*s),
                OpSpec::Difference { h } => sig.difference(*h)?,
                OpSpec::RunningMean { h } => sig.running_mean(*h)?,
                OpSpec::Integral { base } => sig.indefinite_integral(*base),
                OpSpec::Character { omega } => sig.character_multiply(*omega),
                OpSpec::Scale { re, im } => sig.scale(C64::new(*re, *im)),
                OpSpec::MatApply { matrix } => {
                    let rows = matrix.len();
                    let cols = matrix.first().map(|r| r.len()).unwrap_or(0);
                    if rows == 0 || cols == 0 || matrix.iter().any(|r| r.len() != cols) {
                        return Err(SignalError::Config("matrix must be rectangular".into()));
                    }
                    let data = matrix.iter().flatten().map(|&p| unpair(p)).collect();
                    sig.mat_apply(CMat::from_rows(rows, cols, data))?
                }
            };
        }
        Ok(sig)
    }

    /// Reconstructs a document from a signal tree.
    pub fn from_signal(sig: &Signal) -> SignalSpec {
        let mut pipeline = Vec::new();
        let mut node = sig.node();
        let generator = loop {
            match node {
                Node::Translate { inner, offset } => {
                    pipeline.push(OpSpec::Translate { s: *offset });
                    node = inner.node();
                }
                Node::Difference { inner, step } => {
                    pipeline.push(OpSpec::Difference { h: *step });
                    node = inner.node();
                }
                Node::RunningMean { inner, width, .. } => {
                    pipeline.push(OpSpec::RunningMean { h: *width });
                    node = inner.node();
                }
                Node::Integral { inner, cache } => {
                    pipeline.push(OpSpec::Integral { base: cache.base() });
                    node = inner.node();
                }
                Node::CharacterMul { inner, omega } => {
                    pipeline.push(OpSpec::Character { omega: *omega });
                    node = inner.node();
                }
                Node::Scale { factor, inner } => {
                    pipeline.push(OpSpec::Scale { re: factor.re, im: factor.im });
                    node = inner.node();
                }
                Node::MatApply { mat, inner } => {
                    let matrix = (0..mat.rows())
                        .map(|i| (0..mat.cols()).map(|j| pair(&mat[(i, j)])).collect())
                        .collect();
                    pipeline.push(OpSpec::MatApply { matrix });
                    node = inner.node();
                }
                Node::TrigPoly { terms } => {
                    break GeneratorSpec::TrigPoly {
                        terms: terms
                            .iter()
                            .map(|(c, omega)| TrigTerm { re: c.re, im: c.im, omega: *omega })
                            .collect(),
                    }
                }
                Node::PolyChirp { coeffs } => {
                    break if coeffs.len() == 1 && coeffs[0] == C64::new(1.0, 0.0) {
                        GeneratorSpec::Chirp
                    } else {
                        GeneratorSpec::PolyChirp { coeffs: coeffs.iter().map(pair).collect() }
                    }
                }
                Node::LinearExt { seq } => {
                    break match seq {
                        Sequence::AaStep { branch } => GeneratorSpec::AaStep { branch: *branch },
                        other => GeneratorSpec::LinearExtension { seq: other.clone() },
                    }
                }
                Node::Lacunary { order } => break GeneratorSpec::Lacunary { order: *order },
                Node::Constant { value } => {
                    break GeneratorSpec::Constant { value: value.iter().map(pair).collect() }
                }
                Node::Sampled { start, step, dim, data } => {
                    break GeneratorSpec::Sampled {
                        start: *start,
                        step: *step,
                        dim: *dim,
                        data: data.iter().map(pair).collect(),
                    }
                }
                Node::Sum { left, right } => {
                    break GeneratorSpec::Sum {
                        parts: vec![SignalSpec::from_signal(left), SignalSpec::from_signal(right)],
                    }
                }
                Node::Stack { parts } => {
                    break GeneratorSpec::Stack {
                        parts: parts.iter().map(SignalSpec::from_signal).collect(),
                    }
                }
            }
        };
        pipeline.reverse();
        SignalSpec { generator, pipeline, quad_tol: Some(sig.quad_tol()) }
    }

    /// Builtin shorthand signals accepted wherever a descriptor is expected.
    pub fn named(name: &str) -> Option<SignalSpec> {
        let sig = match name {
            "sin" => Signal::sin(),
            "cos" => Signal::cos(),
            "chirp" => Signal::chirp(),
            "aa_step" | "aa_phi" => Signal::aa_step(AaBranch::Phi),
            "aa_psi1" => Signal::aa_step(AaBranch::Psi1),
            "aa_psi2" => Signal::aa_step(AaBranch::Psi2),
            "quasi_periodic" => Signal::sin()
                .add(&Signal::trig_poly(vec![
                    (C64::new(0.0, -0.5), std::f64::consts::SQRT_2),
                    (C64::new(0.0, 0.5), -std::f64::consts::SQRT_2),
                ]))
                .expect("equal dims"),
            _ => return None,
        };
        Some(SignalSpec::from_signal(&sig))
    }
}

/// System documents: the delay-free operator or the general neutral one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    /// `y^{(n)} + Σ_{k<n} a_k y^{(k)}`; `coeffs[k][row][col] = [re, im]`.
    Ode { coeffs: Vec<Vec<Vec<[f64; 2]>>> },
    /// `Σ_{j,k} a_{jk} y^{(k)}(· + t_j)`; `coeffs[j][k][row][col]`.
    Neutral { delays: Vec<f64>, coeffs: Vec<Vec<Vec<Vec<[f64; 2]>>>> },
}

fn block_from(rows: &[Vec<[f64; 2]>]) -> Result<CMat, SolveError> {
    let r = rows.len();
    if r == 0 || rows.iter().any(|row| row.len() != r) {
        return Err(SolveError::BadSystem("coefficient blocks must be square".into()));
    }
    let data = rows.iter().flatten().map(|&p| unpair(p)).collect();
    Ok(CMat::from_rows(r, r, data))
}

fn block_to(mat: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..mat.rows())
        .map(|i| (0..mat.cols()).map(|j| pair(&mat[(i, j)])).collect())
        .collect()
}

impl SystemSpec {
    pub fn build_ode(&self) -> Result<OdeSystem, SolveError> {
        match self {
            SystemSpec::Ode { coeffs } => {
                let blocks: Result<Vec<_>, _> = coeffs.iter().map(|b| block_from(b)).collect();
                let blocks = blocks?;
                let r = blocks.first().map(|b| b.rows()).unwrap_or(0);
                OdeSystem::new(blocks.len(), r, blocks)
            }
            SystemSpec::Neutral { .. } => Err(SolveError::BadSystem(
                "neutral systems support forward application only; use an ode document for solving"
                    .into(),
            )),
        }
    }

    pub fn build_neutral(&self) -> Result<NeutralSystem, SolveError> {
        match self {
            SystemSpec::Neutral { delays, coeffs } => {
                let rows: Result<Vec<Vec<CMat>>, _> = coeffs
                    .iter()
                    .map(|row| row.iter().map(|b| block_from(b)).collect())
                    .collect();
                NeutralSystem::new(delays.clone(), rows?)
            }
            SystemSpec::Ode { .. } => self.build_ode().map(|ode| ode.as_neutral()),
        }
    }

    pub fn from_ode(ode: &OdeSystem) -> SystemSpec {
        SystemSpec::Ode { coeffs: ode.coeffs().iter().map(block_to).collect() }
    }

    pub fn from_neutral(sys: &NeutralSystem) -> SystemSpec {
        SystemSpec::Neutral {
            delays: sys.delays().to_vec(),
            coeffs: (0..sys.delays().len())
                .map(|j| (0..=sys.order()).map(|k| block_to(sys.coeff(j, k))).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_serialize_parse_is_identity() {
        let doc = r#"{
            "generator": {"trig_poly": {"terms": [
                {"re": 0.0, "im": -0.5, "omega": 1.0},
                {"re": 0.0, "im": 0.5, "omega": -1.0}
            ]}},
            "pipeline": [
                {"translate": {"s": 0.5}},
                {"translate": {"s": 0.25}},
                {"integral": {"base": 0.0}},
                {"difference": {"h": 1.0}},
                {"scale": {"re": 2.0, "im": 0.0}}
            ]
        }"#;
        let spec: SignalSpec = serde_json::from_str(doc).unwrap();
        let sig1 = spec.build().unwrap();
        let text = serde_json::to_string(&SignalSpec::from_signal(&sig1)).unwrap();
        let spec2: SignalSpec = serde_json::from_str(&text).unwrap();
        let sig2 = spec2.build().unwrap();
        assert_eq!(sig1, sig2);
        // Idempotence at the document level.
        let text2 = serde_json::to_string(&SignalSpec::from_signal(&sig2)).unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn stacked_documents_round_trip() {
        let sig = Signal::stack(vec![
            Signal::sin().character_multiply(2.0),
            Signal::aa_step(AaBranch::Psi2),
        ])
        .unwrap()
        .translate(-1.5);
        let spec = SignalSpec::from_signal(&sig);
        let rebuilt = spec.build().unwrap();
        assert_eq!(sig, rebuilt);
        for &t in &[-3.0, 0.0, 1.7] {
            assert_eq!(sig.eval(t), rebuilt.eval(t));
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let doc = r#"{"generator": "chirp", "pipline": []}"#;
        assert!(serde_json::from_str::<SignalSpec>(doc).is_err());
        let doc = r#"{"generator": {"lacunary": {"order": 3, "mystery": 1}}}"#;
        assert!(serde_json::from_str::<SignalSpec>(doc).is_err());
        let doc = r#"{"generator": {"lacunary": {"order": 3}}}"#;
        assert!(serde_json::from_str::<SignalSpec>(doc).is_ok());
    }

    #[test]
    fn named_shorthands_build() {
        for name in ["sin", "cos", "chirp", "aa_step", "aa_psi1", "aa_psi2", "quasi_periodic"] {
            let spec = SignalSpec::named(name).unwrap();
            let sig = spec.build().unwrap();
            assert_eq!(sig.dim(), 1);
        }
        assert!(SignalSpec::named("nope").is_none());
    }

    #[test]
    fn ode_system_document_round_trips() {
        let ode = OdeSystem::scalar(&[2.0, 3.0]);
        let spec = SystemSpec::from_ode(&ode);
        let text = serde_json::to_string(&spec).unwrap();
        let spec2: SystemSpec = serde_json::from_str(&text).unwrap();
        let ode2 = spec2.build_ode().unwrap();
        assert_eq!(ode2.order(), 2);
        assert_eq!(ode2.coeffs(), ode.coeffs());
    }

    #[test]
    fn neutral_system_document_round_trips() {
        let sys = NeutralSystem::scalar(
            vec![-1.0, 0.0],
            vec![
                vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
                vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            ],
        )
        .unwrap();
        let spec = SystemSpec::from_neutral(&sys);
        let sys2 = spec.build_neutral().unwrap();
        assert_eq!(sys2.delays(), sys.delays());
        assert_eq!(sys2.coeff(1, 0), sys.coeff(1, 0));
    }

    #[test]
    fn quad_tol_must_be_positive() {
        let spec = SignalSpec {
            generator: GeneratorSpec::Chirp,
            pipeline: vec![],
            quad_tol: Some(-1.0),
        };
        assert!(spec.build().is_err());
    }
}
