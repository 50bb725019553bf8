//! Integer-indexed sequences feeding the piecewise-linear extension.

use serde::{Deserialize, Serialize};

use crate::value::C64;

/// The two almost-automorphic step branches built on the unit circle. The
/// `Phi` step rotates `1 + e^{in}` to the circle; `Psi1`/`Psi2` rotate
/// `1 − e^{in}` and differ only in the hand-picked value at `n = 0`, where the
/// closed form degenerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AaBranch {
    Phi,
    Psi1,
    Psi2,
}

/// Generator descriptor for an integer-indexed sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Sequence {
    /// Almost-automorphic unit-circle step.
    AaStep { branch: AaBranch },
    /// `seq(n) = n`.
    Identity,
    /// Constant complex value.
    Constant { re: f64, im: f64 },
}

impl Sequence {
    /// Value at integer index `n`. Total: the circle steps never divide by
    /// zero at integer arguments since `e^{in} = ∓1` has no integer solution.
    pub fn value(&self, n: i64) -> C64 {
        match self {
            Sequence::AaStep { branch: AaBranch::Phi } => {
                let z = C64::new(1.0, 0.0) + C64::cis(n as f64);
                z / z.norm()
            }
            Sequence::AaStep { branch } => {
                if n == 0 {
                    match branch {
                        AaBranch::Psi1 => C64::new(0.0, 1.0),
                        AaBranch::Psi2 => C64::new(0.0, -1.0),
                        AaBranch::Phi => unreachable!(),
                    }
                } else {
                    let z = C64::new(1.0, 0.0) - C64::cis(n as f64);
                    z / z.norm()
                }
            }
            Sequence::Identity => C64::new(n as f64, 0.0),
            Sequence::Constant { re, im } => C64::new(*re, *im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_at_zero_is_one() {
        let s = Sequence::AaStep { branch: AaBranch::Phi };
        assert!((s.value(0) - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn psi_branches_differ_only_at_zero() {
        let p1 = Sequence::AaStep { branch: AaBranch::Psi1 };
        let p2 = Sequence::AaStep { branch: AaBranch::Psi2 };
        assert_eq!(p1.value(0), C64::new(0.0, 1.0));
        assert_eq!(p2.value(0), C64::new(0.0, -1.0));
        for n in [-7i64, -1, 1, 2, 40] {
            assert_eq!(p1.value(n), p2.value(n));
        }
    }

    #[test]
    fn steps_have_unit_modulus() {
        for branch in [AaBranch::Phi, AaBranch::Psi1, AaBranch::Psi2] {
            let s = Sequence::AaStep { branch };
            for n in -50i64..=50 {
                assert!((s.value(n).norm() - 1.0).abs() < 1e-12, "branch {branch:?} n={n}");
            }
        }
    }
}
