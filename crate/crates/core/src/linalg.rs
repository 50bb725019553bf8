//! Small dense complex matrices.
//!
//! Companion matrices of the systems handled here are tiny (a handful of
//! rows), so a plain row-major `Vec<C64>` with partial-pivot LU covers
//! everything: determinants for the leading-symbol check, inverses for the
//! sign-function Newton iteration, and the scaling-and-squaring exponential
//! used by the marches.

use crate::value::C64;

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from row-major scalar data; length must be `rows * cols`.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        CMat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.norm_sqr() == 0.0)
    }

    pub fn scale(&self, c: C64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| c * z).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Maximum absolute row sum (operator norm induced by the sup norm).
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Determinant via partial-pivot LU.
    pub fn det(&self) -> C64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[i * n + col]
                        .norm_sqr()
                        .partial_cmp(&a[j * n + col].norm_sqr())
                        .unwrap()
                })
                .unwrap();
            if a[pivot * n + col].norm_sqr() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for i in col + 1..n {
                let f = a[i * n + col] / p;
                for j in col..n {
                    let s = a[col * n + j];
                    a[i * n + j] -= f * s;
                }
            }
        }
        det
    }

    /// Solves `self * X = B` for possibly many right-hand sides.
    pub fn solve(&self, b: &CMat) -> Option<CMat> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, b.rows);
        let n = self.rows;
        let m = b.cols;
        let mut a = self.data.clone();
        let mut x = b.data.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[i * n + col]
                        .norm_sqr()
                        .partial_cmp(&a[j * n + col].norm_sqr())
                        .unwrap()
                })
                .unwrap();
            if a[pivot * n + col].norm_sqr() == 0.0 {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                for j in 0..m {
                    x.swap(col * m + j, pivot * m + j);
                }
            }
            let p = a[col * n + col];
            for i in col + 1..n {
                let f = a[i * n + col] / p;
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let s = a[col * n + j];
                    a[i * n + j] -= f * s;
                }
                for j in 0..m {
                    let s = x[col * m + j];
                    x[i * m + j] -= f * s;
                }
            }
        }
        for col in (0..n).rev() {
            let p = a[col * n + col];
            for j in 0..m {
                let mut acc = x[col * m + j];
                for k in col + 1..n {
                    acc -= a[col * n + k] * x[k * m + j];
                }
                x[col * m + j] = acc / p;
            }
        }
        Some(CMat { rows: n, cols: m, data: x })
    }

    pub fn inverse(&self) -> Option<CMat> {
        self.solve(&CMat::identity(self.rows))
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Matrix exponential by scaling and squaring with the order-13 Padé
/// approximant (Higham's constants).
pub fn expm(a: &CMat) -> CMat {
    const THETA_13: f64 = 5.371920351148152;
    let n = a.rows();
    let norm = a.inf_norm();
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a_scaled = a.scale(C64::new(1.0 / 2f64.powi(squarings as i32), 0.0));

    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];

    let a2 = a_scaled.mul(&a_scaled);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);
    let id = CMat::identity(n);
    let c = |k: usize| C64::new(B[k], 0.0);

    // U = A * (A6*(b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let u_inner = a6
        .scale(c(13))
        .add(&a4.scale(c(11)))
        .add(&a2.scale(c(9)));
    let u = a_scaled.mul(
        &a6.mul(&u_inner)
            .add(&a6.scale(c(7)))
            .add(&a4.scale(c(5)))
            .add(&a2.scale(c(3)))
            .add(&id.scale(c(1))),
    );
    // V = A6*(b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let v_inner = a6
        .scale(c(12))
        .add(&a4.scale(c(10)))
        .add(&a2.scale(c(8)));
    let v = a6
        .mul(&v_inner)
        .add(&a6.scale(c(6)))
        .add(&a4.scale(c(4)))
        .add(&a2.scale(c(2)))
        .add(&id.scale(c(0)));

    let mut r = v
        .sub(&u)
        .solve(&v.add(&u))
        .expect("Padé denominator singular");
    for _ in 0..squarings {
        r = r.mul(&r);
    }
    r
}

/// Matrix sign function via the scaled Newton iteration. Requires no
/// eigenvalues on the imaginary axis; the spectral projections onto the
/// stable and unstable invariant subspaces are `(I ∓ sign(A)) / 2`.
pub fn matrix_sign(a: &CMat) -> Option<CMat> {
    let n = a.rows();
    let mut x = a.clone();
    for _ in 0..100 {
        let inv = x.inverse()?;
        // Determinantal scaling accelerates the early phase.
        let d = x.det().norm().powf(-1.0 / n as f64);
        let scale = if d.is_finite() && d > 0.0 { d } else { 1.0 };
        let next = x
            .scale(C64::new(0.5 * scale, 0.0))
            .add(&inv.scale(C64::new(0.5 / scale, 0.0)));
        let delta = next.sub(&x).inf_norm();
        x = next;
        if delta <= 1e-14 * x.inf_norm().max(1.0) {
            break;
        }
    }
    Some(x)
}

/// Characteristic polynomial coefficients by the Faddeev–LeVerrier recursion.
/// Returns `c` with `det(λI − A) = λ^n + c[n-1] λ^{n-1} + … + c[0]`.
pub fn char_poly(a: &CMat) -> Vec<C64> {
    let n = a.rows();
    let mut coeffs = vec![C64::new(0.0, 0.0); n];
    let mut m = CMat::identity(n);
    for k in 1..=n {
        m = a.mul(&m);
        let c = -m.trace() / (k as f64);
        for i in 0..n {
            m[(i, i)] += c;
        }
        coeffs[n - k] = c;
    }
    coeffs
}

/// All roots of a monic polynomial `λ^n + c[n-1] λ^{n-1} + … + c[0]` by the
/// Durand–Kerner simultaneous iteration. Deterministic starting circle.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len();
    if n == 0 {
        return Vec::new();
    }
    let eval = |z: C64| -> C64 {
        let mut p = C64::new(1.0, 0.0);
        for &c in coeffs.iter().rev() {
            p = p * z + c;
        }
        p
    };
    // Radius from the Cauchy bound keeps the start circle outside all roots.
    let radius = 1.0 + coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            C64::new(radius * angle.cos(), radius * angle.sin())
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm_sqr() == 0.0 {
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 * radius {
            break;
        }
    }
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn det_and_inverse_2x2() {
        let m = CMat::from_rows(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        assert!((m.det() - c(-2.0, 0.0)).norm() < 1e-14);
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        assert!(prod.sub(&CMat::identity(2)).inf_norm() < 1e-13);
    }

    #[test]
    fn expm_matches_scalar_exponential() {
        let m = CMat::from_rows(1, 1, vec![c(0.0, 1.0)]);
        let e = expm(&m);
        assert!((e[(0, 0)] - C64::cis(1.0)).norm() < 1e-14);

        // Rotation block: exp([[0,-1],[1,0]] t) = [[cos,-sin],[sin,cos]].
        let t = 0.7;
        let rot = CMat::from_rows(
            2,
            2,
            vec![c(0.0, 0.0), c(-t, 0.0), c(t, 0.0), c(0.0, 0.0)],
        );
        let e = expm(&rot);
        assert!((e[(0, 0)] - c(t.cos(), 0.0)).norm() < 1e-13);
        assert!((e[(1, 0)] - c(t.sin(), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        let m = CMat::from_rows(1, 1, vec![c(-20.0, 0.0)]);
        let e = expm(&m);
        assert!((e[(0, 0)].re - (-20.0f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn sign_splits_stable_and_unstable() {
        // diag(-1, +2) → sign = diag(-1, +1).
        let m = CMat::from_rows(
            2,
            2,
            vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        );
        let s = matrix_sign(&m).unwrap();
        assert!((s[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((s[(1, 1)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(s[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn roots_of_quadratic() {
        // λ² + 3λ + 2 → {-1, -2}
        let roots = poly_roots(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((roots[0] - c(-2.0, 0.0)).norm() < 1e-10);
        assert!((roots[1] - c(-1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn char_poly_of_companion() {
        // Companion of λ² + 3λ + 2.
        let a = CMat::from_rows(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0), c(-3.0, 0.0)],
        );
        let p = char_poly(&a);
        assert!((p[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((p[1] - c(3.0, 0.0)).norm() < 1e-12);
    }
}
