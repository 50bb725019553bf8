//! Vector values in ℂ^d and the sup norm.

use num_complex::Complex64;
use smallvec::SmallVec;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// A point value of a signal: a short vector in ℂ^d. Dimensions 1 and 2 stay
/// inline; stacked signals of higher dimension spill to the heap.
pub type Value = SmallVec<[C64; 2]>;

/// Sup norm on ℂ^d: the largest component modulus.
pub fn sup_norm(v: &[C64]) -> f64 {
    v.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// Squared sup norm; avoids the square root in hot comparison loops.
pub fn sup_norm_sqr(v: &[C64]) -> f64 {
    v.iter().fold(0.0f64, |m, z| m.max(z.norm_sqr()))
}

/// Sup norm of the componentwise difference `a - b`.
pub fn sup_dist(a: &[C64], b: &[C64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
}

/// Squared sup norm of the componentwise difference.
pub fn sup_dist_sqr(a: &[C64], b: &[C64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm_sqr()))
}

/// `a + b` componentwise.
pub fn add(a: &[C64], b: &[C64]) -> Value {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `a - b` componentwise.
pub fn sub(a: &[C64], b: &[C64]) -> Value {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `c · a` componentwise.
pub fn scale(c: C64, a: &[C64]) -> Value {
    a.iter().map(|x| c * x).collect()
}

/// Zero vector of dimension `dim`.
pub fn zeros(dim: usize) -> Value {
    smallvec::smallvec![C64::new(0.0, 0.0); dim]
}

/// In-place `acc += c · v`, the workhorse of quadrature accumulation.
pub fn axpy(acc: &mut [C64], c: f64, v: &[C64]) {
    debug_assert_eq!(acc.len(), v.len());
    for (a, x) in acc.iter_mut().zip(v) {
        *a += c * x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use smallvec::smallvec;

    #[test]
    fn sup_norm_picks_largest_component() {
        let v: Value = smallvec![C64::new(3.0, 4.0), C64::new(0.0, 1.0)];
        assert_eq!(sup_norm(&v), 5.0);
        assert_eq!(sup_norm_sqr(&v), 25.0);
    }

    #[test]
    fn dist_is_symmetric_bitwise() {
        let a: Value = smallvec![C64::new(1.0, -2.0)];
        let b: Value = smallvec![C64::new(0.5, 0.25)];
        assert_eq!(sup_dist(&a, &b).to_bits(), sup_dist(&b, &a).to_bits());
    }
}
