//! Perron root of a strictly positive matrix by shifted power iteration.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::SquareMatrix;
use crate::math::abs;
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 100_000;
const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerronResult {
    pub rho: f64,
    /// Strictly positive right eigenvector normalised to sum 1.
    pub right_vector: Vec<f64>,
    pub iterations: usize,
}

impl PerronResult {
    /// `‖m v − ρ v‖_∞`.
    pub fn residual(&self, m: &SquareMatrix) -> f64 {
        m.mul_vec(&self.right_vector)
            .iter()
            .zip(&self.right_vector)
            .map(|(mv, v)| abs(mv - self.rho * v))
            .fold(0.0, f64::max)
    }
}

/// Shifted power iteration from the uniform vector.
///
/// Each step applies `M + cI` with `c` the geometric mean of the current
/// Collatz-Wielandt bounds `min (Mv)_i/v_i ≤ ρ ≤ max (Mv)_i/v_i`. Any positive
/// shift keeps `ρ + c` strictly dominant, and a shift near `ρ` separates it
/// from the near-unimodular eigenvalues of matrices dominated by one long
/// cycle, where plain power iteration stalls. Stops once the bounds agree to
/// `1e-12` relative.
pub fn perron(m: &SquareMatrix) -> Result<PerronResult> {
    let n = m.dim();
    for (i, j, v) in m.iter() {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveEntry { row: i, col: j, value: v });
        }
    }
    let mut v = vec![1.0 / n as f64; n];
    let mut w = vec![0.0; n];
    for it in 1..=MAX_ITERATIONS {
        m.mul_vec_into(&v, &mut w);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (a, b) in v.iter().zip(&w) {
            let r = b / a;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if !(lo > 0.0 && hi.is_finite()) {
            break;
        }
        if hi - lo <= REL_TOL * hi {
            let total: f64 = w.iter().sum();
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / total;
            }
            return Ok(PerronResult { rho: 0.5 * (lo + hi), right_vector: v, iterations: it });
        }
        let c = crate::math::sqrt(lo * hi);
        let total: f64 = w.iter().zip(&v).map(|(wi, vi)| wi + c * vi).sum();
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = (wi + c * *vi) / total;
        }
    }
    Err(Error::PowerIteration { iterations: MAX_ITERATIONS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use rand::Rng;

    #[test]
    fn all_ones() {
        let r = perron(&SquareMatrix::from_fn(2, |_, _| 1.0)).unwrap();
        assert!((r.rho - 2.0).abs() < 1e-14);
        assert_eq!(r.right_vector, vec![0.5, 0.5]);
    }

    #[test]
    fn cycle_dominated_matrix() {
        // εJ + P with P a cyclic permutation: J and P commute and share the
        // ones vector, so ρ = 1 + 3ε while the other eigenvalues sit on the
        // unit circle.
        let eps = 1e-6;
        let m = SquareMatrix::from_fn(3, |i, j| eps + if j == (i + 1) % 3 { 1.0 } else { 0.0 });
        let r = perron(&m).unwrap();
        assert!((r.rho - (1.0 + 3.0 * eps)).abs() < 1e-12);
        assert!(r.right_vector.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-10));
    }

    #[test]
    fn symmetric_two_by_two() {
        let m = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let r = perron(&m).unwrap();
        assert!((r.rho - 3.0).abs() < 1e-12);
        assert!((r.right_vector[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_three_by_three_matches_characteristic_polynomial() {
        let mut rng = trial_rng(2024, 0);
        let m = SquareMatrix::from_fn(3, |_, _| 0.05 + rng.random::<f64>());
        let r = perron(&m).unwrap();
        // Oracle: largest real root of det(λI − M) = λ³ − tr λ² + c₂ λ − det, by bisection
        // between the largest row sum lower bound and the max row sum.
        let a = |i, j| m.get(i, j);
        let tr = a(0, 0) + a(1, 1) + a(2, 2);
        let c2 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2)
            - a(1, 2) * a(2, 1);
        let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        let p = |l: f64| l * l * l - tr * l * l + c2 * l - det;
        let row_sums: Vec<f64> = (0..3).map(|i| m.row(i).iter().sum()).collect();
        let (mut lo, mut hi) = (row_sums.iter().cloned().fold(f64::INFINITY, f64::min), row_sums.iter().cloned().fold(0.0, f64::max));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((r.rho - lo).abs() <= 1e-9 * lo, "{} vs {lo}", r.rho);
        assert!(r.residual(&m) <= 1e-10 * r.rho);
        assert!(r.right_vector.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn rejects_non_positive_entries() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]);
        assert!(matches!(perron(&m), Err(Error::NonPositiveEntry { row: 0, col: 1, .. })));
    }

    #[test]
    fn tiny_entries_converge() {
        let m = SquareMatrix::from_fn(2, |_, _| 2f64.powi(-64));
        let r = perron(&m).unwrap();
        assert!((r.rho - 2f64.powi(-63)).abs() < 1e-12 * 2f64.powi(-63));
    }
}
