//! Spectral-truncation estimators, their risk-bound curves and Monte Carlo
//! evaluation of the relative error.

mod bounds;
mod mc;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use bounds::{
    concentration_epsilon, empirical_bound, empirical_bound_curve, expected_dmax_sq_bound, ideal_bound_degree,
    ideal_bound_spectral, naive_mse_from_weight, BoundCurve, BoundKind,
};
pub use mc::{relative_error_mc, Estimator, McOptions, McReport, TrialRecord};

pub use crate::linalg::frobenius_distance;

use crate::error::{Error, Result};
use crate::linalg::{dot, LanczosOptions, Matrix, SymmetricOperator, WeightedAdjacency};
use crate::scalar::Scalar;
use crate::spectral::{eig_sym, reconstruct_with, top_modes, EigenSystem};

/// Which basis the retained modes come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Eigenvectors of the true graph.
    Ideal,
    /// Eigenvectors of the debiased observation.
    Empirical,
}

/// `Ŵ = sum_{j<s} c_j v_j v_jᵀ`, held in factored form.
///
/// Implements [`WeightedAdjacency`], so statistics that need only products or
/// row sums never materialise the dense `n x n` matrix.
#[derive(Clone, Debug)]
pub struct DenoiseResult<T> {
    s: usize,
    basis: Basis,
    coefficients: Vec<T>,
    /// Mode-major; only the first `s` rows are used.
    vectors: Arc<Matrix<T>>,
}

impl<T: Scalar> DenoiseResult<T> {
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn vector(&self, j: usize) -> &[T] {
        self.vectors.row(j)
    }

    /// The dense estimate.
    pub fn matrix(&self) -> Matrix<T> {
        reconstruct_with(&self.coefficients, &self.vectors)
    }

    /// `1ᵀ v_j` for each retained mode.
    fn mode_sums(&self) -> Vec<T> {
        (0..self.s).map(|j| self.vectors.row(j).iter().copied().sum()).collect()
    }

    /// `‖Ŵ‖_F² = sum c_j²`, since the retained modes are orthonormal.
    pub fn frobenius_norm_sq(&self) -> T {
        self.coefficients.iter().map(|&c| c * c).sum()
    }

    /// `<Ŵ, A>_F = sum_j c_j v_jᵀ A v_j`.
    pub fn inner_with<A: SymmetricOperator<T> + ?Sized>(&self, a: &A) -> T {
        let mut y = vec![T::zero(); self.dim()];
        let mut acc = T::zero();
        for (j, &c) in self.coefficients.iter().enumerate() {
            let v = self.vectors.row(j);
            a.apply(v, &mut y);
            acc += c * dot(v, &y);
        }
        acc
    }
}

impl<T: Scalar> SymmetricOperator<T> for DenoiseResult<T> {
    fn dim(&self) -> usize {
        self.vectors.cols()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        y.iter_mut().for_each(|v| *v = T::zero());
        for (j, &c) in self.coefficients.iter().enumerate() {
            let v = self.vectors.row(j);
            let a = c * dot(v, x);
            crate::linalg::axpy(a, v, y);
        }
    }
}

impl<T: Scalar> WeightedAdjacency<T> for DenoiseResult<T> {
    fn entry(&self, i: usize, j: usize) -> T {
        self.coefficients.iter().enumerate().map(|(k, &c)| c * self.vectors.get(k, i) * self.vectors.get(k, j)).sum()
    }

    fn row_into(&self, i: usize, out: &mut [T]) {
        out.iter_mut().for_each(|v| *v = T::zero());
        for (k, &c) in self.coefficients.iter().enumerate() {
            let v = self.vectors.row(k);
            crate::linalg::axpy(c * v[i], v, out);
        }
    }

    fn row_sums(&self) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim()];
        for ((k, &c), sum) in self.coefficients.iter().enumerate().zip(self.mode_sums()) {
            crate::linalg::axpy(c * sum, self.vectors.row(k), &mut y);
        }
        y
    }

    fn total_weight(&self) -> T {
        self.coefficients.iter().zip(self.mode_sums()).map(|(&c, m)| c * m * m).sum()
    }

    fn to_matrix(&self) -> Matrix<T> {
        self.matrix()
    }
}

fn check_rank(s: usize, n: usize) -> Result<()> {
    if s == 0 || s > n {
        Err(Error::RankOutOfRange { s, n })
    } else {
        Ok(())
    }
}

/// Projects `W̃` onto the leading `s` eigenvectors of the true graph:
/// `sum_{j<s} <ψ_j, W̃ ψ_j> ψ_j ψ_jᵀ`.
///
/// When `true_sys` carries a Kronecker factorisation and `s` is large, all
/// quadratic forms are computed together through it.
pub fn ideal_estimator<T, A>(w_tilde: &A, true_sys: &EigenSystem<T>, s: usize) -> Result<DenoiseResult<T>>
where
    T: Scalar,
    A: WeightedAdjacency<T> + ?Sized,
{
    check_rank(s, true_sys.len())?;
    if w_tilde.dim() != true_sys.n() {
        return Err(Error::dims(format!("W̃ has n = {}, eigensystem has n = {}", w_tilde.dim(), true_sys.n())));
    }
    let coefficients = match true_sys.kron() {
        Some(k) if s > k.sizes().iter().sum::<usize>() + 2 => {
            let mut forms = k.quadratic_forms(|a, buf| w_tilde.row_into(a, buf));
            forms.truncate(s);
            forms
        }
        _ => {
            let mut y = vec![T::zero(); true_sys.n()];
            (0..s)
                .map(|j| {
                    let v = true_sys.vector(j);
                    w_tilde.apply(v, &mut y);
                    dot(v, &y)
                })
                .collect()
        }
    };
    Ok(DenoiseResult { s, basis: Basis::Ideal, coefficients, vectors: true_sys.shared_vectors() })
}

/// Keeps the `s` eigenmodes of `W̃` largest in squared eigenvalue.
///
/// Uses Lanczos for `s` small relative to `n` and the dense solver otherwise.
pub fn empirical_estimator<T, A>(w_tilde: &A, s: usize, opts: &LanczosOptions) -> Result<DenoiseResult<T>>
where
    T: Scalar,
    A: WeightedAdjacency<T> + ?Sized,
{
    let n = w_tilde.dim();
    check_rank(s, n)?;
    let sys = if n <= 64 || 4 * s > n { eig_sym(w_tilde)?.truncated(s)? } else { top_modes(w_tilde, s, opts)? };
    Ok(DenoiseResult { s, basis: Basis::Empirical, coefficients: sys.values().to_vec(), vectors: sys.shared_vectors() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, star_graph, AdjacencyMatrix};
    use crate::spectral::{cycle_eigensystem, neps_eigensystem};

    #[test]
    fn noiseless_ideal_reconstructs() {
        let g: AdjacencyMatrix<f64> = cycle_graph(7).unwrap();
        let sys = eig_sym(&g).unwrap();
        let full = ideal_estimator(&g, &sys, 7).unwrap();
        assert!(frobenius_distance(&full.matrix(), &g.to_dense()).unwrap() < 1e-10);

        let part = ideal_estimator(&g, &sys, 3).unwrap();
        let tail: f64 = sys.values()[3..].iter().map(|v| v * v).sum();
        let err = frobenius_distance(&part.matrix(), &g.to_dense()).unwrap();
        assert!((err * err - tail).abs() < 1e-10);
        for (c, l) in part.coefficients().iter().zip(sys.values()) {
            assert!((c - l).abs() < 1e-12);
        }
    }

    #[test]
    fn kron_path_matches_direct_forms() {
        let c5 = cycle_eigensystem::<f64>(5).unwrap();
        let sys = neps_eigensystem(&[c5.clone(), c5], &crate::graph::NepsBasis::cartesian(2)).unwrap();
        let a = Matrix::from_fn(25, 25, |i, j| if i == j { 0.0 } else { ((i * j + i + j) as f64 * 0.3).sin() });
        let a = a.symmetrized();
        let fast = ideal_estimator(&a, &sys, 20).unwrap();
        for j in 0..20 {
            let v = sys.vector(j);
            let want = dot(v, &a.matvec(v));
            assert!((fast.coefficients()[j] - want).abs() < 1e-10);
        }
    }

    #[test]
    fn empirical_full_rank_reproduces_input() {
        let a = Matrix::from_fn(9, 9, |i, j| if i == j { 0.0 } else { 1.0 / (1.0 + (i + j) as f64) });
        let est = empirical_estimator(&a, 9, &LanczosOptions::default()).unwrap();
        assert!(frobenius_distance(&est.matrix(), &a).unwrap() < 1e-10);
        assert_eq!(est.basis(), Basis::Empirical);
    }

    #[test]
    fn factored_operations_agree_with_dense() {
        let g: AdjacencyMatrix<f64> = star_graph(4).unwrap();
        let est = empirical_estimator(&g, 2, &LanczosOptions::default()).unwrap();
        let dense = est.matrix();
        assert!((est.total_weight() - dense.sum()).abs() < 1e-12);
        assert!((est.frobenius_norm_sq() - dense.frobenius_norm_sq()).abs() < 1e-12);
        let sums = est.row_sums();
        let mut row = vec![0.0; 5];
        for i in 0..5 {
            est.row_into(i, &mut row);
            assert!((sums[i] - row.iter().sum::<f64>()).abs() < 1e-12);
            for j in 0..5 {
                assert!((est.entry(i, j) - dense.get(i, j)).abs() < 1e-12);
                assert!((row[j] - dense.get(i, j)).abs() < 1e-12);
            }
        }
        assert!(
            (est.inner_with(&g) - dense.data().iter().zip(g.to_dense().data()).map(|(a, b)| a * b).sum::<f64>()).abs()
                < 1e-12
        );
    }

    #[test]
    fn rank_and_shape_errors() {
        let g: AdjacencyMatrix<f64> = cycle_graph(5).unwrap();
        let sys = eig_sym(&g).unwrap();
        assert!(matches!(ideal_estimator(&g, &sys, 0), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(ideal_estimator(&g, &sys, 6), Err(Error::RankOutOfRange { .. })));
        let other: AdjacencyMatrix<f64> = cycle_graph(6).unwrap();
        assert!(matches!(ideal_estimator(&other, &sys, 2), Err(Error::DimensionMismatch(_))));
        assert!(matches!(empirical_estimator(&g, 6, &LanczosOptions::default()), Err(Error::RankOutOfRange { .. })));
    }
}
