//! Eigensystems in canonical order: descending squared eigenvalue, then
//! descending eigenvalue, then ascending discovery index.

mod analytic;
mod io;
mod kron;

pub use analytic::{cycle_eigensystem, neps_eigensystem, path_eigensystem};
pub use io::{read_eigensystem_csv, write_eigensystem_csv};
pub use kron::KronStructure;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    axpy, dot, eig_sym_dense, lanczos_top, LanczosOptions, Matrix, SymmetricOperator, WeightedAdjacency,
};
use crate::scalar::Scalar;

/// Input symmetry tolerance for [`eig_sym`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Relative width of a cluster of equal squared eigenvalues.
pub const TIE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Numeric,
    Analytic,
}

/// Eigenvalues with unit eigenvectors, in canonical order.
///
/// Vectors are stored mode-major: row `j` of [`EigenSystem::vectors`] is the
/// eigenvector of `values[j]`. A partial system (from [`top_modes`] or
/// [`EigenSystem::truncated`]) holds fewer than `n` modes.
#[derive(Clone, Debug)]
pub struct EigenSystem<T> {
    n: usize,
    values: Vec<T>,
    vectors: Arc<Matrix<T>>,
    source: Source,
    kron: Option<Arc<KronStructure<T>>>,
}

impl<T: Scalar> EigenSystem<T> {
    /// Assembles a system from unordered pairs; `vectors` row `j` belongs to
    /// `values[j]`, and row order is the discovery order used for tie-breaks.
    pub fn from_pairs(values: Vec<T>, vectors: Matrix<T>, source: Source) -> Result<Self> {
        if values.len() != vectors.rows() {
            return Err(Error::dims(format!("{} values for {} vectors", values.len(), vectors.rows())));
        }
        let order = canonical_order(&values);
        let n = vectors.cols();
        let mut sorted = Matrix::zeros(order.len(), n);
        for (dst, &src) in order.iter().enumerate() {
            let row = sorted.row_mut(dst);
            row.copy_from_slice(vectors.row(src));
            apply_sign_convention(row);
        }
        Ok(Self {
            n,
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: Arc::new(sorted),
            source,
            kron: None,
        })
    }

    /// Wraps modes that are already in canonical order with signs fixed.
    pub(crate) fn from_sorted(values: Vec<T>, vectors: Matrix<T>, source: Source) -> Self {
        Self { n: vectors.cols(), values, vectors: Arc::new(vectors), source, kron: None }
    }

    pub(crate) fn with_kron(mut self, kron: KronStructure<T>) -> Self {
        self.kron = Some(Arc::new(kron));
        self
    }

    /// Dimension of the space the vectors live in.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of modes held.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.values.len() == self.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn vectors(&self) -> &Matrix<T> {
        &self.vectors
    }

    pub(crate) fn shared_vectors(&self) -> Arc<Matrix<T>> {
        Arc::clone(&self.vectors)
    }

    pub fn vector(&self, j: usize) -> &[T] {
        self.vectors.row(j)
    }

    /// The `n x k` matrix whose columns are the eigenvectors.
    pub fn vectors_as_columns(&self) -> Matrix<T> {
        self.vectors.transpose()
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn kron(&self) -> Option<&KronStructure<T>> {
        self.kron.as_deref()
    }

    /// Squared eigenvalues in canonical order.
    pub fn squared_values(&self) -> Vec<T> {
        self.values.iter().map(|&v| v * v).collect()
    }

    /// The leading `s` modes.
    pub fn truncated(&self, s: usize) -> Result<Self> {
        if s == 0 || s > self.len() {
            return Err(Error::RankOutOfRange { s, n: self.len() });
        }
        if s == self.len() {
            return Ok(self.clone());
        }
        let mut v = Matrix::zeros(s, self.n);
        for j in 0..s {
            v.row_mut(j).copy_from_slice(self.vectors.row(j));
        }
        Ok(Self {
            n: self.n,
            values: self.values[..s].to_vec(),
            vectors: Arc::new(v),
            source: self.source,
            kron: self.kron.as_ref().map(|k| Arc::new(k.truncated(s))),
        })
    }

    /// `sum_j values[j] v_j v_jᵀ` over the modes held.
    pub fn reconstruct(&self) -> Matrix<T> {
        reconstruct_with(&self.values, &self.vectors)
    }

    /// Largest `|<v_i, v_j> - delta_ij|`.
    pub fn orthonormality_defect(&self) -> T {
        let k = self.len();
        let mut worst = T::zero();
        for i in 0..k {
            for j in i..k {
                let d = dot(self.vectors.row(i), self.vectors.row(j));
                let want = if i == j { T::one() } else { T::zero() };
                worst = worst.max((d - want).abs());
            }
        }
        worst
    }

    /// Largest `||A v_j - values[j] v_j|| / (1 + |values[j]|)`.
    pub fn max_relative_residual<A: SymmetricOperator<T> + ?Sized>(&self, op: &A) -> T {
        let mut y = vec![T::zero(); self.n];
        let mut worst = T::zero();
        for (j, &lam) in self.values.iter().enumerate() {
            let v = self.vectors.row(j);
            op.apply(v, &mut y);
            axpy(-lam, v, &mut y);
            let r = dot(&y, &y).sqrt() / (T::one() + lam.abs());
            worst = worst.max(r);
        }
        worst
    }
}

pub(crate) fn reconstruct_with<T: Scalar>(coeffs: &[T], vectors: &Matrix<T>) -> Matrix<T> {
    let n = vectors.cols();
    let mut out = Matrix::zeros(n, n);
    for (j, &c) in coeffs.iter().enumerate() {
        let v = vectors.row(j);
        for (i, &vi) in v.iter().enumerate() {
            let a = c * vi;
            if a != T::zero() {
                axpy(a, v, out.row_mut(i));
            }
        }
    }
    out
}

/// Permutation putting `values` in canonical order.
///
/// Squared values within [`TIE_TOL`] (relative to `max(1, λ²)`) of their
/// neighbour form a cluster. Inside a cluster positive values come first,
/// then (numerically) zero, then negative; remaining ties keep discovery
/// order. Exact arithmetic would make this the plain lexicographic rule;
/// the tolerance keeps it stable when analytic duplicates differ by rounding.
pub fn canonical_order<T: Scalar>(values: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let sq = |i: usize| values[i] * values[i];
    idx.sort_by(|&a, &b| sq(b).partial_cmp(&sq(a)).expect("finite eigenvalues").then(a.cmp(&b)));
    let scale = values.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let zero_tol = T::lit(TIE_TOL) * scale;
    let class = |i: usize| {
        let v = values[i];
        if v > zero_tol {
            0u8
        } else if v < -zero_tol {
            2
        } else {
            1
        }
    };
    let tie = T::lit(TIE_TOL);
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() {
            let (prev, cur) = (sq(idx[end - 1]), sq(idx[end]));
            if prev - cur > tie * prev.max(T::one()) {
                break;
            }
            end += 1;
        }
        idx[start..end].sort_by_key(|&i| (class(i), i));
        start = end;
    }
    idx
}

/// Flips `v` so its largest-magnitude entry is positive; among entries of
/// (nearly) equal magnitude the lowest index decides.
pub fn apply_sign_convention<T: Scalar>(v: &mut [T]) {
    let max = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if max == T::zero() {
        return;
    }
    let cutoff = max * (T::one() - T::lit(1e-9));
    if let Some(&lead) = v.iter().find(|x| x.abs() >= cutoff) {
        if lead < T::zero() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Full eigensystem of a symmetric matrix by dense tridiagonal QL.
pub fn eig_sym<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(w: &A) -> Result<EigenSystem<T>> {
    let m = w.to_matrix();
    let asym = m.asymmetry();
    if asym > T::lit(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric(asym.as_f64()));
    }
    let (values, vectors) = eig_sym_dense(&m)?;
    EigenSystem::from_pairs(values, vectors, Source::Numeric)
}

/// The `s` modes of largest magnitude by Krylov iteration.
pub fn top_modes<T: Scalar, A: SymmetricOperator<T> + ?Sized>(
    w: &A,
    s: usize,
    opts: &LanczosOptions,
) -> Result<EigenSystem<T>> {
    let out = lanczos_top(w, s, opts)?;
    let n = w.dim();
    let mut vectors = Matrix::zeros(s, n);
    for (j, v) in out.vectors.iter().enumerate() {
        vectors.row_mut(j).copy_from_slice(v);
    }
    EigenSystem::from_pairs(out.values, vectors, Source::Numeric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_offdiag, cycle_graph, AdjacencyMatrix};

    #[test]
    fn ordering_by_square_then_sign() {
        let order = canonical_order(&[1.0, -2.0, 2.0, 0.0, -1.0]);
        assert_eq!(order, vec![2, 1, 0, 4, 3]);
        let near = canonical_order(&[-1.0, 1.0 + 1e-14, 1.0]);
        assert_eq!(near, vec![1, 2, 0]);
    }

    #[test]
    fn sign_convention() {
        let mut v = vec![0.1, -0.9, 0.3];
        apply_sign_convention(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
        let mut w = vec![-0.5, 0.5, 0.5, -0.5];
        apply_sign_convention(&mut w);
        assert_eq!(w[0], 0.5);
    }

    #[test]
    fn zero_matrix_gives_identity_basis() {
        let z = Matrix::<f64>::zeros(3, 3);
        let sys = eig_sym(&z).unwrap();
        assert!(sys.values().iter().all(|&v| v == 0.0));
        assert_eq!(sys.vectors(), &Matrix::identity(3));
    }

    #[test]
    fn triangle_spectrum() {
        let k3: AdjacencyMatrix<f64> = complete_offdiag(3).unwrap();
        let sys = eig_sym(&k3).unwrap();
        let want = [2.0, -1.0, -1.0];
        for (v, w) in sys.values().iter().zip(want) {
            assert!((v - w).abs() < 1e-12);
        }
        assert!(sys.orthonormality_defect() < 1e-12);
        assert!(sys.max_relative_residual(&k3) < 1e-12);
        let back = sys.reconstruct();
        assert!(crate::linalg::frobenius_distance(&back, &k3.to_dense()).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = Matrix::from_vec(2, 2, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eig_sym(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn top_mode_of_a_cycle() {
        let c5: AdjacencyMatrix<f64> = cycle_graph(5).unwrap();
        let sys = top_modes(&c5, 1, &LanczosOptions::default()).unwrap();
        assert!((sys.values()[0] - 2.0).abs() < 1e-10);
        let u = 1.0 / 5f64.sqrt();
        assert!(sys.vector(0).iter().all(|&x| (x - u).abs() < 1e-8));
    }

    #[test]
    fn truncation_keeps_leading_modes() {
        let c5: AdjacencyMatrix<f64> = cycle_graph(5).unwrap();
        let sys = eig_sym(&c5).unwrap();
        let t = sys.truncated(2).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.values(), &sys.values()[..2]);
        assert!(sys.truncated(0).is_err());
        assert!(sys.truncated(6).is_err());
    }
}
