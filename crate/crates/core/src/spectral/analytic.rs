//! Closed-form spectra of cycles, paths and their NEPS products.

use crate::error::{Error, Result};
use crate::graph::{unflatten, NepsBasis};
use crate::linalg::{axpy, dot, normalize, Matrix};
use crate::scalar::Scalar;
use crate::spectral::{apply_sign_convention, canonical_order, EigenSystem, KronStructure, Source};

/// Spectrum `2 cos(2πj/k)` of the `k`-cycle with a real orthonormal basis.
///
/// Index `j` and `k - j` share an eigenvalue. The smaller index carries the
/// cosine vector and the larger one the sine vector, so every two-dimensional
/// eigenspace is spanned. Eigenvalues are evaluated at `min(j, k - j)` so the
/// two copies are bit-identical.
pub fn cycle_eigensystem<T: Scalar>(k: usize) -> Result<EigenSystem<T>> {
    if k < 3 {
        return Err(Error::TooFewVertices { min: 3, got: k });
    }
    let kf = T::from_count(k);
    let two_pi = T::TAU();
    let mut values = Vec::with_capacity(k);
    let mut vectors = Matrix::zeros(k, k);
    for j in 0..k {
        let jj = j.min(k - j);
        let theta = two_pi * T::from_count(jj) / kf;
        values.push(T::lit(2.0) * theta.cos());
        let row = vectors.row_mut(j);
        let use_sine = j > k - j;
        for (l, v) in row.iter_mut().enumerate() {
            let phase = theta * T::from_count(l);
            *v = if use_sine { phase.sin() } else { phase.cos() };
        }
        normalize(row);
    }
    // Clean the sine partner against its cosine vector.
    for j in (k / 2 + 1)..k {
        let partner = k - j;
        let (lo, hi) = vectors.data_mut().split_at_mut(j * k);
        let cos_vec = &lo[partner * k..(partner + 1) * k];
        let sin_vec = &mut hi[..k];
        let c = dot(cos_vec, sin_vec);
        axpy(-c, cos_vec, sin_vec);
        normalize(sin_vec);
    }
    EigenSystem::from_pairs(values, vectors, Source::Analytic)
}

/// Spectrum `2 cos(πj/(k+1))`, `j = 1..k`, of the `k`-vertex path with
/// eigenvectors `x_j(l) ∝ sin(πjl/(k+1))`, `l = 1..k`.
pub fn path_eigensystem<T: Scalar>(k: usize) -> Result<EigenSystem<T>> {
    if k < 2 {
        return Err(Error::TooFewVertices { min: 2, got: k });
    }
    let denom = T::from_count(k + 1);
    let scale = (T::lit(2.0) / denom).sqrt();
    let mut values = Vec::with_capacity(k);
    let mut vectors = Matrix::zeros(k, k);
    for j in 1..=k {
        let theta = T::PI() * T::from_count(j) / denom;
        values.push(T::lit(2.0) * theta.cos());
        let row = vectors.row_mut(j - 1);
        for (l, v) in row.iter_mut().enumerate() {
            *v = scale * (theta * T::from_count(l + 1)).sin();
        }
    }
    EigenSystem::from_pairs(values, vectors, Source::Analytic)
}

/// Eigensystem of a NEPS product from complete factor eigensystems.
///
/// Eigenvalue of the multi-index `(i_1, ..., i_k)` is
/// `sum_{beta} prod_j λ_{j,i_j}^{beta_j}`; its eigenvector is the Kronecker
/// product of the factor vectors, under the vertex order used by
/// [`crate::graph::neps`].
pub fn neps_eigensystem<T: Scalar>(factors: &[EigenSystem<T>], basis: &NepsBasis) -> Result<EigenSystem<T>> {
    if basis.arity() != factors.len() {
        return Err(Error::ArityMismatch { basis: basis.arity(), factors: factors.len() });
    }
    if let Some(i) = factors.iter().position(|f| !f.is_complete()) {
        return Err(Error::dims(format!("factor system {i} is partial")));
    }
    let sizes: Vec<usize> = factors.iter().map(EigenSystem::n).collect();
    let n: usize = sizes.iter().product();
    let mut idx = vec![0; sizes.len()];
    let values: Vec<T> =
        (0..n)
            .map(|f| {
                unflatten(f, &sizes, &mut idx);
                basis
                    .elements()
                    .iter()
                    .map(|beta| {
                        beta.iter().zip(&idx).zip(factors).fold(T::one(), |acc, ((&b, &i), sys)| {
                            if b == 1 {
                                acc * sys.values()[i]
                            } else {
                                acc
                            }
                        })
                    })
                    .sum()
            })
            .collect();

    let order = canonical_order(&values);
    let modes: Vec<Matrix<T>> = factors.iter().map(|f| f.vectors().clone()).collect();
    let kron = KronStructure::new(modes, order.clone());

    let mut vectors = Matrix::zeros(n, n);
    for (c, &f) in order.iter().enumerate() {
        unflatten(f, &sizes, &mut idx);
        let row = vectors.row_mut(c);
        row[0] = T::one();
        let mut len = 1;
        for (sys, &i) in factors.iter().zip(&idx) {
            let v = sys.vector(i);
            let ki = v.len();
            for p in (0..len).rev() {
                let base = row[p];
                for r in (0..ki).rev() {
                    row[p * ki + r] = base * v[r];
                }
            }
            len *= ki;
        }
        apply_sign_convention(row);
    }
    let sorted_values = order.iter().map(|&f| values[f]).collect();
    Ok(EigenSystem::from_sorted(sorted_values, vectors, Source::Analytic).with_kron(kron))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, neps, path_graph, AdjacencyMatrix};
    use crate::spectral::eig_sym;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn cycle_spectra() {
        let c3 = cycle_eigensystem::<f64>(3).unwrap();
        assert_close(c3.values(), &[2.0, -1.0, -1.0], 1e-12);
        let c4 = cycle_eigensystem::<f64>(4).unwrap();
        assert_close(c4.values(), &[2.0, -2.0, 0.0, 0.0], 1e-12);
        let c5 = cycle_eigensystem::<f64>(5).unwrap();
        let g: AdjacencyMatrix<f64> = cycle_graph(5).unwrap();
        assert_close(c5.values(), eig_sym(&g).unwrap().values(), 1e-12);
        assert!(c5.orthonormality_defect() < 1e-12);
        assert!(c5.max_relative_residual(&g) < 1e-12);
        assert!(cycle_eigensystem::<f64>(2).is_err());
    }

    #[test]
    fn path_spectra() {
        let p2 = path_eigensystem::<f64>(2).unwrap();
        assert_close(p2.values(), &[1.0, -1.0], 1e-12);
        let p3 = path_eigensystem::<f64>(3).unwrap();
        let r2 = 2f64.sqrt();
        assert_close(p3.values(), &[r2, -r2, 0.0], 1e-12);
        let p6 = path_eigensystem::<f64>(6).unwrap();
        let g: AdjacencyMatrix<f64> = path_graph(6).unwrap();
        assert_close(p6.values(), eig_sym(&g).unwrap().values(), 1e-12);
        assert!(p6.max_relative_residual(&g) < 1e-12);
    }

    #[test]
    fn product_spectra() {
        let p2 = path_eigensystem::<f64>(2).unwrap();
        let t = neps_eigensystem(&[p2.clone(), p2], &NepsBasis::tensor(2)).unwrap();
        assert_close(t.values(), &[1.0, 1.0, -1.0, -1.0], 1e-12);

        let c4 = cycle_eigensystem::<f64>(4).unwrap();
        let p3 = path_eigensystem::<f64>(3).unwrap();
        let sys = neps_eigensystem(&[c4, p3], &NepsBasis::cartesian(2)).unwrap();
        let g =
            neps(&[cycle_graph::<f64>(4).unwrap(), path_graph::<f64>(3).unwrap()], &NepsBasis::cartesian(2)).unwrap();
        assert_close(sys.values(), eig_sym(&g).unwrap().values(), 1e-10);
        assert!(sys.max_relative_residual(&g) < 1e-12);
        assert!(sys.orthonormality_defect() < 1e-12);
        assert!(sys.kron().is_some());
    }
}
