use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A real symmetric linear map, available through matrix-vector products.
pub trait SymmetricOperator<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    /// Writes `A x` into `y`. Both slices have length `dim()`.
    fn apply(&self, x: &[T], y: &mut [T]);
}

/// Anything that behaves like a weighted adjacency matrix: binary graphs,
/// debiased observations and low-rank denoised estimates.
///
/// Statistics that only need aggregate quantities (row sums, total weight)
/// run on the native representation; the rest fall back to [`to_matrix`].
///
/// [`to_matrix`]: WeightedAdjacency::to_matrix
pub trait WeightedAdjacency<T: Scalar>: SymmetricOperator<T> {
    fn entry(&self, i: usize, j: usize) -> T;

    fn row_into(&self, i: usize, out: &mut [T]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.entry(i, j);
        }
    }

    fn row_sums(&self) -> Vec<T> {
        let n = self.dim();
        let ones = vec![T::one(); n];
        let mut y = vec![T::zero(); n];
        self.apply(&ones, &mut y);
        y
    }

    /// `sum_ij W(i,j)`, diagonal included.
    fn total_weight(&self) -> T {
        self.row_sums().into_iter().sum()
    }

    fn to_matrix(&self) -> Matrix<T> {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            self.row_into(i, m.row_mut(i));
        }
        m
    }
}

impl<T: Scalar> SymmetricOperator<T> for Matrix<T> {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.matvec_into(x, y);
    }
}

impl<T: Scalar> WeightedAdjacency<T> for Matrix<T> {
    fn entry(&self, i: usize, j: usize) -> T {
        self.get(i, j)
    }

    fn row_into(&self, i: usize, out: &mut [T]) {
        out.copy_from_slice(self.row(i));
    }

    fn row_sums(&self) -> Vec<T> {
        (0..self.rows()).map(|i| self.row(i).iter().copied().sum()).collect()
    }

    fn to_matrix(&self) -> Matrix<T> {
        self.clone()
    }
}
