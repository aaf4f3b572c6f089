//! Undirected graphs as symmetric adjacency matrices.

mod generators;
mod io;
mod neps;

pub use generators::{chung_lu_power_law, chung_lu_weights, complete_offdiag, cycle_graph, path_graph, star_graph};
pub use io::{parse_edge_list, read_edge_list, write_edge_list};
pub use neps::{flatten, neps, unflatten, NepsBasis};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymmetricOperator, WeightedAdjacency};
use crate::scalar::Scalar;

/// Largest vertex count stored densely under [`StoragePolicy::Auto`].
pub const DENSE_LIMIT: usize = 4096;

/// Absolute symmetry tolerance for real-valued matrices.
pub const REAL_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Binary,
    Real,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StoragePolicy {
    /// Dense up to [`DENSE_LIMIT`] vertices, compressed rows above.
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Clone, Debug, PartialEq)]
struct Csr {
    offsets: Vec<usize>,
    cols: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq)]
enum Storage<T> {
    Dense(Matrix<T>),
    Sparse(Csr),
}

/// Symmetric `n x n` matrix with zero diagonal.
///
/// Binary matrices (true and observed graphs) may use either storage; both
/// behave identically. Real-valued matrices are always dense.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyMatrix<T> {
    n: usize,
    kind: Kind,
    storage: Storage<T>,
}

impl<T: Scalar> AdjacencyMatrix<T> {
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edge_list_with(n, edges, StoragePolicy::Auto)
    }

    pub fn from_edge_list_with(n: usize, edges: &[(usize, usize)], policy: StoragePolicy) -> Result<Self> {
        let mut lists = vec![Vec::new(); n];
        for &(i, j) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoopRejected(i));
            }
            lists[i].push(j as u32);
            lists[j].push(i as u32);
        }
        Ok(Self::from_neighbour_lists(lists, policy))
    }

    /// Builds a binary matrix from per-vertex neighbour lists. Lists must be
    /// symmetric and loop-free; duplicates are removed.
    pub(crate) fn from_neighbour_lists(mut lists: Vec<Vec<u32>>, policy: StoragePolicy) -> Self {
        let n = lists.len();
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        let dense = match policy {
            StoragePolicy::Auto => n <= DENSE_LIMIT,
            StoragePolicy::Dense => true,
            StoragePolicy::Sparse => false,
        };
        let storage = if dense {
            let mut m = Matrix::zeros(n, n);
            for (i, l) in lists.iter().enumerate() {
                let row = m.row_mut(i);
                for &j in l {
                    row[j as usize] = T::one();
                }
            }
            Storage::Dense(m)
        } else {
            let mut offsets = Vec::with_capacity(n + 1);
            offsets.push(0);
            let total = lists.iter().map(Vec::len).sum();
            let mut cols = Vec::with_capacity(total);
            for l in &lists {
                cols.extend_from_slice(l);
                offsets.push(cols.len());
            }
            Storage::Sparse(Csr { offsets, cols })
        };
        Self { n, kind: Kind::Binary, storage }
    }

    /// Wraps a dense 0/1 matrix, checking exact symmetry and a zero diagonal.
    pub fn binary_from_matrix(m: Matrix<T>) -> Result<Self> {
        Self::validate_shape(&m)?;
        let n = m.rows();
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                if v != T::zero() && v != T::one() {
                    return Err(Error::NonBinaryEntry { i, j });
                }
                if v != m.get(j, i) {
                    return Err(Error::NotSymmetric(1.0));
                }
            }
        }
        Ok(Self { n, kind: Kind::Binary, storage: Storage::Dense(m) })
    }

    /// Wraps a real-valued symmetric matrix with zero diagonal.
    pub fn real(m: Matrix<T>) -> Result<Self> {
        Self::validate_shape(&m)?;
        let asym = m.asymmetry();
        if asym > T::lit(REAL_SYMMETRY_TOL) {
            return Err(Error::NotSymmetric(asym.as_f64()));
        }
        Ok(Self { n: m.rows(), kind: Kind::Real, storage: Storage::Dense(m) })
    }

    fn validate_shape(m: &Matrix<T>) -> Result<()> {
        if !m.is_square() {
            return Err(Error::dims(format!("adjacency matrix is {}x{}", m.rows(), m.cols())));
        }
        if let Some(i) = (0..m.rows()).find(|&i| m.get(i, i) != T::zero()) {
            return Err(Error::NonZeroDiagonal(i));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn kind(&self) -> Kind {
        self.kind
    }

    #[inline]
    pub fn is_binary(&self) -> bool {
        self.kind == Kind::Binary
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn as_dense(&self) -> Option<&Matrix<T>> {
        match &self.storage {
            Storage::Dense(m) => Some(m),
            Storage::Sparse(_) => None,
        }
    }

    pub fn to_dense(&self) -> Matrix<T> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(_) => self.to_matrix(),
        }
    }

    /// Same graph with the requested storage. Real matrices stay dense.
    pub fn with_storage(&self, policy: StoragePolicy) -> Self {
        if !self.is_binary() {
            return self.clone();
        }
        let lists = (0..self.n).map(|i| self.neighbours(i).map(|j| j as u32).collect()).collect();
        Self::from_neighbour_lists(lists, policy)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        match &self.storage {
            Storage::Dense(m) => m.get(i, j),
            Storage::Sparse(csr) => {
                let row = &csr.cols[csr.offsets[i]..csr.offsets[i + 1]];
                if row.binary_search(&(j as u32)).is_ok() {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Vertices `j` with a nonzero entry `(i, j)`, ascending.
    pub fn neighbours(&self, i: usize) -> Box<dyn Iterator<Item = usize> + '_> {
        match &self.storage {
            Storage::Dense(m) => Box::new(m.row(i).iter().enumerate().filter(|(_, &v)| v != T::zero()).map(|(j, _)| j)),
            Storage::Sparse(csr) => Box::new(csr.cols[csr.offsets[i]..csr.offsets[i + 1]].iter().map(|&j| j as usize)),
        }
    }

    /// Number of unordered pairs with a nonzero entry.
    pub fn edge_count(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.data().iter().filter(|&&v| v != T::zero()).count() / 2,
            Storage::Sparse(csr) => csr.cols.len() / 2,
        }
    }

    /// Row sums in vertex order.
    pub fn degrees(&self) -> Vec<T> {
        match &self.storage {
            Storage::Dense(m) => (0..self.n).map(|i| m.row(i).iter().copied().sum()).collect(),
            Storage::Sparse(csr) => (0..self.n).map(|i| T::from_count(csr.offsets[i + 1] - csr.offsets[i])).collect(),
        }
    }

    /// Row sums sorted descending; the first entry is the maximum degree.
    pub fn degree_sequence(&self) -> Vec<T> {
        let mut d = self.degrees();
        d.sort_by(|a, b| b.partial_cmp(a).expect("finite degrees"));
        d
    }

    pub fn max_degree(&self) -> T {
        self.degrees().into_iter().fold(T::zero(), T::max)
    }

    /// Unordered pairs `(i, j)`, `i < j`, with a nonzero entry.
    pub fn to_edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            out.extend(self.neighbours(i).filter(|&j| j > i).map(|j| (i, j)));
        }
        out
    }
}

impl<T: Scalar> SymmetricOperator<T> for AdjacencyMatrix<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        match &self.storage {
            Storage::Dense(m) => m.matvec_into(x, y),
            Storage::Sparse(csr) => {
                for (i, yi) in y.iter_mut().enumerate() {
                    let mut acc = T::zero();
                    for &j in &csr.cols[csr.offsets[i]..csr.offsets[i + 1]] {
                        acc += x[j as usize];
                    }
                    *yi = acc;
                }
            }
        }
    }
}

impl<T: Scalar> WeightedAdjacency<T> for AdjacencyMatrix<T> {
    fn entry(&self, i: usize, j: usize) -> T {
        self.get(i, j)
    }

    fn row_into(&self, i: usize, out: &mut [T]) {
        match &self.storage {
            Storage::Dense(m) => out.copy_from_slice(m.row(i)),
            Storage::Sparse(_) => {
                out.iter_mut().for_each(|v| *v = T::zero());
                for j in self.neighbours(i) {
                    out[j] = T::one();
                }
            }
        }
    }

    fn row_sums(&self) -> Vec<T> {
        self.degrees()
    }
}
