use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, StoragePolicy};
use crate::scalar::Scalar;

/// A set of nonzero 0/1 tuples selecting which factor coordinates move
/// together along an edge of the product graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NepsBasis {
    arity: usize,
    elements: Vec<Vec<u8>>,
}

impl NepsBasis {
    pub fn new(arity: usize, elements: Vec<Vec<u8>>) -> Result<Self> {
        if arity == 0 || elements.is_empty() {
            return Err(Error::InvalidBasis("basis must be nonempty with positive arity".into()));
        }
        for (k, e) in elements.iter().enumerate() {
            if e.len() != arity {
                return Err(Error::InvalidBasis(format!("element {k} has length {}", e.len())));
            }
            if e.iter().any(|&b| b > 1) {
                return Err(Error::InvalidBasis(format!("element {k} is not a 0/1 tuple")));
            }
            if e.iter().all(|&b| b == 0) {
                return Err(Error::InvalidBasis("the all-zeros tuple is excluded".into()));
            }
            if elements[..k].contains(e) {
                return Err(Error::InvalidBasis(format!("element {k} is repeated")));
            }
        }
        Ok(Self { arity, elements })
    }

    /// Unit tuples: the Cartesian product (sum) of the factors.
    pub fn cartesian(arity: usize) -> Self {
        let elements = (0..arity).map(|i| (0..arity).map(|j| u8::from(i == j)).collect()).collect();
        Self { arity, elements }
    }

    /// The all-ones tuple: the tensor (direct) product.
    pub fn tensor(arity: usize) -> Self {
        Self { arity, elements: vec![vec![1; arity]] }
    }

    /// Every nonzero tuple: the strong product.
    pub fn strong(arity: usize) -> Self {
        let elements = (1u32..1 << arity)
            .map(|mask| (0..arity).map(|j| ((mask >> (arity - 1 - j)) & 1) as u8).collect())
            .collect();
        Self { arity, elements }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn elements(&self) -> &[Vec<u8>] {
        &self.elements
    }
}

/// Flat index of a multi-index, leftmost coordinate slowest-varying.
pub fn flatten(index: &[usize], sizes: &[usize]) -> usize {
    index.iter().zip(sizes).fold(0, |acc, (&i, &k)| acc * k + i)
}

/// Inverse of [`flatten`], written into `out`.
pub fn unflatten(mut flat: usize, sizes: &[usize], out: &mut [usize]) {
    for (o, &k) in out.iter_mut().zip(sizes).rev() {
        *o = flat % k;
        flat /= k;
    }
}

/// NEPS of binary factor graphs: `sum_{beta in basis} W_1^{beta_1} (x) ... (x) W_k^{beta_k}`
/// with `W^0 = I`.
///
/// Vertices are ordered lexicographically in the factor indices with the
/// leftmost factor slowest-varying, matching [`crate::linalg::Matrix::kron`].
pub fn neps<T: Scalar>(factors: &[AdjacencyMatrix<T>], basis: &NepsBasis) -> Result<AdjacencyMatrix<T>> {
    if basis.arity() != factors.len() {
        return Err(Error::ArityMismatch { basis: basis.arity(), factors: factors.len() });
    }
    if let Some(i) = factors.iter().position(|f| !f.is_binary()) {
        return Err(Error::NonBinaryFactor(i));
    }
    let sizes: Vec<usize> = factors.iter().map(AdjacencyMatrix::n).collect();
    let n: usize = sizes.iter().product();
    if n > u32::MAX as usize {
        return Err(Error::TooLarge(format!("{n} product vertices")));
    }
    let nbrs: Vec<Vec<Vec<usize>>> =
        factors.iter().map(|f| (0..f.n()).map(|a| f.neighbours(a).collect()).collect()).collect();

    let k = factors.len();
    let mut lists = vec![Vec::new(); n];
    let mut idx = vec![0usize; k];
    let mut target = vec![0usize; k];
    for (v, list) in lists.iter_mut().enumerate() {
        unflatten(v, &sizes, &mut idx);
        for beta in basis.elements() {
            // Odometer over the coordinates that move.
            let moving: Vec<usize> = (0..k).filter(|&i| beta[i] == 1).collect();
            if moving.iter().any(|&i| nbrs[i][idx[i]].is_empty()) {
                continue;
            }
            let mut pos = vec![0usize; moving.len()];
            'odometer: loop {
                target.copy_from_slice(&idx);
                for (slot, &i) in moving.iter().enumerate() {
                    target[i] = nbrs[i][idx[i]][pos[slot]];
                }
                list.push(flatten(&target, &sizes) as u32);
                let mut d = moving.len();
                loop {
                    if d == 0 {
                        break 'odometer;
                    }
                    d -= 1;
                    pos[d] += 1;
                    if pos[d] < nbrs[moving[d]][idx[moving[d]]].len() {
                        break;
                    }
                    pos[d] = 0;
                }
            }
        }
    }
    Ok(AdjacencyMatrix::from_neighbour_lists(lists, StoragePolicy::Auto))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, path_graph};

    type A = AdjacencyMatrix<f64>;

    #[test]
    fn basis_constructors() {
        assert_eq!(NepsBasis::cartesian(2).elements(), &[vec![1, 0], vec![0, 1]]);
        assert_eq!(NepsBasis::tensor(3).elements(), &[vec![1, 1, 1]]);
        assert_eq!(NepsBasis::strong(2).elements().len(), 3);
        assert!(NepsBasis::new(2, vec![vec![0, 0]]).is_err());
        assert!(NepsBasis::new(2, vec![vec![1, 0], vec![1, 0]]).is_err());
        assert!(NepsBasis::new(2, vec![vec![2, 0]]).is_err());
        assert!(NepsBasis::new(2, vec![vec![1]]).is_err());
    }

    #[test]
    fn products_of_an_edge() {
        let p2: A = path_graph(2).unwrap();
        let square = neps(&[p2.clone(), p2.clone()], &NepsBasis::cartesian(2)).unwrap();
        assert_eq!(square.edge_count(), 4);
        assert!(square.degrees().iter().all(|&d| d == 2.0));
        let tensor = neps(&[p2.clone(), p2.clone()], &NepsBasis::tensor(2)).unwrap();
        assert_eq!(tensor.to_edge_list(), vec![(0, 3), (1, 2)]);
        let strong = neps(&[p2.clone(), p2], &NepsBasis::strong(2)).unwrap();
        assert_eq!(strong.edge_count(), 6);
    }

    #[test]
    fn matches_kronecker_sum() {
        let c4: A = cycle_graph(4).unwrap();
        let p3: A = path_graph(3).unwrap();
        let (a, b) = (c4.to_dense(), p3.to_dense());
        let want = a
            .kron(&crate::linalg::Matrix::identity(3))
            .add(&crate::linalg::Matrix::identity(4).kron(&b))
            .unwrap()
            .add(&a.kron(&b))
            .unwrap();
        let got = neps(&[c4, p3], &NepsBasis::strong(2)).unwrap();
        assert_eq!(got.to_dense(), want);
    }

    #[test]
    fn arity_and_kind_checked() {
        let p2: A = path_graph(2).unwrap();
        assert!(matches!(
            neps(&[p2.clone()], &NepsBasis::cartesian(2)),
            Err(Error::ArityMismatch { basis: 2, factors: 1 })
        ));
        let real = A::real(p2.to_dense().scale(0.5)).unwrap();
        assert!(matches!(neps(&[p2, real], &NepsBasis::cartesian(2)), Err(Error::NonBinaryFactor(1))));
    }

    #[test]
    fn flatten_round_trip() {
        let sizes = [3, 4, 2];
        let mut idx = [0; 3];
        for f in 0..24 {
            unflatten(f, &sizes, &mut idx);
            assert_eq!(flatten(&idx, &sizes), f);
        }
    }
}
