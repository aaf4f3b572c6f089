use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, StoragePolicy};
use crate::scalar::Scalar;

fn require(k: usize, min: usize) -> Result<()> {
    if k < min {
        return Err(Error::TooFewVertices { min, got: k });
    }
    Ok(())
}

/// The `k`-cycle `0 - 1 - ... - (k-1) - 0`.
pub fn cycle_graph<T: Scalar>(k: usize) -> Result<AdjacencyMatrix<T>> {
    require(k, 3)?;
    let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    AdjacencyMatrix::from_edge_list(k, &edges)
}

/// The path `0 - 1 - ... - (k-1)`.
pub fn path_graph<T: Scalar>(k: usize) -> Result<AdjacencyMatrix<T>> {
    require(k, 2)?;
    let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
    AdjacencyMatrix::from_edge_list(k, &edges)
}

/// All ones off the diagonal.
pub fn complete_offdiag<T: Scalar>(n: usize) -> Result<AdjacencyMatrix<T>> {
    require(n, 1)?;
    let lists = (0..n).map(|i| (0..n as u32).filter(|&j| j as usize != i).collect()).collect();
    Ok(AdjacencyMatrix::from_neighbour_lists(lists, StoragePolicy::Auto))
}

/// Star `K_{1,leaves}` with the centre at vertex 0.
pub fn star_graph<T: Scalar>(leaves: usize) -> Result<AdjacencyMatrix<T>> {
    require(leaves, 1)?;
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    AdjacencyMatrix::from_edge_list(leaves + 1, &edges)
}

/// Chung–Lu random graph with power-law expected degrees.
///
/// Vertex `i` gets weight `w_i = d_min ((n - 1 + i0) / (i + i0))^(1/(gamma-1))`
/// with `i0 = 1`, so the lightest vertex has expected degree about `d_min` and
/// the weights follow a truncated power law with exponent `gamma`. Each pair
/// is joined independently with probability `min(1, w_i w_j / sum w)`.
pub fn chung_lu_power_law<T: Scalar>(n: usize, gamma: f64, d_min: f64, seed: u64) -> Result<AdjacencyMatrix<T>> {
    require(n, 2)?;
    if !(gamma > 2.0 && gamma.is_finite()) {
        return Err(Error::InvalidExponent(format!("gamma must exceed 2, got {gamma}")));
    }
    if !(d_min >= 1.0 && d_min.is_finite()) {
        return Err(Error::InvalidExponent(format!("d_min must be at least 1, got {d_min}")));
    }
    let weights = chung_lu_weights(n, gamma, d_min);
    let total: f64 = weights.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lists = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let prob = (weights[i] * weights[j] / total).min(1.0);
            let u: f64 = rng.random();
            if u < prob {
                lists[i].push(j as u32);
                lists[j].push(i as u32);
            }
        }
    }
    Ok(AdjacencyMatrix::from_neighbour_lists(lists, StoragePolicy::Auto))
}

/// Expected-degree weights used by [`chung_lu_power_law`], heaviest first.
pub fn chung_lu_weights(n: usize, gamma: f64, d_min: f64) -> Vec<f64> {
    let i0 = 1.0;
    let expo = 1.0 / (gamma - 1.0);
    let top = n as f64 - 1.0 + i0;
    (0..n).map(|i| d_min * (top / (i as f64 + i0)).powf(expo)).collect()
}
