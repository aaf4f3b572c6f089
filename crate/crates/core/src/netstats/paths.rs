//! Hop-count path statistics. Real-valued inputs are read as the graph of
//! their strictly positive entries.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, WeightedAdjacency};
use crate::netstats::{support_lists, CentralityKind, CentralityVector};
use crate::scalar::Scalar;

fn bfs(lists: &[Vec<usize>], src: usize, dist: &mut [usize]) {
    dist.iter_mut().for_each(|d| *d = usize::MAX);
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for &u in &lists[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
}

/// Hop distances, `∞` between vertices in different components.
pub fn geodesic_distances<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(w: &A) -> Matrix<T> {
    let n = w.dim();
    let lists = support_lists(w, |x| x > T::zero());
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![0; n],
            |dist, s| {
                bfs(&lists, s, dist);
                dist.iter().map(|&d| if d == usize::MAX { T::infinity() } else { T::from_count(d) }).collect()
            },
        )
        .collect();
    Matrix::from_vec(n, n, rows.concat()).expect("n x n distance table")
}

/// Brandes' single-source pass: adds the pair dependencies of source `s`
/// to `acc`.
fn accumulate_dependencies(lists: &[Vec<usize>], s: usize, acc: &mut [f64]) {
    let n = lists.len();
    let mut order = Vec::with_capacity(n);
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0f64; n];
    dist[s] = 0;
    sigma[s] = 1.0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &u in &lists[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
            if dist[u] == dist[v] + 1 {
                sigma[u] += sigma[v];
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    for &v in order.iter().rev() {
        for &u in &lists[v] {
            if dist[u] != usize::MAX && dist[u] + 1 == dist[v] {
                delta[u] += sigma[u] / sigma[v] * (1.0 + delta[v]);
            }
        }
        if v != s {
            acc[v] += delta[v];
        }
    }
}

/// `C_B(v) = sum_{s != v != t} σ_st(v) / σ_st` over unordered pairs, by
/// Brandes' accumulation.
pub fn betweenness<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(w: &A) -> CentralityVector<T> {
    let n = w.dim();
    let lists = support_lists(w, |x| x > T::zero());
    let block = 32;
    let partials: Vec<Vec<f64>> = (0..n.div_ceil(block))
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![0.0f64; n];
            for s in b * block..((b + 1) * block).min(n) {
                accumulate_dependencies(&lists, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut totals = vec![0.0f64; n];
    for part in &partials {
        totals.iter_mut().zip(part).for_each(|(a, b)| *a += b);
    }
    // Every unordered pair was counted from both ends.
    let scores = totals.into_iter().map(|x| T::lit(x / 2.0)).collect();
    CentralityVector::new(scores, CentralityKind::Betweenness)
}

/// `C_C(v) = sum_t d(v, t) / (n - 1)`: the mean hop distance from `v`.
///
/// This is the average distance itself, not the reciprocal most libraries
/// report, so smaller means more central.
pub fn closeness<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(w: &A) -> Result<CentralityVector<T>> {
    let n = w.dim();
    if n < 2 {
        return Err(Error::TooFewVertices { min: 2, got: n });
    }
    let d = geodesic_distances(w);
    let mut scores = Vec::with_capacity(n);
    for v in 0..n {
        let row = d.row(v);
        if row.iter().any(|x| x.is_infinite()) {
            return Err(Error::Disconnected);
        }
        scores.push(row.iter().copied().sum::<T>() / T::from_count(n - 1));
    }
    Ok(CentralityVector::new(scores, CentralityKind::Closeness))
}
