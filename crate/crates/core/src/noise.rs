//! Independent Bernoulli edge noise, the debiasing transform and the
//! closed-form risk of the debiased observation.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, StoragePolicy};
use crate::linalg::{Matrix, SymmetricOperator, WeightedAdjacency};
use crate::scalar::Scalar;

/// Type II rate `p` (edge dropped), Type I rate `q` (spurious edge), seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_independent")]
    pub independent: bool,
}

fn default_independent() -> bool {
    true
}

impl NoiseSpec {
    pub fn new(p: f64, q: f64, seed: u64) -> Result<Self> {
        let spec = Self { p, q, seed, independent: true };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_rate("p", self.p).map_err(Error::InvalidNoiseSpec)?;
        check_rate("q", self.q).map_err(Error::InvalidNoiseSpec)?;
        if self.p + self.q >= 1.0 {
            return Err(Error::InvalidNoiseSpec(format!("p + q = {} must be < 1", self.p + self.q)));
        }
        if !self.independent {
            return Err(Error::InvalidNoiseSpec("only independent noise is supported".into()));
        }
        Ok(())
    }
}

fn check_rate(name: &str, r: f64) -> std::result::Result<(), String> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(format!("{name} = {r} outside [0, 1)"))
    }
}

/// Rejects rates outside `[0, 1)` and `p + q >= 1`.
pub fn check_rates(p: f64, q: f64) -> Result<()> {
    check_rate("p", p).map_err(Error::InvalidNoiseSpec)?;
    check_rate("q", q).map_err(Error::InvalidNoiseSpec)?;
    if p + q >= 1.0 {
        return Err(Error::DegenerateRates(p + q));
    }
    Ok(())
}

/// Position of the unordered pair `i < j` in row-major upper-triangle order.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> u64 {
    debug_assert!(i < j && j < n);
    let (n, i, j) = (n as u64, i as u64, j as u64);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

#[inline]
fn unit_from_u64(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One noisy observation of `w_true` with stream 0.
pub fn sample_observed<T: Scalar>(w_true: &AdjacencyMatrix<T>, spec: &NoiseSpec) -> Result<AdjacencyMatrix<T>> {
    sample_observed_stream(w_true, spec, 0)
}

/// One noisy observation of `w_true` drawn from stream `stream` of the
/// spec's seed.
///
/// Pair `(i, j)`, `i < j`, always consumes the 64-bit word at position
/// `pair_index(n, i, j)` of the ChaCha8 stream, so the result does not depend
/// on iteration order or thread count.
pub fn sample_observed_stream<T: Scalar>(
    w_true: &AdjacencyMatrix<T>,
    spec: &NoiseSpec,
    stream: u64,
) -> Result<AdjacencyMatrix<T>> {
    spec.validate()?;
    if !w_true.is_binary() {
        return Err(Error::InvalidNoiseSpec("true graph must be binary".into()));
    }
    let n = w_true.n();
    let (keep, spurious) = (1.0 - spec.p, spec.q);
    let upper: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map_init(
            || (ChaCha8Rng::seed_from_u64(spec.seed), vec![T::zero(); n]),
            |(rng, row), i| {
                let mut out = Vec::new();
                if i + 1 >= n {
                    return out;
                }
                rng.set_stream(stream);
                rng.set_word_pos(2 * pair_index(n, i, i + 1) as u128);
                w_true.row_into(i, row);
                for (j, &t) in row.iter().enumerate().skip(i + 1) {
                    let u = unit_from_u64(rng.next_u64());
                    let present = if t == T::one() { u < keep } else { u < spurious };
                    if present {
                        out.push(j as u32);
                    }
                }
                out
            },
        )
        .collect();
    let mut lists = vec![Vec::new(); n];
    for (i, ups) in upper.into_iter().enumerate() {
        for &j in &ups {
            lists[j as usize].push(i as u32);
        }
        lists[i].extend(ups);
    }
    Ok(AdjacencyMatrix::from_neighbour_lists(lists, StoragePolicy::Auto))
}

/// `(W_obs - q K_n) / (1 - p - q)` as a dense real matrix.
pub fn debias<T: Scalar>(w_obs: &AdjacencyMatrix<T>, p: f64, q: f64) -> Result<AdjacencyMatrix<T>> {
    let op = DebiasedOperator::new(w_obs, p, q)?;
    AdjacencyMatrix::real(op.to_matrix())
}

/// Inverse of [`debias`]: `W̃ (1 - p - q) + q K_n`.
pub fn rebias<T: Scalar>(w_tilde: &Matrix<T>, p: f64, q: f64) -> Result<Matrix<T>> {
    check_rates(p, q)?;
    let (scale, shift) = (T::lit(1.0 - p - q), T::lit(q));
    let n = w_tilde.rows();
    Ok(Matrix::from_fn(n, n, |i, j| if i == j { T::zero() } else { w_tilde.get(i, j) * scale + shift }))
}

/// The debiased observation as a lazy operator over the binary observation.
///
/// Matrix-vector products cost one pass over `W_obs`, which keeps the
/// iterative solvers usable on large sparse observations.
#[derive(Clone, Copy, Debug)]
pub struct DebiasedOperator<'a, T> {
    obs: &'a AdjacencyMatrix<T>,
    q: T,
    inv_denom: T,
}

impl<'a, T: Scalar> DebiasedOperator<'a, T> {
    pub fn new(obs: &'a AdjacencyMatrix<T>, p: f64, q: f64) -> Result<Self> {
        check_rates(p, q)?;
        Ok(Self { obs, q: T::lit(q), inv_denom: T::lit(1.0 / (1.0 - p - q)) })
    }

    pub fn observed(&self) -> &AdjacencyMatrix<T> {
        self.obs
    }
}

impl<T: Scalar> SymmetricOperator<T> for DebiasedOperator<'_, T> {
    fn dim(&self) -> usize {
        self.obs.n()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.obs.apply(x, y);
        let total: T = x.iter().copied().sum();
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = (*yi - self.q * (total - xi)) * self.inv_denom;
        }
    }
}

impl<T: Scalar> WeightedAdjacency<T> for DebiasedOperator<'_, T> {
    fn entry(&self, i: usize, j: usize) -> T {
        if i == j {
            T::zero()
        } else {
            (self.obs.get(i, j) - self.q) * self.inv_denom
        }
    }

    fn row_into(&self, i: usize, out: &mut [T]) {
        self.obs.row_into(i, out);
        for v in out.iter_mut() {
            *v = (*v - self.q) * self.inv_denom;
        }
        out[i] = T::zero();
    }

    fn row_sums(&self) -> Vec<T> {
        let off = T::from_count(self.obs.n().saturating_sub(1)) * self.q;
        self.obs.degrees().into_iter().map(|d| (d - off) * self.inv_denom).collect()
    }
}

/// `d(W̃_obs, W_true)² = 2 (p(1-p) m + q(1-q) [C(n,2) - m]) / (1-p-q)²`.
pub fn naive_mse(n: usize, m: usize, p: f64, q: f64) -> Result<f64> {
    check_rates(p, q)?;
    let pairs = n * n.saturating_sub(1) / 2;
    if m > pairs {
        return Err(Error::dims(format!("m = {m} exceeds C({n}, 2) = {pairs}")));
    }
    let denom = (1.0 - p - q).powi(2);
    Ok(2.0 * (p * (1.0 - p) * m as f64 + q * (1.0 - q) * (pairs - m) as f64) / denom)
}

/// Spectral radius of the independent-noise covariance, `max(p(1-p), q(1-q))`.
pub fn sigma_max_independent(p: f64, q: f64) -> f64 {
    (p * (1.0 - p)).max(q * (1.0 - q))
}

/// Largest vertex count accepted by [`noise_covariance`].
pub const COVARIANCE_MAX_N: usize = 64;

/// The unnormalised `n² x n²` covariance of the centred noise, slot
/// `(x, y)` at row `x n + y`.
///
/// Under independent noise it is diagonal: `p(1-p)` on ordered edge slots,
/// `q(1-q)` on ordered non-edge slots, zero on the diagonal pairs `(x, x)`.
pub fn noise_covariance<T: Scalar>(w_true: &AdjacencyMatrix<T>, p: f64, q: f64) -> Result<Matrix<T>> {
    let n = w_true.n();
    if n > COVARIANCE_MAX_N {
        return Err(Error::TooLarge(format!("covariance needs n <= {COVARIANCE_MAX_N}, got {n}")));
    }
    check_rates(p, q)?;
    let (on, off) = (T::lit(p * (1.0 - p)), T::lit(q * (1.0 - q)));
    let mut c = Matrix::zeros(n * n, n * n);
    for x in 0..n {
        for y in 0..n {
            if x != y {
                let slot = x * n + y;
                c.set(slot, slot, if w_true.get(x, y) == T::one() { on } else { off });
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_offdiag, cycle_graph, StoragePolicy};

    type A = AdjacencyMatrix<f64>;

    #[test]
    fn noiseless_is_identity() {
        let g: A = cycle_graph(7).unwrap();
        let spec = NoiseSpec::new(0.0, 0.0, 3).unwrap();
        assert_eq!(sample_observed(&g, &spec).unwrap(), g);
    }

    #[test]
    fn sampling_is_deterministic_and_storage_independent() {
        let edges: Vec<_> = (0..30).map(|i| (i, (i * 7 + 3) % 40)).filter(|(a, b)| a != b).collect();
        let dense = A::from_edge_list_with(40, &edges, StoragePolicy::Dense).unwrap();
        let sparse = dense.with_storage(StoragePolicy::Sparse);
        let spec = NoiseSpec::new(0.3, 0.2, 11).unwrap();
        let a = sample_observed_stream(&dense, &spec, 5).unwrap();
        let b = sample_observed_stream(&sparse, &spec, 5).unwrap();
        assert_eq!(a.to_edge_list(), b.to_edge_list());
        let c = sample_observed_stream(&dense, &spec, 6).unwrap();
        assert_ne!(a.to_edge_list(), c.to_edge_list());
        let m = a.to_dense();
        assert!(m.is_symmetric(0.0));
    }

    #[test]
    fn debias_values() {
        let g = A::from_edge_list(3, &[(0, 1)]).unwrap();
        let d = debias(&g, 0.3, 0.4).unwrap().to_dense();
        assert!((d.get(0, 1) - 2.0).abs() < 1e-12);
        assert!((d.get(1, 2) + 0.4 / 0.3).abs() < 1e-12);
        assert_eq!(d.get(2, 2), 0.0);
        assert_eq!(debias(&g, 0.0, 0.0).unwrap().to_dense(), g.to_dense());
        assert!(matches!(debias(&g, 0.6, 0.4), Err(Error::DegenerateRates(_))));
        let back = rebias(&d, 0.3, 0.4).unwrap();
        assert!(crate::linalg::frobenius_distance(&back, &g.to_dense()).unwrap() < 1e-12);
    }

    #[test]
    fn operator_matches_dense() {
        let g = A::from_edge_list(4, &[(0, 1), (2, 3), (1, 3)]).unwrap();
        let op = DebiasedOperator::new(&g, 0.2, 0.1).unwrap();
        let dense = op.to_matrix();
        let x = [1.0, 2.0, -1.0, 0.5];
        let mut y = [0.0; 4];
        op.apply(&x, &mut y);
        let want = dense.matvec(&x);
        for (a, b) in y.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        let rs = op.row_sums();
        for i in 0..4 {
            assert!((rs[i] - dense.row(i).iter().sum::<f64>()).abs() < 1e-12);
        }
    }

    #[test]
    fn naive_mse_values() {
        assert_eq!(naive_mse(10, 4, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(naive_mse(10, 0, 0.5, 0.0).unwrap(), 0.0);
        let v = naive_mse(3125, 15625, 0.3, 0.4).unwrap();
        let want = 2.0 * (0.21 * 15625.0 + 0.24 * (4_881_250.0 - 15625.0)) / 0.09;
        assert!((v - want).abs() < 1e-6 * want);
        assert!((v - 2.6023e7).abs() < 1e3);
        assert!(matches!(naive_mse(5, 1, 0.5, 0.5), Err(Error::DegenerateRates(_))));
    }

    #[test]
    fn sigma_max_values() {
        assert_eq!(sigma_max_independent(0.0, 0.0), 0.0);
        assert!((sigma_max_independent(0.3, 0.4) - 0.24).abs() < 1e-15);
        assert!((sigma_max_independent(0.5, 0.1) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn covariance_structure() {
        let k3: A = complete_offdiag(3).unwrap();
        let c = noise_covariance(&k3, 0.3, 0.0).unwrap();
        let diag: Vec<f64> = (0..9).map(|i| c.get(i, i)).collect();
        assert_eq!(diag.iter().filter(|&&v| (v - 0.21).abs() < 1e-15).count(), 6);
        assert!((c.sum() - 1.26).abs() < 1e-12);
        let zero = noise_covariance(&k3, 0.0, 0.0).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        let big: A = cycle_graph(65).unwrap();
        assert!(matches!(noise_covariance(&big, 0.1, 0.1), Err(Error::TooLarge(_))));
    }
}
