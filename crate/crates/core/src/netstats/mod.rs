//! Network summary statistics that are Lipschitz in the adjacency matrix,
//! a few that are not, and helpers for checking continuity numerically.

mod paths;
mod statistic;

use serde::{Deserialize, Serialize};

pub use paths::{betweenness, closeness, geodesic_distances};
pub use statistic::{read_vertex_set, StatValue, Statistic, STATISTIC_NAMES};

use crate::error::{Error, Result};
use crate::linalg::{dot, eig_sym_dense, norm, LanczosOptions, Matrix, SymmetricOperator, WeightedAdjacency};
use crate::scalar::Scalar;
use crate::spectral::top_modes;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityKind {
    Degree,
    Eigenvector,
    Closeness,
    Betweenness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralityVector<T> {
    pub scores: Vec<T>,
    pub kind: CentralityKind,
    /// Set when the input had negative entries, in which case eigenvector
    /// scores carry no positivity guarantee.
    #[serde(default)]
    pub negative_input: bool,
}

impl<T> CentralityVector<T> {
    fn new(scores: Vec<T>, kind: CentralityKind) -> Self {
        Self { scores, kind, negative_input: false }
    }
}

/// `E(W) / C(n, 2)` with `E(W) = ½ sum_ij W(i, j)`.
pub fn density<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(w: &A) -> Result<T> {
    let n = w.dim();
    if n < 2 {
        return Err(Error::TooFewVertices { min: 2, got: n });
    }
    let pairs = T::from_count(n * (n - 1) / 2);
    Ok(w.total_weight() / T::lit(2.0) / pairs)
}

/// Row sums.
pub fn degree_centrality<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(w: &A) -> CentralityVector<T> {
    CentralityVector::new(w.row_sums(), CentralityKind::Degree)
}

/// Above this size the dominant eigenvector comes from Lanczos rather than a
/// dense solve.
const DENSE_EIGEN_LIMIT: usize = 256;

/// `W + c I`, which moves the spectrum into `[0, 2c]` so the largest
/// magnitude is the largest algebraic eigenvalue.
struct Shifted<'a, A: ?Sized, T> {
    inner: &'a A,
    shift: T,
}

impl<T: Scalar, A: SymmetricOperator<T> + ?Sized> SymmetricOperator<T> for Shifted<'_, A, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.inner.apply(x, y);
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi += self.shift * xi;
        }
    }
}

fn support_lists<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(w: &A, keep: impl Fn(T) -> bool) -> Vec<Vec<usize>> {
    let n = w.dim();
    let mut row = vec![T::zero(); n];
    (0..n)
        .map(|i| {
            w.row_into(i, &mut row);
            row.iter().enumerate().filter(|&(j, &x)| j != i && keep(x)).map(|(j, _)| j).collect()
        })
        .collect()
}

fn is_connected(lists: &[Vec<usize>]) -> bool {
    let n = lists.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &u in &lists[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == n
}

/// Unit-norm dominant eigenvector (largest algebraic eigenvalue), signed so
/// its entries sum to a nonnegative number.
///
/// For nonnegative input the graph must be connected and the result is the
/// Perron vector. Inputs with negative entries are rejected with
/// [`Error::NegativeEntries`] unless `allow_negative` is set, in which case
/// the dominant eigenvector is returned and flagged.
pub fn eigenvector_centrality<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(
    w: &A,
    tol: f64,
    allow_negative: bool,
) -> Result<CentralityVector<T>> {
    let n = w.dim();
    if n == 0 {
        return Err(Error::TooFewVertices { min: 1, got: 0 });
    }
    let mut row = vec![T::zero(); n];
    let mut negative = false;
    let mut shift = T::zero();
    for i in 0..n {
        w.row_into(i, &mut row);
        negative |= row.iter().any(|&x| x < T::zero());
        shift = shift.max(row.iter().map(|x| x.abs()).sum());
    }
    if negative && !allow_negative {
        return Err(Error::NegativeEntries);
    }
    if !negative && !is_connected(&support_lists(w, |x| x > T::zero())) {
        return Err(Error::Disconnected);
    }

    let (lambda, mut v) = if n <= DENSE_EIGEN_LIMIT {
        let (values, vectors) = eig_sym_dense(&w.to_matrix())?;
        let best = (0..n).fold(0, |b, j| if values[j] > values[b] { j } else { b });
        (values[best], vectors.row(best).to_vec())
    } else {
        let shifted = Shifted { inner: w, shift };
        let opts = LanczosOptions { tol: tol.min(1e-8), ..LanczosOptions::default() };
        let sys = top_modes(&shifted, 1, &opts)?;
        (sys.values()[0] - shift, sys.vector(0).to_vec())
    };

    let mut y = vec![T::zero(); n];
    w.apply(&v, &mut y);
    let resid: T = y.iter().zip(&v).map(|(&a, &b)| (a - lambda * b).powi(2)).sum::<T>().sqrt();
    let bound = tol * lambda.abs().as_f64().max(1.0);
    if resid.as_f64() > bound {
        return Err(Error::NoConvergence { residual: resid.as_f64(), tol: bound });
    }
    if v.iter().copied().sum::<T>() < T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    if !negative {
        // Perron vector: entries share one sign, so any stray sign is round-off.
        v.iter_mut().for_each(|x| *x = x.abs());
    }
    Ok(CentralityVector { scores: v, kind: CentralityKind::Eigenvector, negative_input: negative })
}

/// `sqrt(1 - <v1, v2>²)`, the sine of the angle between unit vectors.
pub fn ev_distance<T: Scalar>(v1: &[T], v2: &[T]) -> Result<T> {
    if v1.len() != v2.len() {
        return Err(Error::dims(format!("vectors of length {} and {}", v1.len(), v2.len())));
    }
    for v in [v1, v2] {
        let nv = norm(v);
        if (nv - T::one()).abs() > T::lit(1e-8) {
            return Err(Error::NotUnitNorm(nv.as_f64()));
        }
    }
    let c = dot(v1, v2);
    Ok((T::one() - c * c).max(T::zero()).sqrt())
}

/// `cut(S, Sᶜ) / min(Vol S, Vol Sᶜ)` with volumes measured by row sums.
pub fn conductance<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(w: &A, set: &[usize]) -> Result<T> {
    let n = w.dim();
    let mut inside = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, n });
        }
        inside[v] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    if size == 0 || size == n {
        return Err(Error::EmptySide);
    }
    let degrees = w.row_sums();
    let mut row = vec![T::zero(); n];
    let (mut cut, mut vol_in, mut vol_out) = (T::zero(), T::zero(), T::zero());
    for x in 0..n {
        if inside[x] {
            vol_in += degrees[x];
            w.row_into(x, &mut row);
            cut += row.iter().zip(&inside).filter(|(_, &b)| !b).map(|(&r, _)| r).sum();
        } else {
            vol_out += degrees[x];
        }
    }
    let g = vol_in.min(vol_out);
    if g <= T::zero() {
        return Err(Error::ZeroVolume);
    }
    Ok(cut / g)
}

/// `W^k`: entry `(x, y)` counts walks of length `k` for binary `W`.
pub fn k_walk_counts<T: Scalar, A: WeightedAdjacency<T> + ?Sized>(w: &A, k: u32) -> Result<Matrix<T>> {
    if k == 0 {
        return Err(Error::InvalidExponent("walk length must be at least 1".into()));
    }
    w.to_matrix().pow(k)
}

/// `sum_v [C(v*) - C(v)] / n` with `v*` the maximiser.
pub fn centralization<T: Scalar>(scores: &[T], n: usize) -> Result<T> {
    if scores.len() != n || n == 0 {
        return Err(Error::dims(format!("{} scores for n = {n}", scores.len())));
    }
    let max = scores.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(scores.iter().map(|&s| max - s).sum::<T>() / T::from_count(n))
}

/// Freeman's normalisation: the same sum divided by its value on the star
/// graph. Defined for degree and betweenness scores.
pub fn freeman_centralization<T: Scalar>(c: &CentralityVector<T>) -> Result<T> {
    let n = c.scores.len();
    if n < 3 {
        return Err(Error::TooFewVertices { min: 3, got: n });
    }
    let (n1, n2) = (T::from_count(n - 1), T::from_count(n - 2));
    let max_sum = match c.kind {
        CentralityKind::Degree => n1 * n2,
        CentralityKind::Betweenness => n1 * n1 * n2 / T::lit(2.0),
        other => return Err(Error::Config(format!("no Freeman normalisation for {other:?} centrality"))),
    };
    Ok(centralization(&c.scores, n)? * T::from_count(n) / max_sum)
}

/// Matrix norm used as the denominator of a Lipschitz ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixNorm {
    /// `sum_ij |A(i, j)|`.
    EntrywiseL1,
    /// `max_i sum_j |A(i, j)|`.
    MaxRowSum,
}

/// `|g(W1) - g(W2)| / ‖W1 - W2‖₁` with the entrywise L1 norm.
pub fn lipschitz_ratio<T, F>(g: F, w1: &Matrix<T>, w2: &Matrix<T>) -> Result<f64>
where
    T: Scalar,
    F: Fn(&Matrix<T>) -> Result<f64>,
{
    lipschitz_ratio_in(MatrixNorm::EntrywiseL1, g, w1, w2)
}

pub fn lipschitz_ratio_in<T, F>(norm: MatrixNorm, g: F, w1: &Matrix<T>, w2: &Matrix<T>) -> Result<f64>
where
    T: Scalar,
    F: Fn(&Matrix<T>) -> Result<f64>,
{
    let diff = w1.sub(w2)?;
    let size = match norm {
        MatrixNorm::EntrywiseL1 => diff.entrywise_l1(),
        MatrixNorm::MaxRowSum => diff.max_row_abs_sum(),
    }
    .as_f64();
    if size == 0.0 {
        return Err(Error::IdenticalInputs);
    }
    Ok((g(w1)? - g(w2)?).abs() / size)
}
