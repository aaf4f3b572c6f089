use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::check_rates;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    IdealSpectral,
    IdealDegree,
    Empirical,
}

/// A bound on `d(Ŵ_s, W_true)²` for every rank `s = 1..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    /// `values[s - 1]` bounds the squared error at rank `s`.
    pub values: Vec<f64>,
    /// Rank (1-based) minimising the curve; smallest on ties.
    pub argmin_s: usize,
    /// Squared Frobenius risk of the debiased observation itself.
    pub naive_sq: f64,
    pub kind: BoundKind,
}

impl BoundCurve {
    fn new(values: Vec<f64>, argmin_s: usize, naive_sq: f64, kind: BoundKind) -> Self {
        Self { values, argmin_s, naive_sq, kind }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Bound at rank `s` (1-based).
    pub fn value(&self, s: usize) -> f64 {
        self.values[s - 1]
    }

    /// `sqrt(values[s] / naive_sq)`, the bound on `d(Ŵ_s, W) / d(W̃_obs, W)`.
    pub fn relative(&self) -> Vec<f64> {
        self.values.iter().map(|v| (v / self.naive_sq).sqrt()).collect()
    }

    pub fn min_relative(&self) -> f64 {
        (self.value(self.argmin_s) / self.naive_sq).sqrt()
    }
}

/// `naive_mse` with the edge count given as (half) the total weight, so it
/// also accepts `sum λ²/2` computed in floating point.
pub fn naive_mse_from_weight(n: usize, m: f64, p: f64, q: f64) -> Result<f64> {
    check_rates(p, q)?;
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    Ok(2.0 * (p * (1.0 - p) * m + q * (1.0 - q) * (pairs - m)) / (1.0 - p - q).powi(2))
}

fn noise_per_mode(p: f64, q: f64, sigma_max: f64) -> Result<f64> {
    check_rates(p, q)?;
    if sigma_max.is_nan() || sigma_max < 0.0 {
        return Err(Error::InvalidNoiseSpec(format!("sigma_max = {sigma_max} must be nonnegative")));
    }
    Ok(sigma_max / (1.0 - p - q).powi(2))
}

/// `tails[s] = sum_{j >= s} x[j]` for `s = 0..=len`.
fn suffix_sums(x: &[f64]) -> Vec<f64> {
    let mut tails = vec![0.0; x.len() + 1];
    for j in (0..x.len()).rev() {
        tails[j] = tails[j + 1] + x[j];
    }
    tails
}

fn first_argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best + 1
}

fn linear_plus_tail(per_mode: f64, terms: &[f64]) -> Vec<f64> {
    let tails = suffix_sums(terms);
    (1..=terms.len()).map(|s| per_mode * s as f64 + tails[s]).collect()
}

/// `values[s] = σ_max s / (1-p-q)² + sum_{j>s} λ_j²` for a spectrum in
/// canonical order. The minimum sits at the first `s` with
/// `λ_{s+1}² <= σ_max / (1-p-q)²`, or at `n` when no such `s` exists.
pub fn ideal_bound_spectral<T: Scalar>(spectrum: &[T], p: f64, q: f64, sigma_max: f64) -> Result<BoundCurve> {
    let tau = noise_per_mode(p, q, sigma_max)?;
    let n = spectrum.len();
    if n == 0 {
        return Err(Error::RankOutOfRange { s: 1, n: 0 });
    }
    let sq: Vec<f64> = spectrum.iter().map(|l| l.as_f64().powi(2)).collect();
    let values = linear_plus_tail(tau, &sq);
    let argmin = (1..n).find(|&s| sq[s] <= tau).unwrap_or(n);
    let m = sq.iter().sum::<f64>() / 2.0;
    Ok(BoundCurve::new(values, argmin, naive_mse_from_weight(n, m, p, q)?, BoundKind::IdealSpectral))
}

/// `values[s] = σ_max s / (1-p-q)² + sum_{j>s} d(j)` for a descending degree
/// sequence. For integer degrees the minimum is the first `s` with
/// `d(s+1) = floor(σ_max / (1-p-q)²)` when that value occurs; otherwise the
/// first index attaining the minimum.
pub fn ideal_bound_degree<T: Scalar>(degrees: &[T], p: f64, q: f64, sigma_max: f64) -> Result<BoundCurve> {
    let tau = noise_per_mode(p, q, sigma_max)?;
    let n = degrees.len();
    if n == 0 {
        return Err(Error::RankOutOfRange { s: 1, n: 0 });
    }
    let d: Vec<f64> = degrees.iter().map(|x| x.as_f64()).collect();
    let values = linear_plus_tail(tau, &d);
    let integral = d.iter().all(|x| x.fract() == 0.0);
    let argmin =
        integral.then(|| (1..n).find(|&s| d[s] == tau.floor())).flatten().unwrap_or_else(|| first_argmin(&values));
    let m = d.iter().sum::<f64>() / 2.0;
    Ok(BoundCurve::new(values, argmin, naive_mse_from_weight(n, m, p, q)?, BoundKind::IdealDegree))
}

/// Deviation `ε` such that the debiased maximum degree exceeds `δ + ε` with
/// probability at most `1/n²`:
/// `ε = (1 + √7)/(1-p-q) · sqrt(ln n · [δ(1-p) + q(n-1-δ)])`.
pub fn concentration_epsilon(delta: f64, n: usize, p: f64, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) || !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidNoiseSpec(format!("rates p = {p}, q = {q} outside [0, 1)")));
    }
    if p + q >= 1.0 {
        return Err(Error::HypothesisViolated(format!("p + q < 1 fails: p + q = {}", p + q)));
    }
    if n < 2 {
        return Err(Error::TooFewVertices { min: 2, got: n });
    }
    let ln_n = (n as f64).ln();
    let spread = delta * (1.0 - p) + q * ((n - 1) as f64 - delta);
    if ln_n > spread {
        return Err(Error::HypothesisViolated(format!(
            "ln(n) <= δ(1-p) + q(n-1-δ) fails: ln(n) = {ln_n:.6}, right side = {spread:.6}"
        )));
    }
    Ok((1.0 + 7f64.sqrt()) / (1.0 - p - q) * (ln_n * spread).sqrt())
}

/// `E[d̃_max²] <= (δ + ε)² + [max(q, 1-q)/(1-p-q)]²`.
///
/// With `strict` the remainder term carries the extra `(n-1)²` factor that
/// the worst-case row sum implies.
pub fn expected_dmax_sq_bound(delta: f64, n: usize, p: f64, q: f64, strict: bool) -> Result<f64> {
    let eps = concentration_epsilon(delta, n, p, q)?;
    let mut rest = (q.max(1.0 - q) / (1.0 - p - q)).powi(2);
    if strict {
        rest *= ((n - 1) as f64).powi(2);
    }
    Ok((delta + eps).powi(2) + rest)
}

/// `d(Ŵ_s, Ŵ_ideal,s)² <= 2 s E[d̃_max²]`.
pub fn empirical_bound(delta: f64, n: usize, p: f64, q: f64, s: usize, strict: bool) -> Result<f64> {
    if s == 0 || s > n {
        return Err(Error::RankOutOfRange { s, n });
    }
    Ok(2.0 * s as f64 * expected_dmax_sq_bound(delta, n, p, q, strict)?)
}

/// Combined bound on `d(Ŵ_s, W_true)²` through
/// `‖a + b‖² <= 2‖a‖² + 2‖b‖²`, with the degree form of the ideal part:
/// `2 [2 s E + σ_max s/(1-p-q)² + sum_{j>s} d(j)]`.
pub fn empirical_bound_curve<T: Scalar>(
    degrees: &[T],
    p: f64,
    q: f64,
    sigma_max: f64,
    strict: bool,
) -> Result<BoundCurve> {
    let tau = noise_per_mode(p, q, sigma_max)?;
    let n = degrees.len();
    if n == 0 {
        return Err(Error::RankOutOfRange { s: 1, n: 0 });
    }
    let d: Vec<f64> = degrees.iter().map(|x| x.as_f64()).collect();
    let delta = d.iter().copied().fold(0.0, f64::max);
    let e = expected_dmax_sq_bound(delta, n, p, q, strict)?;
    let values: Vec<f64> = linear_plus_tail(2.0 * e + tau, &d).into_iter().map(|v| 2.0 * v).collect();
    let argmin = first_argmin(&values);
    let m = d.iter().sum::<f64>() / 2.0;
    Ok(BoundCurve::new(values, argmin, naive_mse_from_weight(n, m, p, q)?, BoundKind::Empirical))
}
