use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::denoise::{empirical_estimator, ideal_estimator, DenoiseResult};
use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;
use crate::linalg::LanczosOptions;
use crate::netstats::{StatValue, Statistic};
use crate::noise::{check_rates, sample_observed_stream, DebiasedOperator, NoiseSpec};
use crate::scalar::Scalar;
use crate::spectral::{eig_sym, EigenSystem};

/// Estimator applied in each trial, with its rank already resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    /// The debiased observation itself.
    Naive,
    Ideal(usize),
    Empirical(usize),
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Naive => "naive",
            Self::Ideal(_) => "ideal",
            Self::Empirical(_) => "empirical",
        }
    }

    pub fn rank(&self) -> Option<usize> {
        match *self {
            Self::Naive => None,
            Self::Ideal(s) | Self::Empirical(s) => Some(s),
        }
    }
}

#[derive(Clone, Debug)]
pub struct McOptions {
    pub trials: usize,
    pub statistic: Option<Statistic>,
    /// Rates used for debiasing; `None` means the true rates. Setting them
    /// to something else measures robustness to misspecification.
    pub assumed_rates: Option<(f64, f64)>,
    pub lanczos: LanczosOptions,
}

impl McOptions {
    pub fn new(trials: usize) -> Self {
        Self { trials, statistic: None, assumed_rates: None, lanczos: LanczosOptions::default() }
    }

    pub fn with_statistic(mut self, statistic: Statistic) -> Self {
        self.statistic = Some(statistic);
        self
    }

    pub fn with_assumed_rates(mut self, p: f64, q: f64) -> Self {
        self.assumed_rates = Some((p, q));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// `‖est - W_true‖_F²`.
    pub frob_sq: f64,
    /// `‖W̃_obs - W_true‖_F²` in the same trial.
    pub naive_frob_sq: f64,
    /// `(g(est) - g(W_true))²` when a statistic was requested.
    pub stat_sq: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub estimator: String,
    pub s: Option<usize>,
    pub p: f64,
    pub q: f64,
    pub assumed_p: f64,
    pub assumed_q: f64,
    pub trials: usize,
    pub seed: u64,
    pub statistic: Option<String>,
    pub mean_frob_sq: f64,
    pub std_frob_sq: f64,
    pub mean_stat_sq: Option<f64>,
    pub std_stat_sq: Option<f64>,
    /// `sqrt(mean ‖est - W‖² / mean ‖W̃_obs - W‖²)`; `None` when the
    /// denominator is zero.
    pub rel_error: Option<f64>,
    pub per_trial: Vec<TrialRecord>,
}

/// Sample mean and sample standard deviation.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl McReport {
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    /// One row per trial, summary fields repeated on every row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row<'a> {
            estimator: &'a str,
            s: Option<usize>,
            p: f64,
            q: f64,
            assumed_p: f64,
            assumed_q: f64,
            seed: u64,
            statistic: Option<&'a str>,
            trial: usize,
            frob_sq: f64,
            naive_frob_sq: f64,
            stat_sq: Option<f64>,
        }
        let mut out = csv::Writer::from_writer(w);
        for t in &self.per_trial {
            out.serialize(Row {
                estimator: &self.estimator,
                s: self.s,
                p: self.p,
                q: self.q,
                assumed_p: self.assumed_p,
                assumed_q: self.assumed_q,
                seed: self.seed,
                statistic: self.statistic.as_deref(),
                trial: t.trial,
                frob_sq: t.frob_sq,
                naive_frob_sq: t.naive_frob_sq,
                stat_sq: t.stat_sq,
            })?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `‖W̃_obs - W_true‖_F²` from the four pair counts: debiased entries are
/// `(1-q)/(1-p-q)` where an edge was observed and `-q/(1-p-q)` elsewhere.
fn naive_frob_sq<T: Scalar>(obs: &AdjacencyMatrix<T>, truth: &AdjacencyMatrix<T>, p: f64, q: f64) -> f64 {
    let n = truth.n();
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    let m = truth.edge_count() as f64;
    let m_obs = obs.edge_count() as f64;
    let kept = (0..n)
        .map(|i| truth.neighbours(i).filter(|&j| j > i && obs.get(i, j) == T::one()).count())
        .sum::<usize>() as f64;
    let d = 1.0 - p - q;
    let (hit, miss) = ((1.0 - q) / d, -q / d);
    2.0 * (kept * (hit - 1.0).powi(2)
        + (m - kept) * (miss - 1.0).powi(2)
        + (m_obs - kept) * hit.powi(2)
        + (pairs - m - m_obs + kept) * miss.powi(2))
}

/// Relative-error experiment: each trial samples `W_obs` on stream
/// `trial`, debiases it, applies `estimator` and records the squared
/// Frobenius error (and, optionally, the squared error of a statistic).
///
/// `true_sys` is the eigensystem of `w_true` used by the ideal estimator;
/// when `None` it is computed densely. For the naive estimator the statistic
/// is evaluated on the raw observation, as a practitioner without a noise
/// model would.
pub fn relative_error_mc<T: Scalar>(
    w_true: &AdjacencyMatrix<T>,
    spec: &NoiseSpec,
    estimator: Estimator,
    true_sys: Option<&EigenSystem<T>>,
    opts: &McOptions,
) -> Result<McReport> {
    spec.validate()?;
    if opts.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let (pa, qa) = opts.assumed_rates.unwrap_or((spec.p, spec.q));
    check_rates(pa, qa)?;
    let n = w_true.n();
    let owned;
    let sys = match (estimator, true_sys) {
        (Estimator::Ideal(_), Some(sys)) => Some(sys),
        (Estimator::Ideal(_), None) => {
            owned = eig_sym(w_true)?;
            Some(&owned)
        }
        _ => None,
    };
    if let Some(sys) = sys {
        if sys.n() != n {
            return Err(Error::dims(format!("eigensystem has n = {}, graph has n = {n}", sys.n())));
        }
    }
    let true_sq = 2.0 * w_true.edge_count() as f64;
    let g_true = opts.statistic.as_ref().map(|g| g.evaluate(w_true)).transpose()?;
    let stat_sq = |est: StatValue| -> Result<f64> { est.squared_error(g_true.as_ref().expect("statistic present")) };

    let per_trial: Vec<TrialRecord> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialRecord> {
            let obs = sample_observed_stream(w_true, spec, trial as u64)?;
            let w_tilde = DebiasedOperator::new(&obs, pa, qa)?;
            let naive = naive_frob_sq(&obs, w_true, pa, qa);
            let (frob_sq, stat) = match estimator {
                Estimator::Naive => {
                    let stat = opts.statistic.as_ref().map(|g| g.evaluate(&obs).and_then(&stat_sq)).transpose()?;
                    (naive, stat)
                }
                Estimator::Ideal(s) => {
                    let sys = sys.expect("ideal estimator has an eigensystem");
                    let est = ideal_estimator(&w_tilde, sys, s)?;
                    let (mut head, mut kept) = (0.0, 0.0);
                    for (c, l) in est.coefficients().iter().zip(sys.values()) {
                        head += (c.as_f64() - l.as_f64()).powi(2);
                        kept += l.as_f64().powi(2);
                    }
                    let frob = head + (true_sq - kept).max(0.0);
                    (frob, evaluate(&opts.statistic, &est, &stat_sq)?)
                }
                Estimator::Empirical(s) => {
                    let est = empirical_estimator(&w_tilde, s, &opts.lanczos)?;
                    let frob = est.frobenius_norm_sq().as_f64() - 2.0 * est.inner_with(w_true).as_f64() + true_sq;
                    (frob.max(0.0), evaluate(&opts.statistic, &est, &stat_sq)?)
                }
            };
            Ok(TrialRecord { trial, frob_sq, naive_frob_sq: naive, stat_sq: stat })
        })
        .collect::<Result<_>>()?;

    let frob: Vec<f64> = per_trial.iter().map(|t| t.frob_sq).collect();
    let naive: Vec<f64> = per_trial.iter().map(|t| t.naive_frob_sq).collect();
    let (mean_frob_sq, std_frob_sq) = mean_std(&frob);
    let mean_naive = naive.iter().sum::<f64>() / naive.len() as f64;
    let (mean_stat_sq, std_stat_sq) = match per_trial.iter().map(|t| t.stat_sq).collect::<Option<Vec<f64>>>() {
        Some(v) if opts.statistic.is_some() => {
            let (m, s) = mean_std(&v);
            (Some(m), Some(s))
        }
        _ => (None, None),
    };
    Ok(McReport {
        estimator: estimator.name().to_string(),
        s: estimator.rank(),
        p: spec.p,
        q: spec.q,
        assumed_p: pa,
        assumed_q: qa,
        trials: opts.trials,
        seed: spec.seed,
        statistic: opts.statistic.as_ref().map(ToString::to_string),
        mean_frob_sq,
        std_frob_sq,
        mean_stat_sq,
        std_stat_sq,
        rel_error: (mean_naive > 0.0).then(|| (mean_frob_sq / mean_naive).sqrt()),
        per_trial,
    })
}

fn evaluate<T: Scalar>(
    statistic: &Option<Statistic>,
    est: &DenoiseResult<T>,
    stat_sq: &impl Fn(StatValue) -> Result<f64>,
) -> Result<Option<f64>> {
    statistic.as_ref().map(|g| g.evaluate(est).and_then(stat_sq)).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle_graph;
    use crate::noise::{debias, sample_observed_stream};

    #[test]
    fn closed_form_naive_error_matches_dense() {
        let g: AdjacencyMatrix<f64> = cycle_graph(12).unwrap();
        let spec = NoiseSpec::new(0.2, 0.15, 4).unwrap();
        for stream in 0..5 {
            let obs = sample_observed_stream(&g, &spec, stream).unwrap();
            let dense = debias(&obs, 0.2, 0.15).unwrap().to_dense();
            let want = dense.sub(&g.to_dense()).unwrap().frobenius_norm_sq();
            assert!((naive_frob_sq(&obs, &g, 0.2, 0.15) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn noiseless_full_rank_is_exact() {
        let g: AdjacencyMatrix<f64> = cycle_graph(8).unwrap();
        let spec = NoiseSpec::new(0.0, 0.0, 1).unwrap();
        let opts = McOptions::new(3).with_statistic(Statistic::Density);
        for est in [Estimator::Naive, Estimator::Ideal(8), Estimator::Empirical(8)] {
            let r = relative_error_mc(&g, &spec, est, None, &opts).unwrap();
            assert!(r.per_trial.iter().all(|t| t.frob_sq < 1e-12 && t.stat_sq.unwrap() < 1e-24), "{est:?}");
            assert_eq!(r.rel_error, None);
        }
    }

    #[test]
    fn naive_ratio_is_one_and_runs_are_deterministic() {
        let g: AdjacencyMatrix<f64> = cycle_graph(10).unwrap();
        let spec = NoiseSpec::new(0.1, 0.2, 9).unwrap();
        let opts = McOptions::new(20);
        let a = relative_error_mc(&g, &spec, Estimator::Naive, None, &opts).unwrap();
        assert!((a.rel_error.unwrap() - 1.0).abs() < 1e-15);
        let b = relative_error_mc(&g, &spec, Estimator::Empirical(2), None, &opts).unwrap();
        let c = relative_error_mc(&g, &spec, Estimator::Empirical(2), None, &opts).unwrap();
        assert_eq!(b, c);
        let mut json = Vec::new();
        b.write_json(&mut json).unwrap();
        let back: McReport = serde_json::from_slice(&json).unwrap();
        assert_eq!(back.per_trial.len(), 20);
        let mut csv = Vec::new();
        b.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 21);
    }
}
