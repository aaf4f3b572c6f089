//! Estimating the edge error rates `(p, q)` from a matrix of pairwise
//! association scores with a two-component empirical-null mixture.
//!
//! The null component is a Gaussian fitted by maximum likelihood to the
//! scores inside the interquartile window (truncated-normal likelihood), which
//! the alternative barely reaches when it is a minority. The edge threshold is
//! where the local false discovery rate `η0 f0(x) / f(x)` first drops to the
//! configured level, with `f` a Gaussian kernel density estimate. The
//! alternative is a Gaussian fitted to the scores above the threshold under
//! left truncation.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Fewest off-diagonal scores a fit is attempted on.
pub const MIN_SCORES: usize = 30;
const SYMMETRY_TOL: f64 = 1e-10;
const KDE_GRID: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreMatrix {
    scores: Matrix<f64>,
}

impl ScoreMatrix {
    pub fn new(scores: Matrix<f64>) -> Result<Self> {
        if !scores.is_square() {
            return Err(Error::dims(format!("score matrix is {}x{}", scores.rows(), scores.cols())));
        }
        let n = scores.rows();
        for i in 0..n {
            for j in 0..n {
                if i != j && !scores.get(i, j).is_finite() {
                    return Err(Error::Parse(format!("score ({i}, {j}) is not finite")));
                }
            }
        }
        let asym = scores.asymmetry();
        if asym.is_nan() || asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self { scores })
    }

    /// `n x n` CSV; a first row that does not parse as numbers is taken as a
    /// header and skipped.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, record) in rdr.records().enumerate() {
            let record = record?;
            let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if lineno == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("row {}: {e}", lineno + 1))),
            }
        }
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::dims(format!("row {} has {} fields, expected {n}", bad + 1, rows[bad].len())));
        }
        Self::new(Matrix::from_vec(n, n, rows.concat())?)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(File::open(path)?)
    }

    pub fn n(&self) -> usize {
        self.scores.rows()
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.scores
    }

    /// Scores `(i, j)`, `i < j`, row by row.
    pub fn off_diagonal(&self) -> Vec<f64> {
        let n = self.n();
        (0..n).flat_map(|i| self.scores.row(i)[i + 1..].to_vec()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullFamily {
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum ThresholdRule {
    /// First score above the null centre with local fdr at most this level.
    Lfdr(f64),
    /// Null centre plus this many null standard deviations.
    NullSd(f64),
    /// A fixed cutoff.
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateConfig {
    pub null_family: NullFamily,
    pub threshold_rule: ThresholdRule,
    /// Declare edges on `|score| > t` instead of `score > t`.
    pub two_sided: bool,
}

impl Default for RateConfig {
    fn default() -> Self {
        Self { null_family: NullFamily::Gaussian, threshold_rule: ThresholdRule::Lfdr(0.2), two_sided: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub sd: f64,
}

impl Gaussian {
    fn z(&self, x: f64) -> f64 {
        (x - self.mean) / self.sd
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = self.z(x);
        (-0.5 * z * z).exp() / (self.sd * (2.0 * std::f64::consts::PI).sqrt())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        normal_cdf(self.z(x))
    }

    pub fn sf(&self, x: f64) -> f64 {
        normal_cdf(-self.z(x))
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub n_scores: usize,
    pub window: (f64, f64),
    pub n_in_window: usize,
    pub null: Gaussian,
    pub alternative: Gaussian,
    pub bandwidth: f64,
    pub n_above: usize,
    pub null_expected_above: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateEstimate {
    pub p_hat: f64,
    pub q_hat: f64,
    pub threshold: f64,
    pub eta0: f64,
    pub two_sided: bool,
    pub diagnostics: FitDiagnostics,
}

impl ErrorRateEstimate {
    /// `(p̂, q̂)` the fitted components give at another threshold.
    pub fn rates_at(&self, t: f64) -> (f64, f64) {
        let d = &self.diagnostics;
        let q = if self.two_sided { d.null.sf(t) + d.null.cdf(-t) } else { d.null.sf(t) };
        (d.alternative.cdf(t), q)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Minimises `f` over the plane from `start` with initial step `step`.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: [f64; 2]) -> [f64; 2] {
    let mut pts = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut vals = pts.map(&f);
    for _ in 0..2000 {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.map(|i| pts[i]);
        vals = idx.map(|i| vals[i]);
        let spread = (vals[2] - vals[0]).abs();
        if spread <= 1e-12 * (1.0 + vals[0].abs()) {
            break;
        }
        let c = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |t: f64| [c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])];
        let r = along(-1.0);
        let fr = f(r);
        if fr < vals[0] {
            let e = along(-2.0);
            let fe = f(e);
            (pts[2], vals[2]) = if fe < fr { (e, fe) } else { (r, fr) };
        } else if fr < vals[1] {
            (pts[2], vals[2]) = (r, fr);
        } else {
            let k = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fk = f(k);
            if fk < vals[2].min(fr) {
                (pts[2], vals[2]) = (k, fk);
            } else {
                for i in 1..3 {
                    pts[i] = [(pts[0][0] + pts[i][0]) / 2.0, (pts[0][1] + pts[i][1]) / 2.0];
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    let best = (0..3).fold(0, |b, i| if vals[i] < vals[b] { i } else { b });
    pts[best]
}

/// Gaussian maximum likelihood for the sample `xs` observed only inside
/// `(lo, hi)`; `lo`/`hi` may be infinite.
fn truncated_gaussian_mle(xs: &[f64], lo: f64, hi: f64) -> Gaussian {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k).sqrt().max(1e-12);
    let nll = |[mu, log_sd]: [f64; 2]| {
        let sd = log_sd.exp();
        let g = Gaussian { mean: mu, sd };
        let mass = g.cdf(hi) - g.cdf(lo);
        if mass.is_nan() || mass <= 0.0 {
            return f64::INFINITY;
        }
        let ss: f64 = xs.iter().map(|&x| g.z(x).powi(2)).sum();
        0.5 * ss + k * log_sd + k * mass.ln()
    };
    let [mu, log_sd] = nelder_mead(nll, [mean, sd.ln()], [0.5 * sd, 0.3]);
    Gaussian { mean: mu, sd: log_sd.exp() }
}

fn quantile(sorted: &[f64], prob: f64) -> f64 {
    let pos = prob * (sorted.len() - 1) as f64;
    let (lo, frac) = (pos.floor() as usize, pos.fract());
    if lo + 1 < sorted.len() {
        sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
    } else {
        sorted[lo]
    }
}

/// Linearly binned Gaussian KDE on an even grid over `[lo, hi]`.
fn binned_kde(sorted: &[f64], lo: f64, hi: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
    let dx = (hi - lo) / (KDE_GRID - 1) as f64;
    let mut counts = vec![0.0; KDE_GRID];
    for &x in sorted {
        let pos = ((x - lo) / dx).clamp(0.0, (KDE_GRID - 1) as f64);
        let i = (pos.floor() as usize).min(KDE_GRID - 2);
        let f = pos - i as f64;
        counts[i] += 1.0 - f;
        counts[i + 1] += f;
    }
    let reach = ((4.0 * h / dx).ceil() as usize).min(KDE_GRID);
    let kernel: Vec<f64> = (0..=reach).map(|d| Gaussian { mean: 0.0, sd: h }.pdf(d as f64 * dx)).collect();
    let total = sorted.len() as f64;
    let grid: Vec<f64> = (0..KDE_GRID).map(|i| lo + i as f64 * dx).collect();
    let dens = (0..KDE_GRID)
        .map(|i| {
            let a = i.saturating_sub(reach);
            let b = (i + reach).min(KDE_GRID - 1);
            (a..=b).map(|j| counts[j] * kernel[i.abs_diff(j)]).sum::<f64>() / total
        })
        .collect();
    (grid, dens)
}

/// Fits the mixture and returns `(p̂, q̂)` at the chosen threshold.
pub fn estimate_error_rates(scores: &ScoreMatrix, config: &RateConfig) -> Result<ErrorRateEstimate> {
    let NullFamily::Gaussian = config.null_family;
    let raw = scores.off_diagonal();
    if raw.len() < MIN_SCORES {
        return Err(Error::FitFailed(format!("{} off-diagonal scores, need at least {MIN_SCORES}", raw.len())));
    }
    let mut sorted = raw.clone();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    if max - min <= 1e-12 * max.abs().max(min.abs()).max(1.0) {
        return Err(Error::FitFailed("scores are degenerate (all equal)".into()));
    }

    // Null from the central half of the signed scores.
    let (q1, q3) = (quantile(&sorted, 0.25), quantile(&sorted, 0.75));
    let window: Vec<f64> = sorted.iter().copied().filter(|&x| x >= q1 && x <= q3).collect();
    if q3 - q1 <= 0.0 || window.len() < 3 {
        return Err(Error::FitFailed("interquartile window is degenerate".into()));
    }
    let null = truncated_gaussian_mle(&window, q1, q3);
    let null_mass = null.cdf(q3) - null.cdf(q1);
    let eta0 = (window.len() as f64 / (raw.len() as f64 * null_mass)).min(1.0);

    // Edge declarations act on the score or its magnitude.
    let stat: Vec<f64> = if config.two_sided { sorted.iter().map(|x| x.abs()).collect() } else { sorted.clone() };
    let null_sf = |t: f64| if config.two_sided { null.sf(t) + null.cdf(-t) } else { null.sf(t) };
    let null_pdf = |x: f64| if config.two_sided { null.pdf(x) + null.pdf(-x) } else { null.pdf(x) };
    let mut stat_sorted = stat.clone();
    stat_sorted.sort_by(f64::total_cmp);

    let iqr = quantile(&stat_sorted, 0.75) - quantile(&stat_sorted, 0.25);
    let n_f = stat.len() as f64;
    let sd_all = {
        let m = stat.iter().sum::<f64>() / n_f;
        (stat.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n_f - 1.0)).sqrt()
    };
    let spread = if iqr > 0.0 { sd_all.min(iqr / 1.349) } else { sd_all };
    let bandwidth = 0.9 * spread * n_f.powf(-0.2);

    let centre = if config.two_sided { null.mean.abs() } else { null.mean };
    let threshold = match config.threshold_rule {
        ThresholdRule::Fixed(t) => t,
        ThresholdRule::NullSd(k) => centre + k * null.sd,
        ThresholdRule::Lfdr(level) => {
            let (lo, hi) = (stat_sorted[0], stat_sorted[stat_sorted.len() - 1]);
            let (grid, dens) = binned_kde(&stat_sorted, lo, hi, bandwidth);
            grid.iter()
                .zip(&dens)
                .find(|&(&x, &f)| x > centre && f > 0.0 && eta0 * null_pdf(x) / f <= level)
                .map(|(&x, _)| x)
                .ok_or_else(|| Error::FitFailed("no alternative component: local fdr never reaches the level".into()))?
        }
    };

    let above: Vec<f64> = stat.iter().copied().filter(|&x| x > threshold).collect();
    let null_expected = eta0 * n_f * null_sf(threshold);
    let excess = above.len() as f64 - null_expected;
    if excess <= (3.0 * null_expected.sqrt()).max(5.0) {
        return Err(Error::FitFailed(format!(
            "no alternative component: {} scores above {threshold:.6}, {null_expected:.1} expected under the null",
            above.len()
        )));
    }
    let alternative = truncated_gaussian_mle(&above, threshold, f64::INFINITY);
    let (p_hat, q_hat) = (alternative.cdf(threshold), null_sf(threshold));
    if p_hat + q_hat >= 1.0 {
        return Err(Error::InfeasibleRates(p_hat + q_hat));
    }
    Ok(ErrorRateEstimate {
        p_hat,
        q_hat,
        threshold,
        eta0,
        two_sided: config.two_sided,
        diagnostics: FitDiagnostics {
            n_scores: raw.len(),
            window: (q1, q3),
            n_in_window: window.len(),
            null,
            alternative,
            bandwidth,
            n_above: above.len(),
            null_expected_above: null_expected,
        },
    })
}

/// Edge `{i, j}` whenever `score(i, j) > threshold` (or `|score| >` it).
pub fn threshold_to_graph<T: Scalar>(
    scores: &ScoreMatrix,
    threshold: f64,
    two_sided: bool,
) -> Result<AdjacencyMatrix<T>> {
    let n = scores.n();
    let m = scores.matrix();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let s = if two_sided { m.get(i, j).abs() } else { m.get(i, j) };
            if s > threshold {
                edges.push((i, j));
            }
        }
    }
    AdjacencyMatrix::from_edge_list(n, &edges)
}
