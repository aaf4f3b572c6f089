//! The subcommands. Every function writes into `out` and returns the paths it
//! created, in creation order.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use netdenoise::denoise::{empirical_bound_curve, ideal_bound_degree, ideal_bound_spectral, BoundCurve};
use netdenoise::error_rates::{estimate_error_rates, threshold_to_graph, RateConfig, ScoreMatrix};
use netdenoise::graph::write_edge_list;
use netdenoise::noise::sigma_max_independent;
use netdenoise::{
    eig_sym, empirical_estimator, relative_error_mc, Adjacency, DebiasedOperator, Eigen, Estimator, LanczosOptions,
    McOptions, McReport, NoiseSpec, StatValue, Statistic,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{EstimatorSpec, ExperimentConfig, GraphSpec, Rank};
use crate::{CliResult, Failure};

/// Stand-in for `log10(0)` in histogram output.
pub const ZERO_SENTINEL: f64 = -324.0;
pub const HISTOGRAM_BINS: usize = 50;

fn create(out: &Path, name: &str) -> CliResult<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(out)?;
    let path = out.join(name);
    let file = File::create(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<S: Serialize>(out: &Path, name: &str, value: &S) -> CliResult<PathBuf> {
    let (path, mut w) = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

/// A graph together with its eigensystem, computed densely on first use
/// when no closed form is available.
pub struct Workload {
    pub graph: Adjacency,
    sys: Option<Eigen>,
}

impl Workload {
    pub fn new(graph: Adjacency, sys: Option<Eigen>) -> Self {
        Self { graph, sys }
    }

    pub fn from_spec(spec: &GraphSpec) -> CliResult<Self> {
        let (graph, sys) = spec.build()?;
        Ok(Self::new(graph, sys))
    }

    pub fn eigensystem(&mut self) -> CliResult<&Eigen> {
        if self.sys.is_none() {
            self.sys = Some(eig_sym(&self.graph)?);
        }
        Ok(self.sys.as_ref().expect("just computed"))
    }

    pub fn spectral_bound(&mut self, p: f64, q: f64) -> CliResult<BoundCurve> {
        let values = self.eigensystem()?.values().to_vec();
        Ok(ideal_bound_spectral(&values, p, q, sigma_max_independent(p, q))?)
    }

    /// Resolves `auto` ranks: the spectral-bound argmin for the ideal
    /// estimator, rank one for the empirical one.
    pub fn resolve(&mut self, spec: EstimatorSpec, p: f64, q: f64) -> CliResult<Estimator> {
        Ok(match spec {
            EstimatorSpec::Naive => Estimator::Naive,
            EstimatorSpec::Ideal(Rank::Fixed(s)) => Estimator::Ideal(s),
            EstimatorSpec::Ideal(Rank::Auto) => Estimator::Ideal(self.spectral_bound(p, q)?.argmin_s),
            EstimatorSpec::Empirical(Rank::Fixed(s)) => Estimator::Empirical(s),
            EstimatorSpec::Empirical(Rank::Auto) => Estimator::Empirical(1),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct DegreeSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Serialize)]
pub struct GraphSummary {
    pub graph: GraphSpec,
    pub n: usize,
    pub m: usize,
    pub degree: DegreeSummary,
}

pub fn summarize(spec: &GraphSpec, graph: &Adjacency) -> GraphSummary {
    let d = graph.degrees();
    let (min, max) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let mean = if d.is_empty() { 0.0 } else { d.iter().sum::<f64>() / d.len() as f64 };
    GraphSummary {
        graph: spec.clone(),
        n: graph.n(),
        m: graph.edge_count(),
        degree: DegreeSummary { min: if d.is_empty() { 0.0 } else { min }, max, mean },
    }
}

/// Writes `<name>.edges` and the `<name>.json` sidecar.
pub fn generate(spec: &GraphSpec, name: &str, out: &Path) -> CliResult<Vec<PathBuf>> {
    let (graph, _) = spec.build()?;
    let (edges_path, mut w) = create(out, &format!("{name}.edges"))?;
    write_edge_list(&mut w, &graph)?;
    w.flush()?;
    let sidecar = write_json(out, &format!("{name}.json"), &summarize(spec, &graph))?;
    Ok(vec![edges_path, sidecar])
}

#[derive(Debug, Serialize)]
struct BoundRow {
    s: usize,
    ideal_spectral: f64,
    ideal_spectral_rel: f64,
    ideal_degree: f64,
    ideal_degree_rel: f64,
    empirical: Option<f64>,
    empirical_rel: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ArgminRow {
    kind: &'static str,
    argmin_s: usize,
    value: f64,
    relative: f64,
}

/// The three bound curves of a configuration.
pub struct Bounds {
    pub spectral: BoundCurve,
    pub degree: BoundCurve,
    /// `Err` holds the reason the concentration hypotheses fail.
    pub empirical: Result<BoundCurve, String>,
}

pub fn compute_bounds(work: &mut Workload, p: f64, q: f64, strict: bool) -> CliResult<Bounds> {
    let sigma = sigma_max_independent(p, q);
    let spectral = work.spectral_bound(p, q)?;
    let degrees = work.graph.degree_sequence();
    let degree = ideal_bound_degree(&degrees, p, q, sigma)?;
    let empirical = match empirical_bound_curve(&degrees, p, q, sigma, strict) {
        Ok(c) => Ok(c),
        Err(netdenoise::Error::HypothesisViolated(msg)) => Err(msg),
        Err(e) => return Err(e.into()),
    };
    Ok(Bounds { spectral, degree, empirical })
}

/// `bounds.csv` (one row per rank), `bounds_argmin.csv` and `bounds.json`.
/// With `require_empirical`, failing concentration hypotheses are an error
/// instead of empty columns.
pub fn bounds(cfg: &ExperimentConfig, require_empirical: bool, out: &Path) -> CliResult<Vec<PathBuf>> {
    let mut work = Workload::from_spec(&cfg.graph)?;
    let (p, q) = (cfg.noise.p, cfg.noise.q);
    let b = compute_bounds(&mut work, p, q, cfg.strict_corollary)?;
    if let (true, Err(msg)) = (require_empirical, &b.empirical) {
        return Err(Failure::Hypothesis(msg.clone()));
    }
    let spec_rel = b.spectral.relative();
    let deg_rel = b.degree.relative();
    let emp_rel = b.empirical.as_ref().ok().map(BoundCurve::relative);

    let (curve_path, w) = create(out, "bounds.csv")?;
    let mut csv = csv::Writer::from_writer(w);
    for s in 1..=b.spectral.n() {
        csv.serialize(BoundRow {
            s,
            ideal_spectral: b.spectral.value(s),
            ideal_spectral_rel: spec_rel[s - 1],
            ideal_degree: b.degree.value(s),
            ideal_degree_rel: deg_rel[s - 1],
            empirical: b.empirical.as_ref().ok().map(|c| c.value(s)),
            empirical_rel: emp_rel.as_ref().map(|r| r[s - 1]),
        })?;
    }
    csv.flush()?;

    let mut curves = vec![("ideal_spectral", &b.spectral), ("ideal_degree", &b.degree)];
    if let Ok(c) = &b.empirical {
        curves.push(("empirical", c));
    }
    let (argmin_path, w) = create(out, "bounds_argmin.csv")?;
    let mut csv = csv::Writer::from_writer(w);
    for (kind, c) in &curves {
        csv.serialize(ArgminRow {
            kind,
            argmin_s: c.argmin_s,
            value: c.value(c.argmin_s),
            relative: c.min_relative(),
        })?;
    }
    csv.flush()?;

    let summary = json!({
        "graph": summarize(&cfg.graph, &work.graph),
        "p": p,
        "q": q,
        "strict_corollary": cfg.strict_corollary,
        "naive_sq": b.spectral.naive_sq,
        "argmin": curves.iter().map(|(kind, c)| json!({
            "kind": kind,
            "argmin_s": c.argmin_s,
            "value": c.value(c.argmin_s),
            "relative": c.min_relative(),
        })).collect::<Vec<_>>(),
        "empirical_hypothesis": match &b.empirical {
            Ok(_) => json!("satisfied"),
            Err(msg) => json!(msg),
        },
    });
    let summary_path = write_json(out, "bounds.json", &summary)?;
    Ok(vec![curve_path, argmin_path, summary_path])
}

#[derive(Debug, Serialize)]
pub struct HistogramRow {
    /// Bin index, or `zero` for exact zeros.
    pub bin: String,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// 50 uniform bins over the observed range of `log10(x)` for `x > 0`;
/// exact zeros are counted in a final `zero` row at [`ZERO_SENTINEL`].
pub fn log10_histogram(values: &[f64], bins: usize) -> Vec<HistogramRow> {
    let logs: Vec<f64> = values.iter().filter(|&&x| x > 0.0).map(|x| x.log10()).collect();
    let zeros = values.iter().filter(|&&x| x == 0.0).count();
    let mut rows = Vec::new();
    if !logs.is_empty() {
        let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for x in &logs {
            let b = (((x - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        for (b, count) in counts.into_iter().enumerate() {
            let upper = if b + 1 == bins { hi } else { lo + (b + 1) as f64 * width };
            rows.push(HistogramRow { bin: b.to_string(), lower: lo + b as f64 * width, upper, count });
        }
    }
    if zeros > 0 {
        rows.push(HistogramRow { bin: "zero".into(), lower: ZERO_SENTINEL, upper: ZERO_SENTINEL, count: zeros });
    }
    rows
}

fn file_tag(estimator: Estimator, statistic: Option<&Statistic>) -> String {
    let mut tag = match estimator.rank() {
        Some(s) => format!("{}_{s}", estimator.name()),
        None => estimator.name().to_string(),
    };
    if let Some(g) = statistic {
        let name = g.to_string();
        let head = name.split(':').next().unwrap_or(&name).to_string();
        let tail = match g {
            Statistic::KWalk(k) => format!("{k}"),
            Statistic::Centralization(_) => name.split(':').nth(1).unwrap_or("").to_string(),
            _ => String::new(),
        };
        tag.push('_');
        tag.push_str(&head);
        if !tail.is_empty() {
            tag.push('_');
            tag.push_str(&tail);
        }
    }
    tag
}

pub fn parse_statistics(names: &[String]) -> CliResult<Vec<Statistic>> {
    names.iter().map(|s| Statistic::parse(s).map_err(Failure::from)).collect()
}

/// Runs every estimator against every statistic (or just the Frobenius
/// error when none is given). Writes `simulate_<tag>.json`, the per-trial
/// `simulate_<tag>.csv` and `histogram_<tag>.csv` of the `log10` squared
/// deviations.
pub fn simulate(cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let mut work = Workload::from_spec(&cfg.graph)?;
    let statistics = parse_statistics(&cfg.statistics)?;
    let stat_slots: Vec<Option<&Statistic>> =
        if statistics.is_empty() { vec![None] } else { statistics.iter().map(Some).collect() };
    let mut written = Vec::new();
    for spec in cfg.estimator_specs()? {
        let estimator = work.resolve(spec, cfg.noise.p, cfg.noise.q)?;
        if let Estimator::Ideal(_) = estimator {
            work.eigensystem()?;
        }
        let sys = match estimator {
            Estimator::Ideal(_) => work.sys.as_ref(),
            _ => None,
        };
        for stat in &stat_slots {
            let mut opts = McOptions::new(cfg.trials);
            if let Some(g) = stat {
                opts = opts.with_statistic((*g).clone());
            }
            let report = relative_error_mc(&work.graph, &cfg.noise, estimator, sys, &opts)?;
            written.extend(write_report(&report, &file_tag(estimator, *stat), out)?);
        }
    }
    Ok(written)
}

fn write_report(report: &McReport, tag: &str, out: &Path) -> CliResult<Vec<PathBuf>> {
    let json_path = {
        let (path, mut w) = create(out, &format!("simulate_{tag}.json"))?;
        report.write_json(&mut w)?;
        writeln!(w)?;
        w.flush()?;
        path
    };
    let (csv_path, w) = create(out, &format!("simulate_{tag}.csv"))?;
    report.write_csv(w)?;
    let deviations: Vec<f64> = report.per_trial.iter().map(|t| t.stat_sq.unwrap_or(t.frob_sq)).collect();
    let (hist_path, w) = create(out, &format!("histogram_{tag}.csv"))?;
    let mut csv = csv::Writer::from_writer(w);
    for row in log10_histogram(&deviations, HISTOGRAM_BINS) {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(vec![json_path, csv_path, hist_path])
}

#[derive(Debug, Serialize)]
pub struct GridCell {
    pub estimator: String,
    pub p_assumed: f64,
    pub q_assumed: f64,
    pub mean_sq: f64,
    pub std_sq: f64,
}

/// Squared density error of `empirical(1)` when debiasing with each assumed
/// `(p, q)` on data generated at the configured rates. The first row is the
/// naive estimator at the true rates, for scale.
pub fn robustness_cells(cfg: &ExperimentConfig) -> CliResult<Vec<GridCell>> {
    let grid =
        cfg.grid.as_ref().ok_or_else(|| Failure::Usage("robustness needs a [grid] with p and q lists".into()))?;
    if grid.p.is_empty() || grid.q.is_empty() {
        return Err(Failure::Usage("robustness grid lists must be nonempty".into()));
    }
    for &pa in &grid.p {
        for &qa in &grid.q {
            NoiseSpec::new(pa, qa, 0).map_err(|e| Failure::Usage(format!("grid cell ({pa}, {qa}): {e}")))?;
        }
    }
    let (graph, _) = cfg.graph.build()?;
    let density = Statistic::Density;
    let run = |estimator, rates: Option<(f64, f64)>| -> CliResult<GridCell> {
        let mut opts = McOptions::new(cfg.trials).with_statistic(density.clone());
        if let Some((pa, qa)) = rates {
            opts = opts.with_assumed_rates(pa, qa);
        }
        let r = relative_error_mc(&graph, &cfg.noise, estimator, None, &opts)?;
        Ok(GridCell {
            estimator: r.estimator.clone(),
            p_assumed: r.assumed_p,
            q_assumed: r.assumed_q,
            mean_sq: r.mean_stat_sq.expect("statistic requested"),
            std_sq: r.std_stat_sq.expect("statistic requested"),
        })
    };
    let mut cells = vec![run(Estimator::Naive, None)?];
    for &pa in &grid.p {
        for &qa in &grid.q {
            cells.push(run(Estimator::Empirical(1), Some((pa, qa)))?);
        }
    }
    Ok(cells)
}

pub fn robustness(cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let cells = robustness_cells(cfg)?;
    let (path, w) = create(out, "robustness.csv")?;
    let mut csv = csv::Writer::from_writer(w);
    for c in &cells {
        csv.serialize(c)?;
    }
    csv.flush()?;
    Ok(vec![path])
}

/// Rank and rates for evaluating statistics on a denoised observation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DenoiseRequest {
    pub p: f64,
    pub q: f64,
    pub s: usize,
}

#[derive(Debug, Serialize)]
pub struct StatsRow {
    pub statistic: String,
    pub observed: StatValue,
    pub denoised: Option<StatValue>,
}

/// Each statistic on the graph as given and, with a request, on the
/// empirical rank-`s` estimate from it.
pub fn stats_rows(
    graph: &Adjacency,
    statistics: &[Statistic],
    req: Option<DenoiseRequest>,
) -> CliResult<Vec<StatsRow>> {
    let estimate = match req {
        Some(r) => {
            let op = DebiasedOperator::new(graph, r.p, r.q)?;
            Some(empirical_estimator(&op, r.s, &LanczosOptions::default())?)
        }
        None => None,
    };
    statistics
        .iter()
        .map(|g| {
            Ok(StatsRow {
                statistic: g.to_string(),
                observed: g.evaluate(graph)?,
                denoised: estimate.as_ref().map(|e| g.evaluate(e)).transpose()?,
            })
        })
        .collect()
}

pub fn stats(
    graph: &Adjacency,
    statistics: &[Statistic],
    req: Option<DenoiseRequest>,
    out: &Path,
) -> CliResult<Vec<PathBuf>> {
    let rows = stats_rows(graph, statistics, req)?;
    let report = json!({
        "n": graph.n(),
        "m": graph.edge_count(),
        "denoise": req.map(|r| json!({ "p": r.p, "q": r.q, "s": r.s })),
        "rows": rows,
    });
    Ok(vec![write_json(out, "stats.json", &report)?])
}

/// Writes `rates.json` and, when asked, the thresholded graph as an edge
/// list.
pub fn estimate_rates(
    scores_path: &Path,
    config: &RateConfig,
    graph_out: Option<&Path>,
    out: &Path,
) -> CliResult<Vec<PathBuf>> {
    let scores = ScoreMatrix::read_csv(scores_path)?;
    let est = estimate_error_rates(&scores, config)?;
    let mut written = vec![write_json(out, "rates.json", &est)?];
    if let Some(path) = graph_out {
        let g: Adjacency = threshold_to_graph(&scores, est.threshold, est.two_sided)?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(File::create(path)?);
        write_edge_list(&mut w, &g)?;
        w.flush()?;
        written.push(path.to_path_buf());
    }
    Ok(written)
}
