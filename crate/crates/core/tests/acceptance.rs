//! End-to-end acceptance checks A1-A9. Each test prints one
//! `A<k> PASS|FAIL: ...` line before asserting.
//!
//! Run with `cargo test -p netdenoise --test acceptance -- --nocapture` to
//! see the lines; the Monte Carlo criteria (A3, A9) take several minutes.

use std::time::Instant;

use nalgebra::DMatrix;
use netdenoise::denoise::{concentration_epsilon, ideal_bound_degree, ideal_bound_spectral};
use netdenoise::graph::{chung_lu_power_law, cycle_graph, neps, path_graph};
use netdenoise::linalg::dot;
use netdenoise::netstats::{
    conductance, density, eigenvector_centrality, ev_distance, geodesic_distances, k_walk_counts, lipschitz_ratio,
    lipschitz_ratio_in, MatrixNorm,
};
use netdenoise::noise::{naive_mse, sample_observed_stream, sigma_max_independent};
use netdenoise::spectral::{cycle_eigensystem, neps_eigensystem, path_eigensystem};
use netdenoise::{
    debias, eig_sym, relative_error_mc, top_modes, Adjacency, DenseMatrix, Eigen, Estimator, LanczosOptions, McOptions,
    NepsBasis, NoiseSpec, Statistic,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

fn report(id: &str, pass: bool, detail: String) {
    println!("{id} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

fn erdos_renyi(n: usize, prob: f64, seed: u64) -> Adjacency {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < prob {
                edges.push((i, j));
            }
        }
    }
    Adjacency::from_edge_list(n, &edges).unwrap()
}

fn torus() -> (Adjacency, Eigen) {
    let basis = NepsBasis::cartesian(5);
    let c5: Adjacency = cycle_graph(5).unwrap();
    let g = neps(&vec![c5; 5], &basis).unwrap();
    let sys = neps_eigensystem(&vec![cycle_eigensystem(5).unwrap(); 5], &basis).unwrap();
    (g, sys)
}

/// Per-entry sums of the debiased observation and of the squared Frobenius
/// error over `trials` draws.
fn debiased_moments(w: &Adjacency, spec: &NoiseSpec, trials: usize) -> (Vec<f64>, Vec<f64>) {
    let n = w.n();
    let truth = w.to_dense();
    let mut sum = vec![0.0; n * n];
    let mut frob = Vec::with_capacity(trials);
    for t in 0..trials {
        let obs = sample_observed_stream(w, spec, t as u64).unwrap();
        let d = debias(&obs, spec.p, spec.q).unwrap().to_dense();
        let mut f = 0.0;
        for (k, (x, y)) in d.data().iter().zip(truth.data()).enumerate() {
            sum[k] += x;
            f += (x - y).powi(2);
        }
        frob.push(f);
    }
    (sum, frob)
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn a1_unbiasedness() {
    let start = Instant::now();
    let (p, q, trials) = (0.2, 0.1, 2000);
    let w = erdos_renyi(20, 0.3, 1);
    let spec = NoiseSpec::new(p, q, 17).unwrap();
    let (sum, _) = debiased_moments(&w, &spec, trials);
    let d2 = (1.0 - p - q) * (1.0 - p - q);
    let (mut within, mut total) = (0, 0);
    for i in 0..20 {
        for j in 0..20 {
            if i == j {
                continue;
            }
            let truth = w.get(i, j);
            let var = if truth == 1.0 { p * (1.0 - p) } else { q * (1.0 - q) } / d2;
            let mean = sum[i * 20 + j] / trials as f64;
            total += 1;
            if (mean - truth).abs() <= 4.0 * (var / trials as f64).sqrt() {
                within += 1;
            }
        }
    }
    let frac = within as f64 / total as f64;
    let secs = start.elapsed().as_secs_f64();
    report("A1", frac >= 0.99 && secs < 10.0, format!("{within}/{total} entries within 4 SE ({frac:.4}), {secs:.1}s"));
}

#[test]
fn a2_naive_mse_formula() {
    let start = Instant::now();
    let (p, q) = (0.2, 0.1);
    let w = erdos_renyi(20, 0.3, 1);
    let spec = NoiseSpec::new(p, q, 23).unwrap();
    let (_, frob) = debiased_moments(&w, &spec, 2000);
    let (mean, se) = mean_se(&frob);
    let exact = naive_mse(20, w.edge_count(), p, q).unwrap();
    let secs = start.elapsed().as_secs_f64();
    report(
        "A2",
        (mean - exact).abs() <= 4.0 * se && secs < 10.0,
        format!("MC {mean:.4} (SE {se:.4}) vs formula {exact:.4}, {secs:.1}s"),
    );
}

#[test]
fn a3_density_mse_on_torus() {
    let start = Instant::now();
    let (g, sys) = torus();
    let (p, q) = (0.3, 0.4);
    let spec = NoiseSpec::new(p, q, 2024).unwrap();
    let s = ideal_bound_spectral(sys.values(), p, q, sigma_max_independent(p, q)).unwrap().argmin_s;
    let opts = McOptions::new(500).with_statistic(Statistic::Density);
    let naive = relative_error_mc(&g, &spec, Estimator::Naive, None, &opts).unwrap();
    let ideal = relative_error_mc(&g, &spec, Estimator::Ideal(1845), Some(&sys), &opts).unwrap();
    let (nm, im) = (naive.mean_stat_sq.unwrap(), ideal.mean_stat_sq.unwrap());
    let naive_ok = (nm - 0.1582).abs() <= 0.01 * 0.1582;
    let ideal_ok = (1e-7..=2e-6).contains(&im);
    let secs = start.elapsed().as_secs_f64();
    report(
        "A3",
        naive_ok && ideal_ok && s == 1845 && secs < 1800.0,
        format!(
            "naive density MSE {nm:.5e} (std {:.3e}), ideal({s}) density MSE {im:.3e} (std {:.3e}), {secs:.0}s",
            naive.std_stat_sq.unwrap(),
            ideal.std_stat_sq.unwrap()
        ),
    );
}

#[test]
fn a4_bound_curves_on_torus() {
    let start = Instant::now();
    let (g, sys) = torus();
    let (p, q) = (0.3, 0.4);
    let sigma = sigma_max_independent(p, q);
    let spectral = ideal_bound_spectral(sys.values(), p, q, sigma).unwrap();
    let degree = ideal_bound_degree(&g.degree_sequence(), p, q, sigma).unwrap();
    let rel_min = spectral.min_relative();
    let deg_rel = degree.relative();
    let (d1, dn) = (deg_rel[0], deg_rel[deg_rel.len() - 1]);
    let ok = (rel_min - 0.0154).abs() <= 0.15 * 0.0154
        && spectral.argmin_s.abs_diff(1845) <= 20
        && (d1 - 0.0347).abs() <= 0.05 * 0.0347
        && (dn - 0.0179).abs() <= 0.05 * 0.0179
        && dn < 0.027
        && 0.027 < d1;
    let secs = start.elapsed().as_secs_f64();
    report(
        "A4",
        ok && secs < 60.0,
        format!("spectral min {rel_min:.5} at s={}, degree endpoints {d1:.5} / {dn:.5}, {secs:.2}s", spectral.argmin_s),
    );
}

#[test]
fn a5_max_degree_tail() {
    let start = Instant::now();
    let (g, _) = torus();
    let (p, q, draws) = (0.3, 0.4, 10_000);
    let n = g.n();
    let degrees = g.degrees();
    let delta = degrees.iter().copied().fold(0.0, f64::max);
    let eps = concentration_epsilon(delta, n, p, q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    // Vertex degrees are all 10, so every row shares the same two binomials.
    let kept: Vec<Binomial> = degrees.iter().map(|&d| Binomial::new(d as u64, 1.0 - p).unwrap()).collect();
    let spurious: Vec<Binomial> =
        degrees.iter().map(|&d| Binomial::new((n - 1) as u64 - d as u64, q).unwrap()).collect();
    let shift = q * (n - 1) as f64;
    let mut exceed = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..draws {
        let mut dmax = f64::NEG_INFINITY;
        for i in 0..n {
            let obs = (kept[i].sample(&mut rng) + spurious[i].sample(&mut rng)) as f64;
            dmax = dmax.max((obs - shift) / (1.0 - p - q));
        }
        worst = worst.max(dmax);
        if dmax > delta + eps {
            exceed += 1;
        }
    }
    let freq = exceed as f64 / draws as f64;
    let p0 = 1.0 / (n * n) as f64;
    let limit = p0 + 4.0 * (p0 * (1.0 - p0) / draws as f64).sqrt();
    let secs = start.elapsed().as_secs_f64();
    report(
        "A5",
        freq <= limit && secs < 300.0,
        format!("P[d_max > {:.1}] = {freq} (limit {limit:.3e}); largest observed {worst:.1}, {secs:.1}s", delta + eps),
    );
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// One-sided exact p-value of Kendall's tau against an increasing trend,
/// by enumerating all orderings of `ys` (no ties, small samples).
fn kendall_increasing_p(ys: &[f64]) -> f64 {
    fn score(v: &[f64]) -> i32 {
        let mut s = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                s += if v[j] > v[i] { 1 } else { -1 };
            }
        }
        s
    }
    fn permutations(items: &mut Vec<f64>, k: usize, out: &mut Vec<Vec<f64>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permutations(items, k + 1, out);
            items.swap(k, i);
        }
    }
    let observed = score(ys);
    let mut all = Vec::new();
    permutations(&mut ys.to_vec(), 0, &mut all);
    all.iter().filter(|v| score(v) >= observed).count() as f64 / all.len() as f64
}

#[test]
fn a6_scaling_trends() {
    let start = Instant::now();
    let (p, q, trials) = (0.3, 0.4, 20);
    let sizes = [200usize, 400, 800, 1600];
    let mut ideal_sq = Vec::new();
    let mut scaled_emp = Vec::new();
    for (k, &n) in sizes.iter().enumerate() {
        let g: Adjacency = chung_lu_power_law(n, 2.5, 2.0, 100 + k as u64).unwrap();
        let sys = eig_sym(&g).unwrap();
        let s = ideal_bound_spectral(sys.values(), p, q, sigma_max_independent(p, q)).unwrap().argmin_s;
        let spec = NoiseSpec::new(p, q, 7).unwrap();
        let opts = McOptions::new(trials);
        let ideal = relative_error_mc(&g, &spec, Estimator::Ideal(s), Some(&sys), &opts).unwrap();
        let emp = relative_error_mc(&g, &spec, Estimator::Empirical(1), None, &opts).unwrap();
        ideal_sq.push(ideal.rel_error.unwrap().powi(2));
        scaled_emp.push(emp.rel_error.unwrap().powi(2) * n as f64 / (n as f64).ln());
    }
    let logn: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let logs: Vec<f64> = ideal_sq.iter().map(|x| x.ln()).collect();
    let b = slope(&logn, &logs);
    let decreasing = ideal_sq.windows(2).all(|w| w[1] < w[0]);
    let kendall_p = kendall_increasing_p(&scaled_emp);
    let secs = start.elapsed().as_secs_f64();
    report(
        "A6",
        decreasing && b <= -0.5 && kendall_p > 0.05,
        format!(
            "ideal squared rel {:?}, log-log slope {b:.3}; empirical(1) sq rel * n/log n {scaled_emp:.3?} \
             (Kendall p = {kendall_p:.3}), {secs:.0}s",
            ideal_sq.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()
        ),
    );
}

fn random_weighted(n: usize, rng: &mut ChaCha8Rng, fill: f64) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < fill {
                let w = rng.random::<f64>();
                m.set(i, j, w);
                m.set(j, i, w);
            }
        }
    }
    m
}

/// A random binary graph on `n` vertices containing the path `0-1-...-(n-1)`.
fn random_connected(n: usize, rng: &mut ChaCha8Rng, fill: f64) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || rng.random::<f64>() < fill {
                m.set(i, j, 1.0);
                m.set(j, i, 1.0);
            }
        }
    }
    m
}

fn values_by_value(m: &DenseMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = eig_sym(m).unwrap().values().to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

#[test]
fn a7_lipschitz_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pairs = 1000;
    let mut failures = Vec::new();

    // Density.
    let mut worst_density = 0.0f64;
    for _ in 0..pairs {
        let n = rng.random_range(3..12);
        let (a, b) = (random_weighted(n, &mut rng, 0.5), random_weighted(n, &mut rng, 0.5));
        let Ok(r) = lipschitz_ratio(|w: &DenseMatrix| density(w), &a, &b) else { continue };
        let limit = 1.0 / (n * (n - 1)) as f64;
        worst_density = worst_density.max(r / limit);
        if r > limit * (1.0 + 1e-12) {
            failures.push(format!("density ratio {r} > {limit} (n = {n})"));
        }
    }

    // Conductance: both sides of the cut hold an edge of weight at least delta.
    let mut worst_conductance = 0.0f64;
    for _ in 0..pairs {
        let n = rng.random_range(4..12);
        let delta = rng.random_range(0.05..1.0);
        let k = rng.random_range(2..n - 1);
        let set: Vec<usize> = (0..k).collect();
        let plant = |m: &mut DenseMatrix| {
            for (i, j) in [(0, 1), (n - 2, n - 1)] {
                let w = m.get(i, j).max(delta);
                m.set(i, j, w);
                m.set(j, i, w);
            }
        };
        let (mut a, mut b) = (random_weighted(n, &mut rng, 0.4), random_weighted(n, &mut rng, 0.4));
        plant(&mut a);
        plant(&mut b);
        let Ok(r) = lipschitz_ratio(|w: &DenseMatrix| conductance(w, &set), &a, &b) else { continue };
        worst_conductance = worst_conductance.max(r * delta / 3.0);
        if r > 3.0 / delta {
            failures.push(format!("conductance ratio {r} > 3/{delta}"));
        }
    }

    // Maximum degree centrality under the row-sum norm.
    for _ in 0..pairs {
        let n = rng.random_range(3..12);
        let (a, b) = (random_weighted(n, &mut rng, 0.5), random_weighted(n, &mut rng, 0.5));
        let max_degree = |w: &DenseMatrix| Ok((0..n).map(|i| w.row(i).iter().sum::<f64>()).fold(0.0, f64::max));
        let Ok(r) = lipschitz_ratio_in(MatrixNorm::MaxRowSum, max_degree, &a, &b) else { continue };
        if r > 1.0 + 1e-12 {
            failures.push(format!("max-degree ratio {r} > 1"));
        }
    }

    // Davis-Kahan: the gap separates the top eigenvalue of A from the rest
    // of the spectrum of B.
    let mut dk_checked = 0;
    let mut worst_dk = 0.0f64;
    for _ in 0..pairs {
        let n = rng.random_range(4..12);
        let a = random_connected(n, &mut rng, 0.4);
        let b = random_connected(n, &mut rng, 0.4);
        if a.sub(&b).unwrap().max_abs() == 0.0 {
            continue;
        }
        let la = values_by_value(&a)[0];
        let lb = values_by_value(&b);
        let gap = lb[1..].iter().map(|mu| (la - mu).abs()).fold(f64::INFINITY, f64::min);
        if gap < 1e-9 {
            continue;
        }
        let va = eigenvector_centrality(&a, 1e-12, false).unwrap().scores;
        let vb = eigenvector_centrality(&b, 1e-12, false).unwrap().scores;
        let d = ev_distance(&va, &vb).unwrap();
        let bound = a.sub(&b).unwrap().frobenius_norm() / gap;
        dk_checked += 1;
        worst_dk = worst_dk.max(d / bound);
        if d > bound + 1e-8 {
            failures.push(format!("Davis-Kahan: distance {d} > {bound}"));
        }
    }

    // Power perturbation bound in the induced row-sum norm.
    for _ in 0..pairs {
        let n = rng.random_range(3..9);
        let w0 = random_weighted(n, &mut rng, 0.5);
        let w1 = w0.add(&random_weighted(n, &mut rng, 0.3).scale(0.2)).unwrap();
        let m = w1.sub(&w0).unwrap().max_row_abs_sum();
        let base = w0.max_row_abs_sum();
        for k in 1..=5u32 {
            let lhs = k_walk_counts(&w1, k).unwrap().sub(&k_walk_counts(&w0, k).unwrap()).unwrap().max_row_abs_sum();
            let rhs = k as f64 * m * (m + base).powi(k as i32 - 1);
            if lhs > rhs * (1.0 + 1e-10) + 1e-12 {
                failures.push(format!("power bound k = {k}: {lhs} > {rhs}"));
            }
        }
    }

    // Discontinuity witness: two triangles joined by a bridge of weight eps.
    let dumbbell = |eps: f64| {
        let mut m = DenseMatrix::zeros(6, 6);
        for &(i, j, w) in &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, eps)] {
            m.set(i, j, w);
            m.set(j, i, w);
        }
        geodesic_distances(&m).get(0, 5)
    };
    let across: Vec<f64> = [1.0, 0.1, 0.01, 0.001].iter().map(|&e| dumbbell(e)).collect();
    if !across.iter().all(|&d| d == 3.0) || !dumbbell(0.0).is_infinite() {
        failures.push(format!("dumbbell distances {across:?}, at 0: {}", dumbbell(0.0)));
    }

    let secs = start.elapsed().as_secs_f64();
    report(
        "A7",
        failures.is_empty() && dk_checked >= 900 && secs < 120.0,
        format!(
            "{} violations; worst density {worst_density:.3}, conductance {worst_conductance:.3}, Davis-Kahan \
             {worst_dk:.3} of their bounds over {dk_checked} pairs; dumbbell {across:?} then inf; {secs:.1}s{}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    );
}

fn sorted_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    let n = m.rows();
    let dm = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    let mut v: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[derive(Clone, Copy)]
enum Factor {
    Cycle(usize),
    Path(usize),
}

impl Factor {
    fn n(&self) -> usize {
        match *self {
            Factor::Cycle(k) | Factor::Path(k) => k,
        }
    }

    fn graph(&self) -> Adjacency {
        match *self {
            Factor::Cycle(k) => cycle_graph(k).unwrap(),
            Factor::Path(k) => path_graph(k).unwrap(),
        }
    }

    fn system(&self) -> Eigen {
        match *self {
            Factor::Cycle(k) => cycle_eigensystem(k).unwrap(),
            Factor::Path(k) => path_eigensystem(k).unwrap(),
        }
    }
}

/// Every product of cycles C3..C10 and paths P2..P10 with at most 200
/// vertices: pairs under the Cartesian, tensor and strong bases, triples
/// under those plus a mixed basis.
fn neps_cases() -> Vec<(Vec<Factor>, NepsBasis)> {
    let all = || (3..=10).map(Factor::Cycle).chain((2..=10).map(Factor::Path));
    let mut cases = Vec::new();
    for a in all() {
        for b in all() {
            if a.n() * b.n() > 200 {
                continue;
            }
            for basis in [NepsBasis::cartesian(2), NepsBasis::tensor(2), NepsBasis::strong(2)] {
                cases.push((vec![a, b], basis));
            }
        }
    }
    let small = || (3..=5).map(Factor::Cycle).chain((2..=4).map(Factor::Path));
    for a in small() {
        for b in small() {
            for c in small() {
                if a.n() * b.n() * c.n() > 200 {
                    continue;
                }
                let mixed = NepsBasis::new(3, vec![vec![1, 0, 0], vec![0, 1, 1]]).unwrap();
                for basis in [NepsBasis::cartesian(3), NepsBasis::tensor(3), NepsBasis::strong(3), mixed] {
                    cases.push((vec![a, b, c], basis));
                }
            }
        }
    }
    cases
}

/// Walk counts by exhaustive depth-first enumeration.
fn walks_by_dfs(adj: &[Vec<usize>], k: u32) -> Vec<Vec<u64>> {
    fn go(adj: &[Vec<usize>], v: usize, left: u32, row: &mut [u64]) {
        if left == 0 {
            row[v] += 1;
            return;
        }
        for &u in &adj[v] {
            go(adj, u, left - 1, row);
        }
    }
    let n = adj.len();
    (0..n)
        .map(|s| {
            let mut row = vec![0; n];
            go(adj, s, k, &mut row);
            row
        })
        .collect()
}

#[test]
fn a8_oracle_equivalences() {
    let start = Instant::now();

    let mut worst_neps = 0.0f64;
    let cases = neps_cases();
    for (factors, basis) in &cases {
        let graphs: Vec<Adjacency> = factors.iter().map(Factor::graph).collect();
        let systems: Vec<Eigen> = factors.iter().map(Factor::system).collect();
        let analytic = neps_eigensystem(&systems, basis).unwrap();
        let mut a: Vec<f64> = analytic.values().to_vec();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let dense = sorted_eigenvalues(&neps(&graphs, basis).unwrap().to_dense());
        let diff = a.iter().zip(&dense).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst_neps = worst_neps.max(diff);
    }

    let mut walk_mismatches = 0usize;
    let mut graphs_checked = 0usize;
    for n in 2..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
            let g = Adjacency::from_edge_list(n, &edges).unwrap();
            let adj: Vec<Vec<usize>> = (0..n).map(|i| g.neighbours(i).collect()).collect();
            graphs_checked += 1;
            for k in 1..=4 {
                let counts = k_walk_counts(&g, k).unwrap();
                let brute = walks_by_dfs(&adj, k);
                if (0..n).any(|i| (0..n).any(|j| counts.get(i, j) != brute[i][j] as f64)) {
                    walk_mismatches += 1;
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut worst_top = 0.0f64;
    for _ in 0..50 {
        let n = 20;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.sample(StandardNormal);
                m.set(i, j, x);
                m.set(j, i, x);
            }
        }
        let s = rng.random_range(1..=5);
        let top = top_modes(&m, s, &LanczosOptions::default()).unwrap();
        let mut oracle = sorted_eigenvalues(&m);
        oracle.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
        for j in 0..s {
            worst_top = worst_top.max((top.values()[j] - oracle[j]).abs());
            let v = top.vector(j);
            let residual: f64 =
                m.matvec(v).iter().zip(v).map(|(av, x)| (av - top.values()[j] * x).powi(2)).sum::<f64>().sqrt();
            worst_top = worst_top.max(residual);
            worst_top = worst_top.max((dot(v, v) - 1.0).abs());
        }
    }

    let secs = start.elapsed().as_secs_f64();
    report(
        "A8",
        worst_neps <= 1e-10 && walk_mismatches == 0 && worst_top <= 1e-6 && secs < 60.0,
        format!(
            "{} NEPS products (max eigenvalue gap {worst_neps:.2e}); {graphs_checked} graphs x k=1..4 walk counts, \
             {walk_mismatches} mismatches; top_modes max deviation {worst_top:.2e}; {secs:.1}s",
            cases.len()
        ),
    );
}

#[test]
fn a9_robustness_grid() {
    let start = Instant::now();
    let g: Adjacency = chung_lu_power_law(5151, 2.5, 4.3, 1).unwrap();
    let m = g.edge_count();
    let spec = NoiseSpec::new(0.40, 0.35, 31).unwrap();
    let trials = 50;
    let base = McOptions::new(trials).with_statistic(Statistic::Density);
    let naive = relative_error_mc(&g, &spec, Estimator::Naive, None, &base).unwrap().mean_stat_sq.unwrap();
    let ps = [0.35, 0.40, 0.45];
    let qs = [0.30, 0.35, 0.40];
    let mut table = [[0.0; 3]; 3];
    for (a, &pa) in ps.iter().enumerate() {
        for (b, &qa) in qs.iter().enumerate() {
            let opts = base.clone().with_assumed_rates(pa, qa);
            let r = relative_error_mc(&g, &spec, Estimator::Empirical(1), None, &opts).unwrap();
            table[a][b] = r.mean_stat_sq.unwrap();
        }
    }
    let centre = table[1][1];
    let correct_q_worst = table.iter().map(|row| row[1]).fold(0.0, f64::max);
    let misspecified_best = table.iter().flat_map(|row| [row[0], row[2]]).fold(f64::INFINITY, f64::min);
    let ok = (25_000..=37_000).contains(&m) && centre * 1e3 <= naive && misspecified_best >= 10.0 * correct_q_worst;
    let secs = start.elapsed().as_secs_f64();
    let rows: Vec<String> = table.iter().map(|r| format!("[{:.3e} {:.3e} {:.3e}]", r[0], r[1], r[2])).collect();
    report(
        "A9",
        ok && secs < 1200.0,
        format!(
            "m = {m}; naive {naive:.4e}; grid (rows p = {ps:?}, cols q = {qs:?}) {}; correct cell {centre:.3e}; \
             best misspecified q / worst correct q = {:.1}; {secs:.0}s",
            rows.join(" "),
            misspecified_best / correct_q_worst
        ),
    );
}
