//! Monte Carlo ensembles and table reproductions.
//!
//! Trial `i` of a run with seed `s` draws everything from
//! `RngSeed::new(s).stream(i)`, so results do not depend on the number of
//! worker threads. Experiments that run several ensembles (one per table
//! row) give row `k` the seed `RngSeed::new(s).mix(ROW_SALT + k)`.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{self, DensityModel};
use crate::dsu::DisjointSet;
use crate::error::{invalid, Error, Result};
use crate::generators::{integer_pairs, ModelParams, RngSeed, RsrParams, RsrbParams};
use crate::graph::Multigraph;
use crate::io::{csv_field, fmt_f64};
use crate::series::{builtin_system, solve_output, SystemKind};
use crate::spectra::{self, ZERO_TOL};

pub const DEFAULT_BINS: usize = 80;
/// Offset separating per-row seeds from per-trial streams.
pub const ROW_SALT: u64 = 1 << 40;
/// Half-width of the window around 0 holding the spectral atom.
pub const ATOM_WINDOW: f64 = 1e-6;
/// Resampling budget for experiments that need a connected start.
pub const MAX_RESAMPLES: usize = 100;

/// Settings shared by all ensemble runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    pub trials: usize,
    pub seed: u64,
    /// Rewire each sample to a simple graph before measuring.
    pub simple: bool,
    /// Worker threads; 0 means all available cores. Never affects results.
    #[serde(skip)]
    pub jobs: usize,
    pub bins: usize,
}

impl RunOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        RunOptions { trials, seed, simple: true, jobs: 0, bins: DEFAULT_BINS }
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn simple(mut self, simple: bool) -> Self {
        self.simple = simple;
        self
    }

    pub fn bins(mut self, bins: usize) -> Self {
        self.bins = bins;
        self
    }

    fn row(&self, k: u64) -> RunOptions {
        RunOptions { seed: RngSeed::new(self.seed).mix(ROW_SALT + k), ..*self }
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.bins == 0 {
            return invalid("bins must be at least 1");
        }
        Ok(())
    }
}

/// Runs `f(0), ..., f(trials-1)` on a pool of `jobs` threads and returns
/// the results in trial order.
pub fn par_trials<T, F>(trials: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..trials).into_par_iter().map(&f).collect()))
}

/// Uniform bins over `[min, max]`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(data: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let (lo, hi) = data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        if data.is_empty() {
            return Histogram { edges: vec![0.0, 1.0], counts: vec![0] };
        }
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|k| if k == bins { hi } else { lo + k as f64 * width }).collect();
        let mut counts = vec![0u64; bins];
        for &x in data {
            let k = (((x - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Histogram { edges, counts }
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Mean, sample standard deviation, min and max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(data: &[f64]) -> Option<Summary> {
        if data.is_empty() {
            return None;
        }
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let std = if data.len() > 1 {
            (data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let min = data.iter().copied().fold(f64::INFINITY, f64::min);
        let max = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Summary { mean, std, min, max })
    }
}

/// Algebraic connectivity of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub ac: f64,
    pub connected: bool,
}

/// Draws sample `i` (rewired if `simple`) from its own stream.
pub fn sample_graph(model: &ModelParams, seed: u64, i: usize, simple: bool) -> Result<Multigraph> {
    let mut rng = RngSeed::new(seed).stream(i as u64);
    let g = model.generate(&mut rng)?;
    if simple {
        g.rewire_to_simple(&mut rng)
    } else {
        Ok(g)
    }
}

fn run_trial(model: &ModelParams, seed: u64, i: usize, simple: bool) -> Result<TrialOutcome> {
    let g = sample_graph(model, seed, i, simple)?;
    Ok(TrialOutcome { ac: spectra::algebraic_connectivity(&g)?, connected: g.is_connected() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub model: String,
    pub params: ModelParams,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub simple: bool,
    /// Per-trial AC; `null` where the sample could not be produced.
    pub values: Vec<Option<f64>>,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Histogram,
    pub mu_asymptotic: Option<f64>,
    pub diff_percent: Option<f64>,
    /// Samples that were disconnected (AC numerically zero).
    pub failures: usize,
    /// Mean over connected samples only.
    pub connected_mean: Option<f64>,
    /// Samples lost to rewiring failures, with their messages.
    pub rewire_failures: usize,
    pub errors: Vec<String>,
}

pub fn run_ensemble(model: &ModelParams, opts: &RunOptions) -> Result<EnsembleReport> {
    opts.check()?;
    let outcomes = par_trials(opts.trials, opts.jobs, |i| run_trial(model, opts.seed, i, opts.simple))?;
    let mut values = Vec::with_capacity(opts.trials);
    let mut connected = Vec::new();
    let mut errors = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(t) => {
                values.push(Some(t.ac));
                if t.connected {
                    connected.push(t.ac);
                }
            }
            Err(e @ Error::RewireFailed { .. }) => {
                values.push(None);
                errors.push(format!("trial {i}: {e}"));
            }
            Err(e) => return Err(e),
        }
    }
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let summary = Summary::of(&present).ok_or_else(|| {
        Error::InvalidParams(format!("every trial failed; first error: {}", errors.first().cloned().unwrap_or_default()))
    })?;
    let mu = model.mu_asymptotic().ok();
    Ok(EnsembleReport {
        model: model.name().to_string(),
        params: *model,
        n: model.n(),
        trials: opts.trials,
        seed: opts.seed,
        simple: opts.simple,
        histogram: Histogram::new(&present, opts.bins),
        mean: summary.mean,
        std: summary.std,
        min: summary.min,
        max: summary.max,
        mu_asymptotic: mu,
        diff_percent: mu.map(|m| (summary.mean - m) / m * 100.0),
        failures: present.len() - connected.len(),
        connected_mean: Summary::of(&connected).map(|s| s.mean),
        rewire_failures: errors.len(),
        errors,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub d1: u32,
    pub d2: u32,
    /// Fraction of degree-`d2` vertices (mixed model only).
    pub p: Option<f64>,
    pub n: usize,
    pub mu_asymptotic: f64,
    pub mu_numerics: f64,
    pub std: f64,
    pub diff_percent: f64,
    pub connected_mean: Option<f64>,
    pub failures: usize,
    pub rewire_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub name: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub simple: bool,
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "table,d1,d2,p,n,mu_asymptotic,mu_numerics,std,diff_percent,connected_mean,failures,rewire_failures\n",
        );
        for r in &self.rows {
            let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                csv_field(&self.name),
                r.d1,
                r.d2,
                opt(r.p),
                r.n,
                fmt_f64(r.mu_asymptotic),
                fmt_f64(r.mu_numerics),
                fmt_f64(r.std),
                fmt_f64(r.diff_percent),
                opt(r.connected_mean),
                r.failures,
                r.rewire_failures
            ));
        }
        s
    }
}

fn table_row(model: &ModelParams, d1: u32, d2: u32, p: Option<f64>, opts: &RunOptions) -> Result<TableRow> {
    let rep = run_ensemble(model, opts)?;
    let mu = model.mu_asymptotic()?;
    Ok(TableRow {
        d1,
        d2,
        p,
        n: rep.n,
        mu_asymptotic: mu,
        mu_numerics: rep.mean,
        std: rep.std,
        diff_percent: (rep.mean - mu) / mu * 100.0,
        connected_mean: rep.connected_mean,
        failures: rep.failures,
        rewire_failures: rep.rewire_failures,
    })
}

/// Pairs of the bipartite table, in row order.
pub fn rsrb_table_pairs() -> Vec<(u32, u32)> {
    (3..=8).flat_map(integer_pairs).collect()
}

/// Columns `(d1, d2, p)` of the average-degree-4 mixed table.
pub fn rsr_table_columns() -> Vec<(u32, u32, BigRational)> {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    vec![(4, 4, r(1, 2)), (3, 5, r(1, 2)), (3, 6, r(1, 3)), (2, 5, r(2, 3)), (2, 6, r(1, 2)), (2, 7, r(2, 5))]
}

/// Every bipartite pair with integer average degree 3..=8, each sampled
/// with the valid vertex count nearest to `n`.
pub fn reproduce_rsrb_table(n: usize, opts: &RunOptions) -> Result<TableReport> {
    let mut rows = Vec::new();
    for (k, (d1, d2)) in rsrb_table_pairs().into_iter().enumerate() {
        let model = ModelParams::Rsrb(RsrbParams::nearest(d1, d2, n)?);
        rows.push(table_row(&model, d1, d2, None, &opts.row(k as u64))?);
    }
    Ok(TableReport { name: "rsrb".into(), n, trials: opts.trials, seed: opts.seed, simple: opts.simple, rows })
}

pub fn reproduce_rsr_table(n: usize, opts: &RunOptions) -> Result<TableReport> {
    let mut rows = Vec::new();
    for (k, (d1, d2, p)) in rsr_table_columns().into_iter().enumerate() {
        let pf = num_traits::ToPrimitive::to_f64(&p).unwrap_or(f64::NAN);
        let model = ModelParams::Rsr(RsrParams::new(pf, d1, d2, n)?);
        let mut row = table_row(&model, d1, d2, Some(pf), &opts.row(k as u64))?;
        row.mu_asymptotic = asymptotics::mu_rsr_exact(&p, d1, d2)?;
        row.diff_percent = (row.mu_numerics - row.mu_asymptotic) / row.mu_asymptotic * 100.0;
        rows.push(row);
    }
    Ok(TableReport { name: "rsr".into(), n, trials: opts.trials, seed: opts.seed, simple: opts.simple, rows })
}

/// `d - 2 sqrt(d - 1)` for a real average degree.
pub fn ramanujan_threshold(d: f64) -> f64 {
    d - 2.0 * (d - 1.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamanujanReport {
    pub model: String,
    pub params: ModelParams,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub simple: bool,
    pub threshold: f64,
    pub fraction: f64,
    pub values: Vec<Option<f64>>,
}

/// Fraction of samples with AC at least `threshold` (default: the
/// Ramanujan bound for the model's average degree). Samples lost to
/// rewiring count as failures.
pub fn ramanujan_fraction(model: &ModelParams, threshold: Option<f64>, opts: &RunOptions) -> Result<RamanujanReport> {
    let rep = run_ensemble(model, opts)?;
    let threshold = threshold.unwrap_or_else(|| ramanujan_threshold(model.average_degree()));
    let hits = rep.values.iter().flatten().filter(|&&ac| ac >= threshold).count();
    Ok(RamanujanReport {
        model: rep.model,
        params: rep.params,
        n: rep.n,
        trials: rep.trials,
        seed: rep.seed,
        simple: rep.simple,
        threshold,
        fraction: hits as f64 / rep.trials as f64,
        values: rep.values,
    })
}

/// How connectivity is re-checked after each deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeletionMethod {
    /// Breadth-first search over the surviving edges after every deletion.
    FullBfs,
    /// Union-find over the deletion order reversed.
    ReverseUnionFind,
}

/// Deletions until disconnection for a fixed deletion order, and whether
/// the cut-off part was a single vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeletionOutcome {
    pub deletions: usize,
    pub isolated_vertex: bool,
}

/// Deletes `order[0], order[1], ...` (edge indices of a connected `g`)
/// until `g` is disconnected.
pub fn deletions_to_disconnect(g: &Multigraph, order: &[usize], method: DeletionMethod) -> Result<DeletionOutcome> {
    if !g.is_connected() {
        return Err(Error::Disconnected(0));
    }
    if g.n() < 2 {
        return invalid("a single vertex cannot be disconnected");
    }
    let edges = g.edges();
    match method {
        DeletionMethod::FullBfs => {
            let mut alive = vec![true; edges.len()];
            for (k, &e) in order.iter().enumerate() {
                alive[e] = false;
                let rest: Vec<(usize, usize)> = (0..edges.len()).filter(|&i| alive[i]).map(|i| edges[i]).collect();
                let h = Multigraph::new(g.n(), rest)?;
                if !h.is_connected() {
                    let mut touched = vec![false; g.n()];
                    for &(u, v) in h.edges() {
                        if u != v {
                            touched[u] = true;
                            touched[v] = true;
                        }
                    }
                    return Ok(DeletionOutcome { deletions: k + 1, isolated_vertex: touched.contains(&false) });
                }
            }
            invalid("deletion order exhausted without disconnecting")
        }
        DeletionMethod::ReverseUnionFind => {
            let mut dsu = DisjointSet::new(g.n());
            for (k, &e) in order.iter().enumerate().rev() {
                let (u, v) = edges[e];
                if dsu.components() == 2 && dsu.find(u) != dsu.find(v) {
                    let isolated = dsu.set_size(u) == 1 || dsu.set_size(v) == 1;
                    return Ok(DeletionOutcome { deletions: k + 1, isolated_vertex: isolated });
                }
                dsu.union(u, v);
            }
            invalid("deletion order exhausted without disconnecting")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub model: String,
    pub params: ModelParams,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub simple: bool,
    pub method: DeletionMethod,
    pub deletions: Vec<usize>,
    pub mean: f64,
    pub std: f64,
    pub isolated_vertex_fraction: f64,
    /// Disconnected samples discarded before a connected one was found.
    pub resamples: usize,
}

/// One connected sample for trial `i`, with a uniformly random deletion
/// order drawn from the same stream.
pub fn reliability_trial(model: &ModelParams, seed: u64, i: usize, simple: bool) -> Result<(Multigraph, Vec<usize>, usize)> {
    let mut rng = RngSeed::new(seed).stream(i as u64);
    for attempt in 0..=MAX_RESAMPLES {
        let mut g = model.generate(&mut rng)?;
        if simple {
            g = g.rewire_to_simple(&mut rng)?;
        }
        if g.is_connected() {
            let mut order: Vec<usize> = (0..g.m()).collect();
            order.shuffle(&mut rng);
            return Ok((g, order, attempt));
        }
    }
    Err(Error::Disconnected(MAX_RESAMPLES))
}

pub fn reliability_deletions(model: &ModelParams, method: DeletionMethod, opts: &RunOptions) -> Result<ReliabilityReport> {
    opts.check()?;
    let outcomes = par_trials(opts.trials, opts.jobs, |i| -> Result<(DeletionOutcome, usize, usize)> {
        let (g, order, resamples) = reliability_trial(model, opts.seed, i, opts.simple)?;
        Ok((deletions_to_disconnect(&g, &order, method)?, resamples, g.m()))
    })?;
    let mut deletions = Vec::with_capacity(opts.trials);
    let (mut isolated, mut resamples, mut m) = (0, 0, 0);
    for o in outcomes {
        let (d, r, edges) = o?;
        deletions.push(d.deletions);
        isolated += d.isolated_vertex as usize;
        resamples += r;
        m = edges;
    }
    let as_f: Vec<f64> = deletions.iter().map(|&d| d as f64).collect();
    let s = Summary::of(&as_f).expect("trials >= 1");
    Ok(ReliabilityReport {
        model: model.name().into(),
        params: *model,
        n: model.n(),
        m,
        trials: opts.trials,
        seed: opts.seed,
        simple: opts.simple,
        method,
        deletions,
        mean: s.mean,
        std: s.std,
        isolated_vertex_fraction: isolated as f64 / opts.trials as f64,
        resamples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub d1: u32,
    pub d2: u32,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub simple: bool,
    /// KS distance of the eigenvalues outside the atom window to the
    /// continuous part of the limiting law.
    pub ks: f64,
    /// Fraction of eigenvalues with |lambda| <= 1e-8.
    pub zero_fraction: f64,
    /// Fraction inside the atom window, compared with `delta_weight`.
    pub window_fraction: f64,
    pub delta_weight: f64,
    pub histogram: Histogram,
    /// Limiting density at the bin centers (continuous part only).
    pub density: Vec<f64>,
}

/// Pooled adjacency eigenvalues of RSRB samples against the limiting law.
pub fn density_check(d1: u32, d2: u32, n: usize, opts: &RunOptions) -> Result<DensityReport> {
    opts.check()?;
    let params = RsrbParams::nearest(d1, d2, n)?;
    let model = ModelParams::Rsrb(params);
    let law = DensityModel::new(d1, d2)?;
    let spectra = par_trials(opts.trials, opts.jobs, |i| -> Result<Vec<f64>> {
        let g = sample_graph(&model, opts.seed, i, opts.simple)?;
        Ok(spectra::adjacency_spectrum(&g)?.values)
    })?;
    let mut pooled = Vec::with_capacity(opts.trials * params.n());
    for s in spectra {
        pooled.extend(s?);
    }
    let total = pooled.len() as f64;
    let zero = pooled.iter().filter(|x| x.abs() <= ZERO_TOL).count() as f64 / total;
    let window = pooled.iter().filter(|x| x.abs() <= ATOM_WINDOW).count() as f64 / total;
    let mut outside: Vec<f64> = pooled.iter().copied().filter(|x| x.abs() > ATOM_WINDOW).collect();
    outside.sort_by(f64::total_cmp);
    let w = law.delta_weight;
    let half = law.positive_mass();
    let continuous_cdf = |x: f64| {
        let v = if x < 0.0 { half - law.positive_mass_below(-x) } else { half + law.positive_mass_below(x) };
        (v / (1.0 - w)).clamp(0.0, 1.0)
    };
    let ks = spectra::ks_distance(&outside, continuous_cdf);
    let histogram = Histogram::new(&pooled, opts.bins);
    let density = histogram.centers().iter().map(|&x| asymptotics::rsrb_density(x, &law)).collect();
    Ok(DensityReport {
        d1,
        d2,
        n: params.n(),
        trials: opts.trials,
        seed: opts.seed,
        simple: opts.simple,
        ks,
        zero_fraction: zero,
        window_fraction: window,
        delta_weight: w,
        histogram,
        density,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkReport {
    pub d1: u32,
    pub d2: u32,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub simple: bool,
    pub s: Vec<usize>,
    pub observed: Vec<f64>,
    pub predicted: Vec<f64>,
    pub relative_error: Vec<f64>,
}

/// Trial-averaged closed-walk counts against the tree-like prediction, at
/// even lengths `0..=s_max`.
pub fn walk_validation(d1: u32, d2: u32, n: usize, s_max: usize, opts: &RunOptions) -> Result<WalkReport> {
    opts.check()?;
    if s_max > 12 {
        return invalid(format!("s_max must be at most 12, got {s_max}"));
    }
    let params = RsrbParams::nearest(d1, d2, n)?;
    let model = ModelParams::Rsrb(params);
    let sys = builtin_system(&SystemKind::Rsrb { d1, d2 })?;
    let series = solve_output::<BigRational>(&sys, s_max).to_f64();
    let walks = par_trials(opts.trials, opts.jobs, |i| -> Result<Vec<f64>> {
        Ok(sample_graph(&model, opts.seed, i, opts.simple)?.closed_walk_counts(s_max))
    })?;
    let mut mean = vec![0.0; s_max + 1];
    for w in walks {
        for (m, x) in mean.iter_mut().zip(w?) {
            *m += x / opts.trials as f64;
        }
    }
    let s: Vec<usize> = (0..=s_max).step_by(2).collect();
    let observed: Vec<f64> = s.iter().map(|&k| mean[k]).collect();
    let predicted: Vec<f64> = s.iter().map(|&k| series[k]).collect();
    let relative_error = observed.iter().zip(&predicted).map(|(o, p)| (o - p).abs() / p.abs()).collect();
    Ok(WalkReport {
        d1,
        d2,
        n: params.n(),
        trials: opts.trials,
        seed: opts.seed,
        simple: opts.simple,
        s,
        observed,
        predicted,
        relative_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub d1: u32,
    pub d2: u32,
    pub n1: usize,
    pub n2: usize,
    pub trials: usize,
    pub seed: u64,
    pub simple: bool,
    pub kernel_dimensions: Vec<usize>,
    /// Samples with kernel dimension at least `n1 - n2`.
    pub bound_holds: usize,
    /// Samples with kernel dimension exactly `n1 - n2`.
    pub equality: usize,
}

/// Adjacency kernel dimension of RSRB samples against `|n1 - n2|`.
pub fn kernel_check(params: &RsrbParams, opts: &RunOptions) -> Result<KernelReport> {
    opts.check()?;
    let model = ModelParams::Rsrb(*params);
    let dims = par_trials(opts.trials, opts.jobs, |i| -> Result<usize> {
        let g = sample_graph(&model, opts.seed, i, opts.simple)?;
        let s = spectra::adjacency_spectrum(&g)?;
        Ok(spectra::kernel_dimension(&s, ZERO_TOL.max(s.tol)))
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let bound = params.n1.abs_diff(params.n2());
    Ok(KernelReport {
        d1: params.d1,
        d2: params.d2,
        n1: params.n1,
        n2: params.n2(),
        trials: opts.trials,
        seed: opts.seed,
        simple: opts.simple,
        bound_holds: dims.iter().filter(|&&k| k >= bound).count(),
        equality: dims.iter().filter(|&&k| k == bound).count(),
        kernel_dimensions: dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::SmallWorldParams;

    #[test]
    fn histogram_bins() {
        let h = Histogram::new(&[0.0, 0.25, 0.5, 1.0], 4);
        assert_eq!(h.edges, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(h.counts, vec![1, 1, 1, 1]);
        let flat = Histogram::new(&[2.0, 2.0], 3);
        assert_eq!(flat.counts.iter().sum::<u64>(), 2);
    }

    #[test]
    fn summary_is_sample_std() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(Summary::of(&[]).is_none());
    }

    #[test]
    fn ensemble_is_independent_of_jobs() {
        let model = ModelParams::Rsrb(RsrbParams::new(2, 3, 60).unwrap());
        let a = run_ensemble(&model, &RunOptions::new(12, 5).jobs(1)).unwrap();
        let b = run_ensemble(&model, &RunOptions::new(12, 5).jobs(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values.len(), 12);
        let mean = a.values.iter().flatten().sum::<f64>() / 12.0;
        assert!((mean - a.mean).abs() < 1e-15);
    }

    #[test]
    fn rewire_failures_are_recorded() {
        let model = ModelParams::Rsrb(RsrbParams::new(2, 6, 3).unwrap());
        let err = run_ensemble(&model, &RunOptions::new(3, 0)).unwrap_err();
        assert!(matches!(err, Error::InvalidParams(_)));
        let multi = run_ensemble(&model, &RunOptions::new(3, 0).simple(false)).unwrap();
        assert_eq!(multi.rewire_failures, 0);
    }

    #[test]
    fn deletion_methods_agree() {
        let model = ModelParams::Regular { d: 4, n: 40 };
        for i in 0..10 {
            let (g, order, _) = reliability_trial(&model, 3, i, true).unwrap();
            let a = deletions_to_disconnect(&g, &order, DeletionMethod::FullBfs).unwrap();
            let b = deletions_to_disconnect(&g, &order, DeletionMethod::ReverseUnionFind).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn tree_disconnects_at_first_deletion() {
        let path = Multigraph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        for method in [DeletionMethod::FullBfs, DeletionMethod::ReverseUnionFind] {
            let o = deletions_to_disconnect(&path, &[1, 0, 2], method).unwrap();
            assert_eq!(o, DeletionOutcome { deletions: 1, isolated_vertex: false });
            let o = deletions_to_disconnect(&path, &[0, 1, 2], method).unwrap();
            assert_eq!(o, DeletionOutcome { deletions: 1, isolated_vertex: true });
        }
    }

    #[test]
    fn small_world_runs() {
        let model = ModelParams::SmallWorld(SmallWorldParams::new(40).unwrap());
        let r = run_ensemble(&model, &RunOptions::new(4, 1)).unwrap();
        assert!(r.mu_asymptotic.is_some());
        assert!(r.values.iter().all(|v| v.is_some()));
    }

    #[test]
    fn table_layouts() {
        assert_eq!(rsrb_table_pairs().len(), 13);
        assert_eq!(rsrb_table_pairs()[1], (2, 6));
        assert_eq!(rsr_table_columns().len(), 6);
    }

    #[test]
    fn walk_counts_start_at_one_and_degree() {
        let r = walk_validation(2, 3, 200, 4, &RunOptions::new(2, 0)).unwrap();
        assert_eq!(r.s, vec![0, 2, 4]);
        assert_eq!(r.observed[0], 1.0);
        assert!((r.observed[1] - 2.4).abs() < 1e-12);
        assert!((r.predicted[1] - 2.4).abs() < 1e-12);
    }
}
