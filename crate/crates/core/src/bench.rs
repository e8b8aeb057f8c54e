//! Parameter sweeps over datasets, one CSV row per (cell, query, algorithm).
//!
//! Each knob is swept on its own with the others held at their base value,
//! the way the scalability figures are usually drawn. Rows for a query that
//! hit the time limit carry `timeout = true` and are left out of the means.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{AttributedBipartiteGraph, KeywordSet, SubgraphMask, VertexRef};
use crate::ingest::{ceil_fraction, load_graph, sample_keywords, sample_subgraph};
use crate::peel::{core_mask, CoreParams};
use crate::search::{run, Algorithm, QuerySpec, SearchConfig};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub edges: PathBuf,
    #[serde(default)]
    pub attrs_u: Option<PathBuf>,
    #[serde(default)]
    pub attrs_v: Option<PathBuf>,
}

const FRACTIONS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchPlan {
    pub datasets: Vec<DatasetSpec>,
    pub alpha_range: Vec<u32>,
    pub beta_range: Vec<u32>,
    pub base_alpha: u32,
    pub base_beta: u32,
    pub vertex_fractions: Vec<f64>,
    pub keyword_fractions: Vec<f64>,
    pub s_fractions: Vec<f64>,
    pub queries_per_cell: usize,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub time_limit_ms: u64,
}

impl Default for BenchPlan {
    fn default() -> Self {
        BenchPlan {
            datasets: Vec::new(),
            alpha_range: (2..=6).collect(),
            beta_range: (2..=6).collect(),
            base_alpha: 3,
            base_beta: 3,
            vertex_fractions: FRACTIONS.to_vec(),
            keyword_fractions: FRACTIONS.to_vec(),
            s_fractions: FRACTIONS.to_vec(),
            queries_per_cell: 300,
            algorithms: vec![Algorithm::Basic, Algorithm::BasicPlus, Algorithm::Inc, Algorithm::Dec],
            seed: 0,
            time_limit_ms: 60_000,
        }
    }
}

/// One point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub alpha: u32,
    pub beta: u32,
    pub vfrac: f64,
    pub kfrac: f64,
    pub sfrac: f64,
}

impl BenchPlan {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.alpha_range.is_empty() || self.beta_range.is_empty() {
            return bad("alpha and beta ranges must be nonempty".into());
        }
        if self.alpha_range.contains(&0) || self.beta_range.contains(&0) || self.base_alpha == 0 || self.base_beta == 0 {
            return bad("alpha and beta must be at least 1".into());
        }
        for (name, fs) in [("vertex", &self.vertex_fractions), ("keyword", &self.keyword_fractions), ("s", &self.s_fractions)] {
            if fs.is_empty() {
                return bad(format!("{name} fractions must be nonempty"));
            }
            if let Some(f) = fs.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
                return bad(format!("{name} fraction {f} must lie in (0, 1]"));
            }
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected".into());
        }
        Ok(())
    }

    /// Base cell, then each knob swept alone. Duplicates of the base cell
    /// are dropped.
    pub fn cells(&self) -> Vec<Cell> {
        let base = Cell { alpha: self.base_alpha, beta: self.base_beta, vfrac: 1.0, kfrac: 1.0, sfrac: 1.0 };
        let mut out = vec![base];
        let mut push = |c: Cell| {
            if !out.contains(&c) {
                out.push(c);
            }
        };
        self.alpha_range.iter().for_each(|&alpha| push(Cell { alpha, ..base }));
        self.beta_range.iter().for_each(|&beta| push(Cell { beta, ..base }));
        self.vertex_fractions.iter().for_each(|&vfrac| push(Cell { vfrac, ..base }));
        self.keyword_fractions.iter().for_each(|&kfrac| push(Cell { kfrac, ..base }));
        self.s_fractions.iter().for_each(|&sfrac| push(Cell { sfrac, ..base }));
        out
    }

    pub fn time_limit(&self) -> Duration {
        Duration::from_millis(self.time_limit_ms)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub algorithm: String,
    pub alpha: u32,
    pub beta: u32,
    pub vfrac: f64,
    pub kfrac: f64,
    pub sfrac: f64,
    pub query: String,
    pub elapsed_ms: f64,
    /// |L_U| + |L_V| of the answer, 0 when empty or timed out.
    pub result_size: usize,
    pub generated: u64,
    pub verified: u64,
    pub timeout: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub algorithm: String,
    pub alpha: u32,
    pub beta: u32,
    pub vfrac: f64,
    pub kfrac: f64,
    pub sfrac: f64,
    pub queries: usize,
    pub timeouts: usize,
    /// Mean over rows that finished; `None` when every row timed out.
    pub mean_elapsed_ms: Option<f64>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn mix(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(seed), |h, &p| splitmix(h ^ p))
}

fn label_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Up to `n` distinct upper vertices of the (α,β)-core with at least one
/// keyword, sampled uniformly and returned in id order.
pub fn select_queries(g: &AttributedBipartiteGraph, p: CoreParams, n: usize, seed: u64) -> Vec<VertexRef> {
    let core = core_mask(g, &SubgraphMask::full(g), p);
    let pool: Vec<u32> = core.upper_vertices().filter(|&u| !g.keywords(VertexRef::upper(u)).is_empty()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, &[p.alpha as u64, p.beta as u64]));
    let mut picked: Vec<u32> = sample(&mut rng, pool.len(), n.min(pool.len())).into_iter().map(|i| pool[i]).collect();
    picked.sort_unstable();
    picked.into_iter().map(VertexRef::upper).collect()
}

/// A random `ceil(f * |W(q)|)`-subset of `q`'s keywords, fixed by the seed,
/// the query label and the fraction.
pub fn query_keywords(g: &AttributedBipartiteGraph, q: VertexRef, fraction: f64, seed: u64) -> KeywordSet {
    let own = g.keywords(q);
    let k = ceil_fraction(fraction, own.len()).max(1).min(own.len());
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, &[label_hash(g.label(q)), fraction.to_bits()]));
    KeywordSet::from_ids(sample(&mut rng, own.len(), k).into_iter().map(|i| own.ids()[i]))
}

/// Worker count: `ABCS_THREADS` if set and positive, else the machine's
/// parallelism.
pub fn worker_count() -> usize {
    std::env::var("ABCS_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Run one query once. Timeouts become a flagged row; other errors
/// propagate.
pub fn measure(
    g: &AttributedBipartiteGraph,
    spec: &QuerySpec,
    time_limit: Duration,
) -> Result<(f64, usize, u64, u64, bool)> {
    let cfg = SearchConfig { exec: Exec::Sequential, ..SearchConfig::default() }.with_time_limit(time_limit);
    let t = Instant::now();
    match run(g, spec, &cfg) {
        Ok(o) => Ok((
            t.elapsed().as_secs_f64() * 1e3,
            o.results.first().map_or(0, |r| r.size),
            o.stats.candidates_generated,
            o.stats.candidates_verified,
            false,
        )),
        Err(Error::Timeout) => Ok((time_limit.as_secs_f64() * 1e3, 0, 0, 0, true)),
        Err(e) => Err(e),
    }
}

fn run_parallel<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(|| items.par_iter().map(&f).collect());
        }
    }
    let _ = workers;
    items.iter().map(f).collect()
}

/// All rows for one dataset, in (cell, query, algorithm) order.
pub fn run_dataset(name: &str, g: &AttributedBipartiteGraph, plan: &BenchPlan, workers: usize) -> Result<Vec<BenchRecord>> {
    plan.validate()?;
    let mut rows = Vec::new();
    for cell in plan.cells() {
        let mut sampled;
        let mut h = g;
        if cell.vfrac < 1.0 {
            sampled = sample_subgraph(h, cell.vfrac, mix(plan.seed, &[1, cell.vfrac.to_bits()]))?;
            h = &sampled;
        }
        if cell.kfrac < 1.0 {
            sampled = sample_keywords(h, cell.kfrac, mix(plan.seed, &[2, cell.kfrac.to_bits()]))?;
            h = &sampled;
        }
        let p = CoreParams::new(cell.alpha, cell.beta)?;
        let jobs: Vec<(VertexRef, Algorithm)> = select_queries(h, p, plan.queries_per_cell, plan.seed)
            .into_iter()
            .flat_map(|q| plan.algorithms.iter().map(move |&a| (q, a)))
            .collect();
        let out = run_parallel(&jobs, workers, |&(q, a)| {
            let spec = QuerySpec::new(q, p, query_keywords(h, q, cell.sfrac, plan.seed), a);
            measure(h, &spec, plan.time_limit()).map(|(elapsed_ms, result_size, generated, verified, timeout)| {
                BenchRecord {
                    dataset: name.to_owned(),
                    algorithm: a.name().to_owned(),
                    alpha: cell.alpha,
                    beta: cell.beta,
                    vfrac: cell.vfrac,
                    kfrac: cell.kfrac,
                    sfrac: cell.sfrac,
                    query: h.label(q).to_owned(),
                    elapsed_ms,
                    result_size,
                    generated,
                    verified,
                    timeout,
                }
            })
        });
        for r in out {
            rows.push(r?);
        }
    }
    Ok(rows)
}

/// Run every dataset of the plan. A dataset that fails to load or run is
/// reported in the second list and skipped.
/// Datasets that failed to load, by name.
pub type Skipped = Vec<(String, Error)>;

pub fn run_plan(plan: &BenchPlan, workers: usize) -> Result<(Vec<BenchRecord>, Skipped)> {
    plan.validate()?;
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for d in &plan.datasets {
        let res = load_graph(&d.edges, d.attrs_u.as_deref(), d.attrs_v.as_deref())
            .and_then(|g| run_dataset(&d.name, &g, plan, workers));
        match res {
            Ok(r) => rows.extend(r),
            Err(e) => failed.push((d.name.clone(), e)),
        }
    }
    Ok((rows, failed))
}

/// Per-cell means, in first-appearance order.
pub fn summarize(rows: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut out: Vec<(SummaryRow, f64)> = Vec::new();
    for r in rows {
        let same = |s: &SummaryRow| {
            s.dataset == r.dataset
                && s.algorithm == r.algorithm
                && (s.alpha, s.beta) == (r.alpha, r.beta)
                && (s.vfrac, s.kfrac, s.sfrac) == (r.vfrac, r.kfrac, r.sfrac)
        };
        let i = match out.iter().position(|(s, _)| same(s)) {
            Some(i) => i,
            None => {
                out.push((
                    SummaryRow {
                        dataset: r.dataset.clone(),
                        algorithm: r.algorithm.clone(),
                        alpha: r.alpha,
                        beta: r.beta,
                        vfrac: r.vfrac,
                        kfrac: r.kfrac,
                        sfrac: r.sfrac,
                        queries: 0,
                        timeouts: 0,
                        mean_elapsed_ms: None,
                    },
                    0.0,
                ));
                out.len() - 1
            }
        };
        let (s, sum) = &mut out[i];
        s.queries += 1;
        if r.timeout {
            s.timeouts += 1;
        } else {
            *sum += r.elapsed_ms;
        }
    }
    out.into_iter()
        .map(|(mut s, sum)| {
            let done = s.queries - s.timeouts;
            s.mean_elapsed_ms = (done > 0).then(|| sum / done as f64);
            s
        })
        .collect()
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| Error::InvalidConfig(format!("csv: {e}")))?;
    }
    wr.flush().map_err(|source| Error::Io { path: PathBuf::from("<csv>"), source })
}

pub fn write_records<W: Write>(w: W, rows: &[BenchRecord]) -> Result<()> {
    write_rows(w, rows)
}

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    write_rows(w, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alg: &str, ms: f64, timeout: bool) -> BenchRecord {
        BenchRecord {
            dataset: "d".into(),
            algorithm: alg.into(),
            alpha: 2,
            beta: 2,
            vfrac: 1.0,
            kfrac: 1.0,
            sfrac: 1.0,
            query: "1".into(),
            elapsed_ms: ms,
            result_size: 0,
            generated: 0,
            verified: 0,
            timeout,
        }
    }

    #[test]
    fn mean_is_arithmetic_over_finished_rows() {
        let rows = [row("dec", 1.0, false), row("dec", 4.0, false), row("dec", 60.0, true), row("inc", 2.0, false)];
        let s = summarize(&rows);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].queries, s[0].timeouts, s[0].mean_elapsed_ms), (3, 1, Some(2.5)));
        assert_eq!(s[1].mean_elapsed_ms, Some(2.0));
        let all_out = summarize(&[row("basic", 60.0, true)]);
        assert_eq!(all_out[0].mean_elapsed_ms, None);
    }

    #[test]
    fn default_cells_sweep_each_knob() {
        let plan = BenchPlan::default();
        // base + 4 alphas + 4 betas + 4 fractions for each of three knobs
        assert_eq!(plan.cells().len(), 1 + 4 + 4 + 4 * 3);
        assert!(plan.validate().is_ok());
    }

    #[test]
    fn invalid_plans_rejected() {
        assert!(BenchPlan { alpha_range: vec![], ..Default::default() }.validate().is_err());
        assert!(BenchPlan { s_fractions: vec![0.0], ..Default::default() }.validate().is_err());
        assert!(BenchPlan { algorithms: vec![], ..Default::default() }.validate().is_err());
    }

    #[test]
    fn csv_header_matches_columns() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[row("dec", 1.5, false)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "dataset,algorithm,alpha,beta,vfrac,kfrac,sfrac,query,elapsed_ms,result_size,generated,verified,timeout"
        );
    }
}
