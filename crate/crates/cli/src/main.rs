use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use abcs::bench::{run_plan, summarize, worker_count, write_records, write_summary, BenchPlan};
use abcs::exec::Exec;
use abcs::graph::Layer;
use abcs::ingest::{attributes_text, generate_attributes, load_graph, SyntheticAttrConfig};
use abcs::output::{QueryDoc, Timing};
use abcs::peel::core_decompose;
use abcs::{run, Algorithm, AttributedBipartiteGraph, CoreParams, QuerySpec, SearchConfig};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Attributed (alpha,beta)-community search on bipartite graphs.
#[derive(Parser)]
#[command(name = "abcs", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find the attributed communities of one query vertex.
    Query(QueryArgs),
    /// Print the connected components of the (alpha,beta)-core.
    Core(CoreArgs),
    /// Run a parameter sweep described by a TOML plan.
    Bench(BenchArgs),
    /// Write random keyword files for an edge list.
    GenAttrs(GenAttrsArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list, one "upper lower" pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Upper-layer attribute file.
    #[arg(long)]
    attrs_u: Option<PathBuf>,
    /// Lower-layer attribute file.
    #[arg(long)]
    attrs_v: Option<PathBuf>,
}

impl GraphArgs {
    fn load(&self) -> Result<AttributedBipartiteGraph> {
        Ok(load_graph(&self.graph, self.attrs_u.as_deref(), self.attrs_v.as_deref())?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Label of the upper-layer query vertex.
    #[arg(long)]
    q: String,
    #[arg(long)]
    alpha: u32,
    #[arg(long)]
    beta: u32,
    /// Comma-separated query keywords, or "all" for every keyword of q.
    #[arg(long)]
    keywords: String,
    /// basic, basic+, inc, dec or oracle.
    #[arg(long, default_value = "dec")]
    algo: String,
    #[arg(long, value_enum, default_value = "json")]
    output: Format,
    /// Report elapsed_ms as 0 so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Give up after this many milliseconds.
    #[arg(long)]
    time_limit_ms: Option<u64>,
    /// Verify candidates on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct CoreArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    alpha: u32,
    #[arg(long)]
    beta: u32,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML plan; missing fields take their defaults.
    #[arg(long)]
    plan: PathBuf,
    /// Per-query CSV.
    #[arg(long, default_value = "bench.csv")]
    out: PathBuf,
    /// Per-cell means CSV.
    #[arg(long, default_value = "bench_summary.csv")]
    summary: PathBuf,
}

#[derive(Args)]
struct GenAttrsArgs {
    /// Edge list whose vertices receive keywords.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 8)]
    min: usize,
    #[arg(long, default_value_t = 13)]
    max: usize,
    #[arg(long, default_value_t = 20)]
    vocab_u: usize,
    #[arg(long, default_value_t = 20)]
    vocab_v: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_u: PathBuf,
    #[arg(long)]
    out_v: PathBuf,
}

fn cmd_query(a: &QueryArgs) -> Result<String> {
    let g = a.graph.load()?;
    let q = g.find(Layer::Upper, &a.q).ok_or_else(|| anyhow!("unknown upper vertex {:?}", a.q))?;
    let keywords = if a.keywords.trim() == "all" {
        g.keywords(q).clone()
    } else {
        let words: Vec<&str> = a.keywords.split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
        match g.keyword_set(words.iter().copied()) {
            Some(s) => s,
            None => {
                let bad = words.iter().find(|w| g.keyword_set([**w]).is_none()).unwrap_or(&"");
                bail!("keyword {bad:?} is not held by the query vertex {}", a.q)
            }
        }
    };
    let algorithm: Algorithm = a.algo.parse()?;
    let spec = QuerySpec::new(q, CoreParams::new(a.alpha, a.beta)?, keywords, algorithm);
    let mut cfg = SearchConfig::default();
    if a.sequential {
        cfg.exec = Exec::Sequential;
    }
    if let Some(ms) = a.time_limit_ms {
        cfg = cfg.with_time_limit(Duration::from_millis(ms));
    }
    let out = run(&g, &spec, &cfg)?;
    if out.results.is_empty() {
        match &out.plain_community {
            Some(c) => eprintln!(
                "note: no keyword pair qualifies; the plain community of {} has {} upper and {} lower vertices",
                a.q,
                c.upper_size(),
                c.lower_size()
            ),
            None => eprintln!("note: {} has no ({},{})-community", a.q, a.alpha, a.beta),
        }
    }
    let doc = QueryDoc::new(&g, &spec, &out, if a.no_timing { Timing::Omitted } else { Timing::Measured });
    Ok(match a.output {
        Format::Json => doc.to_json() + "\n",
        Format::Tsv => doc.to_tsv(),
    })
}

fn cmd_core(a: &CoreArgs) -> Result<String> {
    let g = a.graph.load()?;
    let comps = core_decompose(&g, CoreParams::new(a.alpha, a.beta)?);
    let mut s = format!("components: {}\n", comps.len());
    for (i, c) in comps.iter().enumerate() {
        s += &format!("{}: {} upper, {} lower\n", i + 1, c.upper_len(), c.lower_len());
    }
    Ok(s)
}

fn cmd_bench(a: &BenchArgs) -> Result<String> {
    let text = fs::read_to_string(&a.plan).with_context(|| format!("reading {}", a.plan.display()))?;
    let mut plan: BenchPlan = toml::from_str(&text).with_context(|| format!("parsing {}", a.plan.display()))?;
    // Dataset paths are relative to the plan file.
    let base = a.plan.parent().unwrap_or(Path::new("."));
    for d in &mut plan.datasets {
        for p in [Some(&mut d.edges), d.attrs_u.as_mut(), d.attrs_v.as_mut()].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
    let (rows, failed) = run_plan(&plan, worker_count())?;
    for (name, e) in &failed {
        eprintln!("warning: dataset {name} skipped: {e}");
    }
    let create = |p: &Path| File::create(p).map(BufWriter::new).with_context(|| format!("creating {}", p.display()));
    write_records(create(&a.out)?, &rows)?;
    let summary = summarize(&rows);
    write_summary(create(&a.summary)?, &summary)?;
    Ok(format!("{} rows, {} cells, {} datasets skipped\n", rows.len(), summary.len(), failed.len()))
}

fn cmd_gen_attrs(a: &GenAttrsArgs) -> Result<String> {
    let g = load_graph(&a.graph, None, None)?;
    let cfg = SyntheticAttrConfig {
        min_per_vertex: a.min,
        max_per_vertex: a.max,
        vocab_size_upper: a.vocab_u,
        vocab_size_lower: a.vocab_v,
        seed: a.seed,
    };
    let h = generate_attributes(&g, &cfg)?;
    fs::write(&a.out_u, attributes_text(&h, Layer::Upper)).with_context(|| format!("writing {}", a.out_u.display()))?;
    fs::write(&a.out_v, attributes_text(&h, Layer::Lower)).with_context(|| format!("writing {}", a.out_v.display()))?;
    Ok(String::new())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Query(a) => cmd_query(a),
        Cmd::Core(a) => cmd_core(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::GenAttrs(a) => cmd_gen_attrs(a),
    };
    match res {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
