//! Command-line front end.
//!
//! Every command reads its inputs, writes fixed-name files into `--out` and
//! exits with 0 (ok), 1 (validation), 2 (I/O) or 3 (partition written but a
//! balance constraint is unmet).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphlayout_core::analytics::{self, sssp::SsspConfig, TemplateTree};
use graphlayout_core::generate::{self, Planted};
use graphlayout_core::graph::{self, UNREACHED};
use graphlayout_core::ordering::{self, Strategy};
use graphlayout_core::partition::{self, Mode, PartitionConfig, Sequential};
use graphlayout_core::{metrics, Graph, Ordering, Partition};

use crate::error::{Error, Result};
use crate::io::{self, Format};
use crate::report;
use crate::runner::Threads;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "graphlayout", version, about = "Partition, reorder and benchmark graph layouts")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Graph file format for inputs and written graphs.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Edgelist)]
    pub format: FormatArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Edgelist,
    Metis,
    Csr,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Edgelist => Format::EdgeList,
            FormatArg::Metis => Format::Metis,
            FormatArg::Csr => Format::Csr,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic graph to `<out>/<kind>.<ext>`.
    Generate(GenerateArgs),
    /// Drop self-loops, multi-edges and all but the largest component.
    Preprocess(PreprocessArgs),
    /// Write `partition.txt` and `partition.csv`.
    Partition(PartitionArgs),
    /// Write `ordering.txt` and `ordering.csv`.
    Order(OrderArgs),
    /// Write `metrics.csv` for a partition and ordering.
    Metrics(MetricsArgs),
    /// Run a simulated distributed analytic and write its traces.
    Bench(BenchArgs),
    /// Write `replication.csv` with n-hop replication ratios.
    Replication(ReplicationArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    pub input: PathBuf,
    /// Read edge lists as directed arcs.
    #[arg(long)]
    pub directed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Planted,
    BaLike,
    Path,
    Cycle,
    Star,
    CliquePair,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    /// Vertex count (path, cycle, ba-like).
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Leaves of the star.
    #[arg(long, default_value_t = 8)]
    pub leaves: usize,
    /// Clique size of clique-pair.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub blocks: usize,
    #[arg(long, default_value_t = 100)]
    pub block_size: usize,
    #[arg(long, default_value_t = 0.1)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.001)]
    pub p_out: f64,
    /// Edges per new vertex in ba-like.
    #[arg(long, default_value_t = 4)]
    pub attach: usize,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Lp,
    Random,
    Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    M,
    Mm,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub parts: usize,
    #[arg(long, value_enum, default_value_t = Method::Lp)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = ModeArg::Mm)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1.10)]
    pub vbal: f64,
    #[arg(long, default_value_t = 1.50)]
    pub ebal: f64,
    #[arg(long, default_value_t = 3)]
    pub k1: usize,
    #[arg(long, default_value_t = 3)]
    pub k2: usize,
    #[arg(long, default_value_t = 10)]
    pub lp_iters: usize,
    /// Sweep threads for label propagation; more than one gives up
    /// reproducibility unless --deterministic is set.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Force single-threaded, reproducible sweeps.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Random,
    Rcm,
    Dgl,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Random => Strategy::Random,
            StrategyArg::Rcm => Strategy::Rcm,
            StrategyArg::Dgl => Strategy::Dgl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Global,
    PerPart,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = StrategyArg::Dgl)]
    pub strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = ScopeArg::Global)]
    pub scope: ScopeArg,
    /// Partition file, required for per-part scope.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Pinned BFS root for global DGL.
    #[arg(long)]
    pub root: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    /// Partition file; all vertices in one part when absent.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Part count of the partition file (default: largest id + 1).
    #[arg(long)]
    pub parts: Option<usize>,
    /// Ordering file; input ids are kept when absent.
    #[arg(long)]
    pub ordering: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
    /// Also compute the replication ratio for this hop count.
    #[arg(long)]
    pub hops: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReplicationArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub partition: PathBuf,
    #[arg(long)]
    pub parts: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub hops: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyticArg {
    Pagerank,
    Bfs,
    Sssp,
    Count,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
    #[arg(long, value_enum)]
    pub analytic: AnalyticArg,
    /// PageRank iterations or color-coding iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long, default_value_t = analytics::pagerank::DEFAULT_DAMPING)]
    pub damping: f64,
    /// Delta-stepping bucket width (default: average weight * n / m).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Send every remote SSSP relaxation, disabling the distance filter.
    #[arg(long)]
    pub no_filter: bool,
    /// Tree template as an edge list (default: 3-vertex path).
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// Source vertex for bfs and sssp, in input ids.
    #[arg(long, default_value_t = 0)]
    pub root: usize,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    fs::create_dir_all(&cli.out).map_err(|e| Error::io(&cli.out, e))?;
    let ctx = Ctx {
        seed: cli.seed,
        out: &cli.out,
        format: cli.format.into(),
    };
    match &cli.command {
        Command::Generate(a) => cmd_generate(&ctx, a),
        Command::Preprocess(a) => cmd_preprocess(&ctx, a),
        Command::Partition(a) => cmd_partition(&ctx, a),
        Command::Order(a) => cmd_order(&ctx, a),
        Command::Metrics(a) => cmd_metrics(&ctx, a),
        Command::Bench(a) => cmd_bench(&ctx, a),
        Command::Replication(a) => cmd_replication(&ctx, a),
    }
}

struct Ctx<'a> {
    seed: u64,
    out: &'a Path,
    format: Format,
}

impl Ctx<'_> {
    fn load(&self, input: &InputArgs) -> Result<Graph> {
        io::read_graph(&input.input, self.format, input.directed)
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.out.join(name);
        io::write_bytes(&path, contents.as_bytes())?;
        Ok(path)
    }
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

/// Partitioners and orderings work on the undirected view.
fn undirected(g: &Graph) -> Graph {
    if g.is_directed() {
        graph::symmetrize(g)
    } else {
        g.clone()
    }
}

fn cmd_generate(ctx: &Ctx, a: &GenerateArgs) -> Result<i32> {
    let g = match a.kind {
        Kind::Planted => generate::planted(
            &Planted {
                blocks: a.blocks,
                block_size: a.block_size,
                p_in: a.p_in,
                p_out: a.p_out,
            },
            ctx.seed,
        )?,
        Kind::BaLike => generate::ba_like(a.n, a.attach, ctx.seed)?,
        Kind::Path => generate::path(a.n),
        Kind::Cycle => generate::cycle(a.n),
        Kind::Star => generate::star(a.leaves),
        Kind::CliquePair => generate::clique_pair(a.k),
    };
    let path = ctx.out.join(format!("{}.{}", value_name(a.kind), ctx.format.extension()));
    io::write_graph(&g, &path, ctx.format)?;
    println!("{}: n={} m={}", path.display(), g.n(), g.m());
    Ok(EXIT_OK)
}

fn cmd_preprocess(ctx: &Ctx, a: &PreprocessArgs) -> Result<i32> {
    let g = ctx.load(&a.input)?;
    let (h, map) = graph::preprocess(&g)?;
    let path = ctx.out.join(format!("preprocessed.{}", ctx.format.extension()));
    io::write_graph(&h, &path, ctx.format)?;
    ctx.write("id_map.txt", &io::id_map_string(&map))?;
    let stats = h.degree_stats();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "m", "d_avg", "d_max", "approx_diameter"])?;
    w.write_record([
        h.n().to_string(),
        h.m().to_string(),
        stats.d_avg.to_string(),
        stats.d_max.to_string(),
        stats.approx_diameter.map(|d| d.to_string()).unwrap_or_default(),
    ])?;
    let csv = report::finish(w)?;
    ctx.write("stats.csv", &csv)?;
    println!("{}: n={} m={}", path.display(), h.n(), h.m());
    Ok(EXIT_OK)
}

fn cmd_partition(ctx: &Ctx, a: &PartitionArgs) -> Result<i32> {
    let g = undirected(&ctx.load(&a.input)?);
    let mut cfg = PartitionConfig::new(a.parts).with_seed(ctx.seed).with_mode(match a.mode {
        ModeArg::M => Mode::M,
        ModeArg::Mm => Mode::MM,
    });
    cfg.vertex_imbalance = a.vbal;
    cfg.edge_imbalance = a.ebal;
    cfg.k1 = a.k1;
    cfg.k2 = a.k2;
    cfg.lp_iters = a.lp_iters;
    cfg.validate()?;
    let (part, violation) = match a.method {
        Method::Random => (partition::partition_random(&g, a.parts, ctx.seed)?, None),
        Method::Block => (partition::partition_block(&g, a.parts)?, None),
        Method::Lp => {
            let out = if a.threads > 1 && !a.deterministic {
                partition::partition_lp_with(&g, &cfg, &Threads::new(a.threads))?
            } else {
                partition::partition_lp_with(&g, &cfg, &Sequential)?
            };
            (out.partition, out.violation)
        }
    };
    ctx.write("partition.txt", &io::partition_string(&part))?;
    let label = match a.method {
        Method::Lp => format!("lp-{}", value_name(a.mode)),
        Method::Random => "random".into(),
        Method::Block => "block".into(),
    };
    let row = metrics::layout_report(&g, &part, &g, None)?;
    ctx.write("partition.csv", &report::layout_csv(part.p(), &[(label, row)])?)?;
    println!("p={} v_max={} e_max={} ec={} ec_max={}", part.p(), row.v_max, row.e_max, row.ec, row.ec_max);
    match violation {
        Some(v) => {
            eprintln!(
                "constraint violated: v_max={} (target {}), e_max={} (target {})",
                v.v_max, a.vbal, v.e_max, a.ebal
            );
            Ok(EXIT_VIOLATION)
        }
        None => Ok(EXIT_OK),
    }
}

fn cmd_order(ctx: &Ctx, a: &OrderArgs) -> Result<i32> {
    let g = undirected(&ctx.load(&a.input)?);
    let strategy: Strategy = a.strategy.into();
    let ord = match (a.scope, a.root) {
        (ScopeArg::Global, None) => ordering::order_global(&g, strategy, ctx.seed),
        (ScopeArg::Global, Some(root)) => {
            if strategy != Strategy::Dgl {
                return Err(Error::Invalid("--root applies to the dgl strategy only".into()));
            }
            ordering::order_dgl_from_root(&g, root, ctx.seed)?
        }
        (ScopeArg::PerPart, root) => {
            if root.is_some() {
                return Err(Error::Invalid("--root applies to global scope only".into()));
            }
            let path = a
                .partition
                .as_ref()
                .ok_or_else(|| Error::Invalid("per-part scope needs --partition".into()))?;
            let part = io::read_partition(path, &g, None)?;
            ordering::order_per_part(&g, &part, strategy, ctx.seed)
        }
    };
    ctx.write("ordering.txt", &io::ordering_string(&ord))?;
    let h = ord.apply(&g)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["strategy", "scope", "coloc_before", "gapsum_before", "coloc", "gapsum"])?;
    w.write_record([
        value_name(a.strategy),
        value_name(a.scope),
        metrics::colocation_ratio(&g).to_string(),
        metrics::gap_sum_ratio(&g).to_string(),
        metrics::colocation_ratio(&h).to_string(),
        metrics::gap_sum_ratio(&h).to_string(),
    ])?;
    let csv = report::finish(w)?;
    ctx.write("ordering.csv", &csv)?;
    Ok(EXIT_OK)
}

/// The graph's partition (in input ids) and optional ordering.
fn load_layout(g: &Graph, a: &LayoutArgs) -> Result<(Partition, Option<Ordering>)> {
    let part = match &a.partition {
        Some(path) => io::read_partition(path, g, a.parts)?,
        None => Partition::new(g, a.parts.unwrap_or(1), vec![0; g.n()])?,
    };
    let ord = a
        .ordering
        .as_ref()
        .map(|path| io::read_ordering(path, g.n()))
        .transpose()?;
    Ok((part, ord))
}

fn cmd_metrics(ctx: &Ctx, a: &MetricsArgs) -> Result<i32> {
    let g = undirected(&ctx.load(&a.input)?);
    let (part, ord) = load_layout(&g, &a.layout)?;
    let ordered = match &ord {
        Some(o) => o.apply(&g)?,
        None => g.clone(),
    };
    let row = metrics::layout_report(&g, &part, &ordered, a.hops)?;
    ctx.write("metrics.csv", &report::layout_csv(part.p(), &[("metrics".into(), row)])?)?;
    Ok(EXIT_OK)
}

fn cmd_replication(ctx: &Ctx, a: &ReplicationArgs) -> Result<i32> {
    let g = undirected(&ctx.load(&a.input)?);
    let part = io::read_partition(&a.partition, &g, a.parts)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p", "hops", "ratio"])?;
    for &h in &a.hops {
        let r = metrics::replication_ratio(&g, &part, h)?;
        w.write_record([part.p().to_string(), h.to_string(), r.to_string()])?;
    }
    let csv = report::finish(w)?;
    ctx.write("replication.csv", &csv)?;
    Ok(EXIT_OK)
}

fn read_template(path: &Path) -> Result<TemplateTree> {
    let t = io::parse_edge_list(&io::read_text(path)?, false, path)?;
    let edges: Vec<(usize, usize)> = t.arcs().filter(|&(u, v, _)| u <= v).map(|(u, v, _)| (u, v)).collect();
    Ok(TemplateTree::from_edges(t.n(), &edges)?)
}

fn cmd_bench(ctx: &Ctx, a: &BenchArgs) -> Result<i32> {
    let mut g = ctx.load(&a.input)?;
    if a.analytic == AnalyticArg::Count {
        g = undirected(&g);
    }
    let (part, ord) = load_layout(&g, &a.layout)?;
    if a.root >= g.n() && matches!(a.analytic, AnalyticArg::Bfs | AnalyticArg::Sssp) {
        return Err(graphlayout_core::Error::Domain(format!("root {} out of range for n = {}", a.root, g.n())).into());
    }
    // Work on the relabeled graph; report values by input id.
    let perm: Vec<usize> = match &ord {
        Some(o) => o.perm().to_vec(),
        None => (0..g.n()).collect(),
    };
    let (h, part) = match &ord {
        Some(o) => {
            let h = o.apply(&g)?;
            let part = part.permuted(&h, o.perm())?;
            (h, part)
        }
        None => (g.clone(), part),
    };
    let dg = analytics::distribute(&h, &part)?;
    let root = perm.get(a.root).copied().unwrap_or(0);
    let by_input = |values: &[String]| -> Vec<String> { perm.iter().map(|&x| values[x].clone()).collect() };

    let started = Instant::now();
    let (mut trace, values, result) = match a.analytic {
        AnalyticArg::Pagerank => {
            let (ranks, trace) = analytics::pagerank(&dg, a.iters.unwrap_or(20), a.damping);
            let vals: Vec<String> = ranks.iter().map(f64::to_string).collect();
            let total: f64 = (0..g.n()).map(|v| ranks[perm[v]]).sum();
            (trace, Some(by_input(&vals)), total.to_string())
        }
        AnalyticArg::Bfs => {
            let (levels, trace) = analytics::bfs(&dg, root)?;
            let vals: Vec<String> = levels
                .iter()
                .map(|&l| if l == UNREACHED { "inf".into() } else { l.to_string() })
                .collect();
            let reached = levels.iter().filter(|&&l| l != UNREACHED).count();
            (trace, Some(by_input(&vals)), reached.to_string())
        }
        AnalyticArg::Sssp => {
            let cfg = SsspConfig {
                delta: a.delta,
                filter_remote: !a.no_filter,
            };
            let (dist, trace) = analytics::sssp_delta(&dg, root, &cfg)?;
            let vals: Vec<String> = dist.iter().map(f64::to_string).collect();
            let reached = dist.iter().filter(|d| d.is_finite()).count();
            (trace, Some(by_input(&vals)), reached.to_string())
        }
        AnalyticArg::Count => {
            let template = match &a.template {
                Some(path) => read_template(path)?,
                None => TemplateTree::path(3)?,
            };
            // Colors follow input ids so every layout sees the same coloring.
            let mut keys = vec![0u64; h.n()];
            for (v, &x) in perm.iter().enumerate() {
                keys[x] = v as u64;
            }
            let (res, trace) = analytics::count_subgraphs_keyed(&dg, &template, a.iters.unwrap_or(100), ctx.seed, &keys)?;
            (trace, None, res.estimate.to_string())
        }
    };
    trace.wall_time = Some(started.elapsed());

    let name = trace.analytic.name();
    let run_id = format!("{name}-p{}-seed{}", part.p(), ctx.seed);
    ctx.write("trace.csv", &report::trace_csv(&run_id, &trace)?)?;
    ctx.write("timeline.csv", &report::timeline_csv(&run_id, &trace)?)?;
    ctx.write("summary.csv", &report::summary_csv(&run_id, &trace, &result)?)?;
    if let Some(values) = values {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["vertex", "value"])?;
        for (v, x) in values.iter().enumerate() {
            w.write_record([v.to_string(), x.clone()])?;
        }
        let csv = report::finish(w)?;
        ctx.write("values.csv", &csv)?;
    }
    eprintln!(
        "{run_id}: phases={} sent={} result={} ({:?})",
        trace.phases.len(),
        trace.total_sent(),
        result,
        trace.wall_time.unwrap_or_default()
    );
    Ok(EXIT_OK)
}
