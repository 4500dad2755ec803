//! `tcpm` command-line driver.
//!
//! Reports are JSON on stdout (or `--out`); diagnostics go to stderr.

pub mod report;

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tcpm::baselines::{high_degree, max_inf, BaselineConfig};
use tcpm::diffusion::estimate_profit_simulation;
use tcpm::diffusion::exact::{exact_spread, nodes_of, outcome_count, ExactTable};
use tcpm::network::{generate_intrinsics, ingest_edge_list, read_intrinsics, DiffusionParams, NetworkConfig};
use tcpm::optimize::{ra_s, ra_t, rpm, spm, Algorithm, RunConfig, SeedSet};
use tcpm::sampling::Thresholds;
use tcpm::{Graph, Model, NodeId, TCNetwork};

use report::*;

/// Prices visited by `sweep`.
pub const SWEEP_PRICES: [f64; 5] = [0.2, 0.3, 0.4, 0.5, 0.6];

#[derive(Debug, Parser)]
#[command(name = "tcpm", version, about = "Profit maximization with coupons on social networks")]
pub struct Cli {
    /// Worker threads for sampling (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load an edge list and print graph statistics.
    IngestCheck(NetworkArgs),
    /// Select seeds with one algorithm and evaluate them.
    Run(RunArgs),
    /// Estimate the profit of a given seed set by simulation.
    Evaluate(EvaluateArgs),
    /// Exact profit by enumeration on tiny instances.
    Oracle(OracleArgs),
    /// Print sample-size thresholds and epsilon splits.
    Thresholds(ThresholdArgs),
    /// Run one algorithm at every price in 0.2..=0.6.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NetworkArgs {
    /// Edge list: two node labels per line, `#` comments.
    #[arg(long)]
    pub graph: PathBuf,
    /// Insert every edge in both directions.
    #[arg(long)]
    pub undirected: bool,
    /// Settings file (model, price, coupon-fraction, ic-probability,
    /// rng-seed); flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = ["ic-cp", "ic-wc", "lt"])]
    pub model: Option<String>,
    /// Edge probability for ic-cp.
    #[arg(long = "ic-p")]
    pub ic_p: Option<f64>,
    #[arg(long)]
    pub price: Option<f64>,
    /// Coupon value as a fraction of the price.
    #[arg(long = "coupon-frac")]
    pub coupon_frac: Option<f64>,
    /// One intrinsic value per line, in ascending label order; drawn from
    /// `[P - C, 1]` when absent.
    #[arg(long = "intrinsics-file")]
    pub intrinsics_file: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct AlgorithmArgs {
    /// spm, rpm, ra-t, ra-s, maxinf or highdegree.
    #[arg(long)]
    pub alg: String,
    #[arg(long, default_value_t = 0.4)]
    pub eps: f64,
    /// Confidence parameter N (default: node count).
    #[arg(long = "bigN")]
    pub big_n: Option<f64>,
    #[arg(long, default_value_t = 5)]
    pub k: u32,
    #[arg(long, default_value_t = 0.1)]
    pub eps3: f64,
    /// RA-S early stop when F moves by less than this percentage; 0 disables.
    #[arg(long = "plateau-pct", default_value_t = 2.0)]
    pub plateau_pct: f64,
    /// Cap on RA sets (RA-T, RA-S).
    #[arg(long = "max-ra")]
    pub max_ra: Option<u64>,
    /// Fixed sample count for SPM and RPM.
    #[arg(long = "l-override")]
    pub l_override: Option<u64>,
    /// Simulations for evaluating the selected set.
    #[arg(long = "eval-sims", default_value_t = 10_000)]
    pub eval_sims: u64,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub algorithm: AlgorithmArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub algorithm: AlgorithmArgs,
    /// Emit a CSV summary instead of one JSON report per line.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Comma-separated node labels; empty for the empty set.
    #[arg(long)]
    pub seeds: Labels,
    #[arg(long = "eval-sims", default_value_t = 10_000)]
    pub eval_sims: u64,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Comma-separated node labels to evaluate exactly.
    #[arg(long)]
    pub seeds: Option<Labels>,
    /// Also find the best seed set by full enumeration.
    #[arg(long)]
    pub optimum: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// Node count.
    #[arg(long)]
    pub n: usize,
    /// Confidence parameter N (default: n).
    #[arg(long = "bigN")]
    pub big_n: Option<f64>,
    #[arg(long, default_value_t = 0.4)]
    pub eps: f64,
    /// Discount ratio (P - C) / P.
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 5)]
    pub k: u32,
    #[arg(long, default_value_t = 0.1)]
    pub eps3: f64,
}

/// A comma-separated list of node labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labels(pub Vec<u64>);

impl std::str::FromStr for Labels {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect::<Result<_, _>>().map(Labels)
    }
}

/// Fully resolved network settings after merging a config file and flags.
#[derive(Debug, Clone)]
struct Resolved {
    model: Model,
    ic_p: f64,
    price: f64,
    coupon_frac: f64,
    seed: u64,
}

impl NetworkArgs {
    fn resolve(&self) -> Result<Resolved> {
        let file = match &self.config {
            Some(path) => NetworkConfig::parse(BufReader::new(open(path)?))
                .with_context(|| format!("reading config {}", path.display()))?,
            None => NetworkConfig::default(),
        };
        let model = match &self.model {
            Some(m) => m.parse()?,
            None => file.model.unwrap_or(Model::IcWeighted),
        };
        Ok(Resolved {
            model,
            ic_p: self.ic_p.or(file.ic_probability).unwrap_or(0.01),
            price: self.price.or(file.price).context("--price is required (flag or config)")?,
            coupon_frac: self
                .coupon_frac
                .or(file.coupon_fraction)
                .context("--coupon-frac is required (flag or config)")?,
            seed: self.seed.or(file.rng_seed).unwrap_or(0),
        })
    }

    fn load_graph(&self) -> Result<Graph> {
        let f = open(&self.graph)?;
        ingest_edge_list(BufReader::new(f), self.undirected)
            .with_context(|| format!("reading {}", self.graph.display()))
    }

    fn build(&self, price_override: Option<f64>) -> Result<(TCNetwork, Resolved)> {
        let mut res = self.resolve()?;
        if let Some(p) = price_override {
            res.price = p;
        }
        let graph = self.load_graph()?;
        let params = match res.model {
            Model::IcConstant => DiffusionParams::ic_constant(res.ic_p),
            Model::IcWeighted => DiffusionParams::ic_weighted(),
            Model::LinearThreshold => DiffusionParams::linear_threshold(),
        };
        let coupon = res.price * res.coupon_frac;
        let intrinsic = match &self.intrinsics_file {
            Some(path) => {
                read_intrinsics(BufReader::new(open(path)?)).with_context(|| format!("reading {}", path.display()))?
            }
            None => generate_intrinsics(graph.node_count(), res.price, coupon, res.seed)?,
        };
        let net = TCNetwork::build(graph, params, res.price, coupon, intrinsic)?;
        Ok((net, res))
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn labels(net: &TCNetwork, ids: &[NodeId]) -> Vec<u64> {
    ids.iter().map(|&v| net.graph().label(v)).collect()
}

fn ids(net: &TCNetwork, labels: &[u64]) -> Result<Vec<NodeId>> {
    let mut out = labels
        .iter()
        .map(|&l| net.graph().id_of(l).with_context(|| format!("node {l} is not in the graph")))
        .collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn select(net: &TCNetwork, alg: Algorithm, a: &AlgorithmArgs, seed: u64) -> Result<SeedSet> {
    let cfg = RunConfig {
        epsilon: a.eps,
        big_n: a.big_n,
        l_override: a.l_override,
        max_ra: a.max_ra,
        k: a.k,
        epsilon3: a.eps3,
        plateau_pct: a.plateau_pct,
        seed,
        ..RunConfig::default()
    };
    let base = BaselineConfig { epsilon: a.eps, big_n: a.big_n, eval_simulations: a.eval_sims, ..Default::default() };
    Ok(match alg {
        Algorithm::Spm => spm(net, &cfg)?,
        Algorithm::Rpm => rpm(net, &cfg)?,
        Algorithm::RaT => ra_t(net, &cfg)?,
        Algorithm::RaS => ra_s(net, &cfg)?,
        Algorithm::MaxInf => max_inf(net, &base, seed)?,
        Algorithm::HighDegree => high_degree(net, &base, seed)?,
    })
}

/// Selection plus a fresh evaluation of the chosen set.
pub fn run_once(args: &RunArgs, threads: Option<usize>, price: Option<f64>) -> Result<RunReport> {
    let alg: Algorithm = args.algorithm.alg.parse()?;
    if args.algorithm.eval_sims == 0 {
        bail!("--eval-sims must be positive");
    }
    let (net, res) = args.network.build(price)?;
    let start = Instant::now();
    let chosen = select(&net, alg, &args.algorithm, res.seed)?;
    let wall_time_ms = start.elapsed().as_millis() as u64;
    let eval_seed = tcpm::rng::derive(res.seed, u64::MAX);
    let estimate = estimate_profit_simulation(&net, &chosen.members, args.algorithm.eval_sims, eval_seed);
    let a = &args.algorithm;
    Ok(RunReport {
        algorithm: alg.as_str().to_string(),
        parameters: Parameters {
            graph: args.network.graph.display().to_string(),
            undirected: args.network.undirected,
            model: res.model.as_str().to_string(),
            ic_p: res.ic_p,
            price: res.price,
            coupon_frac: res.coupon_frac,
            intrinsics_file: args.network.intrinsics_file.as_ref().map(|p| p.display().to_string()),
            eps: a.eps,
            big_n: a.big_n,
            k: a.k,
            eps3: a.eps3,
            plateau_pct: a.plateau_pct,
            max_ra: a.max_ra,
            l_override: a.l_override,
            eval_sims: a.eval_sims,
            seed: res.seed,
            threads,
        },
        seed_set: labels(&net, &chosen.members),
        seed_count: chosen.len(),
        estimated_profit: Estimate::from(&estimate),
        wall_time_ms,
        sample_counts: chosen.samples.into(),
        network_summary: NetworkSummary::of(&net),
        details: chosen.details,
    })
}

fn ingest_check(args: &NetworkArgs) -> Result<IngestReport> {
    let graph = args.load_graph()?;
    let n = graph.node_count() as NodeId;
    let eligible = if args.price.is_some() || args.config.is_some() {
        let (net, _) = args.build(None)?;
        Some((0..n).filter(|&v| net.adopter_eligible(v)).count())
    } else {
        None
    };
    Ok(IngestReport {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        max_out_degree: (0..n).map(|v| graph.out_degree(v)).max().unwrap_or(0),
        max_in_degree: (0..n).map(|v| graph.in_degree(v)).max().unwrap_or(0),
        isolated: (0..n).filter(|&v| graph.out_degree(v) + graph.in_degree(v) == 0).count(),
        adopter_eligible: eligible,
    })
}

fn evaluate(args: &EvaluateArgs) -> Result<EvaluationReport> {
    if args.eval_sims == 0 {
        bail!("--eval-sims must be positive");
    }
    let (net, res) = args.network.build(None)?;
    let seeds = ids(&net, &args.seeds.0)?;
    let est = estimate_profit_simulation(&net, &seeds, args.eval_sims, res.seed);
    Ok(EvaluationReport {
        seed_set: labels(&net, &seeds),
        seed_count: seeds.len(),
        estimated_profit: Estimate::from(&est),
        seed: res.seed,
        network_summary: NetworkSummary::of(&net),
    })
}

fn oracle(args: &OracleArgs) -> Result<OracleReport> {
    let (net, _) = args.network.build(None)?;
    let outcomes = outcome_count(&net).context("instance too large for exact enumeration")?;
    let query = match &args.seeds {
        Some(labels_in) => {
            let seeds = ids(&net, &labels_in.0)?;
            let spread = exact_spread(&net, &seeds)?;
            Some(ExactValue { seed_set: labels(&net, &seeds), spread, profit: net.profit(spread, seeds.len()) })
        }
        None => None,
    };
    let optimum = if args.optimum {
        let table = ExactTable::build(&net).context("instance too large for exhaustive search")?;
        let (mask, profit) = table.optimum();
        Some(ExactValue { seed_set: labels(&net, &nodes_of(mask)), spread: table.spread(mask), profit })
    } else {
        None
    };
    Ok(OracleReport { network_summary: NetworkSummary::of(&net), outcomes, query, optimum })
}

fn thresholds(args: &ThresholdArgs) -> Result<ThresholdReport> {
    let big_n = args.big_n.unwrap_or(args.n as f64);
    let t = Thresholds::compute(args.n, big_n, args.eps, args.r, args.k, args.eps3, 0.01)?;
    Ok(ThresholdReport {
        n: t.n,
        big_n: t.big_n,
        epsilon: t.epsilon,
        r: t.r,
        delta0: t.delta0,
        delta2_at_eps: tcpm::sampling::delta2(big_n, args.eps, args.r)?,
        ra_t: RatRow {
            epsilon1: t.rat_epsilon1,
            epsilon2: t.rat_epsilon2,
            delta1: t.delta1,
            delta2: t.delta2,
            samples: t.delta1.max(t.delta2).ceil() as u64,
        },
        ra_s: RasRow {
            epsilon1: t.ras.epsilon1,
            epsilon2: t.ras.epsilon2,
            epsilon3: t.ras.epsilon3,
            k: t.ras.k,
            delta1_star: t.ras.delta1_star,
            delta2_star: t.ras.delta2_star,
            delta3: t.ras.delta3,
        },
    })
}

fn sweep(args: &SweepArgs, threads: Option<usize>, out: &mut dyn Write) -> Result<()> {
    let run = RunArgs { network: args.network.clone(), algorithm: args.algorithm.clone() };
    if args.csv {
        writeln!(
            out,
            "algorithm,price,coupon,seed_count,mean_profit,std_error,wall_time_ms,simulations,realizations,ra_sets"
        )?;
    }
    for price in SWEEP_PRICES {
        let r = run_once(&run, threads, Some(price))?;
        if args.csv {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.algorithm,
                r.network_summary.price,
                r.network_summary.coupon,
                r.seed_count,
                r.estimated_profit.mean_profit,
                r.estimated_profit.std_error,
                r.wall_time_ms,
                r.sample_counts.simulations,
                r.sample_counts.realizations,
                r.sample_counts.ra_sets
            )?;
        } else {
            writeln!(out, "{}", serde_json::to_string(&r)?)?;
        }
    }
    Ok(())
}

fn emit<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::IngestCheck(a) => emit(&ingest_check(a)?, out),
        Command::Run(a) => emit(&run_once(a, cli.threads, None)?, out),
        Command::Evaluate(a) => emit(&evaluate(a)?, out),
        Command::Oracle(a) => emit(&oracle(a)?, out),
        Command::Thresholds(a) => emit(&thresholds(a)?, out),
        Command::Sweep(a) => sweep(a, cli.threads, out),
    }
}

/// Runs a parsed command, writing the report to `--out` or stdout.
pub fn execute(cli: &Cli) -> Result<()> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.threads {
            if t == 0 {
                bail!("--threads must be positive");
            }
            b = b.num_threads(t);
        }
        b.build()?
    };
    // buffer the report so a failure leaves no partial output behind
    let mut buf = Vec::new();
    pool.install(|| dispatch(cli, &mut buf))?;
    match &cli.out {
        Some(path) => std::fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}
