use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use arbcycle::evaluate::{ProfitReport, DEFAULT_NODE_CAP, MAX_BRUTE_LEN};
use arbcycle::pipeline::report_for;
use arbcycle::snapshot::write_csv;
use arbcycle::{
    build_graph, gen_synthetic, parse_snapshot, transform, uniqueness_stats, ExchangeGraph, Format, GraphConfig, Method,
    PipelineConfig, Plant, Quote, SamplerConfig, SyntheticSpec,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

/// Find arbitrage cycles in cryptocurrency market snapshots.
#[derive(Parser)]
#[command(name = "arbcycle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a snapshot and print graph statistics.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a synthetic snapshot as CSV.
    GenSynthetic(GenArgs),
    /// Count distinct transformed weights for several multipliers.
    TransformStats {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated weight multipliers.
        #[arg(long, value_delimiter = ',', default_values_t = [100u64, 1_000, 100_000, 1_000_000, 10_000_000])]
        c_values: Vec<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Find the minimum weight cycle and report its profit.
    FindCycle {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value = "triangle", value_parser = ["triangle", "floyd", "brute"])]
        method: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every method on the same input and compare the results.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Snapshot file.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Synthetic input: `full`, `planted:L:P` or `markets=..,currencies=..,density=..,plant=L:P`.
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.99999)]
    epsilon_lo: f64,
    #[arg(long, default_value_t = 0.999999)]
    epsilon_hi: f64,
    #[arg(long, default_value_t = 0.9999)]
    transfer_epsilon: f64,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(short = 'c', long = "weight-multiplier", default_value_t = 10_000_000)]
    weight_multiplier: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
    min_length: u8,
    /// Same as `--min-length 2`.
    #[arg(long)]
    include_two_cycles: bool,
    /// Longest cycle the brute-force enumerator considers.
    #[arg(long, default_value_t = MAX_BRUTE_LEN)]
    max_len: usize,
    /// Largest graph the brute-force enumerator accepts.
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    brute_cap: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value_t = 16)]
    markets: usize,
    #[arg(long, default_value_t = 110)]
    currencies: usize,
    #[arg(long, default_value_t = arbcycle::snapshot::FULL_GRAPH_DENSITY)]
    density: f64,
    /// Planted cycle as `LENGTH:PRODUCT`.
    #[arg(long)]
    plant: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_plant(s: &str) -> Result<Plant> {
    let (len, product) = s.split_once(':').context("plant must look like LENGTH:PRODUCT")?;
    Ok(Plant { length: len.trim().parse()?, product: product.trim().parse()? })
}

fn parse_synthetic(spec: &str, seed: u64) -> Result<SyntheticSpec> {
    if spec == "full" {
        return Ok(SyntheticSpec::full_graph(seed));
    }
    if let Some(rest) = spec.strip_prefix("planted:") {
        return Ok(SyntheticSpec { n_markets: 3, n_currencies: 12, density: 0.5, planted: Some(parse_plant(rest)?), seed });
    }
    let mut out = SyntheticSpec { n_markets: 4, n_currencies: 20, density: 0.5, planted: None, seed };
    for pair in spec.split(',') {
        let (key, value) = pair.split_once('=').with_context(|| format!("bad synthetic spec item '{pair}'"))?;
        match key.trim() {
            "markets" => out.n_markets = value.parse()?,
            "currencies" => out.n_currencies = value.parse()?,
            "density" => out.density = value.parse()?,
            "plant" => out.planted = Some(parse_plant(value)?),
            other => bail!("unknown synthetic key '{other}'"),
        }
    }
    Ok(out)
}

impl InputArgs {
    fn quotes(&self) -> Result<Vec<Quote>> {
        match (&self.input, &self.synthetic) {
            (Some(path), None) => {
                let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
                let format: Format = self.format.parse()?;
                Ok(parse_snapshot(BufReader::new(file), format)?)
            }
            (None, Some(spec)) => Ok(gen_synthetic(&parse_synthetic(spec, self.seed)?)?),
            _ => bail!("exactly one of --input and --synthetic is required"),
        }
    }

    fn graph(&self) -> Result<ExchangeGraph> {
        let cfg = GraphConfig {
            epsilon_range: (self.epsilon_lo, self.epsilon_hi),
            transfer_epsilon: self.transfer_epsilon,
            seed: self.seed,
        };
        Ok(build_graph(&self.quotes()?, &cfg)?)
    }
}

impl SearchArgs {
    fn config(&self, method: Method, seed: u64) -> Result<PipelineConfig> {
        if self.weight_multiplier == 0 {
            bail!("weight multiplier must be >= 1");
        }
        Ok(PipelineConfig {
            weight_multiplier: self.weight_multiplier,
            method,
            min_length: if self.include_two_cycles { 2 } else { self.min_length as usize },
            sampler: SamplerConfig { seed, ..SamplerConfig::default() },
            brute_max_len: self.max_len,
            brute_node_cap: self.brute_cap,
        })
    }
}

fn emit<T: Serialize>(value: &T, output: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn summarize(report: &ProfitReport) {
    eprintln!("cycle: {}", report.path.join(" -> "));
    eprintln!("product {:.9}  profit {:+.6}%  {}", report.product, report.profit_pct, if report.is_profitable { "profitable" } else { "not profitable" });
    for step in &report.steps {
        eprintln!("  {step}");
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Ingest { input, output } => {
            let graph = input.graph()?;
            let stats = graph.stats();
            eprintln!("{} markets, {} currencies, {} nodes, {} edges", stats.n_markets, stats.n_currencies, stats.n_nodes, stats.n_edges);
            emit(&stats, output.as_ref())?;
        }
        Command::GenSynthetic(args) => {
            let spec = match &args.synthetic {
                Some(s) => parse_synthetic(s, args.seed)?,
                None => SyntheticSpec {
                    n_markets: args.markets,
                    n_currencies: args.currencies,
                    density: args.density,
                    planted: args.plant.as_deref().map(parse_plant).transpose()?,
                    seed: args.seed,
                },
            };
            let quotes = gen_synthetic(&spec)?;
            eprintln!("{} quotes", quotes.len());
            match &args.output {
                Some(path) => write_csv(&quotes, File::create(path).with_context(|| format!("cannot create {}", path.display()))?)?,
                None => write_csv(&quotes, io::stdout().lock())?,
            }
        }
        Command::TransformStats { input, c_values, output } => {
            let graph = input.graph()?;
            let rows = c_values.iter().map(|&c| uniqueness_stats(&graph, c)).collect::<arbcycle::Result<Vec<_>>>()?;
            for r in &rows {
                eprintln!("c={:<10} {:>6}/{:<6} {:>7.2}%  max weight {}", r.c, r.distinct_transformed, r.distinct_original, 100.0 * r.fraction, r.max_weight);
            }
            emit(&rows, output.as_ref())?;
        }
        Command::FindCycle { input, search, method, output } => {
            let graph = input.graph()?;
            let cfg = search.config(method.parse()?, input.seed)?;
            match arbcycle::find_cycle(&graph, &cfg)? {
                Some(report) => {
                    summarize(&report);
                    emit(&report, output.as_ref())?;
                }
                None => {
                    eprintln!("no cycle of length >= {} found", cfg.min_length);
                    return Ok(false);
                }
            }
        }
        Command::Compare { input, search, output } => {
            let graph = input.graph()?;
            let tgraph = transform(&graph, search.weight_multiplier)?;
            let mut results = serde_json::Map::new();
            let mut timings = serde_json::Map::new();
            let mut weights = Vec::new();
            for method in [Method::Triangle, Method::Floyd, Method::Brute] {
                if method == Method::Brute && graph.n() > search.brute_cap {
                    eprintln!("brute: skipped ({} nodes > cap {})", graph.n(), search.brute_cap);
                    continue;
                }
                let cfg = search.config(method, input.seed)?;
                let start = Instant::now();
                let report = report_for(&graph, &tgraph, &cfg)?;
                let ms = start.elapsed().as_secs_f64() * 1e3;
                let name = serde_json::to_value(method)?.as_str().unwrap_or_default().to_string();
                eprintln!("{name:<9} {:>12} {ms:>10.2} ms", report.as_ref().and_then(|r| r.sum_weight).map_or("none".into(), |w| w.to_string()));
                weights.push(report.as_ref().and_then(|r| r.sum_weight));
                results.insert(name.clone(), serde_json::to_value(&report)?);
                timings.insert(name, json!(ms));
            }
            let agree = weights.windows(2).all(|w| w[0] == w[1]);
            results.insert("agree".into(), json!(agree));
            results.insert("timings_ms".into(), serde_json::Value::Object(timings));
            emit(&results, output.as_ref())?;
            if !agree {
                bail!("methods disagree on the minimum weight");
            }
            if weights.iter().all(Option::is_none) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
