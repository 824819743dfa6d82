//! End-to-end search: transform, find the minimum weight cycle with the
//! chosen method, and evaluate it against the original rates.

use serde::Serialize;

use crate::apsp::{apsp_by_squaring, floyd_warshall_min_cycle, CycleReport};
use crate::error::{Error, Result};
use crate::evaluate::{brute_force_best_cycle_capped, evaluate_cycle, BruteSource, Objective, ProfitReport, DEFAULT_NODE_CAP, MAX_BRUTE_LEN};
use crate::snapshot::ExchangeGraph;
use crate::transform::{transform, TransformedGraph};
use crate::triangle::{build_tripartite, min_triangle};
use crate::witness::{reconstruct_cycle, witness_matrix, SamplerConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Triangle,
    Floyd,
    Brute,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangle" => Ok(Method::Triangle),
            "floyd" => Ok(Method::Floyd),
            "brute" => Ok(Method::Brute),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    pub weight_multiplier: u64,
    pub method: Method,
    pub min_length: usize,
    pub sampler: SamplerConfig,
    pub brute_max_len: usize,
    pub brute_node_cap: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            weight_multiplier: 10_000_000,
            method: Method::Triangle,
            min_length: 3,
            sampler: SamplerConfig::default(),
            brute_max_len: MAX_BRUTE_LEN,
            brute_node_cap: DEFAULT_NODE_CAP,
        }
    }
}

/// Minimum weight cycle of an integer graph by the selected method.
pub fn min_cycle(tgraph: &TransformedGraph, cfg: &PipelineConfig) -> Result<Option<CycleReport>> {
    match cfg.method {
        Method::Triangle => {
            let dist = apsp_by_squaring(&tgraph.adjacency())?;
            let tri = build_tripartite(tgraph, &dist, cfg.min_length == 2)?;
            let Some(best) = min_triangle(&tri) else { return Ok(None) };
            let w = witness_matrix(&dist.hollow(), &cfg.sampler)?;
            let nodes = reconstruct_cycle(&best, &dist, &w, tgraph)?;
            Ok(Some(CycleReport::from_weight(nodes, best.total)))
        }
        Method::Floyd => floyd_warshall_min_cycle(&tgraph.adjacency_hollow(), cfg.min_length),
        Method::Brute => brute_force_best_cycle_capped(
            BruteSource::Transformed(tgraph),
            cfg.brute_max_len,
            Objective::MinSum,
            cfg.min_length,
            cfg.brute_node_cap,
        ),
    }
}

/// Runs transform, cycle search and evaluation on an exchange graph.
pub fn find_cycle(graph: &ExchangeGraph, cfg: &PipelineConfig) -> Result<Option<ProfitReport>> {
    let tgraph = transform(graph, cfg.weight_multiplier)?;
    report_for(graph, &tgraph, cfg)
}

pub fn report_for(graph: &ExchangeGraph, tgraph: &TransformedGraph, cfg: &PipelineConfig) -> Result<Option<ProfitReport>> {
    let Some(cycle) = min_cycle(tgraph, cfg)? else { return Ok(None) };
    let report = evaluate_cycle(&cycle.nodes, graph)?;
    Ok(Some(match cycle.sum_weight {
        Some(s) => report.with_sum_weight(s),
        None => report,
    }))
}
