//! Profit evaluation of cycles against original rates, and an exhaustive
//! simple-cycle enumerator used as an independent oracle.

use serde::Serialize;

use crate::apsp::{check_min_length, CycleReport};
use crate::error::{Error, Result};
use crate::snapshot::ExchangeGraph;
use crate::transform::{cyclic_pairs, TransformedGraph};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfitReport {
    #[serde(skip)]
    pub cycle: CycleReport,
    /// Closed path of `market/currency` labels; the start is repeated at the end.
    pub path: Vec<String>,
    pub product: f64,
    pub profit_pct: f64,
    pub is_profitable: bool,
    pub sum_weight: Option<u64>,
    /// One human-readable trade per hop.
    pub steps: Vec<String>,
}

impl ProfitReport {
    pub fn with_sum_weight(mut self, sum_weight: u64) -> Self {
        self.sum_weight = Some(sum_weight);
        self.cycle.sum_weight = Some(sum_weight);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Multiplies the original rates along `nodes` (traversal order, closing
/// back to the first node) and renders the trades.
pub fn evaluate_cycle(nodes: &[usize], graph: &ExchangeGraph) -> Result<ProfitReport> {
    if let Some(&bad) = nodes.iter().find(|&&u| u >= graph.n()) {
        return Err(Error::NotACycle(format!("node {bad} out of range")));
    }
    let mut product = 1.0;
    let mut steps = Vec::with_capacity(nodes.len());
    for (a, b) in cyclic_pairs(nodes)? {
        let rate = graph.rate(a, b).ok_or(Error::MissingEdge { from: a, to: b })?;
        product *= rate;
        let (from, to) = (graph.node(a), graph.node(b));
        steps.push(if from.market == to.market {
            format!("Buy {} in {}, using {}", to.currency, to.market, from.currency)
        } else {
            format!(
                "Sell {} in {} and buy {} in {} via a common base currency",
                from.currency, from.market, to.currency, to.market
            )
        });
    }
    let mut path: Vec<String> = nodes.iter().map(|&u| graph.node(u).label()).collect();
    path.push(graph.node(nodes[0]).label());
    let cycle = CycleReport { nodes: nodes.to_vec(), sum_weight: None, product: None, profit_pct: None }.with_product(product);
    Ok(ProfitReport {
        path,
        product,
        profit_pct: (product - 1.0) * 100.0,
        is_profitable: product > 1.0,
        sum_weight: None,
        steps,
        cycle,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    MaxProduct,
    MinSum,
}

#[derive(Clone, Copy, Debug)]
pub enum BruteSource<'a> {
    Exchange(&'a ExchangeGraph),
    Transformed(&'a TransformedGraph),
}

pub const MAX_BRUTE_LEN: usize = 9;
pub const DEFAULT_NODE_CAP: usize = 64;

/// Enumerates every simple cycle with length in `[min_length, max_len]`
/// (each once, from its smallest node) and returns the optimum, ties broken
/// lexicographically on the node sequence.
pub fn brute_force_best_cycle(
    source: BruteSource<'_>,
    max_len: usize,
    objective: Objective,
    min_length: usize,
) -> Result<Option<CycleReport>> {
    brute_force_best_cycle_capped(source, max_len, objective, min_length, DEFAULT_NODE_CAP)
}

pub fn brute_force_best_cycle_capped(
    source: BruteSource<'_>,
    max_len: usize,
    objective: Objective,
    min_length: usize,
    node_cap: usize,
) -> Result<Option<CycleReport>> {
    check_min_length(min_length)?;
    if !(2..=MAX_BRUTE_LEN).contains(&max_len) {
        return Err(Error::InvalidParameter(format!("max_len must be in 2..={MAX_BRUTE_LEN}, got {max_len}")));
    }
    enumerate(source, min_length, max_len, objective, node_cap)
}

/// Best simple cycle of exactly `length` edges.
pub fn brute_force_stratum(source: BruteSource<'_>, length: usize, objective: Objective) -> Result<Option<CycleReport>> {
    if !(2..=MAX_BRUTE_LEN).contains(&length) {
        return Err(Error::InvalidParameter(format!("length must be in 2..={MAX_BRUTE_LEN}, got {length}")));
    }
    enumerate(source, length, length, objective, DEFAULT_NODE_CAP)
}

fn enumerate(
    source: BruteSource<'_>,
    min_length: usize,
    max_len: usize,
    objective: Objective,
    node_cap: usize,
) -> Result<Option<CycleReport>> {
    let n = match source {
        BruteSource::Exchange(g) => g.n(),
        BruteSource::Transformed(g) => g.n(),
    };
    if n > node_cap {
        return Err(Error::TooLarge { n, cap: node_cap });
    }

    let mut adj: Vec<Vec<Arc>> = vec![Vec::new(); n];
    match source {
        BruteSource::Exchange(g) => {
            if objective == Objective::MinSum {
                return Err(Error::InvalidParameter("min-sum enumeration needs integer weights".into()));
            }
            for e in g.edges() {
                adj[e.from].push((e.to, None, Some(e.rate)));
            }
        }
        BruteSource::Transformed(g) => {
            for e in g.edges() {
                let rate = g.rate(e.from, e.to);
                if objective == Objective::MaxProduct && rate.is_none() {
                    return Err(Error::InvalidParameter("max-product enumeration needs rates".into()));
                }
                adj[e.from].push((e.to, Some(e.weight), rate));
            }
        }
    }
    for list in &mut adj {
        list.sort_by_key(|&(v, _, _)| v);
    }

    let mut search = Search { adj: &adj, objective, min_length, max_len, best: None, path: Vec::new(), on_path: vec![false; n] };
    for start in 0..n {
        search.path.push(start);
        search.on_path[start] = true;
        search.extend(start, 0, 1.0);
        search.on_path[start] = false;
        search.path.pop();
    }
    Ok(search.best.map(|b| {
        let report = CycleReport { nodes: b.nodes, sum_weight: b.sum, product: None, profit_pct: None };
        match b.product {
            Some(p) => report.with_product(p),
            None => report,
        }
    }))
}

/// Target, integer weight and rate of an outgoing edge.
type Arc = (usize, Option<u64>, Option<f64>);

struct Best {
    nodes: Vec<usize>,
    sum: Option<u64>,
    product: Option<f64>,
}

struct Search<'a> {
    adj: &'a [Vec<Arc>],
    objective: Objective,
    min_length: usize,
    max_len: usize,
    best: Option<Best>,
    path: Vec<usize>,
    on_path: Vec<bool>,
}

impl Search<'_> {
    fn better(&self, sum: Option<u64>, product: Option<f64>) -> bool {
        let Some(best) = &self.best else { return true };
        match self.objective {
            Objective::MinSum => sum.unwrap() < best.sum.unwrap(),
            Objective::MaxProduct => product.unwrap() > best.product.unwrap(),
        }
    }

    fn extend(&mut self, u: usize, sum: u64, product: f64) {
        let start = self.path[0];
        if self.objective == Objective::MinSum {
            if let Some(best) = &self.best {
                if sum >= best.sum.unwrap() {
                    return;
                }
            }
        }
        for i in 0..self.adj[u].len() {
            let (v, w, r) = self.adj[u][i];
            let next_sum = w.map(|w| sum + w);
            let next_product = r.map(|r| product * r);
            if v == start {
                if self.path.len() >= self.min_length && self.better(next_sum, next_product) {
                    self.best = Some(Best { nodes: self.path.clone(), sum: next_sum, product: next_product });
                }
            } else if v > start && !self.on_path[v] && self.path.len() < self.max_len {
                self.path.push(v);
                self.on_path[v] = true;
                self.extend(v, next_sum.unwrap_or(0), next_product.unwrap_or(1.0));
                self.on_path[v] = false;
                self.path.pop();
            }
        }
    }
}
