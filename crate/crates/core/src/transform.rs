//! Rate-to-integer weight transformation.
//!
//! Maximising a product of rates becomes minimising a sum of positive
//! integers: take reciprocals, rescale so the smallest reciprocal is 1, take
//! the natural log, multiply by the weight multiplier `c` and round up
//! (clamped to at least 1).

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::apsp::{DistanceMatrix, INF};
use crate::error::{Error, Result};
use crate::snapshot::ExchangeGraph;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransformParams {
    /// Weight multiplier.
    pub c: u64,
    /// Scale factor, `1 / min_w1`.
    pub k: f64,
    /// Smallest reciprocal rate.
    pub min_w1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntEdge {
    pub from: usize,
    pub to: usize,
    pub weight: u64,
}

#[derive(Clone, Debug)]
pub struct TransformedGraph {
    n: usize,
    edges: Vec<IntEdge>,
    log_weights: Vec<f64>,
    params: TransformParams,
    rate_lookup: HashMap<(usize, usize), f64>,
    index: HashMap<(usize, usize), usize>,
    max_weight: u64,
}

impl TransformedGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[IntEdge] {
        &self.edges
    }

    pub fn params(&self) -> TransformParams {
        self.params
    }

    /// Integer digraph without rates, for running the cycle kernels on
    /// arbitrary weights.
    pub fn from_weights(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(edges.len());
        let mut out = Vec::with_capacity(edges.len());
        for &(from, to, weight) in edges {
            if from >= n || to >= n || from == to {
                return Err(Error::InvalidParameter(format!("edge {from}->{to} invalid for {n} nodes")));
            }
            if index.insert((from, to), out.len()).is_some() {
                return Err(Error::InvalidParameter(format!("parallel edge {from}->{to}")));
            }
            out.push(IntEdge { from, to, weight });
        }
        let max_weight = out.iter().map(|e| e.weight).max().unwrap_or(0);
        Ok(TransformedGraph {
            n,
            log_weights: vec![0.0; out.len()],
            edges: out,
            params: TransformParams { c: 1, k: 1.0, min_w1: 1.0 },
            rate_lookup: HashMap::new(),
            index,
            max_weight,
        })
    }

    pub fn int_edges(&self) -> Vec<(usize, usize, u64)> {
        self.edges.iter().map(|e| (e.from, e.to, e.weight)).collect()
    }

    /// Largest integer weight `M` (0 for an edgeless graph).
    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    pub fn weight(&self, from: usize, to: usize) -> Option<u64> {
        self.index.get(&(from, to)).map(|&i| self.edges[i].weight)
    }

    /// The pre-rounding log weight `ln(k / rate)` of an edge.
    pub fn log_weight(&self, from: usize, to: usize) -> Option<f64> {
        self.index.get(&(from, to)).map(|&i| self.log_weights[i])
    }

    pub fn rate(&self, from: usize, to: usize) -> Option<f64> {
        self.rate_lookup.get(&(from, to)).copied()
    }

    /// Adjacency matrix with zero diagonal (input for shortest paths).
    pub fn adjacency(&self) -> DistanceMatrix {
        let mut m = DistanceMatrix::identity(self.n);
        for e in &self.edges {
            m.set(e.from, e.to, e.weight);
        }
        m
    }

    /// Adjacency matrix with an infinite diagonal (Floyd-Warshall cycle baseline).
    pub fn adjacency_hollow(&self) -> DistanceMatrix {
        let mut m = DistanceMatrix::filled(self.n, INF);
        for e in &self.edges {
            m.set(e.from, e.to, e.weight);
        }
        m
    }

    /// Sum of transformed weights around a closed node sequence.
    pub fn cycle_weight(&self, nodes: &[usize]) -> Result<u64> {
        cyclic_pairs(nodes)?
            .map(|(a, b)| self.weight(a, b).ok_or(Error::MissingEdge { from: a, to: b }))
            .sum()
    }
}

pub(crate) fn cyclic_pairs(nodes: &[usize]) -> Result<impl Iterator<Item = (usize, usize)> + '_> {
    if nodes.len() < 2 {
        return Err(Error::NotACycle(format!("a cycle needs at least two edges, got {} node(s)", nodes.len())));
    }
    Ok((0..nodes.len()).map(move |i| (nodes[i], nodes[(i + 1) % nodes.len()])))
}

pub fn transform(graph: &ExchangeGraph, c: u64) -> Result<TransformedGraph> {
    if c == 0 {
        return Err(Error::InvalidParameter("weight multiplier must be >= 1".into()));
    }
    for e in graph.edges() {
        if !(e.rate > 0.0) || !e.rate.is_finite() {
            return Err(Error::NonPositiveRate { from: e.from, to: e.to, rate: e.rate });
        }
    }
    let n = graph.n();
    let reciprocal: Vec<f64> = graph.edges().iter().map(|e| 1.0 / e.rate).collect();
    let min_w1 = reciprocal.iter().copied().reduce(f64::min).unwrap_or(1.0);
    let k = 1.0 / min_w1;
    let log_weights: Vec<f64> = reciprocal.iter().map(|w1| (k * w1).ln().max(0.0)).collect();

    let limit = (INF / (3 * n.max(1) as u64)) as f64;
    let scaled_max = log_weights.iter().fold(0.0f64, |acc, w| acc.max((c as f64 * w).ceil()));
    if scaled_max > limit {
        return Err(Error::WeightOverflow { max_weight: scaled_max, n });
    }

    let mut edges = Vec::with_capacity(graph.edges().len());
    let mut rate_lookup = HashMap::with_capacity(graph.edges().len());
    let mut index = HashMap::with_capacity(graph.edges().len());
    for (i, (e, w3)) in graph.edges().iter().zip(&log_weights).enumerate() {
        let weight = ((c as f64 * w3).ceil() as u64).max(1);
        edges.push(IntEdge { from: e.from, to: e.to, weight });
        rate_lookup.insert((e.from, e.to), e.rate);
        index.insert((e.from, e.to), i);
    }
    let max_weight = edges.iter().map(|e| e.weight).max().unwrap_or(0);
    Ok(TransformedGraph {
        n,
        edges,
        log_weights,
        params: TransformParams { c, k, min_w1 },
        rate_lookup,
        index,
        max_weight,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessStats {
    pub c: u64,
    pub total_edges: usize,
    pub distinct_original: usize,
    pub distinct_transformed: usize,
    pub fraction: f64,
    pub max_weight: u64,
}

pub fn uniqueness_stats(graph: &ExchangeGraph, c: u64) -> Result<UniquenessStats> {
    let tgraph = transform(graph, c)?;
    let distinct_original: HashSet<u64> = graph.edges().iter().map(|e| e.rate.to_bits()).collect();
    let distinct_transformed: HashSet<u64> = tgraph.edges().iter().map(|e| e.weight).collect();
    let fraction = if distinct_original.is_empty() {
        1.0
    } else {
        distinct_transformed.len() as f64 / distinct_original.len() as f64
    };
    Ok(UniquenessStats {
        c,
        total_edges: graph.edges().len(),
        distinct_original: distinct_original.len(),
        distinct_transformed: distinct_transformed.len(),
        fraction,
        max_weight: tgraph.max_weight(),
    })
}

/// Looks up the original rates along a cycle and multiplies them.
pub fn backmap_cycle(nodes: &[usize], tgraph: &TransformedGraph) -> Result<(Vec<f64>, f64)> {
    let rates = cyclic_pairs(nodes)?
        .map(|(a, b)| tgraph.rate(a, b).ok_or(Error::MissingEdge { from: a, to: b }))
        .collect::<Result<Vec<f64>>>()?;
    let product = rates.iter().product();
    Ok((rates, product))
}
