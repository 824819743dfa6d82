//! Minimum weight cycle as a minimum weight triangle.
//!
//! The tripartite graph has three copies of the node set. A triangle
//! `v1 - vi - vi1` uses a distance edge `v1 -> vi` (V1 to V2), an original
//! edge `vi -> vi1` (V2 to V3, the critical edge) and a distance edge
//! `vi1 -> v1` (V3 to V1), so every triangle is a closed walk of the
//! original graph and the lightest one is its minimum weight cycle.

use rayon::prelude::*;
use serde::Serialize;

use crate::apsp::{DistanceMatrix, INF};
use crate::error::{Error, Result};
use crate::transform::TransformedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriEdge {
    pub from: usize,
    pub to: usize,
    pub weight: u64,
}

#[derive(Clone, Debug)]
pub struct TripartiteGraph {
    n: usize,
    include_two_cycles: bool,
    /// `u2 -> v3` for every original edge.
    e23: Vec<TriEdge>,
    /// `u1 -> v2` weighted `D[u][v]`.
    e12: Vec<TriEdge>,
    /// `u3 -> v1` weighted `D[u][v]`.
    e31: Vec<TriEdge>,
    w12: Vec<u64>,
    w31: Vec<u64>,
}

impl TripartiteGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        3 * self.n
    }

    pub fn include_two_cycles(&self) -> bool {
        self.include_two_cycles
    }

    pub fn e12(&self) -> &[TriEdge] {
        &self.e12
    }

    pub fn e23(&self) -> &[TriEdge] {
        &self.e23
    }

    pub fn e31(&self) -> &[TriEdge] {
        &self.e31
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TriangleResult {
    pub v1: usize,
    pub vi: usize,
    pub vi1: usize,
    pub total: u64,
}

/// Builds the tripartite graph from an integer graph and its distance
/// matrix. Self pairs `u == v` get distance edges only when
/// `include_two_cycles` is set.
pub fn build_tripartite(tgraph: &TransformedGraph, dist: &DistanceMatrix, include_two_cycles: bool) -> Result<TripartiteGraph> {
    let edges: Vec<(usize, usize, u64)> = tgraph.edges().iter().map(|e| (e.from, e.to, e.weight)).collect();
    build_tripartite_from_edges(tgraph.n(), &edges, dist, include_two_cycles)
}

pub fn build_tripartite_from_edges(
    n: usize,
    edges: &[(usize, usize, u64)],
    dist: &DistanceMatrix,
    include_two_cycles: bool,
) -> Result<TripartiteGraph> {
    if dist.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: dist.n() });
    }
    let e23 = edges
        .iter()
        .map(|&(from, to, weight)| {
            if from >= n || to >= n {
                Err(Error::DimensionMismatch { left: n, right: from.max(to) + 1 })
            } else {
                Ok(TriEdge { from, to, weight })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut e12 = Vec::new();
    let mut w12 = vec![INF; n * n];
    let mut w31 = vec![INF; n * n];
    for u in 0..n {
        for v in 0..n {
            if dist.is_finite(u, v) && (u != v || include_two_cycles) {
                e12.push(TriEdge { from: u, to: v, weight: dist.get(u, v) });
                w12[u * n + v] = dist.get(u, v);
                w31[u * n + v] = dist.get(u, v);
            }
        }
    }
    let e31 = e12.clone();
    Ok(TripartiteGraph { n, include_two_cycles, e23, e12, e31, w12, w31 })
}

/// Scans every `(v1, critical edge)` combination and returns the lightest
/// triangle, ties broken by `(v1, vi, vi1)` ascending.
pub fn min_triangle(tri: &TripartiteGraph) -> Option<TriangleResult> {
    let n = tri.n;
    (0..n)
        .into_par_iter()
        .filter_map(|v1| {
            let mut best: Option<TriangleResult> = None;
            for e in &tri.e23 {
                let leg1 = tri.w12[v1 * n + e.from];
                let leg2 = tri.w31[e.to * n + v1];
                if leg1 >= INF || leg2 >= INF {
                    continue;
                }
                let total = leg1 + e.weight + leg2;
                let cand = TriangleResult { v1, vi: e.from, vi1: e.to, total };
                if best.is_none_or(|b| key(&cand) < key(&b)) {
                    best = Some(cand);
                }
            }
            best
        })
        .min_by_key(key)
}

fn key(t: &TriangleResult) -> (u64, usize, usize, usize) {
    (t.total, t.v1, t.vi, t.vi1)
}
