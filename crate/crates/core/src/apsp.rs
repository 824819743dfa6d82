//! Integer distance matrices, the min-plus (distance) product, all-pairs
//! shortest paths by repeated squaring, and two minimum cycle baselines.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::witness::WitnessMatrix;

/// Infinity sentinel. Three finite entries summed never overflow `u64`.
pub const INF: u64 = u64::MAX / 4;

#[inline]
pub fn sat_add(a: u64, b: u64) -> u64 {
    if a >= INF || b >= INF {
        INF
    } else {
        (a + b).min(INF)
    }
}

/// Dense row-major `n x n` matrix of nonnegative integers or [`INF`].
#[derive(Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for DistanceMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl DistanceMatrix {
    pub fn filled(n: usize, value: u64) -> Self {
        DistanceMatrix { n, data: vec![value.min(INF); n * n] }
    }

    /// Min-plus identity: zero diagonal, infinity elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::filled(n, INF);
        for i in 0..n {
            m.set(i, i, 0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { left: n, right: row.len() });
            }
            data.extend(row.into_iter().map(|x| x.min(INF)));
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Adjacency matrix for `edges` with the given diagonal value.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)], diagonal: u64) -> Self {
        let mut m = Self::filled(n, INF);
        for i in 0..n {
            m.set(i, i, diagonal);
        }
        for &(u, v, w) in edges {
            if u != v {
                m.set(u, v, w);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u64 {
        self.data[u * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: u64) {
        self.data[u * self.n + v] = value.min(INF);
    }

    #[inline]
    pub fn is_finite(&self, u: usize, v: usize) -> bool {
        self.get(u, v) < INF
    }

    pub fn row(&self, u: usize) -> &[u64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.n).map(|u| self.row(u).to_vec()).collect()
    }

    /// Copy with the diagonal set to infinity.
    pub fn hollow(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.set(i, i, INF);
        }
        m
    }

    /// Row-major text: first line `n`, then `n` lines of `n` entries with
    /// infinity spelled `inf`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for u in 0..self.n {
            let line: Vec<String> = self
                .row(u)
                .iter()
                .map(|&x| if x >= INF { "inf".to_string() } else { x.to_string() })
                .collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::MatrixText("missing dimension line".into()))?
            .parse()
            .map_err(|e| Error::MatrixText(format!("bad dimension: {e}")))?;
        let mut rows = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let row = line
                .split_whitespace()
                .map(|tok| match tok {
                    "inf" => Ok(INF),
                    _ => tok.parse::<u64>().map_err(|e| Error::MatrixText(format!("row {i}: {e}"))),
                })
                .collect::<Result<Vec<u64>>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::MatrixText(format!("expected {n} rows, found {}", rows.len())));
        }
        Self::from_rows(rows)
    }
}

/// Distance product `C[u][v] = min_k A[u][k] + B[k][v]`, optionally with the
/// smallest minimising `k` for each finite entry.
pub fn min_plus_product(
    a: &DistanceMatrix,
    b: &DistanceMatrix,
    capture_witnesses: bool,
) -> Result<(DistanceMatrix, Option<WitnessMatrix>)> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { left: a.n, right: b.n });
    }
    let all: Vec<usize> = (0..a.n).collect();
    Ok(min_plus_over(a, b, &all, capture_witnesses))
}

/// Distance product restricted to the inner indices `ks` (visited in the
/// given order; ties keep the first).
pub(crate) fn min_plus_over(
    a: &DistanceMatrix,
    b: &DistanceMatrix,
    ks: &[usize],
    capture_witnesses: bool,
) -> (DistanceMatrix, Option<WitnessMatrix>) {
    let n = a.n;
    let mut out = vec![INF; n * n];
    let mut wit = vec![None; if capture_witnesses { n * n } else { 0 }];
    if n > 0 {
        let rows: Vec<(usize, &mut [u64])> = out.chunks_mut(n).enumerate().collect();
        let computed: Vec<Vec<Option<usize>>> = rows
            .into_par_iter()
            .map(|(u, row)| {
                let mut row_wit = vec![None; if capture_witnesses { n } else { 0 }];
                for &k in ks {
                    let auk = a.get(u, k);
                    if auk >= INF {
                        continue;
                    }
                    let bk = b.row(k);
                    for v in 0..n {
                        let bkv = bk[v];
                        if bkv >= INF {
                            continue;
                        }
                        let cand = (auk + bkv).min(INF);
                        if cand < row[v] {
                            row[v] = cand;
                            if capture_witnesses {
                                row_wit[v] = Some(k);
                            }
                        }
                    }
                }
                row_wit
            })
            .collect();
        if capture_witnesses {
            for (u, row_wit) in computed.into_iter().enumerate() {
                wit[u * n..(u + 1) * n].copy_from_slice(&row_wit);
            }
        }
    }
    let c = DistanceMatrix { n, data: out };
    let w = capture_witnesses.then(|| WitnessMatrix::from_entries(n, wit));
    (c, w)
}

/// Exact all-pairs shortest distances by repeated min-plus squaring of an
/// adjacency matrix with zero diagonal.
pub fn apsp_by_squaring(adj: &DistanceMatrix) -> Result<DistanceMatrix> {
    for i in 0..adj.n {
        if adj.get(i, i) != 0 {
            return Err(Error::NonZeroDiagonal(i));
        }
    }
    let mut d = adj.clone();
    let mut hops = 1usize;
    while hops + 1 < adj.n {
        let (next, _) = min_plus_product(&d, &d, false)?;
        if next == d {
            break;
        }
        d = next;
        hops *= 2;
    }
    Ok(d)
}

/// A cycle found by one of the search methods. Nodes are listed once, in
/// traversal order, rotated to start at the smallest index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleReport {
    pub nodes: Vec<usize>,
    pub sum_weight: Option<u64>,
    pub product: Option<f64>,
    pub profit_pct: Option<f64>,
}

impl CycleReport {
    pub fn from_weight(nodes: Vec<usize>, sum_weight: u64) -> Self {
        CycleReport { nodes: canonical_rotation(nodes), sum_weight: Some(sum_weight), product: None, profit_pct: None }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn with_product(mut self, product: f64) -> Self {
        self.product = Some(product);
        self.profit_pct = Some((product - 1.0) * 100.0);
        self
    }

    /// True when no node repeats.
    pub fn is_simple(&self) -> bool {
        let mut seen = self.nodes.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

/// Lexicographically smallest rotation of a closed node sequence.
pub fn canonical_rotation(nodes: Vec<usize>) -> Vec<usize> {
    let len = nodes.len();
    (0..len)
        .map(|s| (0..len).map(|i| nodes[(s + i) % len]).collect::<Vec<_>>())
        .min()
        .unwrap_or(nodes)
}

pub(crate) fn check_min_length(min_length: usize) -> Result<()> {
    if min_length == 2 || min_length == 3 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("min_length must be 2 or 3, got {min_length}")))
    }
}

struct FloydWarshall {
    n: usize,
    dist: Vec<u64>,
    next: Vec<usize>,
}

impl FloydWarshall {
    /// Runs on the off-diagonal entries of `adj` with an infinite diagonal,
    /// so `dist[i][i]` ends up as the lightest closed walk through `i`.
    fn run(adj: &DistanceMatrix) -> Self {
        let n = adj.n;
        let mut dist = vec![INF; n * n];
        let mut next = vec![usize::MAX; n * n];
        for u in 0..n {
            for v in 0..n {
                if u != v && adj.is_finite(u, v) {
                    dist[u * n + v] = adj.get(u, v);
                    next[u * n + v] = v;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                if dik >= INF {
                    continue;
                }
                for j in 0..n {
                    let cand = sat_add(dik, dist[k * n + j]);
                    if cand < dist[i * n + j] {
                        dist[i * n + j] = cand;
                        next[i * n + j] = next[i * n + k];
                    }
                }
            }
        }
        FloydWarshall { n, dist, next }
    }

    fn dist(&self, u: usize, v: usize) -> u64 {
        self.dist[u * self.n + v]
    }

    /// Nodes of the shortest path `from -> to`, excluding `to`.
    fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut out = vec![from];
        let mut cur = self.next[from * self.n + to];
        while cur != to {
            out.push(cur);
            cur = self.next[cur * self.n + to];
        }
        out
    }
}

/// Floyd-Warshall minimum cycle baseline. With `min_length == 2` this is the
/// lightest `D[u][u]` after running with an infinite diagonal. With
/// `min_length == 3` the cycle is closed through a third node distinct from
/// both endpoints of one of its edges: `w(u,v) + d(v,x) + d(x,u)`.
pub fn floyd_warshall_min_cycle(adj: &DistanceMatrix, min_length: usize) -> Result<Option<CycleReport>> {
    check_min_length(min_length)?;
    let fw = FloydWarshall::run(adj);
    let n = fw.n;
    if min_length == 2 {
        let best = (0..n).filter(|&u| fw.dist(u, u) < INF).min_by_key(|&u| (fw.dist(u, u), u));
        return Ok(best.map(|u| {
            let first = fw.next[u * n + u];
            let mut nodes = vec![u];
            nodes.extend(fw.path(first, u));
            CycleReport::from_weight(nodes, fw.dist(u, u))
        }));
    }

    let mut best: Option<(u64, usize, usize, usize)> = None;
    for u in 0..n {
        for v in 0..n {
            if u == v || !adj.is_finite(u, v) {
                continue;
            }
            let w = adj.get(u, v);
            for x in 0..n {
                if x == u || x == v {
                    continue;
                }
                let total = sat_add(sat_add(w, fw.dist(v, x)), fw.dist(x, u));
                if total < INF && best.is_none_or(|b| total < b.0) {
                    best = Some((total, u, v, x));
                }
            }
        }
    }
    Ok(best.map(|(total, u, v, x)| {
        let mut nodes = vec![u];
        nodes.extend(fw.path(v, x));
        nodes.extend(fw.path(x, u));
        CycleReport::from_weight(nodes, total)
    }))
}

/// Minimum cycle weight as the lightest edge plus return path,
/// `min over (u,v) of w(u,v) + D[v][u]`, given exact distances `dist`.
/// With `min_length == 3` the return path must pass through a node other
/// than `u` and `v`.
pub fn karp_min_cycle_weight(
    dist: &DistanceMatrix,
    edges: &[(usize, usize, u64)],
    min_length: usize,
) -> Result<Option<u64>> {
    check_min_length(min_length)?;
    let n = dist.n();
    let mut best = INF;
    for &(u, v, w) in edges {
        if u >= n || v >= n {
            return Err(Error::DimensionMismatch { left: n, right: u.max(v) + 1 });
        }
        if u == v {
            continue;
        }
        let back = if min_length == 2 {
            dist.get(v, u)
        } else {
            (0..n)
                .filter(|&x| x != u && x != v)
                .map(|x| sat_add(dist.get(v, x), dist.get(x, u)))
                .min()
                .unwrap_or(INF)
        };
        best = best.min(sat_add(w, back));
    }
    Ok((best < INF).then_some(best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> DistanceMatrix {
        DistanceMatrix::from_edges(3, &[(0, 1, 1), (1, 2, 2), (2, 0, 3)], 0)
    }

    /// Exhaustive min over k, written independently of the kernel.
    fn naive_product(a: &DistanceMatrix, b: &DistanceMatrix) -> DistanceMatrix {
        let n = a.n();
        let mut c = DistanceMatrix::filled(n, INF);
        for u in 0..n {
            for v in 0..n {
                let best = (0..n).map(|k| sat_add(a.get(u, k), b.get(k, v))).min().unwrap_or(INF);
                c.set(u, v, best);
            }
        }
        c
    }

    #[test]
    fn identity_is_neutral() {
        let x = three_cycle();
        let (c, _) = min_plus_product(&DistanceMatrix::identity(3), &x, false).unwrap();
        assert_eq!(c, x);
        let (c, _) = min_plus_product(&x, &DistanceMatrix::identity(3), false).unwrap();
        assert_eq!(c, x);
    }

    #[test]
    fn square_of_three_cycle() {
        let a = three_cycle();
        let (c, w) = min_plus_product(&a, &a, true).unwrap();
        assert_eq!(c, naive_product(&a, &a));
        assert_eq!((c.get(0, 2), c.get(1, 0), c.get(2, 1)), (3, 5, 4));
        let w = w.unwrap();
        for u in 0..3 {
            for v in 0..3 {
                let k = w.get(u, v).unwrap();
                assert_eq!(c.get(u, v), a.get(u, k) + a.get(k, v));
            }
        }
    }

    #[test]
    fn identity_squared_unchanged_and_dimension_checked() {
        let id = DistanceMatrix::identity(4);
        assert_eq!(min_plus_product(&id, &id, false).unwrap().0, id);
        assert!(min_plus_product(&id, &DistanceMatrix::identity(3), false).is_err());
    }

    #[test]
    fn apsp_three_cycle() {
        let d = apsp_by_squaring(&three_cycle()).unwrap();
        let expected = DistanceMatrix::from_rows(vec![vec![0, 1, 3], vec![5, 0, 2], vec![3, 4, 0]]).unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn apsp_edge_cases() {
        let d = apsp_by_squaring(&DistanceMatrix::from_edges(2, &[(0, 1, 4)], 0)).unwrap();
        assert_eq!(d.get(1, 0), INF);
        assert_eq!(apsp_by_squaring(&DistanceMatrix::identity(1)).unwrap().to_rows(), vec![vec![0]]);
        assert!(matches!(
            apsp_by_squaring(&DistanceMatrix::filled(2, 3)),
            Err(Error::NonZeroDiagonal(0))
        ));
    }

    #[test]
    fn floyd_three_cycle() {
        for l in [2, 3] {
            let r = floyd_warshall_min_cycle(&three_cycle(), l).unwrap().unwrap();
            assert_eq!(r.sum_weight, Some(6));
            assert_eq!(r.nodes, vec![0, 1, 2]);
        }
    }

    #[test]
    fn floyd_two_cycle_excluded_at_length_three() {
        let adj = DistanceMatrix::from_edges(2, &[(0, 1, 5), (1, 0, 7)], INF);
        let r = floyd_warshall_min_cycle(&adj, 2).unwrap().unwrap();
        assert_eq!((r.sum_weight, r.nodes.clone()), (Some(12), vec![0, 1]));
        assert!(floyd_warshall_min_cycle(&adj, 3).unwrap().is_none());
        assert!(floyd_warshall_min_cycle(&adj, 4).is_err());
    }

    #[test]
    fn floyd_picks_lighter_of_disjoint_cycles() {
        let edges = [(0, 1, 5), (1, 2, 3), (2, 0, 2), (3, 4, 1), (4, 5, 2), (5, 3, 3)];
        let r = floyd_warshall_min_cycle(&DistanceMatrix::from_edges(6, &edges, INF), 3).unwrap().unwrap();
        assert_eq!((r.sum_weight, r.nodes), (Some(6), vec![3, 4, 5]));
    }

    #[test]
    fn floyd_acyclic_is_none() {
        let adj = DistanceMatrix::from_edges(3, &[(0, 1, 1), (1, 2, 1)], INF);
        assert!(floyd_warshall_min_cycle(&adj, 2).unwrap().is_none());
    }

    #[test]
    fn karp_examples() {
        let edges = [(0, 1, 1), (1, 2, 2), (2, 0, 3)];
        let d = apsp_by_squaring(&three_cycle()).unwrap();
        assert_eq!(karp_min_cycle_weight(&d, &edges, 2).unwrap(), Some(6));
        assert_eq!(karp_min_cycle_weight(&d, &edges, 3).unwrap(), Some(6));

        let two = [(0, 1, 5), (1, 0, 7)];
        let d = apsp_by_squaring(&DistanceMatrix::from_edges(2, &two, 0)).unwrap();
        assert_eq!(karp_min_cycle_weight(&d, &two, 2).unwrap(), Some(12));
        assert_eq!(karp_min_cycle_weight(&d, &two, 3).unwrap(), None);
    }

    #[test]
    fn text_round_trip() {
        let m = DistanceMatrix::from_rows(vec![vec![0, INF], vec![7, 0]]).unwrap();
        let text = m.to_text();
        assert_eq!(text, "2\n0 inf\n7 0\n");
        assert_eq!(DistanceMatrix::from_text(&text).unwrap(), m);
        assert!(DistanceMatrix::from_text("2\n0 1\n").is_err());
    }

    #[test]
    fn rotation_is_canonical() {
        assert_eq!(canonical_rotation(vec![2, 0, 1]), vec![0, 1, 2]);
        assert_eq!(canonical_rotation(vec![1, 0, 2, 0]), vec![0, 1, 0, 2]);
    }
}
