//! Witnesses for the distance product `C = D * D` and cycle reconstruction.
//!
//! Unique witnesses are recovered bit by bit: for each bit `l` the product
//! restricted to inner indices whose (1-based) index has bit `l` set agrees
//! with the full product exactly when some witness has that bit. Where the
//! witness is unique the assembled bits spell it out. The general matrix
//! comes from repeating this on random column subsets of shrinking size and
//! keeping only candidates that verify, with a linear scan for leftovers.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::apsp::{canonical_rotation, min_plus_over, sat_add, DistanceMatrix};
use crate::error::{Error, Result};
use crate::transform::TransformedGraph;
use crate::triangle::TriangleResult;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessMatrix {
    n: usize,
    entries: Vec<Option<usize>>,
}

impl WitnessMatrix {
    pub fn empty(n: usize) -> Self {
        WitnessMatrix { n, entries: vec![None; n * n] }
    }

    pub(crate) fn from_entries(n: usize, entries: Vec<Option<usize>>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        WitnessMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.entries[u * self.n + v]
    }

    fn set(&mut self, u: usize, v: usize, k: usize) {
        self.entries[u * self.n + v] = Some(k);
    }

    /// Checks `c[u][v] == d[u][w] + d[w][v]` on every finite entry of `c`.
    pub fn satisfies_identity(&self, d: &DistanceMatrix, c: &DistanceMatrix) -> bool {
        (0..self.n).all(|u| {
            (0..self.n).all(|v| {
                !c.is_finite(u, v) || self.get(u, v).is_some_and(|k| is_witness(d, c, u, v, k))
            })
        })
    }
}

#[inline]
fn is_witness(d: &DistanceMatrix, c: &DistanceMatrix, u: usize, v: usize, k: usize) -> bool {
    k < d.n() && c.is_finite(u, v) && sat_add(d.get(u, k), d.get(k, v)) == c.get(u, v)
}

fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Output of the bit-sliced unique witness pass over a column subset.
#[derive(Clone, Debug)]
pub struct UniqueWitnesses {
    /// Assembled candidates; only trustworthy where the witness was unique.
    pub candidates: WitnessMatrix,
    /// `D[*, cols] * D[cols, *]`.
    pub product: DistanceMatrix,
    pub columns: Vec<usize>,
}

impl UniqueWitnesses {
    /// Whether the candidate at `(u, v)` is a genuine witness of the
    /// restricted product.
    pub fn is_verified(&self, d: &DistanceMatrix, u: usize, v: usize) -> bool {
        self.candidates
            .get(u, v)
            .is_some_and(|k| self.columns.binary_search(&k).is_ok() && is_witness(d, &self.product, u, v, k))
    }

    /// Candidates that pass verification; all others are dropped.
    pub fn verified(&self, d: &DistanceMatrix) -> WitnessMatrix {
        let n = self.candidates.n();
        let mut w = WitnessMatrix::empty(n);
        for u in 0..n {
            for v in 0..n {
                if self.is_verified(d, u, v) {
                    w.set(u, v, self.candidates.get(u, v).unwrap());
                }
            }
        }
        w
    }
}

/// Bit-sliced unique witnesses of `D * D` restricted to `columns`.
pub fn unique_witnesses(d: &DistanceMatrix, columns: &[usize]) -> Result<UniqueWitnesses> {
    let n = d.n();
    if columns.is_empty() {
        return Err(Error::EmptyColumns);
    }
    let mut cols = columns.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if let Some(&k) = cols.iter().find(|&&k| k >= n) {
        return Err(Error::DimensionMismatch { left: n, right: k + 1 });
    }

    let (product, _) = min_plus_over(d, d, &cols, false);
    let mut bits = vec![0usize; n * n];
    for l in 0..=ceil_log2(n) {
        let slice: Vec<usize> = cols.iter().copied().filter(|&k| ((k + 1) >> l) & 1 == 1).collect();
        if slice.is_empty() {
            continue;
        }
        let (partial, _) = min_plus_over(d, d, &slice, false);
        for u in 0..n {
            for v in 0..n {
                if product.is_finite(u, v) && partial.get(u, v) == product.get(u, v) {
                    bits[u * n + v] |= 1 << l;
                }
            }
        }
    }
    let entries = bits.into_iter().map(|b| (b >= 1 && b <= n).then(|| b - 1)).collect();
    Ok(UniqueWitnesses { candidates: WitnessMatrix::from_entries(n, entries), product, columns: cols })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplerConfig {
    /// Subsets per round are `witness_constant * log2 n`.
    pub witness_constant: f64,
    /// Round `r` samples subsets of size `n / shrink^r`.
    pub shrink: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { witness_constant: 2.0, shrink: 2.0, seed: 0 }
    }
}

impl SamplerConfig {
    pub fn rounds(&self, n: usize) -> u32 {
        ceil_log2(n)
    }

    fn subsets_per_round(&self, n: usize) -> usize {
        (self.witness_constant * (n.max(2) as f64).log2()).ceil() as usize
    }
}

/// How entries of a witness matrix were resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WitnessStats {
    pub finite_entries: usize,
    pub from_unique: usize,
    pub from_sampling: usize,
    pub from_fallback: usize,
}

/// Witness matrix for `D * D`. Deterministic for a fixed seed.
pub fn witness_matrix(d: &DistanceMatrix, cfg: &SamplerConfig) -> Result<WitnessMatrix> {
    witness_matrix_with_stats(d, cfg).map(|(w, _)| w)
}

pub fn witness_matrix_with_stats(d: &DistanceMatrix, cfg: &SamplerConfig) -> Result<(WitnessMatrix, WitnessStats)> {
    if !(cfg.witness_constant >= 1.0) {
        return Err(Error::InvalidParameter(format!("witness constant {} must be >= 1", cfg.witness_constant)));
    }
    if !(cfg.shrink > 1.0) {
        return Err(Error::InvalidParameter(format!("subset shrink factor {} must exceed 1", cfg.shrink)));
    }
    let n = d.n();
    let all: Vec<usize> = (0..n).collect();
    let (c, _) = min_plus_over(d, d, &all, false);
    let mut w = WitnessMatrix::empty(n);
    let mut stats = WitnessStats::default();
    let mut pending: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| c.is_finite(u, v)).collect();
    stats.finite_entries = pending.len();
    if n == 0 {
        return Ok((w, stats));
    }

    let absorb = |w: &mut WitnessMatrix, pending: &mut Vec<(usize, usize)>, uw: &UniqueWitnesses| -> usize {
        let before = pending.len();
        pending.retain(|&(u, v)| match uw.candidates.get(u, v) {
            Some(k) if is_witness(d, &c, u, v, k) => {
                w.set(u, v, k);
                false
            }
            _ => true,
        });
        before - pending.len()
    };

    stats.from_unique = absorb(&mut w, &mut pending, &unique_witnesses(d, &all)?);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    'rounds: for r in 1..=cfg.rounds(n) {
        let size = ((n as f64 / cfg.shrink.powi(r as i32)).floor() as usize).clamp(1, n);
        for _ in 0..cfg.subsets_per_round(n) {
            if pending.is_empty() {
                break 'rounds;
            }
            let subset = sample(&mut rng, n, size).into_vec();
            stats.from_sampling += absorb(&mut w, &mut pending, &unique_witnesses(d, &subset)?);
        }
    }

    for &(u, v) in &pending {
        let k = (0..n).find(|&k| is_witness(d, &c, u, v, k)).expect("finite product entry has a witness");
        w.set(u, v, k);
    }
    stats.from_fallback = pending.len();
    Ok((w, stats))
}

/// Expands the triangle into the node sequence of its cycle. `dist` is the
/// exact distance matrix the triangle was found on and `w` a witness matrix
/// of the product of its hollow form (`dist` with infinite diagonal), so
/// every witness is an interior node of a shortest path.
pub fn reconstruct_cycle(
    tri: &TriangleResult,
    dist: &DistanceMatrix,
    w: &WitnessMatrix,
    graph: &TransformedGraph,
) -> Result<Vec<usize>> {
    let n = dist.n();
    if w.n() != n || graph.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: if w.n() != n { w.n() } else { graph.n() } });
    }
    let mut nodes = Vec::new();
    expand_leg(tri.v1, tri.vi, dist, w, graph, &mut nodes, 0)?;
    nodes.push(tri.vi);
    expand_leg(tri.vi1, tri.v1, dist, w, graph, &mut nodes, 0)?;
    if nodes.len() < 2 {
        return Err(Error::NotACycle(format!("triangle {tri:?} collapses to a single node")));
    }
    let weight = graph.cycle_weight(&nodes)?;
    if weight != tri.total {
        return Err(Error::NotACycle(format!("reconstructed weight {weight} differs from triangle total {}", tri.total)));
    }
    Ok(canonical_rotation(nodes))
}

/// Appends the nodes of the shortest path `a -> b`, excluding `b`.
fn expand_leg(
    a: usize,
    b: usize,
    dist: &DistanceMatrix,
    w: &WitnessMatrix,
    graph: &TransformedGraph,
    out: &mut Vec<usize>,
    depth: usize,
) -> Result<()> {
    if a == b {
        return Ok(());
    }
    if depth > dist.n() || !dist.is_finite(a, b) {
        return Err(Error::InconsistentWitness { from: a, to: b });
    }
    if graph.weight(a, b) == Some(dist.get(a, b)) {
        out.push(a);
        return Ok(());
    }
    let k = w.get(a, b).ok_or(Error::InconsistentWitness { from: a, to: b })?;
    if k == a || k == b || sat_add(dist.get(a, k), dist.get(k, b)) != dist.get(a, b) {
        return Err(Error::InconsistentWitness { from: a, to: b });
    }
    expand_leg(a, k, dist, w, graph, out, depth + 1)?;
    expand_leg(k, b, dist, w, graph, out, depth + 1)
}
