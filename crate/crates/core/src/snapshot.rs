//! Market snapshots: quote ingestion, exchange graph construction and a
//! seeded synthetic snapshot generator.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One ask price: `ask` units of `quote` per unit of `base` at `market`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub market: String,
    pub base: String,
    pub quote: String,
    pub ask: f64,
}

impl Quote {
    pub fn new(market: &str, base: &str, quote: &str, ask: f64) -> Self {
        Quote { market: market.to_string(), base: base.to_string(), quote: quote.to_string(), ask }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown snapshot format '{other}'"))),
        }
    }
}

#[derive(Deserialize)]
struct RawQuote {
    market: String,
    base: String,
    quote: String,
    ask: f64,
}

/// Parses a snapshot in CSV (`market,base,quote,ask` header) or JSON (array
/// of objects with the same keys). Extra CSV columns are ignored.
pub fn parse_snapshot<R: Read>(input: R, format: Format) -> Result<Vec<Quote>> {
    let raw: Vec<(String, RawQuote)> = match format {
        Format::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .flexible(true)
                .from_reader(input);
            let mut out = Vec::new();
            for record in reader.deserialize::<RawQuote>() {
                match record {
                    Ok(q) => {
                        let line = out.len() + 2;
                        out.push((format!("line {line}"), q));
                    }
                    Err(e) => {
                        let position = e
                            .position()
                            .map(|p| format!("line {}", p.line()))
                            .unwrap_or_else(|| "unknown position".to_string());
                        return Err(Error::Malformed { position, message: e.to_string() });
                    }
                }
            }
            out
        }
        Format::Json => {
            let records: Vec<RawQuote> = serde_json::from_reader(input).map_err(|e| Error::Malformed {
                position: format!("line {} column {}", e.line(), e.column()),
                message: e.to_string(),
            })?;
            records.into_iter().enumerate().map(|(i, q)| (format!("record {i}"), q)).collect()
        }
    };

    let mut seen = HashSet::new();
    let mut quotes = Vec::with_capacity(raw.len());
    for (position, q) in raw {
        if !(q.ask > 0.0) || !q.ask.is_finite() {
            return Err(Error::NonPositiveAsk { position, ask: q.ask });
        }
        if q.base == q.quote {
            return Err(Error::SameCurrency { position, currency: q.base });
        }
        if !seen.insert((q.market.clone(), q.base.clone(), q.quote.clone())) {
            return Err(Error::DuplicateQuote { market: q.market, base: q.base, quote: q.quote });
        }
        quotes.push(Quote { market: q.market, base: q.base, quote: q.quote, ask: q.ask });
    }
    Ok(quotes)
}

/// Writes quotes in the CSV snapshot format.
pub fn write_csv<W: std::io::Write>(quotes: &[Quote], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for q in quotes {
        writer
            .serialize(q)
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    }
    writer.flush()?;
    Ok(())
}

/// A (market, currency) node of the exchange graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NodeId {
    pub index: usize,
    pub market: String,
    pub currency: String,
}

impl NodeId {
    pub fn label(&self) -> String {
        format!("{}/{}", self.market, self.currency)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeKind {
    /// Taken directly from a quote.
    Quoted,
    /// Synthetic spread-adjusted reverse of a quoted edge.
    Reverse,
    /// Same currency moved between two markets.
    Transfer,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
    pub kind: EdgeKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphConfig {
    pub epsilon_range: (f64, f64),
    pub transfer_epsilon: f64,
    pub seed: u64,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig { epsilon_range: (0.99999, 0.999999), transfer_epsilon: 0.9999, seed: 0 }
    }
}

impl GraphConfig {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.epsilon_range;
        if !(lo > 0.0 && lo <= hi && hi < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon range [{lo}, {hi}] must lie in (0, 1)")));
        }
        if !(self.transfer_epsilon > 0.0 && self.transfer_epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "transfer epsilon {} must lie in (0, 1)",
                self.transfer_epsilon
            )));
        }
        Ok(())
    }
}

/// Directed simple graph over (market, currency) nodes with positive rates.
#[derive(Clone, Debug)]
pub struct ExchangeGraph {
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    index: HashMap<(usize, usize), usize>,
    /// Spread assigned to each market-internal quoted/reverse pair, keyed by
    /// both directed edges. Equals the exact product of the two rates.
    epsilon: HashMap<(usize, usize), f64>,
}

impl ExchangeGraph {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &NodeId {
        &self.nodes[i]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, from: usize, to: usize) -> Option<&Edge> {
        self.index.get(&(from, to)).map(|&i| &self.edges[i])
    }

    pub fn rate(&self, from: usize, to: usize) -> Option<f64> {
        self.edge(from, to).map(|e| e.rate)
    }

    /// The spread of the market-internal pair containing edge `from -> to`.
    pub fn epsilon(&self, from: usize, to: usize) -> Option<f64> {
        self.epsilon.get(&(from, to)).copied()
    }

    pub fn find_node(&self, market: &str, currency: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.market == market && n.currency == currency)
    }

    /// Builds a graph directly from explicit edges, bypassing quote semantics.
    /// Mostly useful for tests and bindings.
    pub fn from_edges(nodes: Vec<NodeId>, edges: Vec<Edge>) -> Result<Self> {
        let mut graph = ExchangeGraph { nodes, edges: Vec::new(), index: HashMap::new(), epsilon: HashMap::new() };
        for e in edges {
            graph.push(e)?;
        }
        Ok(graph)
    }

    fn push(&mut self, e: Edge) -> Result<()> {
        let n = self.nodes.len();
        if e.from >= n || e.to >= n || e.from == e.to {
            return Err(Error::InvalidParameter(format!("edge {}->{} invalid for {n} nodes", e.from, e.to)));
        }
        if !(e.rate > 0.0) || !e.rate.is_finite() {
            return Err(Error::NonPositiveRate { from: e.from, to: e.to, rate: e.rate });
        }
        if self.index.contains_key(&(e.from, e.to)) {
            return Err(Error::InvalidParameter(format!("parallel edge {}->{}", e.from, e.to)));
        }
        self.index.insert((e.from, e.to), self.edges.len());
        self.edges.push(e);
        Ok(())
    }

    pub fn stats(&self) -> SnapshotStats {
        let markets: HashSet<&str> = self.nodes.iter().map(|n| n.market.as_str()).collect();
        let currencies: HashSet<&str> = self.nodes.iter().map(|n| n.currency.as_str()).collect();
        let rates = self.edges.iter().map(|e| e.rate);
        SnapshotStats {
            n_markets: markets.len(),
            n_currencies: currencies.len(),
            n_nodes: self.nodes.len(),
            n_edges: self.edges.len(),
            min_rate: rates.clone().reduce(f64::min),
            max_rate: rates.reduce(f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnapshotStats {
    pub n_markets: usize,
    pub n_currencies: usize,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub min_rate: Option<f64>,
    pub max_rate: Option<f64>,
}

/// Builds the exchange graph: a forward edge per quote, a reverse edge with
/// rate `eps / ask` unless the opposite direction is itself quoted, and
/// transfer edges between every pair of markets listing the same currency.
pub fn build_graph(quotes: &[Quote], cfg: &GraphConfig) -> Result<ExchangeGraph> {
    cfg.validate()?;
    let mut graph = ExchangeGraph { nodes: Vec::new(), edges: Vec::new(), index: HashMap::new(), epsilon: HashMap::new() };
    let mut lookup: HashMap<(String, String), usize> = HashMap::new();
    let mut node_of = |graph: &mut ExchangeGraph, market: &str, currency: &str| -> usize {
        *lookup.entry((market.to_string(), currency.to_string())).or_insert_with(|| {
            let index = graph.nodes.len();
            graph.nodes.push(NodeId { index, market: market.to_string(), currency: currency.to_string() });
            index
        })
    };

    let mut quoted = HashSet::new();
    for q in quotes {
        if !(q.ask > 0.0) || !q.ask.is_finite() {
            return Err(Error::NonPositiveAsk { position: format!("{}/{}->{}", q.market, q.base, q.quote), ask: q.ask });
        }
        if q.base == q.quote {
            return Err(Error::SameCurrency { position: q.market.clone(), currency: q.base.clone() });
        }
        if !quoted.insert((q.market.as_str(), q.base.as_str(), q.quote.as_str())) {
            return Err(Error::DuplicateQuote { market: q.market.clone(), base: q.base.clone(), quote: q.quote.clone() });
        }
    }

    let (lo, hi) = cfg.epsilon_range;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for q in quotes {
        let from = node_of(&mut graph, &q.market, &q.base);
        let to = node_of(&mut graph, &q.market, &q.quote);
        graph.push(Edge { from, to, rate: q.ask, kind: EdgeKind::Quoted })?;
        if quoted.contains(&(q.market.as_str(), q.quote.as_str(), q.base.as_str())) {
            continue;
        }
        let eps = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
        let mut reverse = eps / q.ask;
        // store the realised product so forward * reverse == eps bit for bit
        while q.ask * reverse >= 1.0 {
            reverse = reverse.next_down();
        }
        let realised = q.ask * reverse;
        graph.push(Edge { from: to, to: from, rate: reverse, kind: EdgeKind::Reverse })?;
        graph.epsilon.insert((from, to), realised);
        graph.epsilon.insert((to, from), realised);
    }

    let mut by_currency: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for node in &graph.nodes {
        by_currency.entry(node.currency.as_str()).or_default().push(node.index);
    }
    let mut transfers = Vec::new();
    for members in by_currency.values().filter(|m| m.len() >= 2) {
        for &a in members {
            for &b in members {
                if a != b {
                    transfers.push(Edge { from: a, to: b, rate: cfg.transfer_epsilon, kind: EdgeKind::Transfer });
                }
            }
        }
    }
    for e in transfers {
        graph.push(e)?;
    }
    Ok(graph)
}

/// A cycle to embed in a synthetic snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plant {
    pub length: usize,
    pub product: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_markets: usize,
    pub n_currencies: usize,
    /// Listing density in (0, 1]. At 1.0 every market lists every currency.
    pub density: f64,
    pub planted: Option<Plant>,
    pub seed: u64,
}

/// Listing density that reproduces the 16-market / 110-currency "full
/// graph" shape (about 243 nodes and 1718 edges).
pub const FULL_GRAPH_DENSITY: f64 = 0.11;

/// Spacing of per-market price offsets in log space.
const OFFSET_STEP: f64 = 1e-6;
/// Offsets are integers in `[-OFFSET_RANGE, OFFSET_RANGE]`. Keeps every
/// unplanted cycle below 1 as long as transfers cost more than
/// `exp(-2 * OFFSET_RANGE * OFFSET_STEP)`.
const OFFSET_RANGE: i64 = 10;
/// How many top-ranked listed currencies act as quote currencies per market.
const BASES_PER_MARKET: usize = 3;

/// Ranked by market capitalisation, with approximate USD prices.
const NAMED: &[(&str, f64)] = &[
    ("BTC", 11000.0),
    ("USD", 1.0),
    ("ETH", 1100.0),
    ("EUR", 1.22),
    ("JPY", 0.0091),
    ("KRW", 0.00094),
    ("XRP", 1.35),
    ("BCH", 1700.0),
    ("LTC", 190.0),
    ("IDR", 0.0000742),
    ("ADA", 0.55),
    ("XLM", 0.52),
    ("NEO", 130.0),
    ("EOS", 12.5),
    ("GBP", 1.38),
    ("XMR", 340.0),
    ("DASH", 800.0),
    ("TRX", 0.062),
    ("USDT", 1.003),
    ("ETC", 32.0),
];

impl SyntheticSpec {
    pub fn full_graph(seed: u64) -> Self {
        SyntheticSpec { n_markets: 16, n_currencies: 110, density: FULL_GRAPH_DENSITY, planted: None, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.n_markets == 0 {
            return Err(Error::InvalidParameter("at least one market is required".into()));
        }
        if self.n_currencies < 2 {
            return Err(Error::InvalidParameter("at least two currencies are required".into()));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidParameter(format!("density {} must lie in (0, 1]", self.density)));
        }
        if let Some(p) = self.planted {
            if p.length < 3 {
                return Err(Error::InvalidParameter(format!("planted cycle length {} must be >= 3", p.length)));
            }
            if !(p.product > 1.0) || !p.product.is_finite() {
                return Err(Error::InvalidParameter(format!("planted product {} must exceed 1", p.product)));
            }
            if p.length > self.n_currencies {
                return Err(Error::InfeasiblePlant { length: p.length, available: self.n_currencies });
            }
        }
        Ok(())
    }
}

fn currency_code(rank: usize) -> String {
    NAMED.get(rank).map(|(c, _)| c.to_string()).unwrap_or_else(|| format!("C{rank:03}"))
}

/// Generates a seeded snapshot. Every market prices currencies off a shared
/// USD price with small per-market offsets, quotes are oriented so that the
/// forward edges of a market are acyclic, and hence the only cycle with rate
/// product above 1 is the planted one (when requested). Planted currencies
/// are listed only at market `M1` and quoted only around the ring.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<Vec<Quote>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_c = spec.n_currencies;
    let planted_len = spec.planted.map_or(0, |p| p.length);
    let regular = n_c - planted_len;

    let prices: Vec<f64> = (0..n_c)
        .map(|rank| match NAMED.get(rank) {
            Some(&(_, p)) => p,
            None => 10f64.powf(rng.gen_range(-4.0..2.7)),
        })
        .collect();
    let codes: Vec<String> = (0..n_c).map(currency_code).collect();

    // popular currencies are boosted so they appear on most markets
    let zipf: Vec<f64> = (0..regular).map(|r| 1.0 / (r as f64 + 1.0)).collect();
    let zipf_sum: f64 = zipf.iter().sum();
    let mut quotes = Vec::new();
    for m in 0..spec.n_markets {
        let market = format!("M{}", m + 1);
        let spread: f64 = rng.gen_range(0.6..1.6);
        let listed: Vec<usize> = (0..regular)
            .filter(|&r| {
                let boost = (regular as f64 * zipf[r] / zipf_sum).max(1.0);
                let p = (spec.density.powf(spread) * boost).min(1.0);
                rng.gen_bool(p)
            })
            .collect();
        let offsets: Vec<i64> = listed.iter().map(|_| rng.gen_range(-OFFSET_RANGE..=OFFSET_RANGE)).collect();
        let ask = |i: usize, j: usize| {
            let (a, b) = (listed[i], listed[j]);
            prices[a] / prices[b] * (OFFSET_STEP * (offsets[i] - offsets[j]) as f64).exp()
        };

        let n_bases = listed.len().min(BASES_PER_MARKET);
        for i in 0..n_bases {
            for j in (i + 1)..n_bases {
                quotes.push(Quote::new(&market, &codes[listed[i]], &codes[listed[j]], ask(i, j)));
            }
        }
        for i in n_bases..listed.len() {
            quotes.push(Quote::new(&market, &codes[listed[i]], &codes[listed[0]], ask(i, 0)));
            for j in 1..n_bases {
                if rng.gen_bool(spec.density.sqrt()) {
                    quotes.push(Quote::new(&market, &codes[listed[i]], &codes[listed[j]], ask(i, j)));
                }
            }
        }
    }

    if let Some(plant) = spec.planted {
        let mut ring: Vec<usize> = (regular..n_c).collect();
        ring.shuffle(&mut rng);
        let gain = plant.product.powf(1.0 / plant.length as f64);
        for i in 0..plant.length {
            let (a, b) = (ring[i], ring[(i + 1) % plant.length]);
            quotes.push(Quote::new("M1", &codes[a], &codes[b], prices[a] / prices[b] * gain));
        }
    }
    Ok(quotes)
}
