use arbcycle::apsp::{self, karp_min_cycle_weight, min_plus_product};
use arbcycle::evaluate::{self, BruteSource, Objective};
use arbcycle::snapshot::write_csv;
use arbcycle::{CycleReport, Method, PipelineConfig, SamplerConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: arbcycle::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Quote", module = "pyarbcycle", from_py_object)]
#[derive(Clone)]
struct PyQuote {
    inner: arbcycle::Quote,
}

#[pymethods]
impl PyQuote {
    #[new]
    fn new(market: &str, base: &str, quote: &str, ask: f64) -> Self {
        PyQuote { inner: arbcycle::Quote::new(market, base, quote, ask) }
    }

    #[getter]
    fn market(&self) -> &str {
        &self.inner.market
    }

    #[getter]
    fn base(&self) -> &str {
        &self.inner.base
    }

    #[getter]
    fn quote(&self) -> &str {
        &self.inner.quote
    }

    #[getter]
    fn ask(&self) -> f64 {
        self.inner.ask
    }

    fn __repr__(&self) -> String {
        format!("Quote({:?}, {:?}, {:?}, {})", self.inner.market, self.inner.base, self.inner.quote, self.inner.ask)
    }
}

fn unwrap_quotes(quotes: Vec<PyQuote>) -> Vec<arbcycle::Quote> {
    quotes.into_iter().map(|q| q.inner).collect()
}

fn wrap_quotes(quotes: Vec<arbcycle::Quote>) -> Vec<PyQuote> {
    quotes.into_iter().map(|inner| PyQuote { inner }).collect()
}

/// Exchange graph over (market, currency) nodes.
#[pyclass(name = "ExchangeGraph", module = "pyarbcycle", frozen)]
struct PyExchangeGraph {
    inner: arbcycle::ExchangeGraph,
}

#[pymethods]
impl PyExchangeGraph {
    #[new]
    #[pyo3(signature = (quotes, epsilon_lo=0.99999, epsilon_hi=0.999999, transfer_epsilon=0.9999, seed=0))]
    fn new(quotes: Vec<PyQuote>, epsilon_lo: f64, epsilon_hi: f64, transfer_epsilon: f64, seed: u64) -> PyResult<Self> {
        let cfg = arbcycle::GraphConfig { epsilon_range: (epsilon_lo, epsilon_hi), transfer_epsilon, seed };
        let inner = arbcycle::build_graph(&unwrap_quotes(quotes), &cfg).map_err(err)?;
        Ok(PyExchangeGraph { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.nodes().iter().map(|n| n.label()).collect()
    }

    fn find_node(&self, market: &str, currency: &str) -> Option<usize> {
        self.inner.find_node(market, currency)
    }

    /// `(from, to, rate)` for every edge.
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().iter().map(|e| (e.from, e.to, e.rate)).collect()
    }

    fn rate(&self, from: usize, to: usize) -> Option<f64> {
        self.inner.rate(from, to)
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.inner.stats();
        let d = PyDict::new(py);
        d.set_item("n_markets", s.n_markets)?;
        d.set_item("n_currencies", s.n_currencies)?;
        d.set_item("n_nodes", s.n_nodes)?;
        d.set_item("n_edges", s.n_edges)?;
        d.set_item("min_rate", s.min_rate)?;
        d.set_item("max_rate", s.max_rate)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let s = self.inner.stats();
        format!("ExchangeGraph(nodes={}, edges={})", s.n_nodes, s.n_edges)
    }
}

#[pyclass(name = "TransformedGraph", module = "pyarbcycle", frozen)]
struct PyTransformedGraph {
    inner: arbcycle::TransformedGraph,
}

#[pymethods]
impl PyTransformedGraph {
    /// Integer graph from explicit `(from, to, weight)` edges.
    #[staticmethod]
    fn from_weights(n: usize, edges: Vec<(usize, usize, u64)>) -> PyResult<Self> {
        Ok(PyTransformedGraph { inner: arbcycle::TransformedGraph::from_weights(n, &edges).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn max_weight(&self) -> u64 {
        self.inner.max_weight()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.inner.params().k
    }

    #[getter]
    fn c(&self) -> u64 {
        self.inner.params().c
    }

    fn edges(&self) -> Vec<(usize, usize, u64)> {
        self.inner.int_edges()
    }

    fn weight(&self, from: usize, to: usize) -> Option<u64> {
        self.inner.weight(from, to)
    }

    fn adjacency(&self) -> PyDistanceMatrix {
        PyDistanceMatrix { inner: self.inner.adjacency() }
    }

    fn backmap(&self, nodes: Vec<usize>) -> PyResult<(Vec<f64>, f64)> {
        arbcycle::backmap_cycle(&nodes, &self.inner).map_err(err)
    }
}

/// Square integer matrix; `None` stands for infinity.
#[pyclass(name = "DistanceMatrix", module = "pyarbcycle", frozen)]
struct PyDistanceMatrix {
    inner: arbcycle::DistanceMatrix,
}

fn to_cells(rows: Vec<Vec<Option<u64>>>) -> Vec<Vec<u64>> {
    rows.into_iter().map(|r| r.into_iter().map(|x| x.unwrap_or(arbcycle::INF)).collect()).collect()
}

#[pymethods]
impl PyDistanceMatrix {
    #[new]
    fn new(rows: Vec<Vec<Option<u64>>>) -> PyResult<Self> {
        Ok(PyDistanceMatrix { inner: arbcycle::DistanceMatrix::from_rows(to_cells(rows)).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn rows(&self) -> Vec<Vec<Option<u64>>> {
        (0..self.inner.n())
            .map(|u| (0..self.inner.n()).map(|v| self.inner.is_finite(u, v).then(|| self.inner.get(u, v))).collect())
            .collect()
    }

    /// Distance product with the smallest witness per finite entry.
    fn min_plus(&self, other: &PyDistanceMatrix) -> PyResult<(PyDistanceMatrix, Vec<Vec<Option<usize>>>)> {
        let (c, w) = min_plus_product(&self.inner, &other.inner, true).map_err(err)?;
        let w = w.expect("witnesses requested");
        let n = c.n();
        let wit = (0..n).map(|u| (0..n).map(|v| w.get(u, v)).collect()).collect();
        Ok((PyDistanceMatrix { inner: c }, wit))
    }

    fn apsp(&self) -> PyResult<PyDistanceMatrix> {
        Ok(PyDistanceMatrix { inner: apsp::apsp_by_squaring(&self.inner).map_err(err)? })
    }

    fn hollow(&self) -> PyDistanceMatrix {
        PyDistanceMatrix { inner: self.inner.hollow() }
    }

    /// Witness matrix of the product of this matrix with itself.
    #[pyo3(signature = (seed=0))]
    fn witnesses(&self, seed: u64) -> PyResult<Vec<Vec<Option<usize>>>> {
        let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
        let w = arbcycle::witness_matrix(&self.inner, &cfg).map_err(err)?;
        let n = w.n();
        Ok((0..n).map(|u| (0..n).map(|v| w.get(u, v)).collect()).collect())
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<PyDistanceMatrix> {
        Ok(PyDistanceMatrix { inner: arbcycle::DistanceMatrix::from_text(text).map_err(err)? })
    }

    fn __eq__(&self, other: &PyDistanceMatrix) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(name = "ProfitReport", module = "pyarbcycle", frozen)]
struct PyProfitReport {
    inner: evaluate::ProfitReport,
}

#[pymethods]
impl PyProfitReport {
    #[getter]
    fn nodes(&self) -> Vec<usize> {
        self.inner.cycle.nodes.clone()
    }

    #[getter]
    fn path(&self) -> Vec<String> {
        self.inner.path.clone()
    }

    #[getter]
    fn product(&self) -> f64 {
        self.inner.product
    }

    #[getter]
    fn profit_pct(&self) -> f64 {
        self.inner.profit_pct
    }

    #[getter]
    fn is_profitable(&self) -> bool {
        self.inner.is_profitable
    }

    #[getter]
    fn sum_weight(&self) -> Option<u64> {
        self.inner.sum_weight
    }

    #[getter]
    fn steps(&self) -> Vec<String> {
        self.inner.steps.clone()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("ProfitReport(path={:?}, profit_pct={:.6})", self.inner.path, self.inner.profit_pct)
    }
}

#[pyclass(name = "Cycle", module = "pyarbcycle", frozen, get_all)]
struct PyCycle {
    nodes: Vec<usize>,
    sum_weight: Option<u64>,
    product: Option<f64>,
    profit_pct: Option<f64>,
}

#[pymethods]
impl PyCycle {
    fn __repr__(&self) -> String {
        format!("Cycle(nodes={:?}, sum_weight={:?}, product={:?})", self.nodes, self.sum_weight, self.product)
    }
}

impl From<CycleReport> for PyCycle {
    fn from(c: CycleReport) -> Self {
        PyCycle { nodes: c.nodes, sum_weight: c.sum_weight, product: c.product, profit_pct: c.profit_pct }
    }
}

#[pyfunction]
#[pyo3(signature = (text, format="csv"))]
fn parse_snapshot(text: &str, format: &str) -> PyResult<Vec<PyQuote>> {
    let format: arbcycle::Format = format.parse().map_err(err)?;
    Ok(wrap_quotes(arbcycle::parse_snapshot(text.as_bytes(), format).map_err(err)?))
}

#[pyfunction]
fn to_csv(quotes: Vec<PyQuote>) -> PyResult<String> {
    let mut buf = Vec::new();
    write_csv(&unwrap_quotes(quotes), &mut buf).map_err(err)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

#[pyfunction]
#[pyo3(signature = (markets=16, currencies=110, density=arbcycle::snapshot::FULL_GRAPH_DENSITY, plant=None, seed=0))]
fn gen_synthetic(markets: usize, currencies: usize, density: f64, plant: Option<(usize, f64)>, seed: u64) -> PyResult<Vec<PyQuote>> {
    let spec = arbcycle::SyntheticSpec {
        n_markets: markets,
        n_currencies: currencies,
        density,
        planted: plant.map(|(length, product)| arbcycle::Plant { length, product }),
        seed,
    };
    Ok(wrap_quotes(arbcycle::gen_synthetic(&spec).map_err(err)?))
}

#[pyfunction]
fn transform(graph: &PyExchangeGraph, c: u64) -> PyResult<PyTransformedGraph> {
    Ok(PyTransformedGraph { inner: arbcycle::transform(&graph.inner, c).map_err(err)? })
}

#[pyfunction]
fn uniqueness_stats<'py>(py: Python<'py>, graph: &PyExchangeGraph, c: u64) -> PyResult<Bound<'py, PyDict>> {
    let s = arbcycle::uniqueness_stats(&graph.inner, c).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("c", s.c)?;
    d.set_item("total_edges", s.total_edges)?;
    d.set_item("distinct_original", s.distinct_original)?;
    d.set_item("distinct_transformed", s.distinct_transformed)?;
    d.set_item("fraction", s.fraction)?;
    d.set_item("max_weight", s.max_weight)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (graph, c=10_000_000, method="triangle", min_length=3, seed=0))]
fn find_cycle(py: Python<'_>, graph: &PyExchangeGraph, c: u64, method: &str, min_length: usize, seed: u64) -> PyResult<Option<PyProfitReport>> {
    let method: Method = method.parse().map_err(err)?;
    let cfg = PipelineConfig {
        weight_multiplier: c,
        method,
        min_length,
        sampler: SamplerConfig { seed, ..SamplerConfig::default() },
        ..PipelineConfig::default()
    };
    let report = py.detach(|| arbcycle::find_cycle(&graph.inner, &cfg)).map_err(err)?;
    Ok(report.map(|inner| PyProfitReport { inner }))
}

#[pyfunction]
fn evaluate_cycle(nodes: Vec<usize>, graph: &PyExchangeGraph) -> PyResult<PyProfitReport> {
    Ok(PyProfitReport { inner: arbcycle::evaluate_cycle(&nodes, &graph.inner).map_err(err)? })
}

/// Exhaustive search: the most profitable cycle of an exchange graph, or
/// the lightest cycle of a transformed graph.
#[pyfunction]
#[pyo3(signature = (graph, max_len=9, min_length=3))]
fn brute_force_best_cycle(graph: &Bound<'_, PyAny>, max_len: usize, min_length: usize) -> PyResult<Option<PyCycle>> {
    let result = if let Ok(g) = graph.cast::<PyExchangeGraph>() {
        evaluate::brute_force_best_cycle(BruteSource::Exchange(&g.get().inner), max_len, Objective::MaxProduct, min_length)
    } else if let Ok(g) = graph.cast::<PyTransformedGraph>() {
        evaluate::brute_force_best_cycle(BruteSource::Transformed(&g.get().inner), max_len, Objective::MinSum, min_length)
    } else {
        return Err(PyValueError::new_err("expected ExchangeGraph or TransformedGraph"));
    };
    Ok(result.map_err(err)?.map(PyCycle::from))
}

#[pyfunction]
#[pyo3(signature = (graph, min_length=3))]
fn floyd_warshall_min_cycle(graph: &PyTransformedGraph, min_length: usize) -> PyResult<Option<PyCycle>> {
    let r = apsp::floyd_warshall_min_cycle(&graph.inner.adjacency_hollow(), min_length).map_err(err)?;
    Ok(r.map(PyCycle::from))
}

#[pyfunction]
#[pyo3(signature = (graph, min_length=3))]
fn karp_min_cycle(graph: &PyTransformedGraph, min_length: usize) -> PyResult<Option<u64>> {
    let dist = apsp::apsp_by_squaring(&graph.inner.adjacency()).map_err(err)?;
    karp_min_cycle_weight(&dist, &graph.inner.int_edges(), min_length).map_err(err)
}

#[pymodule]
fn pyarbcycle(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQuote>()?;
    m.add_class::<PyExchangeGraph>()?;
    m.add_class::<PyTransformedGraph>()?;
    m.add_class::<PyDistanceMatrix>()?;
    m.add_class::<PyProfitReport>()?;
    m.add_class::<PyCycle>()?;
    m.add_function(wrap_pyfunction!(parse_snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(to_csv, m)?)?;
    m.add_function(wrap_pyfunction!(gen_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(transform, m)?)?;
    m.add_function(wrap_pyfunction!(uniqueness_stats, m)?)?;
    m.add_function(wrap_pyfunction!(find_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_best_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(floyd_warshall_min_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(karp_min_cycle, m)?)?;
    m.add("INF", arbcycle::INF)?;
    Ok(())
}
