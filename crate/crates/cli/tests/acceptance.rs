//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use arbcycle::apsp::{apsp_by_squaring, floyd_warshall_min_cycle, karp_min_cycle_weight, min_plus_product};
use arbcycle::evaluate::{brute_force_best_cycle, brute_force_stratum, BruteSource, Objective};
use arbcycle::snapshot::{Edge, EdgeKind, NodeId};
use arbcycle::triangle::{build_tripartite, min_triangle};
use arbcycle::witness::{reconstruct_cycle, witness_matrix, SamplerConfig};
use arbcycle::{
    backmap_cycle, build_graph, find_cycle, gen_synthetic, transform, DistanceMatrix, ExchangeGraph, GraphConfig,
    PipelineConfig, SyntheticSpec, TransformedGraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const ORACLE_GRAPHS: usize = 240;
const WITNESS_MATRICES: usize = 120;
const STRATUM_GRAPHS: usize = 60;
const PROFIT_RANGE: (f64, f64) = (4.9, 5.1);
/// Seed whose full-shape graph has 243 nodes and 1718 edges.
const FULL_SHAPE_SEED: u64 = 195;
/// Seed whose full-shape graph has at least 1870 edges.
const SWEEP_SEED: u64 = 0;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arbcycle"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or(Value::Null)
}

fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64, max_w: u64) -> Vec<(usize, usize, u64)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(1..=max_w)));
            }
        }
    }
    edges
}

fn is_simple(nodes: &[usize]) -> bool {
    let mut s = nodes.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len() == nodes.len()
}

struct Check {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Check {
    Check { ok, detail: detail.into() }
}

/// Oracle triad plus reconstruction of every triangle found.
fn criteria_1_and_3() -> (Check, Check) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    let mut cycles = 0;
    let mut bad_reconstructions = 0;
    let mut triangles = 0;
    for _ in 0..ORACLE_GRAPHS {
        let n = rng.gen_range(2..=9);
        let p = rng.gen_range(0.1..0.6);
        let edges = random_digraph(&mut rng, n, p, 20);
        let g = TransformedGraph::from_weights(n, &edges).unwrap();
        let dist = apsp_by_squaring(&g.adjacency()).unwrap();
        let fw = floyd_warshall_min_cycle(&g.adjacency_hollow(), 2).unwrap().and_then(|c| c.sum_weight);
        let karp = karp_min_cycle_weight(&dist, &edges, 2).unwrap();
        let brute = brute_force_best_cycle(BruteSource::Transformed(&g), 9, Objective::MinSum, 2).unwrap().and_then(|c| c.sum_weight);
        let w = witness_matrix(&dist.hollow(), &SamplerConfig::default()).unwrap();
        let mut tri_total = None;
        for two in [true, false] {
            let tri = build_tripartite(&g, &dist, two).unwrap();
            if let Some(best) = min_triangle(&tri) {
                triangles += 1;
                if two {
                    tri_total = Some(best.total);
                }
                match reconstruct_cycle(&best, &dist, &w, &g) {
                    Ok(nodes) if g.cycle_weight(&nodes).ok() == Some(best.total) => {}
                    _ => bad_reconstructions += 1,
                }
            }
        }
        if fw.is_some() {
            cycles += 1;
        }
        if !(fw == karp && karp == brute && brute == tri_total) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();

    let mut not_simple = Vec::new();
    let mut pipelines = 0;
    let mut specs: Vec<SyntheticSpec> = (0..20)
        .map(|seed| SyntheticSpec {
            n_markets: 3,
            n_currencies: 12,
            density: 0.5,
            planted: Some(arbcycle::Plant { length: 3 + (seed % 3) as usize, product: 1.05 }),
            seed,
        })
        .collect();
    specs.extend((0..10).map(|seed| SyntheticSpec { n_markets: 4, n_currencies: 25, density: 0.4, planted: None, seed }));
    for spec in &specs {
        let graph = build_graph(&gen_synthetic(spec).unwrap(), &GraphConfig { seed: spec.seed, ..GraphConfig::default() }).unwrap();
        if let Some(r) = find_cycle(&graph, &PipelineConfig::default()).unwrap() {
            pipelines += 1;
            if !is_simple(&r.cycle.nodes) || r.cycle.len() < 3 {
                not_simple.push(r.path.join(","));
            }
        }
    }

    let c1 = check(
        mismatches == 0 && elapsed < Duration::from_secs(30),
        format!("{ORACLE_GRAPHS} graphs ({cycles} cyclic), {mismatches} mismatches, {:.2}s (limit 30s)", elapsed.as_secs_f64()),
    );
    let c3 = check(
        bad_reconstructions == 0 && not_simple.is_empty() && pipelines > 0,
        format!(
            "{triangles} triangles reconstructed, {bad_reconstructions} sum mismatches; {pipelines} pipeline cycles, {} not simple {:?}",
            not_simple.len(),
            not_simple
        ),
    );
    (c1, c3)
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut entries = 0usize;
    let mut failures = 0;
    for i in 0..WITNESS_MATRICES {
        let n = rng.gen_range(1..=32);
        let p = rng.gen_range(0.05..0.5);
        let edges = random_digraph(&mut rng, n, p, 50);
        let d = apsp_by_squaring(&DistanceMatrix::from_edges(n, &edges, 0)).unwrap();
        let d = if i % 2 == 0 { d } else { d.hollow() };
        let cfg = SamplerConfig { seed: i as u64, ..SamplerConfig::default() };
        let (c, _) = min_plus_product(&d, &d, false).unwrap();
        let w = witness_matrix(&d, &cfg).unwrap();
        for u in 0..n {
            for v in 0..n {
                if !c.is_finite(u, v) {
                    continue;
                }
                entries += 1;
                match w.get(u, v) {
                    Some(k) if d.get(u, k).saturating_add(d.get(k, v)) == c.get(u, v) => {}
                    _ => failures += 1,
                }
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        failures == 0 && elapsed < Duration::from_secs(30),
        format!("{WITNESS_MATRICES} matrices, {entries} finite entries, {failures} violations, {:.2}s (limit 30s)", elapsed.as_secs_f64()),
    )
}

fn criterion_4() -> Check {
    let args = ["--synthetic", "planted:3:1.05", "--min-length", "3", "-c", "10000000"];
    let ingest = json(&run(&["ingest", "--synthetic", "planted:3:1.05"]));
    let n = ingest["n_nodes"].as_u64().unwrap_or(u64::MAX);

    let start = Instant::now();
    let tri = run(&[&["find-cycle", "--method", "triangle"][..], &args[..]].concat());
    let elapsed = start.elapsed();
    let brute = run(&[&["find-cycle", "--method", "brute"][..], &args[..]].concat());
    let (tri_json, brute_json) = (json(&tri), json(&brute));
    let profit = tri_json["profit_pct"].as_f64().unwrap_or(f64::NAN);

    // the planted ring is the most profitable cycle of its length
    let spec = SyntheticSpec { n_markets: 3, n_currencies: 12, density: 0.5, planted: Some(arbcycle::Plant { length: 3, product: 1.05 }), seed: 0 };
    let graph = build_graph(&gen_synthetic(&spec).unwrap(), &GraphConfig::default()).unwrap();
    let best = brute_force_stratum(BruteSource::Exchange(&graph), 3, Objective::MaxProduct).unwrap().unwrap();
    let mut planted: Vec<String> = best.nodes.iter().map(|&u| graph.node(u).label()).collect();
    planted.push(planted[0].clone());

    let ok = tri.status.code() == Some(0)
        && brute.status.code() == Some(0)
        && (PROFIT_RANGE.0..=PROFIT_RANGE.1).contains(&profit)
        && tri_json["path"] == brute_json["path"]
        && tri_json["path"] == serde_json::json!(planted)
        && n <= 50
        && elapsed < Duration::from_secs(5);
    check(
        ok,
        format!(
            "n={n}, profit {profit:.6}% (range {:?}), brute agrees: {}, planted ring found: {}, {:.3}s (limit 5s)",
            PROFIT_RANGE,
            tri_json["path"] == brute_json["path"],
            tri_json["path"] == serde_json::json!(planted),
            elapsed.as_secs_f64()
        ),
    )
}

/// Best 2-cycle by transformed weight against the best 2-cycle by product.
fn two_cycle_bound(graph: &ExchangeGraph, c: u64) -> bool {
    let t = transform(graph, c).unwrap();
    let mut best_product = 0.0f64;
    let mut lightest: Option<(u64, f64)> = None;
    for e in graph.edges() {
        if e.from > e.to {
            continue;
        }
        if let Some(back) = graph.rate(e.to, e.from) {
            let product = e.rate * back;
            best_product = best_product.max(product);
            let w = t.weight(e.from, e.to).unwrap() + t.weight(e.to, e.from).unwrap();
            if lightest.is_none_or(|(lw, _)| w < lw) {
                lightest = Some((w, product));
            }
        }
    }
    lightest.is_none_or(|(_, p)| p >= best_product * (-2.0 / c as f64).exp() * (1.0 - 1e-12))
}

fn criterion_5() -> Check {
    let seed = SWEEP_SEED.to_string();
    let stats = json(&run(&["ingest", "--synthetic", "full", "--seed", &seed]));
    let out = run(&["transform-stats", "--synthetic", "full", "--seed", &seed]);
    let rows = json(&out);
    let fractions: Vec<f64> = rows.as_array().map(|r| r.iter().filter_map(|x| x["fraction"].as_f64()).collect()).unwrap_or_default();
    let cs: Vec<u64> = rows.as_array().map(|r| r.iter().filter_map(|x| x["c"].as_u64()).collect()).unwrap_or_default();
    let edges = stats["n_edges"].as_u64().unwrap_or(0);
    let span = stats["max_rate"].as_f64().unwrap_or(0.0) / stats["min_rate"].as_f64().unwrap_or(1.0);
    let monotone = fractions.windows(2).all(|w| w[0] <= w[1]);
    let full = fractions.contains(&1.0);

    let graph = build_graph(&gen_synthetic(&SyntheticSpec::full_graph(SWEEP_SEED)).unwrap(), &GraphConfig { seed: SWEEP_SEED, ..GraphConfig::default() }).unwrap();
    let stratified = cs.iter().all(|&c| two_cycle_bound(&graph, c));

    check(
        out.status.success() && edges >= 1870 && span >= 1e10 && cs == [100, 1_000, 100_000, 1_000_000, 10_000_000] && monotone && full && stratified,
        format!(
            "{edges} edges (min 1870), rate span {:.1} decades (min 10), fractions {:?}, nondecreasing: {monotone}, reaches 100%: {full}, 2-cycle bound: {stratified}",
            span.log10(),
            fractions.iter().map(|f| format!("{:.4}", f)).collect::<Vec<_>>()
        ),
    )
}

fn random_rate_graph(rng: &mut ChaCha8Rng) -> ExchangeGraph {
    let n = rng.gen_range(5..=8);
    let nodes = (0..n).map(|i| NodeId { index: i, market: "M1".into(), currency: format!("C{i}") }).collect();
    let mut edges = Vec::new();
    for from in 0..n {
        for to in 0..n {
            if from != to && rng.gen_bool(0.5) {
                edges.push(Edge { from, to, rate: 10f64.powf(rng.gen_range(-2.0..2.0)), kind: EdgeKind::Quoted });
            }
        }
    }
    ExchangeGraph::from_edges(nodes, edges).unwrap()
}

fn criterion_6() -> Check {
    let c = 100_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut strata = 0;
    let mut violations = Vec::new();
    for _ in 0..STRATUM_GRAPHS {
        let graph = random_rate_graph(&mut rng);
        let t = transform(&graph, c).unwrap();
        for len in 3..=5 {
            let best = brute_force_stratum(BruteSource::Exchange(&graph), len, Objective::MaxProduct).unwrap();
            let lightest = brute_force_stratum(BruteSource::Transformed(&t), len, Objective::MinSum).unwrap();
            if let (Some(best), Some(lightest)) = (best, lightest) {
                strata += 1;
                let product = backmap_cycle(&lightest.nodes, &t).unwrap().1;
                let bound = best.product.unwrap() * (-(len as f64) / c as f64).exp();
                if product < bound * (1.0 - 1e-12) {
                    violations.push((len, product, bound));
                }
            }
        }
    }
    check(
        violations.is_empty() && strata > 0,
        format!("{STRATUM_GRAPHS} graphs, {strata} nonempty strata (lengths 3-5, c=1e5), violations {violations:?}"),
    )
}

fn criterion_7(dir: &Path) -> Check {
    let csv = dir.join("full.csv");
    let seed = FULL_SHAPE_SEED.to_string();
    let csv_arg = csv.to_str().unwrap();
    let start = Instant::now();
    let generated = run(&["gen-synthetic", "--synthetic", "full", "--seed", &seed, "--output", csv_arg]);
    let found = run(&["find-cycle", "--input", csv_arg, "--seed", &seed]);
    let elapsed = start.elapsed();
    let stats = json(&run(&["ingest", "--input", csv_arg, "--seed", &seed]));
    let cmp = run(&["compare", "--input", csv_arg, "--seed", &seed]);
    let cmp_json = json(&cmp);
    let tri = &cmp_json["triangle"]["sum_weight"];
    let floyd = &cmp_json["floyd"]["sum_weight"];
    let report = json(&found);
    let ok = generated.status.success()
        && matches!(found.status.code(), Some(0) | Some(2))
        && cmp.status.success()
        && tri == floyd
        && !tri.is_null()
        && cmp_json.get("brute").is_none()
        && elapsed < Duration::from_secs(60);
    check(
        ok,
        format!(
            "{} nodes / {} edges, pipeline {:.2}s (limit 60s), profit {:.6}%, compare triangle={tri} floyd={floyd}",
            stats["n_nodes"],
            stats["n_edges"],
            elapsed.as_secs_f64(),
            report["profit_pct"].as_f64().unwrap_or(f64::NAN)
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let (c1, c3) = criteria_1_and_3();
    let results = [
        ("1 oracle triad", c1),
        ("2 witness identity", criterion_2()),
        ("3 reconstruction", c3),
        ("4 planted arbitrage", criterion_4()),
        ("5 transform sweep", criterion_5()),
        ("6 stratified optimality", criterion_6()),
        ("7 desk-scale throughput", criterion_7(dir.path())),
    ];
    let mut failed = 0;
    for (name, c) in &results {
        println!("{} criterion {name}: {}", if c.ok { "PASS" } else { "FAIL" }, c.detail);
        failed += usize::from(!c.ok);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
