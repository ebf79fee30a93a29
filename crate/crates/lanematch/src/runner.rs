//! End-to-end pipeline: load -> order -> filter -> initialization pool ->
//! parallel search -> report. Also the sweep and verify drivers used by the
//! CLI.

use std::time::{Duration, Instant};

use crate::coarse::stack_bytes_coarse;
use crate::error::Result;
use crate::filter::CandidateFilter;
use crate::fine::stack_bytes_fine;
use crate::gen;
use crate::graph::Graph;
use crate::metrics::{csv_row, ConfigEcho, RunReport, CSV_HEADER};
use crate::oracle;
use crate::ordering::{generate_order, MatchingOrder};
use crate::scheduler::{build_initial_pool, execute, EngineKind, ExecOptions, PoolOutcome};
use crate::workload::{random_query, QueryGraph};

/// Default memory budget (bytes) when neither the flag nor the environment
/// variable overrides it; the pool may use a quarter of it.
pub const DEFAULT_MEM_BUDGET: u64 = 2 * 1024 * 1024 * 1024;
pub const MEM_BUDGET_ENV: &str = "LANEMATCH_MEM_BUDGET";

/// Fraction of the budget the initialization pool may occupy.
pub const POOL_BUDGET_FRACTION: u64 = 4;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub engine: EngineKind,
    pub w: usize,
    pub sigma: usize,
    pub tau: usize,
    pub workers: usize,
    pub steal: bool,
    pub filter: bool,
    pub seed: u64,
    /// Collect full matches (listing mode) instead of counting only.
    pub collect: bool,
    pub record_events: bool,
    pub timeout: Option<Duration>,
    pub mem_budget: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            engine: EngineKind::Fine,
            w: 32,
            sigma: 1,
            tau: 1_000_000,
            workers: 1,
            steal: true,
            filter: true,
            seed: 0,
            collect: false,
            record_events: false,
            timeout: Some(Duration::from_secs(60)),
            mem_budget: DEFAULT_MEM_BUDGET,
        }
    }
}

pub struct RunOutput {
    pub report: RunReport,
    pub matches: Option<Vec<Vec<u32>>>,
}

fn config_echo(cfg: &RunConfig) -> ConfigEcho {
    ConfigEcho {
        engine: match cfg.engine {
            EngineKind::Coarse => "coarse".into(),
            EngineKind::Fine => "fine".into(),
        },
        tau: cfg.tau,
        w: cfg.w,
        sigma: cfg.sigma,
        workers: cfg.workers,
        steal: cfg.steal,
        filter: cfg.filter,
        seed: cfg.seed,
        mode: if cfg.collect { "list".into() } else { "count".into() },
    }
}

/// Full pipeline on a loaded instance with a prepared matching order.
pub fn run(g: &Graph, q: &QueryGraph, order: &MatchingOrder, cfg: &RunConfig) -> Result<RunOutput> {
    let filter = cfg.filter.then(|| CandidateFilter::build(q, g));
    let pool_cap = cfg.mem_budget / POOL_BUDGET_FRACTION;

    let init_start = Instant::now();
    let outcome = build_initial_pool(g, q, order, filter.as_ref(), cfg.tau, pool_cap)?;
    let init_time_s = init_start.elapsed().as_secs_f64();

    let nphi = order.len();
    let stack_fine = stack_bytes_fine(nphi, cfg.w);
    let stack_coarse = stack_bytes_coarse(nphi, g.d_max(), cfg.sigma).candidate_bytes;

    let (report, matches) = match outcome {
        PoolOutcome::Complete(level) => {
            // the initialization BFS already enumerated everything
            let matches = cfg.collect.then(|| {
                (0..level.len()).map(|i| level.item(i).to_vec()).collect()
            });
            let report = RunReport {
                match_count: level.len() as u64,
                init_time_s,
                search_time_s: 0.0,
                per_worker_busy_s: vec![],
                busy_imbalance: None,
                idle_rate: None,
                round_count: 0,
                stack_bytes_fine: stack_fine,
                stack_bytes_coarse: stack_coarse,
                entry_bytes: crate::fine::ENTRY_BYTES,
                pool_size: level.len(),
                pool_depth: level.depth,
                steal_count: 0,
                timed_out: false,
                config: config_echo(cfg),
            };
            (report, matches)
        }
        PoolOutcome::Pool(pool) => {
            let opts = ExecOptions {
                engine: cfg.engine,
                w: cfg.w,
                sigma: cfg.sigma,
                workers: cfg.workers,
                steal: cfg.steal,
                record_events: cfg.record_events,
                collect: cfg.collect,
                deadline: cfg.timeout.map(|t| Instant::now() + t),
            };
            let search_start = Instant::now();
            let res = execute(g, q, order, filter.as_ref(), &pool, opts);
            let search_time_s = search_start.elapsed().as_secs_f64();
            let report = RunReport {
                match_count: res.total,
                init_time_s,
                search_time_s,
                busy_imbalance: RunReport::compute_imbalance(&res.busy_secs),
                per_worker_busy_s: res.busy_secs,
                idle_rate: res.events.idle_rate(),
                round_count: res.events.rounds,
                stack_bytes_fine: stack_fine,
                stack_bytes_coarse: stack_coarse,
                entry_bytes: crate::fine::ENTRY_BYTES,
                pool_size: pool.len(),
                pool_depth: pool.depth(),
                steal_count: res.steal_count,
                timed_out: res.timed_out,
                config: config_echo(cfg),
            };
            (report, res.matches)
        }
    };
    Ok(RunOutput { report, matches })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Tau,
    Sigma,
    Workers,
}

/// One run per axis value with everything else held constant, merged into a
/// single CSV document. A failed run becomes a "# value=... error: ..."
/// comment line and the sweep continues.
pub fn sweep(
    g: &Graph,
    q: &QueryGraph,
    order: &MatchingOrder,
    base: &RunConfig,
    axis: SweepAxis,
    values: &[usize],
) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for &v in values {
        let mut cfg = base.clone();
        match axis {
            SweepAxis::Tau => cfg.tau = v,
            SweepAxis::Sigma => cfg.sigma = v,
            SweepAxis::Workers => cfg.workers = v,
        }
        match run(g, q, order, &cfg) {
            Ok(output) => {
                out.push_str(&csv_row(&output.report));
                out.push('\n');
            }
            Err(e) => {
                out.push_str(&format!("# value={v} error: {e}\n"));
            }
        }
    }
    out
}

#[derive(Debug)]
pub struct VerifySummary {
    pub instances: usize,
    pub mismatches: Vec<String>,
}

/// Oracle-vs-engines diff over a seeded instance matrix: ER and RMAT data
/// graphs with uniform random labels, random queries plus fixed patterns.
pub fn verify(instances: usize, base_seed: u64, workers: usize) -> VerifySummary {
    let mut mismatches = Vec::new();
    let mut done = 0usize;
    let mut seed = base_seed;
    while done < instances {
        seed += 1;
        let data_seed = seed * 7 + 1;
        let g_raw = match seed % 3 {
            0 => gen::er(40 + (seed % 25) as usize, 0.1 + 0.1 * (seed % 3) as f64, data_seed),
            1 => gen::er(64, 0.2, data_seed),
            _ => gen::rmat(256, 1024, (0.57, 0.19, 0.19, 0.05), data_seed)
                .expect("fixed probabilities are valid"),
        };
        let sigma_labels = [1u32, 2, 4][(seed % 3) as usize];
        let g = crate::workload::relabel_zipf(&g_raw, sigma_labels, 0.0, seed);
        let qn = 3 + (seed % 6) as usize;
        let Ok(q) = random_query(&g, qn, seed * 13 + 5) else {
            continue;
        };
        done += 1;
        let expected = oracle::count_matches(&q, &g);
        let order = generate_order(&q);
        for (engine, sig) in [
            (EngineKind::Fine, 1usize),
            (EngineKind::Coarse, 1),
            (EngineKind::Coarse, 4),
        ] {
            let cfg = RunConfig {
                engine,
                sigma: sig,
                tau: 16,
                workers,
                seed,
                timeout: None,
                ..Default::default()
            };
            match run(&g, &q, &order, &cfg) {
                Ok(out) if out.report.match_count == expected => {}
                Ok(out) => mismatches.push(format!(
                    "seed {seed}: {engine:?} sigma {sig} got {} expected {expected}",
                    out.report.match_count
                )),
                Err(e) => mismatches.push(format!("seed {seed}: {engine:?} failed: {e}")),
            }
        }
    }
    VerifySummary {
        instances: done,
        mismatches,
    }
}

/// Skewed fixture for load-balancing experiments: a clique hosting the only
/// two adjacent label-1 vertices, plus a long label-1 path of trivial work.
/// A `query_k`-clique query with two label-1 vertices then has exactly two
/// heavy seed items (the clique pair, in both orientations) among many
/// cheap path seeds.
pub fn skewed_fixture(clique: usize, path_len: usize, query_k: usize) -> (Graph, QueryGraph) {
    assert!(clique >= query_k + 2 && path_len >= 2 && query_k >= 3);
    let n = clique + path_len;
    let mut edges = Vec::new();
    for u in 0..clique as u32 {
        for v in (u + 1)..clique as u32 {
            edges.push((u, v));
        }
    }
    for v in clique..n {
        edges.push(((v - 1) as u32, v as u32));
    }
    let mut labels = vec![0u16; n];
    labels[0] = 1;
    labels[1] = 1; // the only adjacent label-1 pair
    for l in labels.iter_mut().skip(clique) {
        *l = 1;
    }
    let (g, _) = Graph::from_edges(n, &edges, labels, 2);

    let mut qedges = Vec::new();
    for u in 0..query_k as u32 {
        for v in (u + 1)..query_k as u32 {
            qedges.push((u, v));
        }
    }
    let mut qlabels = vec![0u16; query_k];
    qlabels[0] = 1;
    qlabels[1] = 1;
    let (qg, _) = Graph::from_edges(query_k, &qedges, qlabels, 2);
    let q = QueryGraph::new(qg).expect("clique query is connected");
    (g, q)
}

/// Parse the memory budget from the environment, if set.
pub fn mem_budget_from_env() -> Option<u64> {
    std::env::var(MEM_BUDGET_ENV).ok()?.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4_instance() -> (Graph, QueryGraph) {
        let mut e = Vec::new();
        for u in 0..4u32 {
            for v in (u + 1)..4 {
                e.push((u, v));
            }
        }
        let (g, _) = Graph::from_edges(4, &e, vec![0; 4], 1);
        let (qg, _) = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)], vec![0; 3], 1);
        (g, QueryGraph::new(qg).unwrap())
    }

    #[test]
    fn pipeline_counts_triangles_on_k4() {
        let (g, q) = k4_instance();
        let order = generate_order(&q);
        for engine in [EngineKind::Fine, EngineKind::Coarse] {
            let cfg = RunConfig {
                engine,
                tau: 1,
                ..Default::default()
            };
            let out = run(&g, &q, &order, &cfg).unwrap();
            assert_eq!(out.report.match_count, 24);
            assert!(!out.report.timed_out);
        }
        // large tau completes in BFS
        let cfg = RunConfig {
            tau: 1000,
            ..Default::default()
        };
        let out = run(&g, &q, &order, &cfg).unwrap();
        assert_eq!(out.report.match_count, 24);
        assert_eq!(out.report.search_time_s, 0.0);
    }

    #[test]
    fn listing_mode_returns_valid_matches() {
        let (g, q) = k4_instance();
        let order = generate_order(&q);
        let cfg = RunConfig {
            tau: 1,
            collect: true,
            ..Default::default()
        };
        let out = run(&g, &q, &order, &cfg).unwrap();
        let matches = out.matches.unwrap();
        assert_eq!(matches.len(), 24);
        // positions are in matching order; remap to query-vertex order for
        // the oracle validator
        for m in &matches {
            let mut by_qv = vec![0u32; 3];
            for (pos, &v) in m.iter().enumerate() {
                by_qv[order.phi[pos] as usize] = v;
            }
            assert!(oracle::is_valid_match(&q, &g, &by_qv));
        }
    }

    #[test]
    fn sweep_tau_monotone_pool() {
        let g = gen::er(64, 0.3, 3);
        let q = random_query(&g, 4, 9).unwrap();
        let order = generate_order(&q);
        let base = RunConfig {
            steal: false,
            ..Default::default()
        };
        let csv = sweep(&g, &q, &order, &base, SweepAxis::Tau, &[32, 256, 4096]);
        let rows: Vec<&str> = csv.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 3);
        let pool_sizes: Vec<usize> = rows
            .iter()
            .map(|r| {
                let cols: Vec<&str> = r.split(',').collect();
                cols[10].parse().unwrap() // pool_size column
            })
            .collect();
        assert!(pool_sizes.windows(2).all(|w| w[0] <= w[1]), "{pool_sizes:?}");
    }

    #[test]
    fn verify_small_matrix_clean() {
        let s = verify(25, 1000, 2);
        assert_eq!(s.instances, 25);
        assert!(s.mismatches.is_empty(), "{:?}", s.mismatches);
    }

    #[test]
    fn skewed_fixture_has_two_heavy_seeds() {
        let (g, q) = skewed_fixture(12, 200, 4);
        // only vertices 0 and 1 carry label 1 with degree >= 3
        let heavy: Vec<u32> = (0..g.n() as u32)
            .filter(|&v| g.label(v) == 1 && g.degree(v) >= 3)
            .collect();
        assert_eq!(heavy, vec![0, 1]);
        assert!(oracle::count_matches(&q, &g) > 0);
    }
}
