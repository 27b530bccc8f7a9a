//! Space/time benchmark harness: builds the index under a grid of
//! configurations, measures payload sizes against fixed-width baselines,
//! and times each query class over generated query sets (single-threaded,
//! warm-up excluded, monotonic clock).

use std::hint::black_box;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::BvFlavor;
use crate::error::Result;
use crate::query::{BuildConfig, CtrIndex, TimeWindow, TopKStrategy};
use crate::trip::{RawTrip, TimeDiscretizer, TripStore};
use crate::wavelet::TimeStruct;

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub time_struct: TimeStruct,
    pub flavor: BvFlavor,
    pub t_psi: u32,
    pub interval_minutes: u32,
}

/// The paper's full configuration grid for one interval setting.
pub fn full_grid(interval_minutes: u32) -> Vec<BenchConfig> {
    let mut grid = Vec::new();
    for time_struct in TimeStruct::ALL {
        for flavor in BvFlavor::ALL {
            for t_psi in [32u32, 128, 512] {
                grid.push(BenchConfig {
                    time_struct,
                    flavor,
                    t_psi,
                    interval_minutes,
                });
            }
        }
    }
    grid
}

#[derive(Clone, Debug)]
pub struct QuerySpec {
    /// Queries per class (the paper uses 10,000).
    pub n_queries: usize,
    /// Runs per top-k configuration (the paper uses 100).
    pub topk_runs: usize,
    /// Window widths in minutes, sampled uniformly (paper: 5 min to 2 h).
    pub width_minutes: (u32, u32),
    pub seed: u64,
}

impl Default for QuerySpec {
    fn default() -> Self {
        QuerySpec {
            n_queries: 10_000,
            topk_runs: 100,
            width_minutes: (5, 120),
            seed: 0xc7a,
        }
    }
}

pub const LATENCY_CLASSES: [&str; 11] = [
    "starts_with_x_us",
    "ends_with_x_us",
    "from_x_to_y_us",
    "uses_x_us",
    "starts_with_x_t_us",
    "ends_with_x_t_us",
    "uses_x_t_us",
    "from_x_to_y_strong_us",
    "from_x_to_y_weak_us",
    "starts_t_us",
    "uses_t_us",
];

pub const TOPK_CLASSES: [&str; 8] = [
    "top_k10_seq_us",
    "top_k10_bin_us",
    "top_k100_seq_us",
    "top_k100_bin_us",
    "top_k_starts10_seq_us",
    "top_k_starts10_bin_us",
    "top_k_starts100_seq_us",
    "top_k_starts100_bin_us",
];

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub structure: TimeStruct,
    pub flavor: BvFlavor,
    pub t_psi: u32,
    pub interval_minutes: u32,
    pub n: u64,
    pub z: u64,
    pub spatial_bits: u64,
    pub temporal_bits: u64,
    pub spatial_baseline_bits: u64,
    pub temporal_baseline_bits: u64,
    /// Mean microseconds per query, aligned with `LATENCY_CLASSES` then
    /// `TOPK_CLASSES`.
    pub latencies_us: Vec<f64>,
}

impl BenchRow {
    pub fn spatial_ratio(&self) -> f64 {
        self.spatial_bits as f64 / self.spatial_baseline_bits as f64
    }

    pub fn temporal_ratio(&self) -> f64 {
        self.temporal_bits as f64 / self.temporal_baseline_bits as f64
    }

    pub fn total_ratio(&self) -> f64 {
        (self.spatial_bits + self.temporal_bits) as f64
            / (self.spatial_baseline_bits + self.temporal_baseline_bits) as f64
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "structure,bitvector,t_psi,interval_minutes,n,z,\
             spatial_bits,temporal_bits,spatial_ratio,temporal_ratio,total_ratio",
        );
        for c in LATENCY_CLASSES.iter().chain(TOPK_CLASSES.iter()) {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.4},{:.4},{:.4}",
                r.structure.name(),
                r.flavor.name(),
                r.t_psi,
                r.interval_minutes,
                r.n,
                r.z,
                r.spatial_bits,
                r.temporal_bits,
                r.spatial_ratio(),
                r.temporal_ratio(),
                r.total_ratio()
            ));
            for v in &r.latencies_us {
                out.push_str(&format!(",{v:.3}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Fixed-width baseline: bits per symbol times sequence length.
pub fn spatial_baseline_bits(n: u64, sigma_s: u32) -> u64 {
    n * ceil_log2(sigma_s as u64 + 1)
}

pub fn temporal_baseline_bits(n: u64, sigma_t: u32) -> u64 {
    n * ceil_log2(sigma_t as u64)
}

fn ceil_log2(v: u64) -> u64 {
    (64 - v.max(2).saturating_sub(1).leading_zeros()) as u64
}

struct QuerySet {
    nodes: Vec<u32>,
    pairs: Vec<(u32, u32)>,
    windows: Vec<TimeWindow>,
}

fn make_query_set(store: &TripStore, spec: &QuerySpec, interval_minutes: u32) -> QuerySet {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sigma_s = store.sigma_s;
    let sigma_t = store.sigma_t;
    let nodes: Vec<u32> = (0..spec.n_queries)
        .map(|_| rng.gen_range(1..=sigma_s))
        .collect();
    // (X,Y) pairs sampled from actual trips: their initial and ending nodes.
    let pairs: Vec<(u32, u32)> = (0..spec.n_queries)
        .map(|_| {
            let t = &store.trips[rng.gen_range(0..store.trips.len())];
            (t.nodes[0], *t.nodes.last().unwrap())
        })
        .collect();
    let windows: Vec<TimeWindow> = (0..spec.n_queries)
        .map(|_| {
            let width_min = rng.gen_range(spec.width_minutes.0..=spec.width_minutes.1);
            let width_codes = (width_min / interval_minutes).max(1);
            let t1 = rng.gen_range(0..sigma_t);
            let t2 = (t1 + width_codes - 1).min(sigma_t - 1);
            TimeWindow::new(t1, t2)
        })
        .collect();
    QuerySet {
        nodes,
        pairs,
        windows,
    }
}

const WARMUP: usize = 100;

/// Mean microseconds per call over the set, first `WARMUP` calls excluded.
fn time_class(total: usize, mut f: impl FnMut(usize) -> u64) -> f64 {
    for i in 0..WARMUP.min(total) {
        black_box(f(i));
    }
    let start = Instant::now();
    let mut acc = 0u64;
    for i in 0..total {
        acc = acc.wrapping_add(f(i));
    }
    black_box(acc);
    start.elapsed().as_secs_f64() * 1e6 / total as f64
}

/// Build one index per configuration on the same trips and measure it.
/// `make_discretizer` maps interval minutes to the discretizer to use.
pub fn run_bench(
    trips: &[RawTrip],
    configs: &[BenchConfig],
    make_discretizer: &dyn Fn(u32) -> Result<TimeDiscretizer>,
    spec: &QuerySpec,
) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    let mut cache: Option<(u32, TripStore)> = None;
    for cfg in configs {
        if cache.as_ref().map(|(i, _)| *i) != Some(cfg.interval_minutes) {
            let d = make_discretizer(cfg.interval_minutes)?;
            cache = Some((cfg.interval_minutes, TripStore::build(trips, &d, None)?));
        }
        let (_, store) = cache.as_ref().unwrap();
        let index = CtrIndex::build(
            store,
            &BuildConfig {
                t_psi: cfg.t_psi,
                time_struct: cfg.time_struct,
                flavor: cfg.flavor,
            },
        );
        let qs = make_query_set(store, spec, cfg.interval_minutes);
        report.rows.push(measure(cfg, &index, &qs, spec));
    }
    Ok(report)
}

fn measure(cfg: &BenchConfig, index: &CtrIndex, qs: &QuerySet, spec: &QuerySpec) -> BenchRow {
    let n = index.n();
    let nq = qs.nodes.len();
    let mut latencies = Vec::new();
    let node = |i: usize| qs.nodes[i % nq];
    let pair = |i: usize| qs.pairs[i % nq];
    let win = |i: usize| qs.windows[i % nq];

    latencies.push(time_class(nq, |i| {
        index.starts_with_x(node(i), None).unwrap()
    }));
    latencies.push(time_class(nq, |i| index.ends_with_x(node(i), None).unwrap()));
    latencies.push(time_class(nq, |i| {
        let (x, y) = pair(i);
        index.from_x_to_y(x, y)
    }));
    latencies.push(time_class(nq, |i| index.uses_x(node(i), None).unwrap()));
    latencies.push(time_class(nq, |i| {
        index.starts_with_x(node(i), Some(win(i))).unwrap()
    }));
    latencies.push(time_class(nq, |i| {
        index.ends_with_x(node(i), Some(win(i))).unwrap()
    }));
    latencies.push(time_class(nq, |i| {
        index.uses_x(node(i), Some(win(i))).unwrap()
    }));
    latencies.push(time_class(nq, |i| {
        let (x, y) = pair(i);
        index.from_x_to_y_strong(x, y, win(i)).unwrap()
    }));
    latencies.push(time_class(nq, |i| {
        let (x, y) = pair(i);
        index.from_x_to_y_weak(x, y, win(i)).unwrap()
    }));
    latencies.push(time_class(nq, |i| index.starts_t(win(i)).unwrap()));
    latencies.push(time_class(nq, |i| index.uses_t(win(i)).unwrap()));

    for k in [10usize, 100] {
        for strategy in [TopKStrategy::Sequential, TopKStrategy::BinaryPartition] {
            latencies.push(time_class(spec.topk_runs, |i| {
                index
                    .top_k(k, strategy, Some(win(i)))
                    .unwrap()
                    .len() as u64
            }));
        }
    }
    for k in [10usize, 100] {
        for strategy in [TopKStrategy::Sequential, TopKStrategy::BinaryPartition] {
            latencies.push(time_class(spec.topk_runs, |i| {
                index
                    .top_k_starts(k, strategy, Some(win(i)))
                    .unwrap()
                    .len() as u64
            }));
        }
    }

    BenchRow {
        structure: cfg.time_struct,
        flavor: cfg.flavor,
        t_psi: cfg.t_psi,
        interval_minutes: cfg.interval_minutes,
        n,
        z: index.z(),
        spatial_bits: index.spatial.size_bits(),
        temporal_bits: index.temporal.size_bits(),
        spatial_baseline_bits: spatial_baseline_bits(n, index.sigma_s()),
        temporal_baseline_bits: temporal_baseline_bits(n, index.sigma_t()),
        latencies_us: latencies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate_dataset, NetworkModel, TimeDistKind};
    use crate::trip::{DayTypeTable, TimeMode};

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(314), 9, "9-bit node ids for 313 nodes plus $");
        assert_eq!(ceil_log2(2304), 12);
        assert_eq!(ceil_log2(384), 9);
    }

    #[test]
    fn small_bench_produces_csv() {
        let model = NetworkModel::madrid_like();
        let trips = generate_dataset(&model, 300, TimeDistKind::Skewed, 28, 11);
        let configs = vec![
            BenchConfig {
                time_struct: TimeStruct::Wtht,
                flavor: BvFlavor::Plain,
                t_psi: 32,
                interval_minutes: 5,
            },
            BenchConfig {
                time_struct: TimeStruct::Wm,
                flavor: BvFlavor::Rrr64,
                t_psi: 128,
                interval_minutes: 30,
            },
        ];
        let spec = QuerySpec {
            n_queries: 50,
            topk_runs: 3,
            ..QuerySpec::default()
        };
        let make = |interval: u32| {
            TimeDiscretizer::new(
                interval,
                TimeMode::DayTypes,
                0,
                Some(DayTypeTable::eight_classes()),
            )
        };
        let report = run_bench(&trips, &configs, &make, &spec).unwrap();
        assert_eq!(report.rows.len(), 2);
        let csv = report.to_csv();
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("structure,bitvector,t_psi"));
        assert_eq!(lines.count(), 2);
        for row in &report.rows {
            assert_eq!(
                row.latencies_us.len(),
                LATENCY_CLASSES.len() + TOPK_CLASSES.len()
            );
            assert!(row.spatial_ratio() > 0.0 && row.spatial_ratio() < 2.0);
        }
    }
}
