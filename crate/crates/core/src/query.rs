//! The composed queryable index and the counting-query catalogue:
//! spatial, temporal, and spatio-temporal queries plus the two top-k
//! strategies. All queries are read-only; a built index is safe to share
//! across threads.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::align::align_times;
use crate::bits::BvFlavor;
use crate::csa::{PatSym, SaRange, SpatialIndex};
use crate::error::{CtrError, Result};
use crate::io::{crc32, ByteReader, ByteWriter, FORMAT_VERSION, MAGIC};
use crate::sais::suffix_array;
use crate::trip::{TimeDiscretizer, TripStore};
use crate::wavelet::{TemporalIndex, TimeStruct};

/// Inclusive time-code window.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TimeWindow {
    pub t1: u32,
    pub t2: u32,
}

impl TimeWindow {
    pub fn new(t1: u32, t2: u32) -> TimeWindow {
        TimeWindow { t1, t2 }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TopKStrategy {
    Sequential,
    BinaryPartition,
}

impl std::str::FromStr for TopKStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "seq" => Ok(TopKStrategy::Sequential),
            "bin" => Ok(TopKStrategy::BinaryPartition),
            _ => Err(format!("unknown top-k strategy `{s}`")),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TopKEntry {
    pub node: u32,
    pub count: u64,
}

/// Estimates for the number of trips alive in a window; the exact count
/// would need a second wavelet structure over ending times.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TripsEstimate {
    pub starts_based: u64,
    pub usage_based: f64,
}

/// Build-time configuration knobs.
#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub t_psi: u32,
    pub time_struct: TimeStruct,
    pub flavor: BvFlavor,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            t_psi: 32,
            time_struct: TimeStruct::Wtht,
            flavor: BvFlavor::Plain,
        }
    }
}

/// Everything the queries need to know about the build.
#[derive(Clone, Debug)]
pub struct IndexMeta {
    pub sigma_s: u32,
    pub sigma_t: u32,
    pub z: u64,
    pub n: u64,
    pub discretizer: TimeDiscretizer,
    pub flavor: BvFlavor,
}

/// The Compact Trip Representation: spatial CSA + temporal wavelet
/// structure + build metadata.
pub struct CtrIndex {
    pub spatial: SpatialIndex,
    pub temporal: TemporalIndex,
    pub meta: IndexMeta,
}

impl CtrIndex {
    pub fn build(store: &TripStore, cfg: &BuildConfig) -> CtrIndex {
        let sa = suffix_array(&store.s);
        let spatial = SpatialIndex::build(store, &sa, cfg.t_psi);
        let aligned = align_times(store, &sa).expect("suffix array length matches store");
        drop(sa);
        let temporal = TemporalIndex::build(
            &aligned.icode_psi,
            aligned.sigma_t as u64,
            cfg.time_struct,
            cfg.flavor,
        );
        debug_assert_eq!(spatial.n, temporal.len());
        CtrIndex {
            spatial,
            temporal,
            meta: IndexMeta {
                sigma_s: store.sigma_s,
                sigma_t: store.sigma_t,
                z: store.z,
                n: store.n,
                discretizer: store.discretizer.clone(),
                flavor: cfg.flavor,
            },
        }
    }

    pub fn z(&self) -> u64 {
        self.meta.z
    }

    pub fn n(&self) -> u64 {
        self.meta.n
    }

    pub fn sigma_s(&self) -> u32 {
        self.meta.sigma_s
    }

    pub fn sigma_t(&self) -> u32 {
        self.meta.sigma_t
    }

    pub fn mean_trip_len(&self) -> f64 {
        (self.meta.n - (self.meta.z + 1)) as f64 / self.meta.z as f64
    }

    fn check_window(&self, w: TimeWindow) -> Result<()> {
        if w.t1 > w.t2 || w.t2 >= self.meta.sigma_t {
            return Err(CtrError::WindowInvalid {
                t1: w.t1 as u64,
                t2: w.t2 as u64,
                sigma_t: self.meta.sigma_t as u64,
            });
        }
        Ok(())
    }

    /// `count` over a suffix-array range, 0 when the range is empty.
    fn windowed(&self, range: SaRange, w: TimeWindow) -> u64 {
        if range.is_empty() {
            0
        } else {
            self.temporal.count(range.lo, range.hi, w.t1, w.t2)
        }
    }

    /// Number of trips starting at node `x`, optionally within a window.
    pub fn starts_with_x(&self, x: u32, w: Option<TimeWindow>) -> Result<u64> {
        let range = self.spatial.bsearch(&[PatSym::Dollar, PatSym::Node(x)]);
        match w {
            None => Ok(range.len()),
            Some(w) => {
                self.check_window(w)?;
                Ok(self.windowed(range, w))
            }
        }
    }

    /// Number of trips ending at node `x`; the window filters by ending
    /// time (the `X$` positions are final nodes, so their aligned times
    /// are ending times).
    pub fn ends_with_x(&self, x: u32, w: Option<TimeWindow>) -> Result<u64> {
        let range = self.spatial.bsearch(&[PatSym::Node(x), PatSym::Dollar]);
        match w {
            None => Ok(range.len()),
            Some(w) => {
                self.check_window(w)?;
                Ok(self.windowed(range, w))
            }
        }
    }

    /// Number of trips from `x` to `y` (pattern `Y$X`).
    pub fn from_x_to_y(&self, x: u32, y: u32) -> u64 {
        self.spatial
            .bsearch(&[PatSym::Node(y), PatSym::Dollar, PatSym::Node(x)])
            .len()
    }

    /// Number of node visits at `x`, optionally filtered by visit time.
    pub fn uses_x(&self, x: u32, w: Option<TimeWindow>) -> Result<u64> {
        let range = self.spatial.node_range(x);
        match w {
            None => Ok(range.len()),
            Some(w) => {
                self.check_window(w)?;
                Ok(self.windowed(range, w))
            }
        }
    }

    /// Map the `Y$X` range to the `$XY` block: same size, same order, and
    /// the aligned times there are the (sorted) trip starting times.
    fn xy_blocks(&self, x: u32, y: u32) -> Option<(SaRange, SaRange)> {
        let lr = self
            .spatial
            .bsearch(&[PatSym::Node(y), PatSym::Dollar, PatSym::Node(x)]);
        if lr.is_empty() {
            return None;
        }
        let alpha = self.spatial.psi_at(lr.lo);
        let beta = alpha + (lr.hi - lr.lo);
        Some((lr, SaRange { lo: alpha, hi: beta }))
    }

    /// Trips from `x` to `y` that start and end inside the window.
    pub fn from_x_to_y_strong(&self, x: u32, y: u32, w: TimeWindow) -> Result<u64> {
        self.check_window(w)?;
        let Some((lr, se)) = self.xy_blocks(x, y) else {
            return Ok(0);
        };
        let (below, inside) = self.temporal.count_lr_parts(se.lo, se.hi, w.t1, w.t2);
        if inside == 0 {
            return Ok(0);
        }
        // Starting-time subrange maps back onto the ending-time range.
        let l2 = lr.lo + below;
        let r2 = l2 + inside - 1;
        Ok(self.temporal.count(l2, r2, w.t1, w.t2))
    }

    /// Trips from `x` to `y` whose lifetime overlaps the window: trips
    /// starting inside it, plus earlier starters that end at `t1` or later.
    pub fn from_x_to_y_weak(&self, x: u32, y: u32, w: TimeWindow) -> Result<u64> {
        self.check_window(w)?;
        let Some((lr, se)) = self.xy_blocks(x, y) else {
            return Ok(0);
        };
        let (below, inside) = self.temporal.count_lr_parts(se.lo, se.hi, w.t1, w.t2);
        let mut total = inside;
        if below > 0 {
            total += self
                .temporal
                .count(lr.lo, lr.lo + below - 1, w.t1, self.meta.sigma_t - 1);
        }
        Ok(total)
    }

    /// Trips starting inside the window: `count` over the terminator
    /// region `[2, z+1]` of the aligned times.
    pub fn starts_t(&self, w: TimeWindow) -> Result<u64> {
        self.check_window(w)?;
        Ok(self.temporal.count(2, self.meta.z + 1, w.t1, w.t2))
    }

    /// Total node visits inside the window: `count` over `[z+2, n]`.
    pub fn uses_t(&self, w: TimeWindow) -> Result<u64> {
        self.check_window(w)?;
        Ok(self.temporal.count(self.meta.z + 2, self.meta.n, w.t1, w.t2))
    }

    /// Both documented estimates of "trips alive in the window"; neither
    /// is exact without an ending-times structure.
    pub fn trips_t_estimate(&self, w: TimeWindow) -> Result<TripsEstimate> {
        let starts = self.starts_t(w)?;
        let uses = self.uses_t(w)?;
        Ok(TripsEstimate {
            starts_based: starts,
            usage_based: uses as f64 / self.mean_trip_len(),
        })
    }

    fn topk_sort(mut entries: Vec<TopKEntry>, k: usize) -> Vec<TopKEntry> {
        entries.sort_by(|a, b| b.count.cmp(&a.count).then(a.node.cmp(&b.node)));
        entries.truncate(k);
        entries
    }

    /// The k nodes with most visits (optionally: visits inside a window).
    pub fn top_k(&self, k: usize, strategy: TopKStrategy, w: Option<TimeWindow>) -> Result<Vec<TopKEntry>> {
        if let Some(w) = w {
            self.check_window(w)?;
        }
        let count_of = |range: SaRange| -> u64 {
            match w {
                None => range.len(),
                Some(w) => self.windowed(range, w),
            }
        };
        Ok(match strategy {
            TopKStrategy::Sequential => self.topk_sequential(k, &count_of),
            TopKStrategy::BinaryPartition => self.topk_binary(k, &count_of),
        })
    }

    /// The k nodes where most trips start.
    pub fn top_k_starts(
        &self,
        k: usize,
        strategy: TopKStrategy,
        w: Option<TimeWindow>,
    ) -> Result<Vec<TopKEntry>> {
        if let Some(w) = w {
            self.check_window(w)?;
        }
        let count_of = |range: SaRange| -> u64 {
            match w {
                None => range.len(),
                Some(w) => self.windowed(range, w),
            }
        };
        Ok(match strategy {
            TopKStrategy::Sequential => self.topk_starts_sequential(k, &count_of),
            TopKStrategy::BinaryPartition => self.topk_starts_binary(k, &count_of),
        })
    }

    /// Sequential strategy: a size-k min-heap over every vocabulary node.
    fn topk_sequential(&self, k: usize, count_of: &dyn Fn(SaRange) -> u64) -> Vec<TopKEntry> {
        let mut heap: BinaryHeap<Reverse<(u64, Reverse<u32>)>> = BinaryHeap::with_capacity(k + 1);
        for p in 2..=self.spatial.vocab_len() {
            let node = self.spatial.vocab_node(p);
            let count = count_of(self.spatial.vocab_range(p));
            if count == 0 {
                continue;
            }
            // Replace the root only on strictly higher counts, so equal
            // counts keep the smaller node id already in the heap.
            if heap.len() < k {
                heap.push(Reverse((count, Reverse(node))));
            } else if let Some(&Reverse((min, _))) = heap.peek() {
                if count > min {
                    heap.pop();
                    heap.push(Reverse((count, Reverse(node))));
                }
            }
        }
        let entries = heap
            .into_iter()
            .map(|Reverse((count, Reverse(node)))| TopKEntry { node, count })
            .collect();
        Self::topk_sort(entries, k)
    }

    fn topk_starts_sequential(&self, k: usize, count_of: &dyn Fn(SaRange) -> u64) -> Vec<TopKEntry> {
        let mut entries = Vec::new();
        for p in 2..=self.spatial.vocab_len() {
            let node = self.spatial.vocab_node(p);
            let range = self
                .spatial
                .bsearch(&[PatSym::Dollar, PatSym::Node(node)]);
            let count = count_of(range);
            if count > 0 {
                entries.push(TopKEntry { node, count });
            }
        }
        Self::topk_sort(entries, k)
    }

    /// Binary-partition strategy: a priority queue of vocabulary segments
    /// split in half until singletons pop out in decreasing count order.
    fn topk_binary(&self, k: usize, count_of: &dyn Fn(SaRange) -> u64) -> Vec<TopKEntry> {
        let vlen = self.spatial.vocab_len();
        let first = SaRange {
            lo: self.spatial.select_d(2),
            hi: self.meta.n,
        };
        self.topk_binary_run(k, count_of, 2, vlen, first, &|_, m| {
            // Segment [i, m-1] / [m, j] split at the start of V[m]'s range.
            self.spatial.select_d(m)
        })
    }

    fn topk_starts_binary(&self, k: usize, count_of: &dyn Fn(SaRange) -> u64) -> Vec<TopKEntry> {
        let vlen = self.spatial.vocab_len();
        let first = SaRange {
            lo: 2,
            hi: self.meta.z + 1,
        };
        self.topk_binary_run(k, count_of, 2, vlen, first, &|_, m| {
            let node = self.spatial.vocab_node(m);
            self.spatial
                .bsearch(&[PatSym::Dollar, PatSym::Node(node)])
                .lo
        })
    }

    fn topk_binary_run(
        &self,
        k: usize,
        count_of: &dyn Fn(SaRange) -> u64,
        i0: u64,
        j0: u64,
        first: SaRange,
        split_at: &dyn Fn(u64, u64) -> u64,
    ) -> Vec<TopKEntry> {
        // Max-heap on (count, leftmost segment first): on count ties the
        // smallest vocabulary index pops first, which keeps the final
        // ordering deterministic.
        type Segment = (u64, Reverse<u64>, u64, u64, u64); // (priority, i, j, lo, hi)
        let mut queue: BinaryHeap<Segment> = BinaryHeap::new();
        let mut out = Vec::with_capacity(k);
        if i0 > j0 || first.is_empty() {
            return out;
        }
        let p0 = count_of(first);
        if p0 > 0 {
            queue.push((p0, Reverse(i0), j0, first.lo, first.hi));
        }
        while out.len() < k {
            let Some((priority, Reverse(i), j, lo, hi)) = queue.pop() else {
                break;
            };
            if i == j {
                out.push(TopKEntry {
                    node: self.spatial.vocab_node(i),
                    count: priority,
                });
                continue;
            }
            let m = i + (j - i + 1) / 2;
            let q = split_at(i, m).max(lo).min(hi + 1);
            for (ci, cj, clo, chi) in [(i, m - 1, lo, q - 1), (m, j, q, hi)] {
                if clo <= chi {
                    let p = count_of(SaRange { lo: clo, hi: chi });
                    if p > 0 {
                        queue.push((p, Reverse(ci), cj, clo, chi));
                    }
                }
            }
        }
        Self::topk_sort(out, k)
    }

    /// Serialize to the `CTR1` container: magic, version, build-config
    /// block, spatial section, temporal section, CRC-32 over all of it.
    pub fn save(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.put_bytes(MAGIC);
        w.put_u16(FORMAT_VERSION);
        let mut cfg = ByteWriter::new();
        cfg.put_u32(self.spatial.t_psi());
        cfg.put_u8(self.temporal.kind().tag());
        cfg.put_u8(self.meta.flavor.tag());
        cfg.put_u32(self.meta.sigma_s);
        cfg.put_u32(self.meta.sigma_t);
        cfg.put_u64(self.meta.z);
        cfg.put_u64(self.meta.n);
        self.meta.discretizer.encode(&mut cfg);
        w.put_section(&cfg.into_bytes());
        let mut spatial = ByteWriter::new();
        self.spatial.encode(&mut spatial);
        w.put_section(&spatial.into_bytes());
        let mut temporal = ByteWriter::new();
        self.temporal.encode(&mut temporal);
        w.put_section(&temporal.into_bytes());
        let mut bytes = w.into_bytes();
        let checksum = crc32(&bytes);
        bytes.extend_from_slice(&checksum.to_le_bytes());
        bytes
    }

    pub fn load(bytes: &[u8]) -> Result<CtrIndex> {
        if bytes.len() < MAGIC.len() + 2 + 4 {
            return Err(CtrError::Format("file too short".into()));
        }
        let (payload, tail) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes(tail.try_into().unwrap());
        let computed = crc32(payload);
        if stored != computed {
            return Err(CtrError::ChecksumMismatch { stored, computed });
        }
        let mut r = ByteReader::new(payload);
        if r.get_bytes(MAGIC.len())? != MAGIC {
            return Err(CtrError::Format("bad magic".into()));
        }
        let version = r.get_u16()?;
        if version != FORMAT_VERSION {
            return Err(CtrError::Format(format!("unsupported version {version}")));
        }
        let cfg_bytes = r.get_section()?;
        let mut cfg = ByteReader::new(cfg_bytes);
        let t_psi = cfg.get_u32()?;
        let kind = TimeStruct::from_tag(cfg.get_u8()?)?;
        let flavor = BvFlavor::from_tag(cfg.get_u8()?)?;
        let sigma_s = cfg.get_u32()?;
        let sigma_t = cfg.get_u32()?;
        let z = cfg.get_u64()?;
        let n = cfg.get_u64()?;
        let discretizer = TimeDiscretizer::decode(&mut cfg)?;
        cfg.expect_end()?;
        let spatial_bytes = r.get_section()?;
        let mut sr = ByteReader::new(spatial_bytes);
        let spatial = SpatialIndex::decode(&mut sr)?;
        sr.expect_end()?;
        let temporal_bytes = r.get_section()?;
        let mut tr = ByteReader::new(temporal_bytes);
        let temporal = TemporalIndex::decode(&mut tr)?;
        tr.expect_end()?;
        r.expect_end()?;
        if spatial.n != n || temporal.len() != n || spatial.z != z {
            return Err(CtrError::Format("section shape mismatch".into()));
        }
        if spatial.t_psi() != t_psi || temporal.kind() != kind {
            return Err(CtrError::Format("config/section mismatch".into()));
        }
        Ok(CtrIndex {
            spatial,
            temporal,
            meta: IndexMeta {
                sigma_s,
                sigma_t,
                z,
                n,
                discretizer,
                flavor,
            },
        })
    }
}
