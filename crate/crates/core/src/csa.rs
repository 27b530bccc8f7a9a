//! Spatial self-index: a compressed suffix array over the mapped trip
//! sequence, modified so that each trip terminator's Psi entry points back
//! to the first node of its own trip. Following Psi from a terminator
//! therefore walks the trip's nodes cyclically, which is what turns
//! pattern searches like `$X`, `X$`, and `Y$X` into trip-counting queries.

use crate::bits::packed::{read_bits, BitCursor, PackedWriter};
use crate::bits::SparseBitvector;
use crate::error::{CtrError, Result};
use crate::io::{ByteReader, ByteWriter};
use crate::sais::suffix_array;
use crate::trip::TripStore;

/// A pattern symbol over the collapsed vocabulary: the terminator class or
/// a node id.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PatSym {
    Dollar,
    Node(u32),
}

/// Inclusive suffix-array range; empty when `lo > hi`. `lo` remains the
/// insertion boundary even for empty results, which the binary-partition
/// top-k needs to split vocabulary segments that contain absent prefixes.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SaRange {
    pub lo: u64,
    pub hi: u64,
}

impl SaRange {
    pub const EMPTY: SaRange = SaRange { lo: 1, hi: 0 };

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            self.hi - self.lo + 1
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpatialIndex {
    pub n: u64,
    pub z: u64,
    /// Node ids present in the trips, ascending. Vocabulary index 1 is the
    /// collapsed `$`; index p >= 2 is `vocab[p - 2]`.
    vocab: Vec<u32>,
    /// First-symbol group boundaries in suffix-array order.
    d: SparseBitvector,
    psi: CompressedPsi,
}

impl SpatialIndex {
    /// Build from a store; the suffix array is consumed here and discarded
    /// by the caller afterwards.
    pub fn build(store: &TripStore, sa: &[u32], t_psi: u32) -> SpatialIndex {
        let n = store.n;
        assert_eq!(sa.len() as u64, n);
        let z = store.z;

        // inverse permutation: text position -> 1-based SA index
        let mut inv = vec![0u32; n as usize];
        for (i, &p) in sa.iter().enumerate() {
            inv[p as usize] = i as u32 + 1;
        }

        // Standard Psi with the usual wrap at A[i] = n.
        let mut psi = vec![0u64; n as usize];
        for i in 0..n as usize {
            let p = sa[i] as u64;
            psi[i] = if p + 1 == n {
                inv[0] as u64
            } else {
                inv[p as usize + 1] as u64
            };
        }

        // Cyclic modification: the terminator of sorted trip t sits at SA
        // position t+1; point it at the trip's first node. Psi[1] (the
        // trailing terminator) keeps its standard value and is unused by
        // every query.
        let mut start = 0u64; // text position of the current trip's first node
        for (t, trip) in store.trips.iter().enumerate() {
            debug_assert_eq!(store.s[sa[t + 1] as usize] as usize, t + 1);
            psi[t + 1] = inv[start as usize] as u64;
            start += trip.nodes.len() as u64 + 1;
        }

        // D marks first-symbol class changes, with all terminators
        // collapsed into one leading `$` class.
        let class_of = |sym: u32| -> u32 {
            if sym as u64 <= z {
                0
            } else {
                sym - z as u32
            }
        };
        let mut ones = Vec::new();
        let mut vocab = Vec::new();
        let mut prev_class = None;
        for (i, &p) in sa.iter().enumerate() {
            let class = class_of(store.s[p as usize]);
            if prev_class != Some(class) {
                ones.push(i as u64); // 0-based position of the 1 bit
                if class != 0 {
                    vocab.push(class);
                }
                prev_class = Some(class);
            }
        }
        let d = SparseBitvector::from_ones(&ones, n);
        debug_assert_eq!(d.count_ones(), vocab.len() as u64 + 1);

        SpatialIndex {
            n,
            z,
            vocab,
            d,
            psi: CompressedPsi::build(&psi, t_psi),
        }
    }

    pub fn build_from_store(store: &TripStore, t_psi: u32) -> (SpatialIndex, Vec<u32>) {
        let sa = suffix_array(&store.s);
        let idx = SpatialIndex::build(store, &sa, t_psi);
        (idx, sa)
    }

    pub fn t_psi(&self) -> u32 {
        self.psi.t_psi
    }

    pub fn vocab_len(&self) -> u64 {
        self.vocab.len() as u64 + 1
    }

    /// Node id at vocabulary position `p >= 2` (1 is `$`).
    pub fn vocab_node(&self, p: u64) -> u32 {
        self.vocab[p as usize - 2]
    }

    /// Vocabulary position of node `x`, if present in any trip.
    pub fn vocab_index(&self, x: u32) -> Option<u64> {
        self.vocab.binary_search(&x).ok().map(|i| i as u64 + 2)
    }

    /// Psi[i], decoded from the nearest preceding absolute sample.
    #[inline]
    pub fn psi_at(&self, i: u64) -> u64 {
        assert!(i >= 1 && i <= self.n, "psi position {i} out of range");
        self.psi.get(i - 1)
    }

    pub fn rank_d(&self, i: u64) -> u64 {
        self.d.rank1(i)
    }

    pub fn select_d(&self, k: u64) -> u64 {
        self.d.select1(k)
    }

    /// Suffix-array range of suffixes starting with vocabulary entry `p`.
    pub fn vocab_range(&self, p: u64) -> SaRange {
        let lo = self.d.select1(p);
        let hi = if p == self.vocab_len() {
            self.n
        } else {
            self.d.select1(p + 1) - 1
        };
        SaRange { lo, hi }
    }

    /// Range of suffixes starting with node `x`; empty for unseen ids.
    pub fn node_range(&self, x: u32) -> SaRange {
        match self.vocab_index(x) {
            Some(p) => self.vocab_range(p),
            None => SaRange::EMPTY,
        }
    }

    fn sym_range(&self, sym: PatSym) -> SaRange {
        match sym {
            // Position 1 is the trailing terminator, which ends no trip;
            // `$` as a pattern symbol means a per-trip terminator.
            PatSym::Dollar => SaRange { lo: 2, hi: self.z + 1 },
            PatSym::Node(x) => self.node_range(x),
        }
    }

    /// Backward search: refine the suffix-array range right to left, one
    /// vocabulary-range refinement per pattern symbol.
    pub fn bsearch(&self, pattern: &[PatSym]) -> SaRange {
        assert!(!pattern.is_empty(), "empty pattern");
        let mut range = self.sym_range(*pattern.last().unwrap());
        for &sym in pattern[..pattern.len() - 1].iter().rev() {
            let outer = self.sym_range(sym);
            if outer.is_empty() {
                return SaRange::EMPTY;
            }
            range = self.refine(outer, range);
        }
        range
    }

    /// Sub-range of `outer` whose Psi values fall inside `target`. Within a
    /// node range Psi is strictly increasing; within the `$` range it is
    /// increasing at node-range granularity, which is all the predicate
    /// needs when `target` spans whole blocks.
    fn refine(&self, outer: SaRange, target: SaRange) -> SaRange {
        if target.is_empty() {
            // Keep the insertion boundary meaningful: first position whose
            // Psi reaches target.lo.
            let lo = self.lower_bound(outer, target.lo);
            return SaRange { lo, hi: lo.saturating_sub(1) };
        }
        let lo = self.lower_bound(outer, target.lo);
        let hi = self.upper_bound(outer, target.hi);
        SaRange { lo, hi }
    }

    /// First i in `outer` with Psi[i] >= bound (or outer.hi + 1).
    fn lower_bound(&self, outer: SaRange, bound: u64) -> u64 {
        let mut lo = outer.lo;
        let mut hi = outer.hi + 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.psi_at(mid) < bound {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Last i in `outer` with Psi[i] <= bound (or outer.lo - 1).
    fn upper_bound(&self, outer: SaRange, bound: u64) -> u64 {
        let mut lo = outer.lo;
        let mut hi = outer.hi + 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.psi_at(mid) <= bound {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo - 1
    }

    /// Vocabulary position of the first symbol of the suffix at SA index i.
    pub fn first_symbol(&self, i: u64) -> u64 {
        self.d.rank1(i)
    }

    /// Reconstruct the nodes of sorted trip `t` (1-based) by following the
    /// cyclic Psi from its terminator entry.
    pub fn trip_nodes(&self, t: u64) -> Vec<u32> {
        assert!(t >= 1 && t <= self.z);
        let mut nodes = Vec::new();
        let mut p = self.psi_at(t + 1);
        loop {
            let v = self.first_symbol(p);
            if v == 1 {
                break; // back at a terminator: trip closed
            }
            nodes.push(self.vocab_node(v));
            p = self.psi_at(p);
        }
        nodes
    }

    /// Storage footprint of the whole spatial section in bits.
    pub fn size_bits(&self) -> u64 {
        self.psi.size_bits() + self.d.size_bits() + self.vocab.len() as u64 * 32
    }

    pub fn encode(&self, w: &mut ByteWriter) {
        w.put_u64(self.n);
        w.put_u64(self.z);
        w.put_u32_slice(&self.vocab);
        self.d.encode(w);
        self.psi.encode(w);
    }

    pub fn decode(r: &mut ByteReader) -> Result<SpatialIndex> {
        Ok(SpatialIndex {
            n: r.get_u64()?,
            z: r.get_u64()?,
            vocab: r.get_u32_slice()?,
            d: SparseBitvector::decode(r)?,
            psi: CompressedPsi::decode(r)?,
        })
    }
}

/// Sampled, gap-compressed Psi. Entries are split into blocks of `t_psi`;
/// each block stores an absolute sample, the bit offset of its token
/// stream, and a Rice parameter. Tokens cover the remaining entries:
///
/// - flag `0`, then gamma(len): a maximal run of `len` +1 gaps;
/// - flag `1`, then Rice_k(zigzag(gap)): a single gap (never +1).
///
/// The Rice parameter is chosen per block to minimize the block's bits,
/// so terminator-region blocks (large jumps) and node-region blocks
/// (small local jumps) each get a fitting code.
#[derive(Clone, Debug)]
struct CompressedPsi {
    n: u64,
    t_psi: u32,
    /// Packed directory: per block, sample (`sample_width` bits), stream
    /// bit offset (`offset_width` bits), and Rice k (RICE_K_BITS bits).
    directory: Vec<u64>,
    sample_width: u32,
    offset_width: u32,
    stream: Vec<u64>,
    stream_bits: u64,
}

const RICE_K_BITS: u32 = 6;
const RICE_K_MAX: u32 = 40;
/// Entries per Rice-parameter context within a block.
const RICE_CHUNK: u64 = 32;

impl CompressedPsi {
    /// `psi` holds 1-based values at 0-based indices.
    fn build(psi: &[u64], t_psi: u32) -> CompressedPsi {
        assert!(t_psi >= 2, "sampling interval too small");
        let n = psi.len() as u64;
        let mut stream = PackedWriter::new();
        let mut blocks: Vec<(u64, u64)> = Vec::new(); // (sample, offset)
        let mut i = 0usize;
        while i < psi.len() {
            let end = (i + t_psi as usize).min(psi.len());
            let block = &psi[i..end];
            blocks.push((block[0], stream.len()));
            encode_block(&mut stream, block);
            i = end;
        }
        let sample_width = bits_for(blocks.iter().map(|b| b.0).max().unwrap_or(0));
        let offset_width = bits_for(stream.len());
        let mut directory = PackedWriter::new();
        for &(sample, offset) in &blocks {
            directory.push(sample, sample_width);
            directory.push(offset, offset_width);
        }
        CompressedPsi {
            n,
            t_psi,
            directory: directory.into_words(),
            sample_width,
            offset_width,
            stream_bits: stream.len(),
            stream: stream.into_words(),
        }
    }

    fn n_blocks(&self) -> u64 {
        (self.n + self.t_psi as u64 - 1) / self.t_psi as u64
    }

    fn entry_width(&self) -> u64 {
        (self.sample_width + self.offset_width) as u64
    }

    /// Psi value at 0-based index `i`, decoding at most one block.
    fn get(&self, i: u64) -> u64 {
        let block = i / self.t_psi as u64;
        let target = i % self.t_psi as u64; // block-relative entry index
        let base = block * self.entry_width();
        let mut value = read_bits(&self.directory, base, self.sample_width);
        if target == 0 {
            return value;
        }
        let offset = read_bits(
            &self.directory,
            base + self.sample_width as u64,
            self.offset_width,
        );
        let mut cursor = BitCursor::new(&self.stream, offset);
        let mut next = 1u64; // next entry to decode
        let mut k = 0u32;
        loop {
            if next == 1 || next % RICE_CHUNK == 0 {
                k = cursor.read(RICE_K_BITS) as u32;
            }
            if cursor.read_bit() {
                let zz = cursor.read_rice(k);
                value = (value as i64 + unzigzag(zz)) as u64;
                if next == target {
                    return value;
                }
                next += 1;
            } else {
                let run = cursor.read_gamma();
                if target < next + run {
                    return value + (target - next + 1);
                }
                value += run;
                next += run;
            }
        }
    }

    fn size_bits(&self) -> u64 {
        self.n_blocks() * self.entry_width() + self.stream_bits
    }

    fn encode(&self, w: &mut ByteWriter) {
        w.put_u64(self.n);
        w.put_u32(self.t_psi);
        w.put_u32(self.sample_width);
        w.put_u32(self.offset_width);
        w.put_u64(self.stream_bits);
        w.put_u64_slice(&self.directory);
        w.put_u64_slice(&self.stream);
    }

    fn decode(r: &mut ByteReader) -> Result<CompressedPsi> {
        let n = r.get_u64()?;
        let t_psi = r.get_u32()?;
        if t_psi < 2 {
            return Err(CtrError::Format("psi sampling interval too small".into()));
        }
        Ok(CompressedPsi {
            n,
            t_psi,
            sample_width: r.get_u32()?,
            offset_width: r.get_u32()?,
            stream_bits: r.get_u64()?,
            directory: r.get_u64_slice()?,
            stream: r.get_u64_slice()?,
        })
    }
}

/// Tokenize entries `[from, to)` of a block into (+1 runs, other gaps);
/// runs never cross `to`.
fn chunk_tokens(
    block: &[u64],
    from: usize,
    to: usize,
) -> impl Iterator<Item = std::result::Result<u64, u64>> + '_ {
    // Ok(run length) | Err(zigzag gap)
    let mut j = from;
    std::iter::from_fn(move || {
        if j >= to {
            return None;
        }
        if block[j] == block[j - 1] + 1 {
            let mut run = 1u64;
            while j + (run as usize) < to
                && block[j + run as usize] == block[j + run as usize - 1] + 1
            {
                run += 1;
            }
            j += run as usize;
            Some(Ok(run))
        } else {
            let gap = block[j] as i64 - block[j - 1] as i64;
            j += 1;
            Some(Err(zigzag(gap)))
        }
    })
}

/// Smallest k minimizing the Rice-coded size of the chunk's gap tokens.
fn best_rice_k(block: &[u64], from: usize, to: usize) -> u32 {
    let zzs: Vec<u64> = chunk_tokens(block, from, to).filter_map(|t| t.err()).collect();
    if zzs.is_empty() {
        return 0;
    }
    let mut best = (u64::MAX, 0u32);
    for k in 0..=RICE_K_MAX {
        let bits: u64 = zzs.iter().map(|&zz| (zz >> k) + 1 + k as u64).sum();
        if bits < best.0 {
            best = (bits, k);
        }
    }
    best.1
}

/// Encode a block as RICE_CHUNK-entry chunks, each prefixed by its own
/// Rice parameter. The chunk structure is independent of `t_psi`, so the
/// stream content does not grow with sparser sampling.
fn encode_block(stream: &mut PackedWriter, block: &[u64]) {
    let mut from = 1usize;
    while from < block.len() {
        let to = (if from == 1 { RICE_CHUNK as usize } else { from + RICE_CHUNK as usize })
            .min(block.len());
        let k = best_rice_k(block, from, to);
        stream.push(k as u64, RICE_K_BITS);
        for token in chunk_tokens(block, from, to) {
            match token {
                Ok(run) => {
                    stream.push_bit(false);
                    stream.push_gamma(run);
                }
                Err(zz) => {
                    stream.push_bit(true);
                    stream.push_rice(zz, k);
                }
            }
        }
        from = to;
    }
}

fn bits_for(max_value: u64) -> u32 {
    64 - max_value.max(1).leading_zeros()
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trip::fixtures::example1_store;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn example1_index(t_psi: u32) -> SpatialIndex {
        let store = example1_store();
        SpatialIndex::build_from_store(&store, t_psi).0
    }

    #[test]
    fn compressed_psi_roundtrip_random() {
        let mut rng = StdRng::seed_from_u64(3);
        for &t_psi in &[2u32, 8, 32, 128] {
            for _ in 0..20 {
                let n = rng.gen_range(1..500usize);
                // mix of runs and jumps
                let mut vals = Vec::with_capacity(n);
                let mut v = rng.gen_range(1..1000u64);
                for _ in 0..n {
                    vals.push(v);
                    if rng.gen_bool(0.7) {
                        v += 1;
                    } else {
                        v = rng.gen_range(1..1000u64);
                    }
                }
                let c = CompressedPsi::build(&vals, t_psi);
                for (i, &want) in vals.iter().enumerate() {
                    assert_eq!(c.get(i as u64), want, "t_psi={t_psi} i={i}");
                }
            }
        }
    }

    #[test]
    fn psi_identical_across_sampling() {
        let store = example1_store();
        let (a, _) = SpatialIndex::build_from_store(&store, 32);
        let (b, _) = SpatialIndex::build_from_store(&store, 128);
        let (c, _) = SpatialIndex::build_from_store(&store, 512);
        for i in 1..=store.n {
            let v = a.psi_at(i);
            assert_eq!(v, b.psi_at(i));
            assert_eq!(v, c.psi_at(i));
        }
    }

    #[test]
    fn example1_psi_values() {
        let idx = example1_index(32);
        // Worked-example Psi chain of the first trip plus its cyclic entry.
        assert_eq!(idx.psi_at(8), 10);
        assert_eq!(idx.psi_at(10), 14);
        assert_eq!(idx.psi_at(14), 2);
        assert_eq!(idx.psi_at(2), 8);
        // Fourth trip's terminator points at its first node.
        assert_eq!(idx.psi_at(5), 12);
        assert_eq!(idx.rank_d(12), 3);
        assert_eq!(idx.vocab_node(3), 2);
        assert_eq!(idx.psi_at(12), 16);
        assert_eq!(idx.rank_d(16), 4);
        assert_eq!(idx.vocab_node(4), 3);
    }

    #[test]
    fn example1_node_ranges() {
        let idx = example1_index(32);
        let r = idx.node_range(3);
        assert_eq!((r.lo, r.hi), (14, 18), "node 3 covers five suffixes");
        assert_eq!(r.len(), 5);
        assert!(idx.node_range(99).is_empty());
        // Frequencies over all nodes sum to the node entries of S.
        let total: u64 = (1..=10).map(|x| idx.node_range(x).len()).sum();
        assert_eq!(total, idx.n - (idx.z + 1));
    }

    #[test]
    fn example1_bsearch() {
        let idx = example1_index(32);
        // Two trips start at node 1.
        let r = idx.bsearch(&[PatSym::Dollar, PatSym::Node(1)]);
        assert_eq!(r.len(), 2);
        // One trip ends at node 6.
        let r = idx.bsearch(&[PatSym::Node(6), PatSym::Dollar]);
        assert_eq!(r.len(), 1);
        // Nodes absent from every trip give empty results.
        assert!(idx.bsearch(&[PatSym::Node(42)]).is_empty());
        assert!(idx
            .bsearch(&[PatSym::Dollar, PatSym::Node(42)])
            .is_empty());
        // from 1 to 3: pattern 3$1.
        let r = idx.bsearch(&[PatSym::Node(3), PatSym::Dollar, PatSym::Node(1)]);
        assert_eq!(r.len(), 2);
        // from 2 to 6: pattern 6$2.
        let r = idx.bsearch(&[PatSym::Node(6), PatSym::Dollar, PatSym::Node(2)]);
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn single_trip_cycles() {
        let trips = vec![crate::trip::RawTrip::new(vec![7, 8], vec![900, 1200]).unwrap()];
        let store = crate::trip::TripStore::build(&trips, &crate::trip::TimeDiscretizer::linear(5), None).unwrap();
        let (idx, _) = SpatialIndex::build_from_store(&store, 32);
        assert_eq!(idx.trip_nodes(1), vec![7, 8]);
    }

    #[test]
    fn cyclic_reconstruction_of_every_trip() {
        let store = example1_store();
        let (idx, _) = SpatialIndex::build_from_store(&store, 32);
        for (t, trip) in store.trips.iter().enumerate() {
            assert_eq!(
                idx.trip_nodes(t as u64 + 1),
                trip.nodes,
                "trip {t} reconstructs"
            );
        }
    }

    #[test]
    fn psi_is_a_permutation_off_the_trailing_entry() {
        let store = example1_store();
        let (idx, _) = SpatialIndex::build_from_store(&store, 32);
        let mut seen = vec![false; store.n as usize + 1];
        for i in 2..=store.n {
            let v = idx.psi_at(i);
            assert!(!seen[v as usize], "duplicate psi value {v}");
            seen[v as usize] = true;
        }
        assert!(!seen[1], "value 1 is reserved by the cyclic rewiring");
        assert!((2..=store.n).all(|v| seen[v as usize]));
    }

    #[test]
    fn serialization_roundtrip() {
        let idx = example1_index(32);
        let mut w = ByteWriter::new();
        idx.encode(&mut w);
        let bytes = w.into_bytes();
        let mut r = ByteReader::new(&bytes);
        let back = SpatialIndex::decode(&mut r).unwrap();
        r.expect_end().unwrap();
        for i in 1..=idx.n {
            assert_eq!(idx.psi_at(i), back.psi_at(i));
        }
        let mut w2 = ByteWriter::new();
        back.encode(&mut w2);
        assert_eq!(bytes, w2.into_bytes());
    }
}
