//! Temporal self-index: a wavelet matrix or Hu-Tucker-shaped wavelet tree
//! over an integer sequence, with access/rank/select plus the range-count
//! operations the trip queries are built from.

pub mod hu_tucker;
pub mod matrix;
pub mod tree;

pub use hu_tucker::HuTuckerCode;
pub use matrix::WaveletMatrix;
pub use tree::WaveletTree;

use crate::bits::BvFlavor;
use crate::error::{CtrError, Result};
use crate::io::{ByteReader, ByteWriter};

/// Which wavelet structure backs the temporal component.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TimeStruct {
    Wtht,
    Wm,
}

impl TimeStruct {
    pub const ALL: [TimeStruct; 2] = [TimeStruct::Wtht, TimeStruct::Wm];

    pub fn tag(self) -> u8 {
        match self {
            TimeStruct::Wtht => 0,
            TimeStruct::Wm => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(TimeStruct::Wtht),
            1 => Ok(TimeStruct::Wm),
            _ => Err(CtrError::Format(format!("unknown time structure {tag}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TimeStruct::Wtht => "wtht",
            TimeStruct::Wm => "wm",
        }
    }
}

impl std::str::FromStr for TimeStruct {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "wtht" => Ok(TimeStruct::Wtht),
            "wm" => Ok(TimeStruct::Wm),
            _ => Err(format!("unknown time structure `{s}`")),
        }
    }
}

/// The temporal component: either structure answers the same queries.
#[derive(Clone, Debug)]
pub enum TemporalIndex {
    Wtht(WaveletTree),
    Wm(WaveletMatrix),
}

impl TemporalIndex {
    pub fn build(seq: &[u32], sigma: u64, kind: TimeStruct, flavor: BvFlavor) -> TemporalIndex {
        match kind {
            TimeStruct::Wtht => TemporalIndex::Wtht(WaveletTree::build(seq, sigma, flavor)),
            TimeStruct::Wm => TemporalIndex::Wm(WaveletMatrix::build(seq, sigma, flavor)),
        }
    }

    pub fn kind(&self) -> TimeStruct {
        match self {
            TemporalIndex::Wtht(_) => TimeStruct::Wtht,
            TemporalIndex::Wm(_) => TimeStruct::Wm,
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            TemporalIndex::Wtht(t) => t.len(),
            TemporalIndex::Wm(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sigma(&self) -> u64 {
        match self {
            TemporalIndex::Wtht(t) => t.sigma(),
            TemporalIndex::Wm(m) => m.sigma(),
        }
    }

    pub fn access(&self, i: u64) -> u32 {
        match self {
            TemporalIndex::Wtht(t) => t.access(i),
            TemporalIndex::Wm(m) => m.access(i),
        }
    }

    pub fn rank_c(&self, c: u32, i: u64) -> u64 {
        match self {
            TemporalIndex::Wtht(t) => t.rank_c(c, i),
            TemporalIndex::Wm(m) => m.rank_c(c, i),
        }
    }

    pub fn select_c(&self, c: u32, k: u64) -> u64 {
        match self {
            TemporalIndex::Wtht(t) => t.select_c(c, k),
            TemporalIndex::Wm(m) => m.select_c(c, k),
        }
    }

    /// Occurrences of symbols in `[alpha, beta]` within positions `[i, j]`.
    pub fn count(&self, i: u64, j: u64, alpha: u32, beta: u32) -> u64 {
        match self {
            TemporalIndex::Wtht(t) => t.count(i, j, alpha, beta),
            TemporalIndex::Wm(m) => m.count(i, j, alpha, beta),
        }
    }

    /// `(below, inside)` for a window over the non-decreasing value range
    /// `[i, j]`: the WTHT reports both in one traversal, the WM issues two
    /// `count` calls.
    pub fn count_lr_parts(&self, i: u64, j: u64, t1: u32, t2: u32) -> (u64, u64) {
        #[cfg(debug_assertions)]
        self.assert_sorted_range(i, j);
        match self {
            TemporalIndex::Wtht(t) => t.count_lr_parts(i, j, t1, t2),
            TemporalIndex::Wm(m) => m.count_lr_parts(i, j, t1, t2),
        }
    }

    /// The maximal subrange of `[i, j]` whose (non-decreasing) values lie
    /// in `[t1, t2]`, or `None` when no value does.
    pub fn count_lr(&self, i: u64, j: u64, t1: u32, t2: u32) -> Option<(u64, u64)> {
        let (below, inside) = self.count_lr_parts(i, j, t1, t2);
        if inside == 0 {
            None
        } else {
            Some((i + below, i + below + inside - 1))
        }
    }

    #[cfg(debug_assertions)]
    fn assert_sorted_range(&self, i: u64, j: u64) {
        let mut prev = None;
        for p in i..=j {
            let v = self.access(p);
            if let Some(pv) = prev {
                assert!(pv <= v, "countLR precondition violated: range [{i},{j}] not sorted");
            }
            prev = Some(v);
        }
    }

    pub fn size_bits(&self) -> u64 {
        match self {
            TemporalIndex::Wtht(t) => t.size_bits(),
            TemporalIndex::Wm(m) => m.size_bits(),
        }
    }

    pub fn encode(&self, w: &mut ByteWriter) {
        w.put_u8(self.kind().tag());
        match self {
            TemporalIndex::Wtht(t) => t.encode(w),
            TemporalIndex::Wm(m) => m.encode(w),
        }
    }

    pub fn decode(r: &mut ByteReader) -> Result<TemporalIndex> {
        match TimeStruct::from_tag(r.get_u8()?)? {
            TimeStruct::Wtht => Ok(TemporalIndex::Wtht(WaveletTree::decode(r)?)),
            TimeStruct::Wm => Ok(TemporalIndex::Wm(WaveletMatrix::decode(r)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn both_structures_agree_on_random_sequences() {
        let mut rng = StdRng::seed_from_u64(0x77);
        for round in 0..30 {
            let sigma = rng.gen_range(1..40u64);
            let n = rng.gen_range(1..300usize);
            let seq: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma as u32)).collect();
            let flavor = BvFlavor::ALL[round % 4];
            let wt = TemporalIndex::build(&seq, sigma, TimeStruct::Wtht, flavor);
            let wm = TemporalIndex::build(&seq, sigma, TimeStruct::Wm, flavor);
            for i in 1..=n as u64 {
                assert_eq!(wt.access(i), wm.access(i));
                assert_eq!(wt.access(i), seq[i as usize - 1]);
            }
            for _ in 0..40 {
                let c = rng.gen_range(0..sigma as u32);
                let i = rng.gen_range(0..=n as u64);
                assert_eq!(wt.rank_c(c, i), wm.rank_c(c, i));
                let a = rng.gen_range(0..sigma as u32);
                let b = rng.gen_range(a..sigma as u32);
                let i = rng.gen_range(1..=n as u64);
                let j = rng.gen_range(i..=n as u64);
                let expect = seq[i as usize - 1..j as usize]
                    .iter()
                    .filter(|&&c| a <= c && c <= b)
                    .count() as u64;
                assert_eq!(wt.count(i, j, a, b), expect, "wtht count");
                assert_eq!(wm.count(i, j, a, b), expect, "wm count");
            }
        }
    }

    #[test]
    fn count_decomposes_into_ranks() {
        let seq: Vec<u32> = vec![5, 3, 9, 3, 3, 0, 9, 5, 2, 7, 7, 1];
        for kind in TimeStruct::ALL {
            let t = TemporalIndex::build(&seq, 10, kind, BvFlavor::Plain);
            for (i, j, a, b) in [(1u64, 12u64, 2u32, 7u32), (3, 8, 0, 9), (5, 5, 3, 3)] {
                let direct = t.count(i, j, a, b);
                let via_rank: u64 = (a..=b).map(|c| t.rank_c(c, j) - t.rank_c(c, i - 1)).sum();
                assert_eq!(direct, via_rank);
            }
        }
    }

    #[test]
    fn count_lr_endpoints() {
        // sorted values with duplicates
        let seq = vec![1u32, 1, 2, 4, 4, 4, 6, 9];
        for kind in TimeStruct::ALL {
            let t = TemporalIndex::build(&seq, 10, kind, BvFlavor::Plain);
            assert_eq!(t.count_lr(1, 8, 2, 6), Some((3, 7)));
            assert_eq!(t.count_lr(1, 8, 0, 1), Some((1, 2)));
            assert_eq!(t.count_lr(1, 8, 7, 8), None);
            assert_eq!(t.count_lr(1, 8, 0, 9), Some((1, 8)));
            assert_eq!(t.count_lr(4, 6, 4, 4), Some((4, 6)));
        }
    }

    #[test]
    fn wtht_beats_wm_on_skewed_payload() {
        // Structural restatement of the skewed-times finding: with plain
        // bitvectors, the Hu-Tucker shape stores fewer payload bits than
        // the balanced matrix when the distribution is skewed.
        let mut rng = StdRng::seed_from_u64(0xbeef);
        let sigma = 256u64;
        let seq: Vec<u32> = (0..50_000)
            .map(|_| {
                if rng.gen_bool(0.8) {
                    rng.gen_range(0..8u32)
                } else {
                    rng.gen_range(0..sigma as u32)
                }
            })
            .collect();
        let wt = TemporalIndex::build(&seq, sigma, TimeStruct::Wtht, BvFlavor::Plain);
        let wm = TemporalIndex::build(&seq, sigma, TimeStruct::Wm, BvFlavor::Plain);
        assert!(
            wt.size_bits() < wm.size_bits(),
            "wtht {} >= wm {}",
            wt.size_bits(),
            wm.size_bits()
        );
    }
}
