//! Bit sequences with rank/select in three flavors: plain with a rank
//! directory, compressed block/class ("RRR"), and a sparse select-oriented
//! encoding. Positions are 1-based in the public API, matching the usual
//! succinct-structure notation: `rank1(i)` counts ones in positions
//! `1..=i`, and `select1(k)` returns the 1-based position of the k-th one.
//!
//! All flavors are immutable after construction and answer identically on
//! the same content; they differ only in space and access cost.

pub(crate) mod packed;
mod plain;
mod rrr;
mod sparse;

pub use plain::PlainBitvector;
pub use rrr::RrrBitvector;
pub use sparse::SparseBitvector;

use crate::error::{CtrError, Result};
use crate::io::{ByteReader, ByteWriter};

/// Push-style bit buffer used to assemble content before freezing it into
/// one of the queryable flavors.
#[derive(Clone, Default, Debug)]
pub struct BitBuf {
    words: Vec<u64>,
    len: u64,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits / 64 + 1),
            len: 0,
        }
    }

    pub fn push(&mut self, bit: bool) {
        let word = (self.len / 64) as usize;
        if word == self.words.len() {
            self.words.push(0);
        }
        if bit {
            self.words[word] |= 1u64 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at 0-based position `i`.
    pub fn get(&self, i: u64) -> bool {
        debug_assert!(i < self.len);
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Self::with_capacity(bits.len());
        for &bit in bits {
            b.push(bit);
        }
        b
    }

    /// Parse a string of `0`/`1` characters; other characters are ignored.
    /// Test helper for transcribing bitmaps from worked examples.
    pub fn from_bit_str(s: &str) -> Self {
        let mut b = Self::new();
        for c in s.chars() {
            match c {
                '0' => b.push(false),
                '1' => b.push(true),
                _ => {}
            }
        }
        b
    }
}

/// Bitvector encoding selector, part of build configurations and the
/// serialized index header.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BvFlavor {
    Plain,
    Rrr32,
    Rrr64,
    Rrr128,
}

impl BvFlavor {
    pub const ALL: [BvFlavor; 4] = [
        BvFlavor::Plain,
        BvFlavor::Rrr32,
        BvFlavor::Rrr64,
        BvFlavor::Rrr128,
    ];

    pub fn tag(self) -> u8 {
        match self {
            BvFlavor::Plain => 0,
            BvFlavor::Rrr32 => 1,
            BvFlavor::Rrr64 => 2,
            BvFlavor::Rrr128 => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(BvFlavor::Plain),
            1 => Ok(BvFlavor::Rrr32),
            2 => Ok(BvFlavor::Rrr64),
            3 => Ok(BvFlavor::Rrr128),
            _ => Err(CtrError::Format(format!("unknown bitvector flavor {tag}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BvFlavor::Plain => "plain",
            BvFlavor::Rrr32 => "rrr32",
            BvFlavor::Rrr64 => "rrr64",
            BvFlavor::Rrr128 => "rrr128",
        }
    }
}

impl std::str::FromStr for BvFlavor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plain" => Ok(BvFlavor::Plain),
            "rrr32" => Ok(BvFlavor::Rrr32),
            "rrr64" => Ok(BvFlavor::Rrr64),
            "rrr128" => Ok(BvFlavor::Rrr128),
            _ => Err(format!("unknown bitvector flavor `{s}`")),
        }
    }
}

/// A bit sequence in any of the three encodings.
///
/// `Sparse` is never selected by [`Bits::build`]; it is reserved for
/// callers that know the content is sparse (the CSA's `D` bitmap).
#[derive(Clone, Debug)]
pub enum Bits {
    Plain(PlainBitvector),
    Rrr(RrrBitvector),
    Sparse(SparseBitvector),
}

impl Bits {
    pub fn build(flavor: BvFlavor, buf: &BitBuf) -> Bits {
        match flavor {
            BvFlavor::Plain => Bits::Plain(PlainBitvector::from_buf(buf)),
            BvFlavor::Rrr32 => Bits::Rrr(RrrBitvector::from_buf(buf, 32)),
            BvFlavor::Rrr64 => Bits::Rrr(RrrBitvector::from_buf(buf, 64)),
            BvFlavor::Rrr128 => Bits::Rrr(RrrBitvector::from_buf(buf, 128)),
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            Bits::Plain(b) => b.len(),
            Bits::Rrr(b) => b.len(),
            Bits::Sparse(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count_ones(&self) -> u64 {
        match self {
            Bits::Plain(b) => b.count_ones(),
            Bits::Rrr(b) => b.count_ones(),
            Bits::Sparse(b) => b.count_ones(),
        }
    }

    /// Bit at 1-based position `i`.
    pub fn access(&self, i: u64) -> bool {
        match self {
            Bits::Plain(b) => b.access(i),
            Bits::Rrr(b) => b.access(i),
            Bits::Sparse(b) => b.access(i),
        }
    }

    /// Number of ones among the first `i` bits; `rank1(0) = 0`.
    #[inline]
    pub fn rank1(&self, i: u64) -> u64 {
        match self {
            Bits::Plain(b) => b.rank1(i),
            Bits::Rrr(b) => b.rank1(i),
            Bits::Sparse(b) => b.rank1(i),
        }
    }

    #[inline]
    pub fn rank0(&self, i: u64) -> u64 {
        assert!(i <= self.len(), "rank position {i} out of range");
        i - self.rank1(i)
    }

    /// 1-based position of the k-th one, `1 <= k <= count_ones()`.
    pub fn select1(&self, k: u64) -> u64 {
        match self {
            Bits::Plain(b) => b.select1(k),
            Bits::Rrr(b) => b.select1(k),
            Bits::Sparse(b) => b.select1(k),
        }
    }

    /// 1-based position of the k-th zero.
    pub fn select0(&self, k: u64) -> u64 {
        match self {
            Bits::Plain(b) => b.select0(k),
            Bits::Rrr(b) => b.select0(k),
            Bits::Sparse(b) => b.select0(k),
        }
    }

    /// Storage footprint in bits: payload plus rank/select directories.
    pub fn size_bits(&self) -> u64 {
        match self {
            Bits::Plain(b) => b.size_bits(),
            Bits::Rrr(b) => b.size_bits(),
            Bits::Sparse(b) => b.size_bits(),
        }
    }

    pub fn encode(&self, w: &mut ByteWriter) {
        match self {
            Bits::Plain(b) => {
                w.put_u8(0);
                b.encode(w);
            }
            Bits::Rrr(b) => {
                w.put_u8(1);
                b.encode(w);
            }
            Bits::Sparse(b) => {
                w.put_u8(2);
                b.encode(w);
            }
        }
    }

    pub fn decode(r: &mut ByteReader) -> Result<Bits> {
        match r.get_u8()? {
            0 => Ok(Bits::Plain(PlainBitvector::decode(r)?)),
            1 => Ok(Bits::Rrr(RrrBitvector::decode(r)?)),
            2 => Ok(Bits::Sparse(SparseBitvector::decode(r)?)),
            t => Err(CtrError::Format(format!("unknown bit encoding tag {t}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Naive bit-scan reference all flavors must agree with.
    struct Naive(Vec<bool>);

    impl Naive {
        fn rank1(&self, i: u64) -> u64 {
            self.0[..i as usize].iter().filter(|&&b| b).count() as u64
        }
        fn select1(&self, k: u64) -> u64 {
            let mut seen = 0;
            for (pos, &b) in self.0.iter().enumerate() {
                if b {
                    seen += 1;
                    if seen == k {
                        return pos as u64 + 1;
                    }
                }
            }
            unreachable!("select1({k}) out of range")
        }
        fn select0(&self, k: u64) -> u64 {
            let mut seen = 0;
            for (pos, &b) in self.0.iter().enumerate() {
                if !b {
                    seen += 1;
                    if seen == k {
                        return pos as u64 + 1;
                    }
                }
            }
            unreachable!("select0({k}) out of range")
        }
    }

    fn all_encodings(buf: &BitBuf) -> Vec<(&'static str, Bits)> {
        vec![
            ("plain", Bits::build(BvFlavor::Plain, buf)),
            ("rrr32", Bits::build(BvFlavor::Rrr32, buf)),
            ("rrr64", Bits::build(BvFlavor::Rrr64, buf)),
            ("rrr128", Bits::build(BvFlavor::Rrr128, buf)),
            ("sparse", Bits::Sparse(SparseBitvector::from_buf(buf))),
        ]
    }

    fn check_against_naive(bits: &[bool]) {
        let naive = Naive(bits.to_vec());
        let buf = BitBuf::from_bools(bits);
        let m = bits.len() as u64;
        let ones = naive.rank1(m);
        for (name, b) in all_encodings(&buf) {
            assert_eq!(b.len(), m, "{name} len");
            assert_eq!(b.count_ones(), ones, "{name} ones");
            for i in 0..=m {
                assert_eq!(b.rank1(i), naive.rank1(i), "{name} rank1({i})");
                assert_eq!(b.rank0(i), i - naive.rank1(i), "{name} rank0({i})");
            }
            for i in 1..=m {
                assert_eq!(b.access(i), bits[i as usize - 1], "{name} access({i})");
            }
            for k in 1..=ones {
                assert_eq!(b.select1(k), naive.select1(k), "{name} select1({k})");
            }
            for k in 1..=(m - ones) {
                assert_eq!(b.select0(k), naive.select0(k), "{name} select0({k})");
            }
        }
    }

    #[test]
    fn spec_worked_examples() {
        // 1001011: rank1(7)=4, rank0(7)=3
        let buf = BitBuf::from_bit_str("1001011");
        for (_, b) in all_encodings(&buf) {
            assert_eq!(b.rank1(7), 4);
            assert_eq!(b.rank1(0), 0);
            assert_eq!(b.rank0(7), 3);
        }
        // 0101: select1(2) = 4
        let buf = BitBuf::from_bit_str("0101");
        for (_, b) in all_encodings(&buf) {
            assert_eq!(b.select1(2), 4);
        }
        // all-ones length 5: select1(3) = 3
        let buf = BitBuf::from_bit_str("11111");
        for (_, b) in all_encodings(&buf) {
            assert_eq!(b.select1(3), 3);
        }
        // single zero: select0(1) = 1
        let buf = BitBuf::from_bit_str("0");
        for (_, b) in all_encodings(&buf) {
            assert_eq!(b.select0(1), 1);
        }
        // 1001: access examples and the rank identity
        let buf = BitBuf::from_bit_str("1001");
        for (_, b) in all_encodings(&buf) {
            assert!(b.access(1));
            assert!(!b.access(2));
            for i in 1..=4 {
                assert_eq!(b.access(i), b.rank1(i) - b.rank1(i - 1) == 1);
            }
        }
    }

    #[test]
    fn edge_contents() {
        check_against_naive(&[]);
        check_against_naive(&[true]);
        check_against_naive(&[false]);
        check_against_naive(&vec![true; 200]);
        check_against_naive(&vec![false; 200]);
        let mut alt = Vec::new();
        for i in 0..1000 {
            alt.push(i % 2 == 0);
        }
        check_against_naive(&alt);
    }

    #[test]
    fn randomized_against_naive() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for &density in &[0.001, 0.1, 0.5, 0.9] {
            for &m in &[63usize, 64, 65, 1000, 4096] {
                let bits: Vec<bool> = (0..m).map(|_| rng.gen_bool(density)).collect();
                check_against_naive(&bits);
            }
        }
    }

    #[test]
    fn large_random_spot_checks() {
        // m up to 10^6: spot-check rank/select against a prefix-sum oracle.
        let m = 1_000_000u64;
        let mut rng = StdRng::seed_from_u64(42);
        let bits: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.3)).collect();
        let mut prefix = vec![0u64; m as usize + 1];
        for i in 0..m as usize {
            prefix[i + 1] = prefix[i] + bits[i] as u64;
        }
        let buf = BitBuf::from_bools(&bits);
        for (name, b) in all_encodings(&buf) {
            for _ in 0..2000 {
                let i = rng.gen_range(0..=m);
                assert_eq!(b.rank1(i), prefix[i as usize], "{name} rank1({i})");
            }
            let ones = prefix[m as usize];
            for _ in 0..500 {
                let k = rng.gen_range(1..=ones);
                let pos = b.select1(k);
                assert_eq!(b.rank1(pos), k, "{name} rank1(select1({k}))");
                assert!(b.access(pos), "{name} select1({k}) lands on a one");
                assert_eq!(b.rank1(pos - 1), k - 1);
            }
        }
    }

    #[test]
    fn rrr_size_decreases_with_sampling() {
        let mut rng = StdRng::seed_from_u64(7);
        let bits: Vec<bool> = (0..100_000).map(|_| rng.gen_bool(0.2)).collect();
        let buf = BitBuf::from_bools(&bits);
        let s32 = Bits::build(BvFlavor::Rrr32, &buf).size_bits();
        let s64 = Bits::build(BvFlavor::Rrr64, &buf).size_bits();
        let s128 = Bits::build(BvFlavor::Rrr128, &buf).size_bits();
        assert!(s32 > s64 && s64 > s128, "{s32} > {s64} > {s128}");
    }

    #[test]
    fn serialization_roundtrip() {
        let mut rng = StdRng::seed_from_u64(99);
        let bits: Vec<bool> = (0..5000).map(|_| rng.gen_bool(0.4)).collect();
        let buf = BitBuf::from_bools(&bits);
        for (name, b) in all_encodings(&buf) {
            let mut w = ByteWriter::new();
            b.encode(&mut w);
            let bytes = w.into_bytes();
            let mut r = ByteReader::new(&bytes);
            let back = Bits::decode(&mut r).unwrap();
            r.expect_end().unwrap();
            let mut w2 = ByteWriter::new();
            back.encode(&mut w2);
            assert_eq!(bytes, w2.into_bytes(), "{name} re-encode identical");
            for i in 0..=bits.len() as u64 {
                assert_eq!(b.rank1(i), back.rank1(i), "{name} rank after decode");
            }
        }
    }

    proptest! {
        #[test]
        fn rank_select_inverse_laws(bits in proptest::collection::vec(any::<bool>(), 1..700)) {
            let buf = BitBuf::from_bools(&bits);
            for (name, b) in all_encodings(&buf) {
                let ones = b.count_ones();
                for k in 1..=ones {
                    let pos = b.select1(k);
                    prop_assert_eq!(b.rank1(pos), k, "{} rank1(select1(k))=k", name);
                }
                for i in 1..=b.len() {
                    let r = b.rank1(i);
                    if r > 0 {
                        prop_assert!(b.select1(r) <= i, "{} select1(rank1(i)) <= i", name);
                    }
                }
            }
        }
    }
}
