//! Compressed block/class bitvector in the style of Raman-Raman-Rao.
//!
//! The bit sequence is cut into 15-bit blocks. Each block stores its class
//! (popcount, 4 bits) plus an enumerative offset identifying the block
//! among all 15-bit words of that class. A directory sampled every
//! `sampling` blocks (32, 64, or 128) holds cumulative ranks and offset
//! positions; larger sampling trades query speed for space.

use crate::bits::packed::{read_bits, PackedWriter};
use crate::bits::BitBuf;
use crate::error::Result;
use crate::io::{ByteReader, ByteWriter};

pub const BLOCK_BITS: u64 = 15;
const CLASS_BITS: u64 = 4;

/// `BINOMIAL[n][k]` = C(n, k) for n, k <= 15.
const fn binomial_table() -> [[u16; 16]; 16] {
    let mut t = [[0u16; 16]; 16];
    let mut n = 0;
    while n < 16 {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + if k <= n - 1 { t[n - 1][k] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    t
}

const BINOMIAL: [[u16; 16]; 16] = binomial_table();

/// Offset width in bits for each class: ceil(log2 C(15, c)).
const fn offset_width_table() -> [u8; 16] {
    let b = binomial_table();
    let mut w = [0u8; 16];
    let mut c = 0;
    while c < 16 {
        let count = b[15][c] as u32;
        let mut bits = 0u8;
        while (1u32 << bits) < count {
            bits += 1;
        }
        w[c] = bits;
        c += 1;
    }
    w
}

const OFFSET_WIDTH: [u8; 16] = offset_width_table();

/// Enumerative code of a 15-bit block with `class` ones: its index in the
/// sequence of all such blocks ordered by increasing position of set bits
/// (combinatorial number system, LSB first).
fn encode_offset(block: u16, class: u32) -> u32 {
    let mut offset = 0u32;
    let mut remaining = class;
    for pos in 0..BLOCK_BITS as u16 {
        if remaining == 0 {
            break;
        }
        if block >> pos & 1 == 1 {
            // Count arrangements that keep this one strictly further right.
            offset += BINOMIAL[(BLOCK_BITS as u16 - 1 - pos) as usize][remaining as usize] as u32;
            remaining -= 1;
        }
    }
    offset
}

fn decode_block(mut offset: u32, class: u32) -> u16 {
    let mut block = 0u16;
    let mut remaining = class;
    for pos in 0..BLOCK_BITS as u16 {
        if remaining == 0 {
            break;
        }
        let skip = BINOMIAL[(BLOCK_BITS as u16 - 1 - pos) as usize][remaining as usize] as u32;
        if offset >= skip {
            offset -= skip;
            block |= 1 << pos;
            remaining -= 1;
        }
    }
    block
}

#[derive(Clone, Debug)]
pub struct RrrBitvector {
    len: u64,
    ones: u64,
    sampling: u32,
    /// Packed 4-bit classes, one per block.
    classes: Vec<u64>,
    /// Packed variable-width offsets.
    offsets: Vec<u64>,
    offsets_len: u64,
    /// Per `sampling` blocks: ones before the block.
    rank_samples: Vec<u32>,
    /// Per `sampling` blocks: bit position of the block's offset code.
    offset_samples: Vec<u64>,
}

impl RrrBitvector {
    pub fn from_buf(buf: &BitBuf, sampling: u32) -> Self {
        let len = buf.len();
        assert!(len < u32::MAX as u64, "rrr bitvector limited to 2^32 bits");
        let n_blocks = (len + BLOCK_BITS - 1) / BLOCK_BITS;
        let mut classes = PackedWriter::new();
        let mut offsets = PackedWriter::new();
        let mut rank_samples = Vec::new();
        let mut offset_samples = Vec::new();
        let mut ones = 0u64;
        for b in 0..n_blocks {
            if b % sampling as u64 == 0 {
                rank_samples.push(ones as u32);
                offset_samples.push(offsets.len());
            }
            let start = b * BLOCK_BITS;
            let end = (start + BLOCK_BITS).min(len);
            let mut word = 0u16;
            for (j, i) in (start..end).enumerate() {
                if buf.get(i) {
                    word |= 1 << j;
                }
            }
            let class = word.count_ones();
            ones += class as u64;
            classes.push(class as u64, CLASS_BITS as u32);
            offsets.push(
                encode_offset(word, class) as u64,
                OFFSET_WIDTH[class as usize] as u32,
            );
        }
        Self {
            len,
            ones,
            sampling,
            offsets_len: offsets.len(),
            classes: classes.into_words(),
            offsets: offsets.into_words(),
            rank_samples,
            offset_samples,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.ones
    }

    #[inline]
    fn class_of(&self, block: u64) -> u32 {
        read_bits(&self.classes, block * CLASS_BITS, CLASS_BITS as u32) as u32
    }

    /// Decode the bits of `block`, walking classes from the nearest sample.
    fn block_word(&self, block: u64) -> u16 {
        let sample = (block / self.sampling as u64) as usize;
        let mut pos = self.offset_samples[sample];
        let mut b = sample as u64 * self.sampling as u64;
        while b < block {
            pos += OFFSET_WIDTH[self.class_of(b) as usize] as u64;
            b += 1;
        }
        let class = self.class_of(block);
        let offset = read_bits(&self.offsets, pos, OFFSET_WIDTH[class as usize] as u32) as u32;
        decode_block(offset, class)
    }

    pub fn access(&self, i: u64) -> bool {
        assert!(i >= 1 && i <= self.len, "access position {i} out of range");
        let p = i - 1;
        self.block_word(p / BLOCK_BITS) >> (p % BLOCK_BITS) & 1 == 1
    }

    pub fn rank1(&self, i: u64) -> u64 {
        assert!(i <= self.len, "rank position {i} out of range 0..={}", self.len);
        if i == 0 {
            return 0;
        }
        let target_block = (i - 1) / BLOCK_BITS;
        let sample = (target_block / self.sampling as u64) as usize;
        let mut rank = self.rank_samples[sample] as u64;
        let mut pos = self.offset_samples[sample];
        let mut b = sample as u64 * self.sampling as u64;
        while b < target_block {
            let class = self.class_of(b);
            rank += class as u64;
            pos += OFFSET_WIDTH[class as usize] as u64;
            b += 1;
        }
        let class = self.class_of(target_block);
        let offset = read_bits(&self.offsets, pos, OFFSET_WIDTH[class as usize] as u32) as u32;
        let word = decode_block(offset, class);
        let rem = i - target_block * BLOCK_BITS; // 1..=15
        let mask = (1u32 << rem) - 1;
        rank + (word as u32 & mask).count_ones() as u64
    }

    pub fn select1(&self, k: u64) -> u64 {
        assert!(k >= 1 && k <= self.ones, "select1 rank {k} out of range");
        // Last directory sample with fewer than k ones before it.
        let sample = self
            .rank_samples
            .partition_point(|&r| (r as u64) < k)
            .saturating_sub(1);
        let mut rank = self.rank_samples[sample] as u64;
        let mut pos = self.offset_samples[sample];
        let mut b = sample as u64 * self.sampling as u64;
        loop {
            let class = self.class_of(b);
            if rank + class as u64 >= k {
                let offset = read_bits(&self.offsets, pos, OFFSET_WIDTH[class as usize] as u32) as u32;
                let word = decode_block(offset, class);
                return b * BLOCK_BITS
                    + super::plain::select_in_word(word as u64, (k - rank) as u32)
                    + 1;
            }
            rank += class as u64;
            pos += OFFSET_WIDTH[class as usize] as u64;
            b += 1;
        }
    }

    pub fn select0(&self, k: u64) -> u64 {
        let zeros = self.len - self.ones;
        assert!(k >= 1 && k <= zeros, "select0 rank {k} out of range");
        // zeros before sampled block s*sampling = s*sampling*15 - rank_samples[s]
        let mut lo = 0usize;
        let mut hi = self.rank_samples.len();
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            let bits_before = (mid as u64 * self.sampling as u64 * BLOCK_BITS).min(self.len);
            let zeros_before = bits_before - self.rank_samples[mid] as u64;
            if zeros_before < k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut b = lo as u64 * self.sampling as u64;
        let mut zrank = (b * BLOCK_BITS).min(self.len) - self.rank_samples[lo] as u64;
        let mut pos = self.offset_samples[lo];
        loop {
            let class = self.class_of(b);
            let block_len = ((b + 1) * BLOCK_BITS).min(self.len) - b * BLOCK_BITS;
            let zeros_here = block_len - class as u64;
            if zrank + zeros_here >= k {
                let offset = read_bits(&self.offsets, pos, OFFSET_WIDTH[class as usize] as u32) as u32;
                let word = decode_block(offset, class);
                let inverted = !(word as u64) & ((1u64 << block_len) - 1);
                return b * BLOCK_BITS
                    + super::plain::select_in_word(inverted, (k - zrank) as u32)
                    + 1;
            }
            zrank += zeros_here;
            pos += OFFSET_WIDTH[class as usize] as u64;
            b += 1;
        }
    }

    pub fn size_bits(&self) -> u64 {
        let n_blocks = (self.len + BLOCK_BITS - 1) / BLOCK_BITS;
        n_blocks * CLASS_BITS
            + self.offsets_len
            + self.rank_samples.len() as u64 * 32
            + self.offset_samples.len() as u64 * 64
    }

    pub fn encode(&self, w: &mut ByteWriter) {
        w.put_u64(self.len);
        w.put_u64(self.ones);
        w.put_u32(self.sampling);
        w.put_u64(self.offsets_len);
        w.put_u64_slice(&self.classes);
        w.put_u64_slice(&self.offsets);
        w.put_u32_slice(&self.rank_samples);
        w.put_u64_slice(&self.offset_samples);
    }

    pub fn decode(r: &mut ByteReader) -> Result<Self> {
        Ok(Self {
            len: r.get_u64()?,
            ones: r.get_u64()?,
            sampling: r.get_u32()?,
            offsets_len: r.get_u64()?,
            classes: r.get_u64_slice()?,
            offsets: r.get_u64_slice()?,
            rank_samples: r.get_u32_slice()?,
            offset_samples: r.get_u64_slice()?,
        })
    }
}
