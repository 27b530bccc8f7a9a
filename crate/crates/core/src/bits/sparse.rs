//! Sparse select-oriented bitvector: the positions of the ones are stored
//! in a high/low split (Elias-Fano). `select1` costs one select on the
//! unary high part plus one array read; `rank1` locates the high bucket
//! and binary-searches the low bits. Intended for very sparse content
//! such as the CSA's `D` bitmap.

use crate::bits::{BitBuf, PlainBitvector};
use crate::error::Result;
use crate::io::{ByteReader, ByteWriter};

#[derive(Clone, Debug)]
pub struct SparseBitvector {
    len: u64,
    ones: u64,
    low_width: u32,
    /// Packed `low_width`-bit low parts, one per one-bit.
    lows: Vec<u64>,
    /// Unary-coded high parts: one `1` per element, `0` terminates each bucket.
    highs: PlainBitvector,
}

impl SparseBitvector {
    pub fn from_buf(buf: &BitBuf) -> Self {
        let positions: Vec<u64> = (0..buf.len()).filter(|&i| buf.get(i)).collect();
        Self::from_ones(&positions, buf.len())
    }

    /// Build from the sorted 0-based positions of the ones.
    pub fn from_ones(positions: &[u64], len: u64) -> Self {
        let ones = positions.len() as u64;
        let low_width = if ones == 0 {
            0
        } else {
            let avg = len / ones;
            63 - (avg.max(1) | 1).leading_zeros()
        };
        let n_buckets = (len >> low_width) + 1;
        let mut highs = BitBuf::with_capacity((ones + n_buckets) as usize);
        let mut lows = PackedLows::new(low_width);
        let mut bucket = 0u64;
        for (idx, &p) in positions.iter().enumerate() {
            debug_assert!(idx == 0 || positions[idx - 1] < p, "positions must be strictly increasing");
            debug_assert!(p < len);
            let h = p >> low_width;
            while bucket < h {
                highs.push(false);
                bucket += 1;
            }
            highs.push(true);
            lows.push(p & low_mask(low_width));
        }
        while bucket < n_buckets {
            highs.push(false);
            bucket += 1;
        }
        Self {
            len,
            ones,
            low_width,
            lows: lows.words,
            highs: PlainBitvector::from_buf(&highs),
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
    fn low(&self, idx: u64) -> u64 {
        if self.low_width == 0 {
            return 0;
        }
        let pos = idx * self.low_width as u64;
        let word = (pos / 64) as usize;
        let bit = pos % 64;
        let mut v = self.lows[word] >> bit;
        if bit + self.low_width as u64 > 64 {
            v |= self.lows[word + 1] << (64 - bit);
        }
        v & low_mask(self.low_width)
    }

    /// 0-based position of the (idx+1)-th one.
    #[inline]
    fn position(&self, idx: u64) -> u64 {
        let h = self.highs.select1(idx + 1) - 1 - idx;
        (h << self.low_width) | self.low(idx)
    }

    pub fn select1(&self, k: u64) -> u64 {
        assert!(k >= 1 && k <= self.ones, "select1 rank {k} out of range");
        self.position(k - 1) + 1
    }

    pub fn rank1(&self, i: u64) -> u64 {
        assert!(i <= self.len, "rank position {i} out of range 0..={}", self.len);
        if i == 0 || self.ones == 0 {
            return 0;
        }
        // Count ones at 0-based positions < i.
        let h = i >> self.low_width;
        // Elements in buckets < h all lie below i.
        let mut lo = if h == 0 {
            0
        } else {
            self.highs.select0(h) - h // ones before the h-th zero
        };
        // Within bucket h the low parts are sorted: binary search for the
        // first element with low >= i's low part.
        let mut hi = self.highs.select0(h + 1) - (h + 1);
        let target_low = i & low_mask(self.low_width);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.low(mid) < target_low {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn access(&self, i: u64) -> bool {
        assert!(i >= 1 && i <= self.len, "access position {i} out of range");
        self.rank1(i) > self.rank1(i - 1)
    }

    /// Binary search over the monotone zero-rank.
    pub fn select0(&self, k: u64) -> u64 {
        let zeros = self.len - self.ones;
        assert!(k >= 1 && k <= zeros, "select0 rank {k} out of range");
        let mut lo = 1u64;
        let mut hi = self.len;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if mid - self.rank1(mid) < k {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn size_bits(&self) -> u64 {
        self.lows.len() as u64 * 64 + self.highs.size_bits()
    }

    pub fn encode(&self, w: &mut ByteWriter) {
        w.put_u64(self.len);
        w.put_u64(self.ones);
        w.put_u32(self.low_width);
        w.put_u64_slice(&self.lows);
        self.highs.encode(w);
    }

    pub fn decode(r: &mut ByteReader) -> Result<Self> {
        Ok(Self {
            len: r.get_u64()?,
            ones: r.get_u64()?,
            low_width: r.get_u32()?,
            lows: r.get_u64_slice()?,
            highs: PlainBitvector::decode(r)?,
        })
    }
}

#[inline]
fn low_mask(width: u32) -> u64 {
    if width == 0 {
        0
    } else {
        (1u64 << width) - 1
    }
}

struct PackedLows {
    words: Vec<u64>,
    bit_len: u64,
    width: u32,
}

impl PackedLows {
    fn new(width: u32) -> Self {
        Self {
            words: Vec::new(),
            bit_len: 0,
            width,
        }
    }

    fn push(&mut self, value: u64) {
        if self.width == 0 {
            return;
        }
        let word = (self.bit_len / 64) as usize;
        let bit = self.bit_len % 64;
        if word == self.words.len() {
            self.words.push(0);
        }
        self.words[word] |= value << bit;
        if bit + self.width as u64 > 64 {
            self.words.push(value >> (64 - bit));
        }
        self.bit_len += self.width as u64;
    }
}
