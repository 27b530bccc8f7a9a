//! Plain bitvector: raw 64-bit words plus a sampled rank directory.
//!
//! The directory keeps one cumulative 32-bit counter every
//! `SAMPLE_FACTOR * 32` bits (factor 32, so one counter per 1024-bit
//! block), giving rank in constant time with a bounded popcount scan and
//! select in logarithmic time by binary search over the directory.

use crate::bits::BitBuf;
use crate::error::Result;
use crate::io::{ByteReader, ByteWriter};

const SAMPLE_FACTOR: u64 = 32;
const SAMPLE_BITS: u64 = SAMPLE_FACTOR * 32; // 1024
const WORDS_PER_SAMPLE: usize = (SAMPLE_BITS / 64) as usize;

#[derive(Clone, Debug)]
pub struct PlainBitvector {
    len: u64,
    words: Vec<u64>,
    /// `samples[k]` = ones in bits `[0, k * SAMPLE_BITS)`.
    samples: Vec<u32>,
    ones: u64,
}

impl PlainBitvector {
    pub fn from_buf(buf: &BitBuf) -> Self {
        assert!(buf.len() < u32::MAX as u64, "plain bitvector limited to 2^32 bits");
        let words = buf.words().to_vec();
        let (samples, ones) = build_directory(&words, buf.len());
        Self {
            len: buf.len(),
            words,
            samples,
            ones,
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
    pub fn access(&self, i: u64) -> bool {
        assert!(i >= 1 && i <= self.len, "access position {i} out of range");
        let p = i - 1;
        self.words[(p / 64) as usize] >> (p % 64) & 1 == 1
    }

    #[inline]
    pub fn rank1(&self, i: u64) -> u64 {
        assert!(i <= self.len, "rank position {i} out of range 0..={}", self.len);
        if i == 0 {
            return 0;
        }
        let sample = ((i - 1) / SAMPLE_BITS) as usize;
        let mut rank = self.samples[sample] as u64;
        let mut word = sample * WORDS_PER_SAMPLE;
        let last_word = ((i - 1) / 64) as usize;
        while word < last_word {
            rank += self.words[word].count_ones() as u64;
            word += 1;
        }
        let rem = i - last_word as u64 * 64; // 1..=64 bits of the final word
        rank += (self.words[last_word] & mask_low(rem)).count_ones() as u64;
        rank
    }

    pub fn select1(&self, k: u64) -> u64 {
        assert!(k >= 1 && k <= self.ones, "select1 rank {k} out of range");
        // Last sample with fewer than k ones before it.
        let sample = self
            .samples
            .partition_point(|&s| (s as u64) < k)
            .saturating_sub(1);
        let mut rank = self.samples[sample] as u64;
        let mut word = sample * WORDS_PER_SAMPLE;
        loop {
            let ones_here = self.words[word].count_ones() as u64;
            if rank + ones_here >= k {
                return word as u64 * 64 + select_in_word(self.words[word], (k - rank) as u32) + 1;
            }
            rank += ones_here;
            word += 1;
        }
    }

    pub fn select0(&self, k: u64) -> u64 {
        let zeros = self.len - self.ones;
        assert!(k >= 1 && k <= zeros, "select0 rank {k} out of range");
        // zeros before sample s = s * SAMPLE_BITS - samples[s]; binary search
        // for the last sample with fewer than k zeros before it.
        let mut lo = 0usize;
        let mut hi = self.samples.len();
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            let zeros_before = mid as u64 * SAMPLE_BITS - self.samples[mid] as u64;
            if zeros_before < k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let sample = lo;
        let mut zrank = sample as u64 * SAMPLE_BITS - self.samples[sample] as u64;
        let mut word = sample * WORDS_PER_SAMPLE;
        loop {
            // The final word may extend past `len`; padding bits are zero in
            // storage, but they are past every legal k so they never match.
            let zeros_here = self.words[word].count_zeros() as u64;
            if zrank + zeros_here >= k {
                return word as u64 * 64 + select_in_word(!self.words[word], (k - zrank) as u32) + 1;
            }
            zrank += zeros_here;
            word += 1;
        }
    }

    pub fn size_bits(&self) -> u64 {
        self.words.len() as u64 * 64 + self.samples.len() as u64 * 32
    }

    pub fn encode(&self, w: &mut ByteWriter) {
        w.put_u64(self.len);
        w.put_u64_slice(&self.words);
        w.put_u32_slice(&self.samples);
    }

    pub fn decode(r: &mut ByteReader) -> Result<Self> {
        let len = r.get_u64()?;
        let words = r.get_u64_slice()?;
        let samples = r.get_u32_slice()?;
        let ones: u64 = words.iter().map(|w| w.count_ones() as u64).sum();
        Ok(Self {
            len,
            words,
            samples,
            ones,
        })
    }
}

fn build_directory(words: &[u64], len: u64) -> (Vec<u32>, u64) {
    let n_samples = (len / SAMPLE_BITS) as usize + 1;
    let mut samples = Vec::with_capacity(n_samples);
    let mut ones = 0u64;
    for s in 0..n_samples {
        samples.push(ones as u32);
        let start = s * WORDS_PER_SAMPLE;
        let end = (start + WORDS_PER_SAMPLE).min(words.len());
        for w in &words[start..end] {
            ones += w.count_ones() as u64;
        }
    }
    (samples, ones)
}

#[inline]
fn mask_low(bits: u64) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// 0-based position of the k-th set bit of `word`, `1 <= k <= popcount`.
#[inline]
pub(crate) fn select_in_word(mut word: u64, k: u32) -> u64 {
    debug_assert!(k >= 1 && k <= word.count_ones());
    let mut remaining = k;
    // Halving search over popcounts of progressively smaller chunks.
    let mut pos = 0u64;
    let mut width = 32;
    while width > 0 {
        let low = word & mask_low(width);
        let c = low.count_ones();
        if c < remaining {
            remaining -= c;
            word >>= width;
            pos += width;
        }
        width /= 2;
    }
    pos
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_in_word_exhaustive_small() {
        for word in 0u64..512 {
            let mut k = 0;
            for bit in 0..10 {
                if word >> bit & 1 == 1 {
                    k += 1;
                    assert_eq!(select_in_word(word, k), bit, "word={word:b} k={k}");
                }
            }
        }
        assert_eq!(select_in_word(1u64 << 63, 1), 63);
        assert_eq!(select_in_word(u64::MAX, 64), 63);
        assert_eq!(select_in_word(u64::MAX, 1), 0);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn rank_past_end_panics() {
        let b = PlainBitvector::from_buf(&BitBuf::from_bit_str("101"));
        b.rank1(4);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn select_past_ones_panics() {
        let b = PlainBitvector::from_buf(&BitBuf::from_bit_str("101"));
        b.select1(3);
    }
}
