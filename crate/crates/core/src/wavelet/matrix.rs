//! Balanced wavelet matrix: one bitvector per bit level, symbols reordered
//! between levels by their previous bit (zeros first, stable). Pointerless;
//! the per-level zero counts are all the navigation state needed.

use crate::bits::{BitBuf, Bits, BvFlavor};
use crate::error::Result;
use crate::io::{ByteReader, ByteWriter};

#[derive(Clone, Debug)]
pub struct WaveletMatrix {
    n: u64,
    sigma: u64,
    /// MSB-first level bitvectors, each of length `n`.
    levels: Vec<Bits>,
    /// zeros[l] = rank0 of the full level l.
    zeros: Vec<u64>,
}

impl WaveletMatrix {
    /// Index `seq` over the alphabet `0..sigma`.
    pub fn build(seq: &[u32], sigma: u64, flavor: BvFlavor) -> WaveletMatrix {
        assert!(sigma >= 1, "alphabet must be non-empty");
        debug_assert!(seq.iter().all(|&c| (c as u64) < sigma));
        let n_levels = bits_needed(sigma);
        let n = seq.len() as u64;
        let mut levels = Vec::with_capacity(n_levels as usize);
        let mut zeros = Vec::with_capacity(n_levels as usize);
        let mut cur: Vec<u32> = seq.to_vec();
        let mut next: Vec<u32> = Vec::with_capacity(seq.len());
        for level in 0..n_levels {
            let shift = n_levels - 1 - level;
            let mut buf = BitBuf::with_capacity(seq.len());
            for &c in &cur {
                buf.push(c >> shift & 1 == 1);
            }
            // Stable partition: zeros keep order, then ones keep order.
            next.clear();
            next.extend(cur.iter().copied().filter(|&c| c >> shift & 1 == 0));
            let zero_count = next.len() as u64;
            next.extend(cur.iter().copied().filter(|&c| c >> shift & 1 == 1));
            std::mem::swap(&mut cur, &mut next);
            zeros.push(zero_count);
            levels.push(Bits::build(flavor, &buf));
        }
        WaveletMatrix {
            n,
            sigma,
            levels,
            zeros,
        }
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    pub fn n_levels(&self) -> u32 {
        self.levels.len() as u32
    }

    /// Symbol at 1-based position `i`.
    pub fn access(&self, i: u64) -> u32 {
        assert!(i >= 1 && i <= self.n, "position {i} out of range");
        let mut p = i;
        let mut value = 0u32;
        for (level, bits) in self.levels.iter().enumerate() {
            value <<= 1;
            if bits.access(p) {
                value |= 1;
                p = self.zeros[level] + bits.rank1(p);
            } else {
                p = bits.rank0(p);
            }
        }
        value
    }

    /// Occurrences of `c` in the first `i` positions.
    pub fn rank_c(&self, c: u32, i: u64) -> u64 {
        assert!((c as u64) < self.sigma, "symbol {c} out of range");
        assert!(i <= self.n, "position {i} out of range");
        if self.levels.is_empty() {
            return i; // unary alphabet
        }
        let mut lo = 0u64; // start of c's virtual node (as a rank prefix)
        let mut hi = i;
        for (level, bits) in self.levels.iter().enumerate() {
            let shift = self.levels.len() - 1 - level;
            if c >> shift & 1 == 1 {
                lo = self.zeros[level] + bits.rank1(lo);
                hi = self.zeros[level] + bits.rank1(hi);
            } else {
                lo = bits.rank0(lo);
                hi = bits.rank0(hi);
            }
        }
        hi - lo
    }

    /// 1-based position of the k-th occurrence of `c`.
    pub fn select_c(&self, c: u32, k: u64) -> u64 {
        assert!((c as u64) < self.sigma, "symbol {c} out of range");
        let total = self.rank_c(c, self.n);
        assert!(k >= 1 && k <= total, "select rank {k} out of range");
        if self.levels.is_empty() {
            return k;
        }
        // Descend to find the start of c's block at the bottom level.
        let mut lo = 0u64;
        for (level, bits) in self.levels.iter().enumerate() {
            let shift = self.levels.len() - 1 - level;
            if c >> shift & 1 == 1 {
                lo = self.zeros[level] + bits.rank1(lo);
            } else {
                lo = bits.rank0(lo);
            }
        }
        // Ascend mapping the k-th element of the block back to the top.
        let mut p = lo + k;
        for (level, bits) in self.levels.iter().enumerate().rev() {
            let shift = self.levels.len() - 1 - level;
            if c >> shift & 1 == 1 {
                p = bits.select1(p - self.zeros[level]);
            } else {
                p = bits.select0(p);
            }
        }
        p
    }

    /// Occurrences of symbols in `[alpha, beta]` within positions `[i, j]`.
    pub fn count(&self, i: u64, j: u64, alpha: u32, beta: u32) -> u64 {
        assert!(i >= 1 && i <= j && j <= self.n, "range [{i},{j}] invalid");
        assert!(alpha <= beta && (beta as u64) < self.sigma, "symbol range invalid");
        if self.levels.is_empty() {
            return j - i + 1;
        }
        let top = (1u64 << self.levels.len()) - 1;
        self.count_rec(0, i, j, 0, top, alpha as u64, beta as u64)
    }

    #[allow(clippy::too_many_arguments)]
    fn count_rec(
        &self,
        level: usize,
        i: u64,
        j: u64,
        node_lo: u64,
        node_hi: u64,
        alpha: u64,
        beta: u64,
    ) -> u64 {
        if i > j || node_hi < alpha || node_lo > beta {
            return 0;
        }
        if alpha <= node_lo && node_hi <= beta {
            return j - i + 1;
        }
        let bits = &self.levels[level];
        let z = self.zeros[level];
        let rank1_im1 = bits.rank1(i - 1);
        let rank1_j = bits.rank1(j);
        let il = i - rank1_im1; // rank0(i-1) + 1
        let jl = j - rank1_j;
        let ir = z + rank1_im1 + 1;
        let jr = z + rank1_j;
        let mid = (node_lo + node_hi) / 2;
        self.count_rec(level + 1, il, jl, node_lo, mid, alpha, beta)
            + self.count_rec(level + 1, ir, jr, mid + 1, node_hi, alpha, beta)
    }

    /// On a non-decreasing value range `[i, j]`, the number of values below
    /// `t1` and the number within `[t1, t2]` — enough to name the maximal
    /// subrange whose values lie in the window. Two `count` calls.
    pub fn count_lr_parts(&self, i: u64, j: u64, t1: u32, t2: u32) -> (u64, u64) {
        let below = if t1 == 0 { 0 } else { self.count(i, j, 0, t1 - 1) };
        let inside = self.count(i, j, t1, t2);
        (below, inside)
    }

    pub fn size_bits(&self) -> u64 {
        self.levels.iter().map(|b| b.size_bits()).sum::<u64>() + self.zeros.len() as u64 * 64
    }

    pub fn encode(&self, w: &mut ByteWriter) {
        w.put_u64(self.n);
        w.put_u64(self.sigma);
        w.put_u64_slice(&self.zeros);
        w.put_u64(self.levels.len() as u64);
        for level in &self.levels {
            level.encode(w);
        }
    }

    pub fn decode(r: &mut ByteReader) -> Result<WaveletMatrix> {
        let n = r.get_u64()?;
        let sigma = r.get_u64()?;
        let zeros = r.get_u64_slice()?;
        let n_levels = r.get_u64()? as usize;
        let mut levels = Vec::with_capacity(n_levels);
        for _ in 0..n_levels {
            levels.push(Bits::decode(r)?);
        }
        Ok(WaveletMatrix {
            n,
            sigma,
            levels,
            zeros,
        })
    }
}

pub(crate) fn bits_needed(sigma: u64) -> u32 {
    if sigma <= 1 {
        0
    } else {
        64 - (sigma - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Figure-two sequence used across the wavelet structures.
    pub const FIG2: [u32; 15] = [3, 2, 7, 7, 0, 1, 4, 3, 7, 6, 3, 2, 5, 5, 3];

    #[test]
    fn bits_needed_boundaries() {
        assert_eq!(bits_needed(1), 0);
        assert_eq!(bits_needed(2), 1);
        assert_eq!(bits_needed(3), 2);
        assert_eq!(bits_needed(8), 3);
        assert_eq!(bits_needed(9), 4);
        assert_eq!(bits_needed(2304), 12);
    }

    #[test]
    fn fig2_worked_example() {
        for flavor in BvFlavor::ALL {
            let wm = WaveletMatrix::build(&FIG2, 8, flavor);
            // access(8) decodes bits 011 -> symbol 3
            assert_eq!(wm.access(8), 3, "{flavor:?}");
            // count(5,10,3,7) = 3 + 1 = 4
            assert_eq!(wm.count(5, 10, 3, 7), 4, "{flavor:?}");
            // rank_3(15): occurrences of 3 at positions 1, 8, 11, 15
            assert_eq!(wm.rank_c(3, 15), 4, "{flavor:?}");
            assert_eq!(wm.rank_c(3, 0), 0);
            // full-alphabet count returns the range length
            assert_eq!(wm.count(2, 9, 0, 7), 8);
        }
    }

    #[test]
    fn level_mapping_roundtrip() {
        // The k-th zero of level l maps to position k at level l+1, the
        // j-th one to zeros[l] + j: access round-trips every position.
        let wm = WaveletMatrix::build(&FIG2, 8, BvFlavor::Plain);
        for (i, &c) in FIG2.iter().enumerate() {
            assert_eq!(wm.access(i as u64 + 1), c);
        }
    }

    #[test]
    fn singleton_and_unary() {
        let wm = WaveletMatrix::build(&[5], 8, BvFlavor::Plain);
        assert_eq!(wm.access(1), 5);
        let wm = WaveletMatrix::build(&[0, 0, 0], 1, BvFlavor::Plain);
        assert_eq!(wm.access(2), 0);
        assert_eq!(wm.rank_c(0, 3), 3);
        assert_eq!(wm.select_c(0, 2), 2);
        assert_eq!(wm.count(1, 3, 0, 0), 3);
    }

    #[test]
    fn rank_select_inverse() {
        let wm = WaveletMatrix::build(&FIG2, 8, BvFlavor::Rrr32);
        for c in 0..8u32 {
            let total = wm.rank_c(c, wm.len());
            for k in 1..=total {
                let pos = wm.select_c(c, k);
                assert_eq!(wm.access(pos), c);
                assert_eq!(wm.rank_c(c, pos), k);
            }
        }
    }
}
