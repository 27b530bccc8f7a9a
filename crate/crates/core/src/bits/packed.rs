//! Bit-packed storage over u64 words (LSB-first), with sequential readers
//! for the variable-length codes used by the compressed structures.

/// Append-only packed bit writer.
#[derive(Clone, Debug, Default)]
pub struct PackedWriter {
    words: Vec<u64>,
    len: u64,
}

impl PackedWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append the low `width` bits of `value` (width <= 57).
    #[inline]
    pub fn push(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 57 && value < (1u64 << width.max(1)));
        if width == 0 {
            return;
        }
        let word = (self.len / 64) as usize;
        let bit = self.len % 64;
        if word == self.words.len() {
            self.words.push(0);
        }
        self.words[word] |= value << bit;
        if bit + width as u64 > 64 {
            self.words.push(value >> (64 - bit));
        }
        self.len += width as u64;
    }

    #[inline]
    pub fn push_bit(&mut self, bit: bool) {
        self.push(bit as u64, 1);
    }

    /// Unary-terminated power-of-two code: (b-1) zeros, then the b bits of
    /// `v` starting from its leading one. `v >= 1`.
    pub fn push_gamma(&mut self, v: u64) {
        debug_assert!(v >= 1);
        let b = 64 - v.leading_zeros();
        self.push(0, b - 1);
        // v's bits, MSB flag included, emitted LSB-first after the zeros:
        // decoder counts zeros then reads b bits.
        self.push(reverse_low_bits(v, b), b);
    }

    /// Rice code: quotient in unary (q zeros then a one), then k remainder
    /// bits.
    pub fn push_rice(&mut self, v: u64, k: u32) {
        let q = v >> k;
        let mut left = q;
        while left >= 32 {
            self.push(0, 32);
            left -= 32;
        }
        self.push(1 << left, left as u32 + 1);
        self.push(v & ((1u64 << k) - 1).min(u64::MAX), k.min(63));
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }
}

/// Read `width` (<= 57) bits starting at bit `pos`.
#[inline]
pub fn read_bits(words: &[u64], pos: u64, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    let word = (pos / 64) as usize;
    let bit = pos % 64;
    let mask = (1u64 << width) - 1;
    let mut v = words[word] >> bit;
    if bit + width as u64 > 64 {
        v |= words[word + 1] << (64 - bit);
    }
    v & mask
}

/// Sequential reader over a packed stream.
#[derive(Clone, Copy)]
pub struct BitCursor<'a> {
    words: &'a [u64],
    pos: u64,
}

impl<'a> BitCursor<'a> {
    pub fn new(words: &'a [u64], pos: u64) -> Self {
        Self { words, pos }
    }

    pub fn pos(&self) -> u64 {
        self.pos
    }

    #[inline]
    pub fn read(&mut self, width: u32) -> u64 {
        let v = read_bits(self.words, self.pos, width);
        self.pos += width as u64;
        v
    }

    #[inline]
    pub fn read_bit(&mut self) -> bool {
        self.read(1) == 1
    }

    /// Count zeros up to the terminating one (the one is consumed).
    #[inline]
    fn read_unary(&mut self) -> u64 {
        let mut zeros = 0u64;
        loop {
            let word = (self.pos / 64) as usize;
            let bit = self.pos % 64;
            let chunk = self.words[word] >> bit;
            if chunk == 0 {
                zeros += 64 - bit;
                self.pos += 64 - bit;
                continue;
            }
            let tz = chunk.trailing_zeros() as u64;
            zeros += tz;
            self.pos += tz + 1;
            return zeros;
        }
    }

    pub fn read_gamma(&mut self) -> u64 {
        let zeros = self.read_unary();
        // The one already consumed is the MSB flag; remaining bits follow.
        let rest = self.read(zeros as u32);
        let b = zeros + 1;
        reverse_low_bits(rest << 1 | 1, b as u32)
    }

    pub fn read_rice(&mut self, k: u32) -> u64 {
        let q = self.read_unary();
        (q << k) | self.read(k)
    }
}

#[inline]
fn reverse_low_bits(v: u64, width: u32) -> u64 {
    v.reverse_bits() >> (64 - width)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_read_roundtrip() {
        let mut w = PackedWriter::new();
        let vals = [(5u64, 3u32), (0, 0), (1023, 10), (1, 1), (0x1fff, 13), (0, 4)];
        for &(v, width) in &vals {
            w.push(v, width);
        }
        let words = w.into_words();
        let mut pos = 0;
        for &(v, width) in &vals {
            assert_eq!(read_bits(&words, pos, width), v);
            pos += width as u64;
        }
    }

    #[test]
    fn gamma_roundtrip() {
        let mut w = PackedWriter::new();
        let vals = [1u64, 2, 3, 4, 7, 8, 100, 1 << 20, 12345, 1];
        for &v in &vals {
            w.push_gamma(v);
        }
        let words = w.words().to_vec();
        let mut c = BitCursor::new(&words, 0);
        for &v in &vals {
            assert_eq!(c.read_gamma(), v);
        }
    }

    #[test]
    fn rice_roundtrip() {
        for k in 0..20u32 {
            let mut w = PackedWriter::new();
            let vals = [0u64, 1, 2, 63, 64, 1000, 1 << 21, 5];
            for &v in &vals {
                w.push_rice(v, k);
            }
            let words = w.words().to_vec();
            let mut c = BitCursor::new(&words, 0);
            for &v in &vals {
                assert_eq!(c.read_rice(k), v, "k={k} v={v}");
            }
        }
    }

    #[test]
    fn gamma_sizes() {
        // gamma(1) is a single bit; gamma(v) = 2*floor(log2 v) + 1 bits.
        for (v, bits) in [(1u64, 1u64), (2, 3), (3, 3), (4, 5), (255, 15)] {
            let mut w = PackedWriter::new();
            w.push_gamma(v);
            assert_eq!(w.len(), bits, "gamma({v})");
        }
    }
}
