//! Wavelet tree shaped by a Hu-Tucker code: frequent symbols sit near the
//! root, and because the code is order-preserving every subtree covers a
//! contiguous symbol range, so range `count` stays a single traversal.
//!
//! Storage is pointerless: the per-node bitvectors of each depth are
//! concatenated into one bitvector per level, plus an explicit shape table
//! (node offsets, lengths, children, symbol ranges).

use crate::bits::{BitBuf, Bits, BvFlavor};
use crate::error::{CtrError, Result};
use crate::io::{ByteReader, ByteWriter};
use crate::wavelet::hu_tucker::{Child, HuTuckerCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum WtChild {
    Leaf(u32),
    Node(u32),
}

#[derive(Clone, Debug)]
struct WtNode {
    level: u32,
    offset: u64,
    len: u64,
    left: WtChild,
    right: WtChild,
    sym_lo: u32,
    sym_hi: u32,
    /// Smallest symbol routed to the right child.
    right_lo: u32,
}

#[derive(Clone, Debug)]
pub struct WaveletTree {
    n: u64,
    sigma: u64,
    /// Code lengths per symbol; the shape is their pure function.
    lengths: Vec<u32>,
    /// Shape table in BFS order; node 0 is the root (absent for sigma = 1).
    nodes: Vec<WtNode>,
    /// Concatenated node bitvectors per level.
    levels: Vec<Bits>,
}

impl WaveletTree {
    /// Index `seq` over `0..sigma` with a Hu-Tucker shape derived from the
    /// symbol frequencies of `seq` (zero frequencies are kept queryable).
    pub fn build(seq: &[u32], sigma: u64, flavor: BvFlavor) -> WaveletTree {
        assert!(sigma >= 1, "alphabet must be non-empty");
        debug_assert!(seq.iter().all(|&c| (c as u64) < sigma));
        let mut freqs = vec![0u64; sigma as usize];
        for &c in seq {
            freqs[c as usize] += 1;
        }
        let code = HuTuckerCode::build(&freqs).expect("non-empty alphabet");
        Self::build_with_code(seq, sigma, &code, flavor)
    }

    pub fn build_with_code(
        seq: &[u32],
        sigma: u64,
        code: &HuTuckerCode,
        flavor: BvFlavor,
    ) -> WaveletTree {
        assert_eq!(code.sigma() as u64, sigma);
        let mut nodes = shape_from_code(code);
        let n_levels = nodes.iter().map(|n| n.level + 1).max().unwrap_or(0) as usize;
        let mut levels = Vec::with_capacity(n_levels);

        // Route the sequence level by level; BFS order keeps each level's
        // node sequences contiguous and in table order.
        let mut node_idx = 0usize;
        let mut cur: Vec<Vec<u32>> = if nodes.is_empty() {
            Vec::new()
        } else {
            vec![seq.to_vec()]
        };
        for _level in 0..n_levels {
            let mut buf = BitBuf::new();
            let mut next: Vec<Vec<u32>> = Vec::new();
            for elems in cur.drain(..) {
                let node = &mut nodes[node_idx];
                node.offset = buf.len();
                node.len = elems.len() as u64;
                let mut lseq = Vec::new();
                let mut rseq = Vec::new();
                for e in elems {
                    let right = e >= node.right_lo;
                    buf.push(right);
                    if right {
                        rseq.push(e);
                    } else {
                        lseq.push(e);
                    }
                }
                if matches!(node.left, WtChild::Node(_)) {
                    next.push(lseq);
                }
                if matches!(node.right, WtChild::Node(_)) {
                    next.push(rseq);
                }
                node_idx += 1;
            }
            levels.push(Bits::build(flavor, &buf));
            cur = next;
        }

        WaveletTree {
            n: seq.len() as u64,
            sigma,
            lengths: code.lengths().to_vec(),
            nodes,
            levels,
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

    pub fn code_lengths(&self) -> &[u32] {
        &self.lengths
    }

    #[inline]
    fn rank1_local(&self, node: &WtNode, p: u64) -> u64 {
        let bits = &self.levels[node.level as usize];
        bits.rank1(node.offset + p) - bits.rank1(node.offset)
    }

    #[inline]
    fn rank0_local(&self, node: &WtNode, p: u64) -> u64 {
        p - self.rank1_local(node, p)
    }

    pub fn access(&self, i: u64) -> u32 {
        assert!(i >= 1 && i <= self.n, "position {i} out of range");
        if self.nodes.is_empty() {
            return 0;
        }
        let mut child = WtChild::Node(0);
        let mut pos = i;
        loop {
            match child {
                WtChild::Leaf(s) => return s,
                WtChild::Node(idx) => {
                    let node = &self.nodes[idx as usize];
                    let bits = &self.levels[node.level as usize];
                    if bits.access(node.offset + pos) {
                        pos = self.rank1_local(node, pos);
                        child = node.right;
                    } else {
                        pos = self.rank0_local(node, pos);
                        child = node.left;
                    }
                }
            }
        }
    }

    pub fn rank_c(&self, c: u32, i: u64) -> u64 {
        assert!((c as u64) < self.sigma, "symbol {c} out of range");
        assert!(i <= self.n, "position {i} out of range");
        if self.nodes.is_empty() {
            return i;
        }
        let mut child = WtChild::Node(0);
        let mut pos = i;
        loop {
            match child {
                WtChild::Leaf(_) => return pos,
                WtChild::Node(idx) => {
                    if pos == 0 {
                        return 0;
                    }
                    let node = &self.nodes[idx as usize];
                    if c >= node.right_lo {
                        pos = self.rank1_local(node, pos);
                        child = node.right;
                    } else {
                        pos = self.rank0_local(node, pos);
                        child = node.left;
                    }
                }
            }
        }
    }

    pub fn select_c(&self, c: u32, k: u64) -> u64 {
        assert!((c as u64) < self.sigma, "symbol {c} out of range");
        let total = self.rank_c(c, self.n);
        assert!(k >= 1 && k <= total, "select rank {k} out of range");
        if self.nodes.is_empty() {
            return k;
        }
        // Descend recording the path, then map the position back up.
        let mut path: Vec<(u32, bool)> = Vec::with_capacity(self.levels.len());
        let mut child = WtChild::Node(0);
        loop {
            match child {
                WtChild::Leaf(_) => break,
                WtChild::Node(idx) => {
                    let node = &self.nodes[idx as usize];
                    let right = c >= node.right_lo;
                    path.push((idx, right));
                    child = if right { node.right } else { node.left };
                }
            }
        }
        let mut pos = k;
        for &(idx, right) in path.iter().rev() {
            let node = &self.nodes[idx as usize];
            let bits = &self.levels[node.level as usize];
            if right {
                let base = bits.rank1(node.offset);
                pos = bits.select1(base + pos) - node.offset;
            } else {
                let base = node.offset - bits.rank1(node.offset);
                pos = bits.select0(base + pos) - node.offset;
            }
        }
        pos
    }

    pub fn count(&self, i: u64, j: u64, alpha: u32, beta: u32) -> u64 {
        assert!(i >= 1 && i <= j && j <= self.n, "range [{i},{j}] invalid");
        assert!(alpha <= beta && (beta as u64) < self.sigma, "symbol range invalid");
        if self.nodes.is_empty() {
            return j - i + 1;
        }
        self.count_rec(WtChild::Node(0), i, j, alpha, beta)
    }

    fn child_range(&self, child: WtChild) -> (u32, u32) {
        match child {
            WtChild::Leaf(s) => (s, s),
            WtChild::Node(idx) => {
                let n = &self.nodes[idx as usize];
                (n.sym_lo, n.sym_hi)
            }
        }
    }

    fn count_rec(&self, child: WtChild, i: u64, j: u64, alpha: u32, beta: u32) -> u64 {
        if i > j {
            return 0;
        }
        let (lo, hi) = self.child_range(child);
        if hi < alpha || lo > beta {
            return 0;
        }
        if alpha <= lo && hi <= beta {
            return j - i + 1;
        }
        // Partial overlap only happens at internal nodes.
        let WtChild::Node(idx) = child else { unreachable!() };
        let node = &self.nodes[idx as usize];
        let r1_im1 = self.rank1_local(node, i - 1);
        let r1_j = self.rank1_local(node, j);
        let (il, jl) = (i - r1_im1, j - r1_j);
        let (ir, jr) = (r1_im1 + 1, r1_j);
        self.count_rec(node.left, il, jl, alpha, beta)
            + self.count_rec(node.right, ir, jr, alpha, beta)
    }

    /// Single-traversal countLR: number of values below `t1` and number of
    /// values inside `[t1, t2]` within positions `[i, j]`. On the sorted
    /// ranges it is used for, this pins down the maximal subrange whose
    /// values fall in the window without a second traversal.
    pub fn count_lr_parts(&self, i: u64, j: u64, t1: u32, t2: u32) -> (u64, u64) {
        assert!(i >= 1 && i <= j && j <= self.n, "range [{i},{j}] invalid");
        assert!(t1 <= t2 && (t2 as u64) < self.sigma, "symbol range invalid");
        if self.nodes.is_empty() {
            return (0, j - i + 1); // all values are 0 >= t1
        }
        self.lr_rec(WtChild::Node(0), i, j, t1, t2)
    }

    fn lr_rec(&self, child: WtChild, i: u64, j: u64, t1: u32, t2: u32) -> (u64, u64) {
        if i > j {
            return (0, 0);
        }
        let (lo, hi) = self.child_range(child);
        if hi < t1 {
            return (j - i + 1, 0);
        }
        if lo > t2 {
            return (0, 0);
        }
        if t1 <= lo && hi <= t2 {
            return (0, j - i + 1);
        }
        let WtChild::Node(idx) = child else { unreachable!() };
        let node = &self.nodes[idx as usize];
        let r1_im1 = self.rank1_local(node, i - 1);
        let r1_j = self.rank1_local(node, j);
        let (bl, il) = self.lr_rec(node.left, i - r1_im1, j - r1_j, t1, t2);
        let (br, ir) = self.lr_rec(node.right, r1_im1 + 1, r1_j, t1, t2);
        (bl + br, il + ir)
    }

    /// Bitvector storage plus the shape table and code lengths.
    pub fn size_bits(&self) -> u64 {
        let level_bits: u64 = self.levels.iter().map(|b| b.size_bits()).sum();
        // Shape entry: level + offset + len + two tagged children + range.
        let shape_bits = self.nodes.len() as u64 * (32 + 64 + 64 + 2 * 40 + 3 * 32);
        level_bits + shape_bits + self.lengths.len() as u64 * 32
    }

    pub fn encode(&self, w: &mut ByteWriter) {
        w.put_u64(self.n);
        w.put_u64(self.sigma);
        w.put_u32_slice(&self.lengths);
        w.put_u64(self.nodes.len() as u64);
        for node in &self.nodes {
            w.put_u32(node.level);
            w.put_u64(node.offset);
            w.put_u64(node.len);
            encode_child(w, node.left);
            encode_child(w, node.right);
            w.put_u32(node.sym_lo);
            w.put_u32(node.sym_hi);
            w.put_u32(node.right_lo);
        }
        w.put_u64(self.levels.len() as u64);
        for level in &self.levels {
            level.encode(w);
        }
    }

    pub fn decode(r: &mut ByteReader) -> Result<WaveletTree> {
        let n = r.get_u64()?;
        let sigma = r.get_u64()?;
        let lengths = r.get_u32_slice()?;
        let n_nodes = r.get_u64()? as usize;
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            nodes.push(WtNode {
                level: r.get_u32()?,
                offset: r.get_u64()?,
                len: r.get_u64()?,
                left: decode_child(r)?,
                right: decode_child(r)?,
                sym_lo: r.get_u32()?,
                sym_hi: r.get_u32()?,
                right_lo: r.get_u32()?,
            });
        }
        let n_levels = r.get_u64()? as usize;
        let mut levels = Vec::with_capacity(n_levels);
        for _ in 0..n_levels {
            levels.push(Bits::decode(r)?);
        }
        Ok(WaveletTree {
            n,
            sigma,
            lengths,
            nodes,
            levels,
        })
    }
}

fn encode_child(w: &mut ByteWriter, c: WtChild) {
    match c {
        WtChild::Leaf(s) => {
            w.put_u8(0);
            w.put_u32(s);
        }
        WtChild::Node(i) => {
            w.put_u8(1);
            w.put_u32(i);
        }
    }
}

fn decode_child(r: &mut ByteReader) -> Result<WtChild> {
    match r.get_u8()? {
        0 => Ok(WtChild::Leaf(r.get_u32()?)),
        1 => Ok(WtChild::Node(r.get_u32()?)),
        t => Err(CtrError::Format(format!("unknown child tag {t}"))),
    }
}

/// BFS shape table from the alphabetic code tree (offsets and lengths are
/// filled in during routing).
fn shape_from_code(code: &HuTuckerCode) -> Vec<WtNode> {
    let tree = code.tree();
    let Child::Node(root) = tree.root else {
        return Vec::new(); // single-symbol alphabet: no internal nodes
    };
    // BFS order over alphabetic-tree node ids.
    let mut bfs: Vec<(u32, u32)> = vec![(root, 0)]; // (node id, level)
    let mut head = 0;
    while head < bfs.len() {
        let (id, level) = bfs[head];
        head += 1;
        let node = &tree.nodes[id as usize];
        for child in [node.left, node.right] {
            if let Child::Node(c) = child {
                bfs.push((c, level + 1));
            }
        }
    }
    let mut wt_index = vec![u32::MAX; tree.nodes.len()];
    for (wt_idx, &(id, _)) in bfs.iter().enumerate() {
        wt_index[id as usize] = wt_idx as u32;
    }
    let map_child = |c: Child| match c {
        Child::Leaf(s) => WtChild::Leaf(s),
        Child::Node(i) => WtChild::Node(wt_index[i as usize]),
    };
    bfs.iter()
        .map(|&(id, level)| {
            let node = &tree.nodes[id as usize];
            let right_lo = match node.right {
                Child::Leaf(s) => s,
                Child::Node(i) => tree.nodes[i as usize].sym_lo,
            };
            WtNode {
                level,
                offset: 0,
                len: 0,
                left: map_child(node.left),
                right: map_child(node.right),
                sym_lo: node.sym_lo,
                sym_hi: node.sym_hi,
                right_lo,
            }
        })
        .collect()
}
