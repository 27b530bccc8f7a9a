//! Optimal alphabetic (order-preserving) prefix codes by the Hu-Tucker
//! construction: a combination phase over compatible pairs yields optimal
//! code lengths, and a stack-based recombination rebuilds an alphabetic
//! tree with exactly those depths.

use crate::error::{CtrError, Result};

/// An order-preserving prefix code over symbols `0..sigma`.
///
/// Codewords of adjacent symbols are lexicographically contiguous, which
/// is what lets a wavelet tree shaped by this code answer symbol-range
/// `count` queries in a single root-to-frontier traversal.
#[derive(Clone, Debug)]
pub struct HuTuckerCode {
    lengths: Vec<u32>,
    tree: AlphabeticTree,
}

/// Shape of the code as an explicit binary tree; leaves are the symbols
/// in alphabetic order.
#[derive(Clone, Debug)]
pub struct AlphabeticTree {
    pub nodes: Vec<ShapeNode>,
    pub root: Child,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Child {
    Leaf(u32),
    Node(u32),
}

#[derive(Clone, Debug)]
pub struct ShapeNode {
    pub left: Child,
    pub right: Child,
    /// Symbols covered by this subtree (contiguous by construction).
    pub sym_lo: u32,
    pub sym_hi: u32,
}

impl HuTuckerCode {
    /// Optimal alphabetic code for the given symbol frequencies.
    /// Zero frequencies are raised to one so every symbol stays queryable.
    pub fn build(freqs: &[u64]) -> Result<HuTuckerCode> {
        if freqs.is_empty() {
            return Err(CtrError::EmptyAlphabet);
        }
        let weights: Vec<u64> = freqs.iter().map(|&f| f.max(1)).collect();
        let lengths = combination_phase(&weights);
        let tree = tree_from_lengths(&lengths);
        Ok(HuTuckerCode { lengths, tree })
    }

    pub fn sigma(&self) -> u32 {
        self.lengths.len() as u32
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn tree(&self) -> &AlphabeticTree {
        &self.tree
    }

    /// Codeword of `sym` as explicit bits, derived from the tree shape.
    pub fn codeword(&self, sym: u32) -> Vec<bool> {
        let mut bits = Vec::with_capacity(self.lengths[sym as usize] as usize);
        let mut cur = self.tree.root;
        loop {
            match cur {
                Child::Leaf(s) => {
                    debug_assert_eq!(s, sym);
                    return bits;
                }
                Child::Node(idx) => {
                    let node = &self.tree.nodes[idx as usize];
                    let right_lo = match node.right {
                        Child::Leaf(s) => s,
                        Child::Node(r) => self.tree.nodes[r as usize].sym_lo,
                    };
                    if sym >= right_lo {
                        bits.push(true);
                        cur = node.right;
                    } else {
                        bits.push(false);
                        cur = node.left;
                    }
                }
            }
        }
    }

    /// Sum of `freq * len`, the payload bit count of a shaped wavelet tree.
    pub fn weighted_length(&self, freqs: &[u64]) -> u64 {
        freqs
            .iter()
            .zip(&self.lengths)
            .map(|(&f, &l)| f * l as u64)
            .sum()
    }

    /// Rebuild from serialized lengths (the tree shape is a pure function
    /// of the lengths).
    pub fn from_lengths(lengths: Vec<u32>) -> Result<HuTuckerCode> {
        if lengths.is_empty() {
            return Err(CtrError::EmptyAlphabet);
        }
        let tree = tree_from_lengths(&lengths);
        Ok(HuTuckerCode { lengths, tree })
    }
}

#[derive(Clone, Copy)]
struct WorkNode {
    weight: u64,
    terminal: bool,
    /// Index into the combination forest.
    tree: u32,
}

/// Combination phase: repeatedly join the compatible pair (no terminal
/// strictly between its members) of minimal combined weight. Ties prefer
/// the leftmost pair. The depths of the terminals in the resulting tree
/// are the optimal alphabetic code lengths.
fn combination_phase(weights: &[u64]) -> Vec<u32> {
    let sigma = weights.len();
    if sigma == 1 {
        return vec![0];
    }
    // Combination forest: 0..sigma are terminals, then internal joins.
    let mut children: Vec<(u32, u32)> = Vec::with_capacity(sigma - 1);
    let mut seq: Vec<WorkNode> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| WorkNode {
            weight: w,
            terminal: true,
            tree: i as u32,
        })
        .collect();

    while seq.len() > 1 {
        // Candidate pairs live inside maximal terminal-bounded windows;
        // within a window every pair is compatible, so the best pair of a
        // window is its two lightest nodes (leftmost on weight ties).
        let mut best: Option<(u64, usize, usize)> = None;
        let mut start = 0usize;
        while start < seq.len() {
            // Window spans [start, end] where end is the next terminal at
            // or after start+1, or the end of the sequence.
            let mut end = start + 1;
            while end < seq.len() && !seq[end].terminal {
                end += 1;
            }
            if end >= seq.len() {
                end = seq.len() - 1;
            }
            if end > start {
                let (a, b) = two_lightest(&seq[start..=end]);
                let (i, j) = (start + a, start + b);
                let sum = seq[i].weight + seq[j].weight;
                if best.map_or(true, |(bs, bi, bj)| {
                    (sum, i, j) < (bs, bi, bj)
                }) {
                    best = Some((sum, i, j));
                }
            }
            // Next window starts at the next terminal (windows overlap on
            // their bounding terminals).
            let next = (start + 1..seq.len()).find(|&p| seq[p].terminal);
            match next {
                Some(p) => start = p,
                None => break,
            }
        }
        let (sum, i, j) = best.expect("at least one compatible pair");
        let node = WorkNode {
            weight: sum,
            terminal: false,
            tree: (sigma + children.len()) as u32,
        };
        children.push((seq[i].tree, seq[j].tree));
        seq[i] = node;
        seq.remove(j);
    }

    // Terminal depths in the combination tree.
    let mut lengths = vec![0u32; sigma];
    let root = seq[0].tree;
    let mut stack = vec![(root, 0u32)];
    while let Some((t, depth)) = stack.pop() {
        if (t as usize) < sigma {
            lengths[t as usize] = depth;
        } else {
            let (l, r) = children[t as usize - sigma];
            stack.push((l, depth + 1));
            stack.push((r, depth + 1));
        }
    }
    lengths
}

/// Indices (relative to the slice) of the two lightest nodes, preferring
/// smaller indices on ties; the returned pair is ordered by index.
fn two_lightest(window: &[WorkNode]) -> (usize, usize) {
    debug_assert!(window.len() >= 2);
    let mut min1 = 0usize;
    for (idx, node) in window.iter().enumerate().skip(1) {
        if node.weight < window[min1].weight {
            min1 = idx;
        }
    }
    let mut min2 = usize::MAX;
    for (idx, node) in window.iter().enumerate() {
        if idx == min1 {
            continue;
        }
        if min2 == usize::MAX || node.weight < window[min2].weight {
            min2 = idx;
        }
    }
    if min1 < min2 {
        (min1, min2)
    } else {
        (min2, min1)
    }
}

/// Recombination: rebuild an alphabetic tree realizing the given depths.
/// Valid Hu-Tucker depth sequences always recombine completely.
fn tree_from_lengths(lengths: &[u32]) -> AlphabeticTree {
    if lengths.len() == 1 {
        return AlphabeticTree {
            nodes: Vec::new(),
            root: Child::Leaf(0),
        };
    }
    let mut nodes: Vec<ShapeNode> = Vec::with_capacity(lengths.len() - 1);
    // Stack entries: (child, depth, sym_lo, sym_hi)
    let mut stack: Vec<(Child, u32, u32, u32)> = Vec::new();
    for (sym, &len) in lengths.iter().enumerate() {
        stack.push((Child::Leaf(sym as u32), len, sym as u32, sym as u32));
        while stack.len() >= 2 {
            let (rc, rd, rlo, rhi) = stack[stack.len() - 1];
            let (lc, ld, llo, lhi) = stack[stack.len() - 2];
            if ld != rd {
                break;
            }
            stack.truncate(stack.len() - 2);
            debug_assert_eq!(lhi + 1, rlo);
            nodes.push(ShapeNode {
                left: lc,
                right: rc,
                sym_lo: llo,
                sym_hi: rhi,
            });
            stack.push((Child::Node(nodes.len() as u32 - 1), rd - 1, llo, rhi));
        }
    }
    assert!(
        stack.len() == 1 && stack[0].1 == 0,
        "depth sequence does not recombine to a single root"
    );
    AlphabeticTree {
        nodes,
        root: stack[0].0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// O(sigma^3) optimal alphabetic tree cost (weighted external path
    /// length) by dynamic programming — the independent oracle.
    pub fn optimal_alphabetic_cost(weights: &[u64]) -> u64 {
        let n = weights.len();
        if n == 1 {
            return 0;
        }
        let mut prefix = vec![0u64; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] + weights[i];
        }
        let mut dp = vec![vec![0u64; n]; n];
        for span in 1..n {
            for i in 0..n - span {
                let j = i + span;
                dp[i][j] = (i..j).map(|k| dp[i][k] + dp[k + 1][j]).min().unwrap()
                    + (prefix[j + 1] - prefix[i]);
            }
        }
        dp[0][n - 1]
    }

    fn assert_valid_code(code: &HuTuckerCode) {
        let sigma = code.sigma();
        let words: Vec<Vec<bool>> = (0..sigma).map(|s| code.codeword(s)).collect();
        for (s, w) in words.iter().enumerate() {
            assert_eq!(w.len() as u32, code.lengths()[s], "length mismatch at {s}");
        }
        // Order-preserving and prefix-free: each codeword lexicographically
        // precedes the next and is not its prefix.
        for s in 1..sigma as usize {
            let (a, b) = (&words[s - 1], &words[s]);
            assert!(a.as_slice() < b.as_slice(), "order violated at {s}");
            assert!(!b.starts_with(a), "prefix violated at {s}");
        }
    }

    #[test]
    fn equal_frequencies_give_balanced_code() {
        let code = HuTuckerCode::build(&[5, 5, 5, 5]).unwrap();
        assert_eq!(code.lengths(), &[2, 2, 2, 2]);
        assert_eq!(code.codeword(0), vec![false, false]);
        assert_eq!(code.codeword(1), vec![false, true]);
        assert_eq!(code.codeword(2), vec![true, false]);
        assert_eq!(code.codeword(3), vec![true, true]);
    }

    #[test]
    fn skewed_three_symbols() {
        // Exhaustive over alphabetic trees on 3 leaves: ((a,b),c) costs 12,
        // (a,(b,c)) costs 19 → lengths (2,2,1).
        let code = HuTuckerCode::build(&[1, 1, 8]).unwrap();
        assert_eq!(code.lengths(), &[2, 2, 1]);
        assert_valid_code(&code);
    }

    #[test]
    fn single_symbol() {
        let code = HuTuckerCode::build(&[42]).unwrap();
        assert_eq!(code.lengths(), &[0]);
        assert!(code.codeword(0).is_empty());
    }

    #[test]
    fn zero_frequencies_are_queryable() {
        let code = HuTuckerCode::build(&[0, 100, 0, 3]).unwrap();
        assert_eq!(code.sigma(), 4);
        assert_valid_code(&code);
    }

    #[test]
    fn empty_alphabet_rejected() {
        assert!(matches!(
            HuTuckerCode::build(&[]),
            Err(CtrError::EmptyAlphabet)
        ));
    }

    #[test]
    fn matches_dp_oracle_on_random_small_alphabets() {
        let mut rng = StdRng::seed_from_u64(0x4875);
        for round in 0..600 {
            let sigma = rng.gen_range(1..=16usize);
            let freqs: Vec<u64> = (0..sigma).map(|_| rng.gen_range(0..50)).collect();
            let weights: Vec<u64> = freqs.iter().map(|&f| f.max(1)).collect();
            let code = HuTuckerCode::build(&freqs).unwrap();
            assert_valid_code(&code);
            let got = code.weighted_length(&weights);
            let want = optimal_alphabetic_cost(&weights);
            assert_eq!(got, want, "round {round}, freqs {freqs:?}");
        }
    }

    #[test]
    fn entropy_bounds_on_random_vectors() {
        let mut rng = StdRng::seed_from_u64(0xe17);
        for _ in 0..40 {
            let sigma = rng.gen_range(2..=1024usize);
            let freqs: Vec<u64> = (0..sigma).map(|_| rng.gen_range(1..10_000)).collect();
            let code = HuTuckerCode::build(&freqs).unwrap();
            let total: u64 = freqs.iter().sum();
            let h0: f64 = freqs
                .iter()
                .map(|&f| {
                    let p = f as f64 / total as f64;
                    -p * p.log2()
                })
                .sum();
            let avg = code.weighted_length(&freqs) as f64 / total as f64;
            assert!(avg >= h0 - 1e-9, "avg {avg} below H0 {h0}");
            assert!(avg <= h0 + 2.0 + 1e-9, "avg {avg} above H0+2 {h0}");
        }
    }
}
