//! Linear-time suffix array construction by induced sorting (SA-IS).

/// Suffix array of `s`: the 0-based starting positions of all suffixes in
/// lexicographic order. Works for any `u32` content; a sentinel smaller
/// than every symbol is appended internally.
pub fn suffix_array(s: &[u32]) -> Vec<u32> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let max = *s.iter().max().unwrap() as usize;
    let mut t = Vec::with_capacity(n + 1);
    t.extend(s.iter().map(|&c| c as usize + 1));
    t.push(0);
    let sa = sais(&t, max + 2);
    // Drop the sentinel suffix (always first).
    sa.into_iter().skip(1).map(|p| p as u32).collect()
}

/// SA-IS over `s`, which must end with a unique smallest symbol 0.
fn sais(s: &[usize], k: usize) -> Vec<usize> {
    let n = s.len();
    debug_assert!(s[n - 1] == 0);
    if n == 1 {
        return vec![0];
    }
    if n == 2 {
        return vec![1, 0];
    }

    // S/L classification; the sentinel is S-type.
    let mut stype = vec![false; n];
    stype[n - 1] = true;
    for i in (0..n - 1).rev() {
        stype[i] = s[i] < s[i + 1] || (s[i] == s[i + 1] && stype[i + 1]);
    }
    let is_lms = |i: usize| i > 0 && stype[i] && !stype[i - 1];

    let mut counts = vec![0usize; k];
    for &c in s {
        counts[c] += 1;
    }

    let lms: Vec<usize> = (1..n).filter(|&i| is_lms(i)).collect();

    // First induction from unsorted LMS positions sorts the LMS substrings.
    let mut sa = vec![usize::MAX; n];
    seed_lms(&mut sa, s, &counts, lms.iter().rev().copied());
    induce(&mut sa, s, &counts, &stype);

    // Name the LMS substrings in their induced (sorted) order.
    let mut name_of = vec![usize::MAX; n];
    let mut prev = usize::MAX;
    let mut name = 0usize;
    for &p in sa.iter() {
        if p != usize::MAX && is_lms(p) {
            if prev != usize::MAX && !lms_substring_eq(s, &stype, prev, p) {
                name += 1;
            }
            name_of[p] = name;
            prev = p;
        }
    }
    let n_names = name + 1;

    // Order the LMS suffixes, recursing only if names repeat.
    let s1: Vec<usize> = lms.iter().map(|&i| name_of[i]).collect();
    let order = if n_names == s1.len() {
        let mut order = vec![0usize; s1.len()];
        for (i, &nm) in s1.iter().enumerate() {
            order[nm] = i;
        }
        order
    } else {
        sais(&s1, n_names)
    };

    // Final induction from fully sorted LMS suffixes.
    sa.fill(usize::MAX);
    seed_lms(&mut sa, s, &counts, order.iter().rev().map(|&idx| lms[idx]));
    induce(&mut sa, s, &counts, &stype);
    sa
}

/// Place LMS positions at their bucket tails; the iterator must yield them
/// in reverse of the order they should occupy within each bucket.
fn seed_lms(
    sa: &mut [usize],
    s: &[usize],
    counts: &[usize],
    lms_rev: impl Iterator<Item = usize>,
) {
    let mut tails = bucket_tails(counts);
    for i in lms_rev {
        tails[s[i]] -= 1;
        sa[tails[s[i]]] = i;
    }
}

fn induce(sa: &mut [usize], s: &[usize], counts: &[usize], stype: &[bool]) {
    let n = s.len();
    let mut heads = bucket_heads(counts);
    for i in 0..n {
        let p = sa[i];
        if p != usize::MAX && p > 0 && !stype[p - 1] {
            let c = s[p - 1];
            sa[heads[c]] = p - 1;
            heads[c] += 1;
        }
    }
    let mut tails = bucket_tails(counts);
    for i in (0..n).rev() {
        let p = sa[i];
        if p != usize::MAX && p > 0 && stype[p - 1] {
            let c = s[p - 1];
            tails[c] -= 1;
            sa[tails[c]] = p - 1;
        }
    }
}

fn bucket_heads(counts: &[usize]) -> Vec<usize> {
    let mut heads = Vec::with_capacity(counts.len());
    let mut sum = 0;
    for &c in counts {
        heads.push(sum);
        sum += c;
    }
    heads
}

fn bucket_tails(counts: &[usize]) -> Vec<usize> {
    let mut tails = Vec::with_capacity(counts.len());
    let mut sum = 0;
    for &c in counts {
        sum += c;
        tails.push(sum);
    }
    tails
}

/// Two LMS substrings are equal iff symbols and types match up to and
/// including the next LMS position of both.
fn lms_substring_eq(s: &[usize], stype: &[bool], a: usize, b: usize) -> bool {
    let n = s.len();
    let is_lms = |i: usize| i > 0 && stype[i] && !stype[i - 1];
    let mut d = 0;
    loop {
        let pa = a + d;
        let pb = b + d;
        if pa >= n || pb >= n {
            return false;
        }
        if s[pa] != s[pb] || stype[pa] != stype[pb] {
            return false;
        }
        if d > 0 && (is_lms(pa) || is_lms(pb)) {
            return is_lms(pa) && is_lms(pb);
        }
        d += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn naive(s: &[u32]) -> Vec<u32> {
        let mut sa: Vec<u32> = (0..s.len() as u32).collect();
        sa.sort_by(|&a, &b| s[a as usize..].cmp(&s[b as usize..]));
        sa
    }

    #[test]
    fn trivial_inputs() {
        assert!(suffix_array(&[]).is_empty());
        assert_eq!(suffix_array(&[5]), vec![0]);
        assert_eq!(suffix_array(&[2, 1]), vec![1, 0]);
        assert_eq!(suffix_array(&[1, 1, 1]), vec![2, 1, 0]);
    }

    #[test]
    fn banana() {
        // "banana" with a=1, b=2, n=3
        let s = [2, 1, 3, 1, 3, 1];
        assert_eq!(suffix_array(&s), naive(&s));
    }

    #[test]
    fn random_small_strings_match_naive() {
        let mut rng = StdRng::seed_from_u64(0xabcd);
        for _ in 0..300 {
            let len = rng.gen_range(1..80);
            let sigma = rng.gen_range(1..8u32);
            let s: Vec<u32> = (0..len).map(|_| rng.gen_range(0..sigma)).collect();
            assert_eq!(suffix_array(&s), naive(&s), "input {s:?}");
        }
    }

    #[test]
    fn random_large_alphabet_matches_naive() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..50 {
            let len = rng.gen_range(1..400);
            let s: Vec<u32> = (0..len).map(|_| rng.gen_range(0..100_000)).collect();
            assert_eq!(suffix_array(&s), naive(&s));
        }
    }

    #[test]
    fn repetitive_input() {
        let mut s = Vec::new();
        for _ in 0..50 {
            s.extend_from_slice(&[7, 3, 7, 3, 3]);
        }
        assert_eq!(suffix_array(&s), naive(&s));
    }
}
