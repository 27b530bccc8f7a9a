//! Builds the time-code sequence permuted into suffix-array order, the
//! hand-off between the trip store and the temporal wavelet structure.
//! Positions 2..=z+1 then carry trip starting times (aligned with the
//! terminator entries of Psi), and node positions carry visit times.

use crate::error::{CtrError, Result};
use crate::trip::TripStore;

#[derive(Clone, Debug)]
pub struct AlignedTimes {
    /// `icode_psi[i] = Icode[A[i]]`, 0-based over 1-based SA positions.
    pub icode_psi: Vec<u32>,
    pub sigma_t: u32,
}

pub fn align_times(store: &TripStore, sa: &[u32]) -> Result<AlignedTimes> {
    if sa.len() != store.icode.len() {
        return Err(CtrError::LengthMismatch {
            got: sa.len(),
            expected: store.icode.len(),
        });
    }
    let icode_psi = sa.iter().map(|&p| store.icode[p as usize]).collect();
    Ok(AlignedTimes {
        icode_psi,
        sigma_t: store.sigma_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sais::suffix_array;
    use crate::trip::fixtures::example1_store;

    #[test]
    fn example1_cited_values() {
        let store = example1_store();
        let sa = suffix_array(&store.s);
        let aligned = align_times(&store, &sa).unwrap();
        // Worked-example alignments (1-based positions 4 and 15).
        assert_eq!(aligned.icode_psi[3], 10);
        assert_eq!(aligned.icode_psi[14], 8);
        // Positions 2..=z+1 carry the starting times of the sorted trips.
        let starts: Vec<u32> = (1..=store.z as usize)
            .map(|i| aligned.icode_psi[i])
            .collect();
        let expect: Vec<u32> = store.trips.iter().map(|t| t.codes[0]).collect();
        assert_eq!(starts, expect);
    }

    #[test]
    fn permutation_preserves_multiset() {
        let store = example1_store();
        let sa = suffix_array(&store.s);
        let aligned = align_times(&store, &sa).unwrap();
        let mut a = aligned.icode_psi.clone();
        let mut b = store.icode.clone();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn length_mismatch_detected() {
        let store = example1_store();
        assert!(matches!(
            align_times(&store, &[0, 1, 2]),
            Err(CtrError::LengthMismatch { got: 3, .. })
        ));
    }

    #[test]
    fn start_blocks_are_sorted() {
        // Within any maximal $XY block the starting times are
        // non-decreasing — the precondition countLR relies on.
        let store = example1_store();
        let sa = suffix_array(&store.s);
        let aligned = align_times(&store, &sa).unwrap();
        let mut by_pair: Vec<((u32, u32), u32)> = store
            .trips
            .iter()
            .enumerate()
            .map(|(i, t)| {
                (
                    (t.nodes[0], *t.nodes.last().unwrap()),
                    aligned.icode_psi[i + 1],
                )
            })
            .collect();
        by_pair.sort_by_key(|&(pair, _)| pair);
        for w in by_pair.windows(2) {
            if w[0].0 == w[1].0 {
                assert!(w[0].1 <= w[1].1, "starting times sorted within {:?}", w[0].0);
            }
        }
    }
}
