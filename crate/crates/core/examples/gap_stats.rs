use ctr_core::csa::SpatialIndex;
use ctr_core::gen::{generate_dataset, NetworkModel, TimeDistKind};
use ctr_core::sais::suffix_array;
use ctr_core::trip::{DayTypeTable, TimeDiscretizer, TimeMode, TripStore};

fn main() {
    let model = NetworkModel::madrid_like();
    let trips = generate_dataset(&model, 100_000, TimeDistKind::Skewed, 28, 0xfeed);
    let d = TimeDiscretizer::new(5, TimeMode::DayTypes, 0, Some(DayTypeTable::eight_classes())).unwrap();
    let store = TripStore::build(&trips, &d, None).unwrap();
    let sa = suffix_array(&store.s);
    let idx = SpatialIndex::build(&store, &sa, 32);
    let n = store.n;
    let z = store.z;
    let psi: Vec<u64> = (1..=n).map(|i| idx.psi_at(i)).collect();

    // token statistics per region, ignoring block boundaries
    let t_psi = 32u64;
    let mut runs = 0u64;
    let mut run_entries = 0u64;
    let mut run_len_hist = [0u64; 5]; // 1, 2-7, 8-31, 32-127, 128+
    let mut gaps = 0u64;
    let mut gap_dollar = 0u64;
    let mut gap_bits_hist = [0u64; 6]; // zz bits <=3, <=6, <=9, <=12, <=15, more
    let mut zz_total_bits = 0u64;
    let mut i = 1usize;
    while i < psi.len() {
        if i as u64 % t_psi == 0 {
            i += 1;
            continue; // block start: absolute sample
        }
        if psi[i] == psi[i - 1] + 1 {
            let mut run = 1u64;
            while i + (run as usize) < psi.len()
                && (i as u64 + run) % t_psi != 0
                && psi[i + run as usize] == psi[i + run as usize - 1] + 1
            {
                run += 1;
            }
            runs += 1;
            run_entries += run;
            let slot = match run {
                1 => 0,
                2..=7 => 1,
                8..=31 => 2,
                32..=127 => 3,
                _ => 4,
            };
            run_len_hist[slot] += 1;
            i += run as usize;
        } else {
            gaps += 1;
            if i < (z + 1) as usize {
                gap_dollar += 1;
            }
            let g = psi[i] as i64 - psi[i - 1] as i64;
            let zz = ((g << 1) ^ (g >> 63)) as u64;
            let bits = 64 - zz.max(1).leading_zeros() as u64;
            zz_total_bits += bits;
            let slot = match bits {
                0..=3 => 0,
                4..=6 => 1,
                7..=9 => 2,
                10..=12 => 3,
                13..=15 => 4,
                _ => 5,
            };
            gap_bits_hist[slot] += 1;
            i += 1;
        }
    }
    println!("n={n} z={z}");
    println!("runs={runs} covering {run_entries} entries; len hist(1,2-7,8-31,32-127,128+)={run_len_hist:?}");
    println!("gap tokens={gaps} (in $ region: {gap_dollar}); zz-bits hist(<=3,<=6,<=9,<=12,<=15,16+)={gap_bits_hist:?}");
    println!("mean zz bits = {:.2}", zz_total_bits as f64 / gaps as f64);
    println!("current stream bits/sym = {:.3}", (idx.size_bits() as f64 - (n as f64 / 32.0) * 48.0) / n as f64);
}
