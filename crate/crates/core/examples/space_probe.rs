use ctr_core::bench::{spatial_baseline_bits, temporal_baseline_bits};
use ctr_core::bits::BvFlavor;
use ctr_core::csa::SpatialIndex;
use ctr_core::gen::{generate_dataset, NetworkModel, TimeDistKind};
use ctr_core::sais::suffix_array;
use ctr_core::trip::{DayTypeTable, TimeDiscretizer, TimeMode, TripStore};
use ctr_core::wavelet::{TemporalIndex, TimeStruct};

fn main() {
    let model = NetworkModel::madrid_like();
    let t0 = std::time::Instant::now();
    let trips = generate_dataset(&model, 100_000, TimeDistKind::Skewed, 28, 0xfeed);
    let mean = trips.iter().map(|t| t.nodes.len()).sum::<usize>() as f64 / trips.len() as f64;
    println!("generated 100k trips in {:?}, mean len {:.3}", t0.elapsed(), mean);

    let d = TimeDiscretizer::new(5, TimeMode::DayTypes, 0, Some(DayTypeTable::eight_classes())).unwrap();
    let t0 = std::time::Instant::now();
    let store = TripStore::build(&trips, &d, None).unwrap();
    println!("store: n={} z={} sigma_s={} sigma_t={} in {:?}", store.n, store.z, store.sigma_s, store.sigma_t, t0.elapsed());

    let t0 = std::time::Instant::now();
    let sa = suffix_array(&store.s);
    println!("suffix array in {:?}", t0.elapsed());

    let sp_base = spatial_baseline_bits(store.n, store.sigma_s);
    for t_psi in [32u32, 128, 512] {
        let t0 = std::time::Instant::now();
        let idx = SpatialIndex::build(&store, &sa, t_psi);
        println!(
            "spatial t_psi={t_psi}: {} bits = {:.2}% of baseline ({} bits/sym), built in {:?}",
            idx.size_bits(),
            100.0 * idx.size_bits() as f64 / sp_base as f64,
            sp_base / store.n,
            t0.elapsed()
        );
    }

    let aligned = ctr_core::align::align_times(&store, &sa).unwrap();
    let te_base = temporal_baseline_bits(store.n, store.sigma_t);
    for kind in [TimeStruct::Wtht, TimeStruct::Wm] {
        let t0 = std::time::Instant::now();
        let t = TemporalIndex::build(&aligned.icode_psi, store.sigma_t as u64, kind, BvFlavor::Plain);
        println!(
            "temporal skewed {:?} plain: {} bits = {:.2}% of baseline, built in {:?}",
            kind,
            t.size_bits(),
            100.0 * t.size_bits() as f64 / te_base as f64,
            t0.elapsed()
        );
    }

    // uniform times for criterion (c)
    let trips_u = generate_dataset(&model, 100_000, TimeDistKind::Uniform, 28, 0xfeed);
    let store_u = TripStore::build(&trips_u, &d, None).unwrap();
    let sa_u = suffix_array(&store_u.s);
    let aligned_u = ctr_core::align::align_times(&store_u, &sa_u).unwrap();
    let te_base_u = temporal_baseline_bits(store_u.n, store_u.sigma_t);
    let t = TemporalIndex::build(&aligned_u.icode_psi, store_u.sigma_t as u64, TimeStruct::Wtht, BvFlavor::Plain);
    println!(
        "temporal uniform WTHT plain: {:.2}% of baseline",
        100.0 * t.size_bits() as f64 / te_base_u as f64
    );
}
