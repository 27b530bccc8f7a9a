//! Compact Trip Representation: a self-indexed, compressed in-memory
//! representation of trips over a transportation network that answers
//! spatial, temporal, and spatio-temporal counting queries.
//!
//! The index has two cooperating halves:
//!
//! - [`csa::SpatialIndex`]: a compressed suffix array over the
//!   terminator-augmented concatenation of all trips, with a cyclic Psi
//!   permutation so that each trip terminator points back to the first
//!   node of its own trip.
//! - [`wavelet::TemporalIndex`]: a wavelet matrix or a Hu-Tucker-shaped
//!   wavelet tree over the trip time codes permuted into suffix-array
//!   order, answering `count`/`countLR` range queries.
//!
//! [`query::CtrIndex`] composes both and implements the query catalogue
//! (`starts-with-x`, `ends-with-x`, `from-x-to-y` with strong/weak time
//! semantics, `uses-x`, `starts-t`, `uses-t`, `trips-t`, and the two
//! top-k strategies). [`oracle`] provides a brute-force reference used
//! by the verification machinery, [`gen`] a synthetic trip generator,
//! and [`bench`] the space/time benchmark harness.

pub mod align;
pub mod bench;
pub mod bits;
pub mod csa;
pub mod error;
pub mod gen;
pub mod io;
pub mod oracle;
pub mod protocol;
pub mod query;
pub mod sais;
pub mod trip;
pub mod wavelet;

pub use error::CtrError;
pub use query::{CtrIndex, TimeWindow, TopKEntry, TopKStrategy};
pub use trip::{RawTrip, TimeDiscretizer, TimeMode, TripStore};
