//! Brute-force reference: every query answered by a linear scan over the
//! raw discretized trips. No indexes, no cleverness — this is the ground
//! truth the compressed structures are checked against.

use crate::error::Result;
use crate::protocol::{Answer, Query};
use crate::query::{TimeWindow, TopKEntry, TripsEstimate};
use crate::trip::{discretize_trips, RawTrip, StoredTrip, TimeDiscretizer};
use crate::error::CtrError;

pub struct OracleStore {
    trips: Vec<StoredTrip>,
    pub sigma_t: u32,
    node_entries: u64,
}

impl OracleStore {
    pub fn new(trips: &[RawTrip], d: &TimeDiscretizer) -> Result<OracleStore> {
        let stored = discretize_trips(trips, d)?;
        let max_code = stored
            .iter()
            .flat_map(|t| t.codes.iter())
            .copied()
            .max()
            .unwrap_or(0);
        let sigma_t = d.fixed_sigma_t().unwrap_or(max_code + 1);
        let node_entries = stored.iter().map(|t| t.nodes.len() as u64).sum();
        Ok(OracleStore {
            trips: stored,
            sigma_t,
            node_entries,
        })
    }

    pub fn z(&self) -> u64 {
        self.trips.len() as u64
    }

    pub fn mean_trip_len(&self) -> f64 {
        self.node_entries as f64 / self.trips.len() as f64
    }

    fn check_window(&self, w: TimeWindow) -> Result<()> {
        if w.t1 > w.t2 || w.t2 >= self.sigma_t {
            return Err(CtrError::WindowInvalid {
                t1: w.t1 as u64,
                t2: w.t2 as u64,
                sigma_t: self.sigma_t as u64,
            });
        }
        Ok(())
    }

    fn in_w(w: TimeWindow, c: u32) -> bool {
        w.t1 <= c && c <= w.t2
    }

    pub fn starts_with_x(&self, x: u32, w: Option<TimeWindow>) -> u64 {
        self.trips
            .iter()
            .filter(|t| t.nodes[0] == x && w.map_or(true, |w| Self::in_w(w, t.codes[0])))
            .count() as u64
    }

    pub fn ends_with_x(&self, x: u32, w: Option<TimeWindow>) -> u64 {
        self.trips
            .iter()
            .filter(|t| {
                *t.nodes.last().unwrap() == x
                    && w.map_or(true, |w| Self::in_w(w, *t.codes.last().unwrap()))
            })
            .count() as u64
    }

    pub fn from_x_to_y(&self, x: u32, y: u32) -> u64 {
        self.trips
            .iter()
            .filter(|t| t.nodes[0] == x && *t.nodes.last().unwrap() == y)
            .count() as u64
    }

    /// Strong semantics: both the starting and the ending code fall in the
    /// window.
    pub fn from_x_to_y_strong(&self, x: u32, y: u32, w: TimeWindow) -> u64 {
        self.trips
            .iter()
            .filter(|t| {
                t.nodes[0] == x
                    && *t.nodes.last().unwrap() == y
                    && Self::in_w(w, t.codes[0])
                    && Self::in_w(w, *t.codes.last().unwrap())
            })
            .count() as u64
    }

    /// Weak semantics: the trip's lifetime `[start, end]` intersects the
    /// window.
    pub fn from_x_to_y_weak(&self, x: u32, y: u32, w: TimeWindow) -> u64 {
        self.trips
            .iter()
            .filter(|t| {
                t.nodes[0] == x
                    && *t.nodes.last().unwrap() == y
                    && t.codes[0] <= w.t2
                    && *t.codes.last().unwrap() >= w.t1
            })
            .count() as u64
    }

    /// Node-visit occurrences, not distinct trips: a node revisited by the
    /// same trip counts each visit, matching the self-index semantics.
    pub fn uses_x(&self, x: u32, w: Option<TimeWindow>) -> u64 {
        self.trips
            .iter()
            .flat_map(|t| t.nodes.iter().zip(&t.codes))
            .filter(|&(&n, &c)| n == x && w.map_or(true, |w| Self::in_w(w, c)))
            .count() as u64
    }

    pub fn starts_t(&self, w: TimeWindow) -> u64 {
        self.trips
            .iter()
            .filter(|t| Self::in_w(w, t.codes[0]))
            .count() as u64
    }

    pub fn uses_t(&self, w: TimeWindow) -> u64 {
        self.trips
            .iter()
            .flat_map(|t| t.codes.iter())
            .filter(|&&c| Self::in_w(w, c))
            .count() as u64
    }

    pub fn trips_t_estimate(&self, w: TimeWindow) -> TripsEstimate {
        TripsEstimate {
            starts_based: self.starts_t(w),
            usage_based: self.uses_t(w) as f64 / self.mean_trip_len(),
        }
    }

    fn topk_from_counts(counts: &[u64], k: usize) -> Vec<TopKEntry> {
        let mut entries: Vec<TopKEntry> = counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(node, &count)| TopKEntry {
                node: node as u32,
                count,
            })
            .collect();
        entries.sort_by(|a, b| b.count.cmp(&a.count).then(a.node.cmp(&b.node)));
        entries.truncate(k);
        entries
    }

    pub fn top_k(&self, k: usize, w: Option<TimeWindow>) -> Vec<TopKEntry> {
        let max_node = self
            .trips
            .iter()
            .flat_map(|t| t.nodes.iter())
            .copied()
            .max()
            .unwrap_or(0);
        let mut counts = vec![0u64; max_node as usize + 1];
        for t in &self.trips {
            for (&n, &c) in t.nodes.iter().zip(&t.codes) {
                if w.map_or(true, |w| Self::in_w(w, c)) {
                    counts[n as usize] += 1;
                }
            }
        }
        Self::topk_from_counts(&counts, k)
    }

    pub fn top_k_starts(&self, k: usize, w: Option<TimeWindow>) -> Vec<TopKEntry> {
        let max_node = self
            .trips
            .iter()
            .flat_map(|t| t.nodes.iter())
            .copied()
            .max()
            .unwrap_or(0);
        let mut counts = vec![0u64; max_node as usize + 1];
        for t in &self.trips {
            if w.map_or(true, |w| Self::in_w(w, t.codes[0])) {
                counts[t.nodes[0] as usize] += 1;
            }
        }
        Self::topk_from_counts(&counts, k)
    }

    /// Answer any protocol query; errors mirror the query engine.
    pub fn run_query(&self, q: &Query) -> Result<Answer> {
        let check_opt = |w: Option<TimeWindow>| -> Result<()> {
            match w {
                Some(w) => self.check_window(w),
                None => Ok(()),
            }
        };
        Ok(match *q {
            Query::StartsWithX { x, w } => {
                check_opt(w)?;
                Answer::Count(self.starts_with_x(x, w))
            }
            Query::EndsWithX { x, w } => {
                check_opt(w)?;
                Answer::Count(self.ends_with_x(x, w))
            }
            Query::FromXToY { x, y } => Answer::Count(self.from_x_to_y(x, y)),
            Query::FromXToYStrong { x, y, w } => {
                self.check_window(w)?;
                Answer::Count(self.from_x_to_y_strong(x, y, w))
            }
            Query::FromXToYWeak { x, y, w } => {
                self.check_window(w)?;
                Answer::Count(self.from_x_to_y_weak(x, y, w))
            }
            Query::UsesX { x, w } => {
                check_opt(w)?;
                Answer::Count(self.uses_x(x, w))
            }
            Query::StartsT { w } => {
                self.check_window(w)?;
                Answer::Count(self.starts_t(w))
            }
            Query::UsesT { w } => {
                self.check_window(w)?;
                Answer::Count(self.uses_t(w))
            }
            Query::TripsT { w } => {
                self.check_window(w)?;
                Answer::Estimate(self.trips_t_estimate(w))
            }
            Query::TopK { k, w, .. } => {
                check_opt(w)?;
                Answer::TopK(self.top_k(k, w))
            }
            Query::TopKStarts { k, w, .. } => {
                check_opt(w)?;
                Answer::TopK(self.top_k_starts(k, w))
            }
        })
    }
}

/// Seeded query mix covering every class, including nodes past `sigma_s`
/// (legal arguments that must count zero).
pub fn random_queries(sigma_s: u32, sigma_t: u32, per_class: usize, seed: u64) -> Vec<Query> {
    use crate::query::TopKStrategy;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(seed);
    let mut queries = Vec::new();
    let max_node = sigma_s + 2;
    for _ in 0..per_class {
        let x = rng.gen_range(1..=max_node);
        let y = rng.gen_range(1..=max_node);
        let t1 = rng.gen_range(0..sigma_t);
        let t2 = rng.gen_range(t1..sigma_t);
        let w = TimeWindow::new(t1, t2);
        let wopt = if rng.gen_bool(0.5) { Some(w) } else { None };
        let k = rng.gen_range(1..=12usize);
        let strategy = if rng.gen_bool(0.5) {
            TopKStrategy::Sequential
        } else {
            TopKStrategy::BinaryPartition
        };
        queries.push(Query::StartsWithX { x, w: wopt });
        queries.push(Query::EndsWithX { x, w: wopt });
        queries.push(Query::FromXToY { x, y });
        queries.push(Query::FromXToYStrong { x, y, w });
        queries.push(Query::FromXToYWeak { x, y, w });
        queries.push(Query::UsesX { x, w: wopt });
        queries.push(Query::StartsT { w });
        queries.push(Query::UsesT { w });
        queries.push(Query::TripsT { w });
        queries.push(Query::TopK { k, strategy, w: wopt });
        queries.push(Query::TopKStarts { k, strategy, w: wopt });
    }
    queries
}

/// Cross-check the index against the oracle on a seeded query mix; returns
/// how many queries were checked, or a reproduction line on mismatch.
pub fn cross_check(
    index: &crate::query::CtrIndex,
    oracle: &OracleStore,
    per_class: usize,
    seed: u64,
) -> std::result::Result<usize, String> {
    let queries = random_queries(index.sigma_s(), index.sigma_t(), per_class, seed);
    for q in &queries {
        let got = index.run_query(q);
        let want = oracle.run_query(q);
        let ok = match (&got, &want) {
            (Ok(a), Ok(b)) => a == b,
            (Err(_), Err(_)) => true,
            _ => false,
        };
        if !ok {
            return Err(format!(
                "mismatch on {q:?}: index says {got:?}, oracle says {want:?}"
            ));
        }
    }
    Ok(queries.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trip::fixtures::example1_trips;

    fn oracle() -> OracleStore {
        OracleStore::new(&example1_trips(), &TimeDiscretizer::linear(5)).unwrap()
    }

    #[test]
    fn worked_example_counts() {
        let o = oracle();
        assert_eq!(o.uses_x(3, None), 5);
        assert_eq!(o.starts_t(TimeWindow::new(0, 5)), 3);
        assert_eq!(o.uses_t(TimeWindow::new(14, 15)), 4);
        assert_eq!(o.from_x_to_y(1, 3), 2);
        assert_eq!(o.top_k(1, None), vec![TopKEntry { node: 3, count: 5 }]);
    }

    #[test]
    fn empty_window_overlap_gives_zero() {
        let o = oracle();
        // No trip touches code 1.
        assert_eq!(o.uses_t(TimeWindow::new(1, 1)), 0);
        let e = o.trips_t_estimate(TimeWindow::new(1, 1));
        assert_eq!(e.starts_based, 0);
        assert_eq!(e.usage_based, 0.0);
    }

    #[test]
    fn weak_contains_strong() {
        let o = oracle();
        for t1 in 0..16u32 {
            for t2 in t1..16u32 {
                let w = TimeWindow::new(t1, t2);
                assert!(o.from_x_to_y_weak(2, 7, w) >= o.from_x_to_y_strong(2, 7, w));
            }
        }
    }
}
