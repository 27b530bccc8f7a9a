//! Trip parsing, validation, time discretization, canonical sorting, and
//! concatenation into the sequences the indexes are built from.

use std::cmp::Ordering;
use std::io::BufRead;

use crate::error::{CtrError, Result};
use crate::io::{ByteReader, ByteWriter};

/// One trip as parsed: the visited nodes and the instant each was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTrip {
    /// Node ids, 1-based, at least two of them.
    pub nodes: Vec<u32>,
    /// Epoch seconds aligned to `nodes`, non-decreasing.
    pub timestamps: Vec<u64>,
}

impl RawTrip {
    pub fn new(nodes: Vec<u32>, timestamps: Vec<u64>) -> Result<RawTrip> {
        let trip = RawTrip { nodes, timestamps };
        trip.validate(0)?;
        Ok(trip)
    }

    fn validate(&self, line: usize) -> Result<()> {
        if self.nodes.len() < 2 {
            return Err(CtrError::TripTooShort { line });
        }
        if self.nodes.len() != self.timestamps.len() {
            return Err(CtrError::MalformedLine {
                line,
                token: "node/timestamp arity mismatch".into(),
            });
        }
        if self.nodes.iter().any(|&n| n == 0) {
            return Err(CtrError::MalformedLine {
                line,
                token: "node id 0".into(),
            });
        }
        if self.timestamps.windows(2).any(|w| w[0] > w[1]) {
            return Err(CtrError::NonMonotoneTimestamps { line });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Parse the trip file format: one trip per line of space-separated
/// `node:timestamp` pairs, `#` lines ignored.
pub fn parse_trips<R: BufRead>(input: R) -> Result<Vec<RawTrip>> {
    let mut trips = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut nodes = Vec::new();
        let mut timestamps = Vec::new();
        for token in text.split_ascii_whitespace() {
            let Some((node_s, ts_s)) = token.split_once(':') else {
                return Err(CtrError::MalformedLine {
                    line: line_no,
                    token: token.into(),
                });
            };
            let node: u32 = node_s.parse().map_err(|_| CtrError::MalformedLine {
                line: line_no,
                token: token.into(),
            })?;
            let ts: u64 = ts_s.parse().map_err(|_| CtrError::MalformedLine {
                line: line_no,
                token: token.into(),
            })?;
            if node == 0 {
                return Err(CtrError::MalformedLine {
                    line: line_no,
                    token: token.into(),
                });
            }
            nodes.push(node);
            timestamps.push(ts);
        }
        if nodes.len() < 2 {
            return Err(CtrError::TripTooShort { line: line_no });
        }
        if timestamps.windows(2).any(|w| w[0] > w[1]) {
            return Err(CtrError::NonMonotoneTimestamps { line: line_no });
        }
        trips.push(RawTrip { nodes, timestamps });
    }
    Ok(trips)
}

/// Render trips in the trip file format.
pub fn format_trips(trips: &[RawTrip]) -> String {
    let mut out = String::new();
    for trip in trips {
        let mut first = true;
        for (&n, &t) in trip.nodes.iter().zip(&trip.timestamps) {
            if !first {
                out.push(' ');
            }
            out.push_str(&format!("{n}:{t}"));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// How timestamps map onto the discrete time alphabet.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TimeMode {
    /// Single unbounded window starting at `origin`.
    Linear,
    /// Wrap on UTC day boundaries.
    CyclicDay,
    /// Wrap on UTC week boundaries.
    CyclicWeek,
    /// Day classes from a calendar table, each with its own day window.
    DayTypes,
}

impl TimeMode {
    pub fn tag(self) -> u8 {
        match self {
            TimeMode::Linear => 0,
            TimeMode::CyclicDay => 1,
            TimeMode::CyclicWeek => 2,
            TimeMode::DayTypes => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(TimeMode::Linear),
            1 => Ok(TimeMode::CyclicDay),
            2 => Ok(TimeMode::CyclicWeek),
            3 => Ok(TimeMode::DayTypes),
            _ => Err(CtrError::Format(format!("unknown time mode {tag}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TimeMode::Linear => "linear",
            TimeMode::CyclicDay => "cyclic-day",
            TimeMode::CyclicWeek => "cyclic-week",
            TimeMode::DayTypes => "day-types",
        }
    }
}

impl std::str::FromStr for TimeMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear" => Ok(TimeMode::Linear),
            "cyclic-day" => Ok(TimeMode::CyclicDay),
            "cyclic-week" => Ok(TimeMode::CyclicWeek),
            "day-types" => Ok(TimeMode::DayTypes),
            _ => Err(format!("unknown time mode `{s}`")),
        }
    }
}

const DAY_SECONDS: u64 = 86_400;
const WEEK_SECONDS: u64 = 7 * DAY_SECONDS;

/// Calendar-day classification: day `d` (days since epoch, UTC) belongs to
/// class `classes[d % classes.len()]`. At most 8 classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DayTypeTable {
    pub classes: Vec<u8>,
}

impl DayTypeTable {
    pub fn new(classes: Vec<u8>) -> Result<DayTypeTable> {
        if classes.is_empty() {
            return Err(CtrError::ModelInvalid("day type table is empty".into()));
        }
        if classes.iter().any(|&c| c >= 8) {
            return Err(CtrError::ModelInvalid(
                "day classes limited to 0..8".into(),
            ));
        }
        Ok(DayTypeTable { classes })
    }

    /// Parse the table file: one line of comma-separated class ids.
    pub fn parse(text: &str) -> Result<DayTypeTable> {
        let classes = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u8>()
                    .map_err(|_| CtrError::ModelInvalid(format!("bad day class `{s}`")))
            })
            .collect::<Result<Vec<u8>>>()?;
        DayTypeTable::new(classes)
    }

    pub fn n_classes(&self) -> u32 {
        *self.classes.iter().max().unwrap() as u32 + 1
    }

    pub fn class_of_day(&self, day: u64) -> u32 {
        self.classes[(day % self.classes.len() as u64) as usize] as u32
    }

    /// Two seasons of four weekday kinds (working day / Friday / Saturday /
    /// Sunday), a 28-day cycle: the paper-style eight day classes.
    pub fn eight_classes() -> DayTypeTable {
        let mut classes = Vec::with_capacity(28);
        for week in 0..4u8 {
            let season = week / 2; // weeks 0-1 high season, 2-3 low
            for weekday in 0..7u8 {
                let kind = match weekday {
                    0..=3 => 0, // Mon-Thu
                    4 => 1,     // Fri
                    5 => 2,     // Sat
                    _ => 3,     // Sun
                };
                classes.push(season * 4 + kind);
            }
        }
        DayTypeTable { classes }
    }
}

/// Maps epoch seconds to integer time codes in `[0, sigma_t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeDiscretizer {
    pub interval_minutes: u32,
    pub mode: TimeMode,
    /// Epoch-seconds origin for `Linear` mode.
    pub origin: u64,
    pub day_types: Option<DayTypeTable>,
}

impl TimeDiscretizer {
    pub fn new(
        interval_minutes: u32,
        mode: TimeMode,
        origin: u64,
        day_types: Option<DayTypeTable>,
    ) -> Result<TimeDiscretizer> {
        if interval_minutes == 0 {
            return Err(CtrError::ModelInvalid("interval must be positive".into()));
        }
        if mode == TimeMode::DayTypes && day_types.is_none() {
            return Err(CtrError::ModelInvalid(
                "day-types mode requires a day type table".into(),
            ));
        }
        Ok(TimeDiscretizer {
            interval_minutes,
            mode,
            origin,
            day_types,
        })
    }

    pub fn linear(interval_minutes: u32) -> TimeDiscretizer {
        TimeDiscretizer {
            interval_minutes,
            mode: TimeMode::Linear,
            origin: 0,
            day_types: None,
        }
    }

    fn interval_seconds(&self) -> u64 {
        self.interval_minutes as u64 * 60
    }

    pub fn codes_per_day(&self) -> u32 {
        ((DAY_SECONDS + self.interval_seconds() - 1) / self.interval_seconds()) as u32
    }

    /// Time code of one timestamp.
    pub fn code(&self, t: u64) -> Result<u32> {
        let w = self.interval_seconds();
        let code = match self.mode {
            TimeMode::Linear => {
                if t < self.origin {
                    return Err(CtrError::TimestampOutOfRange { timestamp: t });
                }
                (t - self.origin) / w
            }
            TimeMode::CyclicDay => (t % DAY_SECONDS) / w,
            TimeMode::CyclicWeek => (t % WEEK_SECONDS) / w,
            TimeMode::DayTypes => {
                let table = self.day_types.as_ref().expect("validated at construction");
                let class = table.class_of_day(t / DAY_SECONDS) as u64;
                class * self.codes_per_day() as u64 + (t % DAY_SECONDS) / w
            }
        };
        u32::try_from(code).map_err(|_| CtrError::TimestampOutOfRange { timestamp: t })
    }

    /// Discretize a whole trip.
    pub fn discretize(&self, trip: &RawTrip) -> Result<Vec<u32>> {
        trip.timestamps.iter().map(|&t| self.code(t)).collect()
    }

    /// Alphabet size; `None` for `Linear`, where it depends on the data
    /// (largest observed code plus one).
    pub fn fixed_sigma_t(&self) -> Option<u32> {
        match self.mode {
            TimeMode::Linear => None,
            TimeMode::CyclicDay => Some(self.codes_per_day()),
            TimeMode::CyclicWeek => {
                let w = self.interval_seconds();
                Some(((WEEK_SECONDS + w - 1) / w) as u32)
            }
            TimeMode::DayTypes => {
                let table = self.day_types.as_ref().expect("validated at construction");
                Some(table.n_classes() * self.codes_per_day())
            }
        }
    }

    pub fn encode(&self, w: &mut ByteWriter) {
        w.put_u32(self.interval_minutes);
        w.put_u8(self.mode.tag());
        w.put_u64(self.origin);
        match &self.day_types {
            Some(t) => {
                w.put_u64(t.classes.len() as u64);
                w.put_bytes(&t.classes);
            }
            None => w.put_u64(0),
        }
    }

    pub fn decode(r: &mut ByteReader) -> Result<TimeDiscretizer> {
        let interval_minutes = r.get_u32()?;
        let mode = TimeMode::from_tag(r.get_u8()?)?;
        let origin = r.get_u64()?;
        let n = r.get_u64()? as usize;
        let day_types = if n == 0 {
            None
        } else {
            Some(DayTypeTable::new(r.get_bytes(n)?)?)
        };
        TimeDiscretizer::new(interval_minutes, mode, origin, day_types)
    }
}

/// A trip after discretization, in the canonical sorted store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoredTrip {
    pub nodes: Vec<u32>,
    pub codes: Vec<u32>,
}

/// Validated, time-discretized, canonically sorted trips plus the
/// terminator-augmented sequences `S` and `Icode` the indexes consume.
///
/// Symbol mapping inside `s`: the terminator of the i-th sorted trip is
/// the integer `i`, the single trailing terminator is `0`, and node `k`
/// is `z + k` — terminator order and terminator-below-node order then
/// hold under plain integer comparison.
#[derive(Clone, Debug)]
pub struct TripStore {
    pub trips: Vec<StoredTrip>,
    pub sigma_s: u32,
    pub sigma_t: u32,
    /// Mapped symbol sequence of length `n`.
    pub s: Vec<u32>,
    /// Time codes aligned to `s`; each terminator carries its trip's first
    /// code, the trailing terminator carries 0.
    pub icode: Vec<u32>,
    pub z: u64,
    pub n: u64,
    pub discretizer: TimeDiscretizer,
}

/// The §-ordering of trips: first node, last node, first time code, then
/// the remaining node sequence; input order breaks full ties.
fn trip_cmp(a: &StoredTrip, b: &StoredTrip) -> Ordering {
    a.nodes[0]
        .cmp(&b.nodes[0])
        .then_with(|| a.nodes.last().cmp(&b.nodes.last()))
        .then_with(|| a.codes[0].cmp(&b.codes[0]))
        .then_with(|| a.nodes[1..].cmp(&b.nodes[1..]))
}

/// Discretize without sorting; shared by the store builder and the oracle.
pub fn discretize_trips(trips: &[RawTrip], d: &TimeDiscretizer) -> Result<Vec<StoredTrip>> {
    trips
        .iter()
        .map(|t| {
            Ok(StoredTrip {
                nodes: t.nodes.clone(),
                codes: d.discretize(t)?,
            })
        })
        .collect()
}

impl TripStore {
    pub fn build(
        trips: &[RawTrip],
        d: &TimeDiscretizer,
        sigma_s_override: Option<u32>,
    ) -> Result<TripStore> {
        if trips.is_empty() {
            return Err(CtrError::EmptyDataset);
        }
        for (i, t) in trips.iter().enumerate() {
            t.validate(i + 1)?;
        }
        let mut stored = discretize_trips(trips, d)?;

        let max_node = stored
            .iter()
            .flat_map(|t| t.nodes.iter())
            .copied()
            .max()
            .unwrap();
        let sigma_s = match sigma_s_override {
            Some(s) => {
                if max_node > s {
                    return Err(CtrError::NodeOutOfRange {
                        node: max_node as u64,
                        sigma_s: s as u64,
                    });
                }
                s
            }
            None => max_node,
        };

        let max_code = stored
            .iter()
            .flat_map(|t| t.codes.iter())
            .copied()
            .max()
            .unwrap();
        let sigma_t = match d.fixed_sigma_t() {
            Some(s) => {
                debug_assert!(max_code < s);
                s
            }
            None => max_code + 1,
        };

        stored.sort_by(trip_cmp); // stable: ties keep input order

        let z = stored.len() as u64;
        let total_len: usize = stored.iter().map(|t| t.nodes.len()).sum();
        let n = z + 1 + total_len as u64;
        let mut s = Vec::with_capacity(n as usize);
        let mut icode = Vec::with_capacity(n as usize);
        for (i, trip) in stored.iter().enumerate() {
            for (&node, &code) in trip.nodes.iter().zip(&trip.codes) {
                s.push(z as u32 + node);
                icode.push(code);
            }
            s.push(i as u32 + 1);
            icode.push(trip.codes[0]);
        }
        s.push(0);
        icode.push(0);

        Ok(TripStore {
            trips: stored,
            sigma_s,
            sigma_t,
            s,
            icode,
            z,
            n,
            discretizer: d.clone(),
        })
    }

    /// Node id of a mapped symbol, or `None` for terminators.
    pub fn node_of_symbol(&self, sym: u32) -> Option<u32> {
        (sym as u64 > self.z).then(|| sym - self.z as u32)
    }

    pub fn mean_trip_len(&self) -> f64 {
        (self.n - (self.z + 1)) as f64 / self.z as f64
    }
}

#[cfg(test)]
pub mod fixtures {
    use super::*;

    /// The six worked-example trips with timestamps in seconds since
    /// 08:00, so a 5-minute linear discretization yields codes 0..16.
    pub fn example1_trips() -> Vec<RawTrip> {
        let mk = |nodes: &[u32], codes: &[u64]| RawTrip {
            nodes: nodes.to_vec(),
            timestamps: codes.iter().map(|&c| c * 300).collect(),
        };
        vec![
            mk(&[1, 2, 3], &[5, 7, 8]),
            mk(&[2, 3, 10, 6], &[10, 13, 14, 15]),
            mk(&[1, 2, 3], &[0, 3, 5]),
            mk(&[2, 3, 10, 4, 7], &[2, 4, 6, 8, 10]),
            mk(&[3, 10, 5], &[9, 11, 12]),
            mk(&[9, 8, 7], &[12, 14, 15]),
        ]
    }

    pub fn example1_store() -> TripStore {
        TripStore::build(&example1_trips(), &TimeDiscretizer::linear(5), None).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn parse_basic_line() {
        let trips = parse_trips("1:28800 2:29250 3:29300\n".as_bytes()).unwrap();
        assert_eq!(trips.len(), 1);
        assert_eq!(trips[0].nodes, vec![1, 2, 3]);
        assert_eq!(trips[0].timestamps, vec![28800, 29250, 29300]);
    }

    #[test]
    fn parse_skips_comments_and_blank_lines() {
        let input = "# header\n\n1:5 2:9\n  \n# more\n4:0 5:1 6:2\n";
        let trips = parse_trips(input.as_bytes()).unwrap();
        assert_eq!(trips.len(), 2);
    }

    #[test]
    fn parse_rejects_bad_tokens() {
        assert!(matches!(
            parse_trips("1:2 oops\n".as_bytes()),
            Err(CtrError::MalformedLine { line: 1, .. })
        ));
        assert!(matches!(
            parse_trips("0:2 1:3\n".as_bytes()),
            Err(CtrError::MalformedLine { .. })
        ));
    }

    #[test]
    fn parse_rejects_non_monotone_timestamps() {
        assert!(matches!(
            parse_trips("5:100 4:90\n".as_bytes()),
            Err(CtrError::NonMonotoneTimestamps { line: 1 })
        ));
    }

    #[test]
    fn parse_rejects_short_trips() {
        assert!(matches!(
            parse_trips("5:100\n".as_bytes()),
            Err(CtrError::TripTooShort { line: 1 })
        ));
    }

    #[test]
    fn example1_discretization() {
        let d = TimeDiscretizer::linear(5);
        // [08:00, 08:05) -> 0 with the fixture's 08:00-based clock
        assert_eq!(d.code(0).unwrap(), 0);
        assert_eq!(d.code(299).unwrap(), 0);
        assert_eq!(d.code(300).unwrap(), 1);
        // [09:15, 09:20) -> 15
        assert_eq!(d.code(15 * 300 + 123).unwrap(), 15);
    }

    #[test]
    fn linear_origin_shifts_codes() {
        let d = TimeDiscretizer::new(5, TimeMode::Linear, 28_800, None).unwrap();
        assert_eq!(d.code(28_800).unwrap(), 0);
        assert_eq!(d.code(28_799 + 301).unwrap(), 1);
        assert!(matches!(
            d.code(3),
            Err(CtrError::TimestampOutOfRange { timestamp: 3 })
        ));
    }

    #[test]
    fn eight_day_types_give_2304_codes() {
        let d = TimeDiscretizer::new(
            5,
            TimeMode::DayTypes,
            0,
            Some(DayTypeTable::eight_classes()),
        )
        .unwrap();
        assert_eq!(d.fixed_sigma_t(), Some(2304));
    }

    #[test]
    fn example1_store_shape() {
        let store = example1_store();
        assert_eq!(store.z, 6);
        assert_eq!(store.n, 28, "21 nodes + 6 terminators + 1 trailing");
        assert_eq!(store.sigma_s, 10);
        assert_eq!(store.sigma_t, 16);
        // Sorted order from the worked example, with the two (1,2,3) trips
        // ordered by starting codes 0 then 5.
        let nodes: Vec<&[u32]> = store.trips.iter().map(|t| t.nodes.as_slice()).collect();
        assert_eq!(
            nodes,
            vec![
                &[1, 2, 3][..],
                &[1, 2, 3],
                &[2, 3, 10, 6],
                &[2, 3, 10, 4, 7],
                &[3, 10, 5],
                &[9, 8, 7],
            ]
        );
        assert_eq!(store.trips[0].codes[0], 0);
        assert_eq!(store.trips[1].codes[0], 5);
        // Terminator Icode entries carry the trip's first code.
        assert_eq!(store.icode[3], 0); // after trip (1,2,3)/(0,3,5)
        assert_eq!(store.icode[7], 5);
        assert_eq!(store.icode[27], 0); // trailing terminator
    }

    #[test]
    fn smallest_valid_store() {
        let trips = vec![RawTrip::new(vec![7, 8], vec![900, 1200]).unwrap()];
        let store = TripStore::build(&trips, &TimeDiscretizer::linear(5), None).unwrap();
        assert_eq!(store.n, 4);
        assert_eq!(store.icode, vec![3, 4, 3, 0]);
        assert_eq!(store.s, vec![1 + 7, 1 + 8, 1, 0]);
    }

    #[test]
    fn empty_dataset_rejected() {
        assert!(matches!(
            TripStore::build(&[], &TimeDiscretizer::linear(5), None),
            Err(CtrError::EmptyDataset)
        ));
    }

    #[test]
    fn store_length_invariant() {
        let store = example1_store();
        let total: usize = store.trips.iter().map(|t| t.nodes.len()).sum();
        assert_eq!(store.n, store.z + 1 + total as u64);
        // Subsequences of s between terminators equal the sorted trips.
        let mut pos = 0usize;
        for (i, trip) in store.trips.iter().enumerate() {
            for &node in &trip.nodes {
                assert_eq!(store.s[pos], store.z as u32 + node);
                pos += 1;
            }
            assert_eq!(store.s[pos], i as u32 + 1);
            pos += 1;
        }
        assert_eq!(store.s[pos], 0);
    }

    #[test]
    fn rebuild_is_idempotent() {
        let store = example1_store();
        // Feed the sorted trips back through build: same s, same icode.
        let raw: Vec<RawTrip> = store
            .trips
            .iter()
            .map(|t| RawTrip {
                nodes: t.nodes.clone(),
                timestamps: t.codes.iter().map(|&c| c as u64 * 300).collect(),
            })
            .collect();
        let again = TripStore::build(&raw, &TimeDiscretizer::linear(5), None).unwrap();
        assert_eq!(store.s, again.s);
        assert_eq!(store.icode, again.icode);
    }

    #[test]
    fn sort_is_total_with_stable_ties() {
        // Identical trips keep input order and are both preserved.
        let t = RawTrip::new(vec![1, 2], vec![0, 60]).unwrap();
        let store = TripStore::build(&[t.clone(), t], &TimeDiscretizer::linear(5), None).unwrap();
        assert_eq!(store.z, 2);
        assert_eq!(store.trips[0], store.trips[1]);
    }

    #[test]
    fn sigma_s_override_validates() {
        let trips = vec![RawTrip::new(vec![3, 9], vec![0, 1]).unwrap()];
        let d = TimeDiscretizer::linear(5);
        assert!(TripStore::build(&trips, &d, Some(9)).is_ok());
        assert!(matches!(
            TripStore::build(&trips, &d, Some(8)),
            Err(CtrError::NodeOutOfRange { node: 9, sigma_s: 8 })
        ));
    }
}
