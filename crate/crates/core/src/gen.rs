//! Synthetic dataset generator: trips over a line-based network (random
//! walks along lines with probabilistic line switches) and start times
//! drawn from uniform or rush-hour-skewed daily distributions.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CtrError, Result};
use crate::trip::RawTrip;

/// A transportation network given as node-id sequences (lines); nodes on
/// more than one line are the switching nodes.
#[derive(Clone, Debug)]
pub struct NetworkModel {
    pub lines: Vec<Vec<u32>>,
    /// Probability of taking the 1st/2nd/3rd/4th line switch of a trip.
    pub switch_probs: [f64; 4],
    pub sigma_s: u32,
    /// node id -> (line, position) memberships
    memberships: Vec<Vec<(u32, u32)>>,
}

pub const DEFAULT_SWITCH_PROBS: [f64; 4] = [0.5, 0.1, 0.05, 0.02];

impl NetworkModel {
    pub fn new(lines: Vec<Vec<u32>>, switch_probs: [f64; 4]) -> Result<NetworkModel> {
        if lines.is_empty() {
            return Err(CtrError::ModelInvalid("no lines".into()));
        }
        let mut sigma_s = 0u32;
        for (i, line) in lines.iter().enumerate() {
            if line.len() < 2 {
                return Err(CtrError::ModelInvalid(format!("line {i} too short")));
            }
            let mut seen = std::collections::HashSet::new();
            for &node in line {
                if node == 0 {
                    return Err(CtrError::ModelInvalid("node id 0".into()));
                }
                if !seen.insert(node) {
                    return Err(CtrError::ModelInvalid(format!(
                        "node {node} repeated within line {i}"
                    )));
                }
                sigma_s = sigma_s.max(node);
            }
        }
        let mut memberships = vec![Vec::new(); sigma_s as usize + 1];
        for (li, line) in lines.iter().enumerate() {
            for (pos, &node) in line.iter().enumerate() {
                memberships[node as usize].push((li as u32, pos as u32));
            }
        }
        Ok(NetworkModel {
            lines,
            switch_probs,
            sigma_s,
            memberships,
        })
    }

    /// The bundled Madrid-like network: 23 lines over 313 nodes.
    pub fn madrid_like() -> NetworkModel {
        Self::parse(include_str!("../assets/madrid_like.lines"))
            .expect("bundled model parses")
    }

    /// Config format: `#` comments, an optional `switch-probs p1 p2 p3 p4`
    /// line, and one space-separated node-id sequence per line.
    pub fn parse(text: &str) -> Result<NetworkModel> {
        let mut lines = Vec::new();
        let mut probs = DEFAULT_SWITCH_PROBS;
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("switch-probs") {
                let vals: Vec<f64> = rest
                    .split_ascii_whitespace()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| CtrError::ModelInvalid(format!("bad probability `{t}`")))
                    })
                    .collect::<Result<_>>()?;
                if vals.len() != 4 || vals.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return Err(CtrError::ModelInvalid("switch-probs needs 4 probabilities".into()));
                }
                probs = [vals[0], vals[1], vals[2], vals[3]];
                continue;
            }
            let nodes: Vec<u32> = line
                .split_ascii_whitespace()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| CtrError::ModelInvalid(format!("bad node id `{t}`")))
                })
                .collect::<Result<_>>()?;
            lines.push(nodes);
        }
        NetworkModel::new(lines, probs)
    }

    pub fn format(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "switch-probs {} {} {} {}\n",
            self.switch_probs[0], self.switch_probs[1], self.switch_probs[2], self.switch_probs[3]
        ));
        for line in &self.lines {
            let toks: Vec<String> = line.iter().map(|n| n.to_string()).collect();
            out.push_str(&toks.join(" "));
            out.push('\n');
        }
        out
    }

    fn is_switching(&self, node: u32) -> bool {
        self.memberships[node as usize].len() > 1
    }
}

/// Trip lengths follow 2 + Binomial(29, p) with p chosen so the mean target
/// length is 11.81 nodes, truncated early only at dead ends.
pub const LENGTH_BINOMIAL_N: u32 = 29;
pub const LENGTH_BINOMIAL_P: f64 = (11.81 - 2.0) / 29.0;

fn sample_target_len(rng: &mut ChaCha8Rng) -> usize {
    let mut len = 2usize;
    for _ in 0..LENGTH_BINOMIAL_N {
        if rng.gen_bool(LENGTH_BINOMIAL_P) {
            len += 1;
        }
    }
    len
}

/// Generate `count` node walks over the model: follow the current line,
/// maybe switch at switching nodes (at most four switches, probabilities
/// per switch ordinal), never revisit a node, stop at the target length or
/// at a dead end.
pub fn generate_trips(model: &NetworkModel, count: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trips = Vec::with_capacity(count);
    while trips.len() < count {
        let target = sample_target_len(&mut rng);
        let mut nodes = Vec::with_capacity(target);
        let line_idx = rng.gen_range(0..model.lines.len());
        let line = &model.lines[line_idx];
        let pos = rng.gen_range(0..line.len());
        let dir: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut cur = (line_idx as u32, pos as u32, dir);
        let mut switches = 0usize;
        nodes.push(line[pos]);
        while nodes.len() < target {
            let node = *nodes.last().unwrap();
            // Switch decision happens on arrival at a switching node.
            if switches < 4 && model.is_switching(node) && rng.gen_bool(model.switch_probs[switches])
            {
                let mut candidates = Vec::new();
                for &(li, pi) in &model.memberships[node as usize] {
                    if li == cur.0 {
                        continue;
                    }
                    for d in [-1i64, 1] {
                        let next = pi as i64 + d;
                        if next >= 0 && (next as usize) < model.lines[li as usize].len() {
                            let next_node = model.lines[li as usize][next as usize];
                            if !nodes.contains(&next_node) {
                                candidates.push((li, pi, d));
                            }
                        }
                    }
                }
                if !candidates.is_empty() {
                    let pick = candidates[rng.gen_range(0..candidates.len())];
                    cur = (pick.0, pick.1, pick.2);
                    switches += 1;
                }
            }
            let next = cur.1 as i64 + cur.2;
            let line = &model.lines[cur.0 as usize];
            if next < 0 || next as usize >= line.len() {
                break; // dead end: line terminus
            }
            let next_node = line[next as usize];
            if nodes.contains(&next_node) {
                break; // dead end: revisit avoided
            }
            nodes.push(next_node);
            cur.1 = next as u32;
        }
        if nodes.len() >= 2 {
            trips.push(nodes);
        }
    }
    trips
}

/// Start-time distribution over a day.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TimeDistKind {
    Uniform,
    Skewed,
    VerySkewed,
}

impl std::str::FromStr for TimeDistKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(TimeDistKind::Uniform),
            "skewed" => Ok(TimeDistKind::Skewed),
            "very-skewed" => Ok(TimeDistKind::VerySkewed),
            _ => Err(format!("unknown time distribution `{s}`")),
        }
    }
}

/// Rush-hour windows in seconds into the day. The paper names the rush
/// classes but not the clock windows; these are configuration defaults.
pub const MORNING_WINDOW: (u64, u64) = (7 * 3600, 9 * 3600 + 1800); // 07:00-09:30
pub const LUNCH_WINDOW: (u64, u64) = (13 * 3600, 14 * 3600 + 1800); // 13:00-14:30
pub const EVENING_WINDOW: (u64, u64) = (17 * 3600 + 1800, 20 * 3600); // 17:30-20:00

#[derive(Clone, Debug)]
pub struct TimeDistribution {
    pub kind: TimeDistKind,
    /// (morning, evening, lunch) probabilities; the remainder starts at a
    /// uniformly random second of the day.
    pub class_probs: (f64, f64, f64),
}

impl TimeDistribution {
    pub fn preset(kind: TimeDistKind) -> TimeDistribution {
        let class_probs = match kind {
            TimeDistKind::Uniform => (0.0, 0.0, 0.0),
            TimeDistKind::Skewed => (0.30, 0.45, 0.05),
            TimeDistKind::VerySkewed => (0.40, 0.50, 0.08),
        };
        TimeDistribution { kind, class_probs }
    }
}

/// Timestamp generation settings: trips are spread uniformly over
/// `n_days` calendar days, successive nodes are reached after bounded
/// strictly-positive increments.
#[derive(Clone, Debug)]
pub struct TimeGenConfig {
    pub dist: TimeDistribution,
    pub n_days: u64,
    pub hop_seconds: (u64, u64),
}

impl TimeGenConfig {
    pub fn new(kind: TimeDistKind, n_days: u64) -> TimeGenConfig {
        TimeGenConfig {
            dist: TimeDistribution::preset(kind),
            n_days,
            hop_seconds: (60, 300),
        }
    }
}

/// Attach timestamps to node walks, yielding complete trips.
pub fn generate_times(trips: &[Vec<u32>], cfg: &TimeGenConfig, seed: u64) -> Vec<RawTrip> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, e, l) = cfg.dist.class_probs;
    trips
        .iter()
        .map(|nodes| {
            let day = rng.gen_range(0..cfg.n_days.max(1));
            let roll: f64 = rng.gen();
            let window = if roll < m {
                MORNING_WINDOW
            } else if roll < m + e {
                EVENING_WINDOW
            } else if roll < m + e + l {
                LUNCH_WINDOW
            } else {
                (0, 86_400)
            };
            let start = day * 86_400 + rng.gen_range(window.0..window.1);
            let mut t = start;
            let timestamps: Vec<u64> = nodes
                .iter()
                .enumerate()
                .map(|(i, _)| {
                    if i > 0 {
                        t += rng.gen_range(cfg.hop_seconds.0..cfg.hop_seconds.1);
                    }
                    t
                })
                .collect();
            RawTrip {
                nodes: nodes.clone(),
                timestamps,
            }
        })
        .collect()
}

/// One-call dataset: Madrid-like walks with the requested time profile.
pub fn generate_dataset(
    model: &NetworkModel,
    count: usize,
    kind: TimeDistKind,
    n_days: u64,
    seed: u64,
) -> Vec<RawTrip> {
    let walks = generate_trips(model, count, seed);
    generate_times(&walks, &TimeGenConfig::new(kind, n_days), seed ^ 0x9e37_79b9_7f4a_7c15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_parses_and_covers_nodes() {
        let model = NetworkModel::madrid_like();
        assert_eq!(model.lines.len(), 23);
        assert_eq!(model.sigma_s, 313);
        let mut seen = vec![false; 314];
        for line in &model.lines {
            for &n in line {
                seen[n as usize] = true;
            }
        }
        assert!((1..=313).all(|n| seen[n]), "all 313 nodes reachable");
        assert_eq!(model.switch_probs, DEFAULT_SWITCH_PROBS);
    }

    #[test]
    fn model_roundtrips_through_config_format() {
        let model = NetworkModel::madrid_like();
        let text = model.format();
        let back = NetworkModel::parse(&text).unwrap();
        assert_eq!(model.lines, back.lines);
        assert_eq!(model.switch_probs, back.switch_probs);
    }

    #[test]
    fn model_validation() {
        assert!(NetworkModel::new(vec![], DEFAULT_SWITCH_PROBS).is_err());
        assert!(NetworkModel::new(vec![vec![1]], DEFAULT_SWITCH_PROBS).is_err());
        assert!(NetworkModel::new(vec![vec![1, 2, 1]], DEFAULT_SWITCH_PROBS).is_err());
        assert!(NetworkModel::parse("switch-probs 1 2\n1 2\n").is_err());
    }

    #[test]
    fn trip_lengths_in_range_and_mean_near_paper() {
        let model = NetworkModel::madrid_like();
        let trips = generate_trips(&model, 10_000, 42);
        assert_eq!(trips.len(), 10_000);
        let mut total = 0usize;
        for t in &trips {
            assert!(t.len() >= 2 && t.len() <= 31, "length {}", t.len());
            let mut seen = std::collections::HashSet::new();
            assert!(t.iter().all(|&n| seen.insert(n)), "revisit in {t:?}");
        }
        for t in &trips {
            total += t.len();
        }
        let mean = total as f64 / trips.len() as f64;
        assert!(
            (mean - 11.81).abs() <= 1.0,
            "mean trip length {mean} too far from 11.81"
        );
    }

    #[test]
    fn walks_follow_lines_between_switches() {
        // With switching off, every trip is a contiguous segment of one line.
        let model =
            NetworkModel::new(vec![(1..=40).collect(), (40..=80).collect()], [0.0; 4]).unwrap();
        let trips = generate_trips(&model, 200, 7);
        for t in &trips {
            let on_one_line = model.lines.iter().any(|line| {
                line.windows(t.len())
                    .any(|w| w == t.as_slice() || w.iter().rev().eq(t.iter()))
            });
            assert!(on_one_line, "trip {t:?} is not a contiguous line segment");
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let model = NetworkModel::madrid_like();
        let a = generate_dataset(&model, 500, TimeDistKind::Skewed, 28, 9);
        let b = generate_dataset(&model, 500, TimeDistKind::Skewed, 28, 9);
        assert_eq!(a, b);
        let c = generate_dataset(&model, 500, TimeDistKind::Skewed, 28, 10);
        assert_ne!(a, c);
    }

    #[test]
    fn very_skewed_times_concentrate_in_rush_windows() {
        let model = NetworkModel::madrid_like();
        let walks = generate_trips(&model, 5_000, 3);
        let trips = generate_times(&walks, &TimeGenConfig::new(TimeDistKind::VerySkewed, 1), 4);
        let in_rush = trips
            .iter()
            .filter(|t| {
                let s = t.timestamps[0] % 86_400;
                let inside = |w: (u64, u64)| w.0 <= s && s < w.1;
                inside(MORNING_WINDOW) || inside(LUNCH_WINDOW) || inside(EVENING_WINDOW)
            })
            .count();
        let frac = in_rush as f64 / trips.len() as f64;
        assert!(frac >= 0.90, "rush fraction {frac}");
    }

    #[test]
    fn uniform_times_are_flat_by_chi_square() {
        let model = NetworkModel::madrid_like();
        let walks = generate_trips(&model, 20_000, 5);
        let trips = generate_times(&walks, &TimeGenConfig::new(TimeDistKind::Uniform, 1), 6);
        // Histogram of start codes over 288 five-minute bins.
        let bins = 288usize;
        let mut hist = vec![0u64; bins];
        for t in &trips {
            hist[((t.timestamps[0] % 86_400) / 300) as usize] += 1;
        }
        let mean = trips.len() as f64 / bins as f64;
        let chi2: f64 = hist
            .iter()
            .map(|&c| {
                let d = c as f64 - mean;
                d * d / mean
            })
            .sum();
        // chi-square with k-1 df: mean k-1, sd sqrt(2(k-1)); allow 3 sigma.
        let df = (bins - 1) as f64;
        assert!(
            chi2 < df + 3.0 * (2.0 * df).sqrt(),
            "chi2 {chi2} too large for df {df}"
        );
        // non-uniform distributions fail the same statistic
        let skewed = generate_times(&walks, &TimeGenConfig::new(TimeDistKind::Skewed, 1), 6);
        let mut hist = vec![0u64; bins];
        for t in &skewed {
            hist[((t.timestamps[0] % 86_400) / 300) as usize] += 1;
        }
        let chi2_skew: f64 = hist
            .iter()
            .map(|&c| {
                let d = c as f64 - mean;
                d * d / mean
            })
            .sum();
        assert!(chi2_skew > chi2 * 10.0, "skewed should be far from flat");
    }
}
