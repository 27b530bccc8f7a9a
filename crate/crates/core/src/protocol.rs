//! Query text protocol shared by the CLI, the oracle, and the benchmark
//! harness: one query per line, one result line per query.
//!
//! ```text
//! starts-with-x X [T1 T2]
//! ends-with-x X [T1 T2]
//! from-x-to-y X Y
//! from-x-to-y-strong X Y T1 T2
//! from-x-to-y-weak X Y T1 T2
//! uses-x X [T1 T2]
//! starts-t T1 T2
//! uses-t T1 T2
//! trips-t T1 T2
//! top-k K seq|bin [T1 T2]
//! top-k-starts K seq|bin [T1 T2]
//! ```

use crate::error::{CtrError, Result};
use crate::query::{CtrIndex, TimeWindow, TopKEntry, TopKStrategy, TripsEstimate};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    StartsWithX { x: u32, w: Option<TimeWindow> },
    EndsWithX { x: u32, w: Option<TimeWindow> },
    FromXToY { x: u32, y: u32 },
    FromXToYStrong { x: u32, y: u32, w: TimeWindow },
    FromXToYWeak { x: u32, y: u32, w: TimeWindow },
    UsesX { x: u32, w: Option<TimeWindow> },
    StartsT { w: TimeWindow },
    UsesT { w: TimeWindow },
    TripsT { w: TimeWindow },
    TopK { k: usize, strategy: TopKStrategy, w: Option<TimeWindow> },
    TopKStarts { k: usize, strategy: TopKStrategy, w: Option<TimeWindow> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Answer {
    Count(u64),
    Estimate(TripsEstimate),
    TopK(Vec<TopKEntry>),
}

impl Answer {
    /// One result line. Top-k answers are space-separated `node:count`
    /// pairs; the trips-t estimate prints both documented estimators.
    pub fn format(&self) -> String {
        match self {
            Answer::Count(c) => c.to_string(),
            Answer::Estimate(e) => format!("{} {:.4}", e.starts_based, e.usage_based),
            Answer::TopK(entries) => entries
                .iter()
                .map(|e| format!("{}:{}", e.node, e.count))
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}

fn bad(line: &str, why: &str) -> CtrError {
    CtrError::MalformedQuery(format!("`{line}`: {why}"))
}

fn parse_num<T: std::str::FromStr>(line: &str, tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| bad(line, &format!("missing {what}")))?
        .parse()
        .map_err(|_| bad(line, &format!("bad {what}")))
}

fn parse_window(line: &str, toks: &mut std::str::SplitAsciiWhitespace) -> Result<Option<TimeWindow>> {
    match toks.next() {
        None => Ok(None),
        Some(t1s) => {
            let t1 = t1s.parse().map_err(|_| bad(line, "bad t1"))?;
            let t2 = parse_num(line, toks.next(), "t2")?;
            Ok(Some(TimeWindow::new(t1, t2)))
        }
    }
}

pub fn parse_query(line: &str) -> Result<Query> {
    let mut toks = line.split_ascii_whitespace();
    let op = toks.next().ok_or_else(|| bad(line, "empty query"))?;
    let query = match op {
        "starts-with-x" => Query::StartsWithX {
            x: parse_num(line, toks.next(), "node")?,
            w: parse_window(line, &mut toks)?,
        },
        "ends-with-x" => Query::EndsWithX {
            x: parse_num(line, toks.next(), "node")?,
            w: parse_window(line, &mut toks)?,
        },
        "from-x-to-y" => Query::FromXToY {
            x: parse_num(line, toks.next(), "node x")?,
            y: parse_num(line, toks.next(), "node y")?,
        },
        "from-x-to-y-strong" | "from-x-to-y-weak" => {
            let x = parse_num(line, toks.next(), "node x")?;
            let y = parse_num(line, toks.next(), "node y")?;
            let t1 = parse_num(line, toks.next(), "t1")?;
            let t2 = parse_num(line, toks.next(), "t2")?;
            let w = TimeWindow::new(t1, t2);
            if op == "from-x-to-y-strong" {
                Query::FromXToYStrong { x, y, w }
            } else {
                Query::FromXToYWeak { x, y, w }
            }
        }
        "uses-x" => Query::UsesX {
            x: parse_num(line, toks.next(), "node")?,
            w: parse_window(line, &mut toks)?,
        },
        "starts-t" | "uses-t" | "trips-t" => {
            let t1 = parse_num(line, toks.next(), "t1")?;
            let t2 = parse_num(line, toks.next(), "t2")?;
            let w = TimeWindow::new(t1, t2);
            match op {
                "starts-t" => Query::StartsT { w },
                "uses-t" => Query::UsesT { w },
                _ => Query::TripsT { w },
            }
        }
        "top-k" | "top-k-starts" => {
            let k: usize = parse_num(line, toks.next(), "k")?;
            if k == 0 {
                return Err(bad(line, "k must be at least 1"));
            }
            let strategy: TopKStrategy = toks
                .next()
                .ok_or_else(|| bad(line, "missing strategy"))?
                .parse()
                .map_err(|e: String| bad(line, &e))?;
            let w = parse_window(line, &mut toks)?;
            if op == "top-k" {
                Query::TopK { k, strategy, w }
            } else {
                Query::TopKStarts { k, strategy, w }
            }
        }
        other => return Err(bad(line, &format!("unknown operation `{other}`"))),
    };
    if toks.next().is_some() {
        return Err(bad(line, "trailing tokens"));
    }
    Ok(query)
}

impl CtrIndex {
    pub fn run_query(&self, q: &Query) -> Result<Answer> {
        Ok(match *q {
            Query::StartsWithX { x, w } => Answer::Count(self.starts_with_x(x, w)?),
            Query::EndsWithX { x, w } => Answer::Count(self.ends_with_x(x, w)?),
            Query::FromXToY { x, y } => Answer::Count(self.from_x_to_y(x, y)),
            Query::FromXToYStrong { x, y, w } => Answer::Count(self.from_x_to_y_strong(x, y, w)?),
            Query::FromXToYWeak { x, y, w } => Answer::Count(self.from_x_to_y_weak(x, y, w)?),
            Query::UsesX { x, w } => Answer::Count(self.uses_x(x, w)?),
            Query::StartsT { w } => Answer::Count(self.starts_t(w)?),
            Query::UsesT { w } => Answer::Count(self.uses_t(w)?),
            Query::TripsT { w } => Answer::Estimate(self.trips_t_estimate(w)?),
            Query::TopK { k, strategy, w } => Answer::TopK(self.top_k(k, strategy, w)?),
            Query::TopKStarts { k, strategy, w } => {
                Answer::TopK(self.top_k_starts(k, strategy, w)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_query("uses-x 3").unwrap(),
            Query::UsesX { x: 3, w: None }
        );
        assert_eq!(
            parse_query("from-x-to-y-strong 2 7 2 10").unwrap(),
            Query::FromXToYStrong {
                x: 2,
                y: 7,
                w: TimeWindow::new(2, 10)
            }
        );
        assert_eq!(
            parse_query("top-k 10 bin 0 15").unwrap(),
            Query::TopK {
                k: 10,
                strategy: TopKStrategy::BinaryPartition,
                w: Some(TimeWindow::new(0, 15))
            }
        );
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(parse_query("").is_err());
        assert!(parse_query("uses-x").is_err());
        assert!(parse_query("uses-x x").is_err());
        assert!(parse_query("uses-x 3 4").is_err(), "window needs both ends");
        assert!(parse_query("top-k 0 seq").is_err());
        assert!(parse_query("top-k 5 quux").is_err());
        assert!(parse_query("no-such-query 1").is_err());
        assert!(parse_query("uses-x 3 1 2 9").is_err());
    }

    #[test]
    fn answers_format() {
        assert_eq!(Answer::Count(5).format(), "5");
        assert_eq!(
            Answer::TopK(vec![
                TopKEntry { node: 3, count: 5 },
                TopKEntry { node: 2, count: 4 }
            ])
            .format(),
            "3:5 2:4"
        );
        assert_eq!(
            Answer::Estimate(crate::query::TripsEstimate {
                starts_based: 6,
                usage_based: 6.0
            })
            .format(),
            "6 6.0000"
        );
        assert_eq!(Answer::TopK(vec![]).format(), "");
    }
}
