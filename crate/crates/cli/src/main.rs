//! `ctr`: build, query, generate, benchmark, and verify compact trip
//! indexes from the command line.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use ctr_core::bench::{full_grid, run_bench, BenchConfig, QuerySpec};
use ctr_core::bits::BvFlavor;
use ctr_core::gen::{generate_dataset, NetworkModel, TimeDistKind};
use ctr_core::oracle::OracleStore;
use ctr_core::protocol::parse_query;
use ctr_core::query::{BuildConfig, CtrIndex};
use ctr_core::trip::{format_trips, parse_trips, DayTypeTable, TimeDiscretizer, TimeMode};
use ctr_core::wavelet::TimeStruct;
use ctr_core::CtrError;

#[derive(Parser)]
#[command(name = "ctr", version, about = "Compact trip representation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TimeArgs {
    /// Discretization interval in minutes
    #[arg(long, default_value_t = 5)]
    interval: u32,
    /// Time encoding: linear | cyclic-day | cyclic-week | day-types
    #[arg(long, default_value = "linear")]
    mode: TimeMode,
    /// Epoch-seconds origin for linear mode
    #[arg(long, default_value_t = 0)]
    origin: u64,
    /// Day-type table file (comma-separated day classes); defaults to the
    /// bundled eight-class calendar when mode is day-types
    #[arg(long)]
    day_types: Option<PathBuf>,
    /// Key-value config file (interval_minutes, mode, origin,
    /// day_type_table); flags override file entries
    #[arg(long)]
    time_config: Option<PathBuf>,
}

impl TimeArgs {
    fn discretizer(&self, matches_cli: &clap::ArgMatches) -> anyhow::Result<TimeDiscretizer> {
        let mut interval = self.interval;
        let mut mode = self.mode;
        let mut origin = self.origin;
        let mut table_path = self.day_types.clone();
        if let Some(path) = &self.time_config {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            for (no, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    bail!("{}:{}: expected key=value", path.display(), no + 1);
                };
                let (key, value) = (key.trim(), value.trim());
                let overridden = |id: &str| {
                    matches_cli.value_source(id)
                        == Some(clap::parser::ValueSource::CommandLine)
                };
                match key {
                    "interval_minutes" if !overridden("interval") => interval = value.parse()?,
                    "mode" if !overridden("mode") => {
                        mode = value.parse().map_err(anyhow::Error::msg)?
                    }
                    "origin" if !overridden("origin") => origin = value.parse()?,
                    "day_type_table" if table_path.is_none() => {
                        table_path = Some(PathBuf::from(value))
                    }
                    "interval_minutes" | "mode" | "origin" | "day_type_table" => {}
                    other => bail!("{}: unknown key `{other}`", path.display()),
                }
            }
        }
        let table = match &table_path {
            Some(p) => Some(DayTypeTable::parse(&fs::read_to_string(p)?)?),
            None if mode == TimeMode::DayTypes => Some(DayTypeTable::eight_classes()),
            None => None,
        };
        Ok(TimeDiscretizer::new(interval, mode, origin, table)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build an index file from a trip file
    Build {
        /// Trip file: one trip per line of node:timestamp pairs
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        time: TimeArgs,
        /// Psi sampling interval
        #[arg(long = "psi-sample", default_value_t = 32, value_parser = parse_t_psi)]
        t_psi: u32,
        /// Temporal structure: wtht | wm
        #[arg(long = "time-struct", default_value = "wtht")]
        time_struct: TimeStruct,
        /// Bitvector flavor: plain | rrr32 | rrr64 | rrr128
        #[arg(long, default_value = "plain")]
        bitvector: BvFlavor,
        /// Treat node ids up to this value as legal even if unseen
        #[arg(long)]
        sigma_s: Option<u32>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run protocol queries against an index file
    Query {
        #[arg(long)]
        index: PathBuf,
        /// Query file; stdin when omitted
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Generate a synthetic Madrid-like trip file
    Generate {
        /// Number of trips
        #[arg(long)]
        trips: usize,
        /// RNG seed (falls back to $CTR_SEED, then 0)
        #[arg(long)]
        seed: Option<u64>,
        /// Start-time profile: uniform | skewed | very-skewed
        #[arg(long = "time-dist", default_value = "skewed")]
        time_dist: TimeDistKind,
        /// Calendar days to spread trips over
        #[arg(long, default_value_t = 28)]
        days: u64,
        /// Network model config; bundled 23-line network when omitted
        #[arg(long)]
        model: Option<PathBuf>,
        /// Write the network model in use to this path and exit
        #[arg(long = "write-model")]
        write_model: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build the configuration grid over a trip file and emit a CSV report
    Bench {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        time: TimeArgs,
        /// Comma-separated interval list overriding --interval
        #[arg(long)]
        intervals: Option<String>,
        /// Queries per class
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
        /// Runs per top-k configuration
        #[arg(long = "topk-runs", default_value_t = 100)]
        topk_runs: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Report CSV path; stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cross-check the index against the brute-force oracle
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        time: TimeArgs,
        /// Random queries per class
        #[arg(long, default_value_t = 1000)]
        queries: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "psi-sample", default_value_t = 32, value_parser = parse_t_psi)]
        t_psi: u32,
        #[arg(long = "time-struct", default_value = "wtht")]
        time_struct: TimeStruct,
        #[arg(long, default_value = "plain")]
        bitvector: BvFlavor,
    },
}

fn parse_t_psi(s: &str) -> Result<u32, String> {
    let v: u32 = s.parse().map_err(|_| format!("bad psi sample `{s}`"))?;
    if ![32, 128, 512].contains(&v) {
        return Err("psi sample must be one of 32, 128, 512".into());
    }
    Ok(v)
}

fn env_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("CTR_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn main() -> ExitCode {
    let matches = <Cli as clap::CommandFactory>::command().get_matches();
    let cli = match <Cli as clap::FromArgMatches>::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli, &matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli, matches: &clap::ArgMatches) -> anyhow::Result<()> {
    match cli.command {
        Command::Build {
            input,
            time,
            t_psi,
            time_struct,
            bitvector,
            sigma_s,
            output,
        } => {
            let sub = matches.subcommand_matches("build").unwrap();
            let d = time.discretizer(sub)?;
            let trips = parse_trips(BufReader::new(
                fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?,
            ))?;
            let store = ctr_core::trip::TripStore::build(&trips, &d, sigma_s)?;
            let cfg = BuildConfig {
                t_psi,
                time_struct,
                flavor: bitvector,
            };
            let index = CtrIndex::build(&store, &cfg);
            let bytes = index.save();
            fs::write(&output, &bytes)
                .with_context(|| format!("writing {}", output.display()))?;
            let sp_bits = index.spatial.size_bits();
            let te_bits = index.temporal.size_bits();
            let sp_base = ctr_core::bench::spatial_baseline_bits(index.n(), index.sigma_s());
            let te_base = ctr_core::bench::temporal_baseline_bits(index.n(), index.sigma_t());
            println!("trips (z):        {}", index.z());
            println!("sequence (n):     {}", index.n());
            println!("sigma_s:          {}", index.sigma_s());
            println!("sigma_t:          {}", index.sigma_t());
            println!("t_psi:            {}", t_psi);
            println!("time structure:   {}", time_struct.name());
            println!("bitvectors:       {}", bitvector.name());
            println!(
                "spatial section:  {} bits ({:.1}% of {}-bit baseline)",
                sp_bits,
                100.0 * sp_bits as f64 / sp_base as f64,
                sp_base / index.n()
            );
            println!(
                "temporal section: {} bits ({:.1}% of {}-bit baseline)",
                te_bits,
                100.0 * te_bits as f64 / te_base as f64,
                te_base / index.n()
            );
            println!("index file:       {} bytes", bytes.len());
            Ok(())
        }
        Command::Query { index, file } => {
            let bytes = fs::read(&index)
                .with_context(|| format!("reading {}", index.display()))?;
            let idx = CtrIndex::load(&bytes)?;
            let stdin = std::io::stdin();
            let reader: Box<dyn BufRead> = match &file {
                Some(p) => Box::new(BufReader::new(fs::File::open(p)?)),
                None => Box::new(stdin.lock()),
            };
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for line in reader.lines() {
                let line = line?;
                if line.trim().is_empty() || line.trim_start().starts_with('#') {
                    continue;
                }
                match parse_query(&line).and_then(|q| idx.run_query(&q)) {
                    Ok(answer) => writeln!(out, "{}", answer.format())?,
                    Err(e) => eprintln!("error: {e}"),
                }
            }
            Ok(())
        }
        Command::Generate {
            trips,
            seed,
            time_dist,
            days,
            model,
            write_model,
            output,
        } => {
            let model = match &model {
                Some(p) => NetworkModel::parse(&fs::read_to_string(p)?)?,
                None => NetworkModel::madrid_like(),
            };
            if let Some(path) = write_model {
                fs::write(&path, model.format())?;
                return Ok(());
            }
            let seed = env_seed(seed);
            let dataset = generate_dataset(&model, trips, time_dist, days, seed);
            let text = format_trips(&dataset);
            match output {
                Some(path) => fs::write(&path, text)?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
            Ok(())
        }
        Command::Bench {
            input,
            time,
            intervals,
            queries,
            topk_runs,
            seed,
            output,
        } => {
            let sub = matches.subcommand_matches("bench").unwrap();
            let trips = parse_trips(BufReader::new(fs::File::open(&input)?))?;
            let base = time.clone();
            let interval_list: Vec<u32> = match intervals {
                Some(list) => list
                    .split(',')
                    .map(|t| t.trim().parse::<u32>().map_err(|_| anyhow::anyhow!("bad interval `{t}`")))
                    .collect::<anyhow::Result<_>>()?,
                None => vec![time.interval],
            };
            let mut configs: Vec<BenchConfig> = Vec::new();
            for &iv in &interval_list {
                configs.extend(full_grid(iv));
            }
            let spec = QuerySpec {
                n_queries: queries,
                topk_runs,
                seed: env_seed(seed),
                ..QuerySpec::default()
            };
            let make = |interval: u32| -> ctr_core::error::Result<TimeDiscretizer> {
                let mut args = base.clone();
                args.interval = interval;
                args.discretizer(sub)
                    .map_err(|e| CtrError::ConfigurationUnsupported(e.to_string()))
            };
            let report = run_bench(&trips, &configs, &make, &spec)?;
            let csv = report.to_csv();
            match output {
                Some(path) => fs::write(&path, csv)?,
                None => std::io::stdout().write_all(csv.as_bytes())?,
            }
            Ok(())
        }
        Command::Verify {
            input,
            time,
            queries,
            seed,
            t_psi,
            time_struct,
            bitvector,
        } => {
            let sub = matches.subcommand_matches("verify").unwrap();
            let d = time.discretizer(sub)?;
            let trips = parse_trips(BufReader::new(fs::File::open(&input)?))?;
            let store = ctr_core::trip::TripStore::build(&trips, &d, None)?;
            let index = CtrIndex::build(
                &store,
                &BuildConfig {
                    t_psi,
                    time_struct,
                    flavor: bitvector,
                },
            );
            let oracle = OracleStore::new(&trips, &d)?;
            let seed = env_seed(seed);
            match ctr_core::oracle::cross_check(&index, &oracle, queries, seed) {
                Ok(total) => {
                    println!("verify: {total} queries checked, all match");
                    Ok(())
                }
                Err(msg) => bail!("{msg}"),
            }
        }
    }
}
