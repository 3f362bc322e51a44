use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use affine_copies::appendix::{self, parse_schedule, MixedRadixSystem};
use affine_copies::avoider::{self, AvoiderError};
use affine_copies::cantor::{self, BuiltinOracle};
use affine_copies::props;
use affine_copies::sequence::{Preset, SequenceSource};
use affine_copies::slow::{self, SlowSequence};
use affine_copies::{Interval, IntervalSet, Rational};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "affine-copies", version, about = "Exact constructions of sets with and without affine copies of sequences")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Tables {
    /// Gap tables as `k=oracle`, repeatable. Defaults to `0=middle-third`.
    #[arg(long = "table")]
    tables: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the deleted-interval construction.
    CantorBuild {
        #[arg(long, default_value_t = 6)]
        depth: u32,
        #[arg(long, default_value = "middle-third")]
        oracle: BuiltinOracle,
    },
    /// Check the construction's structural invariants.
    CantorVerify {
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        #[arg(long, default_value = "middle-third")]
        oracle: BuiltinOracle,
    },
    /// Uncovered part of the level-N stars under the next kmax left neighbourhoods.
    Cover {
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long = "N", default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
    },
    /// Build the slowly decreasing sequence from gap tables.
    SeqBuild {
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[command(flatten)]
        tables: Tables,
    },
    /// Split a union of translates into its disjoint and overlapping parts.
    SeqDecompose {
        #[arg(long)]
        interval: Interval,
        #[arg(long, default_value = "1")]
        delta: Rational,
        #[arg(long, default_value_t = 1)]
        m0: u64,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[command(flatten)]
        tables: Tables,
        /// Use this sequence instead of the one built from gap tables.
        #[arg(long)]
        beta: Option<String>,
    },
    /// How much of [0,1) the translated gaps leave uncovered.
    Coverage01 {
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long = "N", default_value_t = 6)]
        n: u32,
        /// Defaults to the threshold of the deepest level.
        #[arg(long = "M")]
        m: Option<u64>,
        #[arg(long, default_value = "1")]
        delta: Rational,
        #[arg(long, default_value_t = 1)]
        m0: u64,
        #[command(flatten)]
        tables: Tables,
    },
    /// Build the truncated avoider set and its summability ledger.
    AvoiderBuild {
        #[arg(long, default_value = "harmonic")]
        beta: String,
        #[arg(long, default_value_t = 20)]
        depth: u32,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
    },
    /// Measure of the union of translates of one interval, against its closed form.
    AvoiderMeasure {
        #[arg(long)]
        interval: Interval,
        #[arg(long, default_value = "harmonic")]
        beta: String,
        #[arg(long = "M")]
        m: u64,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
    },
    /// Find t and δ with t + δα_m in the avoider for every m <= M.
    AvoiderEmbed {
        #[arg(long, default_value = "harmonic")]
        beta: String,
        #[arg(long)]
        alpha: String,
        #[arg(long = "M", default_value_t = 100)]
        m: u64,
        #[arg(long, default_value_t = 64)]
        depth: u32,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
        #[arg(long, default_value_t = 40)]
        imax: u32,
    },
    /// Radix schedule and its h-condition certificates.
    AppendixSchedule {
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Nested intervals meeting every shifted digit constraint up to U.
    AppendixIntersect {
        #[arg(long, default_value = "4,14,40,120,360,1080")]
        schedule: String,
        /// Comma-separated offsets α_1, α_2, …
        #[arg(long)]
        alphas: String,
        #[arg(long = "U", default_value_t = 6)]
        u: u64,
    },
    /// Cover count and premeasure bound for K_j at level (2k-1)2^(j-1).
    AppendixPremeasure {
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        j: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Seeded randomized checks of the interval kernel.
    PropSuite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: u32,
    },
}

struct Report {
    body: Value,
    pass: bool,
}

fn report(body: impl serde::Serialize, pass: bool) -> Result<Report> {
    Ok(Report { body: serde_json::to_value(body)?, pass })
}

/// A preset name, or a JSON file holding an array of "p/q" strings.
fn sequence_arg(s: &str) -> Result<SequenceSource> {
    if let Ok(p) = s.parse::<Preset>() {
        return Ok(SequenceSource::Preset(p));
    }
    let path = Path::new(s);
    if !path.exists() {
        bail!("{s:?} is neither a sequence preset nor a file");
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {s}"))?;
    let terms: Vec<Rational> = serde_json::from_str(&text).with_context(|| format!("parsing {s}"))?;
    Ok(SequenceSource::Table(terms))
}

fn slow_sequence(depth: u32, tables: &Tables) -> Result<SlowSequence> {
    let specs = if tables.tables.is_empty() { vec!["0=middle-third".to_string()] } else { tables.tables.clone() };
    let mut gap_tables = BTreeMap::new();
    for spec in &specs {
        let (k, oracle) = spec.split_once('=').ok_or_else(|| anyhow!("table {spec:?} is not k=oracle"))?;
        let k: i64 = k.trim().parse().with_context(|| format!("table index in {spec:?}"))?;
        let oracle: BuiltinOracle = oracle.parse().map_err(|e: String| anyhow!(e))?;
        let c = cantor::build_cantor(&oracle, depth)?;
        gap_tables.insert(k, slow::gap_table(&c));
    }
    Ok(slow::build_mu(&gap_tables, depth)?)
}

fn schedule(spec: Option<&str>, depth: usize) -> Result<MixedRadixSystem> {
    Ok(match spec {
        Some(s) => parse_schedule(s)?,
        None => appendix::default_schedule(depth)?,
    })
}

fn run(command: Command) -> Result<Report> {
    match command {
        Command::CantorBuild { depth, oracle } => report(cantor::build_cantor(&oracle, depth)?, true),
        Command::CantorVerify { depth, kmax, oracle } => {
            let c = cantor::build_cantor(&oracle, depth)?;
            let mut r = cantor::verify_cantor(&c, kmax);
            let missed = cantor::check_avoidance(&c, &oracle);
            r.pass &= missed.is_empty();
            r.violations.extend(missed);
            let pass = r.pass;
            report(json!({ "oracle": oracle.to_string(), "report": r }), pass)
        }
        Command::Cover { depth, n, kmax } => {
            let c = cantor::build_cantor(&cantor::MiddleThird, depth)?;
            let r = cantor::truncated_union_cover(&c, n, kmax)?;
            let pass = r.pass;
            report(r, pass)
        }
        Command::SeqBuild { depth, tables } => report(slow_sequence(depth, &tables)?, true),
        Command::SeqDecompose { interval, delta, m0, horizon, depth, tables, beta } => {
            let source;
            let slow_seq;
            let seq: &dyn affine_copies::sequence::Sequence = match &beta {
                Some(b) => {
                    source = sequence_arg(b)?;
                    &source
                }
                None => {
                    slow_seq = slow_sequence(depth, &tables)?;
                    &slow_seq
                }
            };
            let d = slow::decompose_translates(&interval, &seq, &delta, m0, horizon)?;
            let brute: IntervalSet = (m0..=horizon)
                .map(|m| seq.term(m).map(|a| interval.translate(&-(&delta * a))))
                .collect::<Result<_, _>>()?;
            let pass = brute == d.truncated_union();
            report(json!({ "decomposition": d, "brute_force_matches": pass, "pass": pass }), pass)
        }
        Command::Coverage01 { depth, n, m, delta, m0, tables } => {
            let c = cantor::build_cantor(&cantor::MiddleThird, depth)?;
            let s = slow_sequence(depth, &tables)?;
            let m = match m {
                Some(m) => m,
                None => slow::threshold_for(&s, &delta, m0, c.gap_length(depth))?,
            };
            let r = slow::coverage01(&c, &s, &delta, m0, n, m)?;
            let pass = r.pass;
            report(r, pass)
        }
        Command::AvoiderBuild { beta, depth, horizon } => {
            let t = avoider::thresholdize(sequence_arg(&beta)?, horizon)?;
            let a = avoider::build_avoider(&t, depth)?;
            let ledger = avoider::summability_report(&t, depth)?;
            let pass = ledger.pass;
            report(
                json!({ "depth": a.depth, "holes": a.holes, "avoider": a.avoider, "summability": ledger }),
                pass,
            )
        }
        Command::AvoiderMeasure { interval, beta, m, horizon } => {
            let t = avoider::thresholdize(sequence_arg(&beta)?, horizon)?;
            let r = avoider::measure_union_translates(&interval, &t, m)?;
            let pass = r.identity_holds;
            report(r, pass)
        }
        Command::AvoiderEmbed { beta, alpha, m, depth, horizon, imax } => {
            let t = avoider::thresholdize(sequence_arg(&beta)?, horizon)?;
            let alpha = sequence_arg(&alpha)?.prefix(m)?;
            let a = avoider::build_avoider(&t, depth)?;
            match avoider::find_embedding(&a, &alpha, &t, imax) {
                Ok(cert) => report(cert, true),
                Err(AvoiderError::NoEmbedding { i_max, trace }) => {
                    report(json!({ "pass": false, "i_max": i_max, "trace": trace }), false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::AppendixSchedule { schedule: spec, depth } => report(schedule(spec.as_deref(), depth)?, true),
        Command::AppendixIntersect { schedule: spec, alphas, u } => {
            let sys = parse_schedule(&spec)?;
            let alphas = alphas
                .split(',')
                .map(|a| a.trim().parse::<Rational>().map_err(|e| anyhow!(e)))
                .collect::<Result<Vec<_>>>()?;
            report(appendix::nested_intersect(&alphas, &sys, u)?, true)
        }
        Command::AppendixPremeasure { schedule: spec, depth, j, k } => {
            let r = appendix::premeasure_bound(&schedule(spec.as_deref(), depth)?, j, k)?;
            let pass = r.meets_target;
            report(r, pass)
        }
        Command::PropSuite { seed, cases } => {
            let r = props::run_suite(seed, cases);
            let pass = r.pass;
            report(r, pass)
        }
    }
}

/// Writes next to the target and renames, so readers never see a partial file.
fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut text = serde_json::to_string_pretty(&r.body).expect("reports serialize");
    text.push('\n');
    match &cli.out {
        Some(path) => {
            if let Err(e) = write_atomically(path, text.as_bytes()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if r.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("assertion failed; see report");
        ExitCode::from(1)
    }
}
