//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 learning or input error,
//! 3 automata differ (`equiv`).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::algebra::{na, word_to_string, Algebra, AxisKind, Char, Scalar};
use crate::automata::{from_json, to_dot, to_json, Equivalence, SMealy};
use crate::bench::{builtin, random_sma, RandomSpec};
use crate::error::{Error, Result};
use crate::learner::{learn, LearnConfig, LearnStats, NoMonitor, TraceLog};
use crate::oracle::{EquivMode, SimulatedTeacher};
use crate::partition::SweepPartitioner;

pub const STATS_HEADER: &str =
    "name,states,transitions,eq_queries,output_queries,sigmaE,final_R,final_E,max_cex_len,seed,runtime_ms";

#[derive(Parser, Debug)]
#[command(
    name = "smealy",
    version,
    about = "Learn symbolic Mealy automata from a simulated teacher"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn a target automaton and report query statistics.
    Learn(LearnArgs),
    /// Generate a random interval automaton over the naturals.
    Random(RandomArgs),
    /// Check two automaton files for equivalence.
    Equiv { a: PathBuf, b: PathBuf },
    /// Built-in benchmark utilities.
    Bench {
        #[command(subcommand)]
        cmd: BenchCommand,
    },
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// Write a built-in target in the automaton file format.
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleMode {
    Lexmin,
    Random,
}

#[derive(Args, Debug)]
struct LearnArgs {
    #[arg(long, conflicts_with = "bench", required_unless_present = "bench")]
    target: Option<PathBuf>,
    #[arg(long)]
    bench: Option<String>,
    #[arg(long, value_enum, default_value = "lexmin")]
    oracle: OracleMode,
    #[arg(long, required_if_eq("oracle", "random"))]
    seed: Option<u64>,
    /// First character, e.g. `5` or `(0,1.5)`.
    #[arg(long)]
    init: Option<String>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct RandomArgs {
    #[arg(long)]
    states: usize,
    #[arg(long)]
    essential: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    outputs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses a character for `alg`: a scalar, or a parenthesised tuple.
/// Real components accept `na(x)` for the next double above `x`.
pub fn parse_char(alg: &Algebra, text: &str) -> Result<Char> {
    let t = text.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or(t);
    let parts: Vec<&str> = if inner.contains("na(") {
        split_top_level(inner)
    } else {
        inner.split(',').collect()
    };
    let bad = || Error::Parse(format!("cannot read {text} as a character"));
    let c = match alg {
        Algebra::Intervals(axes) => {
            if parts.len() != axes.len() {
                return Err(bad());
            }
            let mut out = Vec::with_capacity(parts.len());
            for (ax, p) in axes.iter().zip(parts) {
                let p = p.trim();
                out.push(match ax.kind {
                    AxisKind::Nat => Scalar::Nat(p.parse().map_err(|_| bad())?),
                    AxisKind::Real => {
                        let x = match p.strip_prefix("na(").and_then(|s| s.strip_suffix(')')) {
                            Some(v) => na(v.trim().parse().map_err(|_| bad())?),
                            None => p.parse().map_err(|_| bad())?,
                        };
                        Scalar::real(x)?
                    }
                });
            }
            Char::new(out)
        }
        Algebra::Equality { .. } => {
            if parts.len() != 1 {
                return Err(bad());
            }
            Char::sym(parts[0].trim().parse().map_err(|_| bad())?)
        }
    };
    alg.check_char(&c)?;
    Ok(c)
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0usize, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn write(p: &Path, text: &str) -> Result<()> {
    fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn stats_row(name: &str, m: &SMealy, s: &LearnStats, seed: Option<u64>) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        csv_field(name),
        m.states(),
        m.transitions().len(),
        s.eq_queries,
        s.output_queries,
        s.sigma_e,
        s.r_size,
        s.e_size,
        s.max_cex_len,
        seed.map(|x| x.to_string()).unwrap_or_default(),
        s.wall_time.as_millis()
    )
}

fn load_target(a: &LearnArgs) -> Result<(String, SMealy)> {
    match (&a.target, &a.bench) {
        (Some(p), _) => {
            let text = read(p)?;
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((name, from_json(&text)?))
        }
        (None, Some(b)) => Ok((b.clone(), builtin(b)?)),
        (None, None) => Err(Error::InvalidSpec(
            "either --target or --bench is required".into(),
        )),
    }
}

type RepOutcome = Result<(SMealy, LearnStats, Vec<String>)>;

fn cmd_learn(a: &LearnArgs) -> Result<()> {
    let (name, target) = load_target(a)?;
    let init = a
        .init
        .as_deref()
        .map(|t| parse_char(target.algebra(), t))
        .transpose()?;
    let cfg = LearnConfig {
        init,
        ..LearnConfig::default()
    };
    let seed_of = |i: u64| a.seed.map(|s| s.wrapping_add(i));
    let outcomes: Vec<RepOutcome> = (0..a.reps)
        .into_par_iter()
        .map(|i| {
            let mode = match a.oracle {
                OracleMode::Lexmin => EquivMode::Lexmin,
                OracleMode::Random => EquivMode::Random(seed_of(i).unwrap_or(0)),
            };
            let mut teacher = SimulatedTeacher::new(target.clone(), mode)?;
            let mut log = TraceLog::default();
            let (m, stats) = if a.trace {
                learn(
                    &mut teacher,
                    target.algebra(),
                    &SweepPartitioner,
                    &cfg,
                    &mut log,
                )?
            } else {
                learn(
                    &mut teacher,
                    target.algebra(),
                    &SweepPartitioner,
                    &cfg,
                    &mut NoMonitor,
                )?
            };
            Ok((m, stats, log.lines))
        })
        .collect();
    let mut csv = format!("{STATS_HEADER}\n");
    let mut first: Option<SMealy> = None;
    for (i, o) in outcomes.into_iter().enumerate() {
        let (m, stats, lines) = o?;
        for l in lines {
            eprintln!("[rep {i}] {l}");
        }
        writeln!(csv, "{}", stats_row(&name, &m, &stats, seed_of(i as u64))).expect("string write");
        first.get_or_insert(m);
    }
    let learned = first.expect("at least one repetition");
    if let Some(p) = &a.out {
        write(p, &to_json(&learned)?)?;
    }
    if let Some(p) = &a.dot {
        write(p, &to_dot(&learned))?;
    }
    write_or_print(a.stats.as_deref(), &csv)
}

fn cmd_random(a: &RandomArgs) -> Result<()> {
    let spec = RandomSpec {
        outputs: a.outputs,
        ..RandomSpec::new(a.states, a.essential, a.seed)
    };
    let m = random_sma(&spec)?;
    write_or_print(a.out.as_deref(), &(to_json(&m)? + "\n"))
}

fn load(p: &Path) -> Result<SMealy> {
    from_json(&read(p)?)
}

fn cmd_equiv(a: &Path, b: &Path) -> Result<i32> {
    let (ma, mb) = (load(a)?, load(b)?);
    match ma.symbolic_equiv(&mb)? {
        Equivalence::Equal => {
            println!("equal");
            Ok(0)
        }
        Equivalence::Mismatch(w) => {
            println!("{}", word_to_string(&w));
            eprintln!(
                "{} outputs {} but {} outputs {}",
                a.display(),
                ma.run(&w)?,
                b.display(),
                mb.run(&w)?
            );
            Ok(3)
        }
    }
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = Instant::now();
    let result = match &cli.cmd {
        Command::Learn(a) => cmd_learn(a).map(|_| 0),
        Command::Random(a) => cmd_random(a).map(|_| 0),
        Command::Equiv { a, b } => cmd_equiv(a, b),
        Command::Bench {
            cmd: BenchCommand::Export { name, out },
        } => builtin(name)
            .and_then(|m| to_json(&m))
            .and_then(|t| write_or_print(out.as_deref(), &(t + "\n")))
            .map(|_| 0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e} ({} ms)", started.elapsed().as_millis());
            exit_code(&e)
        }
    }
}
