//! `qcompose`: experiment harness over the qcompose simulators.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 input parse error,
//! 4 numerical failure.

mod commands;
mod table;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qcompose::Error;

use crate::table::{Format, Table};

#[derive(Parser, Debug)]
#[command(
    name = "qcompose",
    version,
    about = "Composed quantum algorithm experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deutsch-Jozsa accept probability on the constant and sampled balanced inputs.
    Dj {
        #[arg(long)]
        m: usize,
        /// Number of balanced inputs to sample.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Early-stopped composition of Deutsch-Jozsa with the Las Vegas subroutine.
    ComposeFail {
        /// Inner length of each block (multiple of 4).
        #[arg(long)]
        m: Option<usize>,
        /// Largest finite stop time; defaults to m/2 + 1.
        #[arg(long)]
        max_stop: Option<usize>,
        /// Instance JSON instead of the structured counterexample.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Line purifier sweep over (p0, D).
    Purifier {
        #[arg(long, value_parser = parse_real)]
        epsilon: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        d_list: Vec<usize>,
        #[arg(long, value_parser = parse_real)]
        p0: Option<f64>,
        #[arg(long, value_delimiter = ',', value_parser = parse_real)]
        p0_list: Vec<f64>,
    },
    /// Hitting times and the commute-time identity on a graph.
    Commute {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The three composition cost models on a profile.
    Costs {
        #[arg(long)]
        profile: PathBuf,
    },
    /// Majority-vote vs. purifier overhead per target error.
    MajorityVsPurifier {
        #[arg(long, value_parser = parse_real)]
        epsilon: Option<f64>,
        /// Comma-separated targets; accepts forms like `0.01`, `1/8`, `2^-20`.
        #[arg(long, required = true, value_delimiter = ',', value_parser = parse_real)]
        deltas: Vec<f64>,
    },
}

const DEFAULT_EPSILON: f64 = 1.0 / 3.0;
const DEFAULT_D_LIST: [usize; 4] = [4, 8, 16, 32];
const DEFAULT_P0_LIST: [f64; 2] = [0.1, 0.9];

/// A real number, a fraction `a/b`, or a power `a^b`.
fn parse_real(s: &str) -> Result<f64, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let v = if let Some((a, b)) = s.split_once('/') {
        num(a)? / num(b)?
    } else if let Some((a, b)) = s.split_once('^') {
        num(a)?.powf(num(b)?)
    } else {
        num(s)?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not a finite number"))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 3,
        Error::Numerical(_) => 4,
        _ => 2,
    }
}

fn run(cli: &Cli) -> qcompose::Result<Table> {
    match &cli.command {
        Command::Dj { m, samples, seed } => commands::dj(*m, *samples, *seed),
        Command::ComposeFail {
            m,
            max_stop,
            instance,
        } => commands::compose_fail(*m, *max_stop, instance.as_deref()),
        Command::Purifier {
            epsilon,
            d,
            d_list,
            p0,
            p0_list,
        } => {
            let mut ds: Vec<usize> = d_list.iter().copied().chain(*d).collect();
            if ds.is_empty() {
                ds = DEFAULT_D_LIST.to_vec();
            }
            let mut ps: Vec<f64> = p0_list.iter().copied().chain(*p0).collect();
            if ps.is_empty() {
                ps = DEFAULT_P0_LIST.to_vec();
            }
            commands::purifier(epsilon.unwrap_or(DEFAULT_EPSILON), &ds, &ps)
        }
        Command::Commute {
            graph,
            s,
            t,
            trials,
            seed,
        } => commands::commute(graph, *s, *t, *trials, *seed),
        Command::Costs { profile } => commands::costs(profile),
        Command::MajorityVsPurifier { epsilon, deltas } => {
            commands::majority_vs_purifier(epsilon.unwrap_or(DEFAULT_EPSILON), deltas)
        }
    }
}

/// Write through a sibling temporary file so a failed write never leaves
/// a partial output behind.
fn write_atomically(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rendered = match run(&cli).and_then(|t| t.render(cli.format)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let written = match &cli.out {
        Some(path) => write_atomically(path, &rendered),
        None => std::io::stdout().lock().write_all(rendered.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: writing output: {e}");
            ExitCode::from(2)
        }
    }
}
