//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when well-formed input fails a check, 2 on
//! usage, I/O or parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::ecc::{run_ecc, MarginId, SamplingScheme};
use crate::empirical::{empirical_copula, ranks, TiePolicy};
use crate::error::{Error, Result};
use crate::grid::{check_discrete_copula, DEFAULT_EPS};
use crate::io;
use crate::report::AxiomReport;
use crate::sklar::{compose, extract_copula};
use crate::stochastic::{array_from_copula, check_stochastic, copula_from_array};
use crate::subcopula::{check_subcopula, extend_irreducible};

const FORMATS: &str = "\
FILE FORMATS:
  grid       GRIDFN M=<int> L=<int>, then (M+1)^L reals, row-major (first axis slowest)
  array      STOCHARR M=<int> L=<int>, then M^L reals, row-major
  ranks      RANKMAT M=<int> L=<int>, then M lines of L integers in 1..=M
  subcopula  SUBCOP M=<int> L=<int>, then L lines of domain integers (each with 0 and M), then values row-major over the domains
  samples    CSV m,dim1,...,dimL with m = 1..=M
  joint      CSV x1,...,xL,mass with masses multiples of 1/M
  margin     CSV value,level with levels multiples of 1/M, last level 1
  ensemble   CSV variable,location,lead_time,member,value with members 1..=M for every margin
  margins    JSON [{variable, location, lead_time, dist: {type: gaussian, mean, sd} | {type: empirical, samples: [..]}}]
  ecc out    CSV variable,location,lead_time,member,value,ecc_value
  report     JSON {preserved, template_hash, tied_margins, per_margin: [{id, min, max}]}";

#[derive(Debug, Parser)]
#[command(name = "discopula", version, about = "Discrete copulas, the discrete Sklar theorem and ensemble copula coupling", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Ties {
    Reject,
    First,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scheme {
    /// Equally spaced (m - 1/2)/M quantiles.
    Quantiles,
    /// Seeded random draws.
    Random,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the axioms of a grid, array or subcopula file (chosen by its header).
    Check {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Convert a copula grid to its stochastic array.
    ToArray {
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Convert a stochastic array to its copula grid.
    FromArray {
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Empirical copula and rank matrix of a sample CSV.
    Empirical {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Ties::Reject)]
        ties: Ties,
        /// Required with --ties random.
        #[arg(long)]
        seed: Option<u64>,
        /// Grid output (stdout if omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        ranks_out: Option<PathBuf>,
    },
    /// Extend an irreducible subcopula to an irreducible copula.
    Extend {
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compose an irreducible copula grid with margins into a joint distribution.
    SklarCompose {
        #[arg(long)]
        grid: PathBuf,
        /// One margin CSV per axis, in axis order.
        #[arg(long = "margin", required = true)]
        margins: Vec<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Extract an irreducible copula from a joint distribution and report uniqueness.
    SklarExtract {
        input: PathBuf,
        /// The resolution M; all masses must be multiples of 1/M.
        #[arg(short = 'M', long)]
        resolution: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run ensemble copula coupling.
    Ecc {
        #[arg(long)]
        raw: PathBuf,
        #[arg(long)]
        margins: PathBuf,
        /// Seed for random tie breaking (and for random sampling).
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Scheme::Quantiles)]
        scheme: Scheme,
        #[arg(short, long)]
        out: PathBuf,
        /// Report output (stdout if omitted).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Scatter and empirical-copula tables for two margins of an ensemble CSV.
    PlotData {
        input: PathBuf,
        /// Value column to read (`value` or `ecc_value`).
        #[arg(long, default_value = "value")]
        column: String,
        /// First margin as variable,location,lead_time.
        #[arg(long)]
        x: String,
        /// Second margin as variable,location,lead_time.
        #[arg(long)]
        y: String,
        /// Break ties at random with this seed; ties are an error without it.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        scatter: PathBuf,
        #[arg(long)]
        copula: PathBuf,
    },
}

enum Outcome {
    Success,
    Failed,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))),
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_margin_id(text: &str) -> Result<MarginId> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts[..] {
        [v, l, t] => Ok(MarginId::new(v, l, t)),
        _ => Err(Error::parse(1, None, format!("margin id {text:?} is not variable,location,lead_time"))),
    }
}

fn render_report(report: &AxiomReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("serializable");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let mut s = format!("passed: {}\n", report.passed);
            for v in &report.violations {
                s.push_str(&format!("{v}\n"));
            }
            s
        }
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Check { input, eps, format } => {
            let text = read(&input)?;
            let magic = text.split_whitespace().next().unwrap_or("");
            let report = match magic {
                io::GRID_MAGIC => check_discrete_copula(&io::parse_grid(&text)?, eps),
                io::ARRAY_MAGIC => check_stochastic(&io::parse_array(&text)?, eps),
                io::SUBCOPULA_MAGIC => check_subcopula(&io::parse_subcopula(&text)?, eps),
                _ => {
                    return Err(Error::parse(1, Some(1), format!("unknown header {magic:?}; expected GRIDFN, STOCHARR or SUBCOP")))
                }
            };
            emit(None, &render_report(&report, format))?;
            Ok(if report.passed { Outcome::Success } else { Outcome::Failed })
        }
        Command::ToArray { input, out } => {
            let grid = io::parse_grid(&read(&input)?)?;
            emit(out.as_deref(), &io::write_array(&array_from_copula(&grid)?))?;
            Ok(Outcome::Success)
        }
        Command::FromArray { input, out } => {
            let array = io::parse_array(&read(&input)?)?;
            emit(out.as_deref(), &io::write_grid(&copula_from_array(&array)?))?;
            Ok(Outcome::Success)
        }
        Command::Empirical {
            input,
            ties,
            seed,
            out,
            ranks_out,
        } => {
            let policy = match (ties, seed) {
                (Ties::Reject, _) => TiePolicy::Reject,
                (Ties::First, _) => TiePolicy::FirstOccurrence,
                (Ties::Random, Some(s)) => TiePolicy::Random(s),
                (Ties::Random, None) => return Err(Error::parse(1, None, "--ties random requires --seed")),
            };
            let sample = io::parse_samples_csv(&read(&input)?)?;
            let grid = empirical_copula(&sample, policy)?;
            if let Some(path) = ranks_out {
                emit(Some(&path), &io::write_rank_matrix(&ranks(&sample, policy)?))?;
            }
            emit(out.as_deref(), &io::write_grid(&grid))?;
            Ok(Outcome::Success)
        }
        Command::Extend { input, out } => {
            let sub = io::parse_subcopula(&read(&input)?)?;
            emit(out.as_deref(), &io::write_grid(&extend_irreducible(&sub)?))?;
            Ok(Outcome::Success)
        }
        Command::SklarCompose { grid, margins, out } => {
            let copula = io::parse_grid(&read(&grid)?)?;
            let margins = margins
                .iter()
                .map(|p| io::parse_margin_csv(&read(p)?, copula.resolution()))
                .collect::<Result<Vec<_>>>()?;
            let joint = compose(&copula, &margins)?.materialize()?;
            emit(out.as_deref(), &io::write_joint_csv(&joint))?;
            Ok(Outcome::Success)
        }
        Command::SklarExtract { input, resolution, out } => {
            let joint = io::parse_joint_csv(&read(&input)?, resolution)?;
            let extraction = extract_copula(&joint)?;
            emit(out.as_deref(), &io::write_grid(&extraction.copula))?;
            eprintln!("unique: {}", extraction.unique);
            Ok(Outcome::Success)
        }
        Command::Ecc {
            raw,
            margins,
            seed,
            scheme,
            out,
            report,
        } => {
            let data = io::parse_ensemble_csv(&read(&raw)?, "value")?;
            let configured = io::parse_margins_json(&read(&margins)?)?;
            let margins = io::align_margins(&data, configured)?;
            let scheme = match scheme {
                Scheme::Quantiles => SamplingScheme::Quantiles,
                Scheme::Random => SamplingScheme::RandomDraws { seed },
            };
            let run = run_ecc(&data, &margins, scheme, seed)?;
            emit(Some(&out), &io::write_ecc_csv(&data, &run.ensemble)?)?;
            emit(report.as_deref(), &io::write_report_json(&run.report))?;
            Ok(if run.report.preserved { Outcome::Success } else { Outcome::Failed })
        }
        Command::PlotData {
            input,
            column,
            x,
            y,
            seed,
            scatter,
            copula,
        } => {
            let data = io::parse_ensemble_csv(&read(&input)?, &column)?;
            let pick = |id: &str| -> Result<usize> {
                let id = parse_margin_id(id)?;
                data.margin_index(&id)
                    .ok_or_else(|| Error::MarginMismatch(format!("{id} is not in the ensemble")))
            };
            let (ix, iy) = (pick(&x)?, pick(&y)?);
            let xs = data.margin_values(ix).to_vec();
            let ys = data.margin_values(iy).to_vec();
            let policy = seed.map_or(TiePolicy::Reject, TiePolicy::Random);
            let sample = crate::empirical::SampleSet::new(
                data.members(),
                2,
                xs.iter().zip(&ys).flat_map(|(&a, &b)| [a, b]).collect(),
            )?;
            let ranks = ranks(&sample, policy)?;
            let grid = crate::empirical::empirical_copula_from_ranks(&ranks)?;
            emit(Some(&scatter), &io::write_scatter_csv(&xs, &ys, &ranks))?;
            emit(Some(&copula), &io::write_copula_grid_csv(&grid))?;
            Ok(Outcome::Success)
        }
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Failed) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                2
            } else {
                1
            }
        }
    }
}
