//! `btop`: analyze block Toeplitz symbols, verify the operator lemmas on
//! instances, and reproduce the example catalog.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 parse error, 3 precondition
//! failure. `BTOP_THREADS` caps the worker pool.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use btop_core::io::{operator_binary, operator_csv, parse_potapov, parse_symbol};
use btop_core::workbench::{self, GenKind, InstanceSource, Lemma, RunConfig};
use btop_core::{Error, TruncatedOperator, C64};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "btop", version, about = "Block Toeplitz operator workbench")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Truncation size in blocks.
    #[arg(long, global = true)]
    n_trunc: Option<usize>,
    /// Highest k tested for k-hyponormality.
    #[arg(long, global = true)]
    kmax: Option<usize>,
    /// Coefficient and rank tolerance.
    #[arg(long, global = true)]
    tol_coeff: Option<f64>,
    /// Relative tolerance for positive semidefiniteness; the sign is ignored.
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
    /// Largest principal angle accepted by the range check.
    #[arg(long, global = true)]
    tol_angle: Option<f64>,
    /// Points on the unit circle for grid checks.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Seed for random instances.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Toeplitz,
    Hankel,
}

#[derive(Clone, Copy, ValueEnum)]
enum Encoding {
    Csv,
    Bin,
}

#[derive(Subcommand)]
enum Command {
    /// Classify T_Phi for a symbol file, optionally with Q from a Potapov file.
    Analyze {
        symbol: PathBuf,
        #[arg(long)]
        potapov: Option<PathBuf>,
    },
    /// Run a lemma verifier (1.1, 3.1, 3.2, 3.3) on catalog:<id> or random:<seed>,<count>.
    Verify {
        lemma: String,
        source: String,
        /// Real part of c for catalog:scalar-czbar.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c_im: Option<f64>,
    },
    /// Classify catalog entries and compare with their ground truth.
    Catalog {
        id: Option<String>,
        /// Real part of c for scalar-czbar (default 0.5).
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c_im: Option<f64>,
    },
    /// Emit random instances in the input file format.
    Gen {
        #[arg(long, default_value = "functional")]
        kind: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Write a truncated Toeplitz or Hankel matrix.
    Dump {
        symbol: PathBuf,
        #[arg(long, value_enum, default_value_t = Op::Toeplitz)]
        op: Op,
        #[arg(long, value_enum, default_value_t = Encoding::Csv)]
        encoding: Encoding,
    },
}

enum Failure {
    Error(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::Io(_) | Error::UnknownId(_) | Error::InvalidWord(_) => 2,
        _ => 3,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig, Error> {
    let mut c = match &args.config {
        Some(path) => RunConfig::from_json(&read(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.n_trunc {
        c.n_trunc = v;
    }
    if let Some(v) = args.kmax {
        c.k_max = v;
    }
    if let Some(v) = args.tol_coeff {
        c.tol_coeff = v;
    }
    if let Some(v) = args.tol_psd {
        c.tol_psd = v.abs();
    }
    if let Some(v) = args.tol_angle {
        c.tol_angle = v;
    }
    if let Some(v) = args.grid {
        c.grid = v;
    }
    if let Some(v) = args.seed {
        c.seed = v;
    }
    c.validate()?;
    Ok(c)
}

fn scalar_c(re: Option<f64>, im: Option<f64>) -> C64 {
    match (re, im) {
        (None, None) => btop_core::catalog::DEFAULT_C,
        (re, im) => C64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let config = load_config(&cli.config)?;
    let out = cli.out.as_deref();
    let csv = cli.format == Format::Csv;
    match &cli.command {
        Command::Analyze { symbol, potapov } => {
            let phi = parse_symbol(&read(symbol)?)?;
            let q = potapov.as_deref().map(|p| read(p).and_then(|t| parse_potapov(&t))).transpose()?;
            let report = workbench::analyze(&phi, q.as_ref(), &config)?;
            let text = if csv { report.to_csv() } else { workbench::to_json(&report) };
            emit(out, text.as_bytes())?;
        }
        Command::Verify { lemma, source, c, c_im } => {
            let lemma: Lemma = lemma.parse()?;
            let mut source: InstanceSource = source.parse()?;
            if let InstanceSource::Catalog { c: value, .. } = &mut source {
                *value = scalar_c(*c, *c_im);
            }
            let report = workbench::verify(lemma, &source, &config)?;
            let text = if csv { report.to_csv() } else { workbench::to_json(&report) };
            emit(out, text.as_bytes())?;
            if !report.all_pass {
                let failed = report.rows.iter().filter(|r| !r.pass).count();
                return Err(Failure::Verification(format!("{failed} of {} instances failed", report.rows.len())));
            }
        }
        Command::Catalog { id, c, c_im } => {
            let report = workbench::run_catalog(id.as_deref(), scalar_c(*c, *c_im), &config)?;
            let text = if csv { report.to_csv() } else { workbench::to_json(&report) };
            emit(out, text.as_bytes())?;
            if !report.all_match {
                let failed: Vec<String> = report
                    .entries
                    .iter()
                    .flat_map(|e| e.checks.iter().filter(|c| !c.pass).map(move |c| format!("{}:{}", e.id, c.name)))
                    .collect();
                return Err(Failure::Verification(format!("checks failed: {}", failed.join(", "))));
            }
        }
        Command::Gen { kind, count } => {
            let kind: GenKind = kind.parse()?;
            let report = workbench::generate(kind, *count, &config)?;
            emit(out, workbench::to_json(&report).as_bytes())?;
        }
        Command::Dump { symbol, op, encoding } => {
            let phi = parse_symbol(&read(symbol)?)?;
            let operator = match op {
                Op::Toeplitz => TruncatedOperator::toeplitz(&phi, config.n_trunc),
                Op::Hankel => TruncatedOperator::hankel(&phi, config.n_trunc)?,
            };
            match encoding {
                Encoding::Csv => emit(out, operator_csv(&operator).as_bytes())?,
                Encoding::Bin => emit(out, &operator_binary(&operator))?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("BTOP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
