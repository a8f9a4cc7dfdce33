use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use qspace::commands::{self, CmdError, InvertArgs, MinEigArgs, ReduceArgs, EXIT_MALFORMED, EXIT_NO, EXIT_YES};
use qspace::corpus::{self, CorpusSpec};
use qspace::io::{self, InstanceFile};
use qspace::report::RunReport;
use qspace_core::reductions::ReductionKind;

/// Matrix inversion, MINEIG decisions and circuit reductions at desk scale.
///
/// Exit codes: 0 YES (or pass), 1 NO (or fail), 2 malformed input or
/// capacity, 3 promise violation. JSON goes to stdout, a table to stderr.
#[derive(Parser, Debug)]
#[command(name = "qspace", version)]
#[command(group(ArgGroup::new("hamsim").args(["exact_evolution", "inject_eps"])))]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Exact exp(-iHt) in the MINEIG protocol (the default).
    #[arg(long, global = true)]
    exact_evolution: bool,
    /// Replace exp(-iHt) by a seeded perturbation with this operator-norm error.
    #[arg(long, global = true, value_name = "EPS")]
    inject_eps: Option<f64>,
    /// Compare against the classical oracle and record pass/fail.
    #[arg(long, global = true)]
    verify_oracle: bool,
    /// Report file (invert, mineig), artifact file (reduce) or directory (corpus).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide MATINV and estimate |H^-1(s, t)|.
    Invert {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Source circuit of a qca artifact; checks provenance and reports the closed form.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Decide whether lambda_min(H) <= a or >= b.
    Mineig {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
    },
    /// Build a reduction artifact; --verify-oracle re-checks its bounds.
    Reduce {
        kind: KindArg,
        /// Circuit file (qca) or verifier file (clock).
        #[arg(long, required_unless_present = "matrix")]
        circuit: Option<PathBuf>,
        /// Matrix or artifact file (walk).
        #[arg(long, conflicts_with = "circuit")]
        matrix: Option<PathBuf>,
        #[arg(long)]
        clock_offset: Option<usize>,
        /// Walk normalization X (default max |H_ij|).
        #[arg(long)]
        x: Option<f64>,
    },
    /// Run a corpus spec (the shipped default when omitted).
    Corpus { spec: Option<PathBuf> },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Qca,
    Clock,
    Walk,
}

fn emit(report: &RunReport, out: Option<&PathBuf>) -> Result<(), CmdError> {
    eprint!("{}", report.table());
    let json = io::to_json(report);
    print!("{json}");
    if let Some(path) = out {
        std::fs::write(path, json)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CmdError> {
    let load = |p: &PathBuf| -> Result<InstanceFile, CmdError> { Ok(io::read_json(p)?) };
    match cli.command {
        Command::Invert { matrix, s, t, a, b, eps, circuit } => {
            let file = load(&matrix)?;
            let args = InvertArgs { s, t, a, b, eps, seed: cli.seed, verify_oracle: cli.verify_oracle, circuit };
            let (report, code) = commands::invert(&file, &args)?;
            emit(&report, cli.out.as_ref())?;
            Ok(code)
        }
        Command::Mineig { matrix, a, b } => {
            let file = load(&matrix)?;
            let inject_eps = if cli.exact_evolution { None } else { cli.inject_eps };
            let args = MinEigArgs { a, b, inject_eps, seed: cli.seed, verify_oracle: cli.verify_oracle };
            let (report, code) = commands::mineig(&file, &args)?;
            emit(&report, cli.out.as_ref())?;
            Ok(code)
        }
        Command::Reduce { kind, circuit, matrix, clock_offset, x } => {
            let kind = match kind {
                KindArg::Qca => ReductionKind::QcaMatinv,
                KindArg::Clock => ReductionKind::Clock,
                KindArg::Walk => ReductionKind::Walk,
            };
            let input = match (kind, circuit, matrix) {
                (ReductionKind::Walk, _, Some(m)) => m,
                (ReductionKind::Walk, _, None) => return Err(CmdError::Malformed("walk takes --matrix".into())),
                (_, Some(c), _) => c,
                (_, None, _) => return Err(CmdError::Malformed("qca and clock take --circuit".into())),
            };
            let args = ReduceArgs { clock_offset, x, verify: cli.verify_oracle, out: cli.out.clone(), seed: cli.seed };
            let (report, code) = commands::reduce(kind, &input, &args)?;
            emit(&report, None)?;
            Ok(code)
        }
        Command::Corpus { spec } => {
            let spec = match spec {
                Some(p) => {
                    let text = std::fs::read_to_string(&p)
                        .map_err(|e| CmdError::Malformed(format!("{}: {e}", p.display())))?;
                    CorpusSpec::parse(&text)?
                }
                None => CorpusSpec::default_spec(),
            };
            let start = std::time::Instant::now();
            let report = corpus::run(&spec, cli.seed);
            eprint!("{}", report.summary());
            eprintln!("corpus {} finished in {:.1} s", report.name, start.elapsed().as_secs_f64());
            print!("{}", io::to_json(&report));
            if let Some(dir) = &cli.out {
                corpus::write(&report, dir)?;
            }
            Ok(if report.pass { EXIT_YES } else { EXIT_NO })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("QSPACE_DENSE_CAP") {
        match v.parse::<usize>() {
            Ok(cap) if cap > 0 => qspace_core::tolerances::set_dense_cap(cap),
            _ => {
                eprintln!("error: QSPACE_DENSE_CAP must be a positive integer, got {v:?}");
                return ExitCode::from(EXIT_MALFORMED as u8);
            }
        }
    }
    // a panic here is a bug, but the exit-code contract still holds
    let code = match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => EXIT_MALFORMED,
    };
    ExitCode::from(code as u8)
}
