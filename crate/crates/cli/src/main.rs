use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use synergy_cli::report::{measure, render_table, MeasureReport};
use synergy_cli::{circuit_check, examples_list, load_example, load_file, table1, tsv, Failure};
use synergy_core::{build_example, ExampleId, OptimizerConfig};

/// Redundant, unique and synergistic information among discrete predictors.
#[derive(Parser)]
#[command(name = "synergy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every measure for one distribution.
    Compute {
        /// A `.tsv` distribution or `.circ` circuit.
        #[arg(required_unless_present = "example", conflicts_with = "example")]
        path: Option<PathBuf>,
        /// One of the bundled examples (see `examples list`).
        #[arg(long)]
        example: Option<String>,
        /// Rescale TSV masses whose total is within 1e-3 of one.
        #[arg(long)]
        renormalize: bool,
        /// Also report the two-predictor decomposition.
        #[arg(long)]
        pid2: bool,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Reproduce the four synergy measures for all ten examples.
    Table1 {
        /// Compare against the expected values; exit 1 on any mismatch.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// List or print the bundled examples.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Validate circuit descriptions.
    Circuit {
        #[command(subcommand)]
        action: CircuitAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    List,
    /// Print an example as TSV.
    Dump { id: String },
}

#[derive(Subcommand)]
enum CircuitAction {
    /// Parse and compile a `.circ` file.
    Check { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct OptimizerArgs {
    /// Random restarts in addition to the analytic warm start.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Stall tolerance on the objective, in bits.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OptimizerArgs {
    fn config(&self) -> Result<OptimizerConfig, Failure> {
        let cfg = OptimizerConfig {
            restarts: self.restarts,
            max_iterations: self.max_iters,
            tolerance_bits: self.tol,
            seed: self.seed,
            ..OptimizerConfig::default()
        };
        cfg.validate().map_err(|e| Failure::Input(e.to_string()))?;
        Ok(cfg)
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn warn_unconverged(r: &MeasureReport) {
    if !r.optimizer.converged {
        eprintln!(
            "warning: {}: optimizer did not converge within {} iterations",
            r.input.name, r.optimizer.max_iterations
        );
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compute {
            path,
            example,
            renormalize,
            pid2,
            output,
            optimizer,
        } => {
            let cfg = optimizer.config()?;
            let (table, identity) = match (&path, &example) {
                (_, Some(name)) => load_example(name)?,
                (Some(p), None) => load_file(p, renormalize)?,
                (None, None) => unreachable!("clap requires one input"),
            };
            let report = measure(&table, identity, &cfg, pid2).map_err(Failure::from_core)?;
            warn_unconverged(&report);
            match output.format {
                Format::Table => print!("{}", render_table(&report)),
                Format::Json => print!("{}", to_json(&report)),
            }
            Ok(())
        }
        Command::Table1 {
            check,
            output,
            optimizer,
        } => {
            let cfg = optimizer.config()?;
            let results = table1::run(&cfg);
            let mut errors = Vec::new();
            let mut mismatches = Vec::new();
            let mut reports = Vec::new();
            for (id, result) in &results {
                match result {
                    Ok(r) => {
                        warn_unconverged(r);
                        if check {
                            mismatches.extend(table1::check(*id, r));
                        }
                        reports.push(r.clone());
                    }
                    Err(e) => errors.push(format!("{id}: {e}")),
                }
            }
            match output.format {
                Format::Table => print!("{}", table1::render(&results)),
                Format::Json => print!("{}", to_json(&reports)),
            }
            for m in &mismatches {
                eprintln!("mismatch: {m}");
            }
            if !errors.is_empty() {
                return Err(Failure::Runtime(format!(
                    "{} example(s) failed: {}",
                    errors.len(),
                    errors.join("; ")
                )));
            }
            if !mismatches.is_empty() {
                return Err(Failure::Check(format!(
                    "check failed: {} mismatch(es)",
                    mismatches.len()
                )));
            }
            if check {
                eprintln!("check passed: all ten examples within tolerance");
            }
            Ok(())
        }
        Command::Examples { action } => {
            match action {
                ExamplesAction::List => print!("{}", examples_list()),
                ExamplesAction::Dump { id } => {
                    let id: ExampleId = id.parse().map_err(Failure::from_core)?;
                    print!("{}", tsv::dump_tsv(&build_example(id)));
                }
            }
            Ok(())
        }
        Command::Circuit {
            action: CircuitAction::Check { file },
        } => {
            println!("{}", circuit_check(&file)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
