use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fuzzy_bundles::chern::ChargeReport;
use fuzzy_bundles::sweep::{charge_report, run_sweep, write_csv, write_records, ChargeRecord, Format, SweepConfig};
use fuzzy_bundles::verify::{run_verify, Suite, VerifyOptions};
use fuzzy_bundles::{Branch, Error, TwoJ};

const EXIT_TOLERANCE: u8 = 1;
const EXIT_DOMAIN: u8 = 3;
const EXIT_IO: u8 = 4;

/// Charges of equivariant line bundles over the fuzzy sphere.
///
/// Spins are entered doubled: `--two-n 3` means N = 3/2.
#[derive(Parser)]
#[command(name = "fuzzy-bundles", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report f, q, c1 and every cross-check residual at one point.
    Charge {
        #[arg(long = "two-n")]
        two_n: u32,
        #[arg(long = "two-nu")]
        two_nu: u32,
        #[arg(long)]
        branch: Branch,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Tabulate charges over (nu, branch, N) and write them to a file.
    Sweep {
        /// Comma-separated doubled fiber spins.
        #[arg(long = "two-nu", value_delimiter = ',', required = true)]
        two_nu: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "plus,minus")]
        branch: Vec<Branch>,
        #[arg(long = "two-n-max")]
        two_n_max: u32,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Step two_N by one instead of two.
        #[arg(long)]
        allow_half_integer_n: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run the named invariant checks at one point.
    Verify {
        #[arg(long = "two-n")]
        two_n: u32,
        #[arg(long = "two-nu")]
        two_nu: u32,
        #[arg(long)]
        branch: Branch,
        #[arg(long, value_enum, default_value = "core")]
        suite: Suite,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Seed of the Monte-Carlo check in the full suite.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    Tolerance,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance) => ExitCode::from(EXIT_TOLERANCE),
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::BranchDomain { .. } | Error::Domain(_) => ExitCode::from(EXIT_DOMAIN),
                _ => ExitCode::from(EXIT_TOLERANCE),
            }
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Charge {
            two_n,
            two_nu,
            branch,
            format,
            tol,
        } => {
            let report = charge_report(TwoJ(two_n), TwoJ(two_nu), branch)?;
            let stdout = io::stdout().lock();
            match format {
                Format::Json => {
                    let mut out = stdout;
                    serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
                    writeln!(out)?;
                }
                Format::Csv => write_csv(&[ChargeRecord::from(&report)], stdout)?,
            }
            report_failures(&report, tol)
        }
        Command::Sweep {
            two_nu,
            branch,
            two_n_max,
            output,
            format,
            allow_half_integer_n,
            tol,
        } => {
            if two_nu.contains(&0) {
                return Err(Error::Domain("sweep fiber spins must be positive".into()).into());
            }
            let config = SweepConfig {
                two_nu_list: two_nu,
                branches: branch,
                two_n_max,
                output_path: output,
                format,
                half_integer: allow_half_integer_n,
                tol,
            };
            let reports = run_sweep(&config)?;
            let mut rows = Vec::with_capacity(reports.len());
            let mut withheld = 0;
            for report in &reports {
                if report.failures(tol).is_empty() {
                    rows.push(ChargeRecord::from(report));
                } else {
                    withheld += 1;
                    let _ = report_failures(report, tol);
                }
            }
            write_records(&rows, &config.output_path, config.format)?;
            eprintln!("wrote {} rows to {}", rows.len(), config.output_path.display());
            if withheld > 0 {
                eprintln!("{withheld} rows withheld above tolerance {tol:e}");
                return Err(Failure::Tolerance);
            }
            Ok(())
        }
        Command::Verify {
            two_n,
            two_nu,
            branch,
            suite,
            tol,
            seed,
            samples,
        } => {
            let checks = run_verify(&VerifyOptions {
                two_n: TwoJ(two_n),
                two_nu: TwoJ(two_nu),
                branch,
                suite,
                tol,
                seed,
                samples,
            })?;
            let mut out = io::stdout().lock();
            for check in &checks {
                writeln!(out, "{check}")?;
            }
            let failed = checks.iter().filter(|ch| !ch.passed()).count();
            writeln!(out, "{} checks, {failed} failed", checks.len())?;
            if failed > 0 {
                Err(Failure::Tolerance)
            } else {
                Ok(())
            }
        }
    }
}

fn report_failures(report: &ChargeReport, tol: f64) -> Result<(), Failure> {
    let failures = report.failures(tol);
    if failures.is_empty() {
        return Ok(());
    }
    eprintln!(
        "two_N={} two_nu={} branch={}: residuals at or above {tol:e}",
        report.two_n.value(),
        report.two_nu.value(),
        report.branch
    );
    for (name, value) in failures {
        eprintln!("  {name} = {value:e}");
    }
    Err(Failure::Tolerance)
}
