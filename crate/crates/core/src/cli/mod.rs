//! The `halfline-kdv` command line: `solve`, `verify` and `plotdata`.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 for
//! invalid input (manifest, suite name, run directory) and other errors, 3
//! when the Picard iteration does not converge.

mod manifest;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use manifest::{Emit, RunManifest};
pub use output::{plotdata, write_run, Metadata};

use crate::solver::solve_nonlinear;
use crate::verify::{run_suite, CheckResult, Suite};
use crate::Error;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "KDV_HALFLINE_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "halfline-kdv", version, about = "Boundary-forcing solver for gKdV on the right half-line")]
pub struct Cli {
    /// Worker threads for `verify`; solves are single-threaded.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the problem described by a manifest.
    Solve {
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory; overrides the manifest and the environment.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites: fractional, airy, linear, solver or all.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write two-column slices of a solve directory.
    Plotdata {
        /// Directory written by `solve`.
        run: PathBuf,
        /// Destination; defaults to `<run>/plot`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_out(sub: &str) -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("kdv-out")).join(sub)
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

/// Parses `args` and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if cli.threads == 0 {
        return fail(EXIT_INVALID, "--threads must be at least 1");
    }
    match cli.command {
        Command::Solve { manifest, out } => cmd_solve(&manifest, out.as_deref()),
        Command::Verify { suite, out } => cmd_verify(&suite, out.as_deref(), cli.threads),
        Command::Plotdata { run, out } => match plotdata(&run, out.as_deref()) {
            Ok(written) => {
                for path in written {
                    println!("{}", path.display());
                }
                EXIT_OK
            }
            Err(e) => fail(EXIT_INVALID, e),
        },
    }
}

/// Solves the manifest's problem and writes the run directory.
pub fn cmd_solve(manifest_path: &Path, out: Option<&Path>) -> i32 {
    let manifest = match RunManifest::load(manifest_path) {
        Ok(m) => m,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let scenario = match manifest.scenario() {
        Ok(s) => s,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| manifest.out.clone())
        .unwrap_or_else(|| default_out(&scenario.name));
    let problem = match scenario.problem() {
        Ok(p) => p,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let outcome = solve_nonlinear(&problem);
    let code = match &outcome {
        Ok(_) => EXIT_OK,
        Err(Error::NonConvergence { .. }) => EXIT_NONCONVERGENCE,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    if let Err(e) = write_run(&dir, &manifest, &scenario, &problem, outcome.as_ref()) {
        return fail(EXIT_INVALID, e);
    }
    match outcome {
        Ok(_) => println!("{}", dir.display()),
        Err(e) => eprintln!("error: {e}"),
    }
    code
}

fn write_report(dir: &Path, suite: Suite, results: &[CheckResult]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(results).map_err(std::io::Error::other)?;
    std::fs::write(dir.join(format!("{}.json", suite.name())), json + "\n")
}

/// Runs the named suites, prints one line per check and writes one JSON
/// report per suite.
pub fn cmd_verify(suite: &str, out: Option<&Path>, threads: usize) -> i32 {
    let suite: Suite = match suite.parse() {
        Ok(s) => s,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let members = suite.members();
    let mut reports: Vec<(Suite, Vec<CheckResult>)> = Vec::new();
    for chunk in members.chunks(threads.max(1)) {
        let done: Vec<(Suite, Vec<CheckResult>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk.iter().map(|&s| scope.spawn(move || (s, run_suite(s)))).collect();
            handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
        });
        reports.extend(done);
    }
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| default_out("verify"));
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let mut all_passed = true;
    for (s, results) in &reports {
        for r in results {
            all_passed &= r.passed;
            let _ = writeln!(lock, "{r}");
        }
        if let Err(e) = write_report(&dir, *s, results) {
            return fail(EXIT_INVALID, format!("cannot write report to {}: {e}", dir.display()));
        }
    }
    if all_passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}
