//! Argument parsing and dispatch for the `scbound` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use scbound_core::bounds::OptConfig;
use scbound_core::protocol::BuiltinParams;

use crate::commands::{self, Source};
use crate::format::CmssFile;
use crate::report::{Format, Report};
use crate::{exit, CliError, CliResult, RunManifest};

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "SCBOUND_THREADS";

#[derive(Debug, Parser)]
#[command(name = "scbound", version, about = "Communication and randomness bounds for three-party secure computation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower bounds on H(M12), H(M23), H(M31) and randomness for a function.
    Analyze(AnalyzeArgs),
    /// Exact run of a protocol (or sharing scheme) with every security check.
    Simulate(SimulateArgs),
    /// Recompute the expected values for the built-ins and compare.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct BuiltinArgs {
    /// Built-in function: group-add, sum, erasure, remote-ot or and.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Group order for group-add.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Block length.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Number of strings for remote-ot.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// P(X = 1) for erasure.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// P(Y = 1) for erasure.
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
}

impl BuiltinArgs {
    fn params(&self) -> BuiltinParams {
        BuiltinParams { order: self.order, n: self.n, m: self.m, p: self.p, q: self.q }
    }
}

#[derive(Debug, Args)]
pub struct OptArgs {
    /// Grid spacing of the optimizer's initial scan.
    #[arg(long)]
    pub grid: Option<f64>,
    /// Refinement sweeps per start.
    #[arg(long)]
    pub refine: Option<usize>,
}

impl OptArgs {
    fn config(&self) -> OptConfig {
        let mut c = OptConfig::default();
        if let Some(g) = self.grid {
            c.grid_resolution = g;
        }
        if let Some(r) = self.refine {
            c.refine_iters = r;
        }
        c
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record wall time in the manifest (makes output vary between runs).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub builtin: BuiltinArgs,
    /// Channel file (JSON).
    #[arg(long, conflicts_with = "builtin")]
    pub channel: Option<PathBuf>,
    /// Input distribution file (JSON); defaults to the built-in's inputs or
    /// the uniform pair.
    #[arg(long)]
    pub dist: Option<PathBuf>,
    #[command(flatten)]
    pub opt: OptArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub builtin: BuiltinArgs,
    /// Protocol file (JSON) with the protocol, its channel and optional inputs.
    #[arg(long, conflicts_with_all = ["builtin", "cmss"])]
    pub spec: Option<PathBuf>,
    /// Sharing scheme file (JSON) with the scheme and its secrets.
    #[arg(long, conflicts_with_all = ["builtin", "channel", "dist"])]
    pub cmss: Option<PathBuf>,
    /// Channel file overriding the protocol's.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Input distribution file overriding the protocol's.
    #[arg(long)]
    pub dist: Option<PathBuf>,
    /// Skip computing lower bounds for comparison.
    #[arg(long)]
    pub no_bounds: bool,
    #[command(flatten)]
    pub opt: OptArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Only these rows (comma separated); a prefix such as `group-add`
    /// selects every matching row.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[command(flatten)]
    pub opt: OptArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn path_strings<'a>(paths: impl IntoIterator<Item = &'a Option<PathBuf>>) -> Vec<String> {
    paths.into_iter().flatten().map(|p| p.display().to_string()).collect()
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
    // a pool already built by an earlier call in this process is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn emit<R: Report>(mut report: R, out: &OutputArgs, start: Instant, stdout: &mut dyn Write) -> CliResult<u8> {
    if out.timing {
        report.manifest_mut().set_wall_time(start.elapsed());
    }
    let text = report.render(out.format)?;
    match &out.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
    }
    Ok(if report.passed() { exit::OK } else { exit::VERIFICATION })
}

/// Runs a parsed command; `args` are the words after the subcommand, for
/// the manifest.
pub fn dispatch(cli: &Cli, args: Vec<String>, stdout: &mut dyn Write) -> CliResult<u8> {
    let start = Instant::now();
    configure_threads()?;
    match &cli.command {
        Command::Analyze(a) => {
            let cfg = a.opt.config();
            let manifest = RunManifest::new("analyze", args, path_strings([&a.channel, &a.dist]), &cfg);
            let src = Source {
                builtin: a.builtin.builtin.as_deref(),
                params: a.builtin.params(),
                channel: a.channel.as_deref(),
                dist: a.dist.as_deref(),
            };
            emit(commands::analyze(&src, &cfg, manifest)?, &a.output, start, stdout)
        }
        Command::Simulate(s) => {
            let cfg = s.opt.config();
            let inputs = path_strings([&s.spec, &s.cmss, &s.channel, &s.dist]);
            let manifest = RunManifest::new("simulate", args, inputs, &cfg);
            if let Some(path) = &s.cmss {
                let file: CmssFile = commands::read_json(path)?;
                return emit(commands::simulate_cmss(&file, &cfg, manifest)?, &s.output, start, stdout);
            }
            let src = Source {
                builtin: s.builtin.builtin.as_deref(),
                params: s.builtin.params(),
                channel: s.channel.as_deref(),
                dist: s.dist.as_deref(),
            };
            let (spec, ch, p) = commands::load_protocol(&src, s.spec.as_deref())?;
            let cfg_for_bounds = (!s.no_bounds).then_some(&cfg);
            emit(commands::simulate(&spec, &ch, &p, cfg_for_bounds, manifest)?, &s.output, start, stdout)
        }
        Command::Reproduce(r) => {
            let cfg = r.opt.config();
            let manifest = RunManifest::new("reproduce", args, Vec::new(), &cfg);
            emit(crate::reproduce::reproduce(&r.only, &cfg, manifest)?, &r.output, start, stdout)
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Errors go to `stderr`.
pub fn run(argv: impl IntoIterator<Item = OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let argv: Vec<OsString> = argv.into_iter().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    let args = argv.iter().skip(2).map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(&cli, args, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
