use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twisted_xxx::config::{parse_complex, Boundary, RunConfig, XiSampling, SEED_ENV};
use twisted_xxx::report::{all_pass, emit_report, ReportFormat};
use twisted_xxx::suite::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "twisted-xxx", version, about = "Numerical verification of the twisted XXX chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Ybe,
    Rtt,
    Cr,
    Spectrum,
    Bethe,
    Symmetry,
    Fusion,
    Twist,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Ybe => Suite::Ybe,
            SuiteArg::Rtt => Suite::Rtt,
            SuiteArg::Cr => Suite::Cr,
            SuiteArg::Spectrum => Suite::Spectrum,
            SuiteArg::Bethe => Suite::Bethe,
            SuiteArg::Symmetry => Suite::Symmetry,
            SuiteArg::Fusion => Suite::Fusion,
            SuiteArg::Twist => Suite::Twist,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Periodic,
    Open,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: SuiteArg,
    /// Largest chain length used by the suite.
    #[arg(long)]
    n_sites: Option<usize>,
    /// Fix the deformation parameter, e.g. `0.5` or `0.3-0.2i`.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,
    /// Samples per task, overriding each task's default.
    #[arg(long)]
    samples: Option<usize>,
    /// Defaults to $TWISTED_XXX_SEED, then to the built-in seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Draw sampled xi from the unit disk instead of [-1, 1].
    #[arg(long)]
    xi_disk: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat `key = value` file with RunConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Echoed into the JSON report.
#[derive(Serialize)]
struct Echo<'a> {
    suite: Suite,
    #[serde(flatten)]
    run: &'a RunConfig,
}

fn build_config(args: &VerifyArgs) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Ok(s) = std::env::var(SEED_ENV) {
        cfg.seed = s
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got '{s}'"))?;
    }
    if let Some(path) = &args.config {
        cfg.load_kv_file(path).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(n) = args.n_sites {
        cfg.n_sites = n;
    }
    if let Some(xi) = &args.xi {
        cfg.xi = Some(parse_complex(xi).map_err(|e| e.to_string())?);
    }
    if let Some(eta) = &args.eta {
        cfg.eta = parse_complex(eta).map_err(|e| e.to_string())?;
    }
    if let Some(b) = args.boundary {
        cfg.boundary = match b {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Open => Boundary::Open,
        };
    }
    if args.samples.is_some() {
        cfg.samples = args.samples;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.xi_disk {
        cfg.xi_sampling = XiSampling::Disk;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let Command::Verify(args) = Cli::parse().command;
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let suite = Suite::from(args.suite);
    let reports = match run_suite(&cfg, suite) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let format = match args.format {
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Csv => ReportFormat::Csv,
    };
    let echo = Echo { suite, run: &cfg };
    if let Err(e) = emit_report(&reports, format, cfg.seed, &echo, args.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if all_pass(&reports) {
        ExitCode::SUCCESS
    } else {
        let failed = reports.iter().filter(|r| !r.pass).count();
        eprintln!("{failed} of {} checks failed", reports.len());
        ExitCode::FAILURE
    }
}
