use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fredholm_kit::{exit, run, Command, Format, RunOptions};

/// Fredholm checks for differential operators on manifolds with cylindrical,
/// hyperbolic and Euclidean ends.
///
/// Exit codes: 0 Fredholm/success, 1 NotFredholm, 2 Undecided, 3 bad input,
/// 4 computation failed, 5 oracle mismatch (verify).
///
/// The mode cutoff defaults to 10·(largest coefficient)·order² and is raised
/// automatically when the tail bound needs more modes to certify weights in
/// [-5, 5] (capped at 2e4). Set FREDHOLMKIT_THREADS to cap parallelism.
#[derive(Parser)]
#[command(name = "fredholm-kit", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Operator spec (JSON)
    spec: PathBuf,
    /// Weight δ: the test line is Re(z) = δ
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    weight: f64,
    /// Eigenvalue cutoff Λ for cross-section modes
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long, value_enum, default_value_t = Fmt::Text)]
    format: Fmt,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone)]
struct Scan {
    /// τ range for the line scan
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    tau_range: Option<Vec<f64>>,
    /// Points in the coarsest scan level
    #[arg(long, default_value_t = 2001)]
    pts: usize,
    /// Export the scan as CSV (point,minSingular)
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide Fredholmness at a weight
    Check {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scan: Scan,
        /// Treat the manifold as closed (ellipticity only)
        #[arg(long)]
        compact: bool,
    },
    /// Indicial roots per mode, safe weights and a line scan
    Roots {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scan: Scan,
    },
    /// Limit operator and indicial family
    Normal {
        #[command(flatten)]
        common: Common,
    },
    /// Operator after t = log r
    Transform {
        #[command(flatten)]
        common: Common,
    },
    /// Frame bracket table of a structure
    BracketTable {
        /// Spec whose structure to use
        spec: Option<PathBuf>,
        /// b, zero, sc or cgamma:<gamma>
        #[arg(long)]
        structure: Option<String>,
        #[arg(long, default_value_t = 2)]
        collar_dim: usize,
        #[arg(long, value_enum, default_value_t = Fmt::Text)]
        format: Fmt,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `check` plus the independent oracle; fails on any mismatch
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Text,
    Json,
}

impl From<Fmt> for Format {
    fn from(f: Fmt) -> Self {
        match f {
            Fmt::Text => Format::Text,
            Fmt::Json => Format::Json,
        }
    }
}

fn apply_common(o: &mut RunOptions, c: &Common) {
    o.weight = c.weight;
    o.cutoff = c.cutoff;
    o.format = c.format.into();
    o.out = c.out.clone();
}

fn apply_scan(o: &mut RunOptions, s: &Scan) {
    o.tau_range = s.tau_range.as_ref().map(|v| (v[0], v[1]));
    o.pts = s.pts;
    o.csv = s.csv.clone();
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("FREDHOLMKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("FREDHOLMKIT_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(exit::INPUT as u8);
    }
    let mut o = RunOptions::default();
    let (cmd, spec) = match &cli.command {
        Cmd::Check { common, scan, compact } => {
            apply_common(&mut o, common);
            apply_scan(&mut o, scan);
            o.compact = *compact;
            (Command::Check, Some(common.spec.clone()))
        }
        Cmd::Roots { common, scan } => {
            apply_common(&mut o, common);
            apply_scan(&mut o, scan);
            (Command::Roots, Some(common.spec.clone()))
        }
        Cmd::Normal { common } => {
            apply_common(&mut o, common);
            (Command::Normal, Some(common.spec.clone()))
        }
        Cmd::Transform { common } => {
            apply_common(&mut o, common);
            (Command::Transform, Some(common.spec.clone()))
        }
        Cmd::Verify { common } => {
            apply_common(&mut o, common);
            (Command::Verify, Some(common.spec.clone()))
        }
        Cmd::BracketTable { spec, structure, collar_dim, format, out } => {
            o.structure = structure.clone();
            o.collar_dim = *collar_dim;
            o.format = (*format).into();
            o.out = out.clone();
            (Command::BracketTable, spec.clone())
        }
    };
    let outcome = run(cmd, spec.as_deref(), &o);
    for d in &outcome.diagnostics {
        eprintln!("{d}");
    }
    if o.out.is_none() && !outcome.document.is_empty() {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(outcome.document.as_bytes());
    }
    ExitCode::from(outcome.exit_code as u8)
}
