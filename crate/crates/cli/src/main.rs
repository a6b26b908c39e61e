use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use doiforge::NormSpec;
use doiforge_cli::config::DEFAULT_OUT;
use doiforge_cli::demo::periodic_demo;
use doiforge_cli::profiles::{emit_profiles, ProfileConfig};
use doiforge_cli::{run, CliError, FileConfig, RunConfig};

#[derive(Parser)]
#[command(
    name = "doiforge",
    version,
    about = "Seeded verification suites for double operator integral estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites and write reports.jsonl and summary.csv.
    Verify {
        /// Suite id (thm11, cor22, besov, ...), a comma list, or `all`.
        target: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Worked examples.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Write CSV profiles for plotting.
    Profiles {
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Truncated derivative on the circle plus a bounded potential.
    Periodic {
        /// Number of positive modes; the matrix has size 2N + 1.
        #[arg(long = "N", default_value_t = 50)]
        modes: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Also write demo_periodic.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct Flags {
    /// TOML file with the same keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    /// schatten:P, weak:P, kyfan:K or op.
    #[arg(long)]
    norm: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Smaller trial counts and grids.
    #[arg(long)]
    quick: bool,
    /// Replace every record's additive tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

impl Flags {
    fn merged(self, theorems: Option<Vec<String>>) -> Result<FileConfig, CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Ok(file.overlay(FileConfig {
            theorems,
            seed: self.seed,
            trials: self.trials,
            n: self.n,
            alpha: self.alpha,
            theta: self.theta,
            p: self.p,
            r: self.r,
            norm: self.norm,
            quick: self.quick.then_some(true),
            tol: self.tol,
            out: self.out,
        }))
    }
}

fn verify(target: String, flags: Flags) -> Result<i32, CliError> {
    let ids = target.split(',').map(|s| s.trim().to_string()).collect();
    let cfg = RunConfig::resolve(flags.merged(Some(ids))?)?;
    log::info!(
        "running {} suites with seed {}",
        cfg.theorems.len(),
        cfg.options.seed
    );
    let outcome = run(&cfg)?;
    println!(
        "{:<28} {:>7} {:>7} {:>7} {:>12}",
        "theorem", "records", "passed", "failed", "max_ratio"
    );
    for s in &outcome.summary {
        println!(
            "{:<28} {:>7} {:>7} {:>7} {:>12.4e}",
            s.theorem_id,
            s.records,
            s.passed,
            s.failed(),
            s.max_ratio
        );
    }
    println!("reports written to {}", cfg.out.display());
    Ok(outcome.exit_code())
}

fn demo(modes: usize, p: f64, out: Option<PathBuf>) -> Result<i32, CliError> {
    let d = periodic_demo(modes, p)?;
    println!("periodic model: N = {modes}, dimension {}", 2 * modes + 1);
    println!("weak-L{p} norm of (1 + D0^2)^(-1/2): {:.6}", d.weak_norm);
    println!("Schatten-1 norm of (1 + D0^2)^(-1/2): {:.6}", d.trace_norm);
    println!(
        "weak-L{p} norm of (1 + D^2)^(-1/2), D = D0 + V: {:.6}",
        d.weak_norm_perturbed
    );
    println!(
        "cor22: lhs {:.6e}, rhs {:.6e}, ratio {:.4}, constant {:.4}, {}",
        d.report.lhs,
        d.report.rhs,
        d.report.ratio,
        d.report.constant_used,
        if d.report.pass { "PASS" } else { "FAIL" }
    );
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let text = serde_json::to_string_pretty(&d).map_err(|e| CliError::Io(e.to_string()))?;
        let path = dir.join("demo_periodic.json");
        std::fs::write(&path, text + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(if d.report.pass { 0 } else { 1 })
}

fn profiles(flags: Flags) -> Result<i32, CliError> {
    let mut merged = flags.merged(None)?;
    // Only the order curve draws random numbers; seed 0 unless given.
    let norm = match merged.norm.as_deref() {
        Some(s) => s
            .parse::<NormSpec>()
            .map_err(|e| CliError::Config(e.to_string()))?,
        None => NormSpec::Schatten(1.0),
    };
    let cfg = ProfileConfig {
        seed: merged.seed.unwrap_or(0),
        n: merged.n.unwrap_or(6),
        norm,
        theta: merged.theta.unwrap_or(0.5),
        quick: merged.quick.unwrap_or(false),
        out: merged.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
    };
    if cfg.n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    for path in emit_profiles(&cfg)? {
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { target, flags } => verify(target, flags),
        Command::Demo {
            which: Demo::Periodic { modes, p, out },
        } => demo(modes, p, out),
        Command::Profiles { flags } => profiles(flags),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
