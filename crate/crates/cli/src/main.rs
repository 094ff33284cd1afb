use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use povmw::tasks::{RegionTask, TargetSet};
use povmw_cli::commands::{
    cmd_bound, cmd_boxworld, cmd_feasible, cmd_region, cmd_simulate, BoundArgs, BoxworldArgs,
    FeasibleArgs, TargetArg,
};

#[derive(Parser)]
#[command(
    name = "povmw",
    version,
    about = "Detection tasks for non-projective measurements"
)]
struct Cli {
    /// Directory for report.json and CSV/SVG outputs.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Restart count (default 256 for bounds, 512 for feasibility).
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Born-rule correlation, payoff and target membership for a scenario file.
    Simulate { scenario: PathBuf },
    /// Classical bound of a task.
    Bound {
        task: String,
        /// Also run the exhaustive lattice oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 10)]
        resolution: usize,
    },
    /// Classical feasibility of a target correlation.
    Feasible {
        /// Named target set (T1_223, T2_223, T1_224, T2_224, T_235_SYM, T_PR).
        #[arg(long, conflicts_with_all = ["target", "csv"])]
        set: Option<String>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        p1: Option<f64>,
        /// `uniformN` or an inline table such as "0 1/6 1/6; 1/6 0 1/6; 1/6 1/6 0".
        #[arg(long, conflicts_with = "csv")]
        target: Option<String>,
        /// Correlation CSV as written by `simulate`.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        identical: bool,
        /// Two canonical qubit copies with a shared 4 → 3 map.
        #[arg(long)]
        adaptive: bool,
        #[arg(long)]
        canonical: bool,
    },
    /// Mutual-information regions for task 223 or 224.
    Region {
        task: u32,
        #[arg(long, default_value_t = 401)]
        points: usize,
    },
    /// Box-world example scan, sharp-simulable bound and PR-model maximum.
    Boxworld {
        #[arg(long, default_value_t = 10_001)]
        scan_points: usize,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let report = match cli.command {
        Command::Simulate { scenario } => cmd_simulate(&scenario, Some(&cli.out))?,
        Command::Bound {
            task,
            oracle,
            resolution,
        } => cmd_bound(
            &BoundArgs {
                task,
                oracle,
                resolution,
                seed: cli.seed,
                restarts: cli.restarts.unwrap_or(256),
            },
            &cli.out,
        )?,
        Command::Feasible {
            set,
            x,
            p,
            eps,
            p1,
            target,
            csv,
            d,
            identical,
            adaptive,
            canonical,
        } => {
            let target = match (set, target, csv) {
                (Some(id), _, _) => TargetArg::Set(TargetSet::parse(&id, x, p, eps, p1)?),
                (_, Some(t), _) if t.starts_with("uniform") => TargetArg::Named(t),
                (_, Some(t), _) => TargetArg::Inline(t),
                (_, _, Some(path)) => TargetArg::Csv(path),
                _ => bail!("one of --set, --target or --csv is required"),
            };
            cmd_feasible(
                &FeasibleArgs {
                    target,
                    d,
                    identical,
                    adaptive,
                    canonical,
                    seed: cli.seed,
                    restarts: cli.restarts.unwrap_or(512),
                },
                &cli.out,
            )?
        }
        Command::Region { task, points } => {
            cmd_region(RegionTask::from_code(task)?, points, &cli.out)?
        }
        Command::Boxworld { scan_points } => cmd_boxworld(
            &BoxworldArgs {
                seed: cli.seed,
                restarts: cli.restarts.unwrap_or(256),
                scan_points,
            },
            &cli.out,
        )?,
    };
    // A closed stdout (e.g. piped into `head`) is not an error.
    let mut stdout = std::io::stdout().lock();
    for line in &report.summary {
        let _ = writeln!(stdout, "{line}");
    }
    let _ = writeln!(stdout, "report: {}", cli.out.join("report.json").display());
    Ok(())
}
