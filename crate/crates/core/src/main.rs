//! `swarm` command-line driver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use swarm_core::experiments::config::ScenarioConfig;
use swarm_core::experiments::output::write_run;
use swarm_core::experiments::sweep::{compare_planners, named_grid, parse_values, preset, run_sweep, SweepRun};
use swarm_core::experiments::{run_scenario, summarize};
use swarm_core::Error;

#[derive(Parser)]
#[command(name = "swarm", version, about = "Decentralized UAV swarm experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV files.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scenario over a list of values of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Dotted field path, e.g. `fusion.m` or `swarm.neighborhood_threshold`.
        #[arg(long)]
        param: String,
        /// Comma-separated values, or `@name` for a built-in grid
        /// (m, m_fine, edge_prob, alpha, threshold, degree, edges).
        #[arg(long)]
        values: String,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the decentralized and centralized planners on matched seeds.
    Compare {
        #[arg(long, value_enum)]
        mode: CompareMode,
        /// Scenario file; defaults to the bundled circle or single-target preset.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareMode {
    Formation,
    Tracking,
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn execute(cli: Cli) -> swarm_core::Result<()> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let mut cfg = ScenarioConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
                cfg.validate()?;
            }
            let rec = run_scenario(&cfg)?;
            write_run(&out, &cfg, &rec)?;
            let s = summarize(&rec, cfg.formation.arrival_tol);
            println!("wrote {}", out.display());
            if let Some(t) = &s.tc {
                println!("Tc = {:.3} ms (std {:.3})", t.mean_ms, t.std_ms);
            }
            if rec.destinations.is_some() {
                match s.tf_s {
                    Some(tf) => println!("Tf = {tf:.1} s"),
                    None => println!("Tf = never (formation not reached)"),
                }
            }
            if let Some((min, mean)) = s.pairwise {
                println!("pairwise distance: min {min:.2} m, mean {mean:.2} m");
            }
            if let Some(e) = s.avg_err {
                println!("average squared tracking error = {e:.4}");
            }
        }
        Command::Sweep { config, param, values, repeats, out } => {
            let cfg = ScenarioConfig::from_file(&config)?;
            let values = match values.strip_prefix('@') {
                Some(name) => named_grid(name).ok_or_else(|| {
                    swarm_core::experiments::ConfigError::Parse(format!("unknown grid `{name}`"))
                })?,
                None => parse_values(&values)?,
            };
            let runs = run_sweep(&cfg, &param, &values, repeats, Some(&out))?;
            report(&runs);
            println!("wrote {}", out.display());
        }
        Command::Compare { mode, config, repeats, out } => {
            let cfg = match (config, mode) {
                (Some(p), _) => ScenarioConfig::from_file(&p)?,
                (None, CompareMode::Formation) => preset("formation_circle")?,
                (None, CompareMode::Tracking) => preset("tracking_single")?,
            };
            let runs = compare_planners(&cfg, repeats, Some(&out))?;
            report(&runs);
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn report(runs: &[SweepRun]) {
    for r in runs {
        let s = &r.summary;
        let mut line = format!("{:>14} rep {:>2}", r.value.to_string(), r.repeat);
        if let Some(t) = &s.tc {
            line += &format!("  Tc {:8.3} ms", t.mean_ms);
        }
        if let Some(tf) = s.tf_s {
            line += &format!("  Tf {tf:6.1} s");
        }
        if let Some((min, mean)) = s.pairwise {
            line += &format!("  pair {min:6.2}/{mean:6.2} m");
        }
        if let Some(e) = s.avg_err {
            line += &format!("  err {e:10.4}");
        }
        println!("{line}");
    }
}
