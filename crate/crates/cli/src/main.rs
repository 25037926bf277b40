use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use congest_tri::config::{parse_key_values, parse_override, RouteMode};
use congest_tri::experiment::{parse_seeds, parse_sizes, replay, run_experiment, ExperimentConfig};
use congest_tri::generators::{generate, GeneratorSpec};
use congest_tri::graph::has_triangle;
use congest_tri::io::{parse_graph, write_graph};
use congest_tri::Constants;

#[derive(Parser)]
#[command(name = "congest-tri", version, about = "Distributed triangle detection simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep generated instances, compare against the oracle and write reports.
    Run {
        #[arg(long, default_value = "uniform:0.05")]
        generator: String,
        /// Comma-separated sizes; `2^k` allowed.
        #[arg(long, default_value = "64,128")]
        sizes: String,
        /// `a..b` or a comma-separated list.
        #[arg(long, default_value = "0..3")]
        seeds: String,
        #[arg(long)]
        mode: Option<RouteMode>,
        /// Constant override `key=value`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// `key = value` file applied after the flags.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-run the pipeline on a stored graph.
    Replay {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        mode: Option<RouteMode>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the ledger as CSV.
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Write one generated graph.
    Generate {
        #[arg(long)]
        generator: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn apply_constants(
    constants: &mut Constants,
    mode: Option<RouteMode>,
    overrides: &[String],
    config: Option<&PathBuf>,
) -> Result<Vec<(String, String)>> {
    if let Some(m) = mode {
        constants.route_mode = m;
    }
    for o in overrides {
        let (k, v) = parse_override(o)?;
        constants.set(&k, &v).with_context(|| format!("--set {o}"))?;
    }
    let mut rest = Vec::new();
    if let Some(path) = config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for (_, k, v) in parse_key_values(&text)? {
            rest.push((k, v));
        }
    }
    Ok(rest)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            generator,
            sizes,
            seeds,
            mode,
            overrides,
            out,
            config,
        } => {
            let mut cfg = ExperimentConfig {
                generator: generator.parse::<GeneratorSpec>()?,
                sizes: parse_sizes(&sizes)?,
                seeds: parse_seeds(&seeds)?,
                out_dir: out,
                ..ExperimentConfig::default()
            };
            for (k, v) in apply_constants(&mut cfg.constants, mode, &overrides, config.as_ref())? {
                cfg.set(&k, &v).with_context(|| format!("config key `{k}`"))?;
            }
            let report = run_experiment(&cfg)?;
            let agree = report.records.iter().filter(|r| r.agrees()).count();
            println!("instances={} agree={}", report.records.len(), agree);
            for r in report.records.iter().filter(|r| !r.agrees()) {
                println!(
                    "disagreement n={} seed={} expected={} found={:?} error={}",
                    r.n,
                    r.seed,
                    r.expected,
                    r.found,
                    r.error.as_deref().unwrap_or("")
                );
            }
            print!("{}", report.fit_text());
            Ok(if report.all_agree() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Replay {
            graph,
            seed,
            mode,
            overrides,
            config,
            ledger,
        } => {
            let text = fs::read_to_string(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let g = parse_graph(&text)?;
            let mut constants = Constants::default();
            for (k, v) in apply_constants(&mut constants, mode, &overrides, config.as_ref())? {
                constants.set(&k, &v)?;
            }
            constants.validate()?;
            let out = replay(&g, seed, &constants)?;
            let expected = has_triangle(&g);
            println!(
                "found={} oracle={} total_rounds={}",
                out.found,
                expected,
                out.ledger.total()
            );
            for (phase, rounds) in out.ledger.phase_totals() {
                println!("{phase}\t{rounds}");
            }
            for note in out.ledger.notes() {
                println!("note: {note}");
            }
            if let Some(path) = ledger {
                fs::write(&path, out.ledger.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(if out.found == expected {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Generate {
            generator,
            n,
            seed,
            out,
        } => {
            let spec: GeneratorSpec = generator.parse()?;
            let g = generate(&spec, n, seed)?;
            let text = write_graph(&g);
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
