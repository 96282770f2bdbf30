use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use avglink::instances::generate;
use avglink::io::load_source;
use avglink::oracle::verify_bounds;
use avglink::{bench, LinkageRule, Norm};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "avglink", version, about = "Linkage clustering lab: instances, bound checks, benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a catalog instance and its expectations file
    Gen {
        /// Generator name
        name: String,
        /// Generator parameters as key=value
        #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also evaluate every expectation and fail if one does not hold
        #[arg(long)]
        check: bool,
    },
    /// Brute-force optimum checks
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Run a benchmark matrix from a TOML config
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Check the approximation bounds of a linkage cut against exact optima
    Verify {
        /// Feature CSV or condensed distance matrix
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Norm for feature CSV input
        #[arg(long, default_value = "l2")]
        norm: Norm,
        #[arg(long, default_value = "average")]
        rule: LinkageRule,
    },
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, String>, String> {
    raw.iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| format!("expected key=value, got {p:?}"))
        })
        .collect()
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Gen { name, params, out, check } => {
            let bundle = generate(&name, &parse_params(&params)?)?;
            let (source, expect) = bundle.write_to(&out)?;
            println!("wrote {} (n = {})", source.display(), bundle.source.n());
            println!("wrote {}", expect.display());
            if check {
                let outcomes = bundle.check()?;
                for o in &outcomes {
                    println!("{o}");
                }
                return Ok(outcomes.iter().all(|o| o.passed));
            }
            Ok(true)
        }
        Command::Oracle { command: OracleCommand::Verify { input, k, norm, rule } } => {
            let src = load_source(&input, norm)?;
            let report = verify_bounds(&src, k, rule)?;
            print!("{}", report.render_table());
            Ok(report.passed())
        }
        Command::Bench { config, out } => {
            let (run, table, outputs) = bench::run_config(&config, &out)?;
            print!("{}", table.to_markdown());
            for f in &run.failures {
                eprintln!("failed: {} ({}): {}", f.dataset, f.stage, f.message);
            }
            println!("wrote {}", outputs.records.display());
            println!("wrote {}", outputs.table_csv.display());
            println!("wrote {}", outputs.table_md.display());
            Ok(run.failures.is_empty())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
