use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use star_ris::link::watts_to_dbm;
use star_ris::realize_channels;
use star_ris_sim::experiment::solve_schemes;
use star_ris_sim::output::{format_watts, write_all};
use star_ris_sim::{run_experiment, run_verify, seed, ExperimentConfig, VerifyOptions};

#[derive(Parser)]
#[command(name = "starsim", version, about = "STAR-RIS transmit-power sweeps and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sweep and write results, plot data and a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve every configured scheme on one channel realization.
    Single {
        #[arg(long)]
        config: PathBuf,
        /// Seed of the channel draw.
        #[arg(long)]
        seed: u64,
        /// Element count; defaults to the first entry of `n_values`.
        #[arg(long)]
        n: Option<usize>,
        /// Rate profile name; defaults to the first profile.
        #[arg(long)]
        profile: Option<String>,
        /// Print the per-element coefficients of every scheme.
        #[arg(long)]
        dump_coefficients: bool,
    },
    /// Run the property battery; exits nonzero if any check fails.
    Verify {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_coupling_fault: Option<usize>,
    },
}

fn run(config: PathBuf, out: Option<PathBuf>) -> Result<()> {
    let cfg = ExperimentConfig::load(&config)?;
    let dir = match out.or_else(|| cfg.output_dir.clone()) {
        Some(d) => d,
        None => bail!(
            "no output directory: pass --out or set output_dir in {}",
            config.display()
        ),
    };
    let result = run_experiment(&cfg)?;
    let paths = write_all(&cfg, &result, &dir)?;
    eprintln!("{} rows, {} excluded", result.rows.len(), result.excluded());
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn single(config: PathBuf, channel_seed: u64, n: Option<usize>, profile: Option<String>, dump: bool) -> Result<()> {
    let cfg = ExperimentConfig::load(&config)?;
    let n = n.unwrap_or(cfg.n_values[0]);
    let profile = match profile {
        Some(name) => cfg
            .profiles
            .iter()
            .find(|p| p.name == name)
            .with_context(|| format!("no rate profile named `{name}`"))?,
        None => &cfg.profiles[0],
    };
    let scenario = cfg.scenario.with_elements(n);
    let ch = realize_channels::<f64, _>(&mut seed::rng(channel_seed), &scenario)?;
    let results = solve_schemes(&cfg, &ch, profile, seed::solver_seed(channel_seed, n));

    let mut out = std::io::stdout().lock();
    writeln!(out, "scheme,power_w,power_dbm,order,iterations,converged")?;
    for (scheme, r) in &results {
        match r {
            Ok(r) => writeln!(
                out,
                "{scheme},{},{},{},{},{}",
                format_watts(r.power.total_w),
                watts_to_dbm(r.power.total_w),
                r.power.order,
                r.iterations,
                r.converged
            )?,
            Err(e) => writeln!(out, "{scheme},NaN,NaN,NONE,0,false  # {e}")?,
        }
    }
    if dump {
        writeln!(out)?;
        writeln!(out, "scheme,element,beta_t,beta_r,theta_t,theta_r")?;
        for (scheme, r) in &results {
            let Ok(r) = r else { continue };
            let c = &r.coefficients;
            for k in 0..c.len() {
                writeln!(
                    out,
                    "{scheme},{k},{},{},{},{}",
                    c.beta_t[k], c.beta_r[k], c.theta_t[k], c.theta_r[k]
                )?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out } => run(config, out),
        Command::Single {
            config,
            seed,
            n,
            profile,
            dump_coefficients,
        } => single(config, seed, n, profile, dump_coefficients),
        Command::Verify {
            quick,
            seed,
            inject_coupling_fault,
        } => {
            let report = run_verify(&VerifyOptions {
                quick,
                seed,
                inject_coupling_fault,
            });
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                return ExitCode::FAILURE;
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
