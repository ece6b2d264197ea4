use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use cfnet::config::RunConfig;
use cfnet::estimate;
use cfnet::experiment::{run_experiment, ExperimentKind, ExperimentSpec};
use cfnet::validate::run_validation;
use cfnet::HarnessError;
use cfnet_core::topology::sample_network;
use cfnet_core::{ChannelRealization, UserScope};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "cfnet",
    version,
    about = "Ergodic rate estimation for clustered cell-free networks"
)]
struct Cli {
    /// Overrides the config seed (takes precedence over CFNET_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Sere,
    Mc,
}

#[derive(Subcommand)]
enum Command {
    /// Print the topology and large-scale profile of one network as JSON.
    Generate {
        #[arg(long)]
        config: PathBuf,
        /// Network realization index.
        #[arg(long, default_value_t = 0)]
        index: u64,
        /// Also write fading draw 0 of this network as a binary dump.
        #[arg(long)]
        dump_channel: Option<PathBuf>,
    },
    /// Print per-user and mean rates as JSON.
    Estimate {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a figure-family sweep and write `<fig>.csv` plus SVG charts.
    Sweep {
        /// fig2, fig3, fig4 or fig5 (or the kind name).
        #[arg(long)]
        experiment: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Leave `time_s` empty so that the CSV is byte-reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Run the property checks on one scenario.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Validation,
    BadInput(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_bad_input() {
            Failure::BadInput(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

impl From<cfnet_core::Error> for Failure {
    fn from(e: cfnet_core::Error) -> Self {
        HarnessError::from(e).into()
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(path)?;
    cfg.apply_seed_override(seed)?;
    Ok(cfg)
}

fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.into()))?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("thread pool")
            .map_err(Failure::Runtime)?;
    }
    match cli.command {
        Command::Generate {
            config,
            index,
            dump_channel,
        } => {
            let cfg = load(&config, cli.seed)?;
            let net = sample_network(&cfg.network, index)?;
            if let Some(path) = dump_channel {
                let ch = ChannelRealization::keyed(&net.profile, cfg.network.seed, index, 0, |_, _| true);
                let file = std::fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
                cfnet::dump::write_channel(&ch, std::io::BufWriter::new(file))
                    .map_err(|e| HarnessError::io(&path, e))?;
            }
            print_json(&json!({
                "seed": cfg.network.seed,
                "index": index,
                "resamples": net.resamples,
                "topology": net.topology,
                "profile": net.profile,
            }))
        }
        Command::Estimate { method, config } => {
            let cfg = load(&config, cli.seed)?;
            let n = &cfg.network;
            let mut networks = Vec::new();
            let mut total = 0.0;
            for index in 0..n.network_realizations as u64 {
                let net = sample_network(n, index)?;
                let c = net.topology.central_index;
                let (per_user, seconds) = match method {
                    Method::Mc => {
                        let r = estimate::monte_carlo(n, &net, index, UserScope::All, n.mc_realizations)?;
                        (r.value.per_user, r.seconds)
                    }
                    Method::Sere => {
                        let r = estimate::sere(n, &net)?;
                        let rate = &r.value.1;
                        ((0..rate.per_user.len()).map(|m| rate.rates(m)).collect(), r.seconds)
                    }
                };
                let means: Vec<f64> = per_user
                    .iter()
                    .map(|u| u.iter().sum::<f64>() / u.len() as f64)
                    .collect();
                total += means[c];
                networks.push(json!({
                    "index": index,
                    "central_subnetwork": c,
                    "central_mean_rate": means[c],
                    "subnetwork_mean_rates": means,
                    "per_user": per_user,
                    "time_s": seconds,
                }));
            }
            print_json(&json!({
                "method": match method { Method::Mc => "mc", Method::Sere => "sere" },
                "seed": n.seed,
                "mean_rate": total / n.network_realizations as f64,
                "networks": networks,
            }))
        }
        Command::Sweep {
            experiment,
            config,
            out,
            no_timing,
        } => {
            let kind: ExperimentKind = experiment.parse()?;
            let cfg = load(&config, cli.seed)?;
            let mut spec = ExperimentSpec::from_config(kind, &cfg);
            if no_timing {
                spec.record_timing = false;
            }
            spec.validate()?;
            let rows = run_experiment(&spec, Some(&out))?;
            log::info!("{} rows written to {}", rows.len(), out.display());
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load(&config, cli.seed)?;
            let checks = run_validation(&cfg.network)?;
            let mut failed = false;
            for c in &checks {
                let status = match (c.passed, c.advisory) {
                    (true, _) => "PASS",
                    (false, true) => "WARN",
                    (false, false) => "FAIL",
                };
                let detail = if c.detail.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", c.detail)
                };
                println!("{status} {}{detail}", c.name);
                failed |= c.failed();
            }
            if failed {
                Err(Failure::Validation)
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::BadInput(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
