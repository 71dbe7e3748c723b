use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use privpoly::Convention;
use privpoly_cli::{cmd_audit, cmd_demo, cmd_simulate, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "privpoly", version, about = "Private polynomial coded matrix multiplication")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Plain-text `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Matrix dimensions as RxSxT: A is RxS, each library matrix SxT.
    #[arg(long, global = true)]
    dims: Option<String>,
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Library size M.
    #[arg(long = "big-m", global = true)]
    big_m: Option<usize>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Evaluations of the encoded A per worker.
    #[arg(long, global = true)]
    l: Option<usize>,
    /// Desired library index, 1-based.
    #[arg(long, global = true)]
    desired: Option<usize>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// harmonic, log or log2.
    #[arg(long, global = true)]
    convention: Option<Convention>,
    #[arg(long, global = true)]
    fig: Option<u8>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one session end to end and verify the product.
    Demo,
    /// Write figure 2 or 3 as CSV.
    Simulate,
    /// Check that worker queries do not depend on the desired index.
    Audit {
        /// Use a query builder that leaks the desired index.
        #[arg(long, hide = true)]
        leaky_queries: bool,
    },
}

impl Cli {
    fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        macro_rules! over {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$field = v; })*
            };
        }
        over!(seed => seed, prime => prime, m => m, n => n, big_m => library_size, workers => workers,
              l => per_worker, desired => desired, trials => trials, convention => convention,
              fig => figure, gamma => gamma, mu => mu);
        if let Some(d) = &self.dims {
            cfg.dims = privpoly_cli::config::parse_dims(d)?;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        Ok(cfg)
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = cli.run_config()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let ok = match cli.command {
        Command::Demo => cmd_demo(&cfg, &mut out)?,
        Command::Simulate => {
            let mut err = std::io::stderr();
            if cfg.out.is_some() {
                cmd_simulate(&cfg, &mut std::io::sink(), &mut out)?;
            } else {
                cmd_simulate(&cfg, &mut out, &mut err)?;
            }
            true
        }
        Command::Audit { leaky_queries } => cmd_audit(&cfg, leaky_queries, &mut out)?,
    };
    out.flush()?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
