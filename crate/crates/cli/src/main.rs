use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use mhd_core::diagnostics::totals;
use mhd_core::io::{self, parse_config, read_snapshot, ConfigError, RunConfig, RunFailure};
use mhd_core::rhs::max_abs_divergence;

#[derive(Parser)]
#[command(name = "mhd4", version, about = "Fourth-order constrained-transport MHD solver")]
struct Cli {
    /// Worker threads; overrides the config value (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration to its end time.
    Run { config: PathBuf },
    /// Run a configuration at several resolutions and print the EOC table.
    Converge {
        config: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        resolutions: Vec<usize>,
    },
    /// Print the header and summary statistics of a snapshot.
    Info { snapshot: PathBuf },
}

fn load(path: &Path) -> Result<RunConfig, RunFailure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Unreadable { path: path.display().to_string(), message: e.to_string() })?;
    Ok(parse_config(&text)?)
}

fn set_threads(n: usize) {
    if n > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            error!("could not size the thread pool: {e}");
        }
    }
}

fn info(path: &Path) -> Result<(), RunFailure> {
    let (h, grid, state) = read_snapshot::<f64>(path)?;
    println!("problem   {}", h.problem);
    println!("scheme    {}", h.scheme);
    println!("n         {} {} {}", h.n[0], h.n[1], h.n[2]);
    println!("time      {}", h.time);
    println!("step      {}", h.step);
    println!("eos       {:?}", h.eos);
    let t = totals(&grid, &state, &h.eos);
    println!("mass      {:.12e}", t.mass);
    println!("momentum  {:.6e} {:.6e} {:.6e}", t.momentum[0], t.momentum[1], t.momentum[2]);
    println!("energy    {:.12e}", t.energy);
    println!("rho       [{:.6e}, {:.6e}]", t.rho_min, t.rho_max);
    println!("max mach  {:.4}", t.max_mach);
    println!("max |divB| {:.3e}", max_abs_divergence(&grid, &state.faces));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => load(&config).and_then(|cfg| {
            set_threads(cli.threads.unwrap_or(cfg.threads));
            let s = io::run(&cfg)?;
            println!("completed {} steps to t = {}; ledger {}", s.steps, s.t, s.ledger_file.display());
            Ok(())
        }),
        Command::Converge { config, resolutions } => load(&config).and_then(|cfg| {
            set_threads(cli.threads.unwrap_or(cfg.threads));
            let table = io::convergence_suite(&cfg, &resolutions)?;
            print!("{}", table.text());
            Ok(())
        }),
        Command::Info { snapshot } => {
            set_threads(cli.threads.unwrap_or(0));
            info(&snapshot)
        }
    };
    match result {
        Ok(()) => ExitCode::from(io::EXIT_OK as u8),
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
