use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ee_response::runner::{run_scenario, ScenarioConfig};
use ee_response::Error;

#[derive(Parser)]
#[command(name = "ee-response", version, about = "Entanglement-entropy response experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifacts.
    Run {
        config: PathBuf,
        /// Output directory; overrides `out_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = one per core).
        #[arg(long, env = "EE_RESPONSE_THREADS")]
        threads: Option<usize>,
    },
    /// Check a config and print it with every default filled in.
    Validate { config: PathBuf },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Validate { config } => match ScenarioConfig::from_path(&config) {
            Ok(cfg) => {
                print!("{}", cfg.effective_file());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Run { config, out, threads } => {
            let cfg = match ScenarioConfig::from_path(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    return fail(&Error::Config(format!("thread pool: {e}")));
                }
            }
            match run_scenario(&cfg, out.as_deref()) {
                Ok(report) => {
                    for f in &report.files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
