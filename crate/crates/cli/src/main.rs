use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use teleid_cli::{list_text, render_json, render_text, run_check, run_verify, CliError, Outcome, RunOptions, Suite};

#[derive(Parser)]
#[command(name = "teleid", version, about = "Exact verification of telescoping and hypergeometric identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every identity id with its citation.
    List,
    /// Run built-in suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Verify an identity or recurrence defined in a config file.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Restrict to one identity or family.
    #[arg(long)]
    id: Option<String>,
    /// Largest row checked; defaults to each identity's own bound.
    #[arg(long)]
    n_max: Option<i64>,
    #[arg(long, default_value_t = teleid_cli::DEFAULT_SAMPLES)]
    samples: u32,
    #[arg(long, default_value_t = teleid_cli::DEFAULT_SEED)]
    seed: u64,
    /// Also certify elementary identities on a degree-bounded grid.
    #[arg(long)]
    grid: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            id: self.id.clone(),
            n_max: self.n_max,
            samples: self.samples,
            seed: self.seed,
            grid: self.grid,
            jobs: self.jobs,
        }
    }
}

fn finish(result: Result<Outcome, CliError>, format: Format) -> ExitCode {
    match result {
        Ok(outcome) => {
            let text = match format {
                Format::Text => render_text(&outcome),
                Format::Json => render_json(&outcome.report),
            };
            print!("{text}");
            if outcome.report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::List => {
            print!("{}", list_text());
            ExitCode::SUCCESS
        }
        Command::Verify { suite, common } => finish(run_verify(suite, &common.options()), common.format),
        Command::Check { config, common } => finish(run_check(&config, &common.options()), common.format),
    }
}
