use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use minfilt_cli::{cmd_filter, cmd_plan, cmd_table, cmd_verify, InputError, Mode};

#[derive(Parser)]
#[command(name = "minfilt", version, about = "Minimal filtering kernels for short FIR filters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the kernel plan for an m-tap filter as JSON.
    Plan {
        #[arg(short = 'm', long = "taps-count")]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check kernels against the naive filter on seeded random inputs.
    Verify {
        #[arg(short = 'm', long = "taps-count", value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Verify this plan instead of generated ones.
        #[arg(long)]
        plan_file: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Filter a signal file with a taps file (one number per line).
    Filter {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        taps: PathBuf,
        #[arg(short = 'm', long = "taps-count")]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Minimal)]
        mode: Mode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the multiplier/adder complexity table as TSV.
    Table {
        #[arg(short = 'm', long = "taps-count", value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), InputError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| InputError(format!("stdout: {e}"))),
    }
}

fn run(cli: Cli) -> Result<bool, InputError> {
    match cli.command {
        Command::Plan { m, output } => emit(&cmd_plan(m)?, output.as_deref()).map(|_| true),
        Command::Verify {
            m,
            trials,
            seed,
            plan_file,
            output,
        } => {
            let plan = plan_file.as_deref().map(read).transpose()?;
            let out = cmd_verify(&m, trials, seed, plan.as_deref())?;
            emit(&out.text, output.as_deref())?;
            Ok(out.passed)
        }
        Command::Filter {
            input,
            taps,
            m,
            mode,
            output,
        } => {
            let text = cmd_filter(&read(&input)?, &read(&taps)?, m, mode)?;
            emit(&text, output.as_deref()).map(|_| true)
        }
        Command::Table { m, output } => emit(&cmd_table(&m)?, output.as_deref()).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("minfilt: {e}");
            ExitCode::from(2)
        }
    }
}
