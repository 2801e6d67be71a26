use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use foliation_lab::{emit_json, emit_text, exit, load_spec, run_spec};

#[derive(Parser)]
#[command(name = "foliation-lab", version, about = "Run foliation analyses described by a spec file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a spec and write report.json
    Run {
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Parse and resolve a spec without running it
    Validate { spec: PathBuf },
}

fn configure_threads() {
    if let Some(n) = std::env::var("FOLIATION_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { spec } => match load_spec(&spec) {
            Ok(s) => {
                println!("ok: {} object(s), {} task(s)", s.objects.len(), s.tasks.len());
                exit::OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit::SPEC_ERROR
            }
        },
        Command::Run { spec, seed, out, format } => match run_spec(&spec, seed, &out) {
            Ok(report) => {
                match format {
                    Format::Json => print!("{}", emit_json(&report)),
                    Format::Text => print!("{}", emit_text(&report)),
                }
                if report.failed() {
                    exit::TASK_FAILURE
                } else {
                    exit::OK
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit::SPEC_ERROR
            }
        },
    };
    ExitCode::from(code as u8)
}
