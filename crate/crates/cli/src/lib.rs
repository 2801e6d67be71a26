//! Spec-file driver for `foliation-core`.

pub mod expr;
pub mod report;
pub mod runner;
pub mod spec;

use std::path::Path;

pub use report::{emit_json, emit_text, parse_report, Report};
pub use spec::{load_spec, parse_spec, SpecError, SpecFile};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const SPEC_ERROR: i32 = 1;
    pub const TASK_FAILURE: i32 = 2;
}

/// Seed used when neither the command line nor the spec gives one.
pub use foliation_core::sampling::DEFAULT_SEED;

/// Loads and runs `path`, writing `report.json` and requested CSVs into
/// `out_dir`. `seed` overrides the spec's own seed.
pub fn run_spec(path: &Path, seed: Option<u64>, out_dir: &Path) -> Result<Report, SpecError> {
    let spec = load_spec(path)?;
    let seed = seed.or(spec.seed).unwrap_or(DEFAULT_SEED);
    let (report, files) = runner::run(&spec, seed);
    let io = |e: std::io::Error| SpecError::Io {
        path: out_dir.display().to_string(),
        msg: e.to_string(),
    };
    std::fs::create_dir_all(out_dir).map_err(io)?;
    std::fs::write(out_dir.join("report.json"), emit_json(&report)).map_err(io)?;
    for (name, text) in files {
        std::fs::write(out_dir.join(name), text).map_err(io)?;
    }
    Ok(report)
}
