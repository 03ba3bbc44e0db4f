//! `verify`: run the verification suites and write a report.
//!
//! Exit status is 0 when every check passes, 1 when any fails and 2 on a
//! configuration or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use strato_moyal::exec::configure_threads_from_env;
use strato_moyal::report::{emit_report, export_artifacts, load_config, run_suites, Suite};

#[derive(Parser, Debug)]
#[command(name = "verify", version, about = "Run the strato-moyal verification suites")]
struct Args {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Run only these suites (repeatable); overrides the config list.
    #[arg(long = "suite", value_name = "NAME")]
    suites: Vec<String>,
    /// Report path; defaults to the config's output_path or report.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override mc.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write plot-ready CSVs into this directory.
    #[arg(long, value_name = "DIR")]
    export: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(args: Args) -> Result<bool, String> {
    configure_threads_from_env()?;
    let mut cfg = load_config(&args.config).map_err(|e| e.to_string())?;
    if !args.suites.is_empty() {
        cfg.suites = args.suites.iter().map(|s| Suite::parse(s)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    }
    if let Some(seed) = args.seed {
        cfg.mc.seed = seed;
    }
    cfg.validate().map_err(|e| e.to_string())?;

    let out = args.out.or_else(|| cfg.output_path.clone()).unwrap_or_else(|| PathBuf::from("report.json"));
    let report = run_suites(&cfg);
    let summary = emit_report(&report, &out).map_err(|e| e.to_string())?;
    if let Some(dir) = &args.export {
        export_artifacts(&cfg, dir).map_err(|e| e.to_string())?;
    }

    let failed: Vec<_> = report.failures().collect();
    println!(
        "{}/{} checks passed; report {} (summary {})",
        report.records.len() - failed.len(),
        report.records.len(),
        out.display(),
        summary.display()
    );
    for r in &failed {
        println!("FAIL {}/{}: residual {:e} vs {:e}", r.suite, r.check_id, r.residual, r.tolerance);
    }
    Ok(failed.is_empty())
}
