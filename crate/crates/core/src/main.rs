use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use fuplab::config::parse_config;
use fuplab::run::{manifest, run};

/// Run one fuplab experiment from a TOML config.
#[derive(Parser, Debug)]
#[command(name = "fuplab", version)]
struct Opt {
    /// Experiment config (TOML, schema = 1).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Only validate the config.
    #[arg(long)]
    check: bool,
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_COMPUTATION: u8 = 3;

fn write_all(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let opt = Opt::parse();
    let text = match fs::read_to_string(&opt.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", opt.config.display());
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(diags) => {
            for d in &diags {
                eprintln!("invalid: {d}");
            }
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    if let Some(seed) = opt.seed {
        config.seed = seed;
    }
    if opt.check {
        println!("config ok");
        return ExitCode::SUCCESS;
    }
    if opt.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(opt.threads).build_global() {
            eprintln!("warning: thread pool already initialised: {e}");
        }
    }

    let result = run(&config);
    let m = manifest(&config, result.as_ref());
    let mut files = match &result {
        Ok(out) => out.files.clone(),
        Err(e) => vec![(
            "error.json".to_string(),
            serde_json::to_string_pretty(&serde_json::json!({"status": "failed", "error": e.to_string()}))
                .unwrap_or_default()
                + "\n",
        )],
    };
    files.push((
        "manifest.json".to_string(),
        serde_json::to_string_pretty(&m).unwrap_or_default() + "\n",
    ));
    if let Err(e) = write_all(&opt.out, &files) {
        eprintln!("error: cannot write outputs to {}: {e}", opt.out.display());
        return ExitCode::from(EXIT_COMPUTATION);
    }
    match result {
        Ok(out) => {
            println!("{}: {}", config.command.as_str(), m["status"].as_str().unwrap_or("ok"));
            if let Some(reason) = m.get("reason").and_then(|r| r.as_str()) {
                println!("{reason}");
            }
            ExitCode::from(out.outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_COMPUTATION)
        }
    }
}
