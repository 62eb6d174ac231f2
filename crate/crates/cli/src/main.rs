use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use wss_core::experiments::{parse_config, run_all, write_csv, write_grid_csv, FunctionSpec};
use wss_core::{selftest, WssError};

#[derive(Parser)]
#[command(name = "wss", version, about = "Walsh summability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a config file and write one CSV report.
    Run {
        config: PathBuf,
        /// Output directory; the report is written as `<config-stem>.csv`.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Seed for every experiment, overriding per-section seeds.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the built-in oracle suites.
    Selftest,
    /// Generate a function from a spec such as `walsh-tensor:3,6@B=4`.
    Gen {
        spec: String,
        /// Write the samples as CSV.
        #[arg(long)]
        dump: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Destination file for `--dump` (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(config: PathBuf, out: PathBuf, threads: Option<usize>, seed: Option<u64>) -> anyhow::Result<()> {
    let text = fs::read_to_string(&config)
        .with_context(|| format!("reading {}", config.display()))?;
    let cfgs = parse_config(&text)?;
    if cfgs.is_empty() {
        bail!(WssError::Usage(format!("{} defines no experiments", config.display())));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()?;
    let reports = pool.install(|| run_all(&cfgs, seed))?;

    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let stem = config
        .file_stem()
        .map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    let path = out.join(format!("{stem}.csv"));
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(&reports, io::BufWriter::new(file))?;

    for r in &reports {
        match r.family_constant() {
            Some(c) => println!("{}: {} run(s), constant {c:.6e}", r.experiment, r.runs.len()),
            None => println!("{}: {} run(s)", r.experiment, r.runs.len()),
        }
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn gen(spec: &str, dump: bool, seed: u64, out: Option<PathBuf>) -> anyhow::Result<()> {
    let spec: FunctionSpec = spec.parse()?;
    let f = spec.generate(seed)?;
    if dump {
        match out {
            Some(path) => {
                let file = fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                write_grid_csv(&f, io::BufWriter::new(file))?;
            }
            None => write_grid_csv(&f, io::stdout().lock())?,
        }
        return Ok(());
    }
    let samples = match f.as_1d() {
        Some(g) => g.samples(),
        None => f.as_2d().expect("1D or 2D").samples(),
    };
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("spec   {spec}");
    println!("seed   {}", spec.effective_seed(seed));
    println!("cells  {}", samples.len());
    println!("range  [{min:.6e}, {max:.6e}]");
    Ok(())
}

fn selftest() -> anyhow::Result<bool> {
    let mut stdout = io::stdout().lock();
    let mut all = true;
    for c in selftest::run_all() {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        writeln!(stdout, "{tag}  {}  ({})", c.name, c.detail)?;
        all &= c.passed;
    }
    Ok(all)
}

fn is_usage(err: &anyhow::Error) -> bool {
    matches!(
        err.downcast_ref::<WssError>(),
        Some(WssError::Usage(_) | WssError::Parse { .. } | WssError::Config { .. })
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            threads,
            seed,
        } => run(config, out, threads, seed).map(|_| true),
        Command::Selftest => selftest(),
        Command::Gen {
            spec,
            dump,
            seed,
            out,
        } => gen(&spec, dump, seed, out).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_usage(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
