use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biphoton_cli::{diff, scenarios, simulate, CliError, LoadedConfig, RunOptions, DEFAULT_OUT, OUT_ENV};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "biphoton", version, about = "Far-field patterns of spatially correlated photon pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or the name of a bundled scenario).
    Simulate {
        config: String,
        /// Output directory; defaults to $BIPHOTON_OUT/<output.directory>.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check the fast sums against direct summation on a 128-point window.
        #[arg(long)]
        oracle: bool,
        /// Override grid.n_x.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Compare the tabular outputs of two runs.
    Diff {
        manifest_a: PathBuf,
        manifest_b: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// List the bundled scenarios.
    ListScenarios,
}

fn load(config: &str) -> Result<LoadedConfig, CliError> {
    let path = Path::new(config);
    if path.exists() {
        return LoadedConfig::from_path(path);
    }
    match scenarios::find(config) {
        Some(b) => b.load(),
        None => Err(CliError::Parse(format!("{config}: no such file or bundled scenario"))),
    }
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            oracle,
            resolution,
        } => {
            let cfg = load(&config)?;
            let out_dir = out.unwrap_or_else(|| {
                let root = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| DEFAULT_OUT.into());
                root.join(cfg.output_directory())
            });
            let opts = RunOptions {
                out_dir: out_dir.clone(),
                oracle,
                resolution,
            };
            let m = simulate(&cfg, &opts)?;
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            for o in &m.oracle {
                println!("oracle {}: max rel {:.3e}", o.label, o.max_rel);
            }
            println!(
                "{}: {} files in {} ({:.2} s)",
                m.scenario,
                m.outputs.len() + 1,
                out_dir.display(),
                m.wall_time_s
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Diff {
            manifest_a,
            manifest_b,
            tol,
        } => {
            let report = diff(&manifest_a, &manifest_b, tol)?;
            for f in &report.files {
                println!("{}\tmax_abs {:e}\tmax_rel {:e}", f.file, f.max_abs, f.max_rel);
            }
            if report.within_tolerance() {
                Ok(ExitCode::SUCCESS)
            } else {
                println!("differences exceed tolerance {tol:e}");
                Ok(ExitCode::from(1))
            }
        }
        Command::ListScenarios => {
            for b in scenarios::BUNDLED {
                println!("{:<30} {}", b.name, b.description());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
