use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qrm_core::analytic::{Frame, Observable};
use qrm_core::error::{EXIT_CHECK_FAILURE, EXIT_INVALID_CONFIG};
use qrm_core::experiment::{run_experiment, ExperimentConfig, OutputKind};
use qrm_core::figures::{reproduce_figures, MANIFEST_NAME};
use qrm_core::output::{to_csv_string, to_svg_string, write_file};
use qrm_core::verify::{verify_suite, Tolerances};
use qrm_core::{QrmError, Result};

#[derive(Parser)]
#[command(
    name = "qrm",
    version,
    about = "Exact JC/AJC dynamics of the quantum Rabi model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form observables on a time grid.
    Evolve(EvolveArgs),
    /// Write the fourteen reference figures (CSV + SVG) and a manifest.
    Figures {
        #[arg(long, default_value = "figures")]
        outdir: PathBuf,
    },
    /// Run the invariant and oracle checks and print a table.
    Verify {
        /// Override every tolerance with this value.
        #[arg(long)]
        tol: Option<f64>,
        /// Override the oracle truncation.
        #[arg(long)]
        nmax: Option<usize>,
    },
}

#[derive(Args)]
struct EvolveArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    frame: Option<Frame>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Observable plotted in the SVG.
    #[arg(long, default_value = "atomic_excitation")]
    column: String,
    /// Prefix the CSV with a `# config {json}` line.
    #[arg(long)]
    echo_config: bool,
}

impl EvolveArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| QrmError::Io {
                    path: path.clone(),
                    source: e,
                })?;
                ExperimentConfig::from_json(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.frame {
            c.frame = v;
        }
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = self.xi {
            c.xi = v;
        }
        if let Some(v) = self.eps {
            c.epsilon = v;
        }
        if let Some(v) = self.g {
            c.g = v;
        }
        if let Some(v) = self.tau_max {
            c.tau_max = v;
        }
        if let Some(v) = self.steps {
            c.steps = v;
        }
        if self.nmax.is_some() {
            c.n_max = self.nmax;
        }
        if self.svg.is_some() && !c.outputs.contains(&OutputKind::Svg) {
            c.outputs.push(OutputKind::Svg);
        }
        c.validate()?;
        Ok(c)
    }
}

fn evolve(args: &EvolveArgs) -> Result<()> {
    let config = args.config()?;
    let column = Observable::parse(&args.column)?;
    let bundle = run_experiment(&config)?;
    let csv = to_csv_string(&bundle, args.echo_config);
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| QrmError::Io {
                path: PathBuf::from("<stdout>"),
                source: e,
            })?,
    }
    if let Some(path) = &args.svg {
        write_file(path, &to_svg_string(&bundle, column))?;
    }
    Ok(())
}

fn figures(outdir: &Path) -> Result<()> {
    let outputs = reproduce_figures(outdir)?;
    for o in &outputs {
        println!(
            "{}  {:<3} n={:<2} {:<17} {}",
            o.spec.id,
            o.spec.frame.as_str(),
            o.spec.n,
            o.spec.column.name(),
            o.csv_path.display()
        );
    }
    println!("manifest: {}", outdir.join(MANIFEST_NAME).display());
    Ok(())
}

fn verify(tol: Option<f64>, nmax: Option<usize>) -> std::result::Result<(), i32> {
    let tolerances = match tol {
        Some(t) if t.is_finite() && t > 0.0 => Tolerances::uniform(t),
        Some(_) => {
            eprintln!("error: invalid config field `tol`: must be finite and > 0");
            return Err(EXIT_INVALID_CONFIG);
        }
        None => Tolerances::default(),
    };
    let started = std::time::Instant::now();
    let report = verify_suite(&tolerances, nmax);
    println!("{report}");
    println!("wall time {:.2} s", started.elapsed().as_secs_f64());
    if report.passed() {
        Ok(())
    } else {
        Err(EXIT_CHECK_FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Evolve(args) => evolve(args).map_err(report_error),
        Command::Figures { outdir } => figures(outdir).map_err(report_error),
        Command::Verify { tol, nmax } => verify(*tol, *nmax),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code as u8),
    }
}

fn report_error(e: QrmError) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}
