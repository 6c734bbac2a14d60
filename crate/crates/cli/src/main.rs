//! `dephase`: command-line front end to the dephasing library.

mod commands;
mod files;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dephasing::experiments::ExperimentConfig;
use dephasing::numerics::DEFAULT_BITS;
use dephasing::weights::WeightParams;
use dephasing::{Error, Execution, PrecisionContext};

use commands::{DephaseArgs, Outcome, ThreeSpinArgs};

/// Environment variable holding the default working precision in bits.
const BITS_ENV: &str = "DEPHASE_BITS";

#[derive(Parser, Debug)]
#[command(name = "dephase", version, about = "Weighted time averages and dephasing at high precision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the normalized weight w_{p,q}(x).
    Weight {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        /// Decimal or expression, e.g. 0.5 or 1/pi.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, env = BITS_ENV, default_value_t = DEFAULT_BITS)]
        bits: u32,
    },
    /// Run the three-spin convergence experiment.
    ThreeSpin {
        /// JSON file with experiment settings; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n_min: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
        /// Weight pairs as "p,q"; repeat the flag or separate pairs with ';'.
        #[arg(long)]
        pairs: Vec<String>,
        #[arg(long, env = BITS_ENV)]
        bits: Option<u32>,
        #[arg(long)]
        stride: Option<u64>,
        #[arg(long)]
        window_stride: Option<u64>,
        #[arg(long, default_value = "three_spin.csv")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Disable data parallelism.
        #[arg(long)]
        sequential: bool,
    },
    /// Dephasing report for a Hermitian system read from JSON files.
    Dephase {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        rho0: PathBuf,
        #[arg(long)]
        observable: PathBuf,
        /// Averaging times, comma separated.
        #[arg(long = "T", value_delimiter = ',', required = true)]
        times: Vec<String>,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, env = BITS_ENV, default_value_t = DEFAULT_BITS)]
        bits: u32,
    },
    /// Discrete kernel K_N(nu) by direct summation and by Poisson summation.
    Kernel {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(long = "N")]
        n: usize,
        /// Poisson window half-width; chosen from the decay envelope if omitted.
        #[arg(long)]
        m_terms: Option<usize>,
        #[arg(long, env = BITS_ENV, default_value_t = DEFAULT_BITS)]
        bits: u32,
    },
    /// Fourier transform of the normalized weight.
    Fourier {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Frequencies, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Vec<String>,
        /// Add the standard decay grid and fit its envelope.
        #[arg(long)]
        grid: bool,
        #[arg(long, env = BITS_ENV, default_value_t = DEFAULT_BITS)]
        bits: u32,
    },
    /// Write the three-spin Hamiltonian, initial state and observable as JSON.
    ExportModel {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, env = BITS_ENV, default_value_t = DEFAULT_BITS)]
        bits: u32,
    },
    /// Write a seeded random system with one 2-fold degeneracy as JSON.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        dim: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, env = BITS_ENV, default_value_t = DEFAULT_BITS)]
        bits: u32,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_pairs(specs: &[String]) -> Result<Vec<WeightParams>, Error> {
    let mut pairs = Vec::new();
    for spec in specs.iter().flat_map(|s| s.split(';')).filter(|s| !s.trim().is_empty()) {
        let bad = || Error::InvalidArgument(format!("pair {spec:?} is not \"p,q\""));
        let (p, q) = spec.split_once(',').ok_or_else(bad)?;
        let p: f64 = p.trim().parse().map_err(|_| bad())?;
        let q: f64 = q.trim().parse().map_err(|_| bad())?;
        pairs.push(WeightParams::new(p, q)?);
    }
    Ok(pairs)
}

fn clamp_window((lo, hi): (u64, u64), n_min: u64, n_max: u64) -> (u64, u64) {
    (lo.max(n_min), hi.min(n_max))
}

#[allow(clippy::too_many_arguments)]
fn experiment_config(
    config: Option<PathBuf>,
    n_min: Option<u64>,
    n_max: Option<u64>,
    pairs: &[String],
    bits: Option<u32>,
    stride: Option<u64>,
    window_stride: Option<u64>,
) -> Result<ExperimentConfig, Error> {
    let mut cfg = match config {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(v) = n_min {
        cfg.n_min = v;
    }
    if let Some(v) = n_max {
        cfg.n_max = v;
    }
    if n_min.is_some() || n_max.is_some() {
        // a shorter run keeps whatever part of each window it still covers
        cfg.running_window = clamp_window(cfg.running_window, cfg.n_min, cfg.n_max);
        cfg.asymptotic_window = clamp_window(cfg.asymptotic_window, cfg.n_min, cfg.n_max);
    }
    if !pairs.is_empty() {
        cfg.pairs = parse_pairs(pairs)?;
    }
    if let Some(v) = bits {
        cfg.mantissa_bits = v;
    }
    if let Some(v) = stride {
        cfg.stride = v;
    }
    if let Some(v) = window_stride {
        cfg.window_stride = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli, out: &mut dyn Write) -> Outcome {
    let ctx = |bits: u32| PrecisionContext::new(bits);
    match cli.command {
        Command::Weight { p, q, x, bits } => commands::weight(p, q, &x, &ctx(bits)?, out),
        Command::ThreeSpin {
            config,
            n_min,
            n_max,
            pairs,
            bits,
            stride,
            window_stride,
            out: path,
            format,
            sequential,
        } => {
            let config = experiment_config(config, n_min, n_max, &pairs, bits, stride, window_stride)?;
            let args = ThreeSpinArgs {
                config,
                out: path,
                json: format == Format::Json,
                exec: if sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
            };
            commands::three_spin(&args, out)
        }
        Command::Dephase {
            hamiltonian,
            rho0,
            observable,
            times,
            p,
            q,
            bits,
        } => {
            let args = DephaseArgs {
                hamiltonian: &hamiltonian,
                rho0: &rho0,
                observable: &observable,
                times: &times,
                params: (p, q),
            };
            commands::dephase(&args, &ctx(bits)?, out)
        }
        Command::Kernel {
            p,
            q,
            nu,
            n,
            m_terms,
            bits,
        } => commands::kernel((p, q), &nu, n, m_terms, &ctx(bits)?, out),
        Command::Fourier { p, q, xi, grid, bits } => commands::fourier((p, q), &xi, grid, &ctx(bits)?, out),
        Command::ExportModel { out_dir, bits } => commands::export_model(&out_dir, &ctx(bits)?, out),
        Command::Generate {
            seed,
            dim,
            out_dir,
            bits,
        } => commands::generate(seed, dim, &out_dir, &ctx(bits)?, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = out.flush();
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
