use std::io::Write;
use std::path::{Path, PathBuf};

use dephasing::experiments::{
    check_ordering, emit_csv, emit_json, fit_json, fit_stretched, run_three_spin, series_json,
    ExperimentConfig,
};
use dephasing::models::build_three_spin;
use dephasing::numerics::{eval_expr, format40};
use dephasing::quantum::{
    diagonal_state, expectation, weighted_averaged_state_with, weighted_time_average,
    ExpectationExpansion, Observable, RandomSystem,
};
use dephasing::signals::{frequency_gap, TrigPolynomial};
use dephasing::spectral::{eigendecompose, HermitianMatrix};
use dephasing::weights::{
    eval_weight, fit_decay_envelope, kernel_kn, kernel_kn_poisson, normalize, weight_fourier,
    WeightParams, DEFAULT_ENVELOPE_GRID,
};
use dephasing::{Complex, Error, Execution, Float, PrecisionContext, Result};
use serde_json::json;

use crate::files::{density_from_json, matrix_from_json, matrix_to_json, read_json, write_json};

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    /// The computation ran but a numerical quality check did not hold.
    Quality(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::io("<stdout>", e))
    }
}

pub type Outcome = std::result::Result<(), Failure>;

impl Failure {
    /// 0 success, 1 numerical quality, 2 usage, 3 dimensions, 4 Hermiticity,
    /// 5 invalid state.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Quality(_) => 1,
            Failure::Core(e) => match e {
                Error::DimensionMismatch { .. } => 3,
                Error::NotHermitian { .. } => 4,
                Error::TraceNotOne { .. } | Error::NotPositive { .. } | Error::NotNormalized { .. } => 5,
                Error::QuadratureDiverged { .. }
                | Error::EigenNotConverged { .. }
                | Error::ImaginaryExpectation { .. }
                | Error::FitWindow { .. }
                | Error::PrecisionLimited { .. } => 1,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Quality(m) => f.write_str(m),
        }
    }
}

fn real(src: &str, ctx: &PrecisionContext) -> Result<Float> {
    Ok(ctx.real(eval_expr(src, ctx)?))
}

fn complex_str(z: &Complex) -> String {
    format!("{} {}", format40(&z.re), format40(&z.im))
}

pub fn weight(p: f64, q: f64, x: &str, ctx: &PrecisionContext, out: &mut dyn Write) -> Outcome {
    let w = normalize(WeightParams::new(p, q)?, ctx)?;
    let x = real(x, ctx)?;
    writeln!(out, "{}", format40(&eval_weight(&w, &x)))?;
    Ok(())
}

pub struct ThreeSpinArgs {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub json: bool,
    pub exec: Execution,
}

pub fn three_spin(args: &ThreeSpinArgs, out: &mut dyn Write) -> Outcome {
    let cfg = &args.config;
    let series = run_three_spin(cfg, args.exec)?;
    let window = cfg.asymptotic_window;
    let ordering = check_ordering(&series, window)?;
    writeln!(out, "bits {}", cfg.mantissa_bits)?;
    writeln!(out, "rows {}", series.len())?;
    writeln!(out, "ordering fraction [{}, {}] {:.4}", window.0, window.1, ordering)?;
    let mut fits = Vec::new();
    let mut failures = Vec::new();
    for &pair in &cfg.pairs {
        match fit_stretched(&series, pair, window) {
            Ok(fit) => {
                writeln!(
                    out,
                    "fit {pair} zeta {} slope {} intercept {} r2 {} points {} floored {}",
                    format40(&fit.exponent_used),
                    format40(&fit.slope),
                    format40(&fit.intercept),
                    format40(&fit.r_squared),
                    fit.points_used,
                    fit.points_floored
                )?;
                fits.push(fit_json(pair, &fit));
            }
            Err(e) => {
                writeln!(out, "fit {pair} failed: {e}")?;
                failures.push(format!("{pair}: {e}"));
            }
        }
    }
    if args.json {
        let mut doc = series_json(&series, cfg);
        doc["ordering_fraction"] = json!(ordering);
        doc["fits"] = json!(fits);
        emit_json(&doc, &args.out)?;
    } else {
        emit_csv(&series, &args.out)?;
    }
    writeln!(out, "wrote {}", args.out.display())?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Quality(format!("fits failed: {}", failures.join("; "))))
    }
}

pub struct DephaseArgs<'a> {
    pub hamiltonian: &'a Path,
    pub rho0: &'a Path,
    pub observable: &'a Path,
    pub times: &'a [String],
    pub params: (f64, f64),
}

pub fn dephase(args: &DephaseArgs, ctx: &PrecisionContext, out: &mut dyn Write) -> Outcome {
    let h = HermitianMatrix::new(matrix_from_json(&read_json(args.hamiltonian)?, ctx)?, ctx)?;
    let rho0 = density_from_json(&read_json(args.rho0)?, ctx)?;
    let a = Observable::new(matrix_from_json(&read_json(args.observable)?, ctx)?, ctx)?;
    if rho0.dim() != h.dim() || a.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: if rho0.dim() != h.dim() { rho0.dim() } else { a.dim() },
        }
        .into());
    }
    let w = normalize(WeightParams::new(args.params.0, args.params.1)?, ctx)?;
    let decomp = eigendecompose(&h, ctx)?;
    let rho_diag = diagonal_state(&decomp, &rho0)?;
    let a_eq = expectation(&rho_diag, &a, ctx)?;
    let expansion = ExpectationExpansion::new(&decomp, &rho0, &a, ctx)?;
    writeln!(out, "bits {}", ctx.bits())?;
    writeln!(out, "weight {}", w.params())?;
    writeln!(out, "clusters {}", decomp.cluster_count())?;
    writeln!(out, "A_eq {}", format40(&a_eq))?;
    let mut gaps = Vec::new();
    for t in args.times {
        let t = real(t, ctx)?;
        let avg = weighted_time_average(&expansion, &w, &t)?;
        let gap = Float::with_val(ctx.bits(), &avg - &a_eq).abs();
        let rho_t = weighted_averaged_state_with(&decomp, &rho0, &w, &t, Execution::default())?;
        let dist = rho_t.distance(&rho_diag)?;
        writeln!(
            out,
            "T {} W {} gap {} state_max {} state_frob {}",
            format40(&t),
            format40(&avg),
            format40(&gap),
            format40(&dist.max_entry),
            format40(&dist.frobenius)
        )?;
        gaps.push(gap);
    }
    if gaps.len() > 1 {
        let decreasing = gaps.windows(2).all(|g| g[1] < g[0]);
        writeln!(out, "gaps strictly decreasing {}", if decreasing { "yes" } else { "no" })?;
    }
    Ok(())
}

pub fn kernel(
    params: (f64, f64),
    nu: &str,
    n: usize,
    m_terms: Option<usize>,
    ctx: &PrecisionContext,
    out: &mut dyn Write,
) -> Outcome {
    let w = normalize(WeightParams::new(params.0, params.1)?, ctx)?;
    let nu = real(nu, ctx)?;
    let direct = kernel_kn(&w, &nu, n)?;
    let poisson = kernel_kn_poisson(&w, &nu, n, m_terms)?;
    writeln!(out, "direct {}", complex_str(&direct))?;
    writeln!(out, "poisson {}", complex_str(&poisson.value))?;
    writeln!(out, "terms {}", poisson.terms)?;
    match &poisson.tail_bound {
        Some(t) => writeln!(out, "tail_bound {}", format40(t))?,
        None => writeln!(out, "tail_bound none")?,
    }
    let single = TrigPolynomial::new(Complex::zero(ctx.bits()), vec![(Complex::one(ctx.bits()), nu)]);
    match frequency_gap(&single, ctx) {
        Ok(g) => writeln!(out, "delta {}", format40(&g.delta))?,
        Err(e) => writeln!(out, "delta unavailable: {e}")?,
    }
    Ok(())
}

pub fn fourier(
    params: (f64, f64),
    xis: &[String],
    grid: bool,
    ctx: &PrecisionContext,
    out: &mut dyn Write,
) -> Outcome {
    let w = normalize(WeightParams::new(params.0, params.1)?, ctx)?;
    let mut points: Vec<Float> = xis.iter().map(|x| real(x, ctx)).collect::<Result<_>>()?;
    if grid {
        points.extend(DEFAULT_ENVELOPE_GRID.iter().map(|&x| ctx.real(x)));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("give --xi values or --grid".into()).into());
    }
    for xi in &points {
        let v = weight_fourier(&w, xi)?;
        writeln!(out, "xi {} value {} abs {}", format40(xi), complex_str(&v), format40(&v.abs()))?;
    }
    if grid {
        let env = fit_decay_envelope(&w, &points)?;
        writeln!(
            out,
            "envelope zeta {} rate {} prefactor {} r2 {}",
            format40(&env.zeta),
            format40(&env.rate),
            format40(&env.prefactor),
            format40(&env.r_squared)
        )?;
    }
    Ok(())
}

pub fn export_model(dir: &Path, ctx: &PrecisionContext, out: &mut dyn Write) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let model = build_three_spin(ctx);
    let files = [
        ("hamiltonian.json", matrix_to_json(model.hamiltonian.matrix(), ctx)),
        ("rho0.json", matrix_to_json(model.initial_density().matrix(), ctx)),
        ("observable.json", matrix_to_json(model.observable.matrix(), ctx)),
    ];
    for (name, doc) in files {
        let path = dir.join(name);
        write_json(&path, &doc)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

pub fn generate(seed: u64, dim: usize, dir: &Path, ctx: &PrecisionContext, out: &mut dyn Write) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let sys = RandomSystem::generate(seed, dim, ctx)?;
    let files = [
        ("hamiltonian.json", matrix_to_json(sys.hamiltonian.matrix(), ctx)),
        ("rho0.json", matrix_to_json(sys.rho0.matrix(), ctx)),
        ("observable.json", matrix_to_json(sys.observable.matrix(), ctx)),
    ];
    for (name, doc) in files {
        let path = dir.join(name);
        write_json(&path, &doc)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}
