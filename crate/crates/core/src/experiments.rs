//! Convergence experiments: error series of unweighted and weighted averages
//! of a real signal, ordering checks, stretched-exponential fits, and
//! CSV/JSON output.

use std::io::{Read, Write};
use std::path::Path;

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fit::least_squares;
use crate::models::{build_three_spin, explicit_signal, model_equilibrium};
use crate::numerics::{format40, parse_decimal, PrecisionContext};
use crate::weights::{default_pairs, zeta_exponent, WeightEvaluator, WeightParams};

/// Precision used by the experiments unless configured otherwise. At 256 bits
/// the `(4,4)` errors in the asymptotic window run into rounding noise.
pub const EXPERIMENT_BITS: u32 = 512;

/// Fewest points a stretched fit accepts.
pub const MIN_FIT_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pairs: Vec<WeightParams>,
    pub n_min: u64,
    pub n_max: u64,
    pub running_window: (u64, u64),
    pub asymptotic_window: (u64, u64),
    pub mantissa_bits: u32,
    /// Step between sampled `N` outside both windows.
    pub stride: u64,
    /// Step inside the windows.
    pub window_stride: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pairs: default_pairs(),
            n_min: 2,
            n_max: 1200,
            running_window: (40, 400),
            asymptotic_window: (650, 1200),
            mantissa_bits: EXPERIMENT_BITS,
            stride: 5,
            window_stride: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n_min < 2 || self.n_min >= self.n_max {
            return bad(format!("need 2 ≤ n_min < n_max, got {}..{}", self.n_min, self.n_max));
        }
        for (name, (lo, hi)) in [
            ("running_window", self.running_window),
            ("asymptotic_window", self.asymptotic_window),
        ] {
            if lo > hi || lo < self.n_min || hi > self.n_max {
                return bad(format!(
                    "{name} [{lo}, {hi}] must lie within [{}, {}]",
                    self.n_min, self.n_max
                ));
            }
        }
        if self.stride == 0 || self.window_stride == 0 {
            return bad("strides must be at least 1".into());
        }
        for p in &self.pairs {
            p.validate()?;
        }
        PrecisionContext::new(self.mantissa_bits)?;
        Ok(())
    }

    /// The sampled `N`, ascending.
    pub fn grid(&self) -> Vec<u64> {
        let inside = |n: u64, (lo, hi): (u64, u64)| (lo..=hi).contains(&n);
        (self.n_min..=self.n_max)
            .filter(|&n| {
                for w in [self.running_window, self.asymptotic_window] {
                    if inside(n, w) {
                        return (n - w.0) % self.window_stride == 0;
                    }
                }
                (n - self.n_min) % self.stride == 0
            })
            .collect()
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `E_N = |B_N − A_eq|` and `E_N^{(p,q)} = |W_N^{(p,q)} − A_eq|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub n_values: Vec<u64>,
    pub pairs: Vec<WeightParams>,
    pub e_unw: Vec<Float>,
    /// Indexed `[pair][row]`.
    pub e_pq: Vec<Vec<Float>>,
}

impl ErrorSeries {
    pub fn empty(pairs: Vec<WeightParams>) -> Self {
        let e_pq = vec![Vec::new(); pairs.len()];
        ErrorSeries {
            n_values: Vec::new(),
            pairs,
            e_unw: Vec::new(),
            e_pq,
        }
    }

    pub fn len(&self) -> usize {
        self.n_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_values.is_empty()
    }

    pub fn pair_index(&self, pair: WeightParams) -> Result<usize> {
        self.pairs
            .iter()
            .position(|p| *p == pair)
            .ok_or_else(|| Error::InvalidArgument(format!("pair {pair} not in series")))
    }

    /// Row index of `N`, if sampled.
    pub fn row_of(&self, n: u64) -> Option<usize> {
        self.n_values.binary_search(&n).ok()
    }

    /// Row indices whose `N` lies in `[lo, hi]`.
    pub fn rows_in(&self, (lo, hi): (u64, u64)) -> impl Iterator<Item = usize> + '_ {
        self.n_values
            .iter()
            .enumerate()
            .filter(move |(_, n)| (lo..=hi).contains(*n))
            .map(|(i, _)| i)
    }
}

/// Errors of the plain and weighted averages of `signal` against `a_eq` for
/// every `N` on the configured grid.
///
/// Samples `y_0..y_{n_max}` are computed once; the unweighted averages come
/// from prefix sums, while weighted sums are recomputed per `N` because the
/// weights `w(n/N)` depend on `N`.
pub fn run_convergence<F>(
    signal: F,
    a_eq: &Float,
    config: &ExperimentConfig,
    exec: Execution,
) -> Result<ErrorSeries>
where
    F: Fn(u64) -> Float + Sync,
{
    config.validate()?;
    let ctx = PrecisionContext::new(config.mantissa_bits)?;
    let prec = ctx.bits();
    let samples: Vec<Float> = exec::map_range(exec, config.n_max as usize, |n| {
        Float::with_val(prec, signal(n as u64))
    });
    let mut prefix = Vec::with_capacity(samples.len() + 1);
    prefix.push(ctx.zero());
    for y in &samples {
        let next = Float::with_val(prec, prefix.last().expect("nonempty") + y);
        prefix.push(next);
    }
    let grid = config.grid();
    let evaluators: Vec<WeightEvaluator> = config.pairs.iter().map(|p| p.evaluator(&ctx)).collect();
    let rows: Vec<(Float, Vec<Float>)> = exec::map(exec, &grid, |&n| {
        let n_us = n as usize;
        let b = Float::with_val(prec, &prefix[n_us] / n);
        let e_unw = Float::with_val(prec, &b - a_eq).abs();
        let e_pq = evaluators
            .iter()
            .map(|ev| {
                let w = weighted_mean(ev, &samples[..n_us]);
                Float::with_val(prec, &w - a_eq).abs()
            })
            .collect();
        (e_unw, e_pq)
    });
    let mut series = ErrorSeries::empty(config.pairs.clone());
    series.n_values = grid;
    for (e_unw, e_pq) in rows {
        series.e_unw.push(e_unw);
        for (col, e) in series.e_pq.iter_mut().zip(e_pq) {
            col.push(e);
        }
    }
    Ok(series)
}

fn weighted_mean(ev: &WeightEvaluator, samples: &[Float]) -> Float {
    let prec = samples[0].prec();
    let n = samples.len() as u64;
    let mut num = Float::new(prec);
    let mut den = Float::new(prec);
    let mut x = Float::new(prec);
    for (i, y) in samples.iter().enumerate().skip(1) {
        x.assign_ratio(i as u64, n);
        let w = ev.eval(&x);
        if w.is_zero() {
            continue;
        }
        num += Float::with_val(prec, &w * y);
        den += w;
    }
    num / den
}

trait AssignRatio {
    fn assign_ratio(&mut self, num: u64, den: u64);
}

impl AssignRatio for Float {
    fn assign_ratio(&mut self, num: u64, den: u64) {
        use rug::Assign;
        self.assign(num);
        *self /= den;
    }
}

/// The three-spin experiment: `y_n` from the closed form, `A_eq` from the
/// dephased state.
pub fn run_three_spin(config: &ExperimentConfig, exec: Execution) -> Result<ErrorSeries> {
    config.validate()?;
    let ctx = PrecisionContext::new(config.mantissa_bits)?;
    let model = build_three_spin(&ctx);
    let (_, a_eq) = model_equilibrium(&model, &ctx)?;
    run_convergence(|n| explicit_signal(n, &ctx), &a_eq, config, exec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub slope: Float,
    pub intercept: Float,
    pub r_squared: Float,
    pub window: (u64, u64),
    pub exponent_used: Float,
    pub points_used: usize,
    /// Points dropped for lying below the precision floor.
    pub points_floored: usize,
}

/// Errors below `10^{−bits/4}` are treated as rounding noise.
pub fn precision_floor(bits: u32) -> Float {
    let prec = bits + 32;
    let exp = -(bits as f64) / 4.0;
    Float::with_val(prec, 10u32).pow(Float::with_val(prec, exp))
}

/// Least squares of `log₁₀ E` against `N^ζ` over `window`.
pub fn fit_stretched(series: &ErrorSeries, pair: WeightParams, window: (u64, u64)) -> Result<FitResult> {
    let col = &series.e_pq[series.pair_index(pair)?];
    let prec = col.first().map_or(crate::numerics::DEFAULT_BITS, |e| e.prec());
    let ctx = PrecisionContext::new(prec)?;
    let floor = precision_floor(prec);
    let zeta = zeta_exponent(pair, &ctx);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut floored = 0;
    for i in series.rows_in(window) {
        let e = &col[i];
        if *e < floor {
            floored += 1;
            continue;
        }
        xs.push(Float::with_val(prec, series.n_values[i]).pow(&zeta));
        ys.push(Float::with_val(prec, e.log10_ref()));
    }
    if xs.len() < MIN_FIT_POINTS {
        let (lo, hi) = window;
        return Err(if floored > 0 {
            Error::PrecisionLimited {
                lo,
                hi,
                count: floored,
                floor_digits: prec / 4,
            }
        } else {
            Error::FitWindow {
                lo,
                hi,
                got: xs.len(),
                min: MIN_FIT_POINTS,
            }
        });
    }
    let line = least_squares(&xs, &ys)?;
    Ok(FitResult {
        slope: line.slope,
        intercept: line.intercept,
        r_squared: line.r_squared,
        window,
        exponent_used: zeta,
        points_used: xs.len(),
        points_floored: floored,
    })
}

/// Fraction of `N` in `window` at which the strict chain
/// `E^{(largest min(p,q))} < … < E^{(smallest)} < E^{unw}` holds.
pub fn check_ordering(series: &ErrorSeries, window: (u64, u64)) -> Result<f64> {
    let mut order: Vec<usize> = (0..series.pairs.len()).collect();
    order.sort_by(|&a, &b| {
        series.pairs[b]
            .min_exponent()
            .total_cmp(&series.pairs[a].min_exponent())
    });
    let rows: Vec<usize> = series.rows_in(window).collect();
    if rows.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no sampled N in [{}, {}]",
            window.0, window.1
        )));
    }
    let hits = rows
        .iter()
        .filter(|&&i| {
            let chain: Vec<&Float> = order
                .iter()
                .map(|&k| &series.e_pq[k][i])
                .chain(std::iter::once(&series.e_unw[i]))
                .collect();
            chain.windows(2).all(|w| w[0] < w[1])
        })
        .count();
    Ok(hits as f64 / rows.len() as f64)
}

/// Header row: `N`, `E_unw`, then one column per pair.
pub fn csv_header(pairs: &[WeightParams]) -> Vec<String> {
    let mut h = vec!["N".to_string(), "E_unw".to_string()];
    h.extend(pairs.iter().map(|p| p.column_name()));
    h
}

pub fn write_csv<W: Write>(series: &ErrorSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(csv_header(&series.pairs)).map_err(csv_err)?;
    for i in 0..series.len() {
        let mut rec = vec![series.n_values[i].to_string(), format40(&series.e_unw[i])];
        rec.extend(series.e_pq.iter().map(|col| format40(&col[i])));
        w.write_record(rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

pub fn csv_string(series: &ErrorSeries) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(series, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is ASCII"))
}

/// Reads a CSV written by [`write_csv`] at precision `prec`.
pub fn read_csv<R: Read>(input: R, prec: u32) -> Result<ErrorSeries> {
    let mut r = csv::Reader::from_reader(input);
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    let header = r.headers().map_err(csv_err)?.clone();
    if header.len() < 2 || &header[0] != "N" || &header[1] != "E_unw" {
        return Err(Error::Parse("header must start with N,E_unw".into()));
    }
    let pairs = header
        .iter()
        .skip(2)
        .map(parse_column_name)
        .collect::<Result<Vec<_>>>()?;
    let mut series = ErrorSeries::empty(pairs);
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let n = rec[0]
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("N: {e}")))?;
        series.n_values.push(n);
        series.e_unw.push(parse_decimal(&rec[1], prec)?);
        for (k, col) in series.e_pq.iter_mut().enumerate() {
            col.push(parse_decimal(&rec[k + 2], prec)?);
        }
    }
    Ok(series)
}

/// Inverse of [`WeightParams::column_name`].
pub fn parse_column_name(name: &str) -> Result<WeightParams> {
    let bad = || Error::Parse(format!("unrecognized column {name:?}"));
    let rest = name.strip_prefix("E_p").ok_or_else(bad)?;
    let (p, q) = rest.split_once("_q").ok_or_else(bad)?;
    WeightParams::new(p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn emit_csv(series: &ErrorSeries, path: &Path) -> Result<()> {
    write_file(path, csv_string(series)?.as_bytes())
}

pub fn series_json(series: &ErrorSeries, config: &ExperimentConfig) -> serde_json::Value {
    let mut columns = serde_json::Map::new();
    columns.insert("N".into(), json!(series.n_values));
    columns.insert(
        "E_unw".into(),
        json!(series.e_unw.iter().map(format40).collect::<Vec<_>>()),
    );
    for (p, col) in series.pairs.iter().zip(&series.e_pq) {
        columns.insert(
            p.column_name(),
            json!(col.iter().map(format40).collect::<Vec<_>>()),
        );
    }
    json!({ "config": config, "series": columns })
}

pub fn fit_json(pair: WeightParams, fit: &FitResult) -> serde_json::Value {
    json!({
        "pair": pair,
        "slope": format40(&fit.slope),
        "intercept": format40(&fit.intercept),
        "r_squared": format40(&fit.r_squared),
        "window": [fit.window.0, fit.window.1],
        "exponent_used": format40(&fit.exponent_used),
        "points_used": fit.points_used,
        "points_floored": fit.points_floored,
    })
}

pub fn emit_json(value: &serde_json::Value, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}
