//! Finite trigonometric polynomials `g_n = a_0 + Σ a_ℓ e^{2πiν_ℓ n}` and the
//! quantities governing how fast their weighted averages settle.

use rug::ops::Pow;
use rug::Float;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fit::least_squares;
use crate::numerics::{eval_expr, format40, Complex, PrecisionContext};
use crate::weights::{kernel_kn, zeta_exponent, NormalizedWeight, WeightParams};

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub a0: Complex,
    /// `(a_ℓ, ν_ℓ)`.
    pub terms: Vec<(Complex, Float)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGap {
    pub delta: Float,
}

impl TrigPolynomial {
    pub fn constant(a0: Complex) -> Self {
        TrigPolynomial { a0, terms: Vec::new() }
    }

    pub fn new(a0: Complex, terms: Vec<(Complex, Float)>) -> Self {
        TrigPolynomial { a0, terms }
    }

    /// Expansion of `(1/3)Σ cos(2ω_j n)` with `ω = (1, √2, √3)`: six terms of
    /// amplitude 1/6 at `ν = ±ω_j/π`.
    pub fn three_spin(ctx: &PrecisionContext) -> Self {
        let g = ctx.guard_bits();
        let amp = Complex::from_real(ctx.one() / 6u32);
        let mut terms = Vec::with_capacity(6);
        let one = Float::with_val(g, 1u32);
        for omega in [&one, ctx.sqrt2_guarded(), ctx.sqrt3_guarded()] {
            let nu = Float::with_val(g, omega / ctx.pi_guarded());
            let nu = Float::with_val(ctx.bits(), &nu);
            terms.push((amp.clone(), nu.clone()));
            terms.push((amp.clone(), -nu));
        }
        TrigPolynomial::new(Complex::zero(ctx.bits()), terms)
    }

    /// Parses `{"a0": [re, im], "terms": [{"amp": [re, im], "freq": ...}]}`.
    /// Numbers may be JSON numbers or strings holding decimals or expressions
    /// such as `"sqrt(2)/pi"`.
    pub fn from_json(src: &str, ctx: &PrecisionContext) -> Result<Self> {
        let v: Value = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        let a0 = match v.get("a0") {
            Some(z) => parse_complex(z, ctx)?,
            None => Complex::zero(ctx.bits()),
        };
        let mut terms = Vec::new();
        if let Some(list) = v.get("terms") {
            let list = list
                .as_array()
                .ok_or_else(|| Error::Parse("\"terms\" must be an array".into()))?;
            for t in list {
                let amp = t
                    .get("amp")
                    .ok_or_else(|| Error::Parse("term without \"amp\"".into()))?;
                let freq = t
                    .get("freq")
                    .ok_or_else(|| Error::Parse("term without \"freq\"".into()))?;
                terms.push((parse_complex(amp, ctx)?, parse_real(freq, ctx)?));
            }
        }
        Ok(TrigPolynomial { a0, terms })
    }
}

/// Reads a JSON number or a string (decimal or expression) at working precision.
pub fn parse_real(v: &Value, ctx: &PrecisionContext) -> Result<Float> {
    let x = match v {
        // go through the decimal text so 0.1 is not the binary double
        Value::Number(n) => eval_expr(&n.to_string(), ctx)?,
        Value::String(s) => eval_expr(s, ctx)?,
        other => return Err(Error::Parse(format!("expected a number, got {other}"))),
    };
    Ok(Float::with_val(ctx.bits(), x))
}

/// `[re, im]`, or a bare real.
pub fn parse_complex(v: &Value, ctx: &PrecisionContext) -> Result<Complex> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            Ok(Complex::new(parse_real(&pair[0], ctx)?, parse_real(&pair[1], ctx)?))
        }
        Value::Array(_) => Err(Error::Parse("complex numbers are [re, im]".into())),
        other => Ok(Complex::from_real(parse_real(other, ctx)?)),
    }
}

/// `e^{2πiνn}`, reducing `νn` modulo 1 before scaling by 2π.
fn unit_phase(nu: &Float, n: u64, ctx: &PrecisionContext) -> Complex {
    let extra = 64 - n.leading_zeros();
    let prec = ctx.guard_bits() + extra;
    let vn = Float::with_val(prec, nu * n);
    let frac = Float::with_val(prec, &vn - Float::with_val(prec, vn.floor_ref()));
    let theta = Float::with_val(ctx.guard_bits(), &frac * ctx.two_pi_guarded());
    Complex::cis(&theta).with_prec(ctx.bits())
}

/// `g_n`.
pub fn eval_signal(poly: &TrigPolynomial, n: u64, ctx: &PrecisionContext) -> Complex {
    let mut acc = poly.a0.with_prec(ctx.bits());
    for (a, nu) in &poly.terms {
        acc.add_mul(a, &unit_phase(nu, n, ctx));
    }
    acc
}

/// `g_0, …, g_{N−1}`.
pub fn sample_signal(poly: &TrigPolynomial, n: usize, ctx: &PrecisionContext, exec: Execution) -> Vec<Complex> {
    exec::map_range(exec, n, |i| eval_signal(poly, i as u64, ctx))
}

/// `dist(ν, ℤ)`.
pub fn distance_to_integers(nu: &Float) -> Float {
    let r = Float::with_val(nu.prec(), nu.round_ref());
    Float::with_val(nu.prec(), nu - &r).abs()
}

/// `δ = min_ℓ dist(ν_ℓ, ℤ)`. Frequencies within `2^{−bits+16}` of an integer
/// are resonant and rejected.
pub fn frequency_gap(poly: &TrigPolynomial, ctx: &PrecisionContext) -> Result<FrequencyGap> {
    if poly.terms.is_empty() {
        return Err(Error::InvalidArgument("frequency gap needs at least one term".into()));
    }
    let tol = ctx.eps_shifted(16);
    let mut delta: Option<Float> = None;
    for (_, nu) in &poly.terms {
        let d = distance_to_integers(nu);
        if d <= tol {
            return Err(Error::ResonantFrequency {
                freq: format40(nu),
                tolerance: format40(&tol),
            });
        }
        if delta.as_ref().map_or(true, |m| d < *m) {
            delta = Some(d);
        }
    }
    Ok(FrequencyGap {
        delta: Float::with_val(ctx.bits(), delta.expect("nonempty")),
    })
}

/// `W_N(g) = a_0 + Σ a_ℓ K_N(ν_ℓ)`, by linearity.
pub fn oracle_weighted_average(poly: &TrigPolynomial, w: &NormalizedWeight, n: usize) -> Result<Complex> {
    let mut acc = poly.a0.with_prec(w.ctx().bits());
    for (a, nu) in &poly.terms {
        acc.add_mul(a, &kernel_kn(w, nu, n)?);
    }
    Ok(acc)
}

/// `C·exp(−c·(δN)^ζ)`.
pub fn predicted_envelope(
    delta: &FrequencyGap,
    params: WeightParams,
    n: u64,
    c: &Float,
    big_c: &Float,
    ctx: &PrecisionContext,
) -> Float {
    let x = envelope_abscissa(delta, params, n, ctx);
    let e = Float::with_val(ctx.bits(), -(x * c)).exp();
    e * big_c
}

fn envelope_abscissa(delta: &FrequencyGap, params: WeightParams, n: u64, ctx: &PrecisionContext) -> Float {
    let dn = Float::with_val(ctx.bits(), &delta.delta * n);
    dn.pow(&zeta_exponent(params, ctx))
}

/// Envelope constants fitted to measured `|W_N|`.
#[derive(Debug, Clone)]
pub struct EnvelopeFit {
    pub c: Float,
    pub big_c: Float,
    /// `r²` of the underlying line fit of `ln|W_N|` against `(δN)^ζ`.
    pub r_squared: Float,
    /// Fraction of fitted points lying on or below the envelope.
    pub coverage: f64,
}

/// Least squares of `ln|W_N|` against `(δN)^ζ`, giving `c = −slope`. The
/// intercept is then raised to the largest residual so that the envelope
/// dominates every point used in the fit.
pub fn fit_envelope(
    delta: &FrequencyGap,
    params: WeightParams,
    samples: &[(u64, Float)],
    ctx: &PrecisionContext,
) -> Result<EnvelopeFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, v) in samples {
        if v.is_zero() {
            continue;
        }
        xs.push(envelope_abscissa(delta, params, *n, ctx));
        ys.push(Float::with_val(ctx.bits(), v.abs_ref()).ln());
    }
    let line = least_squares(&xs, &ys)?;
    let mut shift = ctx.zero();
    for (x, y) in xs.iter().zip(&ys) {
        let r = Float::with_val(ctx.bits(), y - line.predict(x));
        if r > shift {
            shift = r;
        }
    }
    let c = Float::with_val(ctx.bits(), -&line.slope);
    if c <= 0u32 {
        return Err(Error::InvalidArgument(format!(
            "fitted rate c = {} is not positive",
            format40(&c)
        )));
    }
    let big_c = Float::with_val(ctx.bits(), &line.intercept + &shift).exp();
    let covered = samples
        .iter()
        .filter(|(n, v)| {
            let env = predicted_envelope(delta, params, *n, &c, &big_c, ctx);
            // the shift is exact only up to rounding
            let slack = Float::with_val(ctx.bits(), &env * ctx.eps_shifted(16));
            Float::with_val(ctx.bits(), v.abs_ref()) <= env + slack
        })
        .count();
    Ok(EnvelopeFit {
        c,
        big_c,
        r_squared: line.r_squared,
        coverage: covered as f64 / samples.len().max(1) as f64,
    })
}
