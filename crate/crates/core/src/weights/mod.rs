//! The bump-weight family `w_{p,q}(x) = C_{p,q}^{-1} exp(−x^{−p}(1−x)^{−q})`
//! on `(0, 1)`, and the weighted averages built from it.

mod kernels;

pub use kernels::{
    fit_decay_envelope, kernel_ft, kernel_kn, kernel_kn_poisson, poisson_window, weight_fourier,
    weight_fourier_via_kernel, DecayEnvelope, PoissonKernel, DEFAULT_ENVELOPE_GRID,
};

use std::fmt;
use std::sync::OnceLock;

use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::numerics::{quadrature_with, Complex, PrecisionContext, QuadratureOptions};

/// Shape parameters `(p, q)`; both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub p: f64,
    pub q: f64,
}

impl WeightParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let params = WeightParams { p, q };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.p) && ok(self.q) {
            Ok(())
        } else {
            Err(Error::InvalidWeightParams {
                p: self.p,
                q: self.q,
            })
        }
    }

    /// `(q, p)`: the weight mirrored about `x = 1/2`.
    pub fn swapped(&self) -> Self {
        WeightParams {
            p: self.q,
            q: self.p,
        }
    }

    pub fn min_exponent(&self) -> f64 {
        self.p.min(self.q)
    }

    /// Column label used in CSV output, e.g. `E_p0.5_q0.5`.
    pub fn column_name(&self) -> String {
        format!("E_p{}_q{}", self.p, self.q)
    }

    pub fn evaluator(&self, ctx: &PrecisionContext) -> WeightEvaluator {
        WeightEvaluator::new(*self, ctx)
    }
}

impl fmt::Display for WeightParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// The four pairs used throughout the convergence experiments.
pub fn default_pairs() -> Vec<WeightParams> {
    [(0.5, 0.5), (1.0, 1.0), (2.0, 2.0), (4.0, 4.0)]
        .into_iter()
        .map(|(p, q)| WeightParams { p, q })
        .collect()
}

#[derive(Debug, Clone)]
enum Power {
    Int(i32),
    Half,
    General(Float),
}

impl Power {
    fn new(e: f64, prec: u32) -> Self {
        if e == 0.5 {
            Power::Half
        } else if e.fract() == 0.0 && e <= 64.0 {
            Power::Int(e as i32)
        } else {
            Power::General(Float::with_val(prec, e))
        }
    }

    /// `x^{-e}` for `x > 0`.
    fn inv_pow(&self, x: Float) -> Float {
        use rug::ops::Pow;
        match self {
            Power::Int(k) => x.pow(-*k),
            Power::Half => x.recip_sqrt(),
            Power::General(e) => {
                let neg = Float::with_val(e.prec(), -e);
                x.pow(&neg)
            }
        }
    }
}

/// Unnormalized weight `exp(−x^{−p}(1−x)^{−q})` prepared for repeated
/// evaluation at one precision.
///
/// Returns exactly zero outside `(0, 1)` and whenever the exponent exceeds its
/// minimum over `(0, 1)` by more than `(bits + 64)·ln 2`: there the value is
/// below working resolution relative to the peak. Measuring from the peak
/// matters for large `p, q`, where the peak itself is as small as `e^{−256}`.
#[derive(Debug, Clone)]
pub struct WeightEvaluator {
    params: WeightParams,
    p: Power,
    q: Power,
    cutoff: Float,
    prec: u32,
}

impl WeightEvaluator {
    pub fn new(params: WeightParams, ctx: &PrecisionContext) -> Self {
        let prec = ctx.bits();
        let p = Power::new(params.p, prec);
        let q = Power::new(params.q, prec);
        // x^{−p}(1−x)^{−q} is smallest at x = p/(p+q)
        let peak = Float::with_val(prec, params.p) / Float::with_val(prec, params.p + params.q);
        let one_minus = Float::with_val(prec, 1u32 - &peak);
        let floor = p.inv_pow(peak) * q.inv_pow(one_minus);
        let cutoff = Float::with_val(prec, Constant::Log2) * (prec + 64) + floor;
        WeightEvaluator {
            params,
            p,
            q,
            cutoff,
            prec,
        }
    }

    pub fn params(&self) -> WeightParams {
        self.params
    }

    pub fn eval(&self, x: &Float) -> Float {
        if *x <= 0u32 || *x >= 1u32 {
            return Float::new(self.prec);
        }
        let left = self.p.inv_pow(Float::with_val(self.prec, x));
        let right = self.q.inv_pow(Float::with_val(self.prec, 1u32 - x));
        let a = left * right;
        if a > self.cutoff {
            return Float::new(self.prec);
        }
        (-a).exp()
    }

    /// `w(n/N)` for `n = 0..N-1`.
    pub fn nodes(&self, n: usize, exec: Execution) -> Vec<Float> {
        let denom = n as u64;
        exec::map_range(exec, n, |i| {
            let x = Float::with_val(self.prec, i as u64) / denom;
            self.eval(&x)
        })
    }
}

/// `exp(−x^{−p}(1−x)^{−q})` on `(0, 1)`, zero elsewhere.
pub fn weight_unnormalized(params: WeightParams, x: &Float, ctx: &PrecisionContext) -> Float {
    WeightEvaluator::new(params, ctx).eval(x)
}

/// A weight together with its normalization constant `C_{p,q}`.
#[derive(Debug, Clone)]
pub struct NormalizedWeight {
    evaluator: WeightEvaluator,
    normalization: Float,
    ctx: PrecisionContext,
    envelope: OnceLock<Result<DecayEnvelope, String>>,
}

/// Compute `C_{p,q} = ∫_0^1 exp(−s^{−p}(1−s)^{−q}) ds` at relative tolerance
/// `2^{−bits+32}`.
pub fn normalize(params: WeightParams, ctx: &PrecisionContext) -> Result<NormalizedWeight> {
    normalize_with(params, ctx, Execution::default())
}

pub fn normalize_with(
    params: WeightParams,
    ctx: &PrecisionContext,
    exec: Execution,
) -> Result<NormalizedWeight> {
    params.validate()?;
    let evaluator = WeightEvaluator::new(params, ctx);
    let opts = QuadratureOptions {
        execution: exec,
        ..Default::default()
    };
    let res = quadrature_with(
        |x| Complex::from_real(evaluator.eval(x)),
        &ctx.zero(),
        &ctx.one(),
        ctx,
        &ctx.eps_shifted(32),
        opts,
    )?;
    Ok(NormalizedWeight {
        evaluator,
        normalization: res.value.re,
        ctx: ctx.clone(),
        envelope: OnceLock::new(),
    })
}

impl NormalizedWeight {
    pub fn params(&self) -> WeightParams {
        self.evaluator.params
    }

    /// `C_{p,q}`.
    pub fn normalization(&self) -> &Float {
        &self.normalization
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn evaluator(&self) -> &WeightEvaluator {
        &self.evaluator
    }

    /// `w_{p,q}(x)`.
    pub fn eval(&self, x: &Float) -> Float {
        self.evaluator.eval(x) / &self.normalization
    }

    /// Fitted `C exp(−c ξ^ζ)` envelope of `|ŵ|` on [`DEFAULT_ENVELOPE_GRID`],
    /// computed once per weight.
    pub fn decay_envelope(&self) -> Result<&DecayEnvelope> {
        self.envelope
            .get_or_init(|| {
                let grid: Vec<Float> = DEFAULT_ENVELOPE_GRID
                    .iter()
                    .map(|&x| self.ctx.real(x))
                    .collect();
                fit_decay_envelope(self, &grid).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| Error::InvalidArgument(format!("decay envelope unavailable: {e}")))
    }
}

/// `w_{p,q}(x) = weight_unnormalized(x) / C_{p,q}`.
pub fn eval_weight(w: &NormalizedWeight, x: &Float) -> Float {
    w.eval(x)
}

/// `Σ w(n/N) g_n / Σ w(n/N)` over `n = 0..N-1`.
///
/// `w(0) = 0`, so `g_0` never contributes; it is kept for fidelity with the
/// sampling convention rather than dropped.
pub fn discrete_weighted_average(w: &NormalizedWeight, samples: &[Complex]) -> Result<Complex> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { min: 2, got: n });
    }
    let prec = w.ctx.bits();
    let weights = w.evaluator.nodes(n, Execution::Sequential);
    let mut num = Complex::zero(prec);
    let mut den = Float::new(prec);
    for (wi, g) in weights.iter().zip(samples) {
        if wi.is_zero() {
            continue;
        }
        num += &g.scale(wi);
        den += wi;
    }
    Ok(num.div_real(&den))
}

/// Real-valued weighted average; returns `(Σ w g, Σ w)` so callers can reuse
/// the denominator. Only the parameters matter since `C_{p,q}` cancels.
pub fn weighted_sums_real(evaluator: &WeightEvaluator, samples: &[Float]) -> Result<(Float, Float)> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { min: 2, got: n });
    }
    let prec = evaluator.prec;
    let mut num = Float::new(prec);
    let mut den = Float::new(prec);
    for (i, g) in samples.iter().enumerate() {
        let x = Float::with_val(prec, i as u64) / n as u64;
        let wi = evaluator.eval(&x);
        if wi.is_zero() {
            continue;
        }
        num += Float::with_val(prec, &wi * g);
        den += wi;
    }
    Ok((num, den))
}

/// `(1/N) Σ g_n`.
pub fn unweighted_average(samples: &[Complex]) -> Result<Complex> {
    let first = samples
        .first()
        .ok_or(Error::TooFewSamples { min: 1, got: 0 })?;
    let prec = first.prec();
    let mut acc = Complex::zero(prec);
    for g in samples {
        acc += g;
    }
    Ok(acc.div_real(&Float::with_val(prec, samples.len() as u64)))
}

/// `∫_0^1 w(s) g(Ts) ds` at relative tolerance `2^{−bits/2}`.
pub fn continuous_weighted_average<G>(w: &NormalizedWeight, g: G, t: &Float) -> Result<Complex>
where
    G: Fn(&Float) -> Complex + Sync + Send,
{
    continuous_weighted_average_with(w, g, t, QuadratureOptions::default())
}

/// As [`continuous_weighted_average`] with explicit quadrature options; pass
/// a larger `initial_nodes` when `g` is known to oscillate quickly.
pub fn continuous_weighted_average_with<G>(
    w: &NormalizedWeight,
    g: G,
    t: &Float,
    opts: QuadratureOptions,
) -> Result<Complex>
where
    G: Fn(&Float) -> Complex + Sync + Send,
{
    if *t <= 0u32 {
        return Err(Error::InvalidArgument(format!(
            "averaging time must be positive, got {}",
            crate::numerics::format40(t)
        )));
    }
    let ctx = &w.ctx;
    let prec = ctx.bits();
    let res = quadrature_with(
        |s| {
            let ws = w.eval(s);
            if ws.is_zero() {
                return Complex::zero(prec);
            }
            let ts = Float::with_val(prec, t * s);
            g(&ts).scale(&ws)
        },
        &ctx.zero(),
        &ctx.one(),
        ctx,
        &ctx.half_eps(),
        opts,
    )?;
    Ok(res.value)
}

/// `ζ(p,q) = (1 + 1/min{p,q})^{−1}`.
pub fn zeta_exponent(params: WeightParams, ctx: &PrecisionContext) -> Float {
    let m = ctx.real(params.min_exponent());
    let denom = Float::with_val(ctx.bits(), &m + 1u32);
    m / denom
}
