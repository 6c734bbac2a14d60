//! Averaging kernels `F_T(ω)`, `K_N(ν)` and the weight's Fourier transform.
//!
//! Fourier convention: `ŵ(ξ) = ∫ e^{−iξx} w(x) dx`. Under it the Poisson
//! summation identity for the discrete kernel reads
//! `Σ_n w(n/N) e^{2πiνn} = N Σ_m ŵ(2πN(m − ν))`.

use rug::Float;

use super::NormalizedWeight;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fit::least_squares;
use crate::numerics::{
    cis_reduced, quadrature_with, Complex, PrecisionContext, QuadratureOptions,
};

/// Sample points for fitting the `|ŵ|` decay envelope.
pub const DEFAULT_ENVELOPE_GRID: [f64; 7] = [10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0];

/// Used when the envelope fit is unusable.
pub const FALLBACK_POISSON_TERMS: usize = 8;
const MAX_POISSON_TERMS: usize = 256;

/// Initial node count `base + per_osc·⌈|ξ|/2π⌉` for an integrand oscillating
/// like `e^{iξs}` on `[0, 1]`.
fn oscillatory_nodes(xi: &Float, ctx: &PrecisionContext, per_osc: usize) -> usize {
    let turns = Float::with_val(ctx.bits(), xi.abs_ref()) / ctx.two_pi_guarded();
    let turns = turns.ceil().to_f64() as usize;
    256 + per_osc * turns
}

/// `∫_0^1 w(s) e^{−iξs} ds` with the given node density and tolerance,
/// integrated with `guard` extra bits so that strong cancellation at large
/// `|ξ|` does not drown the result.
fn fourier_quadrature(
    w: &NormalizedWeight,
    xi: &Float,
    per_osc: usize,
    rel_tol: &Float,
    guard: u32,
) -> Result<Complex> {
    let bits = w.ctx().bits();
    let wide = PrecisionContext::new(bits + guard)?;
    let prec = wide.bits();
    let evaluator = w.params().evaluator(&wide);
    let opts = QuadratureOptions::default().with_initial_nodes(oscillatory_nodes(xi, &wide, per_osc));
    let res = quadrature_with(
        |s| {
            let ws = evaluator.eval(s);
            if ws.is_zero() {
                return Complex::zero(prec);
            }
            let phase = -Float::with_val(prec, xi * s);
            cis_reduced(&phase, &wide).scale(&ws)
        },
        &wide.zero(),
        &wide.one(),
        &wide,
        rel_tol,
        opts,
    )?;
    Ok(res.value.div_real(w.normalization()).with_prec(bits))
}

/// `F_T(ω) = ∫_0^1 w(s) e^{−iTωs} ds`.
pub fn kernel_ft(w: &NormalizedWeight, omega: &Float, t: &Float) -> Result<Complex> {
    if t.is_sign_negative() && !t.is_zero() {
        return Err(Error::InvalidArgument("kernel time T must be non-negative".into()));
    }
    let xi = Float::with_val(w.ctx().bits(), t * omega);
    fourier_quadrature(w, &xi, 2, &w.ctx().half_eps(), 0)
}

/// `ŵ(ξ) = ∫_0^1 e^{−iξx} w(x) dx`, resolved with 8 nodes per oscillation
/// before doubling and a tight relative tolerance `2^{−bits+32}`. Values
/// far below 1 keep their relative accuracy thanks to 64 guard bits.
pub fn weight_fourier(w: &NormalizedWeight, xi: &Float) -> Result<Complex> {
    fourier_quadrature(w, xi, 8, &w.ctx().eps_shifted(32), SUM_GUARD_BITS)
}

/// `ŵ(ξ)` computed as `F_{|ξ|}(±1)`, the kernel route of the same integral.
pub fn weight_fourier_via_kernel(w: &NormalizedWeight, xi: &Float) -> Result<Complex> {
    let ctx = w.ctx();
    if xi.is_sign_negative() {
        let t = Float::with_val(ctx.bits(), -xi);
        kernel_ft(w, &ctx.real(-1), &t)
    } else {
        kernel_ft(w, &ctx.one(), xi)
    }
}

/// Extra bits carried by the direct sums, which may cancel to far below 1.
const SUM_GUARD_BITS: u32 = 64;

/// `A_N = Σ_{n<N} w(n/N)` and the matching weighted phase sum, accumulated
/// with [`SUM_GUARD_BITS`] extra bits and rounded to working precision.
fn discrete_phase_sums(w: &NormalizedWeight, nu: &Float, n: usize) -> (Complex, Float) {
    let bits = w.ctx().bits();
    let wide = PrecisionContext::new(bits + SUM_GUARD_BITS).expect("wider than a valid context");
    let prec = wide.bits();
    let weights = w.params().evaluator(&wide).nodes(n, Execution::Sequential);
    let mut num = Complex::zero(prec);
    let mut den = Float::new(prec);
    for (i, wi) in weights.iter().enumerate() {
        if wi.is_zero() {
            continue;
        }
        // reduce νn modulo 1 before scaling by 2π
        let vn = Float::with_val(prec, nu * i as u64);
        let frac = Float::with_val(prec, &vn - Float::with_val(prec, vn.floor_ref()));
        let phase = Float::with_val(prec, &frac * wide.two_pi_guarded());
        num += &Complex::cis(&phase).scale(wi);
        den += wi;
    }
    (num.with_prec(bits), Float::with_val(bits, den))
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewSamples { min: 2, got: n });
    }
    Ok(())
}

/// `K_N(ν) = Σ w(n/N) e^{2πiνn} / Σ w(n/N)` by direct summation.
pub fn kernel_kn(w: &NormalizedWeight, nu: &Float, n: usize) -> Result<Complex> {
    check_n(n)?;
    let (num, den) = discrete_phase_sums(w, nu, n);
    Ok(num.div_real(&den))
}

/// `K_N(ν)` through Poisson summation, with the truncation bound.
#[derive(Debug, Clone)]
pub struct PoissonKernel {
    pub value: Complex,
    /// Estimate of the omitted contributions from the fitted decay envelope.
    /// `|ŵ|` oscillates, so between the fit samples it can exceed the envelope
    /// by a small factor. `None` when no decaying envelope could be fitted.
    pub tail_bound: Option<Float>,
    /// Half-width of the window: every `m` with `|m − ν| ≤ terms + 1/2`.
    pub terms: usize,
}

/// `N Σ_{|m| ≤ terms} ŵ(2πN(m − ν)) / A_N`, where `A_N` is the same direct sum
/// used by [`kernel_kn`].
///
/// The sum runs over [`poisson_window`]`(ν, terms)`. With `m_terms = None`
/// the smallest `terms` is used whose envelope tail is below `2^{−bits/2−8}`
/// relative to the partial sum (floored at `2^{−2·bits}`), or [`FALLBACK_POISSON_TERMS`] if the envelope does
/// not decay.
pub fn kernel_kn_poisson(
    w: &NormalizedWeight,
    nu: &Float,
    n: usize,
    m_terms: Option<usize>,
) -> Result<PoissonKernel> {
    check_n(n)?;
    if m_terms == Some(0) {
        return Err(Error::InvalidArgument("m_terms must be at least 1".into()));
    }
    let ctx = w.ctx();
    let prec = ctx.bits();
    // A_N in the normalized weight, to match the normalized ŵ
    let (_, raw) = discrete_phase_sums(w, &ctx.zero(), n);
    let a_n = raw / w.normalization();
    let n_over_a = Float::with_val(prec, n as u64) / &a_n;
    let envelope = w.decay_envelope().ok().filter(|e| e.is_decaying()).cloned();

    let tail = |terms: usize| {
        envelope.as_ref().map(|e| {
            let window = poisson_window(nu, terms);
            Float::with_val(prec, e.tail_sum(nu, n, window, ctx) * &n_over_a)
        })
    };
    let two_pi_n = Float::with_val(prec, ctx.two_pi_guarded() * n as u64);
    let term = |m: i64| -> Result<Complex> {
        let shift = Float::with_val(prec, m) - nu;
        weight_fourier(w, &Float::with_val(prec, &two_pi_n * &shift))
    };
    let (mut lo, mut hi) = poisson_window(nu, 0);
    let mut sum = Complex::zero(prec);
    for m in lo..=hi {
        sum += &term(m)?;
    }
    let mut terms = 0;
    let limit = match (m_terms, &envelope) {
        (Some(m), _) => m,
        (None, Some(_)) => MAX_POISSON_TERMS,
        (None, None) => FALLBACK_POISSON_TERMS,
    };
    // the envelope is extrapolated past its samples, hence the 2^{-8} margin
    let margin = Float::with_val(prec, ctx.half_eps() * ctx.pow2(-8));
    let floor = ctx.pow2(-2 * prec as i32);
    while terms < limit {
        terms += 1;
        let (new_lo, new_hi) = poisson_window(nu, terms);
        for m in (new_lo..lo).chain(hi + 1..=new_hi) {
            sum += &term(m)?;
        }
        (lo, hi) = (new_lo, new_hi);
        if m_terms.is_none() {
            let k = Float::with_val(prec, sum.abs() * &n_over_a);
            let target = Float::with_val(prec, &k * &margin).max(&floor);
            if tail(terms).is_some_and(|t| t < target) {
                break;
            }
        }
    }
    Ok(PoissonKernel {
        value: sum.scale(&n_over_a),
        tail_bound: tail(terms),
        terms,
    })
}

/// The integers `m` with `|m − ν| ≤ terms + 1/2`, as an inclusive range.
/// Symmetric about `ν`, so both sides of the truncation sit at equal `|ξ|`.
pub fn poisson_window(nu: &Float, terms: usize) -> (i64, i64) {
    let prec = nu.prec();
    let r = Float::with_val(prec, terms as f64 + 0.5);
    let lo = Float::with_val(prec, nu - &r).ceil();
    let hi = Float::with_val(prec, nu + &r).floor();
    (lo.to_f64() as i64, hi.to_f64() as i64)
}

/// `|ŵ(ξ)| ≲ C exp(−c ξ^ζ)` fitted from computed transforms.
#[derive(Debug, Clone)]
pub struct DecayEnvelope {
    pub zeta: Float,
    /// Decay rate `c` (negated slope of `ln|ŵ|` against `ξ^ζ`).
    pub rate: Float,
    /// `C` from the least-squares intercept.
    pub prefactor: Float,
    /// Smallest `C` for which the envelope dominates every sampled point.
    pub dominating_prefactor: Float,
    pub r_squared: Float,
    /// `(ξ, |ŵ(ξ)|)` samples behind the fit.
    pub samples: Vec<(Float, Float)>,
}

impl DecayEnvelope {
    pub fn is_decaying(&self) -> bool {
        self.rate > 0u32
    }

    /// `C_dom exp(−c ξ^ζ)`.
    pub fn bound(&self, xi: &Float) -> Float {
        let prec = self.zeta.prec();
        let x = Float::with_val(prec, xi.abs_ref());
        use rug::ops::Pow;
        let arg = Float::with_val(prec, x.pow(&self.zeta)) * &self.rate;
        (-arg).exp() * &self.dominating_prefactor
    }

    /// `Σ bound(2πN(m − ν))` over the `m` outside `window`, summed until
    /// terms drop below `2^{−2·bits}`.
    pub fn tail_sum(&self, nu: &Float, n: usize, window: (i64, i64), ctx: &PrecisionContext) -> Float {
        let prec = ctx.bits();
        let floor = ctx.pow2(-2 * prec as i32);
        let two_pi_n = Float::with_val(prec, ctx.two_pi_guarded() * n as u64);
        let mut total = Float::new(prec);
        for step in [1i64, -1] {
            let mut m = if step > 0 { window.1 + 1 } else { window.0 - 1 };
            for _ in 0..10_000 {
                let shift = Float::with_val(prec, m) - nu;
                let b = self.bound(&Float::with_val(prec, &two_pi_n * &shift));
                let small = b < floor;
                total += b;
                if small {
                    break;
                }
                m += step;
            }
        }
        total
    }
}

/// Fit `ln|ŵ(ξ)|` against `ξ^{ζ(p,q)}` over `xis`.
pub fn fit_decay_envelope(w: &NormalizedWeight, xis: &[Float]) -> Result<DecayEnvelope> {
    use rug::ops::Pow;
    let ctx = w.ctx();
    let prec = ctx.bits();
    let zeta = super::zeta_exponent(w.params(), ctx);
    let mut samples = Vec::with_capacity(xis.len());
    let mut xs = Vec::with_capacity(xis.len());
    let mut ys = Vec::with_capacity(xis.len());
    for xi in xis {
        let mag = weight_fourier(w, xi)?.abs();
        if mag.is_zero() {
            return Err(Error::InvalidArgument(format!(
                "|ŵ| underflows at ξ = {}",
                crate::numerics::format40(xi)
            )));
        }
        xs.push(Float::with_val(prec, xi.abs_ref()).pow(&zeta));
        ys.push(Float::with_val(prec, mag.ln_ref()));
        samples.push((xi.clone(), mag));
    }
    let fit = least_squares(&xs, &ys)?;
    let rate = -fit.slope.clone();
    // raise the intercept until the line sits on or above every sample
    let mut log_dom = fit.intercept.clone();
    for (x, y) in xs.iter().zip(&ys) {
        let needed = Float::with_val(prec, y + Float::with_val(prec, &rate * x));
        if needed > log_dom {
            log_dom = needed;
        }
    }
    Ok(DecayEnvelope {
        zeta,
        prefactor: fit.intercept.exp(),
        dominating_prefactor: log_dom.exp(),
        rate,
        r_squared: fit.r_squared,
        samples,
    })
}
