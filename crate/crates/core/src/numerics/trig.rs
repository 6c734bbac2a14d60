use rug::float::Constant;
use rug::Float;

use super::complex::Complex;
use super::context::{PrecisionContext, GUARD_BITS};

/// Reduce `theta` into `[0, 2π)` using π carried with guard bits.
///
/// For `|θ|` beyond `2^32` the cached π is not wide enough, so a wider one
/// is computed on the spot.
pub fn reduce_angle(theta: &Float, ctx: &PrecisionContext) -> Float {
    if theta.is_zero() || !theta.is_finite() {
        return ctx.real(theta);
    }
    let mag_bits = theta.get_exp().unwrap_or(0).max(0) as u32;
    let wide = ctx.bits() + GUARD_BITS + mag_bits;
    let computed;
    let two_pi: &Float = if mag_bits <= GUARD_BITS {
        ctx.two_pi_guarded()
    } else {
        computed = Float::with_val(wide, Constant::Pi) * 2u32;
        &computed
    };
    let k = Float::with_val(wide, theta / two_pi).floor();
    let mut r = Float::with_val(wide, theta) - Float::with_val(wide, &k * two_pi);
    if r.is_sign_negative() {
        r += two_pi;
    }
    let mut out = ctx.real(&r);
    if out >= *two_pi {
        out -= two_pi;
    }
    if out.is_sign_negative() {
        out = ctx.zero();
    }
    out
}

/// `cos θ` via [`reduce_angle`].
pub fn cos_reduced(theta: &Float, ctx: &PrecisionContext) -> Float {
    reduce_angle(theta, ctx).cos()
}

/// `e^{iθ}` via [`reduce_angle`].
pub fn cis_reduced(theta: &Float, ctx: &PrecisionContext) -> Complex {
    Complex::cis(&reduce_angle(theta, ctx))
}
