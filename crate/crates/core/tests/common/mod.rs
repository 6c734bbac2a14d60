//! Independent reference implementations shared by the integration tests.
//! None of these call into the library's numerics.
#![allow(dead_code)]

use rug::ops::Pow;
use rug::Float;

/// π from Machin's formula `π = 16 atan(1/5) − 4 atan(1/239)`, summing the
/// arctangent series directly.
pub fn machin_pi(prec: u32) -> Float {
    fn atan_inv(k: u32, prec: u32) -> Float {
        let x = Float::with_val(prec, 1u32) / k;
        let x2 = Float::with_val(prec, &x * &x);
        let mut term = x;
        let mut sum = Float::new(prec);
        let tiny = Float::with_val(prec, 2u32).pow(-(prec as i32) - 8);
        let mut n = 0u32;
        loop {
            let t = Float::with_val(prec, &term / (2 * n + 1));
            if t.clone().abs() < tiny {
                break;
            }
            if n % 2 == 0 {
                sum += &t;
            } else {
                sum -= &t;
            }
            term *= &x2;
            n += 1;
        }
        sum
    }
    let p = prec + 16;
    let pi = atan_inv(5, p) * 16u32 - atan_inv(239, p) * 4u32;
    Float::with_val(prec, pi)
}

/// `cos θ` by reducing with [`machin_pi`] and summing the Taylor series.
pub fn taylor_cos(theta: &Float, prec: u32) -> Float {
    let extra = theta.get_exp().unwrap_or(0).max(0) as u32;
    let p = prec + extra + 32;
    let two_pi = machin_pi(p) * 2u32;
    let t = Float::with_val(p, theta);
    let k = Float::with_val(p, &t / &two_pi).floor();
    let r = Float::with_val(p, &t - Float::with_val(p, &k * &two_pi));
    let r2 = Float::with_val(p, &r * &r);
    let tiny = Float::with_val(p, 2u32).pow(-(p as i32));
    let mut term = Float::with_val(p, 1u32);
    let mut sum = Float::with_val(p, 1u32);
    let mut n = 1u32;
    while term.clone().abs() > tiny {
        term = -term * &r2 / ((2 * n - 1) * (2 * n));
        sum += &term;
        n += 1;
    }
    Float::with_val(prec, sum)
}

/// Composite Simpson rule with `intervals` (even) subintervals on `[0, 1]`.
pub fn simpson(f: impl Fn(&Float) -> Float, intervals: u32, prec: u32) -> Float {
    assert!(intervals % 2 == 0);
    let h = Float::with_val(prec, 1u32) / intervals;
    let mut sum = Float::new(prec);
    for i in 0..=intervals {
        let x = Float::with_val(prec, i) / intervals;
        let c = if i == 0 || i == intervals {
            1u32
        } else if i % 2 == 1 {
            4
        } else {
            2
        };
        sum += f(&x) * c;
    }
    sum * h / 3u32
}

/// `exp(−x^{−p}(1−x)^{−q})` on `(0,1)` for integer `p, q`, zero elsewhere.
pub fn bump(x: &Float, p: i32, q: i32, prec: u32) -> Float {
    if *x <= 0u32 || *x >= 1u32 {
        return Float::new(prec);
    }
    let a = Float::with_val(prec, x.pow(-p));
    let b = Float::with_val(prec, Float::with_val(prec, 1u32 - x).pow(-q));
    Float::with_val(prec, -(a * b)).exp()
}

/// `|a − b| / |b|`.
pub fn rel_err(a: &Float, b: &Float) -> Float {
    Float::with_val(a.prec(), a - b).abs() / Float::with_val(b.prec(), b.abs_ref())
}

pub fn f(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}
