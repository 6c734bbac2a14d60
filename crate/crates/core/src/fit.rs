//! Ordinary least squares for straight lines at working precision.

use rug::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub slope: Float,
    pub intercept: Float,
    /// Coefficient of determination, clamped to `[0, 1]`.
    pub r_squared: Float,
}

impl LineFit {
    pub fn predict(&self, x: &Float) -> Float {
        Float::with_val(self.slope.prec(), &self.slope * x) + &self.intercept
    }
}

/// Fit `y ≈ slope·x + intercept`. Needs two or more points with distinct `x`.
pub fn least_squares(xs: &[Float], ys: &[Float]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: xs.len(),
        });
    }
    let prec = xs[0].prec().max(ys[0].prec());
    let n = Float::with_val(prec, xs.len() as u64);
    let mut mx = Float::new(prec);
    let mut my = Float::new(prec);
    for (x, y) in xs.iter().zip(ys) {
        mx += x;
        my += y;
    }
    mx /= &n;
    my /= &n;
    let (mut sxx, mut sxy, mut syy) = (Float::new(prec), Float::new(prec), Float::new(prec));
    for (x, y) in xs.iter().zip(ys) {
        let dx = Float::with_val(prec, x - &mx);
        let dy = Float::with_val(prec, y - &my);
        sxx += Float::with_val(prec, dx.square_ref());
        syy += Float::with_val(prec, dy.square_ref());
        sxy += Float::with_val(prec, &dx * &dy);
    }
    if sxx.is_zero() {
        return Err(Error::InvalidArgument("all abscissae coincide".into()));
    }
    let slope = Float::with_val(prec, &sxy / &sxx);
    let intercept = my - Float::with_val(prec, &slope * &mx);
    let r_squared = if syy.is_zero() {
        Float::with_val(prec, 1u32)
    } else {
        let r2 = Float::with_val(prec, sxy.square_ref()) / (sxx * syy);
        r2.clamp(&0u32, &1u32)
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}
