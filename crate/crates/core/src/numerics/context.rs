use std::sync::Arc;

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Smallest accepted working precision.
pub const MIN_BITS: u32 = 64;
/// Library-wide default working precision.
pub const DEFAULT_BITS: u32 = 256;
/// Extra bits carried by the cached irrational constants.
pub const GUARD_BITS: u32 = 32;

#[derive(Debug)]
struct Constants {
    pi: Float,
    two_pi: Float,
    sqrt2: Float,
    sqrt3: Float,
}

/// Working precision for every scalar created through it.
///
/// Cloning is cheap; the guarded constants are shared.
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    bits: u32,
    consts: Arc<Constants>,
}

impl PrecisionContext {
    pub fn new(mantissa_bits: u32) -> Result<Self> {
        if mantissa_bits < MIN_BITS {
            return Err(Error::PrecisionTooLow {
                bits: mantissa_bits,
                min: MIN_BITS,
            });
        }
        let g = mantissa_bits + GUARD_BITS;
        let pi = Float::with_val(g, Constant::Pi);
        let two_pi = Float::with_val(g, &pi * 2u32);
        let consts = Constants {
            pi,
            two_pi,
            sqrt2: Float::with_val(g, 2u32).sqrt(),
            sqrt3: Float::with_val(g, 3u32).sqrt(),
        };
        Ok(PrecisionContext {
            bits: mantissa_bits,
            consts: Arc::new(consts),
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Precision of the cached constants.
    pub fn guard_bits(&self) -> u32 {
        self.bits + GUARD_BITS
    }

    /// A zero at working precision.
    pub fn zero(&self) -> Float {
        Float::new(self.bits)
    }

    pub fn one(&self) -> Float {
        Float::with_val(self.bits, 1u32)
    }

    /// Any rug-assignable value rounded to working precision.
    pub fn real<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    /// `2^exp` at working precision.
    pub fn pow2(&self, exp: i32) -> Float {
        Float::with_val(self.bits, 1u32) << exp
    }

    /// `2^{-bits/2}`, the half-precision tolerance used for structural checks.
    pub fn half_eps(&self) -> Float {
        self.pow2(-(self.bits as i32) / 2)
    }

    /// `2^{-bits + shift}`.
    pub fn eps_shifted(&self, shift: i32) -> Float {
        self.pow2(-(self.bits as i32) + shift)
    }

    /// Number of significant decimal digits the working precision carries.
    pub fn decimal_digits(&self) -> usize {
        (self.bits as f64 * std::f64::consts::LOG10_2).ceil() as usize
    }

    /// π with guard bits.
    pub fn pi_guarded(&self) -> &Float {
        &self.consts.pi
    }

    /// 2π with guard bits.
    pub fn two_pi_guarded(&self) -> &Float {
        &self.consts.two_pi
    }

    pub fn pi(&self) -> Float {
        self.real(&self.consts.pi)
    }

    pub fn sqrt2(&self) -> Float {
        self.real(&self.consts.sqrt2)
    }

    pub fn sqrt3(&self) -> Float {
        self.real(&self.consts.sqrt3)
    }

    pub fn sqrt2_guarded(&self) -> &Float {
        &self.consts.sqrt2
    }

    pub fn sqrt3_guarded(&self) -> &Float {
        &self.consts.sqrt3
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext::new(DEFAULT_BITS).expect("default precision is valid")
    }
}

impl PartialEq for PrecisionContext {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}

/// Convenience wrapper matching the free-function style used elsewhere.
pub fn make_context(mantissa_bits: u32) -> Result<PrecisionContext> {
    PrecisionContext::new(mantissa_bits)
}
