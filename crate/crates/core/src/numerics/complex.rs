use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::Float;

/// Complex scalar with MPFR real and imaginary parts.
///
/// Results of binary operations take the precision of the left operand.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Complex::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Complex::new(Float::with_val(prec, 1u32), Float::new(prec))
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Complex::new(re, Float::new(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// `e^{iθ}` at the precision of `theta`.
    pub fn cis(theta: &Float) -> Self {
        let prec = theta.prec();
        let (s, c) = theta.clone().sin_cos(Float::new(prec));
        Complex::new(c, s)
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    /// Modulus `|z|`.
    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        Complex::new(
            Float::with_val(p, &self.re * k),
            Float::with_val(p, &self.im * k),
        )
    }

    pub fn div_real(&self, k: &Float) -> Self {
        let p = self.prec();
        Complex::new(
            Float::with_val(p, &self.re / k),
            Float::with_val(p, &self.im / k),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `self * other` without consuming either.
    pub fn mul_ref(&self, other: &Complex) -> Complex {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &other.re) - Float::with_val(p, &self.im * &other.im);
        let im = Float::with_val(p, &self.re * &other.im) + Float::with_val(p, &self.im * &other.re);
        Complex::new(re, im)
    }

    pub fn add_ref(&self, other: &Complex) -> Complex {
        let p = self.prec();
        Complex::new(
            Float::with_val(p, &self.re + &other.re),
            Float::with_val(p, &self.im + &other.im),
        )
    }

    pub fn sub_ref(&self, other: &Complex) -> Complex {
        let p = self.prec();
        Complex::new(
            Float::with_val(p, &self.re - &other.re),
            Float::with_val(p, &self.im - &other.im),
        )
    }

    /// `self += a * b`.
    pub fn add_mul(&mut self, a: &Complex, b: &Complex) {
        let p = self.prec();
        self.re += Float::with_val(p, &a.re * &b.re) - Float::with_val(p, &a.im * &b.im);
        self.im += Float::with_val(p, &a.re * &b.im) + Float::with_val(p, &a.im * &b.re);
    }

    /// Same value rounded to `prec`.
    pub fn with_prec(&self, prec: u32) -> Complex {
        Complex::new(
            Float::with_val(prec, &self.re),
            Float::with_val(prec, &self.im),
        )
    }

    /// Lossy conversion for display and plotting.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(super::format::PRINT_DIGITS);
        write!(
            f,
            "{} {} {}i",
            super::format::format_sig(&self.re, digits),
            if self.im.is_sign_negative() { "-" } else { "+" },
            super::format::format_sig(&Float::with_val(self.prec(), self.im.abs_ref()), digits)
        )
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(mut self, rhs: Complex) -> Complex {
        self += &rhs;
        self
    }
}

impl<'a> Add<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        self.add_ref(rhs)
    }
}

impl AddAssign<&Complex> for Complex {
    fn add_assign(&mut self, rhs: &Complex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(mut self, rhs: Complex) -> Complex {
        self -= &rhs;
        self
    }
}

impl<'a> Sub<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        self.sub_ref(rhs)
    }
}

impl SubAssign<&Complex> for Complex {
    fn sub_assign(&mut self, rhs: &Complex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        self.mul_ref(&rhs)
    }
}

impl<'a> Mul<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        self.mul_ref(rhs)
    }
}

impl MulAssign<&Complex> for Complex {
    fn mul_assign(&mut self, rhs: &Complex) {
        *self = self.mul_ref(rhs);
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}
