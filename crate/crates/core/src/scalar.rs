//! Scalar abstractions shared by the symbolic and numerical layers.
//!
//! Two families are in play:
//!
//! * [`Coefficient`] is the coefficient ring of polynomials and forms. It is
//!   implemented for exact complex rationals ([`QComplex`]) and for
//!   floating complex numbers (`Complex<f32>`, `Complex<f64>`).
//! * [`Real`] is the real scalar of the numerical linear algebra
//!   (`f32` or `f64`), i.e. anything nalgebra accepts as a `RealField`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::RealField;
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational number.
pub type Rational = BigRational;

/// Exact complex rational `re + i·im`.
pub type QComplex = Complex<BigRational>;

/// Real floating scalar: f32 or f64.
pub trait Real: RealField + Copy {}

impl<T: RealField + Copy> Real for T {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Modulus of a complex number for any real field.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Coefficient ring for [`SparsePoly`](crate::polycore::SparsePoly) and
/// [`Form`](crate::forms::Form).
pub trait Coefficient:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Complex conjugate.
    fn conj(&self) -> Self;

    fn from_int(k: i64) -> Self;

    /// Nearest floating complex value.
    fn to_complex<T: Real>(&self) -> Complex<T>;
}

impl Coefficient for QComplex {
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn from_int(k: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(k)), BigRational::zero())
    }

    fn to_complex<T: Real>(&self) -> Complex<T> {
        Complex::new(
            lit(self.re.to_f64().unwrap_or(f64::NAN)),
            lit(self.im.to_f64().unwrap_or(f64::NAN)),
        )
    }
}

macro_rules! float_coefficient {
    ($t:ty) => {
        impl Coefficient for Complex<$t> {
            fn conj(&self) -> Self {
                Complex::new(self.re, -self.im)
            }

            fn from_int(k: i64) -> Self {
                Complex::new(k as $t, 0.0)
            }

            fn to_complex<T: Real>(&self) -> Complex<T> {
                Complex::new(lit(self.re as f64), lit(self.im as f64))
            }
        }
    };
}

float_coefficient!(f32);
float_coefficient!(f64);

/// Exact complex rational from an integer pair.
pub fn qc(re: i64, im: i64) -> QComplex {
    Complex::new(
        BigRational::from_integer(BigInt::from(re)),
        BigRational::from_integer(BigInt::from(im)),
    )
}

/// Exact complex rational from a pair of rationals.
pub fn qc_ratio(re: (i64, i64), im: (i64, i64)) -> QComplex {
    Complex::new(
        BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
        BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
    )
}

/// Exact rational from `p/q`.
pub fn rat(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact rational equal to the binary value of `x` (finite inputs only).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

/// Parses an exact rational from `"p/q"`, `"p"`, or a plain decimal such as
/// `"-0.125"` or `"1e-3"`. Decimals are read exactly in base ten.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Some(value)
}

/// Renders a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
