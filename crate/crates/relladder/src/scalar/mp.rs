//! Multiprecision complex arithmetic for root finding.
//!
//! Values carry their working precision; every constructor takes an explicit
//! bit count so no operation silently falls back to a narrow default.

use super::Rat;
use dashu_float::ops::{Abs, EstimatedLog2, SquareRoot};
use dashu_float::round::mode::HalfEven;
use dashu_int::IBig;
use num_bigint::{BigInt, Sign};
use num_complex::Complex64;

pub type MpFloat = dashu_float::FBig<HalfEven, 2>;

fn ibig_from_bigint(x: &BigInt) -> IBig {
    let (sign, bytes) = x.to_bytes_le();
    let mag = IBig::from(dashu_int::UBig::from_le_bytes(&bytes));
    match sign {
        Sign::Minus => -mag,
        _ => mag,
    }
}

/// Exact rational rounded to `bits` of mantissa.
pub fn mp_from_rat(q: &Rat, bits: usize) -> MpFloat {
    let num = MpFloat::from(ibig_from_bigint(q.numer()))
        .with_precision(bits)
        .value();
    let den = MpFloat::from(ibig_from_bigint(q.denom()))
        .with_precision(bits)
        .value();
    num / den
}

pub fn mp_from_f64(x: f64, bits: usize) -> MpFloat {
    MpFloat::try_from(x)
        .expect("finite float")
        .with_precision(bits)
        .value()
}

pub fn mp_zero(bits: usize) -> MpFloat {
    MpFloat::ZERO.with_precision(bits).value()
}

/// Rough log2 of |x|, for scale estimates.
pub fn log2_magnitude(x: &MpFloat) -> f64 {
    if x.repr().is_zero() {
        return f64::NEG_INFINITY;
    }
    x.clone().abs().log2_est() as f64
}

/// Complex number at a fixed working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct MpComplex {
    pub re: MpFloat,
    pub im: MpFloat,
}

impl MpComplex {
    pub fn new(re: MpFloat, im: MpFloat) -> Self {
        MpComplex { re, im }
    }

    pub fn zero(bits: usize) -> Self {
        MpComplex {
            re: mp_zero(bits),
            im: mp_zero(bits),
        }
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        MpComplex {
            re: mp_from_f64(re, bits),
            im: mp_from_f64(im, bits),
        }
    }

    pub fn from_rat(q: &Rat, bits: usize) -> Self {
        MpComplex {
            re: mp_from_rat(q, bits),
            im: mp_zero(bits),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        MpComplex {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        MpComplex {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        MpComplex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let den = rhs.norm_sqr();
        MpComplex {
            re: (&self.re * &rhs.re + &self.im * &rhs.im) / den.clone(),
            im: (&self.im * &rhs.re - &self.re * &rhs.im) / den,
        }
    }

    pub fn neg(&self) -> Self {
        MpComplex {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> MpFloat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> MpFloat {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> Self {
        MpComplex {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.repr().is_zero() && self.im.repr().is_zero()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().value(), self.im.to_f64().value())
    }

    /// Decimal rendering with the given number of significant digits.
    pub fn decimal_parts(&self, digits: usize) -> (String, String) {
        (
            decimal_string(&self.re, digits),
            decimal_string(&self.im, digits),
        )
    }
}

pub fn decimal_string(x: &MpFloat, digits: usize) -> String {
    if x.repr().is_zero() {
        return "0".to_string();
    }
    let dec = x.clone().to_decimal().value();
    format!("{:.*}", digits, dec)
}

/// Horner evaluation of a polynomial with `MpComplex` coefficients
/// (ascending powers).
pub fn horner(coeffs: &[MpComplex], z: &MpComplex) -> MpComplex {
    let bits = z.re.precision().max(1);
    let mut acc = MpComplex::zero(bits);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn rational_conversion_round_trips_through_f64() {
        let q = rat(9, 10);
        let x = mp_from_rat(&q, 256);
        assert!((x.to_f64().value() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn division_keeps_requested_precision() {
        let q = mp_from_rat(&rat(1, 3), 256);
        // 1/3 to 256 bits differs from the 53-bit value beyond 1e-17
        let diff = (&q - &mp_from_f64(1.0 / 3.0, 256)).abs();
        assert!(diff > MpFloat::ZERO);
        assert!(log2_magnitude(&diff) < -50.0);
        assert!(q.precision() >= 256);
    }

    #[test]
    fn complex_field_identities() {
        let a = MpComplex::from_f64(1.25, -2.5, 128);
        let b = MpComplex::from_f64(-0.75, 0.5, 128);
        let prod = a.mul(&b);
        let back = prod.div(&b);
        let err = back.sub(&a).abs();
        assert!(log2_magnitude(&err) < -100.0);
    }

    #[test]
    fn sqrt2_squared_is_two_at_precision() {
        let two = mp_from_f64(2.0, 256);
        let s = two.clone().sqrt();
        let err = (&s * &s - two).abs();
        assert!(log2_magnitude(&err) < -250.0);
    }
}
