//! Pluggable coefficient arithmetic.
//!
//! A single generic implementation of the transfer-matrix contraction serves
//! plain numeric evaluation (`f64`), forward-mode differentiation ([`Dual`]),
//! exact verification (`BigRational`), polynomial extraction ([`UniPoly`]) and
//! complex continuation (`Complex64`). The [`Ring`] trait is the common
//! denominator of all of these.

mod dual;
pub mod mp;
mod poly;
mod recurrence;

pub use dual::Dual;
pub use poly::{discriminant, interpolate, resultant, UniPoly};
pub use recurrence::{minimal_recurrence, RecurrenceError};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub use num_traits::{One, Zero};

/// Exact rational scalar used for all verification-grade arithmetic.
pub type Rat = num_rational::BigRational;

/// A commutative ring of scalars, by-value ops with cheap `Clone`.
///
/// Blanket-implemented: anything with the listed bounds is a `Ring`.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + Debug
        + PartialEq
        + Zero
        + One
        + Add<Output = Self>
        + Sub<Output = Self>
        + Mul<Output = Self>
        + Neg<Output = Self>
{
}

/// Embedding of exact rational parameters into a scalar ring.
pub trait FromRational: Ring {
    fn from_rational(q: &Rat) -> Self;
}

impl FromRational for Rat {
    fn from_rational(q: &Rat) -> Self {
        q.clone()
    }
}

impl FromRational for f64 {
    fn from_rational(q: &Rat) -> Self {
        q.to_f64().expect("rational out of f64 range")
    }
}

impl FromRational for Complex64 {
    fn from_rational(q: &Rat) -> Self {
        Complex64::new(f64::from_rational(q), 0.0)
    }
}

impl<T: FromRational> FromRational for Dual<T> {
    fn from_rational(q: &Rat) -> Self {
        Dual::constant(T::from_rational(q))
    }
}

impl<T: FromRational> FromRational for UniPoly<T> {
    fn from_rational(q: &Rat) -> Self {
        UniPoly::constant(T::from_rational(q))
    }
}

/// Scalars with division and a square root, enough to evaluate the
/// closed-form eigenvalue/amplitude expressions. Implemented for `f64`
/// (real branch), `Dual<f64>` (differentiation) and `Complex64`
/// (continuation into the complex plane).
pub trait SqrtRing: Ring + Div<Output = Self> {
    fn from_f64(x: f64) -> Self;
    fn sqrt_val(&self) -> Self;
}

impl SqrtRing for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn sqrt_val(&self) -> Self {
        self.sqrt()
    }
}

impl SqrtRing for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn sqrt_val(&self) -> Self {
        self.sqrt()
    }
}

impl SqrtRing for Dual<f64> {
    fn from_f64(x: f64) -> Self {
        Dual::constant(x)
    }
    fn sqrt_val(&self) -> Self {
        let r = self.value.sqrt();
        Dual {
            value: r,
            deriv: self.deriv / (2.0 * r),
        }
    }
}

/// Exact rational from an `f64` (every finite `f64` is a dyadic rational).
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("non-finite float has no rational value")
}

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-40i64..=40, 1i64..=20).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn ring_axioms_rat(a in arb_rat(), b in arb_rat(), c in arb_rat()) {
            let assoc = (a.clone() + b.clone()) + c.clone() == a.clone() + (b.clone() + c.clone());
            let distr = a.clone() * (b.clone() + c.clone())
                == a.clone() * b.clone() + a.clone() * c.clone();
            let comm = a.clone() * b.clone() == b.clone() * a.clone();
            prop_assert!(assoc && distr && comm);
            prop_assert_eq!(a.clone() * Rat::one(), a.clone());
            prop_assert_eq!(a.clone() + Rat::zero(), a);
        }

        #[test]
        fn ring_axioms_f64_tolerant(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
            let lhs = a * (b + c);
            let rhs = a * b + a * c;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn f64_from_rational_is_exact_on_dyadics() {
        let q = rat_from_f64(0.9);
        assert_eq!(f64::from_rational(&q), 0.9);
    }
}
