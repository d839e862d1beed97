//! First-order dual numbers `a + eps b`, `eps^2 = 0`.

use super::{One, Ring, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Forward-mode derivative carrier; the product rule is exact:
/// `(a + eps b)(c + eps d) = ac + eps (ad + bc)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub value: T,
    pub deriv: T,
}

impl<T: Ring> Dual<T> {
    pub fn new(value: T, deriv: T) -> Self {
        Dual { value, deriv }
    }

    /// Lift a constant (zero derivative).
    pub fn constant(value: T) -> Self {
        Dual {
            value,
            deriv: T::zero(),
        }
    }

    /// The differentiation variable itself (unit derivative).
    pub fn seed(value: T) -> Self {
        Dual {
            value,
            deriv: T::one(),
        }
    }
}

impl<T: Ring> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual {
            value: self.value + rhs.value,
            deriv: self.deriv + rhs.deriv,
        }
    }
}

impl<T: Ring> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual {
            value: self.value - rhs.value,
            deriv: self.deriv - rhs.deriv,
        }
    }
}

impl<T: Ring> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Dual {
            value: self.value.clone() * rhs.value.clone(),
            deriv: self.value * rhs.deriv + self.deriv * rhs.value,
        }
    }
}

impl<T: Ring> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            value: -self.value,
            deriv: -self.deriv,
        }
    }
}

impl<T: Ring + Div<Output = T>> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let value = self.value.clone() / rhs.value.clone();
        // (b - (a/c) d) / c
        let deriv = (self.deriv - value.clone() * rhs.deriv) / rhs.value;
        Dual { value, deriv }
    }
}

impl<T: Ring> Zero for Dual<T> {
    fn zero() -> Self {
        Dual {
            value: T::zero(),
            deriv: T::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.deriv.is_zero()
    }
}

impl<T: Ring> One for Dual<T> {
    fn one() -> Self {
        Dual {
            value: T::one(),
            deriv: T::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::UniPoly;
    use proptest::prelude::*;

    proptest! {
        /// Chain rule against a central finite difference on random polynomials.
        #[test]
        fn derivative_matches_finite_difference(
            coeffs in proptest::collection::vec(-3.0f64..3.0, 1..8),
            x in -1.5f64..1.5,
        ) {
            let f = UniPoly::new(coeffs);
            let d = f.eval_map(&Dual::seed(x), |c| Dual::constant(*c));
            let h = 1e-6;
            let fd = (f.eval(&(x + h)) - f.eval(&(x - h))) / (2.0 * h);
            let scale = 1.0f64.max(fd.abs());
            prop_assert!((d.deriv - fd).abs() <= 1e-6 * scale,
                "dual {} vs fd {}", d.deriv, fd);
        }

        #[test]
        fn product_rule_exact(a in -5.0f64..5.0, b in -5.0f64..5.0,
                              c in -5.0f64..5.0, d in -5.0f64..5.0) {
            let x = Dual::new(a, b);
            let y = Dual::new(c, d);
            let p = x * y;
            prop_assert_eq!(p.value, a * c);
            prop_assert_eq!(p.deriv, a * d + b * c);
        }
    }
}
