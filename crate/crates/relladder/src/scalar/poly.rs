//! Dense univariate polynomials over an arbitrary scalar ring.

use super::{One, Rat, Ring, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Coefficients in ascending powers; the leading (last) coefficient is
/// nonzero unless the polynomial is zero (empty coefficient list).
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<T> {
    coeffs: Vec<T>,
}

impl<T: Ring> UniPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate.
    pub fn x() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    pub fn monomial(c: T, power: usize) -> Self {
        let mut coeffs = vec![T::zero(); power];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Evaluate after mapping every coefficient into another ring.
    pub fn eval_map<U: Ring>(&self, x: &U, lift: impl Fn(&T) -> U) -> U {
        let mut acc = U::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + lift(c);
        }
        acc
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> UniPoly<U> {
        UniPoly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::new(vec![]);
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        let mut k = T::one();
        for c in &self.coeffs[1..] {
            out.push(c.clone() * k.clone());
            k = k + T::one();
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut out = vec![T::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        Self::new(out)
    }

    /// Drop all terms of degree > `deg`.
    pub fn truncated(&self, deg: usize) -> Self {
        Self::new(self.coeffs.iter().take(deg + 1).cloned().collect())
    }

    /// Index of the lowest nonzero coefficient (valuation); `None` if zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Divide out `x^k`; panics if the low-order coefficients are nonzero.
    pub fn shift_down(&self, k: usize) -> Self {
        assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()));
        Self::new(self.coeffs.iter().skip(k).cloned().collect())
    }
}

impl<T: Ring> Add for UniPoly<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        Self::new(out)
    }
}

impl<T: Ring> Sub for UniPoly<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - rhs.coeff(k));
        }
        Self::new(out)
    }
}

impl<T: Ring> Mul for UniPoly<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::new(vec![]);
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl<T: Ring> Neg for UniPoly<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<T: Ring> Zero for UniPoly<T> {
    fn zero() -> Self {
        Self { coeffs: vec![] }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Ring> One for UniPoly<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Ring + Div<Output = T>> UniPoly<T> {
    /// Euclidean division (coefficients must form a field).
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut quot = vec![T::zero(); self.coeffs.len().saturating_sub(d)];
        while let Some(rd) = rem.degree() {
            if rd < d {
                break;
            }
            let factor = rem.leading().unwrap().clone() / lead.clone();
            quot[rd - d] = factor.clone();
            rem = rem - divisor.scale(&factor).shift_up(rd - d);
        }
        (Self::new(quot), rem)
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(lead) if !lead.is_one() => {
                a.scale(&(T::one() / lead))
            }
            _ => a,
        }
    }
}

/// Exact Lagrange interpolation through distinct sample points.
pub fn interpolate(points: &[(Rat, Rat)]) -> UniPoly<Rat> {
    let mut acc = UniPoly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = UniPoly::constant(yi.clone());
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let denom = xi - xj;
            assert!(!denom.is_zero(), "interpolation nodes must be distinct");
            let lin = UniPoly::new(vec![-xj / &denom, Rat::one() / denom]);
            basis = basis * lin;
        }
        acc = acc + basis;
    }
    acc
}

/// Resultant of two rational polynomials via Gaussian elimination on the
/// Sylvester matrix.
pub fn resultant(f: &UniPoly<Rat>, g: &UniPoly<Rat>) -> Rat {
    let (m, n) = match (f.degree(), g.degree()) {
        (Some(m), Some(n)) => (m, n),
        _ => return Rat::zero(),
    };
    if m == 0 {
        return pow_rat(&f.coeff(0), n);
    }
    if n == 0 {
        return pow_rat(&g.coeff(0), m);
    }
    let size = m + n;
    let mut mat = vec![vec![Rat::zero(); size]; size];
    for row in 0..n {
        for k in 0..=m {
            mat[row][row + k] = f.coeff(m - k);
        }
    }
    for row in 0..m {
        for k in 0..=n {
            mat[n + row][row + k] = g.coeff(n - k);
        }
    }
    // determinant by fraction-friendly elimination
    let mut det = Rat::one();
    for col in 0..size {
        let pivot = (col..size).find(|&r| !mat[r][col].is_zero());
        let Some(pr) = pivot else {
            return Rat::zero();
        };
        if pr != col {
            mat.swap(pr, col);
            det = -det;
        }
        let p = mat[col][col].clone();
        det = det * p.clone();
        for r in col + 1..size {
            if mat[r][col].is_zero() {
                continue;
            }
            let factor = &mat[r][col] / &p;
            for c in col..size {
                let delta = &factor * &mat[col][c];
                mat[r][c] = &mat[r][c] - &delta;
            }
        }
    }
    det
}

/// Discriminant of a rational polynomial, `(-1)^{d(d-1)/2} Res(f, f') / lc(f)`.
pub fn discriminant(f: &UniPoly<Rat>) -> Rat {
    let d = f.degree().expect("discriminant of zero polynomial");
    assert!(d >= 1);
    let res = resultant(f, &f.derivative());
    let sign = if (d * (d - 1) / 2) % 2 == 0 {
        Rat::one()
    } else {
        -Rat::one()
    };
    sign * res / f.leading().unwrap().clone()
}

fn pow_rat(base: &Rat, exp: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..exp {
        acc = acc * base;
    }
    acc
}

impl fmt::Display for UniPoly<Rat> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    #[test]
    fn difference_of_squares() {
        let one_plus = UniPoly::new(vec![rat(1, 1), rat(1, 1)]);
        let one_minus = UniPoly::new(vec![rat(1, 1), rat(-1, 1)]);
        assert_eq!(
            one_plus * one_minus,
            UniPoly::new(vec![rat(1, 1), rat(0, 1), rat(-1, 1)])
        );
    }

    #[test]
    fn multiply_by_one_is_identity() {
        let p = UniPoly::new(vec![rat(2, 1), rat(-4, 1), rat(1, 1)]);
        assert_eq!(p.clone() * UniPoly::one(), p);
    }

    #[test]
    fn product_of_linear_factors() {
        // (1-p)(2-p) = 2 - 3p + p^2
        let a = UniPoly::new(vec![rat(1, 1), rat(-1, 1)]);
        let b = UniPoly::new(vec![rat(2, 1), rat(-1, 1)]);
        assert_eq!(
            a * b,
            UniPoly::new(vec![rat(2, 1), rat(-3, 1), rat(1, 1)])
        );
    }

    #[test]
    fn degree_adds_on_multiplication() {
        let a = UniPoly::new(vec![rat(1, 2), rat(3, 1), rat(5, 7)]);
        let b = UniPoly::new(vec![rat(0, 1), rat(1, 3)]);
        assert_eq!((a.clone() * b.clone()).degree(), Some(3));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = UniPoly::new(vec![rat(3, 5), rat(-2, 1), rat(0, 1), rat(7, 3)]);
        let pts: Vec<_> = (0..5)
            .map(|k| {
                let x = rat(k, 1);
                let y = p.eval(&x);
                (x, y)
            })
            .collect();
        assert_eq!(interpolate(&pts), p);
    }

    #[test]
    fn resultant_detects_common_root() {
        // f = (x-2)(x+1), g = (x-2)(x-5): shared root => resultant 0
        let f = UniPoly::new(vec![rat(-2, 1), rat(-1, 1), rat(1, 1)]);
        let g = UniPoly::new(vec![rat(10, 1), rat(-7, 1), rat(1, 1)]);
        assert!(resultant(&f, &g).is_zero());
        let h = UniPoly::new(vec![rat(1, 1), rat(1, 1)]);
        assert!(!resultant(&f, &h).is_zero());
    }

    #[test]
    fn discriminant_of_quadratic() {
        // x^2 - 3x + 2 => disc = 1
        let f = UniPoly::new(vec![rat(2, 1), rat(-3, 1), rat(1, 1)]);
        assert_eq!(discriminant(&f), rat(1, 1));
        // double root: disc = 0
        let g = UniPoly::new(vec![rat(1, 1), rat(-2, 1), rat(1, 1)]);
        assert!(discriminant(&g).is_zero());
    }

    #[test]
    fn gcd_of_shared_factor() {
        let shared = UniPoly::new(vec![rat(-3, 1), rat(1, 1)]);
        let f = shared.clone() * UniPoly::new(vec![rat(1, 1), rat(1, 1)]);
        let g = shared.clone() * UniPoly::new(vec![rat(4, 1), rat(1, 1)]);
        assert_eq!(f.gcd(&g), shared);
    }

    proptest! {
        #[test]
        fn mul_matches_pointwise_eval(
            a in proptest::collection::vec((-6i64..=6, 1i64..=4), 0..6),
            b in proptest::collection::vec((-6i64..=6, 1i64..=4), 0..6),
            x in (-5i64..=5, 1i64..=3),
        ) {
            let pa = UniPoly::new(a.into_iter().map(|(n, d)| rat(n, d)).collect());
            let pb = UniPoly::new(b.into_iter().map(|(n, d)| rat(n, d)).collect());
            let pt = rat(x.0, x.1);
            let lhs = (pa.clone() * pb.clone()).eval(&pt);
            prop_assert_eq!(lhs, pa.eval(&pt) * pb.eval(&pt));
        }
    }
}
