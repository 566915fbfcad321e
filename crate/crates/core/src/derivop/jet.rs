use std::ops::{Add, Mul, Neg, Sub};

use crate::real::{Real, Scalar};

/// Highest Taylor degree a [`Jet`] carries.
pub const MAX_DEGREE: usize = 8;

/// Truncated univariate Taylor series `Σ cₖ εᵏ`, `k ≤ degree ≤ 8`.
///
/// Coefficients above `degree` are always zero, so a constant is a degree-0
/// jet and mixing degrees truncates at the larger one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    coeffs: [T; MAX_DEGREE + 1],
    degree: usize,
}

impl<T: Real> Jet<T> {
    pub fn constant(c: T, degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE, "jet degree {degree} exceeds {MAX_DEGREE}");
        let mut coeffs = [T::zero(); MAX_DEGREE + 1];
        coeffs[0] = c;
        Self { coeffs, degree }
    }

    /// `c + slope·ε`.
    pub fn variable(c: T, slope: T, degree: usize) -> Self {
        let mut j = Self::constant(c, degree);
        if degree >= 1 {
            j.coeffs[1] = slope;
        }
        j
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs[..=self.degree]
    }

    pub fn coeff(&self, k: usize) -> T {
        if k <= self.degree {
            self.coeffs[k]
        } else {
            T::zero()
        }
    }

    /// `k`-th derivative in `ε` at 0, i.e. `k! cₖ`.
    pub fn derivative(&self, k: usize) -> T {
        let mut f = T::one();
        for i in 2..=k {
            f = f * T::lit(i as f64);
        }
        self.coeff(k) * f
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let degree = self.degree.max(rhs.degree);
        let mut coeffs = [T::zero(); MAX_DEGREE + 1];
        for (k, c) in coeffs.iter_mut().enumerate().take(degree + 1) {
            *c = self.coeffs[k] + rhs.coeffs[k];
        }
        Self { coeffs, degree }
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for c in self.coeffs.iter_mut() {
            *c = -*c;
        }
        self
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let degree = self.degree.max(rhs.degree);
        let mut coeffs = [T::zero(); MAX_DEGREE + 1];
        for i in 0..=self.degree {
            let a = self.coeffs[i];
            if a == T::zero() {
                continue;
            }
            for j in 0..=(degree - i).min(rhs.degree) {
                coeffs[i + j] += a * rhs.coeffs[j];
            }
        }
        Self { coeffs, degree }
    }
}

impl<T: Real> Scalar<T> for Jet<T> {
    fn constant(c: T) -> Self {
        Jet::constant(c, 0)
    }

    fn scale(mut self, c: T) -> Self {
        for x in self.coeffs.iter_mut() {
            *x = *x * c;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_no_higher_terms() {
        let c = Jet::constant(3.0, 4);
        assert_eq!(c.coeffs(), &[3.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn product_truncates() {
        // (1 + ε)^5 truncated at degree 3 → 1, 5, 10, 10
        let x = Jet::variable(1.0, 1.0, 3);
        let y = Scalar::powi(&x, 5);
        assert_eq!(y.coeffs(), &[1.0, 5.0, 10.0, 10.0]);
        assert_eq!(y.derivative(3), 60.0);
    }

    #[test]
    fn mixed_degree_broadcasts_constants() {
        let x = Jet::variable(2.0, 1.0, 2);
        let k = <Jet<f64> as Scalar<f64>>::constant(3.0);
        let y = k * x * x;
        assert_eq!(y.coeffs(), &[12.0, 12.0, 3.0]);
    }
}
