use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use crate::real::{Real, Scalar};

/// Layout of a multivariate truncated Taylor algebra: generator `g` satisfies
/// `η_g^(degrees[g] + 1) = 0`. Coefficients are stored row-major over the
/// multi-index, last generator fastest.
#[derive(Debug, PartialEq, Eq)]
pub struct Shape {
    degrees: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
    /// Every `(i, j, k)` with `index(i) + index(j) = index(k)` inside the box.
    products: Vec<(u32, u32, u32)>,
}

impl Shape {
    pub fn new(degrees: Vec<usize>) -> Rc<Self> {
        let mut strides = vec![1; degrees.len()];
        for g in (0..degrees.len().saturating_sub(1)).rev() {
            strides[g] = strides[g + 1] * (degrees[g + 1] + 1);
        }
        let len = degrees.iter().map(|d| d + 1).product::<usize>();
        let unflatten = |mut i: usize| -> Vec<usize> {
            let mut idx = vec![0; degrees.len()];
            for g in 0..degrees.len() {
                idx[g] = i / strides[g];
                i %= strides[g];
            }
            idx
        };
        let indices: Vec<Vec<usize>> = (0..len).map(unflatten).collect();
        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if a.iter().zip(b).zip(&degrees).all(|((x, y), d)| x + y <= *d) {
                    let k: usize = a
                        .iter()
                        .zip(b)
                        .zip(&strides)
                        .map(|((x, y), s)| (x + y) * s)
                        .sum();
                    products.push((i as u32, j as u32, k as u32));
                }
            }
        }
        Rc::new(Self {
            degrees,
            strides,
            len,
            products,
        })
    }

    pub fn generators(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, g: usize) -> usize {
        self.degrees[g]
    }

    pub fn flat(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }
}

/// Element of the algebra described by a [`Shape`]. Plain constants carry no
/// shape and broadcast against shaped operands.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiJet<T> {
    shape: Option<Rc<Shape>>,
    coeffs: Vec<T>,
}

impl<T: Real> MultiJet<T> {
    pub fn constant(c: T) -> Self {
        Self {
            shape: None,
            coeffs: vec![c],
        }
    }

    /// `c + η_g`.
    pub fn generator(shape: &Rc<Shape>, g: usize, c: T) -> Self {
        let mut coeffs = vec![T::zero(); shape.len];
        coeffs[0] = c;
        coeffs[shape.strides[g]] = T::one();
        Self {
            shape: Some(shape.clone()),
            coeffs,
        }
    }

    fn lift(&self, shape: &Rc<Shape>) -> Vec<T> {
        match &self.shape {
            Some(_) => self.coeffs.clone(),
            None => {
                let mut v = vec![T::zero(); shape.len];
                v[0] = self.coeffs[0];
                v
            }
        }
    }

    fn common_shape(a: &Self, b: &Self) -> Option<Rc<Shape>> {
        match (&a.shape, &b.shape) {
            (Some(x), Some(y)) => {
                debug_assert!(Rc::ptr_eq(x, y) || x == y, "mixed jet shapes");
                Some(x.clone())
            }
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// Coefficient of the monomial `Π η_g^index[g]`.
    pub fn coeff(&self, index: &[usize]) -> T {
        match &self.shape {
            None => {
                if index.iter().all(|&i| i == 0) {
                    self.coeffs[0]
                } else {
                    T::zero()
                }
            }
            Some(s) => {
                if index.iter().zip(&s.degrees).any(|(i, d)| i > d) {
                    return T::zero();
                }
                self.coeffs[s.flat(index)]
            }
        }
    }

    /// The part linear in generator `g`, divided by `η_g` (i.e. `∂/∂η_g` at
    /// `η_g = 0`). Requires `degree(g) == 1`.
    pub fn linear_part(&self, g: usize) -> Self {
        let Some(s) = &self.shape else {
            return Self::constant(T::zero());
        };
        debug_assert_eq!(s.degrees[g], 1);
        let stride = s.strides[g];
        let mut coeffs = vec![T::zero(); s.len];
        for (k, c) in coeffs.iter_mut().enumerate() {
            if (k / stride) % 2 == 0 {
                *c = self.coeffs[k + stride];
            }
        }
        Self {
            shape: Some(s.clone()),
            coeffs,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

impl<T: Real> Add for MultiJet<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match Self::common_shape(&self, &rhs) {
            None => Self::constant(self.coeffs[0] + rhs.coeffs[0]),
            Some(s) => {
                let mut a = self.lift(&s);
                let b = rhs.lift(&s);
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += *y;
                }
                Self {
                    shape: Some(s),
                    coeffs: a,
                }
            }
        }
    }
}

impl<T: Real> Neg for MultiJet<T> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for c in self.coeffs.iter_mut() {
            *c = -*c;
        }
        self
    }
}

impl<T: Real> Sub for MultiJet<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Mul for MultiJet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        match (&self.shape, &rhs.shape) {
            (None, None) => Self::constant(self.coeffs[0] * rhs.coeffs[0]),
            (None, Some(_)) => rhs.scale(self.coeffs[0]),
            (Some(_), None) => self.scale(rhs.coeffs[0]),
            (Some(s), Some(_)) => {
                let mut out = vec![T::zero(); s.len];
                for &(i, j, k) in &s.products {
                    let a = self.coeffs[i as usize];
                    if a != T::zero() {
                        out[k as usize] += a * rhs.coeffs[j as usize];
                    }
                }
                Self {
                    shape: self.shape.clone(),
                    coeffs: out,
                }
            }
        }
    }
}

impl<T: Real> Scalar<T> for MultiJet<T> {
    fn constant(c: T) -> Self {
        MultiJet::constant(c)
    }

    fn scale(mut self, c: T) -> Self {
        for x in self.coeffs.iter_mut() {
            *x = *x * c;
        }
        self
    }
}
