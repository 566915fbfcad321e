use crate::error::{Error, Result};
use crate::real::Real;

/// A point `(q, p)` in a `2 * dim` dimensional phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState<T> {
    q: Vec<T>,
    p: Vec<T>,
}

impl<T: Real> PhaseState<T> {
    /// Builds a state, rejecting mismatched lengths, empty vectors and
    /// non-finite entries.
    pub fn new(q: Vec<T>, p: Vec<T>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                got: p.len(),
            });
        }
        if q.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("q"));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("p"));
        }
        Ok(Self { q, p })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![T::zero(); dim], vec![T::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[T] {
        &self.q
    }

    pub fn p(&self) -> &[T] {
        &self.p
    }

    pub fn into_parts(self) -> (Vec<T>, Vec<T>) {
        (self.q, self.p)
    }

    /// Same positions, momenta negated. Used for time-reversal checks.
    pub fn with_reversed_momentum(&self) -> Self {
        Self {
            q: self.q.clone(),
            p: self.p.iter().map(|&x| -x).collect(),
        }
    }

    /// Euclidean distance over all `2 * dim` components.
    pub fn distance(&self, other: &Self) -> T {
        let pairs = self.q.iter().zip(&other.q).chain(self.p.iter().zip(&other.p));
        crate::real::sum(pairs.map(|(&a, &b)| (a - b) * (a - b))).sqrt()
    }
}
