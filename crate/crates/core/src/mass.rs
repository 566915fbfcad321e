use crate::error::{Error, Result};
use crate::real::Real;

/// The symmetric positive definite matrix `M` of the kinetic term `½ pᵀ M p`.
///
/// `M` also raises indices: the direction of the momentum derivative is `M p`
/// and the direction of the gradient derivative is `M ∇V`.
#[derive(Debug, Clone, PartialEq)]
pub enum MassStructure<T> {
    Identity { dim: usize },
    Diagonal(Vec<T>),
    /// Row-major `dim × dim`.
    Dense { dim: usize, data: Vec<T> },
}

impl<T: Real> MassStructure<T> {
    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMass("dimension must be positive".into()));
        }
        Ok(Self::Identity { dim })
    }

    pub fn diagonal(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidMass("dimension must be positive".into()));
        }
        if entries.iter().any(|&m| !(m.is_finite() && m > T::zero())) {
            return Err(Error::InvalidMass(
                "diagonal entries must be finite and positive".into(),
            ));
        }
        Ok(Self::Diagonal(entries))
    }

    /// Dense matrix; must be symmetric to 1e-12 relative and positive definite.
    pub fn dense(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidMass(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMass("non-finite entry".into()));
        }
        check_symmetric(dim, &data).map_err(Error::InvalidMass)?;
        cholesky(dim, &data)
            .ok_or_else(|| Error::InvalidMass("matrix is not positive definite".into()))?;
        Ok(Self::Dense { dim, data })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Identity { dim } | Self::Dense { dim, .. } => *dim,
            Self::Diagonal(d) => d.len(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Identity { .. })
    }

    /// `out = M v`.
    pub fn apply_into(&self, v: &[T], out: &mut [T]) {
        match self {
            Self::Identity { .. } => out.copy_from_slice(v),
            Self::Diagonal(d) => {
                for ((o, &m), &x) in out.iter_mut().zip(d).zip(v) {
                    *o = m * x;
                }
            }
            Self::Dense { dim, data } => {
                for (row, o) in data.chunks_exact(*dim).zip(out.iter_mut()) {
                    *o = crate::real::dot(row, v);
                }
            }
        }
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); v.len()];
        self.apply_into(v, &mut out);
        out
    }

    /// `M[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> T {
        match self {
            Self::Identity { .. } => {
                if i == j {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::Diagonal(d) => {
                if i == j {
                    d[i]
                } else {
                    T::zero()
                }
            }
            Self::Dense { dim, data } => data[i * dim + j],
        }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<T> {
        let n = self.dim();
        (0..n * n).map(|k| self.entry(k / n, k % n)).collect()
    }

    /// `½ pᵀ M p`.
    pub fn kinetic(&self, p: &[T]) -> T {
        let mp = self.apply(p);
        crate::real::dot(p, &mp) * T::lit(0.5)
    }
}

pub(crate) fn check_symmetric<T: Real>(dim: usize, data: &[T]) -> std::result::Result<(), String> {
    let scale = data.iter().fold(T::zero(), |m, x| m.max(x.abs())).max(T::min_positive_value());
    let tol = T::lit(1e-12) * scale;
    for i in 0..dim {
        for j in (i + 1)..dim {
            if (data[i * dim + j] - data[j * dim + i]).abs() > tol {
                return Err(format!("not symmetric at ({i}, {j})"));
            }
        }
    }
    Ok(())
}

/// Lower Cholesky factor, `None` when the matrix is not positive definite.
pub(crate) fn cholesky<T: Real>(dim: usize, a: &[T]) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut s = a[i * dim + j];
            for k in 0..j {
                s -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if s <= T::zero() || !s.is_finite() {
                    return None;
                }
                l[i * dim + i] = s.sqrt();
            } else {
                l[i * dim + j] = s / l[j * dim + j];
            }
        }
    }
    Some(l)
}
