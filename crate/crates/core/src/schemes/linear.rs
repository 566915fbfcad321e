//! Kick–move–kick for quadratic Hamiltonians `½pᵀMp + ½qᵀKq` with modified
//! mass and stiffness matrices.
//!
//! For the unit oscillator the closed-form pair `m = sin τ/τ`,
//! `k = (2/τ) tan(τ/2)` reproduces the exact rotation. For general `M, K` the
//! truncated series
//!
//! ```text
//! M_τ = M − (τ²/6) M(KM) + (τ⁴/120) M(KM)² − (τ⁶/5040) M(KM)³
//! K_τ = K + (τ²/12) K(MK) + (τ⁴/120) K(MK)² + (17τ⁶/20160) K(MK)³
//! ```
//!
//! is kept through `τ^(N−2)` for order `N`.

use crate::config::Order;
use crate::error::{Error, Result};
use crate::mass::{check_symmetric, MassStructure};
use crate::phase::PhaseState;
use crate::real::{dot, Real};

/// `(m, k)` for the unit harmonic oscillator. Requires `0 < τ < π`.
pub fn modified_coeffs_1d<T: Real>(tau: T) -> Result<(T, T)> {
    let pi = T::lit(std::f64::consts::PI);
    if !(tau.is_finite() && tau > T::zero() && tau < pi) {
        return Err(Error::InvalidTimestep(tau.to_f64().unwrap_or(f64::NAN)));
    }
    let m = tau.sin() / tau;
    let k = T::lit(2.0) / tau * (tau * T::lit(0.5)).tan();
    Ok((m, k))
}

fn matmul<T: Real>(n: usize, a: &[T], b: &[T]) -> Vec<T> {
    let mut c = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == T::zero() {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

fn matvec<T: Real>(n: usize, a: &[T], v: &[T], out: &mut [T]) {
    for (row, o) in a.chunks_exact(n).zip(out.iter_mut()) {
        *o = dot(row, v);
    }
}

/// Truncated series `(M_τ, K_τ)`, both dense row-major.
pub fn modified_matrices<T: Real>(
    mass: &MassStructure<T>,
    stiffness: &[T],
    tau: T,
    order: Order,
) -> Result<(Vec<T>, Vec<T>)> {
    let n = mass.dim();
    if stiffness.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: stiffness.len(),
        });
    }
    check_symmetric(n, stiffness).map_err(Error::InvalidStiffness)?;
    let m = mass.to_dense();
    let km = matmul(n, stiffness, &m);
    let mk = matmul(n, &m, stiffness);
    let m_coeffs = [-1.0 / 6.0, 1.0 / 120.0, -1.0 / 5040.0];
    let k_coeffs = [1.0 / 12.0, 1.0 / 120.0, 17.0 / 20160.0];
    let terms = (order.as_u32() as usize - 2) / 2;

    let mut m_tau = m.clone();
    let mut k_tau = stiffness.to_vec();
    // M(KM)ʲ and K(MK)ʲ
    let mut m_pow = m;
    let mut k_pow = stiffness.to_vec();
    let tau2 = tau * tau;
    let mut t = T::one();
    for j in 0..terms {
        m_pow = matmul(n, &m_pow, &km);
        k_pow = matmul(n, &k_pow, &mk);
        t *= tau2;
        let (cm, ck) = (T::lit(m_coeffs[j]) * t, T::lit(k_coeffs[j]) * t);
        for i in 0..n * n {
            m_tau[i] += cm * m_pow[i];
            k_tau[i] += ck * k_pow[i];
        }
    }
    Ok((m_tau, k_tau))
}

/// Kick–move–kick with constant matrices: `p −= ½τK_τq`, `q += τM_τp`,
/// `p −= ½τK_τq`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearKickMoveKick<T> {
    dim: usize,
    tau: T,
    m_tau: Vec<T>,
    k_tau: Vec<T>,
}

impl<T: Real> LinearKickMoveKick<T> {
    pub fn new(mass: &MassStructure<T>, stiffness: &[T], tau: T, order: Order) -> Result<Self> {
        if !(tau.is_finite() && tau > T::zero()) {
            return Err(Error::InvalidTimestep(tau.to_f64().unwrap_or(f64::NAN)));
        }
        let (m_tau, k_tau) = modified_matrices(mass, stiffness, tau, order)?;
        Ok(Self {
            dim: mass.dim(),
            tau,
            m_tau,
            k_tau,
        })
    }

    /// The exact propagator of `H = ½p² + ½q²` built from [`modified_coeffs_1d`].
    pub fn harmonic_exact(tau: T) -> Result<Self> {
        let (m, k) = modified_coeffs_1d(tau)?;
        Ok(Self {
            dim: 1,
            tau,
            m_tau: vec![m],
            k_tau: vec![k],
        })
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn modified_mass(&self) -> &[T] {
        &self.m_tau
    }

    pub fn modified_stiffness(&self) -> &[T] {
        &self.k_tau
    }

    pub fn step(&self, state: &PhaseState<T>) -> Result<PhaseState<T>> {
        let n = self.dim;
        if state.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: state.dim(),
            });
        }
        let half = self.tau * T::lit(0.5);
        let mut q = state.q().to_vec();
        let mut p = state.p().to_vec();
        let mut tmp = vec![T::zero(); n];
        matvec(n, &self.k_tau, &q, &mut tmp);
        p.iter_mut().zip(&tmp).for_each(|(p, f)| *p -= half * *f);
        matvec(n, &self.m_tau, &p, &mut tmp);
        q.iter_mut().zip(&tmp).for_each(|(q, v)| *q += self.tau * *v);
        matvec(n, &self.k_tau, &q, &mut tmp);
        p.iter_mut().zip(&tmp).for_each(|(p, f)| *p -= half * *f);
        PhaseState::new(q, p)
    }

    pub fn integrate(&self, state0: &PhaseState<T>, n_steps: usize) -> Result<PhaseState<T>> {
        let mut s = state0.clone();
        for _ in 0..n_steps {
            s = self.step(&s)?;
        }
        Ok(s)
    }
}
