//! Fermi–Pasta–Ulam α+β chain.
//!
//! `V(q) = Σₘ ½ω²qₘ² + Σ_b U(s_b)` with `U(s) = ½s² + (α/3)s³ + (β/4)s⁴` and
//! bonds `s_b = q_{b+1} − q_b` for `b = 0 … d−2`. The `periodic` flag adds the
//! closing bond `q₀ − q_{d−1}`. Unit masses.

use crate::elementary::{self, WordProgram};
use crate::error::{Error, Result};
use crate::mass::MassStructure;
use crate::model::{DerivativeTensors, Gradients, HamiltonianModel, Potential};
use crate::phase::PhaseState;
use crate::real::{sum, Real, Scalar};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq)]
pub struct FpuChain<T> {
    d: usize,
    omega2: T,
    alpha: T,
    beta: T,
    periodic: bool,
    mass: MassStructure<T>,
}

impl<T: Real> FpuChain<T> {
    pub fn new(d: usize, omega2: T, alpha: T, beta: T) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidConfig(format!("FPU chain needs d >= 2, got {d}")));
        }
        if !(omega2.is_finite() && omega2 >= T::zero()) {
            return Err(Error::InvalidConfig("omega2 must be finite and >= 0".into()));
        }
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidConfig("alpha and beta must be finite".into()));
        }
        Ok(Self {
            d,
            omega2,
            alpha,
            beta,
            periodic: false,
            mass: MassStructure::Identity { dim: d },
        })
    }

    /// `α = 0, β = 1, ω² = 0`.
    pub fn beta_chain(d: usize) -> Result<Self> {
        Self::new(d, T::zero(), T::zero(), T::one())
    }

    pub fn with_periodic(mut self, periodic: bool) -> Self {
        self.periodic = periodic;
        self
    }

    pub fn particles(&self) -> usize {
        self.d
    }

    pub fn omega2(&self) -> T {
        self.omega2
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    /// `(left, right)` sites of every bond, `s = q[right] − q[left]`.
    fn bonds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let open = (0..self.d - 1).map(|b| (b, b + 1));
        let wrap = self.periodic.then_some((self.d - 1, 0));
        open.chain(wrap)
    }

    /// `Uⁿ(s)`.
    fn bond_derivative(&self, s: T, n: usize) -> T {
        let (a, b) = (self.alpha, self.beta);
        match n {
            0 => s * s * T::lit(0.5) + a * s.powi(3) / T::lit(3.0) + b * s.powi(4) * T::lit(0.25),
            1 => s + a * s * s + b * s.powi(3),
            2 => T::one() + T::lit(2.0) * a * s + T::lit(3.0) * b * s * s,
            3 => T::lit(2.0) * a + T::lit(6.0) * b * s,
            4 => T::lit(6.0) * b,
            _ => T::zero(),
        }
    }

    /// `vⁿ(q)` for the on-site term `½ω²q²`.
    fn site_derivative(&self, q: T, n: usize) -> T {
        match n {
            0 => self.omega2 * q * q * T::lit(0.5),
            1 => self.omega2 * q,
            2 => self.omega2,
            _ => T::zero(),
        }
    }
}

impl<T: Real> Potential<T> for FpuChain<T> {
    fn eval<S: Scalar<T>>(&self, q: &[S]) -> S {
        let mut acc = S::constant(T::zero());
        if self.omega2 != T::zero() {
            for x in q {
                acc = acc + x.powi(2).scale(self.omega2 * T::lit(0.5));
            }
        }
        let third = T::one() / T::lit(3.0);
        for (l, r) in self.bonds() {
            let s = q[r].clone() - q[l].clone();
            let s2 = s.clone() * s.clone();
            let mut u = s2.clone().scale(T::lit(0.5));
            if self.alpha != T::zero() {
                u = u + (s2.clone() * s.clone()).scale(self.alpha * third);
            }
            if self.beta != T::zero() {
                u = u + (s2.clone() * s2).scale(self.beta * T::lit(0.25));
            }
            acc = acc + u;
        }
        acc
    }
}

impl<T: Real> DerivativeTensors<T> for FpuChain<T> {
    fn contract_into(&self, q: &[T], dirs: &[&[T]], out: &mut [T]) {
        let n = dirs.len() + 1;
        let onsite = self.omega2 != T::zero() && n <= 2;
        for (m, o) in out.iter_mut().enumerate() {
            *o = if onsite {
                dirs.iter().fold(self.site_derivative(q[m], n), |acc, d| acc * d[m])
            } else {
                T::zero()
            };
        }
        if n > 4 {
            return;
        }
        for (l, r) in self.bonds() {
            let s = q[r] - q[l];
            let c = dirs
                .iter()
                .fold(self.bond_derivative(s, n), |acc, d| acc * (d[r] - d[l]));
            out[r] += c;
            out[l] -= c;
        }
    }
}

impl<T: Real> HamiltonianModel<T> for FpuChain<T> {
    fn dim(&self) -> usize {
        self.d
    }

    fn mass(&self) -> &MassStructure<T> {
        &self.mass
    }

    fn potential(&self, q: &[T]) -> T {
        let sites = sum(q.iter().map(|&x| self.site_derivative(x, 0)));
        let bonds = sum(self.bonds().map(|(l, r)| self.bond_derivative(q[r] - q[l], 0)));
        sites + bonds
    }

    fn grad_potential(&self, q: &[T]) -> Vec<T> {
        self.contract(q, &[])
    }

    fn word_value(&self, word: &Word, q: &[T], p: &[T]) -> Result<T> {
        elementary::word_value(self, &self.mass, word, q, p)
    }

    fn word_grad_q(&self, word: &Word, q: &[T], p: &[T]) -> Result<Vec<T>> {
        Ok(elementary::word_gradients(self, &self.mass, word, q, p)?.q)
    }

    fn word_grad_p(&self, word: &Word, q: &[T], p: &[T]) -> Result<Vec<T>> {
        Ok(elementary::word_gradients(self, &self.mass, word, q, p)?
            .p
            .expect("momentum gradient requested"))
    }

    fn combination_gradients(
        &self,
        program: &WordProgram,
        weights: &[T],
        q: &[T],
        p: &[T],
        with_p: bool,
    ) -> Result<Gradients<T>> {
        elementary::combination_gradients(self, &self.mass, program, weights, q, p, with_p)
    }
}

/// Velocity profile used to seed an FPU run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSpec {
    /// Normal mode `k` of the free-ended chain, `pₘ ∝ cos(πk(m + ½)/d)`.
    /// `k = 1` is the lowest non-trivial mode and has zero total momentum.
    Mode(usize),
}

impl Default for ModeSpec {
    fn default() -> Self {
        ModeSpec::Mode(1)
    }
}

/// `q = 0` and momenta along `mode`, scaled so that `H = energy`.
///
/// The potential vanishes at the origin for every chain, so the energy is
/// purely kinetic.
pub fn fpu_initial_state<T: Real>(d: usize, energy: T, mode: ModeSpec) -> Result<PhaseState<T>> {
    if d < 2 {
        return Err(Error::InvalidConfig(format!("FPU chain needs d >= 2, got {d}")));
    }
    if !(energy.is_finite() && energy >= T::zero()) {
        return Err(Error::InvalidConfig("initial energy must be finite and >= 0".into()));
    }
    let ModeSpec::Mode(k) = mode;
    if k >= d {
        return Err(Error::InvalidConfig(format!("mode {k} out of range for d = {d}")));
    }
    if energy == T::zero() {
        return PhaseState::zeros(d);
    }
    let pi = T::lit(std::f64::consts::PI);
    let kk = T::lit(k as f64);
    let dd = T::lit(d as f64);
    let profile: Vec<T> = (0..d)
        .map(|m| (pi * kk * (T::lit(m as f64) + T::lit(0.5)) / dd).cos())
        .collect();
    let norm2 = sum(profile.iter().map(|&x| x * x));
    let scale = (T::lit(2.0) * energy / norm2).sqrt();
    PhaseState::new(vec![T::zero(); d], profile.into_iter().map(|x| x * scale).collect())
}
