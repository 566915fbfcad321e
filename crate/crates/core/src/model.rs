//! The model contract shared by the integrators, the generic oracle and the
//! built-in systems.

use crate::elementary::WordProgram;
use crate::error::Result;
use crate::mass::MassStructure;
use crate::phase::PhaseState;
use crate::real::{Real, Scalar};
use crate::word::{Word, MAX_WORD_LEN};

/// A potential `V(q)` written once over any [`Scalar`], so it can be evaluated
/// on reals and on truncated Taylor jets alike.
pub trait Potential<T: Real> {
    fn eval<S: Scalar<T>>(&self, q: &[S]) -> S;
}

/// Closed-form contractions of the derivative tensors of `V`.
pub trait DerivativeTensors<T: Real> {
    /// `out = ∇ᵏ⁺¹V(q)[dirs₁, …, dirsₖ, ·]` with `k = dirs.len()`. With no
    /// directions this is the gradient.
    fn contract_into(&self, q: &[T], dirs: &[&[T]], out: &mut [T]);

    fn contract(&self, q: &[T], dirs: &[&[T]]) -> Vec<T> {
        let mut out = vec![T::zero(); q.len()];
        self.contract_into(q, dirs, &mut out);
        out
    }
}

/// Gradients of a weighted sum of word values.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub q: Vec<T>,
    pub p: Option<Vec<T>>,
}

/// A separable Hamiltonian `H = ½ pᵀ M p + V(q)` together with word oracles.
///
/// Implementations must agree with the generic jet oracle in
/// [`crate::derivop`]; see `conformance` helpers there.
pub trait HamiltonianModel<T: Real>: Sync {
    fn dim(&self) -> usize;

    fn mass(&self) -> &MassStructure<T>;

    fn potential(&self, q: &[T]) -> T;

    fn grad_potential(&self, q: &[T]) -> Vec<T>;

    fn word_value(&self, word: &Word, q: &[T], p: &[T]) -> Result<T>;

    fn word_grad_q(&self, word: &Word, q: &[T], p: &[T]) -> Result<Vec<T>>;

    fn word_grad_p(&self, word: &Word, q: &[T], p: &[T]) -> Result<Vec<T>>;

    fn max_word_order_supported(&self) -> usize {
        MAX_WORD_LEN
    }

    /// Gradients of `Σᵢ weights[i]·wordᵢ(q, p)` over the words of `program`.
    ///
    /// The default sums per-word gradients; models with a shared evaluation
    /// graph override it.
    fn combination_gradients(
        &self,
        program: &WordProgram,
        weights: &[T],
        q: &[T],
        p: &[T],
        with_p: bool,
    ) -> Result<Gradients<T>> {
        let n = q.len();
        let mut gq = vec![T::zero(); n];
        let mut gp = if with_p { Some(vec![T::zero(); n]) } else { None };
        for (word, &w) in program.words().iter().zip(weights) {
            if w == T::zero() {
                continue;
            }
            for (acc, g) in gq.iter_mut().zip(self.word_grad_q(word, q, p)?) {
                *acc += w * g;
            }
            if let Some(gp) = gp.as_mut() {
                for (acc, g) in gp.iter_mut().zip(self.word_grad_p(word, q, p)?) {
                    *acc += w * g;
                }
            }
        }
        Ok(Gradients { q: gq, p: gp })
    }

    fn kinetic(&self, p: &[T]) -> T {
        self.mass().kinetic(p)
    }

    fn energy(&self, state: &PhaseState<T>) -> T {
        self.kinetic(state.p()) + self.potential(state.q())
    }
}
