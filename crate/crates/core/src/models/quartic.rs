use crate::elementary::{self, WordProgram};
use crate::error::Result;
use crate::mass::MassStructure;
use crate::model::{DerivativeTensors, Gradients, HamiltonianModel, Potential};
use crate::real::{Real, Scalar};
use crate::word::Word;

/// `H = ½p² + ¼q⁴` in one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticOscillator<T> {
    mass: MassStructure<T>,
}

impl<T: Real> QuarticOscillator<T> {
    pub fn new() -> Self {
        Self {
            mass: MassStructure::Identity { dim: 1 },
        }
    }

    /// `dⁿ/dqⁿ (q⁴/4)`.
    fn derivative(q: T, n: usize) -> T {
        match n {
            0 => q.powi(4) * T::lit(0.25),
            1 => q.powi(3),
            2 => T::lit(3.0) * q * q,
            3 => T::lit(6.0) * q,
            4 => T::lit(6.0),
            _ => T::zero(),
        }
    }
}

impl<T: Real> Default for QuarticOscillator<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> Potential<T> for QuarticOscillator<T> {
    fn eval<S: Scalar<T>>(&self, q: &[S]) -> S {
        q[0].powi(4).scale(T::lit(0.25))
    }
}

impl<T: Real> DerivativeTensors<T> for QuarticOscillator<T> {
    fn contract_into(&self, q: &[T], dirs: &[&[T]], out: &mut [T]) {
        let c = Self::derivative(q[0], dirs.len() + 1);
        out[0] = dirs.iter().fold(c, |acc, d| acc * d[0]);
    }
}

impl<T: Real> HamiltonianModel<T> for QuarticOscillator<T> {
    fn dim(&self) -> usize {
        1
    }

    fn mass(&self) -> &MassStructure<T> {
        &self.mass
    }

    fn potential(&self, q: &[T]) -> T {
        Self::derivative(q[0], 0)
    }

    fn grad_potential(&self, q: &[T]) -> Vec<T> {
        vec![Self::derivative(q[0], 1)]
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

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let m = QuarticOscillator::<f64>::new();
        assert_eq!(m.word_value(&w("DpDp"), &[1.0], &[1.0]).unwrap(), 3.0);
        assert_eq!(m.word_value(&w("Dg"), &[1.0], &[0.0]).unwrap(), 1.0);
        assert_eq!(m.word_value(&Word::dbar3(), &[1.0], &[0.0]).unwrap(), 6.0);
        assert_eq!(m.word_grad_q(&w("DpDp"), &[1.0], &[1.0]).unwrap(), vec![6.0]);
        assert_eq!(m.word_grad_p(&w("DpDp"), &[1.0], &[1.0]).unwrap(), vec![6.0]);
    }

    #[test]
    fn single_precision_works() {
        let m = QuarticOscillator::<f32>::new();
        assert_eq!(m.word_value(&w("DpDp"), &[1.0], &[2.0]).unwrap(), 12.0);
    }
}
