use crate::elementary::{self, WordProgram};
use crate::error::{Error, Result};
use crate::mass::{check_symmetric, MassStructure};
use crate::model::{DerivativeTensors, Gradients, HamiltonianModel, Potential};
use crate::real::{Real, Scalar};
use crate::word::Word;

/// `H = ½ pᵀ M p + ½ qᵀ K q`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel<T> {
    mass: MassStructure<T>,
    /// Row-major `dim × dim`, symmetric.
    stiffness: Vec<T>,
}

impl<T: Real> QuadraticModel<T> {
    pub fn new(mass: MassStructure<T>, stiffness: Vec<T>) -> Result<Self> {
        let dim = mass.dim();
        if stiffness.len() != dim * dim {
            return Err(Error::InvalidStiffness(format!(
                "expected {} entries, got {}",
                dim * dim,
                stiffness.len()
            )));
        }
        if stiffness.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidStiffness("non-finite entry".into()));
        }
        check_symmetric(dim, &stiffness).map_err(Error::InvalidStiffness)?;
        Ok(Self { mass, stiffness })
    }

    /// `H = ½p² + ½q²`.
    pub fn harmonic_1d() -> Self {
        Self {
            mass: MassStructure::Identity { dim: 1 },
            stiffness: vec![T::one()],
        }
    }

    pub fn stiffness(&self) -> &[T] {
        &self.stiffness
    }

    fn k_apply(&self, v: &[T], out: &mut [T]) {
        let n = v.len();
        for (row, o) in self.stiffness.chunks_exact(n).zip(out.iter_mut()) {
            *o = crate::real::dot(row, v);
        }
    }
}

impl<T: Real> Potential<T> for QuadraticModel<T> {
    fn eval<S: Scalar<T>>(&self, q: &[S]) -> S {
        let n = q.len();
        let mut acc = S::constant(T::zero());
        for i in 0..n {
            for j in 0..n {
                let k = self.stiffness[i * n + j];
                if k != T::zero() {
                    acc = acc + (q[i].clone() * q[j].clone()).scale(k * T::lit(0.5));
                }
            }
        }
        acc
    }
}

impl<T: Real> DerivativeTensors<T> for QuadraticModel<T> {
    fn contract_into(&self, q: &[T], dirs: &[&[T]], out: &mut [T]) {
        match dirs {
            [] => self.k_apply(q, out),
            [d] => self.k_apply(d, out),
            _ => out.iter_mut().for_each(|o| *o = T::zero()),
        }
    }
}

impl<T: Real> HamiltonianModel<T> for QuadraticModel<T> {
    fn dim(&self) -> usize {
        self.mass.dim()
    }

    fn mass(&self) -> &MassStructure<T> {
        &self.mass
    }

    fn potential(&self, q: &[T]) -> T {
        let mut kq = vec![T::zero(); q.len()];
        self.k_apply(q, &mut kq);
        crate::real::dot(q, &kq) * T::lit(0.5)
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_stiffness() {
        let m = MassStructure::identity(2).unwrap();
        assert!(QuadraticModel::new(m.clone(), vec![1.0, 0.5, 0.0, 1.0]).is_err());
        assert!(QuadraticModel::new(m, vec![1.0, 0.5, 0.5]).is_err());
    }

    #[test]
    fn third_derivative_words_vanish() {
        let m = MassStructure::dense(2, vec![2.0, 0.3, 0.3, 1.0]).unwrap();
        let k = QuadraticModel::new(m, vec![1.0, -0.4, -0.4, 2.0]).unwrap();
        let (q, p) = ([0.3, -0.8], [1.1, 0.2]);
        assert_eq!(k.word_value(&Word::dbar3(), &q, &p).unwrap(), 0.0);
        assert_eq!(k.word_value(&"DpDpDp".parse().unwrap(), &q, &p).unwrap(), 0.0);
        assert!(k.word_grad_q(&Word::dbar3(), &q, &p).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn harmonic_words() {
        let h = QuadraticModel::<f64>::harmonic_1d();
        // D̄V = q², D̄²V = 2q², D̄³V = 4q², 𝒟²V = p²
        let (q, p) = ([0.7], [1.3]);
        let v = |s: &str| h.word_value(&s.parse().unwrap(), &q, &p).unwrap();
        assert!((v("Dg") - 0.49).abs() < 1e-15);
        assert!((v("DgDg") - 0.98).abs() < 1e-15);
        assert!((v("DgDgDg") - 1.96).abs() < 1e-15);
        assert!((v("DpDp") - 1.69).abs() < 1e-15);
    }
}
