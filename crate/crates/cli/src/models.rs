use hamsplit::elementary::WordProgram;
use hamsplit::models::ModeSpec;
use hamsplit::real::ratio;
use hamsplit::{
    fpu_initial_state, FpuChain, Gradients, HamiltonianModel, MassStructure, PhaseState, QuadraticModel,
    QuarticOscillator, Real, SchemeConfig, Word,
};

use crate::config::{Experiment, Initial, ModelSpec, Precision};
use crate::error::CliError;

/// One of the built-in systems behind a single type.
pub enum AnyModel<T> {
    Quadratic(QuadraticModel<T>),
    Quartic(QuarticOscillator<T>),
    Fpu(FpuChain<T>),
}

macro_rules! delegate {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            AnyModel::Quadratic($m) => $e,
            AnyModel::Quartic($m) => $e,
            AnyModel::Fpu($m) => $e,
        }
    };
}

impl<T: Real> HamiltonianModel<T> for AnyModel<T> {
    fn dim(&self) -> usize {
        delegate!(self, m => m.dim())
    }

    fn mass(&self) -> &MassStructure<T> {
        delegate!(self, m => m.mass())
    }

    fn potential(&self, q: &[T]) -> T {
        delegate!(self, m => m.potential(q))
    }

    fn grad_potential(&self, q: &[T]) -> Vec<T> {
        delegate!(self, m => m.grad_potential(q))
    }

    fn word_value(&self, word: &Word, q: &[T], p: &[T]) -> hamsplit::Result<T> {
        delegate!(self, m => m.word_value(word, q, p))
    }

    fn word_grad_q(&self, word: &Word, q: &[T], p: &[T]) -> hamsplit::Result<Vec<T>> {
        delegate!(self, m => m.word_grad_q(word, q, p))
    }

    fn word_grad_p(&self, word: &Word, q: &[T], p: &[T]) -> hamsplit::Result<Vec<T>> {
        delegate!(self, m => m.word_grad_p(word, q, p))
    }

    fn max_word_order_supported(&self) -> usize {
        delegate!(self, m => m.max_word_order_supported())
    }

    fn combination_gradients(
        &self,
        program: &WordProgram,
        weights: &[T],
        q: &[T],
        p: &[T],
        with_p: bool,
    ) -> hamsplit::Result<Gradients<T>> {
        delegate!(self, m => m.combination_gradients(program, weights, q, p, with_p))
    }

    fn kinetic(&self, p: &[T]) -> T {
        delegate!(self, m => m.kinetic(p))
    }

    fn energy(&self, state: &PhaseState<T>) -> T {
        delegate!(self, m => m.energy(state))
    }
}

fn config_err(e: hamsplit::Error) -> CliError {
    CliError::Config(e.to_string())
}

pub fn build_model<T: Real>(spec: &ModelSpec) -> Result<AnyModel<T>, CliError> {
    Ok(match *spec {
        ModelSpec::Harmonic => AnyModel::Quadratic(QuadraticModel::harmonic_1d()),
        ModelSpec::Quartic => AnyModel::Quartic(QuarticOscillator::new()),
        ModelSpec::Fpu { d, alpha, beta, omega2, periodic } => AnyModel::Fpu(
            FpuChain::new(d, T::lit(omega2), T::lit(alpha), T::lit(beta))
                .map_err(config_err)?
                .with_periodic(periodic),
        ),
    })
}

pub fn fpu_chain<T: Real>(spec: &ModelSpec, d: usize) -> Result<FpuChain<T>, CliError> {
    match *spec {
        ModelSpec::Fpu { alpha, beta, omega2, periodic, .. } => Ok(FpuChain::new(d, T::lit(omega2), T::lit(alpha), T::lit(beta))
            .map_err(config_err)?
            .with_periodic(periodic)),
        _ => Err(CliError::Config("this command needs model = \"fpu\"".into())),
    }
}

pub fn initial_state<T: Real>(initial: &Initial, dim: usize) -> Result<PhaseState<T>, CliError> {
    match initial {
        Initial::Explicit { q, p } => {
            let lift = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<_>>();
            PhaseState::new(lift(q), lift(p)).map_err(config_err)
        }
        Initial::FpuMode { energy, mode } => {
            fpu_initial_state(dim, T::lit(*energy), ModeSpec::Mode(*mode)).map_err(config_err)
        }
    }
}

/// `x` in `T`, taken as the exact fraction `1/k` when it is one, so that
/// step counts land on the requested end time in extended precision too.
pub fn step_size<T: Real>(x: f64) -> T {
    let k = (1.0 / x).round();
    if (1.0..1e12).contains(&k) && (1.0 / x - k).abs() <= 1e-9 * k {
        ratio(1, k as i64)
    } else {
        T::lit(x)
    }
}

pub fn push_tol<T: Real>(exp: &Experiment) -> T {
    match (exp.push_tol, exp.precision) {
        (Some(tol), _) => T::lit(tol),
        (None, Precision::DoubleDouble) => T::lit(1e-28),
        (None, Precision::F64) => SchemeConfig::<T>::default_push_tol(),
    }
}

pub fn scheme_config<T: Real>(exp: &Experiment, order: hamsplit::Order, tau: f64) -> Result<SchemeConfig<T>, CliError> {
    SchemeConfig::new(order, step_size(tau))
        .and_then(|c| c.with_push_tol(push_tol(exp)))
        .and_then(|c| c.with_push_max_iter(exp.push_max_iter))
        .map_err(config_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_steps_are_exact() {
        let t: hamsplit::DoubleDouble = step_size(1.0 / 40.0);
        assert_eq!(t * hamsplit::DoubleDouble::lit(40.0), hamsplit::DoubleDouble::lit(1.0));
        assert_eq!(step_size::<f64>(0.3), 0.3);
    }
}
