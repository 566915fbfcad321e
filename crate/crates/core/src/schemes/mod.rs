//! Corrected kick–move–kick integrators.
//!
//! One step is `kick(τ/2) ∘ move(τ) ∘ kick(τ/2)`. The kick integrates
//! `V_eff = V + τ²V₂ + …` exactly (momentum shift). The move is the canonical
//! map generated by `G(q, P) = qᵃPₐ + ΔG(q, P; τ)`:
//!
//! ```text
//! P = p − ∂ΔG/∂q (q, P)      solved by fixed-point iteration
//! Q = q + ∂ΔG/∂P (q, P)
//! ```
//!
//! The correction terms inside both parts always use the full step `τ`.

pub mod coefficients;
pub mod linear;

use std::sync::{Arc, OnceLock};

use num_rational::Ratio;

use crate::config::{Order, SchemeConfig};
use crate::elementary::WordProgram;
use crate::error::{Error, Result};
use crate::model::HamiltonianModel;
use crate::phase::PhaseState;
use crate::real::{sum, sup_norm, Real};
use crate::word::Word;

pub use coefficients::EffectiveCoefficients;
pub use linear::{modified_coeffs_1d, modified_matrices, LinearKickMoveKick};

/// A word list with, for every word, its `(power of τ, coefficient)` terms.
struct Weighted {
    program: Arc<WordProgram>,
    terms: Vec<Vec<(u32, Ratio<i64>)>>,
}

impl Weighted {
    fn new(slices: Vec<coefficients::Slice>) -> Self {
        let mut words: Vec<Word> = Vec::new();
        let mut terms: Vec<Vec<(u32, Ratio<i64>)>> = Vec::new();
        for (k, entries) in slices {
            for (w, c) in entries {
                let i = match words.iter().position(|x| *x == w) {
                    Some(i) => i,
                    None => {
                        words.push(w);
                        terms.push(Vec::new());
                        words.len() - 1
                    }
                };
                terms[i].push((k, c));
            }
        }
        Self {
            program: WordProgram::cached(&words),
            terms,
        }
    }

    fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn weights<T: Real>(&self, tau: T) -> Vec<T> {
        self.terms
            .iter()
            .map(|ts| {
                sum(ts.iter().map(|&(k, c)| T::from_ratio(c) * tau.powi(k as i32)))
            })
            .collect()
    }
}

struct Programs {
    kick: Weighted,
    drift: Weighted,
}

fn programs(order: Order) -> &'static Programs {
    static CELLS: [OnceLock<Programs>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = match order {
        Order::Two => 0,
        Order::Four => 1,
        Order::Six => 2,
        Order::Eight => 3,
    };
    CELLS[i].get_or_init(|| Programs {
        kick: Weighted::new(coefficients::potential_corrections(order)),
        drift: Weighted::new(coefficients::generating_terms(order)),
    })
}

/// Outcome of one push solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PushReport<T> {
    pub iterations: usize,
    pub final_residual: T,
    pub converged: bool,
    /// Relative update size after each iteration.
    pub residuals: Vec<T>,
    /// False if some residual after the first failed to decrease.
    pub contracting: bool,
}

impl<T: Real> PushReport<T> {
    fn trivial() -> Self {
        Self {
            iterations: 0,
            final_residual: T::zero(),
            converged: true,
            residuals: Vec::new(),
            contracting: true,
        }
    }

    /// Successive residual ratios, an estimate of the contraction rate.
    pub fn contraction_ratios(&self) -> Vec<T> {
        self.residuals
            .windows(2)
            .map(|w| if w[0] > T::zero() { w[1] / w[0] } else { T::zero() })
            .collect()
    }
}

fn finite_or<T: Real>(v: &[T], what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// `∇[V + τ²V₂ + τ⁴V₄ + τ⁶V₆](q)`, truncated for `order`.
pub fn effective_grad_v<T: Real, M: HamiltonianModel<T>>(
    model: &M,
    q: &[T],
    tau: T,
    order: Order,
) -> Result<Vec<T>> {
    let mut g = model.grad_potential(q);
    let kick = &programs(order).kick;
    if !kick.is_empty() {
        let zeros = vec![T::zero(); q.len()];
        let corr = model.combination_gradients(&kick.program, &kick.weights(tau), q, &zeros, false)?;
        for (a, b) in g.iter_mut().zip(corr.q) {
            *a += b;
        }
    }
    finite_or(&g, "effective potential gradient")?;
    Ok(g)
}

/// `p ← p − half_tau · ∇V_eff(q)` with the corrections evaluated at
/// `tau_for_corrections`.
pub fn kick<T: Real, M: HamiltonianModel<T>>(
    state: &PhaseState<T>,
    model: &M,
    half_tau: T,
    tau_for_corrections: T,
    order: Order,
) -> Result<PhaseState<T>> {
    let g = effective_grad_v(model, state.q(), tau_for_corrections, order)?;
    let p = state.p().iter().zip(&g).map(|(&p, &g)| p - half_tau * g).collect();
    PhaseState::new(state.q().to_vec(), p)
}

/// `∂ΔG/∂q (q, P)`. The drift term `τ·½PᵀMP` does not depend on `q`.
pub fn delta_g_grad_q<T: Real, M: HamiltonianModel<T>>(
    model: &M,
    q: &[T],
    momentum: &[T],
    tau: T,
    order: Order,
) -> Result<Vec<T>> {
    let drift = &programs(order).drift;
    if drift.is_empty() {
        return Ok(vec![T::zero(); q.len()]);
    }
    Ok(model
        .combination_gradients(&drift.program, &drift.weights(tau), q, momentum, false)?
        .q)
}

/// `∂ΔG/∂P (q, P) = τ M P + Σₖ τᵏ ∂Gₖ/∂P`.
pub fn delta_g_grad_p<T: Real, M: HamiltonianModel<T>>(
    model: &M,
    q: &[T],
    momentum: &[T],
    tau: T,
    order: Order,
) -> Result<Vec<T>> {
    let mut out: Vec<T> = model.mass().apply(momentum).into_iter().map(|x| x * tau).collect();
    let drift = &programs(order).drift;
    if !drift.is_empty() {
        let g = model.combination_gradients(&drift.program, &drift.weights(tau), q, momentum, true)?;
        for (a, b) in out.iter_mut().zip(g.p.expect("momentum gradient requested")) {
            *a += b;
        }
    }
    Ok(out)
}

/// Solves `P = p − ∂ΔG/∂q (q, P)` by fixed-point iteration from `P = p`.
pub fn solve_push<T: Real, M: HamiltonianModel<T>>(
    model: &M,
    q: &[T],
    p: &[T],
    config: &SchemeConfig<T>,
) -> Result<(Vec<T>, PushReport<T>)> {
    let (tau, order) = (config.tau, config.order);
    let drift = &programs(order).drift;
    if drift.is_empty() {
        return Ok((p.to_vec(), PushReport::trivial()));
    }
    let weights = drift.weights(tau);
    let scale = sup_norm(p) + T::one();
    let mut current = p.to_vec();
    let mut report = PushReport {
        iterations: 0,
        final_residual: T::infinity(),
        converged: false,
        residuals: Vec::new(),
        contracting: true,
    };
    while report.iterations < config.push_max_iter {
        let g = model.combination_gradients(&drift.program, &weights, q, &current, false)?;
        let next: Vec<T> = p.iter().zip(&g.q).map(|(&pa, &ga)| pa - ga).collect();
        finite_or(&next, "push iterate")?;
        let residual = next
            .iter()
            .zip(&current)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
            / scale;
        report.iterations += 1;
        if let Some(&prev) = report.residuals.last() {
            if residual >= prev && residual > config.push_tol {
                report.contracting = false;
            }
        }
        report.residuals.push(residual);
        report.final_residual = residual;
        current = next;
        if residual <= config.push_tol {
            report.converged = true;
            return Ok((current, report));
        }
    }
    Err(Error::PushDiverged {
        iterations: report.iterations,
        tau: tau.to_f64().unwrap_or(f64::NAN),
        residual: report.final_residual.to_f64().unwrap_or(f64::NAN),
        q: q.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
        p: p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
    })
}

/// The generating-function move over one full step.
pub fn move_step<T: Real, M: HamiltonianModel<T>>(
    state: &PhaseState<T>,
    model: &M,
    config: &SchemeConfig<T>,
) -> Result<(PhaseState<T>, PushReport<T>)> {
    let q = state.q();
    let (momentum, report) = solve_push(model, q, state.p(), config)?;
    let shift = delta_g_grad_p(model, q, &momentum, config.tau, config.order)?;
    let new_q = q.iter().zip(&shift).map(|(&a, &b)| a + b).collect();
    Ok((PhaseState::new(new_q, momentum)?, report))
}

/// `kick(τ/2) → move(τ) → kick(τ/2)`.
pub fn step<T: Real, M: HamiltonianModel<T>>(
    state: &PhaseState<T>,
    model: &M,
    config: &SchemeConfig<T>,
) -> Result<(PhaseState<T>, PushReport<T>)> {
    let half = config.tau * T::lit(0.5);
    let s = kick(state, model, half, config.tau, config.order)?;
    let (s, report) = move_step(&s, model, config)?;
    let s = kick(&s, model, half, config.tau, config.order)?;
    Ok((s, report))
}

/// Applies [`step`] `n_steps` times, calling `observer(i, state, report)`
/// after step `i` (1-based). Stops at the first failure.
pub fn integrate<T, M, F>(
    state0: &PhaseState<T>,
    model: &M,
    config: &SchemeConfig<T>,
    n_steps: usize,
    mut observer: F,
) -> Result<PhaseState<T>>
where
    T: Real,
    M: HamiltonianModel<T>,
    F: FnMut(usize, &PhaseState<T>, &PushReport<T>),
{
    config.validate()?;
    if state0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: state0.dim(),
        });
    }
    let mut state = state0.clone();
    for i in 1..=n_steps {
        let (next, report) = step(&state, model, config)?;
        observer(i, &next, &report);
        state = next;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{QuadraticModel, QuarticOscillator};

    fn state(q: f64, p: f64) -> PhaseState<f64> {
        PhaseState::new(vec![q], vec![p]).unwrap()
    }

    #[test]
    fn effective_gradient_examples() {
        let h = QuadraticModel::<f64>::harmonic_1d();
        let tau = 0.3;
        let g = effective_grad_v(&h, &[1.0], tau, Order::Four).unwrap();
        assert!((g[0] - (1.0 + tau * tau / 12.0)).abs() < 1e-15);
        let quartic = QuarticOscillator::<f64>::new();
        let g = effective_grad_v(&quartic, &[1.0], 0.1, Order::Four).unwrap();
        assert!((g[0] - 1.0025).abs() < 1e-15);
        let g = effective_grad_v(&quartic, &[0.7], 0.1, Order::Two).unwrap();
        assert_eq!(g[0], 0.7f64.powi(3));
    }

    #[test]
    fn kick_examples() {
        let quartic = QuarticOscillator::<f64>::new();
        let s = kick(&state(1.0, 0.0), &quartic, 0.05, 0.1, Order::Two).unwrap();
        assert!((s.p()[0] + 0.05).abs() < 1e-16);
        assert_eq!(s.q(), &[1.0]);
        let s = kick(&state(0.0, 0.3), &quartic, 0.05, 0.1, Order::Eight).unwrap();
        assert_eq!(s.p(), &[0.3]);
        let once = kick(&state(0.8, 0.1), &quartic, 0.1, 0.1, Order::Six).unwrap();
        let half = kick(&state(0.8, 0.1), &quartic, 0.05, 0.1, Order::Six).unwrap();
        let twice = kick(&half, &quartic, 0.05, 0.1, Order::Six).unwrap();
        assert!((once.p()[0] - twice.p()[0]).abs() < 1e-15);
    }

    #[test]
    fn delta_g_examples() {
        let quartic = QuarticOscillator::<f64>::new();
        let g = delta_g_grad_q(&quartic, &[1.0], &[1.0], 0.1, Order::Four).unwrap();
        assert!((g[0] + 5.25e-4).abs() < 1e-17);
        let h = QuadraticModel::<f64>::harmonic_1d();
        // drift part only: τ M P
        let g = delta_g_grad_p(&h, &[0.0], &[2.0], 0.5, Order::Two).unwrap();
        assert_eq!(g, vec![1.0]);
    }

    #[test]
    fn push_examples() {
        let quartic = QuarticOscillator::<f64>::new();
        let cfg = SchemeConfig::new(Order::Two, 0.1).unwrap();
        let (p, r) = solve_push(&quartic, &[0.4], &[0.9], &cfg).unwrap();
        assert_eq!((p, r.iterations), (vec![0.9], 0));

        // P = 1 + τ⁴P³/4 at q = 0, τ = 0.1: oracle iterated to convergence
        let mut oracle = 1.0f64;
        for _ in 0..100 {
            oracle = 1.0 + 1e-4 * oracle.powi(3) / 4.0;
        }
        let cfg = SchemeConfig::new(Order::Four, 0.1).unwrap();
        let (p, r) = solve_push(&quartic, &[0.0], &[1.0], &cfg).unwrap();
        assert!((p[0] - oracle).abs() < 1e-15);
        assert!((p[0] - 1.0000250019).abs() < 1e-10);
        assert!(r.converged && r.contracting);

        let h = QuadraticModel::<f64>::harmonic_1d();
        let (p, r) = solve_push(&h, &[0.0], &[0.7], &cfg).unwrap();
        assert_eq!(p, vec![0.7]);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn push_failure_is_reported() {
        let quartic = QuarticOscillator::<f64>::new();
        let cfg = SchemeConfig::new(Order::Eight, 2.0)
            .unwrap()
            .with_push_max_iter(3)
            .unwrap();
        let err = solve_push(&quartic, &[1.5], &[2.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::PushDiverged { iterations: 3, .. }));
    }

    #[test]
    fn move_examples() {
        let h = QuadraticModel::<f64>::harmonic_1d();
        let cfg = SchemeConfig::new(Order::Two, 0.5).unwrap();
        let (s, _) = move_step(&state(0.0, 1.0), &h, &cfg).unwrap();
        assert_eq!((s.q()[0], s.p()[0]), (0.5, 1.0));

        let quartic = QuarticOscillator::<f64>::new();
        let cfg = SchemeConfig::new(Order::Four, 0.1).unwrap();
        let (s, _) = move_step(&state(0.0, 1.0), &quartic, &cfg).unwrap();
        let (pp, _) = solve_push(&quartic, &[0.0], &[1.0], &cfg).unwrap();
        assert_eq!(s.p()[0], pp[0]);
        assert!((s.q()[0] - 0.1 * pp[0]).abs() < 1e-17);
    }

    #[test]
    fn harmonic_verlet_step() {
        let h = QuadraticModel::<f64>::harmonic_1d();
        let tau = 0.2;
        let cfg = SchemeConfig::new(Order::Two, tau).unwrap();
        let (s, _) = step(&state(1.0, 0.0), &h, &cfg).unwrap();
        assert!((s.q()[0] - (1.0 - tau * tau / 2.0)).abs() < 1e-15);
        assert!((s.p()[0] + (1.0 - tau * tau / 4.0) * tau).abs() < 1e-15);
    }

    #[test]
    fn zero_steps_returns_initial_state() {
        let h = QuadraticModel::<f64>::harmonic_1d();
        let cfg = SchemeConfig::new(Order::Eight, 0.1).unwrap();
        let s0 = state(0.3, -0.2);
        let mut calls = 0;
        let s = integrate(&s0, &h, &cfg, 0, |_, _, _| calls += 1).unwrap();
        assert_eq!(s, s0);
        assert_eq!(calls, 0);
    }
}
