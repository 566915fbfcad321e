//! Generic evaluation of derivative words from nothing but `V(q)`.
//!
//! Every word is a composition of first-order operators `X·∇` with
//! `X ∈ {M p, M ∇V}`. Applying `L₁ L₂ … Lₖ` (rightmost first) to `V` at `q`
//! equals the coefficient of `η₁ η₂ … ηₖ` in `V(xₖ)`, where `x₀ = q` and
//! `xᵢ = xᵢ₋₁ + ηᵢ Xᵢ(xᵢ₋₁)` with nilpotent `ηᵢ`. The gradient field is
//! re-evaluated at each perturbed point, so outer gradient letters
//! differentiate through the fields of inner ones. Runs of momentum letters
//! share one generator of higher degree. `∇V` at a perturbed point comes from
//! one extra generator swept over the coordinates, which makes the cost
//! `O(dim · b)` potential evaluations for `b` gradient letters. Gradients of
//! a word add one more generator on `q` or `p`, repeated for every coordinate.
//!
//! This path is slow and exists as the reference every model fast path is
//! tested against.

pub mod jet;
pub mod multijet;

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::mass::MassStructure;
use crate::model::{HamiltonianModel, Potential};
use crate::real::{Real, Scalar};
use crate::word::{Letter, Word, MAX_WORD_LEN};

pub use jet::Jet;
pub use multijet::{MultiJet, Shape};

/// `[V(q), V′[u], V″[u,u], …]` up to `k_max` along the straight ray `q + εu`.
pub fn directional_derivs<T: Real, P: Potential<T>>(
    potential: &P,
    q: &[T],
    u: &[T],
    k_max: usize,
) -> Result<Vec<T>> {
    if q.len() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            got: u.len(),
        });
    }
    if k_max > jet::MAX_DEGREE {
        return Err(Error::InvalidInput(format!(
            "k_max {k_max} exceeds jet degree {}",
            jet::MAX_DEGREE
        )));
    }
    let x: Vec<Jet<T>> = q
        .iter()
        .zip(u)
        .map(|(&qi, &ui)| Jet::variable(qi, ui, k_max))
        .collect();
    let v = potential.eval(&x);
    if !v.is_finite() {
        return Err(Error::Singular("directional derivatives".into()));
    }
    Ok((0..=k_max).map(|k| v.derivative(k)).collect())
}

/// `∇V(q)` by one dual-number sweep per coordinate.
pub fn grad_potential_generic<T: Real, P: Potential<T>>(potential: &P, q: &[T]) -> Vec<T> {
    let mut x: Vec<Jet<T>> = q.iter().map(|&qi| Jet::constant(qi, 1)).collect();
    (0..q.len())
        .map(|a| {
            x[a] = Jet::variable(q[a], T::one(), 1);
            let d = potential.eval(&x).coeff(1);
            x[a] = Jet::constant(q[a], 1);
            d
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Seed {
    None,
    Q(usize),
    P(usize),
}

#[derive(Clone, Copy)]
enum Group {
    /// `r` consecutive momentum letters.
    Run(usize),
    /// One gradient letter.
    Grad,
    /// `D̄₃`: third derivative along the gradient field frozen at the point.
    Frozen3,
}

fn groups(word: &Word) -> Vec<Group> {
    if word.is_dbar3() {
        return vec![Group::Frozen3];
    }
    let mut out = Vec::new();
    for &l in word.letters() {
        match (l, out.last_mut()) {
            (Letter::Dp, Some(Group::Run(r))) => *r += 1,
            (Letter::Dp, _) => out.push(Group::Run(1)),
            (Letter::Dg, _) => out.push(Group::Grad),
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (2..=n).map(|i| i as f64).product()
}

fn apply_mass<T: Real, S: Scalar<T>>(mass: &MassStructure<T>, v: &[S]) -> Vec<S> {
    match mass {
        MassStructure::Identity { .. } => v.to_vec(),
        MassStructure::Diagonal(d) => v.iter().zip(d).map(|(x, &m)| x.clone().scale(m)).collect(),
        MassStructure::Dense { dim, data } => data
            .chunks_exact(*dim)
            .map(|row| {
                row.iter()
                    .zip(v)
                    .map(|(&m, x)| x.clone().scale(m))
                    .reduce(|a, b| a + b)
                    .expect("non-empty row")
            })
            .collect(),
    }
}

fn check_dims<T>(dim: usize, q: &[T], p: &[T]) -> Result<()> {
    for v in [q, p] {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    Ok(())
}

fn eval_word<T: Real, P: Potential<T>>(
    potential: &P,
    mass: &MassStructure<T>,
    word: &Word,
    q: &[T],
    p: &[T],
    seed: Seed,
) -> Result<T> {
    if word.len() > MAX_WORD_LEN {
        return Err(Error::WordTooDeep {
            word: word.to_string(),
            max: MAX_WORD_LEN,
        });
    }
    check_dims(mass.dim(), q, p)?;
    let groups = groups(word);
    let mut degrees: Vec<usize> = groups
        .iter()
        .map(|g| match g {
            Group::Run(r) => *r,
            Group::Grad => 1,
            Group::Frozen3 => 3,
        })
        .collect();
    let seed_gen = match seed {
        Seed::None => None,
        _ => {
            degrees.push(1);
            Some(degrees.len() - 1)
        }
    };
    let needs_sweep = groups.iter().any(|g| !matches!(g, Group::Run(_)));
    let sweep_gen = if needs_sweep {
        degrees.push(1);
        Some(degrees.len() - 1)
    } else {
        None
    };
    let shape = Shape::new(degrees.clone());

    let mut x: Vec<MultiJet<T>> = q.iter().map(|&v| MultiJet::constant(v)).collect();
    let mut mom: Vec<MultiJet<T>> = p.iter().map(|&v| MultiJet::constant(v)).collect();
    match (seed, seed_gen) {
        (Seed::Q(a), Some(g)) => x[a] = MultiJet::generator(&shape, g, q[a]),
        (Seed::P(a), Some(g)) => mom[a] = MultiJet::generator(&shape, g, p[a]),
        _ => {}
    }
    let u = apply_mass(mass, &mom);

    let mut scale = 1.0;
    for (gi, group) in groups.iter().enumerate() {
        let eta = MultiJet::generator(&shape, gi, T::zero());
        let dir = match group {
            Group::Run(r) => {
                scale *= factorial(*r);
                u.clone()
            }
            Group::Grad | Group::Frozen3 => {
                if matches!(group, Group::Frozen3) {
                    scale *= 6.0;
                }
                let sweep = sweep_gen.expect("sweep generator allocated");
                let g = gradient_at(potential, &x, &shape, sweep);
                apply_mass(mass, &g)
            }
        };
        for (xi, di) in x.iter_mut().zip(dir) {
            *xi = xi.clone() + eta.clone() * di;
        }
    }

    let v = potential.eval(&x);
    if !v.is_finite() {
        return Err(Error::Singular(word.to_string()));
    }
    let mut index = degrees;
    if let Some(g) = sweep_gen {
        index[g] = 0;
    }
    Ok(v.coeff(&index) * T::lit(scale))
}

fn gradient_at<T: Real, P: Potential<T>>(
    potential: &P,
    x: &[MultiJet<T>],
    shape: &Rc<Shape>,
    sweep: usize,
) -> Vec<MultiJet<T>> {
    let mut xs = x.to_vec();
    (0..x.len())
        .map(|a| {
            let orig = xs[a].clone();
            xs[a] = orig.clone() + MultiJet::generator(shape, sweep, T::zero());
            let d = potential.eval(&xs).linear_part(sweep);
            xs[a] = orig;
            d
        })
        .collect()
}

/// Value of `word` applied to `V` at `(q, p)`.
pub fn word_value_generic<T: Real, P: Potential<T>>(
    potential: &P,
    mass: &MassStructure<T>,
    word: &Word,
    q: &[T],
    p: &[T],
) -> Result<T> {
    eval_word(potential, mass, word, q, p, Seed::None)
}

/// Gradient in `q` of [`word_value_generic`].
pub fn word_grad_q_generic<T: Real, P: Potential<T>>(
    potential: &P,
    mass: &MassStructure<T>,
    word: &Word,
    q: &[T],
    p: &[T],
) -> Result<Vec<T>> {
    (0..q.len())
        .map(|a| eval_word(potential, mass, word, q, p, Seed::Q(a)))
        .collect()
}

/// Gradient in `p` of [`word_value_generic`].
pub fn word_grad_p_generic<T: Real, P: Potential<T>>(
    potential: &P,
    mass: &MassStructure<T>,
    word: &Word,
    q: &[T],
    p: &[T],
) -> Result<Vec<T>> {
    if word.momentum_degree() == 0 {
        check_dims(mass.dim(), q, p)?;
        return Ok(vec![T::zero(); q.len()]);
    }
    (0..p.len())
        .map(|a| eval_word(potential, mass, word, q, p, Seed::P(a)))
        .collect()
}

/// Any [`Potential`] turned into a [`HamiltonianModel`] whose word oracles are
/// the generic jet evaluation. Slow; intended for cross-checks and for
/// potentials without closed-form derivatives.
#[derive(Debug, Clone)]
pub struct GenericModel<T, P> {
    potential: P,
    mass: MassStructure<T>,
}

impl<T: Real, P: Potential<T>> GenericModel<T, P> {
    pub fn new(potential: P, mass: MassStructure<T>) -> Self {
        Self { potential, mass }
    }

    pub fn inner(&self) -> &P {
        &self.potential
    }
}

impl<T: Real, P: Potential<T> + Sync> HamiltonianModel<T> for GenericModel<T, P> {
    fn dim(&self) -> usize {
        self.mass.dim()
    }

    fn mass(&self) -> &MassStructure<T> {
        &self.mass
    }

    fn potential(&self, q: &[T]) -> T {
        self.potential.eval(q)
    }

    fn grad_potential(&self, q: &[T]) -> Vec<T> {
        grad_potential_generic(&self.potential, q)
    }

    fn word_value(&self, word: &Word, q: &[T], p: &[T]) -> Result<T> {
        word_value_generic(&self.potential, &self.mass, word, q, p)
    }

    fn word_grad_q(&self, word: &Word, q: &[T], p: &[T]) -> Result<Vec<T>> {
        word_grad_q_generic(&self.potential, &self.mass, word, q, p)
    }

    fn word_grad_p(&self, word: &Word, q: &[T], p: &[T]) -> Result<Vec<T>> {
        word_grad_p_generic(&self.potential, &self.mass, word, q, p)
    }
}

/// Worst relative disagreement between a model's word oracles and the generic
/// ones at one state, over `words`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conformance {
    pub word: Option<Word>,
    pub max_rel_err: f64,
}

/// Relative error `‖a − b‖∞ / max(‖b‖∞, floor)`.
pub fn relative_error<T: Real>(fast: &[T], reference: &[T], floor: T) -> f64 {
    let num = fast
        .iter()
        .zip(reference)
        .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
    let den = crate::real::sup_norm(reference).max(floor);
    (num / den).to_f64().unwrap_or(f64::INFINITY)
}

/// Compares value, `q`-gradient and `p`-gradient of every word.
pub fn conformance<T, M, P>(
    model: &M,
    potential: &P,
    words: impl IntoIterator<Item = Word>,
    q: &[T],
    p: &[T],
    floor: T,
) -> Result<Conformance>
where
    T: Real,
    M: HamiltonianModel<T>,
    P: Potential<T>,
{
    let mass = model.mass();
    let mut worst = Conformance {
        word: None,
        max_rel_err: 0.0,
    };
    for word in words {
        let errs = [
            relative_error(
                &[model.word_value(&word, q, p)?],
                &[word_value_generic(potential, mass, &word, q, p)?],
                floor,
            ),
            relative_error(
                &model.word_grad_q(&word, q, p)?,
                &word_grad_q_generic(potential, mass, &word, q, p)?,
                floor,
            ),
            relative_error(
                &model.word_grad_p(&word, q, p)?,
                &word_grad_p_generic(potential, mass, &word, q, p)?,
                floor,
            ),
        ];
        let e = errs.iter().cloned().fold(0.0, f64::max);
        if e > worst.max_rel_err || worst.word.is_none() {
            worst = Conformance {
                word: Some(word),
                max_rel_err: e.max(worst.max_rel_err),
            };
        }
    }
    Ok(worst)
}
