mod common;

use common::{coupled_quadratic, Builtin};
use hamsplit::derivop::{word_value_generic, GenericModel};
use hamsplit::real::Scalar;
use hamsplit::*;
use proptest::prelude::*;

/// `Σ c·∏ qᵢ^eᵢ`, written against [`Scalar`] so the jet oracle can differentiate it.
#[derive(Debug, Clone)]
struct Polynomial {
    dim: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl Potential<f64> for Polynomial {
    fn eval<S: Scalar<f64>>(&self, q: &[S]) -> S {
        let mut acc = S::constant(0.0);
        for (c, exps) in &self.terms {
            let mut m = S::constant(*c);
            for (x, &e) in q.iter().zip(exps) {
                if e > 0 {
                    m = m * x.powi(e);
                }
            }
            acc = acc + m;
        }
        acc
    }
}

fn polynomial(dim: usize) -> impl Strategy<Value = Polynomial> {
    let exps = prop::collection::vec(0u32..=2, dim).prop_filter("degree ≤ 4", |e| e.iter().sum::<u32>() <= 4);
    prop::collection::vec((-1.0f64..1.0, exps), 1..6).prop_map(move |terms| Polynomial { dim, terms })
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim)
}

fn words() -> Vec<Word> {
    required_words(Order::Eight).into_iter().collect()
}

/// Five-point central differences of `f` along each coordinate of `x`.
fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|a| {
            let at = |k: f64| {
                let mut y = x.to_vec();
                y[a] += k * h;
                f(&y)
            };
            (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h)
        })
        .collect()
}

fn assert_close(approx: &[f64], exact: &[f64], rel: f64, what: &str) {
    let scale = exact.iter().fold(1e-3f64, |m, x| m.max(x.abs()));
    for (a, e) in approx.iter().zip(exact) {
        assert!((a - e).abs() <= rel * scale, "{what}: {a} vs {e} (scale {scale})");
    }
}

fn check_word_gradients<M: HamiltonianModel<f64>>(model: &M, q: &[f64], p: &[f64]) {
    for w in words() {
        let gq = model.word_grad_q(&w, q, p).unwrap();
        let fq = fd_gradient(|x| model.word_value(&w, x, p).unwrap(), q, 1e-3);
        assert_close(&fq, &gq, 1e-6, &format!("{w} q-gradient"));
        let gp = model.word_grad_p(&w, q, p).unwrap();
        let fp = fd_gradient(|x| model.word_value(&w, q, x).unwrap(), p, 1e-3);
        assert_close(&fp, &gp, 1e-6, &format!("{w} p-gradient"));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn builtin_word_gradients_match_finite_differences(seed in 0u64..1000) {
        let mut r = common::rng(seed);
        for (_, model) in Builtin::all() {
            let s = common::random_state(&mut r, model.dim(), 1.0);
            match &model {
                Builtin::Harmonic(m) | Builtin::Coupled(m) => check_word_gradients(m, s.q(), s.p()),
                Builtin::Quartic(m) => check_word_gradients(m, s.q(), s.p()),
                Builtin::Fpu(m) => check_word_gradients(m, s.q(), s.p()),
            }
        }
    }

    #[test]
    fn generic_word_gradients_match_finite_differences(
        (v, q, p) in (1usize..=4).prop_flat_map(|d| (polynomial(d), vector(d), vector(d)))
    ) {
        let model = GenericModel::new(v.clone(), Mass::identity(v.dim).unwrap());
        check_word_gradients(&model, &q, &p);
    }

    #[test]
    fn word_values_are_linear_in_the_potential(
        (a, b, q, p) in (1usize..=4).prop_flat_map(|d| (polynomial(d), polynomial(d), vector(d), vector(d)))
    ) {
        let mass = Mass::identity(a.dim).unwrap();
        let sum = Polynomial { dim: a.dim, terms: a.terms.iter().chain(&b.terms).cloned().collect() };
        for w in words() {
            let va = word_value_generic(&a, &mass, &w, &q, &p).unwrap();
            let vb = word_value_generic(&b, &mass, &w, &q, &p).unwrap();
            let vs = word_value_generic(&sum, &mass, &w, &q, &p).unwrap();
            // words with several gradient letters are nonlinear in V
            if w.gradient_count() == 0 && !w.is_dbar3() {
                prop_assert!((vs - va - vb).abs() <= 1e-10 * (1.0 + va.abs() + vb.abs()), "{w}");
            }
        }
    }

    #[test]
    fn word_values_are_homogeneous_in_momentum(seed in 0u64..1000, lambda in -2.0f64..2.0) {
        let mut r = common::rng(seed);
        for (_, model) in Builtin::all() {
            let s = common::random_state(&mut r, model.dim(), 1.0);
            let scaled: Vec<f64> = s.p().iter().map(|x| lambda * x).collect();
            for w in words() {
                let (a, b) = match &model {
                    Builtin::Harmonic(m) | Builtin::Coupled(m) => {
                        (m.word_value(&w, s.q(), s.p()).unwrap(), m.word_value(&w, s.q(), &scaled).unwrap())
                    }
                    Builtin::Quartic(m) => {
                        (m.word_value(&w, s.q(), s.p()).unwrap(), m.word_value(&w, s.q(), &scaled).unwrap())
                    }
                    Builtin::Fpu(m) => {
                        (m.word_value(&w, s.q(), s.p()).unwrap(), m.word_value(&w, s.q(), &scaled).unwrap())
                    }
                };
                let expected = a * lambda.powi(w.momentum_degree() as i32);
                prop_assert!((b - expected).abs() <= 1e-12 * (1.0 + a.abs()), "{w}: {b} vs {expected}");
            }
        }
    }

    #[test]
    fn potential_gradients_match_finite_differences(seed in 0u64..1000) {
        let mut r = common::rng(seed);
        let models: Vec<(Box<dyn Fn(&[f64]) -> f64>, Box<dyn Fn(&[f64]) -> Vec<f64>>, usize)> = vec![
            {
                let m = coupled_quadratic();
                let m2 = m.clone();
                (Box::new(move |q| m.potential(q)), Box::new(move |q| m2.grad_potential(q)), 3)
            },
            (Box::new(|q| Quartic::new().potential(q)), Box::new(|q| Quartic::new().grad_potential(q)), 1),
            {
                let m = Fpu::new(7, 0.4, 0.8, 1.1).unwrap().with_periodic(true);
                let m2 = m.clone();
                (Box::new(move |q| m.potential(q)), Box::new(move |q| m2.grad_potential(q)), 7)
            },
        ];
        for (v, g, d) in models {
            let q = common::uniform(&mut r, d, 1.0);
            assert_close(&fd_gradient(|x| v(x), &q, 1e-3), &g(&q), 1e-8, "grad V");
        }
    }
}

#[test]
fn fpu_word_gradients_are_local() {
    let model = Fpu::beta_chain(20).unwrap();
    let mut r = common::rng(3);
    let s = common::random_state(&mut r, 20, 0.5);
    for w in words() {
        let reach = w.len() + 1;
        let base = model.word_grad_q(&w, s.q(), s.p()).unwrap();
        for far in (reach + 1)..20 {
            let mut q = s.q().to_vec();
            let mut p = s.p().to_vec();
            q[far] += 0.3;
            p[far] -= 0.2;
            let moved = model.word_grad_q(&w, &q, &p).unwrap();
            let d = (moved[0] - base[0]).abs();
            assert!(d <= 1e-12 * (1.0 + base[0].abs()), "{w}: site {far} changes ∂/∂q₀ by {d}");
        }
    }
}

#[test]
fn third_derivative_words_vanish_for_quadratics() {
    let model = coupled_quadratic();
    let mut r = common::rng(4);
    let s = common::random_state(&mut r, 3, 1.0);
    let dbar3 = Word::dbar3();
    assert_eq!(model.word_value(&dbar3, s.q(), s.p()).unwrap(), 0.0);
    assert!(model.word_grad_q(&dbar3, s.q(), s.p()).unwrap().iter().all(|&x| x == 0.0));
    for n in 3..=6 {
        let w = Word::dp_power(n).unwrap();
        assert_eq!(model.word_value(&w, s.q(), s.p()).unwrap(), 0.0, "{w}");
    }
}
