mod common;

use common::{coupled_quadratic, expm, random_state, rng, symplectic_defect, Builtin};
use hamsplit::derivop::GenericModel;
use hamsplit::diagnostics::{reference_trajectory, ReferenceSettings};
use hamsplit::real::Scalar;
use hamsplit::schemes::{self, modified_matrices, LinearKickMoveKick};
use hamsplit::*;

const QUARTIC_PERIOD: f64 = 6.236_339;

fn round_trip<F: Fn(&State) -> State>(step: F, s0: &State, n: usize) -> f64 {
    let mut s = s0.clone();
    for _ in 0..n {
        s = step(&s);
    }
    s = s.with_reversed_momentum();
    for _ in 0..n {
        s = step(&s);
    }
    s.with_reversed_momentum().distance(s0)
}

#[test]
fn time_reversal_recovers_the_initial_state() {
    let mut r = rng(1);
    for (name, model) in Builtin::all() {
        let exact_orders: &[Order] = match model {
            Builtin::Harmonic(_) | Builtin::Coupled(_) => &Order::ALL,
            _ => &[Order::Two],
        };
        for &order in exact_orders {
            let cfg = Config::new(order, 0.1).unwrap();
            let s0 = random_state(&mut r, model.dim(), 1.0);
            let d = round_trip(|s| model.step(s, &cfg).unwrap().0, &s0, 100);
            assert!(d <= 1e-10, "{name} N={order}: {d}");
        }
    }
}

/// The truncated move generator is symmetric only up to its truncation, so on
/// nonlinear models one forward/backward step misses by `O(τᴺ⁺²)`.
#[test]
fn reversal_defect_scales_past_the_scheme_order() {
    let model = Quartic::new();
    let s0 = State::new(vec![0.7], vec![-0.9]).unwrap();
    for order in [Order::Four, Order::Six] {
        let defect = |tau: f64| {
            let cfg = Config::new(order, tau).unwrap();
            round_trip(|s| schemes::step(s, &model, &cfg).unwrap().0, &s0, 1)
        };
        let ratio = defect(0.1) / defect(0.05);
        let target = 2f64.powi(order.as_u32() as i32 + 2);
        assert!((0.7 * target..=1.4 * target).contains(&ratio), "N={order}: ratio {ratio}, expected ≈ {target}");
    }
}

#[test]
fn harmonic_energy_at_order_eight() {
    let model = Quadratic::harmonic_1d();
    let cfg = Config::new(Order::Eight, 0.1).unwrap();
    let s0 = State::new(vec![0.3], vec![0.9]).unwrap();
    let h0 = model.energy(&s0);
    let mut worst: f64 = 0.0;
    schemes::integrate(&s0, &model, &cfg, 1000, |_, s, _| worst = worst.max((model.energy(s) - h0).abs())).unwrap();
    assert!(worst <= 1e-12, "{worst}");
}

struct Free;

impl Potential<f64> for Free {
    fn eval<S: Scalar<f64>>(&self, _q: &[S]) -> S {
        S::constant(0.0)
    }
}

#[test]
fn free_motion_is_exact_for_any_step() {
    let mass = Mass::dense(2, vec![2.0, 0.5, 0.5, 1.0]).unwrap();
    let model = GenericModel::new(Free, mass.clone());
    let s0 = State::new(vec![0.1, -0.4], vec![0.7, 0.2]).unwrap();
    let v = mass.apply(s0.p());
    for order in Order::ALL {
        for tau in [0.5, 3.0, 40.0] {
            let cfg = Config::new(order, tau).unwrap();
            let s = schemes::step(&s0, &model, &cfg).unwrap().0;
            assert_eq!(s.p(), s0.p());
            for i in 0..2 {
                assert!((s.q()[i] - (s0.q()[i] + tau * v[i])).abs() <= 1e-13 * (1.0 + tau));
            }
        }
    }
}

#[test]
fn symplecticity_degrades_with_a_loose_push_tolerance() {
    let model = Fpu::beta_chain(9).unwrap();
    let mut r = rng(2);
    let mut tight: f64 = 0.0;
    let mut loose: f64 = 0.0;
    for _ in 0..10 {
        let s = random_state(&mut r, 9, 1.0);
        let cfg = Config::new(Order::Eight, 0.1).unwrap();
        tight = tight.max(symplectic_defect(|x| schemes::step(x, &model, &cfg).unwrap().0, &s, 1e-6));
        let cfg = cfg.with_push_tol(1e-4).unwrap();
        loose = loose.max(symplectic_defect(|x| schemes::step(x, &model, &cfg).unwrap().0, &s, 1e-6));
    }
    assert!(tight <= 1e-7, "{tight}");
    assert!(loose > 1e-7, "a loose push tolerance should break symplecticity: {loose}");
}

#[test]
fn convergence_order_on_the_quartic_oscillator() {
    let model = Quartic::new();
    let s0 = State::new(vec![0.0], vec![1.0]).unwrap();
    // one period, rounded to a multiple of 0.1 so both step sizes land on it
    let t_end = (QUARTIC_PERIOD * 10.0).round() / 10.0;
    let reference = reference_trajectory(&model, &s0, t_end, t_end, &ReferenceSettings::standard()).unwrap();
    let exact = reference.states.last().unwrap();
    for order in Order::ALL {
        let err = |tau: f64| {
            let cfg = Config::new(order, tau).unwrap();
            let n = (t_end / tau).round() as usize;
            schemes::integrate(&s0, &model, &cfg, n, |_, _, _| {}).unwrap().distance(exact)
        };
        let ratio = err(0.1) / err(0.05);
        let target = 2f64.powi(order.as_u32() as i32);
        assert!((0.7 * target..=1.4 * target).contains(&ratio), "N={order}: ratio {ratio}, expected ≈ {target}");
    }
}

#[test]
fn energy_error_has_no_secular_drift() {
    let fpu_state = fpu_initial_state(9, 1.425, ModeSpec::default()).unwrap();
    let cases = [
        ("quartic", Builtin::Quartic(Quartic::new()), State::new(vec![0.0], vec![1.0]).unwrap()),
        ("fpu-9", Builtin::Fpu(Fpu::beta_chain(9).unwrap()), fpu_state),
    ];
    for (name, model, s0) in &cases {
        let h0 = model.energy(s0);
        for order in Order::ALL {
            let cfg = Config::new(order, 0.1).unwrap();
            let (mut early, mut all) = (0.0f64, 0.0f64);
            let mut s = s0.clone();
            for i in 1..=10_000 {
                s = model.step(&s, &cfg).unwrap().0;
                let d = (model.energy(&s) - h0).abs();
                all = all.max(d);
                if i <= 100 {
                    early = early.max(d);
                }
            }
            assert!(all <= 10.0 * early, "{name} N={order}: {all:e} vs early {early:e}");
        }
    }
}

#[test]
fn fpu_energy_error_saturates() {
    let model = Fpu::beta_chain(9).unwrap();
    let s0 = fpu_initial_state(9, 1.425, ModeSpec::default()).unwrap();
    let h0 = model.energy(&s0);
    for order in Order::ALL {
        let cfg = Config::new(order, 0.1).unwrap();
        let (mut first, mut second) = (0.0f64, 0.0f64);
        schemes::integrate(&s0, &model, &cfg, 20_000, |i, s, _| {
            let d = (model.energy(s) - h0).abs();
            if i < 10_000 {
                first = first.max(d);
            } else {
                second = second.max(d);
            }
        })
        .unwrap();
        assert!(second <= 2.0 * first, "N={order}: {second:e} after {first:e}");
    }
}

#[test]
fn push_residuals_contract_on_random_states() {
    let mut r = rng(3);
    for (name, model) in Builtin::all() {
        for order in [Order::Four, Order::Six, Order::Eight] {
            for tau in [0.1, 0.05] {
                let cfg = Config::new(order, tau).unwrap();
                for _ in 0..10 {
                    let s = random_state(&mut r, model.dim(), 1.0);
                    let report = model.step(&s, &cfg).unwrap().1;
                    assert!(report.converged && report.final_residual <= cfg.push_tol);
                    for ratio in report.contraction_ratios() {
                        assert!(ratio <= 0.1, "{name} N={order} τ={tau}: ratio {ratio}");
                    }
                }
            }
        }
    }
}

/// Exact propagator `exp(τ [[0, M], [−K, 0]])` applied to `(q, p)`.
fn exact_linear_flow(m: &[f64], k: &[f64], tau: f64, q: &[f64], p: &[f64]) -> Vec<f64> {
    let mut a = vec![0.0; 16];
    for i in 0..2 {
        for j in 0..2 {
            a[i * 4 + 2 + j] = tau * m[i * 2 + j];
            a[(2 + i) * 4 + j] = -tau * k[i * 2 + j];
        }
    }
    let e = expm(4, &a);
    let x = [q[0], q[1], p[0], p[1]];
    (0..4).map(|i| (0..4).map(|j| e[i * 4 + j] * x[j]).sum()).collect()
}

#[test]
fn modified_matrices_reach_eighth_order_against_the_matrix_exponential() {
    let m = vec![1.3, 0.4, 0.4, 0.9];
    let k = vec![1.1, -0.3, -0.3, 0.7];
    let mass = Mass::dense(2, m.clone()).unwrap();
    let (q, p) = (vec![0.4, -0.2], vec![0.1, 0.6]);
    let s0 = State::new(q.clone(), p.clone()).unwrap();
    let t_end = 2.0;
    let err = |tau: f64| {
        let stepper = LinearKickMoveKick::new(&mass, &k, tau, Order::Eight).unwrap();
        let s = stepper.integrate(&s0, (t_end / tau).round() as usize).unwrap();
        let exact = exact_linear_flow(&m, &k, t_end, &q, &p);
        s.q().iter().chain(s.p()).zip(&exact).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    };
    let ratio = err(0.4) / err(0.2);
    assert!((0.8 * 256.0..=1.2 * 256.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn modified_matrices_are_symmetric() {
    let model = coupled_quadratic();
    for order in Order::ALL {
        let (m, k) = modified_matrices(model.mass(), model.stiffness(), 0.3, order).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i * 3 + j] - m[j * 3 + i]).abs() <= 1e-12);
                assert!((k[i * 3 + j] - k[j * 3 + i]).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn single_precision_runs() {
    let model = QuarticOscillator::<f32>::new();
    let cfg = SchemeConfig::<f32>::new(Order::Four, 0.05).unwrap().with_push_tol(1e-6).unwrap();
    let s0 = PhaseState::new(vec![0.0f32], vec![1.0f32]).unwrap();
    let s = schemes::integrate(&s0, &model, &cfg, 200, |_, _, _| {}).unwrap();
    assert!((model.energy(&s) - 0.5).abs() < 1e-4);
}
