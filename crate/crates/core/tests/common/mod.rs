#![allow(dead_code)]

use hamsplit::derivop::grad_potential_generic;
use hamsplit::schemes;
use hamsplit::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut StdRng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-half_width..half_width)).collect()
}

pub fn random_state(rng: &mut StdRng, dim: usize, half_width: f64) -> State {
    State::new(uniform(rng, dim, half_width), uniform(rng, dim, half_width)).unwrap()
}

/// Every built-in model, boxed behind a small enum so tests can loop over them.
pub enum Builtin {
    Harmonic(Quadratic),
    Coupled(Quadratic),
    Quartic(Quartic),
    Fpu(Fpu),
}

impl Builtin {
    pub fn all() -> Vec<(&'static str, Builtin)> {
        vec![
            ("harmonic", Builtin::Harmonic(Quadratic::harmonic_1d())),
            ("coupled-quadratic", Builtin::Coupled(coupled_quadratic())),
            ("quartic", Builtin::Quartic(Quartic::new())),
            ("fpu-9", Builtin::Fpu(Fpu::beta_chain(9).unwrap())),
        ]
    }

    pub fn dim(&self) -> usize {
        match self {
            Builtin::Harmonic(m) | Builtin::Coupled(m) => m.dim(),
            Builtin::Quartic(m) => m.dim(),
            Builtin::Fpu(m) => m.dim(),
        }
    }

    pub fn step(&self, s: &State, cfg: &Config) -> Result<(State, PushReport<f64>)> {
        match self {
            Builtin::Harmonic(m) | Builtin::Coupled(m) => schemes::step(s, m, cfg),
            Builtin::Quartic(m) => schemes::step(s, m, cfg),
            Builtin::Fpu(m) => schemes::step(s, m, cfg),
        }
    }

    pub fn energy(&self, s: &State) -> f64 {
        match self {
            Builtin::Harmonic(m) | Builtin::Coupled(m) => m.energy(s),
            Builtin::Quartic(m) => m.energy(s),
            Builtin::Fpu(m) => m.energy(s),
        }
    }

    /// Textbook Störmer–Verlet with the gradient taken from the jet oracle.
    pub fn verlet(&self, s: &State, tau: f64) -> State {
        match self {
            Builtin::Harmonic(m) | Builtin::Coupled(m) => verlet(m, m, s, tau),
            Builtin::Quartic(m) => verlet(m, m, s, tau),
            Builtin::Fpu(m) => verlet(m, m, s, tau),
        }
    }
}

/// 3-D quadratic with a dense mass matrix and couplings.
pub fn coupled_quadratic() -> Quadratic {
    let mass = Mass::dense(3, vec![1.5, 0.2, 0.0, 0.2, 1.0, -0.1, 0.0, -0.1, 0.8]).unwrap();
    let k = vec![2.0, -0.5, 0.1, -0.5, 1.0, -0.3, 0.1, -0.3, 1.5];
    Quadratic::new(mass, k).unwrap()
}

pub fn verlet<M: HamiltonianModel<f64>, P: Potential<f64>>(model: &M, pot: &P, s: &State, tau: f64) -> State {
    let g = grad_potential_generic(pot, s.q());
    let half: Vec<f64> = s.p().iter().zip(&g).map(|(p, g)| p - 0.5 * tau * g).collect();
    let v = model.mass().apply(&half);
    let q: Vec<f64> = s.q().iter().zip(&v).map(|(q, v)| q + tau * v).collect();
    let g = grad_potential_generic(pot, &q);
    let p = half.iter().zip(&g).map(|(p, g)| p - 0.5 * tau * g).collect();
    State::new(q, p).unwrap()
}

/// `‖JᵀΩJ − Ω‖∞` for the Jacobian of `map` by central differences.
pub fn symplectic_defect(map: impl Fn(&State) -> State, s: &State, h: f64) -> f64 {
    let d = s.dim();
    let n = 2 * d;
    let flat = |st: &State| -> Vec<f64> { st.q().iter().chain(st.p()).copied().collect() };
    let x0 = flat(s);
    // j[r][c] = ∂ out_r / ∂ in_c
    let mut j = vec![vec![0.0; n]; n];
    for c in 0..n {
        let mut plus = x0.clone();
        let mut minus = x0.clone();
        plus[c] += h;
        minus[c] -= h;
        let unflat = |x: &[f64]| State::new(x[..d].to_vec(), x[d..].to_vec()).unwrap();
        let (fp, fm) = (flat(&map(&unflat(&plus))), flat(&map(&unflat(&minus))));
        for r in 0..n {
            j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    let omega = |a: usize, b: usize| -> f64 {
        if a < d && b == a + d {
            1.0
        } else if a >= d && b + d == a {
            -1.0
        } else {
            0.0
        }
    };
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut acc = 0.0;
            for r in 0..n {
                for c in 0..n {
                    let w = omega(r, c);
                    if w != 0.0 {
                        acc += j[r][a] * w * j[c][b];
                    }
                }
            }
            worst = worst.max((acc - omega(a, b)).abs());
        }
    }
    worst
}

/// `exp(A)` for a small dense matrix by scaling and squaring of the Taylor series.
pub fn expm(n: usize, a: &[f64]) -> Vec<f64> {
    let norm = a.iter().fold(0.0f64, |m, x| m.max(x.abs())) * n as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    let a: Vec<f64> = a.iter().map(|x| x * scale).collect();
    let mul = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    z[i * n + j] += x[i * n + k] * y[k * n + j];
                }
            }
        }
        z
    };
    let mut result = vec![0.0; n * n];
    let mut term = vec![0.0; n * n];
    for i in 0..n {
        result[i * n + i] = 1.0;
        term[i * n + i] = 1.0;
    }
    for k in 1..30 {
        term = mul(&term, &a).into_iter().map(|x| x / k as f64).collect();
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = mul(&result, &result);
    }
    result
}
