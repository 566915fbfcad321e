//! Observables and analyses over recorded trajectories.

use crate::config::{Order, SchemeConfig};
use crate::error::{Error, Result};
use crate::model::HamiltonianModel;
use crate::phase::PhaseState;
use crate::real::Real;
use crate::schemes;

/// Sampled trajectory. All vectors have the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<T> {
    pub times: Vec<T>,
    pub states: Vec<PhaseState<T>>,
    pub energies: Vec<T>,
    pub push_iterations: Vec<usize>,
    pub is_reference: bool,
}

impl<T: Real> RunRecord<T> {
    pub fn new(
        times: Vec<T>,
        states: Vec<PhaseState<T>>,
        energies: Vec<T>,
        push_iterations: Vec<usize>,
    ) -> Result<Self> {
        let n = times.len();
        if states.len() != n || energies.len() != n || push_iterations.len() != n {
            return Err(Error::InvalidInput("record columns differ in length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("times must be strictly increasing".into()));
        }
        Ok(Self {
            times,
            states,
            energies,
            push_iterations,
            is_reference: false,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// First coordinate of every sample.
    pub fn q0(&self) -> Vec<T> {
        self.states.iter().map(|s| s.q()[0]).collect()
    }
}

/// Integrates `n_steps` and keeps the initial state plus every `stride`-th
/// step. The last step is always kept.
pub fn record_run<T: Real, M: HamiltonianModel<T>>(
    model: &M,
    state0: &PhaseState<T>,
    config: &SchemeConfig<T>,
    n_steps: usize,
    stride: usize,
) -> Result<RunRecord<T>> {
    if stride == 0 {
        return Err(Error::InvalidConfig("sample stride must be positive".into()));
    }
    let mut rec = RunRecord {
        times: vec![T::zero()],
        states: vec![state0.clone()],
        energies: vec![model.energy(state0)],
        push_iterations: vec![0],
        is_reference: false,
    };
    let mut iters = 0;
    schemes::integrate(state0, model, config, n_steps, |i, s, report| {
        iters = iters.max(report.iterations);
        if i % stride == 0 || i == n_steps {
            rec.times.push(config.tau * T::lit(i as f64));
            rec.states.push(s.clone());
            rec.energies.push(model.energy(s));
            rec.push_iterations.push(iters);
            iters = 0;
        }
    })?;
    if rec.energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("energy"));
    }
    Ok(rec)
}

/// `(H(t) − H0) / τᴺ`.
pub fn scaled_energy_error<T: Real>(record: &RunRecord<T>, h0: T, tau: T, order: Order) -> Vec<T> {
    let scale = tau.powi(order.as_u32() as i32);
    record.energies.iter().map(|&h| (h - h0) / scale).collect()
}

fn same_time<T: Real>(a: T, b: T) -> bool {
    (a - b).abs() <= T::lit(1e-9) * T::one().max(a.abs())
}

/// Euclidean phase-space distance at every shared sample time.
pub fn global_error<T: Real>(record: &RunRecord<T>, reference: &RunRecord<T>) -> Result<Vec<T>> {
    if record.len() != reference.len() {
        return Err(Error::TimeGridMismatch(format!(
            "{} samples vs {} in the reference",
            record.len(),
            reference.len()
        )));
    }
    record
        .times
        .iter()
        .zip(&reference.times)
        .zip(record.states.iter().zip(&reference.states))
        .map(|((&t, &tr), (s, r))| {
            if !same_time(t, tr) {
                return Err(Error::TimeGridMismatch(format!("t = {t} vs {tr}")));
            }
            if s.dim() != r.dim() {
                return Err(Error::DimensionMismatch {
                    expected: r.dim(),
                    got: s.dim(),
                });
            }
            Ok(s.distance(r))
        })
        .collect()
}

/// Root in `[t[k], t[k+1]]` of the cubic through four samples.
fn cubic_root<T: Real>(t: [T; 4], y: [T; 4], k: usize) -> T {
    let eval = |x: T| {
        let mut acc = T::zero();
        for i in 0..4 {
            let mut l = y[i];
            for j in 0..4 {
                if i != j {
                    l *= (x - t[j]) / (t[i] - t[j]);
                }
            }
            acc += l;
        }
        acc
    };
    let (mut lo, mut hi) = (t[k], t[k + 1]);
    let (mut flo, fhi) = (eval(lo), eval(hi));
    if flo == T::zero() {
        return lo;
    }
    if fhi == T::zero() || flo.signum() == fhi.signum() {
        // cubic lost the bracket: fall back to the chord
        return t[k] - y[k] * (t[k + 1] - t[k]) / (y[k + 1] - y[k]);
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(mid);
        if fm == T::zero() {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * T::lit(0.5)
}

/// Upward zero crossings of the first coordinate.
pub fn upward_crossings<T: Real>(record: &RunRecord<T>) -> Vec<T> {
    let q = record.q0();
    let t = &record.times;
    let n = q.len();
    let mut out = Vec::new();
    if n < 4 {
        return out;
    }
    for i in 0..n - 1 {
        if q[i] < T::zero() && q[i + 1] >= T::zero() {
            let start = i.saturating_sub(1).min(n - 4);
            let w = [start, start + 1, start + 2, start + 3];
            let tt = w.map(|k| t[k]);
            let yy = w.map(|k| q[k]);
            let root = cubic_root(tt, yy, i - start);
            out.push(root);
        }
    }
    out
}

/// Mean period from upward zero crossings of `q[0]`.
pub fn period_estimate<T: Real>(record: &RunRecord<T>) -> Result<T> {
    let c = upward_crossings(record);
    if c.len() < 2 {
        return Err(Error::InsufficientCrossings(c.len()));
    }
    Ok((c[c.len() - 1] - c[0]) / T::lit((c.len() - 1) as f64))
}

/// Least-squares slope of `log err` against `log τ`.
pub fn convergence_order(errors_by_tau: &[(f64, f64)]) -> Result<f64> {
    if errors_by_tau.len() < 2 {
        return Err(Error::InvalidInput("need at least two (tau, error) pairs".into()));
    }
    if errors_by_tau.iter().any(|&(t, e)| !(t > 0.0 && e > 0.0 && t.is_finite() && e.is_finite())) {
        return Err(Error::InvalidInput("tau and error must be positive and finite".into()));
    }
    let xs: Vec<f64> = errors_by_tau.iter().map(|&(t, _)| t.ln()).collect();
    let ys: Vec<f64> = errors_by_tau.iter().map(|&(_, e)| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("tau values must be distinct".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// `N_opt = √(2(P + log₁₀ t − 2))` for `P` significant digits at time `t`.
pub fn optimal_order(p_digits: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("time must be positive".into()));
    }
    let r = p_digits + t.log10() - 2.0;
    if r < 0.0 {
        return Err(Error::InvalidInput(format!("negative radicand {r}")));
    }
    Ok((2.0 * r).sqrt())
}

/// Least-squares fit `y ≈ a + b t` over `t ∈ [t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    /// `‖y − fit‖₂ / ‖y‖₂` over the window.
    pub relative_residual: f64,
    pub samples: usize,
}

pub fn linear_fit(times: &[f64], values: &[f64], t_min: f64, t_max: f64) -> Result<LinearFit> {
    if times.len() != values.len() {
        return Err(Error::InvalidInput("times and values differ in length".into()));
    }
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= t_min && t <= t_max)
        .map(|(&t, &v)| (t, v))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidInput("fewer than two samples in the fit window".into()));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::InvalidInput("fit window has a single time".into()));
    }
    let slope = pts.iter().map(|p| (p.0 - mt) * (p.1 - mv)).sum::<f64>() / stt;
    let intercept = mv - slope * mt;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss: f64 = pts.iter().map(|p| p.1 * p.1).sum();
    let relative_residual = if ss > 0.0 { (ss_res / ss).sqrt() } else { 0.0 };
    Ok(LinearFit {
        intercept,
        slope,
        relative_residual,
        samples: pts.len(),
    })
}

pub const REFERENCE_TAU: f64 = 5e-4;

/// Step and push tolerance of the order-8 reference run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSettings<T> {
    pub tau_ref: T,
    pub push_tol: T,
}

impl<T: Real> ReferenceSettings<T> {
    /// `τ_ref = 5·10⁻⁴` (built as the exact ratio 1/2000 in `T`) and the
    /// default push tolerance. Pass a tighter tolerance for extended types.
    pub fn standard() -> Self {
        Self {
            tau_ref: crate::real::ratio(1, 2000),
            push_tol: SchemeConfig::<T>::default_push_tol(),
        }
    }

    pub fn with_push_tol(mut self, tol: T) -> Self {
        self.push_tol = tol;
        self
    }
}

/// Order-8 run at `settings.tau_ref`, sampled every `sample_dt` up to `t_end`.
pub fn reference_trajectory<T: Real, M: HamiltonianModel<T>>(
    model: &M,
    state0: &PhaseState<T>,
    t_end: T,
    sample_dt: T,
    settings: &ReferenceSettings<T>,
) -> Result<RunRecord<T>> {
    let ratio = |a: T, b: T, what: &str| -> Result<usize> {
        let r = (a / b).to_f64().unwrap_or(f64::NAN);
        let k = r.round();
        if !(r.is_finite() && k >= 0.0 && (r - k).abs() <= 1e-6 * k.max(1.0)) {
            return Err(Error::InvalidConfig(format!("{what} is not an integer multiple")));
        }
        Ok(k as usize)
    };
    if !(t_end >= T::zero()) {
        return Err(Error::InvalidConfig("t_end must be >= 0".into()));
    }
    let stride = ratio(sample_dt, settings.tau_ref, "sample_dt / tau_ref")?;
    if stride == 0 {
        return Err(Error::InvalidConfig("sample_dt must be at least tau_ref".into()));
    }
    let n_steps = ratio(t_end, settings.tau_ref, "t_end / tau_ref")?;
    let config = SchemeConfig::new(Order::Eight, settings.tau_ref)?.with_push_tol(settings.push_tol)?;
    let mut rec = record_run(model, state0, &config, n_steps, stride)?;
    rec.is_reference = true;
    Ok(rec)
}
