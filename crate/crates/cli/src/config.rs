//! Flat TOML experiment configuration, merged with command-line overrides and
//! validated in full before anything runs.

use std::path::{Path, PathBuf};

use hamsplit::diagnostics::REFERENCE_TAU;
use hamsplit::Order;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: Option<String>,
    pub order: Option<u32>,
    pub tau: Option<f64>,
    pub steps: Option<usize>,
    pub stride: Option<usize>,
    pub out: Option<PathBuf>,
    pub full_state: Option<bool>,
    pub precision: Option<String>,
    pub push_tol: Option<f64>,
    pub push_max_iter: Option<usize>,
    pub q0: Option<Vec<f64>>,
    pub p0: Option<Vec<f64>>,
    pub d: Option<usize>,
    pub energy: Option<f64>,
    pub mode: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub omega2: Option<f64>,
    pub periodic: Option<bool>,
    pub orders: Option<Vec<u32>>,
    pub taus: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub tau_ref: Option<f64>,
    pub d_list: Option<Vec<usize>>,
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub order: Option<u32>,
    pub tau: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub full_state: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Run,
    Sweep,
    Fpu,
    Bench,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    F64,
    DoubleDouble,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Harmonic,
    Quartic,
    Fpu {
        d: usize,
        alpha: f64,
        beta: f64,
        omega2: f64,
        periodic: bool,
    },
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Harmonic | ModelSpec::Quartic => 1,
            ModelSpec::Fpu { d, .. } => *d,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Explicit { q: Vec<f64>, p: Vec<f64> },
    FpuMode { energy: f64, mode: usize },
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub model: ModelSpec,
    pub initial: Initial,
    pub order: Order,
    pub tau: f64,
    pub steps: usize,
    pub stride: usize,
    pub out: PathBuf,
    pub full_state: bool,
    pub precision: Precision,
    pub push_tol: Option<f64>,
    pub push_max_iter: usize,
    pub orders: Vec<Order>,
    pub taus: Vec<f64>,
    pub t_end: f64,
    pub tau_ref: f64,
    pub d_list: Vec<usize>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_order(n: u32) -> Result<Order, CliError> {
    Order::try_from(n).map_err(|e| bad(e.to_string()))
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(bad(format!("{name} must be a positive finite number, got {x}")))
    }
}

/// `a / b` when it is a whole number.
pub fn whole_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let k = r.round();
    (r.is_finite() && k >= 0.0 && (r - k).abs() <= 1e-9 * k.max(1.0)).then_some(k as usize)
}

impl Experiment {
    pub fn resolve(raw: RawConfig, over: &Overrides, task: Task) -> Result<Self, CliError> {
        let default_model = if task == Task::Fpu || task == Task::Bench { "fpu" } else { "quartic" };
        let model_name = raw.model.as_deref().unwrap_or(default_model);
        if task == Task::Fpu && model_name != "fpu" {
            return Err(bad(format!("the fpu command needs model = \"fpu\", got {model_name:?}")));
        }
        let model = match model_name {
            "harmonic" => ModelSpec::Harmonic,
            "quartic" => ModelSpec::Quartic,
            "fpu" => {
                let d = raw.d.unwrap_or(9);
                if d < 2 {
                    return Err(bad(format!("d must be at least 2, got {d}")));
                }
                let omega2 = raw.omega2.unwrap_or(0.0);
                if !(omega2.is_finite() && omega2 >= 0.0) {
                    return Err(bad(format!("omega2 must be >= 0, got {omega2}")));
                }
                let alpha = raw.alpha.unwrap_or(0.0);
                let beta = raw.beta.unwrap_or(1.0);
                if !alpha.is_finite() || !beta.is_finite() {
                    return Err(bad("alpha and beta must be finite"));
                }
                ModelSpec::Fpu { d, alpha, beta, omega2, periodic: raw.periodic.unwrap_or(false) }
            }
            other => return Err(bad(format!("unknown model {other:?} (harmonic, quartic, fpu)"))),
        };
        let fpu_keys = [raw.d.is_some(), raw.alpha.is_some(), raw.beta.is_some(), raw.omega2.is_some(), raw.periodic.is_some()];
        if !matches!(model, ModelSpec::Fpu { .. }) && fpu_keys.iter().any(|&k| k) {
            return Err(bad("d, alpha, beta, omega2 and periodic only apply to model = \"fpu\""));
        }

        let dim = model.dim();
        let initial = match (raw.q0, raw.p0) {
            (Some(q), Some(p)) => {
                if q.len() != dim || p.len() != dim {
                    return Err(bad(format!("q0 and p0 need {dim} entries")));
                }
                if q.iter().chain(&p).any(|x| !x.is_finite()) {
                    return Err(bad("q0 and p0 must be finite"));
                }
                if raw.energy.is_some() || raw.mode.is_some() {
                    return Err(bad("energy and mode cannot be combined with q0/p0"));
                }
                Initial::Explicit { q, p }
            }
            (None, None) => match model {
                ModelSpec::Fpu { d, .. } => {
                    let energy = raw.energy.unwrap_or(1.425);
                    if !(energy.is_finite() && energy >= 0.0) {
                        return Err(bad(format!("energy must be >= 0, got {energy}")));
                    }
                    let mode = raw.mode.unwrap_or(1);
                    if mode == 0 || mode >= d {
                        return Err(bad(format!("mode must be in 1..{d}, got {mode}")));
                    }
                    Initial::FpuMode { energy, mode }
                }
                _ => {
                    if raw.energy.is_some() || raw.mode.is_some() {
                        return Err(bad("energy and mode only apply to model = \"fpu\""));
                    }
                    Initial::Explicit { q: vec![0.0], p: vec![1.0] }
                }
            },
            _ => return Err(bad("q0 and p0 must be given together")),
        };

        let order = parse_order(over.order.or(raw.order).unwrap_or(4))?;
        let tau = positive("tau", over.tau.or(raw.tau).unwrap_or(0.1))?;
        let steps = over.steps.or(raw.steps).unwrap_or(1000);
        let stride = raw.stride.unwrap_or(1);
        if stride == 0 {
            return Err(bad("stride must be at least 1"));
        }
        let precision = match raw.precision.as_deref() {
            None if task == Task::Fpu => Precision::DoubleDouble,
            None | Some("f64") => Precision::F64,
            Some("double-double") => Precision::DoubleDouble,
            Some(other) => return Err(bad(format!("unknown precision {other:?} (f64, double-double)"))),
        };
        let push_tol = raw.push_tol.map(|x| positive("push_tol", x)).transpose()?;
        let push_max_iter = raw.push_max_iter.unwrap_or(25);
        if push_max_iter == 0 {
            return Err(bad("push_max_iter must be at least 1"));
        }

        let orders = raw
            .orders
            .unwrap_or_else(|| vec![2, 4, 6, 8])
            .into_iter()
            .map(parse_order)
            .collect::<Result<Vec<_>, _>>()?;
        if orders.is_empty() {
            return Err(bad("orders must not be empty"));
        }
        let default_taus = if task == Task::Fpu { vec![1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0] } else { vec![0.1, 0.05] };
        let taus = raw.taus.unwrap_or(default_taus);
        if taus.is_empty() {
            return Err(bad("taus must not be empty"));
        }
        for &t in &taus {
            positive("taus entry", t)?;
        }
        let t_end = positive("t_end", raw.t_end.unwrap_or(10.0))?;
        let tau_ref = positive("tau_ref", raw.tau_ref.unwrap_or(REFERENCE_TAU))?;
        let d_list = raw.d_list.unwrap_or_else(|| vec![9]);
        if d_list.is_empty() {
            return Err(bad("d_list must not be empty"));
        }
        if let Some(&d) = d_list.iter().find(|&&d| d < 2) {
            return Err(bad(format!("d_list entries must be at least 2, got {d}")));
        }

        let exp = Experiment {
            model,
            initial,
            order,
            tau,
            steps,
            stride,
            out: over.out.clone().or(raw.out).unwrap_or_else(|| PathBuf::from("out")),
            full_state: over.full_state || raw.full_state.unwrap_or(false),
            precision,
            push_tol,
            push_max_iter,
            orders,
            taus,
            t_end,
            tau_ref,
            d_list,
        };
        if matches!(task, Task::Sweep | Task::Fpu) {
            exp.check_sweep_grid()?;
        }
        if task == Task::Bench {
            match exp.initial {
                Initial::FpuMode { mode, .. } => {
                    if let Some(&d) = exp.d_list.iter().find(|&&d| mode >= d) {
                        return Err(bad(format!("mode {mode} does not fit a chain with d = {d}")));
                    }
                }
                Initial::Explicit { .. } => return Err(bad("bench starts from an FPU mode, not q0/p0")),
            }
        }
        Ok(exp)
    }

    /// Sampling interval shared by every sweep cell and the reference.
    pub fn sample_dt(&self) -> f64 {
        self.taus.iter().cloned().fold(0.0, f64::max) * self.stride as f64
    }

    fn check_sweep_grid(&self) -> Result<(), CliError> {
        let dt = self.sample_dt();
        for &tau in &self.taus {
            if whole_ratio(dt, tau).is_none() || whole_ratio(self.t_end, tau).is_none() {
                return Err(bad(format!(
                    "tau = {tau} must divide both the sample interval {dt} (largest tau × stride) and t_end = {}",
                    self.t_end
                )));
            }
        }
        if whole_ratio(self.t_end, dt).is_none() {
            return Err(bad(format!("t_end = {} is not a multiple of the sample interval {dt}", self.t_end)));
        }
        if whole_ratio(dt, self.tau_ref).is_none() {
            return Err(bad(format!("sample interval {dt} is not a multiple of tau_ref = {}", self.tau_ref)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RawConfig, toml::de::Error> {
        toml::from_str(text)
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse("model = \"quartic\"\ntua = 0.1\n").is_err());
    }

    #[test]
    fn overrides_win() {
        let raw = parse("order = 2\ntau = 0.2\n").unwrap();
        let over = Overrides { order: Some(8), ..Default::default() };
        let exp = Experiment::resolve(raw, &over, Task::Run).unwrap();
        assert_eq!(exp.order, Order::Eight);
        assert_eq!(exp.tau, 0.2);
    }

    #[test]
    fn rejects_bad_values() {
        let cases = [
            "order = 3",
            "tau = -1.0",
            "taus = []",
            "d_list = []",
            "model = \"pendulum\"",
            "model = \"quartic\"\nd = 4",
            "q0 = [0.0]",
            "model = \"fpu\"\nmode = 9",
            "precision = \"quad\"",
        ];
        for text in cases {
            let raw = parse(text).unwrap();
            assert!(Experiment::resolve(raw, &Overrides::default(), Task::Sweep).is_err(), "{text}");
        }
    }

    #[test]
    fn sweep_grid_must_be_commensurate() {
        let raw = parse("taus = [0.1, 0.03]").unwrap();
        assert!(Experiment::resolve(raw, &Overrides::default(), Task::Sweep).is_err());
        let raw = parse("taus = [0.1, 0.05]\nt_end = 10.0").unwrap();
        let exp = Experiment::resolve(raw, &Overrides::default(), Task::Sweep).unwrap();
        assert_eq!(exp.sample_dt(), 0.1);
    }

    #[test]
    fn fpu_defaults() {
        let exp = Experiment::resolve(RawConfig::default(), &Overrides::default(), Task::Fpu).unwrap();
        assert_eq!(exp.precision, Precision::DoubleDouble);
        assert_eq!(exp.model.dim(), 9);
        assert_eq!(exp.initial, Initial::FpuMode { energy: 1.425, mode: 1 });
    }
}
