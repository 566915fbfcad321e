//! CSV serialization of run records.
//!
//! Header: `step,time,H,dH_scaled,push_iters` followed by `q_i,p_i` pairs.
//! Floats use 17 significant digits so they round-trip exactly.

use std::io::{BufRead, Write};

use crate::config::Order;
use crate::diagnostics::RunRecord;
use crate::error::{Error, Result};
use crate::phase::PhaseState;
use crate::real::Real;

/// Coordinates written by default.
pub const DEFAULT_MAX_COORDS: usize = 32;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Csv(e.to_string())
}

pub struct RunCsvOptions {
    pub tau: f64,
    pub order: Order,
    /// `None` writes every coordinate.
    pub max_coords: Option<usize>,
}

pub fn write_run_csv<T: Real, W: Write>(
    out: &mut W,
    record: &RunRecord<T>,
    opts: &RunCsvOptions,
) -> Result<()> {
    let dim = record.states.first().map_or(0, |s| s.dim());
    let coords = opts.max_coords.map_or(dim, |m| m.min(dim));
    let mut header = String::from("step,time,H,dH_scaled,push_iters");
    for i in 0..coords {
        header.push_str(&format!(",q_{i},p_{i}"));
    }
    writeln!(out, "{header}").map_err(csv_err)?;
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let h0 = record.energies.first().copied().unwrap_or_else(T::zero);
    let scale = opts.tau.powi(opts.order.as_u32() as i32);
    for k in 0..record.len() {
        let t = f(record.times[k]);
        let h = record.energies[k];
        let mut line = format!(
            "{},{},{},{},{}",
            (t / opts.tau).round() as u64,
            format_float(t),
            format_float(f(h)),
            format_float(f(h - h0) / scale),
            record.push_iterations[k]
        );
        let s = &record.states[k];
        for i in 0..coords {
            line.push(',');
            line.push_str(&format_float(f(s.q()[i])));
            line.push(',');
            line.push_str(&format_float(f(s.p()[i])));
        }
        writeln!(out, "{line}").map_err(csv_err)?;
    }
    Ok(())
}

/// Parses a run CSV. The state in each row holds the written coordinates.
pub fn read_run_csv<R: BufRead>(input: R) -> Result<RunRecord<f64>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Csv("empty file".into()))?
        .map_err(csv_err)?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 5 || cols[..5] != ["step", "time", "H", "dH_scaled", "push_iters"] {
        return Err(Error::Csv(format!("unexpected header: {header}")));
    }
    if (cols.len() - 5) % 2 != 0 || cols.len() == 5 {
        return Err(Error::Csv("missing q_i,p_i columns".into()));
    }
    let coords = (cols.len() - 5) / 2;
    for i in 0..coords {
        if cols[5 + 2 * i] != format!("q_{i}") || cols[6 + 2 * i] != format!("p_{i}") {
            return Err(Error::Csv(format!("unexpected coordinate columns in {header}")));
        }
    }
    let (mut times, mut states, mut energies, mut iters) = (vec![], vec![], vec![], vec![]);
    for (n, line) in lines.enumerate() {
        let line = line.map_err(csv_err)?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Csv(format!("row {} has {} fields", n + 1, fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Csv(format!("row {}: {e}", n + 1)));
        times.push(num(fields[1])?);
        energies.push(num(fields[2])?);
        iters.push(fields[4].parse::<usize>().map_err(csv_err)?);
        let mut q = Vec::with_capacity(coords);
        let mut p = Vec::with_capacity(coords);
        for i in 0..coords {
            q.push(num(fields[5 + 2 * i])?);
            p.push(num(fields[6 + 2 * i])?);
        }
        states.push(PhaseState::new(q, p)?);
    }
    RunRecord::new(times, states, energies, iters)
}
