use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use hamsplit::diagnostics::{
    convergence_order, global_error, linear_fit, record_run, reference_trajectory, ReferenceSettings,
};
use hamsplit::io::{format_float, read_run_csv, write_run_csv, RunCsvOptions, DEFAULT_MAX_COORDS};
use hamsplit::{schemes, DoubleDouble, HamiltonianModel, Order, Real, RunRecord};

use crate::config::{whole_ratio, Experiment, Initial, Precision};
use crate::error::CliError;
use crate::models::{build_model, fpu_chain, initial_state, push_tol, scheme_config, step_size};
use crate::svg::{self, Chart, Series};

pub const SUMMARY_HEADER: &str = "order,tau,max_abs_dH,eps_at_tend,fitted_slope";
pub const BENCH_HEADER: &str = "d,order,seconds,seconds_per_step_per_particle";

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_record<T: Real>(exp: &Experiment, path: &Path, record: &RunRecord<T>, order: Order, tau: f64) -> Result<(), CliError> {
    let opts = RunCsvOptions {
        tau,
        order,
        max_coords: if exp.full_state { None } else { Some(DEFAULT_MAX_COORDS) },
    };
    let mut out = create(path)?;
    write_run_csv(&mut out, record, &opts)?;
    out.flush()?;
    Ok(())
}

/// `(H − H₀)/scale` against time.
fn energy_chart(path: &Path, title: &str, times: &[f64], energies: &[f64], scale: f64, y_label: &str) -> Result<(), CliError> {
    let h0 = energies.first().copied().unwrap_or(0.0);
    let points = times.iter().zip(energies).map(|(&t, &h)| (t, (h - h0) / scale)).collect();
    let chart = Chart { title, x_label: "t", y_label, log_x: false, log_y: false };
    let series = Series { label: title.to_string(), points };
    fs::write(path, svg::render(&chart, &[series]))?;
    Ok(())
}

pub fn run(exp: &Experiment) -> Result<(), CliError> {
    match exp.precision {
        Precision::F64 => run_in::<f64>(exp),
        Precision::DoubleDouble => run_in::<DoubleDouble>(exp),
    }
}

fn run_in<T: Real>(exp: &Experiment) -> Result<(), CliError> {
    let model = build_model::<T>(&exp.model)?;
    let s0 = initial_state::<T>(&exp.initial, model.dim())?;
    let cfg = scheme_config::<T>(exp, exp.order, exp.tau)?;
    let record = record_run(&model, &s0, &cfg, exp.steps, exp.stride)?;
    fs::create_dir_all(&exp.out)?;
    write_record(exp, &exp.out.join("run.csv"), &record, exp.order, exp.tau)?;
    let times: Vec<f64> = record.times.iter().map(|&t| to_f64(t)).collect();
    let energies: Vec<f64> = record.energies.iter().map(|&h| to_f64(h)).collect();
    let scale = exp.tau.powi(exp.order.as_u32() as i32);
    let title = format!("N={}, tau={}", exp.order, exp.tau);
    energy_chart(&exp.out.join("run_dH.svg"), &title, &times, &energies, scale, "(H - H0) / tau^N")?;
    println!("wrote {} samples to {}", record.len(), exp.out.join("run.csv").display());
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub order: u32,
    pub tau: f64,
    pub max_abs_dh: f64,
    pub eps_at_tend: f64,
    pub fitted_slope: f64,
}

struct Fit {
    order: Order,
    tau: f64,
    intercept: f64,
    slope: f64,
    relative_residual: f64,
}

/// Order × step sweep against an order-8 reference. With `eps_series` each
/// cell also gets its `ε(t)` curve and a linear fit over `[t_end/10, t_end]`.
pub fn sweep(exp: &Experiment, eps_series: bool) -> Result<(), CliError> {
    match exp.precision {
        Precision::F64 => sweep_in::<f64>(exp, eps_series),
        Precision::DoubleDouble => sweep_in::<DoubleDouble>(exp, eps_series),
    }
}

fn sweep_in<T: Real>(exp: &Experiment, eps_series: bool) -> Result<(), CliError> {
    let model = build_model::<T>(&exp.model)?;
    let s0 = initial_state::<T>(&exp.initial, model.dim())?;
    // every cell config is checked before the long reference run starts
    let mut cells = Vec::new();
    for &order in &exp.orders {
        for &tau in &exp.taus {
            cells.push((order, tau, scheme_config::<T>(exp, order, tau)?));
        }
    }
    let dt = exp.sample_dt();
    let settings = ReferenceSettings { tau_ref: step_size::<T>(exp.tau_ref), push_tol: push_tol::<T>(exp) };
    let reference = reference_trajectory(&model, &s0, T::lit(exp.t_end), step_size(dt), &settings)?;
    fs::create_dir_all(&exp.out)?;

    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for (order, tau, cfg) in cells {
        let n = whole_ratio(exp.t_end, tau).expect("validated grid");
        let stride = whole_ratio(dt, tau).expect("validated grid");
        let record = record_run(&model, &s0, &cfg, n, stride)?;
        let eps: Vec<f64> = global_error(&record, &reference)?.into_iter().map(to_f64).collect();
        let h0 = record.energies[0];
        let max_abs_dh = record.energies.iter().map(|&h| to_f64((h - h0).abs())).fold(0.0, f64::max);
        let stem = format!("order{order}_tau{tau}");
        write_record(exp, &exp.out.join(format!("run_{stem}.csv")), &record, order, tau)?;
        if eps_series {
            let times: Vec<f64> = record.times.iter().map(|&t| to_f64(t)).collect();
            let mut out = create(&exp.out.join(format!("eps_{stem}.csv")))?;
            writeln!(out, "time,eps")?;
            for (t, e) in times.iter().zip(&eps) {
                writeln!(out, "{},{}", format_float(*t), format_float(*e))?;
            }
            out.flush()?;
            let fit = linear_fit(&times, &eps, exp.t_end / 10.0, exp.t_end)?;
            fits.push(Fit { order, tau, intercept: fit.intercept, slope: fit.slope, relative_residual: fit.relative_residual });
        }
        rows.push(SummaryRow {
            order: order.as_u32(),
            tau,
            max_abs_dh,
            eps_at_tend: *eps.last().expect("record has samples"),
            fitted_slope: f64::NAN,
        });
    }
    for order in &exp.orders {
        let pairs: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.order == order.as_u32())
            .map(|r| (r.tau, r.eps_at_tend))
            .collect();
        let slope = convergence_order(&pairs).unwrap_or(f64::NAN);
        for r in rows.iter_mut().filter(|r| r.order == order.as_u32()) {
            r.fitted_slope = slope;
        }
    }

    let mut out = create(&exp.out.join("summary.csv"))?;
    writeln!(out, "{SUMMARY_HEADER}")?;
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.order,
            format_float(r.tau),
            format_float(r.max_abs_dh),
            format_float(r.eps_at_tend),
            format_float(r.fitted_slope)
        )?;
    }
    out.flush()?;
    summary_charts(&exp.out, &rows)?;

    if eps_series {
        let mut out = create(&exp.out.join("fit.csv"))?;
        writeln!(out, "order,tau,intercept,slope,relative_residual")?;
        for f in &fits {
            writeln!(
                out,
                "{},{},{},{},{}",
                f.order,
                format_float(f.tau),
                format_float(f.intercept),
                format_float(f.slope),
                format_float(f.relative_residual)
            )?;
        }
        out.flush()?;
    }
    print_summary(&rows);
    Ok(())
}

fn summary_charts(dir: &Path, rows: &[SummaryRow]) -> Result<(), CliError> {
    let mut orders: Vec<u32> = rows.iter().map(|r| r.order).collect();
    orders.dedup();
    let per_order = |metric: fn(&SummaryRow) -> f64| -> Vec<Series> {
        orders
            .iter()
            .map(|&n| Series {
                label: format!("N={n}"),
                points: rows.iter().filter(|r| r.order == n).map(|r| (r.tau, metric(r))).collect(),
            })
            .collect()
    };
    type Metric = fn(&SummaryRow) -> f64;
    let charts: [(&str, &str, Metric); 2] = [
        ("max_abs_dH", "max |H - H0|", |r| r.max_abs_dh),
        ("eps_at_tend", "global error at t_end", |r| r.eps_at_tend),
    ];
    for (name, label, metric) in charts {
        let chart = Chart { title: label, x_label: "tau", y_label: label, log_x: true, log_y: true };
        fs::write(dir.join(format!("summary_{name}.svg")), svg::render(&chart, &per_order(metric)))?;
    }
    let mut slopes: Vec<(f64, f64)> = Vec::new();
    for &n in &orders {
        if let Some(r) = rows.iter().find(|r| r.order == n) {
            slopes.push((n as f64, r.fitted_slope));
        }
    }
    let chart = Chart { title: "fitted slope of log eps vs log tau", x_label: "order", y_label: "slope", log_x: false, log_y: false };
    let series = [
        Series { label: "fitted".into(), points: slopes.clone() },
        Series { label: "N".into(), points: slopes.iter().map(|&(n, _)| (n, n)).collect() },
    ];
    fs::write(dir.join("summary_fitted_slope.svg"), svg::render(&chart, &series))?;
    Ok(())
}

fn print_summary(rows: &[SummaryRow]) {
    println!("{:>5} {:>12} {:>12} {:>12} {:>8}", "order", "tau", "max|dH|", "eps(t_end)", "slope");
    for r in rows {
        println!(
            "{:>5} {:>12.6} {:>12.3e} {:>12.3e} {:>8.3}",
            r.order, r.tau, r.max_abs_dh, r.eps_at_tend, r.fitted_slope
        );
    }
}

pub fn bench(exp: &Experiment) -> Result<(), CliError> {
    match exp.precision {
        Precision::F64 => bench_in::<f64>(exp),
        Precision::DoubleDouble => bench_in::<DoubleDouble>(exp),
    }
}

fn bench_in<T: Real>(exp: &Experiment) -> Result<(), CliError> {
    let Initial::FpuMode { .. } = exp.initial else {
        return Err(CliError::Config("bench seeds each chain from energy and mode; drop q0/p0".into()));
    };
    let mut cases = Vec::new();
    for &d in &exp.d_list {
        fpu_chain::<T>(&exp.model, d)?;
        initial_state::<T>(&exp.initial, d)?;
        for &order in &exp.orders {
            cases.push((d, order, scheme_config::<T>(exp, order, exp.tau)?));
        }
    }
    fs::create_dir_all(&exp.out)?;
    let mut out = create(&exp.out.join("bench.csv"))?;
    writeln!(out, "{BENCH_HEADER}")?;
    let mut rows = Vec::new();
    for (d, order, cfg) in cases {
        let model = fpu_chain::<T>(&exp.model, d)?;
        let s0 = initial_state::<T>(&exp.initial, d)?;
        let start = Instant::now();
        let end = schemes::integrate(&s0, &model, &cfg, exp.steps, |_, _, _| {})?;
        let seconds = start.elapsed().as_secs_f64();
        std::hint::black_box(end);
        let per = seconds / (exp.steps.max(1) as f64 * d as f64);
        writeln!(out, "{d},{order},{},{}", format_float(seconds), format_float(per))?;
        println!("d={d:<6} order={order} {seconds:.4} s ({per:.3e} s per step per particle)");
        rows.push((d, order, per));
    }
    out.flush()?;
    let series: Vec<Series> = exp
        .orders
        .iter()
        .map(|&n| Series {
            label: format!("N={n}"),
            points: rows.iter().filter(|r| r.1 == n).map(|r| (r.0 as f64, r.2)).collect(),
        })
        .collect();
    let chart = Chart {
        title: "cost per step per particle",
        x_label: "d",
        y_label: "seconds",
        log_x: true,
        log_y: true,
    };
    fs::write(exp.out.join("bench.svg"), svg::render(&chart, &series))?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, CliError> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != SUMMARY_HEADER {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad(format!("line {}: expected 5 fields", i + 2)));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("line {}: {e}", i + 2)));
        rows.push(SummaryRow {
            order: f[0].trim().parse().map_err(|e| bad(format!("line {}: {e}", i + 2)))?,
            tau: num(f[1])?,
            max_abs_dh: num(f[2])?,
            eps_at_tend: num(f[3])?,
            fitted_slope: num(f[4])?,
        });
    }
    Ok(rows)
}

/// Re-reads the CSVs in the output directory, redraws their charts and prints
/// a digest.
pub fn report(exp: &Experiment) -> Result<(), CliError> {
    let dir = &exp.out;
    if !dir.is_dir() {
        return Err(CliError::Config(format!("output directory {} does not exist", dir.display())));
    }
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    let mut found = false;
    for name in &names {
        let path = dir.join(name);
        let stem = name.trim_end_matches(".csv");
        if name == "summary.csv" {
            let rows = read_summary(&path)?;
            summary_charts(dir, &rows)?;
            println!("{name}:");
            print_summary(&rows);
            found = true;
        } else if stem.starts_with("run") {
            let record = read_run_csv(BufReader::new(File::open(&path)?))
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            energy_chart(&dir.join(format!("{stem}_dH.svg")), stem, &record.times, &record.energies, 1.0, "H - H0")?;
            let h0 = record.energies.first().copied().unwrap_or(0.0);
            let max_dh = record.energies.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max);
            let iters = record.push_iterations.iter().max().copied().unwrap_or(0);
            println!(
                "{name}: {} samples, t_end {}, max |H - H0| {max_dh:.3e}, max push iterations {iters}",
                record.len(),
                record.times.last().copied().unwrap_or(0.0)
            );
            found = true;
        } else if name == "bench.csv" {
            println!("{name}:");
            for line in fs::read_to_string(&path)?.lines() {
                println!("  {line}");
            }
            found = true;
        }
    }
    if !found {
        return Err(CliError::Config(format!("no run, summary or bench CSV in {}", dir.display())));
    }
    Ok(())
}
