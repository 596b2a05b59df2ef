use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use super::config::{observable_label, AnalysisSpec, ExperimentConfig, Method, RandomDraw};
use crate::analysis::{coherence, fit_exponential, fit_gaussian, fit_power_law, fourier_amplitude, negativity, pearson, turning_point_prevalence, WindowSpec};
use crate::dynamics::{
    evolve_dense_with, evolve_trajectories, expectation, fmt_num, DenseOptions, Observable, TimeGrid, TimeSeries, TrajectoryConfig,
};
use crate::error::{Error, Result};
use crate::hilbert::Operator;
use crate::liouville::{build_superoperator, detuned_omegas, eigenvalues, shift_scan_with, ModeClass};
use crate::models::{LindbladModel, ModelParams};
use crate::tolerances::Tolerances;

/// What a run produced.
#[derive(Debug)]
pub struct RunReport {
    pub summary: Option<Value>,
    pub files: Vec<String>,
    pub draws: Vec<RandomDraw>,
}

struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Outputs<'_> {
    fn create(&mut self, name: &str) -> Result<BufWriter<fs::File>> {
        self.files.push(name.to_string());
        Ok(BufWriter::new(fs::File::create(self.dir.join(name))?))
    }

    fn series(&mut self, name: &str, ts: &TimeSeries) -> Result<()> {
        let mut w = self.create(name)?;
        ts.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn table(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let mut w = self.create(name)?;
        writeln!(w, "{}", header.join(","))?;
        for r in rows {
            writeln!(w, "{}", r.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    fn json(&mut self, name: &str, v: &Value) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, v)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

fn spin_only(model: &ModelParams, what: &str) -> Result<crate::models::SpinChainParams> {
    match model {
        ModelParams::Spin1(p) => Ok(p.clone()),
        ModelParams::Hubbard(_) => Err(Error::Schema(format!("{what} is implemented for spin-1 chains only"))),
    }
}

fn needs(cfg: &ExperimentConfig, what: &str) -> Result<(TimeGrid, crate::hilbert::StateVector)> {
    let grid = cfg.grid.ok_or_else(|| Error::Schema(format!("{what} needs a time grid")))?;
    let psi = cfg.initial_state()?.ok_or_else(|| Error::Schema(format!("{what} needs an initial state")))?;
    Ok((grid, psi))
}

/// Per-step quantities computed from the full density matrix.
struct StateProbes {
    negativity_sites: Vec<usize>,
    coherence: bool,
    stride: usize,
    correlators: Vec<(String, Operator, Operator, Operator)>,
    witness_rows: Vec<Vec<f64>>,
    correlator_values: Vec<Vec<f64>>,
    final_state: Option<Operator>,
}

impl StateProbes {
    fn visit(&mut self, k: usize, t: f64, rho: &Operator, last: bool) -> Result<()> {
        if !self.negativity_sites.is_empty() || self.coherence {
            if k % self.stride == 0 || last {
                let mut row = vec![t];
                for &s in &self.negativity_sites {
                    row.push(negativity(rho, s)?);
                }
                if self.coherence {
                    row.push(coherence(rho));
                }
                self.witness_rows.push(row);
            }
        }
        for (col, (_, xj, xl, xjl)) in self.correlator_values.iter_mut().zip(&self.correlators) {
            let joint = expectation(rho, xjl)?;
            let a = expectation(rho, xj)?;
            let b = expectation(rho, xl)?;
            col.push((joint - a * b).re);
        }
        if last {
            self.final_state = Some(rho.clone());
        }
        Ok(())
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path, extra_manifest: Option<Value>) -> Result<RunReport> {
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    cfg.check()?;
    fs::create_dir_all(out_dir)?;
    let tol = Tolerances::from_env();
    let (params, draws) = cfg.resolved_model();
    let model = params.build()?;
    let mut out = Outputs { dir: out_dir, files: Vec::new() };
    let mut summary = Map::new();

    for a in &cfg.analyses {
        match a {
            AnalysisSpec::Spectrum {} => spectrum_analysis(&model, &tol, &mut out, &mut summary)?,
            AnalysisSpec::ShiftScan { deltas } => {
                let p = spin_only(&params, "shift_scan")?;
                let scan = shift_scan_with(&p, deltas, &tol)?;
                out.table(
                    "shift_scan.csv",
                    &["delta", "mode_id", "re", "im", "displacement"],
                    scan.rows.iter().map(|r| {
                        vec![fmt_num(r.delta), r.mode_id.to_string(), fmt_num(r.lambda.0), fmt_num(r.lambda.1), fmt_num(r.displacement)]
                    }),
                )?;
                summary.insert("shift_scan".into(), serde_json::to_value(&scan.modes)?);
            }
            AnalysisSpec::DetuningScan { deltas, fit_window, profile_time } => {
                let p = spin_only(&params, "detuning_scan")?;
                let (grid, psi) = needs(cfg, "detuning_scan")?;
                let v = detuning_scan(&p, &grid, &psi.projector(), deltas, *fit_window, *profile_time, &tol, &mut out)?;
                summary.insert("detuning_scan".into(), v);
            }
            _ => {}
        }
    }

    let observables = cfg.observables()?;
    let state_analyses = cfg
        .analyses
        .iter()
        .any(|a| matches!(a, AnalysisSpec::FinalState { .. } | AnalysisSpec::Witnesses { .. } | AnalysisSpec::Correlators { .. }));
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let mut series_grid = None;
    if !observables.is_empty() || state_analyses {
        let (grid, psi) = needs(cfg, "time evolution")?;
        series_grid = Some(grid);
        match cfg.method {
            Method::Dense { check_stride } => {
                let probes = dense_run(cfg, &model, &grid, &psi.projector(), &observables, check_stride, &tol, &mut out, &mut summary)?;
                columns = probes;
            }
            Method::Trajectories { n_traj, jump_bisection_tol } => {
                if state_analyses {
                    return Err(Error::Schema("final_state, witnesses and correlators need the dense method".into()));
                }
                let tc = TrajectoryConfig { n_traj, seed: cfg.seed, jump_bisection_tol, ..TrajectoryConfig::new(n_traj, cfg.seed) };
                let ts = evolve_trajectories(&model, &psi, &grid, &observables, &tc)?;
                out.series("timeseries.csv", &ts)?;
                let stderr = ts.stderr.as_ref().expect("stochastic series carry stderr");
                let mean_se: f64 = stderr.iter().flatten().sum::<f64>() / stderr.iter().map(Vec::len).sum::<usize>().max(1) as f64;
                summary.insert("mean_stderr".into(), json!(mean_se));
                columns = ts.labels.iter().cloned().zip(ts.values.iter().cloned()).collect();
            }
        }
        if !observables.is_empty() {
            let per = if matches!(cfg.method, Method::Trajectories { .. }) { 2 } else { 1 };
            write_gnuplot(&mut out, per * observables.len())?;
        }
    }

    for a in &cfg.analyses {
        let grid = match series_grid {
            Some(g) => g,
            None => continue,
        };
        let col = |label: &str| -> Result<&[f64]> {
            columns
                .iter()
                .find(|c| c.0 == label)
                .map(|c| c.1.as_slice())
                .ok_or_else(|| Error::Schema(format!("no recorded series named `{label}`")))
        };
        match a {
            AnalysisSpec::Pearson { window, pairs, t_from } => {
                let pairs: Vec<(String, String)> = match pairs {
                    Some(p) => p.clone(),
                    None => observables
                        .iter()
                        .enumerate()
                        .flat_map(|(i, a)| observables[i + 1..].iter().map(move |b| (a.label.clone(), b.label.clone())))
                        .collect(),
                };
                let mut labels = Vec::new();
                let mut values = Vec::new();
                let mut s = Map::new();
                for (a, b) in &pairs {
                    let p = pearson(col(a)?, col(b)?, &grid, WindowSpec { width: *window })?;
                    let v = p.values.into_iter().next().expect("one column");
                    let finite = |k: &usize| v[*k].is_finite();
                    let last = (0..v.len()).rev().find(finite).map(|k| v[k]);
                    let mut entry = json!({ "final": last });
                    if let Some(t0) = t_from {
                        let min = (0..v.len()).filter(|k| grid.time(*k) >= *t0 - 1e-12).filter(finite).map(|k| v[k]).fold(f64::INFINITY, f64::min);
                        entry["min_after"] = if min.is_finite() { json!(min) } else { Value::Null };
                    }
                    s.insert(format!("{a}|{b}"), entry);
                    labels.push(format!("{a}|{b}"));
                    values.push(v);
                }
                if !labels.is_empty() {
                    out.series("pearson.csv", &TimeSeries::new(grid, labels, values, None)?)?;
                }
                summary.insert("pearson".into(), Value::Object(s));
            }
            AnalysisSpec::Fourier { observable, t_min } => {
                let f = fourier_amplitude(col(observable)?, &grid, *t_min)?;
                out.table(
                    &format!("fourier_{observable}.csv"),
                    &["omega", "amplitude"],
                    f.frequencies.iter().zip(&f.amplitudes).map(|(w, a)| vec![fmt_num(*w), fmt_num(*a)]),
                )?;
                let peaks: Vec<f64> = f.peaks(0.1).into_iter().take(6).collect();
                let entry = summary.entry("fourier").or_insert_with(|| json!({}));
                entry[observable.as_str()] = json!({ "peak": f.peak(), "peaks": peaks, "bin_width": f.frequencies[1] });
            }
            AnalysisSpec::Prevalence { observables: which, t_max, bins, range } => {
                let labels: Vec<String> = which.clone().unwrap_or_else(|| observables.iter().map(|o| o.label.clone()).collect());
                let data: Vec<(&str, &[f64])> = labels.iter().map(|l| Ok((l.as_str(), col(l)?))).collect::<Result<_>>()?;
                let h = turning_point_prevalence(&data, &grid, *t_max, *bins, *range)?;
                out.json("prevalence.json", &json!({ "edges": h.edges, "counts": h.counts }))?;
                let mut header = vec!["bin_low", "bin_high"];
                header.extend(labels.iter().map(String::as_str));
                out.table(
                    "prevalence.csv",
                    &header,
                    (0..*bins).map(|b| {
                        let mut row = vec![fmt_num(h.edges[b]), fmt_num(h.edges[b + 1])];
                        row.extend(labels.iter().map(|l| h.counts[l][b].to_string()));
                        row
                    }),
                )?;
                let peaks: Map<String, Value> = labels
                    .iter()
                    .filter_map(|l| h.peak_bin(l).map(|b| (l.clone(), json!(0.5 * (h.edges[b] + h.edges[b + 1])))))
                    .collect();
                summary.insert("prevalence_peaks".into(), Value::Object(peaks));
            }
            _ => {}
        }
    }

    let summary = if summary.is_empty() { None } else { Some(Value::Object(summary)) };
    if let Some(s) = &summary {
        out.json("summary.json", s)?;
    }
    let mut manifest = json!({
        "name": cfg.name,
        "code_version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "resolved_model": params,
        "seed": cfg.seed,
        "random_draws": draws,
        "dense_cap": tol.dense_cap,
        "started_unix": started_unix,
        "wall_time_s": started.elapsed().as_secs_f64(),
        "files": out.files,
    });
    if let Some(extra) = extra_manifest {
        manifest["preset"] = extra;
    }
    let files = out.files.clone();
    out.json("manifest.json", &manifest)?;
    Ok(RunReport { summary, files, draws })
}

fn spectrum_analysis(model: &LindbladModel, tol: &Tolerances, out: &mut Outputs, summary: &mut Map<String, Value>) -> Result<()> {
    let mut eigs = eigenvalues(&build_superoperator(model), tol)?;
    let radius = eigs.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let tol_zero = tol.zero_eig_rel * radius.max(f64::MIN_POSITIVE);
    eigs.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let classes: Vec<ModeClass> = eigs.iter().map(|l| ModeClass::of(*l, tol_zero)).collect();
    out.table(
        "spectrum.csv",
        &["re", "im", "class"],
        eigs.iter().zip(&classes).map(|(l, c)| vec![fmt_num(l.re), fmt_num(l.im), c.as_str().to_string()]),
    )?;
    let mut imag: Vec<f64> = eigs.iter().zip(&classes).filter(|(_, c)| **c == ModeClass::Imaginary).map(|(l, _)| l.im).collect();
    imag.sort_by(f64::total_cmp);
    summary.insert("n_zero_modes".into(), json!(classes.iter().filter(|c| **c == ModeClass::Zero).count()));
    summary.insert("n_imaginary_modes".into(), json!(imag.len()));
    summary.insert("imaginary_values".into(), json!(imag));
    summary.insert("spectral_tol_zero".into(), json!(tol_zero));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn dense_run(
    cfg: &ExperimentConfig,
    model: &LindbladModel,
    grid: &TimeGrid,
    rho0: &Operator,
    observables: &[Observable],
    check_stride: usize,
    tol: &Tolerances,
    out: &mut Outputs,
    summary: &mut Map<String, Value>,
) -> Result<Vec<(String, Vec<f64>)>> {
    let n = cfg.model.n_sites();
    let kind = cfg.model.local_kind();
    let mut probes = StateProbes {
        negativity_sites: Vec::new(),
        coherence: false,
        stride: 1,
        correlators: Vec::new(),
        witness_rows: Vec::new(),
        correlator_values: Vec::new(),
        final_state: None,
    };
    let mut threshold = None;
    for a in &cfg.analyses {
        match a {
            AnalysisSpec::Witnesses { negativity, coherence, stride } => {
                if *negativity {
                    probes.negativity_sites = (0..n).collect();
                }
                probes.coherence = *coherence;
                probes.stride = (*stride).max(1);
            }
            AnalysisSpec::Correlators { name, pairs } => {
                let pairs = pairs.clone().unwrap_or_else(|| (0..n).flat_map(|j| (j + 1..n).map(move |l| (j, l))).collect());
                for (j, l) in pairs {
                    if j >= n || l >= n {
                        return Err(Error::Schema(format!("correlator pair ({j}, {l}) out of range")));
                    }
                    let xj = name.operator(kind, n, j)?;
                    let xl = name.operator(kind, n, l)?;
                    let xjl = xj.matmul(&xl);
                    let label = format!("A_{}_{}", observable_label(*name, j), l);
                    probes.correlators.push((label, xj, xl, xjl));
                }
            }
            AnalysisSpec::FinalState { threshold: t } => threshold = Some(*t),
            _ => {}
        }
    }
    probes.correlator_values = vec![Vec::with_capacity(grid.len()); probes.correlators.len()];
    let opts = DenseOptions { tolerances: tol.clone(), check_stride };
    let last = grid.len() - 1;
    let mut visitor = |k: usize, t: f64, rho: &Operator| probes.visit(k, t, rho, k == last);
    let run = evolve_dense_with(model, rho0, grid, observables, &opts, Some(&mut visitor))?;

    summary.insert(
        "dense_checks".into(),
        json!({
            "max_trace_drift": run.max_trace_drift,
            "max_hermiticity_error": run.max_hermiticity_error,
            "min_eigenvalue": run.min_eigenvalue,
        }),
    );
    let mut columns: Vec<(String, Vec<f64>)> = run.series.labels.iter().cloned().zip(run.series.values.iter().cloned()).collect();
    if !run.series.labels.is_empty() {
        out.series("timeseries.csv", &run.series)?;
    }
    if !probes.witness_rows.is_empty() {
        let mut header: Vec<String> = vec!["t".into()];
        header.extend(probes.negativity_sites.iter().map(|s| format!("negativity_{s}")));
        if probes.coherence {
            header.push("coherence".into());
        }
        let h: Vec<&str> = header.iter().map(String::as_str).collect();
        out.table("witnesses.csv", &h, probes.witness_rows.iter().map(|r| r.iter().map(|x| fmt_num(*x)).collect()))?;
        let last = probes.witness_rows.last().expect("non-empty");
        let ns = probes.negativity_sites.len();
        let mut w = Map::new();
        if ns > 0 {
            w.insert("final_mean_negativity".into(), json!(last[1..=ns].iter().sum::<f64>() / ns as f64));
        }
        if probes.coherence {
            w.insert("final_coherence".into(), json!(last[ns + 1]));
        }
        summary.insert("witnesses".into(), Value::Object(w));
    }
    if !probes.correlators.is_empty() {
        let labels: Vec<String> = probes.correlators.iter().map(|c| c.0.clone()).collect();
        let ts = TimeSeries::new(*grid, labels.clone(), probes.correlator_values.clone(), None)?;
        out.series("correlators.csv", &ts)?;
        let spread = (0..grid.len())
            .map(|k| {
                let vals = probes.correlator_values.iter().map(|c| c[k]);
                let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
                hi - lo
            })
            .fold(0.0, f64::max);
        summary.insert("correlator_max_spread".into(), json!(spread));
        columns.extend(labels.into_iter().zip(probes.correlator_values));
    }
    if let (Some(th), Some(rho)) = (threshold, &probes.final_state) {
        let d = rho.dim();
        let entries: Vec<_> = rho.triplets().into_iter().filter(|e| e.2.norm() > th).collect();
        let off_support = entries.iter().filter(|(r, c, _)| r != c && r + c != d - 1).map(|e| e.2.norm()).fold(0.0, f64::max);
        out.table(
            "final_state.csv",
            &["row", "col", "re", "im", "abs"],
            entries.iter().map(|(r, c, v)| vec![r.to_string(), c.to_string(), fmt_num(v.re), fmt_num(v.im), fmt_num(v.norm())]),
        )?;
        summary.insert(
            "final_state".into(),
            json!({ "n_entries_above_threshold": entries.len(), "max_off_diagonal_antidiagonal": off_support }),
        );
    }
    Ok(columns)
}

#[allow(clippy::too_many_arguments)]
fn detuning_scan(
    base: &crate::models::SpinChainParams,
    grid: &TimeGrid,
    rho0: &Operator,
    deltas: &[f64],
    fit_window: (f64, f64),
    profile_time: f64,
    tol: &Tolerances,
    out: &mut Outputs,
) -> Result<Value> {
    let n = base.n_sites;
    let mean = base.omegas.iter().sum::<f64>() / n as f64;
    let opts = DenseOptions { tolerances: tol.clone(), check_stride: 1 };
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut profile = Vec::new();
    let k_profile = ((profile_time - grid.t_start) / grid.dt()).round();
    if !(k_profile >= 0.0 && (k_profile as usize) < grid.len()) {
        return Err(Error::Schema(format!("profile_time {profile_time} lies outside the grid")));
    }
    for &delta in deltas {
        let p = crate::models::SpinChainParams { omegas: detuned_omegas(n, mean, delta), ..base.clone() };
        let model = crate::models::build_spin1_chain(&p)?;
        let mut series: Vec<(f64, f64, f64)> = Vec::with_capacity(grid.len());
        let mut visitor = |_: usize, t: f64, rho: &Operator| -> Result<()> {
            let neg = (0..n).map(|s| negativity(rho, s)).sum::<Result<f64>>()? / n as f64;
            series.push((t, coherence(rho), neg));
            Ok(())
        };
        evolve_dense_with(&model, rho0, grid, &[], &opts, Some(&mut visitor))?;
        let (ts, cs): (Vec<f64>, Vec<f64>) =
            series.iter().filter(|r| r.0 >= fit_window.0 - 1e-12 && r.0 <= fit_window.1 + 1e-12).map(|r| (r.0, r.1)).unzip();
        let fit = fit_exponential(&ts, &cs)?;
        fits.push(json!({ "delta": delta, "rate": fit.rate, "amplitude": fit.amplitude, "residual": fit.residual }));
        profile.push((delta, series[k_profile as usize].1));
        for (t, c, neg) in series {
            rows.push(vec![fmt_num(delta), fmt_num(t), fmt_num(c), fmt_num(neg)]);
        }
    }
    out.table("detuning_scan.csv", &["delta", "t", "coherence", "mean_negativity"], rows)?;
    let (dx, dy): (Vec<f64>, Vec<f64>) = fits
        .iter()
        .map(|f| (f["delta"].as_f64().unwrap_or(0.0).abs(), f["rate"].as_f64().unwrap_or(0.0)))
        .filter(|(d, r)| *d > 0.0 && *r > 0.0)
        .unzip();
    let exponent = fit_power_law(&dx, &dy).ok().map(|f| f.exponent);
    let (px, py): (Vec<f64>, Vec<f64>) = profile.iter().copied().filter(|p| p.1 > 0.0).unzip();
    let width = fit_gaussian(&px, &py).ok().map(|f| f.width);
    Ok(json!({ "fits": fits, "rate_exponent": exponent, "profile_time": profile_time, "profile_width": width }))
}

fn write_gnuplot(out: &mut Outputs, n_columns: usize) -> Result<()> {
    let mut w = out.create("plot.gp")?;
    writeln!(w, "set datafile separator ','")?;
    writeln!(w, "set key autotitle columnhead")?;
    writeln!(w, "set xlabel 't'")?;
    writeln!(w, "plot for [i=2:{}] 'timeseries.csv' using 1:i with lines", n_columns + 1)?;
    w.flush()?;
    Ok(())
}
