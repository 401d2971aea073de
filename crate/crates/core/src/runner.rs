//! Experiment runner: executes configured runs, writes machine-readable
//! artifacts (CSV series, flat-text summaries, gnuplot scripts), fans
//! sweeps out to a worker pool, and drives the Poincare-invariant and
//! convergence studies.

use crate::config::{DiagnosticsSelection, RunConfig};
use crate::diagnostics::{
    convergence_order, drift_estimate, integrate_ensemble, loop_invariant_i1, seed_loop,
    seed_surface, surface_invariant_i2, ConvergenceFit, DiagnosticSeries, LoopEnsemble,
    SurfaceEnsemble, Trajectory,
};
use crate::error::{Error, Result};
use crate::projections::{
    integrate, NewtonStats, ProjectedStepper, ProjectionKind, ProjectionOptions,
};
use crate::tableaux;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

/// 17 significant digits, enough for bit-exact f64 round trips.
fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

// ---------------------------------------------------------------------------
// Run summary.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub problem: String,
    pub method: String,
    pub completed_steps: usize,
    /// Step index at which the integration diverged, if it did.
    pub diverged_at: Option<usize>,
    pub divergence_detail: Option<String>,
    pub final_time: f64,
    pub final_q: Vec<f64>,
    pub final_p: Vec<f64>,
    pub final_lambda: Vec<f64>,
    pub max_constraint_residual: f64,
    pub final_constraint_residual: f64,
    pub final_energy_error: f64,
    pub final_momentum_error: Option<f64>,
    pub energy_drift_blocks: Vec<f64>,
    pub momentum_drift_blocks: Option<Vec<f64>>,
    pub newton_total_iterations: usize,
    pub newton_jacobian_builds: usize,
    pub newton_failures: usize,
    pub wall_time_seconds: f64,
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|x| fmt_g17(*x)).collect::<Vec<_>>().join(",")
}

fn split_f64(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad number `{p}` in summary")))
        })
        .collect()
}

impl RunSummary {
    /// Flat `key = value` text form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "problem = {}", self.problem);
        let _ = writeln!(s, "method = {}", self.method);
        let _ = writeln!(s, "completed_steps = {}", self.completed_steps);
        if let Some(n) = self.diverged_at {
            let _ = writeln!(s, "diverged_at = {n}");
        }
        if let Some(d) = &self.divergence_detail {
            let _ = writeln!(s, "divergence_detail = {d}");
        }
        let _ = writeln!(s, "final_time = {}", fmt_g17(self.final_time));
        let _ = writeln!(s, "final_q = {}", join_f64(&self.final_q));
        let _ = writeln!(s, "final_p = {}", join_f64(&self.final_p));
        let _ = writeln!(s, "final_lambda = {}", join_f64(&self.final_lambda));
        let _ = writeln!(
            s,
            "max_constraint_residual = {}",
            fmt_g17(self.max_constraint_residual)
        );
        let _ = writeln!(
            s,
            "final_constraint_residual = {}",
            fmt_g17(self.final_constraint_residual)
        );
        let _ = writeln!(s, "final_energy_error = {}", fmt_g17(self.final_energy_error));
        if let Some(m) = self.final_momentum_error {
            let _ = writeln!(s, "final_momentum_error = {}", fmt_g17(m));
        }
        let _ = writeln!(s, "energy_drift_blocks = {}", join_f64(&self.energy_drift_blocks));
        if let Some(b) = &self.momentum_drift_blocks {
            let _ = writeln!(s, "momentum_drift_blocks = {}", join_f64(b));
        }
        let _ = writeln!(s, "newton_total_iterations = {}", self.newton_total_iterations);
        let _ = writeln!(s, "newton_jacobian_builds = {}", self.newton_jacobian_builds);
        let _ = writeln!(s, "newton_failures = {}", self.newton_failures);
        let _ = writeln!(s, "wall_time_seconds = {}", fmt_g17(self.wall_time_seconds));
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("bad summary line `{line}`")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<String> {
            map.get(k)
                .cloned()
                .ok_or_else(|| Error::Config(format!("summary missing `{k}`")))
        };
        let parse_usize = |k: &str| -> Result<usize> {
            get(k)?
                .parse()
                .map_err(|_| Error::Config(format!("bad integer for `{k}`")))
        };
        let parse_f64 = |k: &str| -> Result<f64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Config(format!("bad number for `{k}`")))
        };
        Ok(RunSummary {
            problem: get("problem")?,
            method: get("method")?,
            completed_steps: parse_usize("completed_steps")?,
            diverged_at: match map.get("diverged_at") {
                Some(v) => Some(
                    v.parse()
                        .map_err(|_| Error::Config("bad diverged_at".into()))?,
                ),
                None => None,
            },
            divergence_detail: map.get("divergence_detail").cloned(),
            final_time: parse_f64("final_time")?,
            final_q: split_f64(&get("final_q")?)?,
            final_p: split_f64(&get("final_p")?)?,
            final_lambda: split_f64(&get("final_lambda")?)?,
            max_constraint_residual: parse_f64("max_constraint_residual")?,
            final_constraint_residual: parse_f64("final_constraint_residual")?,
            final_energy_error: parse_f64("final_energy_error")?,
            final_momentum_error: match map.get("final_momentum_error") {
                Some(v) => Some(
                    v.parse()
                        .map_err(|_| Error::Config("bad final_momentum_error".into()))?,
                ),
                None => None,
            },
            energy_drift_blocks: split_f64(&get("energy_drift_blocks")?)?,
            momentum_drift_blocks: match map.get("momentum_drift_blocks") {
                Some(v) => Some(split_f64(v)?),
                None => None,
            },
            newton_total_iterations: parse_usize("newton_total_iterations")?,
            newton_jacobian_builds: parse_usize("newton_jacobian_builds")?,
            newton_failures: parse_usize("newton_failures")?,
            wall_time_seconds: parse_f64("wall_time_seconds")?,
        })
    }
}

// ---------------------------------------------------------------------------
// Single run.
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct RunArtifacts {
    pub summary: RunSummary,
    pub trajectory: Trajectory,
    pub series: DiagnosticSeries,
    pub series_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
}

pub fn stepper_for(config: &RunConfig) -> Result<ProjectedStepper> {
    let tableau = tableaux::by_name(&config.tableau)?;
    ProjectedStepper::new(
        &tableau,
        config.projection,
        ProjectionOptions {
            midpoint_apply_r_infinity: config.midpoint_rinf,
        },
        config.solver.clone(),
    )
}

/// Execute one run; writes config.txt, series.csv, summary.txt and plot
/// scripts into `out_dir` when given. Divergence terminates the
/// trajectory early and is recorded in the summary, not raised.
pub fn run(config: &RunConfig, out_dir: Option<&Path>) -> Result<RunArtifacts> {
    config.validate()?;
    let sys = config.system()?;
    let stepper = stepper_for(config)?;
    let q0 = config.initial_q(&sys);
    let start = Instant::now();
    let out = integrate(&sys, &stepper, &q0, config.h, config.nsteps)?;
    let wall = start.elapsed().as_secs_f64();
    let series = DiagnosticSeries::compute(&sys, &out.trajectory);
    let failure = out.failure.as_ref().map(|(n, e)| (*n, e.to_string()));
    let summary = summarize(config, &out.trajectory, &series, &out.stats, failure, wall);
    let mut artifacts = RunArtifacts {
        summary,
        trajectory: out.trajectory,
        series,
        series_path: None,
        summary_path: None,
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config.txt"), config.serialize())?;
        let series_path = dir.join("series.csv");
        let include_momentum = config.diagnostics.momentum && sys.has_momentum_map();
        write_series_csv(
            &series_path,
            &artifacts.trajectory,
            &artifacts.series,
            config.output_interval,
            include_momentum,
        )?;
        let summary_path = dir.join("summary.txt");
        std::fs::write(&summary_path, artifacts.summary.to_text())?;
        artifacts.series_path = Some(series_path);
        artifacts.summary_path = Some(summary_path);
        emit_plots(dir)?;
    }
    Ok(artifacts)
}

fn summarize(
    config: &RunConfig,
    traj: &Trajectory,
    series: &DiagnosticSeries,
    stats: &NewtonStats,
    failure: Option<(usize, String)>,
    wall: f64,
) -> RunSummary {
    let last = traj.final_state();
    let max_res = series
        .constraint_residual
        .iter()
        .fold(0.0_f64, |m, v| m.max(*v));
    let blocks = |s: &[f64]| -> Vec<f64> {
        if s.len() >= 10 {
            drift_estimate(s, 10)
        } else {
            Vec::new()
        }
    };
    RunSummary {
        problem: config.problem.clone(),
        method: format!("{}+{}", config.tableau, config.projection.as_str()),
        completed_steps: traj.len() - 1,
        diverged_at: failure.as_ref().map(|(n, _)| *n),
        divergence_detail: failure.map(|(_, e)| e),
        final_time: last.t,
        final_q: last.point.q.clone(),
        final_p: last.point.p.clone(),
        final_lambda: last.lambda.clone(),
        max_constraint_residual: max_res,
        final_constraint_residual: *series.constraint_residual.last().unwrap(),
        final_energy_error: *series.energy_error.last().unwrap(),
        final_momentum_error: series
            .momentum_error
            .as_ref()
            .map(|m| *m.last().unwrap()),
        energy_drift_blocks: blocks(&series.energy_error),
        momentum_drift_blocks: series.momentum_error.as_ref().map(|m| blocks(m)),
        newton_total_iterations: stats.total_iterations,
        newton_jacobian_builds: stats.total_jacobian_builds,
        newton_failures: stats.failures,
        wall_time_seconds: wall,
    }
}

/// CSV schema: t, q1..qd, p1..pd, lambda1..lambdad, energy_err,
/// constraint_res[, momentum_err]; comma separators, LF endings, one row
/// every output_interval steps plus the final recorded state.
fn write_series_csv(
    path: &Path,
    traj: &Trajectory,
    series: &DiagnosticSeries,
    output_interval: usize,
    include_momentum: bool,
) -> Result<()> {
    let d = traj.states[0].point.dim();
    let mut text = String::new();
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|i| format!("q{i}")));
    header.extend((1..=d).map(|i| format!("p{i}")));
    header.extend((1..=d).map(|i| format!("lambda{i}")));
    header.push("energy_err".to_string());
    header.push("constraint_res".to_string());
    if include_momentum {
        header.push("momentum_err".to_string());
    }
    text.push_str(&header.join(","));
    text.push('\n');
    let n = traj.len();
    let mut rows: Vec<usize> = (0..n).step_by(output_interval).collect();
    if *rows.last().unwrap() != n - 1 {
        rows.push(n - 1);
    }
    for idx in rows {
        let st = &traj.states[idx];
        let mut cols = vec![fmt_g17(st.t)];
        cols.extend(st.point.q.iter().map(|x| fmt_g17(*x)));
        cols.extend(st.point.p.iter().map(|x| fmt_g17(*x)));
        cols.extend(st.lambda.iter().map(|x| fmt_g17(*x)));
        cols.push(fmt_g17(series.energy_error[idx]));
        cols.push(fmt_g17(series.constraint_residual[idx]));
        if include_momentum {
            cols.push(fmt_g17(series.momentum_error.as_ref().unwrap()[idx]));
        }
        text.push_str(&cols.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Sweep.
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct SweepEntry {
    pub index: usize,
    pub overrides: Vec<(String, String)>,
    pub outcome: std::result::Result<RunSummary, String>,
}

#[derive(Debug)]
pub struct SweepOutput {
    pub entries: Vec<SweepEntry>,
    pub table_path: Option<PathBuf>,
    pub convergence_path: Option<PathBuf>,
}

/// Cartesian-product sweep over configuration axes, fanned out to
/// `workers` threads; individual failures are recorded and the sweep
/// continues. Emits a comparison table, plus a convergence table when
/// the sole axis is sim.h.
pub fn sweep(
    base: &RunConfig,
    axes: &[(String, Vec<String>)],
    out_dir: Option<&Path>,
    workers: usize,
) -> Result<SweepOutput> {
    if axes.is_empty() {
        return Err(Error::Config("sweep needs at least one axis".into()));
    }
    let mut jobs: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (key, values) in axes {
        let mut next = Vec::new();
        for combo in &jobs {
            for v in values {
                let mut c = combo.clone();
                c.push((key.clone(), v.clone()));
                next.push(c);
            }
        }
        jobs = next;
    }
    let configs: Vec<(Vec<(String, String)>, Result<RunConfig>)> = jobs
        .into_iter()
        .map(|overrides| {
            let mut cfg = base.clone();
            let applied: Result<()> = overrides
                .iter()
                .try_for_each(|(k, v)| cfg.set(k, v));
            (overrides, applied.map(|_| cfg))
        })
        .collect();

    let results: Mutex<Vec<Option<SweepEntry>>> =
        Mutex::new((0..configs.len()).map(|_| None).collect());
    let counter = AtomicUsize::new(0);
    let workers = workers.max(1).min(configs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = counter.fetch_add(1, Ordering::SeqCst);
                if i >= configs.len() {
                    break;
                }
                let (overrides, cfg) = &configs[i];
                let run_dir = out_dir.map(|d| d.join(format!("run-{i:03}")));
                let outcome = match cfg {
                    Ok(c) => run(c, run_dir.as_deref())
                        .map(|a| a.summary)
                        .map_err(|e| e.to_string()),
                    Err(e) => Err(e.to_string()),
                };
                results.lock().unwrap()[i] = Some(SweepEntry {
                    index: i,
                    overrides: overrides.clone(),
                    outcome,
                });
            });
        }
    });
    let entries: Vec<SweepEntry> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|e| e.expect("every job completes"))
        .collect();

    let mut table_path = None;
    let mut convergence_path = None;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let mut table = String::from("index\toverrides\tstatus\tsteps\tfinal_constraint\tfinal_energy_err\twall_s\n");
        for e in &entries {
            let ov = e
                .overrides
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            match &e.outcome {
                Ok(s) => {
                    let status = match s.diverged_at {
                        Some(n) => format!("diverged@{n}"),
                        None => "ok".to_string(),
                    };
                    let _ = writeln!(
                        table,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{:.3}",
                        e.index,
                        ov,
                        status,
                        s.completed_steps,
                        fmt_g17(s.final_constraint_residual),
                        fmt_g17(s.final_energy_error),
                        s.wall_time_seconds
                    );
                }
                Err(msg) => {
                    let _ = writeln!(table, "{}\t{}\terror: {}\t-\t-\t-\t-", e.index, ov, msg);
                }
            }
        }
        let tp = dir.join("sweep.tsv");
        std::fs::write(&tp, table)?;
        table_path = Some(tp);

        if axes.len() == 1 && axes[0].0 == "sim.h" {
            let mut conv = String::from("h\tfinal_energy_err\tfinal_momentum_err\n");
            let mut en_pts = Vec::new();
            let mut mom_pts = Vec::new();
            for e in &entries {
                if let Ok(s) = &e.outcome {
                    if s.diverged_at.is_some() {
                        continue;
                    }
                    let h: f64 = e.overrides[0].1.parse().unwrap_or(f64::NAN);
                    let ee = s.final_energy_error.abs();
                    en_pts.push((h, ee));
                    let me = s.final_momentum_error.map(|m| m.abs());
                    if let Some(me) = me {
                        mom_pts.push((h, me));
                    }
                    let _ = writeln!(
                        conv,
                        "{}\t{}\t{}",
                        fmt_g17(h),
                        fmt_g17(ee),
                        me.map(fmt_g17).unwrap_or_else(|| "-".into())
                    );
                }
            }
            if let Some(slope) = crate::diagnostics::log_log_slope(&en_pts) {
                let _ = writeln!(conv, "# energy_slope = {slope:.3}");
            }
            if let Some(slope) = crate::diagnostics::log_log_slope(&mom_pts) {
                let _ = writeln!(conv, "# momentum_slope = {slope:.3}");
            }
            let cp = dir.join("convergence.tsv");
            std::fs::write(&cp, conv)?;
            emit_convergence_plot(dir)?;
            convergence_path = Some(cp);
        }
    }
    Ok(SweepOutput {
        entries,
        table_path,
        convergence_path,
    })
}

// ---------------------------------------------------------------------------
// Poincare invariant experiment.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct InvariantSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// |I(t) - I(0)| / |I(0)|.
    pub relative_error: Vec<f64>,
    pub drift_blocks: Vec<f64>,
}

impl InvariantSeries {
    fn from_values(times: Vec<f64>, values: Vec<f64>) -> Self {
        let i0 = values[0];
        let relative_error: Vec<f64> = values.iter().map(|v| (v - i0).abs() / i0.abs()).collect();
        let k = relative_error.len().min(10);
        let drift_blocks = if k >= 1 {
            drift_estimate(&relative_error, k)
        } else {
            Vec::new()
        };
        InvariantSeries {
            times,
            values,
            relative_error,
            drift_blocks,
        }
    }

    pub fn max_relative_error(&self) -> f64 {
        self.relative_error.iter().fold(0.0_f64, |m, v| m.max(*v))
    }
}

#[derive(Debug)]
pub struct PoincareOutput {
    pub i1: Option<InvariantSeries>,
    pub i2: Option<InvariantSeries>,
    pub i1_path: Option<PathBuf>,
    pub i2_path: Option<PathBuf>,
}

/// Advect the standard loop and/or surface in the symmetric guiding-
/// centre field and evaluate the selected invariant form over time.
pub fn poincare(config: &RunConfig, out_dir: Option<&Path>) -> Result<PoincareOutput> {
    if config.problem != "guiding-centre-symmetric" {
        return Err(Error::Config(format!(
            "the Poincare experiment uses the symmetric guiding-centre field; got `{}`",
            config.problem
        )));
    }
    if !config.diagnostics.poincare1 && !config.diagnostics.poincare2 {
        return Err(Error::Config(
            "enable diag.poincare1 and/or diag.poincare2".into(),
        ));
    }
    let sys = config.system()?;
    let stepper = stepper_for(config)?;
    let form = config.diagnostics.form;
    let mut out = PoincareOutput {
        i1: None,
        i2: None,
        i1_path: None,
        i2_path: None,
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config.txt"), config.serialize())?;
    }
    if config.diagnostics.poincare1 {
        let seeds = seed_loop(config.diagnostics.nloop);
        let series = integrate_ensemble(
            &sys,
            &stepper,
            &seeds,
            config.h,
            config.nsteps,
            config.output_interval,
        )?;
        let ens = LoopEnsemble::new(series)?;
        let values = loop_invariant_i1(&sys, &ens, form, config.h)?;
        let inv = InvariantSeries::from_values(ens.series.times.clone(), values);
        if let Some(dir) = out_dir {
            let p = dir.join("poincare1.csv");
            write_invariant_csv(&p, &inv)?;
            out.i1_path = Some(p);
        }
        out.i1 = Some(inv);
    }
    if config.diagnostics.poincare2 {
        let seeds = seed_surface(config.diagnostics.surface_degree);
        let series = integrate_ensemble(
            &sys,
            &stepper,
            &seeds,
            config.h,
            config.nsteps,
            config.output_interval,
        )?;
        let ens = SurfaceEnsemble::new(series, config.diagnostics.surface_degree)?;
        let values = surface_invariant_i2(&sys, &ens, form, config.h)?;
        let inv = InvariantSeries::from_values(ens.series.times.clone(), values);
        if let Some(dir) = out_dir {
            let p = dir.join("poincare2.csv");
            write_invariant_csv(&p, &inv)?;
            out.i2_path = Some(p);
        }
        out.i2 = Some(inv);
    }
    Ok(out)
}

fn write_invariant_csv(path: &Path, inv: &InvariantSeries) -> Result<()> {
    let mut text = String::from("t,invariant,rel_err\n");
    for i in 0..inv.times.len() {
        let _ = writeln!(
            text,
            "{},{},{}",
            fmt_g17(inv.times[i]),
            fmt_g17(inv.values[i]),
            fmt_g17(inv.relative_error[i])
        );
    }
    std::fs::write(path, text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Convergence experiment.
// ---------------------------------------------------------------------------

/// Run the configured method at each step size to t_end, fit orders
/// against a high-accuracy reference (glrk3 + symmetric projection at a
/// tenth of the smallest step).
pub fn convergence(
    config: &RunConfig,
    h_list: &[f64],
    t_end: f64,
    out_dir: Option<&Path>,
) -> Result<ConvergenceFit> {
    let sys = config.system()?;
    let q0 = config.initial_q(&sys);
    let stepper = stepper_for(config)?;
    let run_one = |h: f64, nsteps: usize| -> Result<Trajectory> {
        let out = integrate(&sys, &stepper, &q0, h, nsteps)?;
        match out.failure {
            None => Ok(out.trajectory),
            Some((step, e)) => Err(Error::StepFailed {
                step,
                time: step as f64 * h,
                source: e,
            }),
        }
    };
    let h_min = h_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let h_ref = h_min / 10.0;
    let n_ref = (t_end / h_ref).round() as usize;
    let ref_tableau = tableaux::by_name("glrk3")?;
    let ref_stepper = ProjectedStepper::new(
        &ref_tableau,
        ProjectionKind::Symmetric,
        ProjectionOptions::default(),
        config.solver.clone(),
    )?;
    let ref_out = integrate(&sys, &ref_stepper, &q0, h_ref, n_ref)?;
    if let Some((step, e)) = ref_out.failure {
        return Err(Error::StepFailed {
            step,
            time: step as f64 * h_ref,
            source: e,
        });
    }
    let fit = convergence_order(&sys, run_one, h_list, t_end, &ref_out.trajectory)?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let mut text = String::from("h\tsolution_err\tenergy_err\tmomentum_err\n");
        for p in &fit.points {
            let _ = writeln!(
                text,
                "{}\t{}\t{}\t{}",
                fmt_g17(p.h),
                fmt_g17(p.solution_error),
                fmt_g17(p.energy_error),
                p.momentum_error
                    .map(fmt_g17)
                    .unwrap_or_else(|| "-".into())
            );
        }
        for h in &fit.excluded {
            let _ = writeln!(text, "# excluded h = {h} (run failed)");
        }
        if let Some(s) = fit.solution_slope {
            let _ = writeln!(text, "# solution_slope = {s:.3}");
        }
        if let Some(s) = fit.energy_slope {
            let _ = writeln!(text, "# energy_slope = {s:.3}");
        }
        if let Some(s) = fit.momentum_slope {
            let _ = writeln!(text, "# momentum_slope = {s:.3}");
        }
        std::fs::write(dir.join("convergence.tsv"), text)?;
        emit_convergence_plot(dir)?;
    }
    Ok(fit)
}

// ---------------------------------------------------------------------------
// Plot script emission.
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct PlotOutcome {
    pub scripts: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Generate standalone gnuplot scripts for the artifacts in `dir`
/// (series.csv and/or convergence.tsv); nothing is plotted here.
pub fn emit_plots(dir: &Path) -> Result<PlotOutcome> {
    let mut outcome = PlotOutcome {
        scripts: Vec::new(),
        warnings: Vec::new(),
    };
    let series = dir.join("series.csv");
    if series.exists() {
        let selection = match std::fs::read_to_string(dir.join("config.txt")) {
            Ok(text) => RunConfig::parse(&text)?.diagnostics,
            Err(_) => DiagnosticsSelection::default(),
        };
        let header = std::fs::read_to_string(&series)?
            .lines()
            .next()
            .unwrap_or("")
            .to_string();
        let cols: Vec<&str> = header.split(',').collect();
        let col_of = |name: &str| cols.iter().position(|c| *c == name).map(|i| i + 1);
        let mut panes: Vec<(String, usize)> = Vec::new();
        if selection.energy {
            if let Some(c) = col_of("energy_err") {
                panes.push(("energy error H - H_0".into(), c));
            }
        }
        if selection.constraint {
            if let Some(c) = col_of("constraint_res") {
                panes.push(("constraint residual |p - theta(q)|".into(), c));
            }
        }
        if selection.momentum {
            if let Some(c) = col_of("momentum_err") {
                panes.push(("momentum error P - P_0".into(), c));
            }
        }
        if selection.lambda {
            if let Some(c) = col_of("lambda1") {
                panes.push(("multiplier lambda_1".into(), c));
            }
        }
        if panes.is_empty() {
            outcome
                .warnings
                .push("no diagnostics selected; no series plot script emitted".into());
        } else {
            let mut s = String::new();
            let _ = writeln!(s, "# gnuplot script generated alongside series.csv");
            let _ = writeln!(s, "set datafile separator \",\"");
            let _ = writeln!(s, "set terminal pngcairo size 1000,{}", 280 * panes.len());
            let _ = writeln!(s, "set output \"series.png\"");
            let _ = writeln!(s, "set multiplot layout {},1", panes.len());
            let _ = writeln!(s, "set xlabel \"t\"");
            for (title, col) in &panes {
                let _ = writeln!(s, "set title \"{title}\"");
                let _ = writeln!(
                    s,
                    "plot \"series.csv\" using 1:{col} with lines notitle"
                );
            }
            let _ = writeln!(s, "unset multiplot");
            let path = dir.join("plot_series.gp");
            std::fs::write(&path, s)?;
            outcome.scripts.push(path);
        }
    }
    let conv = dir.join("convergence.tsv");
    if conv.exists() {
        outcome.scripts.push(write_convergence_plot(dir)?);
    }
    if !series.exists() && !conv.exists() {
        return Err(Error::Config(format!(
            "no artifacts found in {}",
            dir.display()
        )));
    }
    Ok(outcome)
}

fn emit_convergence_plot(dir: &Path) -> Result<()> {
    write_convergence_plot(dir)?;
    Ok(())
}

fn write_convergence_plot(dir: &Path) -> Result<PathBuf> {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script generated alongside convergence.tsv");
    let _ = writeln!(s, "set terminal pngcairo size 800,600");
    let _ = writeln!(s, "set output \"convergence.png\"");
    let _ = writeln!(s, "set logscale xy");
    let _ = writeln!(s, "set xlabel \"h\"");
    let _ = writeln!(s, "set ylabel \"error at T\"");
    let _ = writeln!(
        s,
        "plot \"convergence.tsv\" using 1:2 with linespoints title \"solution\", \\"
    );
    let _ = writeln!(
        s,
        "     \"convergence.tsv\" using 1:3 with linespoints title \"energy\", \\"
    );
    let _ = writeln!(
        s,
        "     \"convergence.tsv\" using 1:4 with linespoints title \"momentum\""
    );
    let path = dir.join("plot_convergence.gp");
    std::fs::write(&path, s)?;
    Ok(path)
}
