//! Error series, drift statistics, convergence orders, and Poincare
//! integral invariants.

pub mod poincare;
pub(crate) mod spectral;

pub use poincare::{
    integrate_ensemble, loop_invariant_i1, seed_loop, seed_surface, surface_invariant_i2,
    EnsembleSeries, InvariantForm, LoopEnsemble, SurfaceEnsemble,
};

use crate::error::{Error, Result};
use crate::systems::{DegenerateLagrangianSystem, ExtendedState};

/// A computed discrete trajectory with per-step states.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ExtendedState>,
    pub problem: String,
    pub method: String,
}

impl Trajectory {
    pub fn new(problem: &str, method: &str) -> Self {
        Trajectory {
            times: Vec::new(),
            states: Vec::new(),
            problem: problem.to_string(),
            method: method.to_string(),
        }
    }

    pub fn push(&mut self, state: ExtendedState) {
        self.times.push(state.t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Uniform step size; NaN for fewer than two states.
    pub fn step_size(&self) -> f64 {
        if self.times.len() < 2 {
            f64::NAN
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn final_state(&self) -> &ExtendedState {
        self.states.last().expect("trajectory must not be empty")
    }

    /// Times strictly increasing with uniform spacing (to round-off).
    pub fn is_uniform(&self) -> bool {
        let h = self.step_size();
        self.times
            .windows(2)
            .all(|w| w[1] > w[0] && ((w[1] - w[0]) - h).abs() <= 1e-12 * h.abs().max(1.0))
    }
}

/// Per-step diagnostic series over a trajectory; entry 0 is zero for
/// every error series.
#[derive(Debug, Clone)]
pub struct DiagnosticSeries {
    pub energy_error: Vec<f64>,
    pub constraint_residual: Vec<f64>,
    pub momentum_error: Option<Vec<f64>>,
    pub lambda_norm: Vec<f64>,
}

impl DiagnosticSeries {
    pub fn compute(sys: &DegenerateLagrangianSystem, traj: &Trajectory) -> Self {
        let h0 = sys.hamiltonian(&traj.states[0].point.q);
        let p0 = sys.momentum_map(&traj.states[0].point.q);
        let mut energy_error = Vec::with_capacity(traj.len());
        let mut constraint_residual = Vec::with_capacity(traj.len());
        let mut momentum_error = p0.map(|_| Vec::with_capacity(traj.len()));
        let mut lambda_norm = Vec::with_capacity(traj.len());
        for st in &traj.states {
            energy_error.push(sys.hamiltonian(&st.point.q) - h0);
            constraint_residual.push(sys.constraint_inf_norm(&st.point));
            if let (Some(me), Some(p_init)) = (momentum_error.as_mut(), p0) {
                me.push(sys.momentum_map(&st.point.q).unwrap() - p_init);
            }
            lambda_norm.push(st.lambda.iter().fold(0.0, |m: f64, x| m.max(x.abs())));
        }
        DiagnosticSeries {
            energy_error,
            constraint_residual,
            momentum_error,
            lambda_norm,
        }
    }
}

/// Per-block maxima of |value| over K equal sub-intervals; a monotone
/// increasing block sequence signals drift.
pub fn drift_estimate(series: &[f64], k: usize) -> Vec<f64> {
    assert!(k >= 1 && series.len() >= k, "series shorter than block count");
    let n = series.len();
    (0..k)
        .map(|b| {
            let lo = n * b / k;
            let hi = n * (b + 1) / k;
            series[lo..hi]
                .iter()
                .fold(0.0_f64, |m, v| m.max(v.abs()))
        })
        .collect()
}

/// Bounded-drift criterion: the last block maximum does not exceed
/// `factor` times the largest of the first three blocks.
pub fn drift_bounded(blocks: &[f64], factor: f64) -> bool {
    assert!(blocks.len() >= 4);
    let early = blocks[..3].iter().fold(0.0_f64, |m, v| m.max(*v));
    *blocks.last().unwrap() <= factor * early
}

/// Strictly increasing block maxima.
pub fn drift_increasing(blocks: &[f64]) -> bool {
    blocks.windows(2).all(|w| w[1] > w[0])
}

/// Ordinary least-squares fit y = intercept + slope x.
#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn linear_regression(x: &[f64], y: &[f64]) -> LinearFit {
    assert!(x.len() == y.len() && x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum();
    LinearFit {
        slope,
        intercept,
        slope_stderr: (ss_res / dof / sxx).sqrt(),
    }
}

/// Round-off floor below which error values are excluded from slope fits.
pub const SLOPE_FLOOR: f64 = 1e-12;

/// Least-squares slope of log(err) against log(h), excluding values at
/// the round-off floor; None when fewer than two points survive.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let filtered: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > SLOPE_FLOOR)
        .copied()
        .collect();
    if filtered.len() < 2 {
        return None;
    }
    let x: Vec<f64> = filtered.iter().map(|(h, _)| h.ln()).collect();
    let y: Vec<f64> = filtered.iter().map(|(_, e)| e.ln()).collect();
    Some(linear_regression(&x, &y).slope)
}

/// Global errors of one run at the end time, against a reference
/// trajectory for the solution error and against the initial values for
/// the conserved quantities.
#[derive(Debug, Clone)]
pub struct ConvergencePoint {
    pub h: f64,
    pub solution_error: f64,
    pub energy_error: f64,
    pub momentum_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceFit {
    pub points: Vec<ConvergencePoint>,
    /// Step sizes of runs that failed and were excluded.
    pub excluded: Vec<f64>,
    pub solution_slope: Option<f64>,
    pub energy_slope: Option<f64>,
    pub momentum_slope: Option<f64>,
}

/// Measure convergence orders by running the supplied integrator at each
/// step size to the common end time and fitting log-log slopes.
///
/// `run(h, nsteps)` must produce a trajectory with nsteps steps of size
/// h; the reference must reach the same end time at higher accuracy.
pub fn convergence_order(
    sys: &DegenerateLagrangianSystem,
    run: impl Fn(f64, usize) -> Result<Trajectory>,
    h_list: &[f64],
    t_end: f64,
    reference: &Trajectory,
) -> Result<ConvergenceFit> {
    if h_list.len() < 3 {
        return Err(Error::Diagnostics(
            "need at least three step sizes for a slope fit".into(),
        ));
    }
    let q_ref = &reference.final_state().point.q;
    if (reference.final_state().t - t_end).abs() > 1e-9 * t_end.abs().max(1.0) {
        return Err(Error::Diagnostics(format!(
            "reference ends at t = {} instead of {t_end}",
            reference.final_state().t
        )));
    }
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for &h in h_list {
        let nsteps = (t_end / h).round() as usize;
        match run(h, nsteps) {
            Ok(traj) if traj.len() == nsteps + 1 => {
                let st = traj.final_state();
                let q0 = &traj.states[0].point.q;
                let sol = st
                    .point
                    .q
                    .iter()
                    .zip(q_ref)
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
                let energy = (sys.hamiltonian(&st.point.q) - sys.hamiltonian(q0)).abs();
                let momentum = sys
                    .momentum_map(&st.point.q)
                    .map(|p| (p - sys.momentum_map(q0).unwrap()).abs());
                points.push(ConvergencePoint {
                    h,
                    solution_error: sol,
                    energy_error: energy,
                    momentum_error: momentum,
                });
            }
            _ => excluded.push(h),
        }
    }
    let sol: Vec<(f64, f64)> = points.iter().map(|p| (p.h, p.solution_error)).collect();
    let en: Vec<(f64, f64)> = points.iter().map(|p| (p.h, p.energy_error)).collect();
    let mom: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.momentum_error.map(|e| (p.h, e)))
        .collect();
    Ok(ConvergenceFit {
        solution_slope: log_log_slope(&sol),
        energy_slope: log_log_slope(&en),
        momentum_slope: if mom.is_empty() {
            None
        } else {
            log_log_slope(&mom)
        },
        points,
        excluded,
    })
}
