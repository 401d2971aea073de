//! Newton-type solver for the implicit stage equations and projection
//! systems: LU-factorized Jacobian reused between rebuilds, quadratic
//! line search on the squared residual norm, and compensated summation
//! for state updates.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Residual bound, scaled by max(1, |x0|_inf) at solve time.
    pub abs_tolerance: f64,
    pub max_iterations: usize,
    /// Iterations between Jacobian rebuilds.
    pub jacobian_refresh_interval: usize,
    pub line_search: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            abs_tolerance: 1e-14,
            max_iterations: 50,
            jacobian_refresh_interval: 5,
            line_search: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub jacobian_builds: usize,
    /// Effective tolerance used for this solve.
    pub tolerance: f64,
    /// Residual inf-norm after each iteration, starting with the guess.
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error(
        "Newton iteration did not converge ({} iterations, residual {:.3e})",
        .0.iterations, .0.final_residual_norm
    )]
    NonConvergence(SolveReport),
    #[error(
        "Newton iteration diverged after {} iterations (residual {:.3e})",
        .0.iterations, .0.final_residual_norm
    )]
    Divergence(SolveReport),
    #[error("singular Jacobian factorization after {} iterations", .0.iterations)]
    SingularJacobian(SolveReport),
    #[error("residual is not finite at the initial guess")]
    NonFiniteInitial,
}

impl SolverError {
    pub fn report(&self) -> Option<&SolveReport> {
        match self {
            SolverError::NonConvergence(r)
            | SolverError::Divergence(r)
            | SolverError::SingularJacobian(r) => Some(r),
            SolverError::NonFiniteInitial => None,
        }
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}

/// Forward-difference Jacobian, step sqrt(eps) * max(|x_j|, 1) per column.
pub fn finite_difference_jacobian<R>(residual: &mut R, x: &[f64], r0: &[f64]) -> DMatrix<f64>
where
    R: FnMut(&[f64], &mut [f64]),
{
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    let mut rp = vec![0.0; n];
    let h0 = f64::EPSILON.sqrt();
    for j in 0..n {
        let h = h0 * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        residual(&xp, &mut rp);
        for i in 0..n {
            jac[(i, j)] = (rp[i] - r0[i]) / h;
        }
        xp[j] = x[j];
    }
    jac
}

/// Solve residual(x) = 0 by Newton's method.
///
/// The Jacobian comes from `jacobian` when supplied, otherwise from
/// forward differences; it is factorized once and reused, rebuilt every
/// `jacobian_refresh_interval` iterations. When the full step does not
/// reduce the squared residual norm, a quadratic fit of the merit
/// function along the step gives the step length, clamped to [0.1, 1].
#[allow(clippy::type_complexity)]
pub fn newton_solve<R>(
    mut residual: R,
    jacobian: Option<&dyn Fn(&[f64], &mut DMatrix<f64>)>,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport), SolverError>
where
    R: FnMut(&[f64], &mut [f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    residual(&x, &mut r);
    if r.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::NonFiniteInitial);
    }
    let tol = cfg.abs_tolerance * inf_norm(x0).max(1.0);
    let scale0 = inf_norm(x0).max(1.0);
    let mut norm = inf_norm(&r);
    let mut history = vec![norm];
    let mut jacobian_builds = 0usize;
    let report = |converged: bool, iterations: usize, norm: f64, builds: usize, hist: &[f64]| {
        SolveReport {
            converged,
            iterations,
            final_residual_norm: norm,
            jacobian_builds: builds,
            tolerance: tol,
            residual_history: hist.to_vec(),
        }
    };
    if norm <= tol {
        return Ok((x, report(true, 0, norm, 0, &history)));
    }

    let mut lu: Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> = None;
    let mut iters_since_build = 0usize;
    let mut xt = vec![0.0; n];
    let mut rt = vec![0.0; n];
    for iter in 1..=cfg.max_iterations {
        if lu.is_none() || iters_since_build >= cfg.jacobian_refresh_interval {
            let jac = match jacobian {
                Some(j) => {
                    let mut m = DMatrix::zeros(n, n);
                    j(&x, &mut m);
                    m
                }
                None => finite_difference_jacobian(&mut residual, &x, &r),
            };
            lu = Some(jac.lu());
            jacobian_builds += 1;
            iters_since_build = 0;
        }
        let rhs = DVector::from_fn(n, |i, _| -r[i]);
        let dx = match lu.as_ref().unwrap().solve(&rhs) {
            Some(dx) if dx.iter().all(|v| v.is_finite()) => dx,
            _ => {
                return Err(SolverError::SingularJacobian(report(
                    false,
                    iter - 1,
                    norm,
                    jacobian_builds,
                    &history,
                )))
            }
        };

        for i in 0..n {
            xt[i] = x[i] + dx[i];
        }
        residual(&xt, &mut rt);
        if cfg.line_search {
            let m0: f64 = r.iter().map(|v| v * v).sum();
            let m1: f64 = rt.iter().map(|v| v * v).sum();
            if !(m1 < m0) {
                // quadratic through m(0), m'(0) = -2 m0, m(1): minimum at m0/(m0+m1)
                let alpha = if m1.is_finite() {
                    (m0 / (m0 + m1)).clamp(0.1, 1.0)
                } else {
                    0.1
                };
                for i in 0..n {
                    xt[i] = x[i] + alpha * dx[i];
                }
                residual(&xt, &mut rt);
            }
        }
        x.copy_from_slice(&xt);
        r.copy_from_slice(&rt);
        norm = inf_norm(&r);
        history.push(norm);
        iters_since_build += 1;

        if !norm.is_finite() || inf_norm(&x) > 1e8 * scale0 {
            return Err(SolverError::Divergence(report(
                false,
                iter,
                norm,
                jacobian_builds,
                &history,
            )));
        }
        if norm <= tol {
            return Ok((x, report(true, iter, norm, jacobian_builds, &history)));
        }
        // stagnation: no factor-0.9 decrease over 5 consecutive iterations
        if history.len() >= 6 {
            let prev = history[history.len() - 6];
            if norm > 0.9 * prev {
                return Err(SolverError::NonConvergence(report(
                    false,
                    iter,
                    norm,
                    jacobian_builds,
                    &history,
                )));
            }
        }
    }
    Err(SolverError::NonConvergence(report(
        false,
        cfg.max_iterations,
        norm,
        jacobian_builds,
        &history,
    )))
}

/// One compensated-summation update: returns the new running sum and
/// compensation carrying the bits lost to rounding.
#[inline]
pub fn kahan_accumulate(sum: f64, compensation: f64, increment: f64) -> (f64, f64) {
    let y = increment - compensation;
    let t = sum + y;
    (t, (t - sum) - y)
}
