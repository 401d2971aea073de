//! First and second Poincare integral invariants over advected loops
//! and surfaces.
//!
//! A loop is sampled at equidistant parameter values and advected point
//! by point; the line integral of a one-form along it is evaluated with
//! discrete-Fourier spectral differentiation and the trapezoidal rule.
//! A surface patch is sampled on a tensor Chebyshev-Lobatto grid and the
//! two-form integral uses Chebyshev differentiation matrices with
//! Clenshaw-Curtis weights. The corrected forms add the multiplier terms
//! preserved by the symplectic projection on the extended phase space.

use super::spectral::{
    chebyshev_diff_matrix, chebyshev_points, clenshaw_curtis_weights, fourier_diff_matrix,
};
use crate::error::{Error, Result};
use crate::integrators::CompensatedState;
use crate::projections::ProjectedStepper;
use crate::systems::{initial_momentum, DegenerateLagrangianSystem, ExtendedState};
use nalgebra::DMatrix;
use std::f64::consts::TAU;

/// Which differential form is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InvariantForm {
    /// theta_i dq^i (or omega_bar for surfaces).
    #[default]
    Noncanonical,
    /// p_i dq^i (or dp_i wedge dq^i) on the advected phase points.
    Canonical,
    /// Modified forms on (q, lambda) preserved by the symplectic
    /// projection.
    Corrected,
}

impl InvariantForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            InvariantForm::Noncanonical => "noncanonical",
            InvariantForm::Canonical => "canonical",
            InvariantForm::Corrected => "corrected",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "noncanonical" => Ok(InvariantForm::Noncanonical),
            "canonical" => Ok(InvariantForm::Canonical),
            "corrected" => Ok(InvariantForm::Corrected),
            other => Err(Error::Config(format!("unknown invariant form `{other}`"))),
        }
    }
}

/// States of an ensemble of independently advected points, sampled at
/// common output times.
#[derive(Debug, Clone)]
pub struct EnsembleSeries {
    pub times: Vec<f64>,
    /// snapshots[time][member].
    pub snapshots: Vec<Vec<ExtendedState>>,
}

/// Closed loop sampled at n equidistant parameter values in [0, 1).
#[derive(Debug)]
pub struct LoopEnsemble {
    pub series: EnsembleSeries,
    pub n_loop: usize,
}

impl LoopEnsemble {
    pub fn new(series: EnsembleSeries) -> Result<Self> {
        let n = series
            .snapshots
            .first()
            .map(|s| s.len())
            .ok_or_else(|| Error::Diagnostics("empty ensemble".into()))?;
        if n % 2 != 0 {
            return Err(Error::Diagnostics(format!(
                "loop sample count must be even for spectral differentiation, got {n}"
            )));
        }
        if series.snapshots.iter().any(|s| s.len() != n) {
            return Err(Error::Diagnostics(
                "mismatched member counts across snapshots".into(),
            ));
        }
        Ok(LoopEnsemble { series, n_loop: n })
    }
}

/// Surface patch on an (m+1) x (m+1) tensor Chebyshev-Lobatto grid over
/// (sigma, tau) in [0, 1]^2, stored row-major in sigma.
#[derive(Debug)]
pub struct SurfaceEnsemble {
    pub series: EnsembleSeries,
    pub degree: usize,
}

impl SurfaceEnsemble {
    pub fn new(series: EnsembleSeries, degree: usize) -> Result<Self> {
        let expect = (degree + 1) * (degree + 1);
        if series.snapshots.iter().any(|s| s.len() != expect) {
            return Err(Error::Diagnostics(format!(
                "surface grid incomplete: expected {expect} members"
            )));
        }
        Ok(SurfaceEnsemble { series, degree })
    }
}

// ---------------------------------------------------------------------------
// Initial ensembles for the guiding-centre symmetric field.
// ---------------------------------------------------------------------------

/// Loop parametrization: (r_x cos(2 pi tau), r_y sin(2 pi tau),
/// r_z sin(2 pi tau), u0 + u1 cos(2 pi tau)).
pub fn loop_point(tau: f64) -> Vec<f64> {
    let (rx, ry, rz, u0, u1) = (0.5, 0.3, 0.1, 0.5, 0.05);
    let (s, c) = (TAU * tau).sin_cos();
    vec![rx * c, ry * s, rz * s, u0 + u1 * c]
}

/// Surface parametrization: (r0 (sigma - 1/2), r0 (tau - 1/2),
/// r_z cos(2 pi sigma) cos(2 pi tau), u0 + u1 sin(2 pi sigma) sin(2 pi tau)).
pub fn surface_point(sigma: f64, tau: f64) -> Vec<f64> {
    let (r0, rz, u0, u1) = (0.1, 0.1, 0.5, 0.01);
    vec![
        r0 * (sigma - 0.5),
        r0 * (tau - 0.5),
        rz * (TAU * sigma).cos() * (TAU * tau).cos(),
        u0 + u1 * (TAU * sigma).sin() * (TAU * tau).sin(),
    ]
}

/// n_loop equidistant samples of the standard loop.
pub fn seed_loop(n_loop: usize) -> Vec<Vec<f64>> {
    (0..n_loop)
        .map(|k| loop_point(k as f64 / n_loop as f64))
        .collect()
}

/// Tensor Chebyshev-Lobatto samples of the standard surface, row-major
/// in sigma; degree m gives an (m+1) x (m+1) grid.
pub fn seed_surface(degree: usize) -> Vec<Vec<f64>> {
    let pts = chebyshev_points(degree);
    let mut seeds = Vec::with_capacity((degree + 1) * (degree + 1));
    for si in &pts {
        for tj in &pts {
            seeds.push(surface_point(*si, *tj));
        }
    }
    seeds
}

/// Paper-scale ensemble sizes.
pub const LOOP_SAMPLES_FULL: usize = 2000;
pub const SURFACE_DEGREE_FULL: usize = 99;
/// Desk-scale ensemble sizes.
pub const LOOP_SAMPLES_DESK: usize = 256;
pub const SURFACE_DEGREE_DESK: usize = 31;

/// Advect every seed independently, recording states every
/// `output_interval` steps (plus the final step).
pub fn integrate_ensemble(
    sys: &DegenerateLagrangianSystem,
    stepper: &ProjectedStepper,
    seeds: &[Vec<f64>],
    h: f64,
    nsteps: usize,
    output_interval: usize,
) -> Result<EnsembleSeries> {
    if seeds.is_empty() || output_interval == 0 {
        return Err(Error::Diagnostics(
            "ensemble needs seeds and a positive output interval".into(),
        ));
    }
    let d = sys.dim();
    let mut out_steps: Vec<usize> = (0..=nsteps).step_by(output_interval).collect();
    if *out_steps.last().unwrap() != nsteps {
        out_steps.push(nsteps);
    }
    let times: Vec<f64> = out_steps.iter().map(|&n| n as f64 * h).collect();
    let mut snapshots = vec![Vec::with_capacity(seeds.len()); out_steps.len()];
    for (member, q0) in seeds.iter().enumerate() {
        let z0 = initial_momentum(sys, q0)?;
        let mut state = CompensatedState::new(&z0);
        let mut lambda = vec![0.0; d];
        let mut warm = None;
        let mut out_idx = 0;
        if out_steps[0] == 0 {
            snapshots[0].push(ExtendedState::new(0.0, z0.clone(), lambda.clone()));
            out_idx = 1;
        }
        for n in 0..nsteps {
            let outc = stepper
                .step(sys, &mut state, &lambda, h, warm.as_ref())
                .map_err(|e| {
                    Error::Diagnostics(format!(
                        "ensemble member {member} failed at step {}: {e}",
                        n + 1
                    ))
                })?;
            lambda = outc.lambda;
            warm = Some(outc.stages);
            if out_idx < out_steps.len() && out_steps[out_idx] == n + 1 {
                snapshots[out_idx].push(ExtendedState::new(
                    (n + 1) as f64 * h,
                    state.point(),
                    lambda.clone(),
                ));
                out_idx += 1;
            }
        }
    }
    Ok(EnsembleSeries { times, snapshots })
}

// ---------------------------------------------------------------------------
// First invariant: line integral over the advected loop.
// ---------------------------------------------------------------------------

/// I1(t) for each output time: the integral of the chosen one-form over
/// the loop, with dq/dtau (and dlambda/dtau for the corrected form) from
/// spectral differentiation and trapezoidal quadrature over tau.
///
/// `h_step` is the integrator step size entering the corrected form.
pub fn loop_invariant_i1(
    sys: &DegenerateLagrangianSystem,
    ensemble: &LoopEnsemble,
    form: InvariantForm,
    h_step: f64,
) -> Result<Vec<f64>> {
    let n = ensemble.n_loop;
    let d = sys.dim();
    let dmat = fourier_diff_matrix(n);
    let mut values = Vec::with_capacity(ensemble.series.snapshots.len());
    let mut th = vec![0.0; d];
    let mut jac = DMatrix::zeros(d, d);
    for snap in &ensemble.series.snapshots {
        if snap.len() != n {
            return Err(Error::Diagnostics("snapshot size mismatch".into()));
        }
        // spectral derivatives along the loop parameter
        let mut dq = vec![vec![0.0; d]; n];
        let mut dl = vec![vec![0.0; d]; n];
        for i in 0..d {
            for k in 0..n {
                let mut acc_q = 0.0;
                let mut acc_l = 0.0;
                for l in 0..n {
                    let w = dmat[(k, l)];
                    acc_q += w * snap[l].point.q[i];
                    if form == InvariantForm::Corrected {
                        acc_l += w * snap[l].lambda[i];
                    }
                }
                dq[k][i] = acc_q;
                dl[k][i] = acc_l;
            }
        }
        let mut total = 0.0;
        for (k, st) in snap.iter().enumerate() {
            let q = &st.point.q;
            let integrand = match form {
                InvariantForm::Noncanonical => {
                    sys.theta(q, &mut th);
                    (0..d).map(|i| th[i] * dq[k][i]).sum::<f64>()
                }
                InvariantForm::Canonical => {
                    (0..d).map(|i| st.point.p[i] * dq[k][i]).sum::<f64>()
                }
                InvariantForm::Corrected => {
                    sys.theta(q, &mut th);
                    sys.theta_jacobian(q, &mut jac);
                    (0..d)
                        .map(|i| {
                            let mut coeff = th[i];
                            for kk in 0..d {
                                coeff -= h_step * st.lambda[kk] * jac[(kk, i)];
                            }
                            coeff * (dq[k][i] - h_step * dl[k][i])
                        })
                        .sum::<f64>()
                }
            };
            total += integrand;
        }
        values.push(total / n as f64);
    }
    Ok(values)
}

// ---------------------------------------------------------------------------
// Second invariant: surface integral over the advected patch.
// ---------------------------------------------------------------------------

/// Contraction C_ab = sum_k lambda^k d2 theta_k / dq^a dq^b by central
/// differences of the theta Jacobian.
fn lambda_hessian_contraction(
    sys: &DegenerateLagrangianSystem,
    q: &[f64],
    lambda: &[f64],
) -> DMatrix<f64> {
    let d = sys.dim();
    let h0 = f64::EPSILON.powf(1.0 / 3.0);
    let mut c = DMatrix::zeros(d, d);
    let mut jp = DMatrix::zeros(d, d);
    let mut jm = DMatrix::zeros(d, d);
    let mut qp = q.to_vec();
    for b in 0..d {
        let h = h0 * q[b].abs().max(1.0);
        qp[b] = q[b] + h;
        sys.theta_jacobian(&qp, &mut jp);
        qp[b] = q[b] - h;
        sys.theta_jacobian(&qp, &mut jm);
        qp[b] = q[b];
        for a in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += lambda[k] * (jp[(k, a)] - jm[(k, a)]) / (2.0 * h);
            }
            c[(a, b)] = acc;
        }
    }
    // the Hessian contraction is symmetric; average out FD noise
    for a in 0..d {
        for b in (a + 1)..d {
            let v = 0.5 * (c[(a, b)] + c[(b, a)]);
            c[(a, b)] = v;
            c[(b, a)] = v;
        }
    }
    c
}

/// I2(t) for each output time: the integral of the chosen two-form over
/// the advected patch, partials from Chebyshev differentiation and
/// Clenshaw-Curtis quadrature in both directions.
pub fn surface_invariant_i2(
    sys: &DegenerateLagrangianSystem,
    ensemble: &SurfaceEnsemble,
    form: InvariantForm,
    h_step: f64,
) -> Result<Vec<f64>> {
    let m = ensemble.degree;
    let nn = m + 1;
    let d = sys.dim();
    let dmat = chebyshev_diff_matrix(m);
    let w = clenshaw_curtis_weights(m);
    let idx = |i: usize, j: usize| i * nn + j;
    let mut values = Vec::with_capacity(ensemble.series.snapshots.len());
    for snap in &ensemble.series.snapshots {
        if snap.len() != nn * nn {
            return Err(Error::Diagnostics("surface grid incomplete".into()));
        }
        // partial derivatives along sigma (grid rows) and tau (columns)
        let mut qsig = vec![vec![0.0; d]; nn * nn];
        let mut qtau = vec![vec![0.0; d]; nn * nn];
        let mut psig = vec![vec![0.0; d]; nn * nn];
        let mut ptau = vec![vec![0.0; d]; nn * nn];
        let mut lsig = vec![vec![0.0; d]; nn * nn];
        let mut ltau = vec![vec![0.0; d]; nn * nn];
        for i in 0..nn {
            for j in 0..nn {
                let g = idx(i, j);
                for c in 0..d {
                    let mut aqs = 0.0;
                    let mut aqt = 0.0;
                    let mut aps = 0.0;
                    let mut apt = 0.0;
                    let mut als = 0.0;
                    let mut alt = 0.0;
                    for l in 0..nn {
                        let wi = dmat[(i, l)];
                        let wj = dmat[(j, l)];
                        let row = &snap[idx(l, j)];
                        let col = &snap[idx(i, l)];
                        aqs += wi * row.point.q[c];
                        aqt += wj * col.point.q[c];
                        match form {
                            InvariantForm::Canonical => {
                                aps += wi * row.point.p[c];
                                apt += wj * col.point.p[c];
                            }
                            InvariantForm::Corrected => {
                                als += wi * row.lambda[c];
                                alt += wj * col.lambda[c];
                            }
                            InvariantForm::Noncanonical => {}
                        }
                    }
                    qsig[g][c] = aqs;
                    qtau[g][c] = aqt;
                    psig[g][c] = aps;
                    ptau[g][c] = apt;
                    lsig[g][c] = als;
                    ltau[g][c] = alt;
                }
            }
        }
        let mut total = 0.0;
        for i in 0..nn {
            for j in 0..nn {
                let g = idx(i, j);
                let st = &snap[g];
                let integrand = match form {
                    InvariantForm::Noncanonical => {
                        let om = sys.omega_bar(&st.point.q);
                        two_form(&om, &qsig[g], &qtau[g])
                    }
                    InvariantForm::Canonical => (0..d)
                        .map(|c| psig[g][c] * qtau[g][c] - qsig[g][c] * ptau[g][c])
                        .sum::<f64>(),
                    InvariantForm::Corrected => {
                        let om = sys.omega_bar(&st.point.q);
                        let cmat = lambda_hessian_contraction(sys, &st.point.q, &st.lambda);
                        let mut v = two_form(&om, &qsig[g], &qtau[g]);
                        v -= h_step * h_step * two_form(&om, &lsig[g], &ltau[g]);
                        let h2 = h_step * h_step;
                        for a in 0..d {
                            for b in 0..d {
                                v -= h2
                                    * cmat[(a, b)]
                                    * (qsig[g][a] * ltau[g][b] - qtau[g][a] * lsig[g][b]);
                            }
                        }
                        v
                    }
                };
                total += w[i] * w[j] * integrand;
            }
        }
        values.push(total);
    }
    Ok(values)
}

#[inline]
fn two_form(m: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let d = u.len();
    let mut acc = 0.0;
    for a in 0..d {
        for b in 0..d {
            acc += m[(a, b)] * u[a] * v[b];
        }
    }
    acc
}
