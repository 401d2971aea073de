//! Projection wrappers enforcing the Dirac constraint p = theta(q) on
//! top of a base one-step method.
//!
//! All displacements are Omega-orthogonal: with phi_p = identity and
//! phi_q = -d theta/dq, a displacement by h Omega^{-1} grad(phi)^T lambda
//! moves q by h lambda and p by h (d theta/dq)^T(q*) lambda. The four
//! variants differ in which multipliers enter the perturbation before
//! the step and the projection after it:
//!
//! - standard: no perturbation, projection with a fresh lambda;
//! - symplectic: perturbation with the previous step's lambda (explicit),
//!   projection with a new lambda scaled by R(inf) - three decoupled
//!   sub-steps;
//! - symmetric: one multiplier lambda_{n+1/2} on both sides (projection
//!   side scaled by R(inf)), solved monolithically with the stages;
//! - midpoint: like symmetric but both displacements evaluated at the
//!   chord midpoint of the perturbed step. The projection side is
//!   scaled by R(inf) by default; the same-sign variant sits behind an
//!   option because for a one-stage base it couples the multiplier and
//!   the stage velocity along an exact null direction, leaving the
//!   system without a solution for nonlinear theta.

use crate::diagnostics::Trajectory;
use crate::error::{Error, Result};
use crate::integrators::{
    method_for_tableau, solve_method, CompensatedState, OneStepMethod, Scratch, StageWorkspace,
};
use crate::nlsolve::{newton_solve, SolverConfig, SolverError};
use crate::systems::{
    initial_momentum, DegenerateLagrangianSystem, ExtendedState, PhasePoint,
};
use crate::tableaux::{PartitionedTableau, TableauFamily};
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionKind {
    #[default]
    None,
    Standard,
    Symmetric,
    Symplectic,
    Midpoint,
}

impl ProjectionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProjectionKind::None => "none",
            ProjectionKind::Standard => "standard",
            ProjectionKind::Symmetric => "symmetric",
            ProjectionKind::Symplectic => "symplectic",
            ProjectionKind::Midpoint => "midpoint",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(ProjectionKind::None),
            "standard" => Ok(ProjectionKind::Standard),
            "symmetric" => Ok(ProjectionKind::Symmetric),
            "symplectic" => Ok(ProjectionKind::Symplectic),
            "midpoint" => Ok(ProjectionKind::Midpoint),
            other => Err(Error::Config(format!("unknown projection `{other}`"))),
        }
    }

    pub fn all() -> [ProjectionKind; 5] {
        [
            ProjectionKind::None,
            ProjectionKind::Standard,
            ProjectionKind::Symmetric,
            ProjectionKind::Symplectic,
            ProjectionKind::Midpoint,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOptions {
    /// Scale the midpoint projection displacement by R(inf) (the
    /// multiplier-selection rule; default). With this off the same sign
    /// is used on both sides, which is only well-posed for bases whose
    /// chord midpoint is not itself an internal stage.
    pub midpoint_apply_r_infinity: bool,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions {
            midpoint_apply_r_infinity: true,
        }
    }
}

/// Result of one projected step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub stages: StageWorkspace,
    /// Multiplier solved (or reused) in this step.
    pub lambda: Vec<f64>,
    pub newton_iterations: usize,
    pub jacobian_builds: usize,
    /// Chord midpoint of the perturbed step (midpoint projection only).
    pub midpoint_point: Option<PhasePoint>,
}

/// A base one-step method wrapped in a projection.
pub struct ProjectedStepper {
    method: Box<dyn OneStepMethod>,
    kind: ProjectionKind,
    options: ProjectionOptions,
    solver: SolverConfig,
}

impl ProjectedStepper {
    pub fn new(
        tableau: &PartitionedTableau,
        kind: ProjectionKind,
        options: ProjectionOptions,
        solver: SolverConfig,
    ) -> Result<Self> {
        match kind {
            ProjectionKind::Symmetric | ProjectionKind::Symplectic | ProjectionKind::Midpoint => {
                if tableau.family == TableauFamily::RadauIIA {
                    return Err(Error::Config(format!(
                        "{} projection requires |R(inf)| = 1; Radau IIA has R(inf) = 0",
                        kind.as_str()
                    )));
                }
            }
            _ => {}
        }
        if matches!(kind, ProjectionKind::Symmetric | ProjectionKind::Midpoint)
            && !tableau.is_symmetric()
        {
            return Err(Error::Config(format!(
                "{} projection requires a symmetric base method, got {}",
                kind.as_str(),
                tableau.name()
            )));
        }
        Ok(ProjectedStepper {
            method: method_for_tableau(tableau),
            kind,
            options,
            solver,
        })
    }

    pub fn kind(&self) -> ProjectionKind {
        self.kind
    }

    pub fn tableau(&self) -> &PartitionedTableau {
        self.method.tableau()
    }

    pub fn solver(&self) -> &SolverConfig {
        &self.solver
    }

    /// Advance `state` by one step of size h. `lambda_prev` is the
    /// multiplier carried from the previous step (zero initially); only
    /// the symplectic projection consumes it.
    pub fn step(
        &self,
        sys: &DegenerateLagrangianSystem,
        state: &mut CompensatedState,
        lambda_prev: &[f64],
        h: f64,
        warm: Option<&StageWorkspace>,
    ) -> std::result::Result<StepOutcome, SolverError> {
        match self.kind {
            ProjectionKind::None => self.step_unprojected(sys, state, h, warm),
            ProjectionKind::Standard => self.step_standard(sys, state, h, warm),
            ProjectionKind::Symplectic => self.step_symplectic(sys, state, lambda_prev, h, warm),
            ProjectionKind::Symmetric => self.step_coupled(sys, state, lambda_prev, h, warm, false),
            ProjectionKind::Midpoint => self.step_coupled(sys, state, lambda_prev, h, warm, true),
        }
    }

    fn step_unprojected(
        &self,
        sys: &DegenerateLagrangianSystem,
        state: &mut CompensatedState,
        h: f64,
        warm: Option<&StageWorkspace>,
    ) -> std::result::Result<StepOutcome, SolverError> {
        let z = state.point();
        let (u, report) = solve_method(self.method.as_ref(), sys, &z, h, &self.solver, warm)?;
        let stages = self.method.apply(sys, state, h, &u);
        Ok(StepOutcome {
            stages,
            lambda: vec![0.0; sys.dim()],
            newton_iterations: report.iterations,
            jacobian_builds: report.jacobian_builds,
            midpoint_point: None,
        })
    }

    /// Solve p_bar + h s J^T(q_bar + h s lambda) lambda - theta(q_bar + h s lambda) = 0
    /// for lambda, the d-equation reduction of the projection system.
    fn solve_projection_multiplier(
        &self,
        sys: &DegenerateLagrangianSystem,
        zbar: &PhasePoint,
        h: f64,
        sign: f64,
        guess: &[f64],
    ) -> std::result::Result<(Vec<f64>, usize, usize), SolverError> {
        let d = sys.dim();
        let mut jac = DMatrix::zeros(d, d);
        let mut th = vec![0.0; d];
        let mut q1 = vec![0.0; d];
        let (lam, report) = newton_solve(
            |lam, out| {
                for k in 0..d {
                    q1[k] = zbar.q[k] + h * sign * lam[k];
                }
                sys.theta_jacobian(&q1, &mut jac);
                sys.theta(&q1, &mut th);
                for k in 0..d {
                    let mut jt = 0.0;
                    for l in 0..d {
                        jt += jac[(l, k)] * lam[l];
                    }
                    out[k] = zbar.p[k] + h * sign * jt - th[k];
                }
            },
            None,
            guess,
            &self.solver,
        )?;
        Ok((lam, report.iterations, report.jacobian_builds))
    }

    /// Commit q += h s lambda, p += h s J^T(q_eval) lambda.
    fn apply_displacement(
        &self,
        sys: &DegenerateLagrangianSystem,
        state: &mut CompensatedState,
        q_eval: &[f64],
        lam: &[f64],
        h: f64,
        sign: f64,
    ) {
        let d = state.dim();
        let mut jac = DMatrix::zeros(d, d);
        sys.theta_jacobian(q_eval, &mut jac);
        for k in 0..d {
            let mut jt = 0.0;
            for l in 0..d {
                jt += jac[(l, k)] * lam[l];
            }
            state.add_q(k, h * sign * lam[k]);
            state.add_p(k, h * sign * jt);
        }
    }

    fn step_standard(
        &self,
        sys: &DegenerateLagrangianSystem,
        state: &mut CompensatedState,
        h: f64,
        warm: Option<&StageWorkspace>,
    ) -> std::result::Result<StepOutcome, SolverError> {
        let z = state.point();
        let (u, rep) = solve_method(self.method.as_ref(), sys, &z, h, &self.solver, warm)?;
        let stages = self.method.apply(sys, state, h, &u);
        let zbar = state.point();
        let d = sys.dim();
        let (lam, it2, jb2) =
            self.solve_projection_multiplier(sys, &zbar, h, 1.0, &vec![0.0; d])?;
        let q_next: Vec<f64> = (0..d).map(|k| zbar.q[k] + h * lam[k]).collect();
        self.apply_displacement(sys, state, &q_next, &lam, h, 1.0);
        Ok(StepOutcome {
            stages,
            lambda: lam,
            newton_iterations: rep.iterations + it2,
            jacobian_builds: rep.jacobian_builds + jb2,
            midpoint_point: None,
        })
    }

    fn step_symplectic(
        &self,
        sys: &DegenerateLagrangianSystem,
        state: &mut CompensatedState,
        lambda_prev: &[f64],
        h: f64,
        warm: Option<&StageWorkspace>,
    ) -> std::result::Result<StepOutcome, SolverError> {
        let d = sys.dim();
        let r_inf = self.method.tableau().r_infinity;
        // perturbation with the known multiplier, evaluated at z_n
        let q_n = state.q.clone();
        self.apply_displacement(sys, state, &q_n, lambda_prev, h, 1.0);
        let zb = state.point();
        let (u, rep) = solve_method(self.method.as_ref(), sys, &zb, h, &self.solver, warm)?;
        let stages = self.method.apply(sys, state, h, &u);
        // projection with a new multiplier, displacement scaled by R(inf)
        let zbar = state.point();
        let (lam, it2, jb2) =
            self.solve_projection_multiplier(sys, &zbar, h, r_inf, lambda_prev)?;
        let q_next: Vec<f64> = (0..d).map(|k| zbar.q[k] + h * r_inf * lam[k]).collect();
        self.apply_displacement(sys, state, &q_next, &lam, h, r_inf);
        Ok(StepOutcome {
            stages,
            lambda: lam,
            newton_iterations: rep.iterations + it2,
            jacobian_builds: rep.jacobian_builds + jb2,
            midpoint_point: None,
        })
    }

    /// Symmetric and midpoint projections: one Newton system in the
    /// stage unknowns plus lambda.
    fn step_coupled(
        &self,
        sys: &DegenerateLagrangianSystem,
        state: &mut CompensatedState,
        lambda_prev: &[f64],
        h: f64,
        warm: Option<&StageWorkspace>,
        midpoint: bool,
    ) -> std::result::Result<StepOutcome, SolverError> {
        let d = sys.dim();
        let m = self.method.unknown_count(d);
        let r_inf = self.method.tableau().r_infinity;
        let sign_out = if midpoint {
            if self.options.midpoint_apply_r_infinity {
                r_inf
            } else {
                1.0
            }
        } else {
            r_inf
        };
        let z = state.point();

        // For the symmetric projection the perturbation gradient is
        // evaluated at the known z_n; precompute its Jacobian.
        let jac_n = sys.theta_jacobian_mat(&z.q);

        let mut guess = self.method.initial_guess(d, warm);
        guess.extend_from_slice(lambda_prev);

        let mut scratch = Scratch::new(d, self.method.tableau().stages());
        let mut jac_mid = DMatrix::zeros(d, d);
        let mut th = vec![0.0; d];
        let mut q_inc = vec![0.0; d];
        let mut qbar = vec![0.0; d];
        let mut pbar = vec![0.0; d];
        let mut q_next = vec![0.0; d];

        let (w, report) = newton_solve(
            |w, out| {
                let (u, lam) = w.split_at(m);
                // perturbed start point
                for k in 0..d {
                    qbar[k] = z.q[k] + h * lam[k];
                }
                let jt_in: &DMatrix<f64> = if midpoint {
                    self.method.q_increment(d, h, u, &mut q_inc);
                    for k in 0..d {
                        q_next[k] = z.q[k] + h * lam[k] + 0.5 * q_inc[k];
                    }
                    sys.theta_jacobian(&q_next, &mut jac_mid);
                    &jac_mid
                } else {
                    &jac_n
                };
                for k in 0..d {
                    let mut jt = 0.0;
                    for l in 0..d {
                        jt += jt_in[(l, k)] * lam[l];
                    }
                    pbar[k] = z.p[k] + h * jt;
                }
                let zbar_n = PhasePoint::new(qbar.clone(), pbar.clone());
                self.method
                    .residual(sys, &zbar_n, h, u, &mut scratch, &mut out[..m]);
                let zbar_next = self
                    .method
                    .output_cached(&zbar_n, h, u, &scratch);
                // projected end point and its constraint
                for k in 0..d {
                    q_next[k] = zbar_next.q[k] + h * sign_out * lam[k];
                }
                let jt_out: &DMatrix<f64> = if midpoint {
                    &jac_mid
                } else {
                    sys.theta_jacobian(&q_next, &mut jac_mid);
                    &jac_mid
                };
                sys.theta(&q_next, &mut th);
                for k in 0..d {
                    let mut jt = 0.0;
                    for l in 0..d {
                        jt += jt_out[(l, k)] * lam[l];
                    }
                    out[m + k] = zbar_next.p[k] + h * sign_out * jt - th[k];
                }
            },
            None,
            &guess,
            &self.solver,
        )?;

        let (u, lam) = w.split_at(m);
        // commit in order: perturbation, base step, projection
        let grad_eval_q: Vec<f64> = if midpoint {
            self.method.q_increment(d, h, u, &mut q_inc);
            (0..d)
                .map(|k| z.q[k] + h * lam[k] + 0.5 * q_inc[k])
                .collect()
        } else {
            z.q.clone()
        };
        self.apply_displacement(sys, state, &grad_eval_q, lam, h, 1.0);
        let z_pert = state.point();
        let stages = self.method.apply(sys, state, h, u);
        let zb_next = state.point();
        let midpoint_point = midpoint.then(|| {
            PhasePoint::new(
                (0..d).map(|k| 0.5 * (z_pert.q[k] + zb_next.q[k])).collect(),
                (0..d).map(|k| 0.5 * (z_pert.p[k] + zb_next.p[k])).collect(),
            )
        });
        let q_out_eval: Vec<f64> = if midpoint {
            grad_eval_q
        } else {
            (0..d).map(|k| zb_next.q[k] + h * sign_out * lam[k]).collect()
        };
        self.apply_displacement(sys, state, &q_out_eval, lam, h, sign_out);
        Ok(StepOutcome {
            stages,
            lambda: lam.to_vec(),
            newton_iterations: report.iterations,
            jacobian_builds: report.jacobian_builds,
            midpoint_point,
        })
    }
}

// ---------------------------------------------------------------------------
// Single-step entry points.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ProjectedStepResult {
    pub next: PhasePoint,
    pub lambda: Vec<f64>,
    pub stages: StageWorkspace,
    pub midpoint_point: Option<PhasePoint>,
}

fn one_shot(
    sys: &DegenerateLagrangianSystem,
    tableau: &PartitionedTableau,
    z_n: &PhasePoint,
    lambda_prev: &[f64],
    h: f64,
    cfg: &SolverConfig,
    kind: ProjectionKind,
    options: ProjectionOptions,
) -> Result<ProjectedStepResult> {
    let stepper = ProjectedStepper::new(tableau, kind, options, cfg.clone())?;
    let mut state = CompensatedState::new(z_n);
    let out = stepper
        .step(sys, &mut state, lambda_prev, h, None)
        .map_err(Error::Solver)?;
    Ok(ProjectedStepResult {
        next: state.point(),
        lambda: out.lambda,
        stages: out.stages,
        midpoint_point: out.midpoint_point,
    })
}

/// Base step followed by projection onto the constraint submanifold.
pub fn standard_projected_step(
    sys: &DegenerateLagrangianSystem,
    tableau: &PartitionedTableau,
    z_n: &PhasePoint,
    h: f64,
    cfg: &SolverConfig,
) -> Result<ProjectedStepResult> {
    let d = sys.dim();
    one_shot(
        sys,
        tableau,
        z_n,
        &vec![0.0; d],
        h,
        cfg,
        ProjectionKind::Standard,
        ProjectionOptions::default(),
    )
}

/// Perturbation, base step and projection with one shared multiplier,
/// solved as a single coupled system.
pub fn symmetric_projected_step(
    sys: &DegenerateLagrangianSystem,
    tableau: &PartitionedTableau,
    z_n: &PhasePoint,
    h: f64,
    cfg: &SolverConfig,
) -> Result<ProjectedStepResult> {
    let d = sys.dim();
    one_shot(
        sys,
        tableau,
        z_n,
        &vec![0.0; d],
        h,
        cfg,
        ProjectionKind::Symmetric,
        ProjectionOptions::default(),
    )
}

/// Three decoupled sub-steps: explicit perturbation with the previous
/// multiplier, base step, projection solving the new multiplier. When
/// R(inf) = -1 the composition realizes a post-projection conjugate to
/// the unprojected method.
pub fn symplectic_projected_step(
    sys: &DegenerateLagrangianSystem,
    tableau: &PartitionedTableau,
    state_n: &ExtendedState,
    h: f64,
    cfg: &SolverConfig,
) -> Result<ExtendedState> {
    let r = one_shot(
        sys,
        tableau,
        &state_n.point,
        &state_n.lambda,
        h,
        cfg,
        ProjectionKind::Symplectic,
        ProjectionOptions::default(),
    )?;
    Ok(ExtendedState::new(state_n.t + h, r.next, r.lambda))
}

/// Coupled projection with both displacements evaluated at the chord
/// midpoint of the perturbed step.
pub fn midpoint_projected_step(
    sys: &DegenerateLagrangianSystem,
    tableau: &PartitionedTableau,
    z_n: &PhasePoint,
    h: f64,
    cfg: &SolverConfig,
    options: ProjectionOptions,
) -> Result<ProjectedStepResult> {
    let d = sys.dim();
    one_shot(
        sys,
        tableau,
        z_n,
        &vec![0.0; d],
        h,
        cfg,
        ProjectionKind::Midpoint,
        options,
    )
}

// ---------------------------------------------------------------------------
// Trajectory driver.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default)]
pub struct NewtonStats {
    pub total_iterations: usize,
    pub total_jacobian_builds: usize,
    pub failures: usize,
}

/// Outcome of a (possibly early-terminated) integration. A divergence
/// mid-run is recorded, not raised: the trajectory holds every state up
/// to the last completed step.
#[derive(Debug)]
pub struct IntegrationOutput {
    pub trajectory: Trajectory,
    /// Step index (1-based) and error of the failing step, if any.
    pub failure: Option<(usize, SolverError)>,
    pub stats: NewtonStats,
    /// Largest stage-constraint defect max_i |P_i - theta(Q_i)| seen.
    pub max_stage_constraint: f64,
    /// Initial constraint defect, for warning on off-manifold starts.
    pub initial_constraint: f64,
}

/// Integrate nsteps steps of size h from q0 (momenta initialized on the
/// constraint), recording every state.
pub fn integrate(
    sys: &DegenerateLagrangianSystem,
    stepper: &ProjectedStepper,
    q0: &[f64],
    h: f64,
    nsteps: usize,
) -> Result<IntegrationOutput> {
    let z0 = initial_momentum(sys, q0)?;
    integrate_from(sys, stepper, &z0, h, nsteps)
}

/// Integrate from an arbitrary phase point.
pub fn integrate_from(
    sys: &DegenerateLagrangianSystem,
    stepper: &ProjectedStepper,
    z0: &PhasePoint,
    h: f64,
    nsteps: usize,
) -> Result<IntegrationOutput> {
    if h <= 0.0 || nsteps == 0 {
        return Err(Error::Config(format!(
            "need h > 0 and nsteps >= 1, got h = {h}, nsteps = {nsteps}"
        )));
    }
    let d = sys.dim();
    let mut state = CompensatedState::new(z0);
    let mut lambda = vec![0.0; d];
    let mut warm: Option<StageWorkspace> = None;
    let mut stats = NewtonStats::default();
    let mut max_stage_constraint: f64 = 0.0;
    let initial_constraint = sys.constraint_inf_norm(z0);
    let mut trajectory = Trajectory::new(sys.label(), &stepper.describe());
    trajectory.push(ExtendedState::new(0.0, z0.clone(), lambda.clone()));
    let mut failure = None;
    for n in 0..nsteps {
        match stepper.step(sys, &mut state, &lambda, h, warm.as_ref()) {
            Ok(out) => {
                stats.total_iterations += out.newton_iterations;
                stats.total_jacobian_builds += out.jacobian_builds;
                max_stage_constraint =
                    max_stage_constraint.max(out.stages.stage_constraint_norm(sys));
                lambda = out.lambda.clone();
                warm = Some(out.stages);
                let t = (n + 1) as f64 * h;
                trajectory.push(ExtendedState::new(t, state.point(), lambda.clone()));
            }
            Err(e) => {
                stats.failures += 1;
                failure = Some((n + 1, e));
                break;
            }
        }
    }
    Ok(IntegrationOutput {
        trajectory,
        failure,
        stats,
        max_stage_constraint,
        initial_constraint,
    })
}

impl ProjectedStepper {
    /// Label like "glrk2+symmetric" for trajectory metadata.
    pub fn describe(&self) -> String {
        format!("{}+{}", self.method.tableau().name(), self.kind.as_str())
    }
}
