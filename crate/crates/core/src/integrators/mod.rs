//! One-step maps on the cotangent bundle: variational partitioned
//! Runge-Kutta methods (Gauss type), the Lobatto variant with the
//! null-space constraint on stage velocities, and Radau IIA applied to
//! the index-2 differential-algebraic form.
//!
//! The implicit stage systems are solved for the stage velocities (plus
//! the Lobatto multiplier mu or the Radau stage multipliers); momenta
//! are eliminated through the fibre-derivative relation. State updates
//! go through compensated summation with split coefficients.

use crate::error::{Error, Result};
use crate::nlsolve::{kahan_accumulate, newton_solve, SolveReport, SolverConfig, SolverError};
use crate::systems::{DegenerateLagrangianSystem, PhasePoint};
use crate::tableaux::{PartitionedTableau, TableauFamily};
use nalgebra::DMatrix;

pub use crate::systems::initial_momentum;

/// Trajectory state carrying Kahan compensation for q and p across steps.
#[derive(Debug, Clone)]
pub struct CompensatedState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    q_comp: Vec<f64>,
    p_comp: Vec<f64>,
}

impl CompensatedState {
    pub fn new(z: &PhasePoint) -> Self {
        let d = z.dim();
        CompensatedState {
            q: z.q.clone(),
            p: z.p.clone(),
            q_comp: vec![0.0; d],
            p_comp: vec![0.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn point(&self) -> PhasePoint {
        PhasePoint::new(self.q.clone(), self.p.clone())
    }

    #[inline]
    pub fn add_q(&mut self, k: usize, inc: f64) {
        let (s, c) = kahan_accumulate(self.q[k], self.q_comp[k], inc);
        self.q[k] = s;
        self.q_comp[k] = c;
    }

    #[inline]
    pub fn add_p(&mut self, k: usize, inc: f64) {
        let (s, c) = kahan_accumulate(self.p[k], self.p_comp[k], inc);
        self.p[k] = s;
        self.p_comp[k] = c;
    }
}

/// Internal stage data of one converged step.
#[derive(Debug, Clone)]
pub struct StageWorkspace {
    pub s: usize,
    pub d: usize,
    /// Stage configurations Q_i.
    pub q_stages: Vec<Vec<f64>>,
    /// Stage velocities.
    pub v_stages: Vec<Vec<f64>>,
    /// Stage momenta P_i.
    pub p_stages: Vec<Vec<f64>>,
    /// Stage forces.
    pub f_stages: Vec<Vec<f64>>,
    /// Lobatto null-space multiplier.
    pub mu: Option<Vec<f64>>,
    /// Radau per-stage constraint multipliers.
    pub stage_multipliers: Option<Vec<Vec<f64>>>,
}

impl StageWorkspace {
    /// max_i |P_i - theta(Q_i)|_inf over the internal stages.
    pub fn stage_constraint_norm(&self, sys: &DegenerateLagrangianSystem) -> f64 {
        let mut th = vec![0.0; self.d];
        let mut worst: f64 = 0.0;
        for i in 0..self.s {
            sys.theta(&self.q_stages[i], &mut th);
            for k in 0..self.d {
                worst = worst.max((self.p_stages[i][k] - th[k]).abs());
            }
        }
        worst
    }
}

/// Result of one step of a base method.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub next: PhasePoint,
    pub stages: StageWorkspace,
    /// Stage whose (Q, P) is the chord midpoint, when the method has one.
    pub midpoint_stage_index: Option<usize>,
    pub report: SolveReport,
}

/// Reusable buffers for residual evaluations.
pub struct Scratch {
    jac: DMatrix<f64>,
    grad: Vec<f64>,
    th: Vec<f64>,
    qs: Vec<Vec<f64>>,
    fs: Vec<Vec<f64>>,
}

impl Scratch {
    pub fn new(d: usize, s: usize) -> Self {
        Scratch {
            jac: DMatrix::zeros(d, d),
            grad: vec![0.0; d],
            th: vec![0.0; d],
            qs: vec![vec![0.0; d]; s],
            fs: vec![vec![0.0; d]; s],
        }
    }
}

/// A one-step method defined by an implicit system in stage unknowns.
///
/// `residual` and `plain_output` evaluate the stage system for a step
/// starting at an arbitrary phase point, which lets projection wrappers
/// embed the method into larger coupled systems. `apply` commits the
/// converged increments to a compensated trajectory state.
pub trait OneStepMethod: Send + Sync {
    fn tableau(&self) -> &PartitionedTableau;

    fn unknown_count(&self, d: usize) -> usize;

    /// Warm start from the previous step's stages when shapes match.
    fn initial_guess(&self, d: usize, warm: Option<&StageWorkspace>) -> Vec<f64>;

    fn residual(
        &self,
        sys: &DegenerateLagrangianSystem,
        z: &PhasePoint,
        h: f64,
        u: &[f64],
        scratch: &mut Scratch,
        out: &mut [f64],
    );

    /// End-of-step point by plain summation (no compensation).
    fn plain_output(
        &self,
        sys: &DegenerateLagrangianSystem,
        z: &PhasePoint,
        h: f64,
        u: &[f64],
        scratch: &mut Scratch,
    ) -> PhasePoint;

    /// End-of-step point reusing the stage forces already held in
    /// `scratch` from a preceding `residual` call with the same (z, u).
    fn output_cached(&self, z: &PhasePoint, h: f64, u: &[f64], scratch: &Scratch) -> PhasePoint;

    /// q_{n+1} - q_n as a plain sum of the solved unknowns.
    fn q_increment(&self, d: usize, h: f64, u: &[f64], out: &mut [f64]);

    /// Commit the step to `state` using split coefficients and Kahan
    /// accumulation; returns the internal stages.
    fn apply(
        &self,
        sys: &DegenerateLagrangianSystem,
        state: &mut CompensatedState,
        h: f64,
        u: &[f64],
    ) -> StageWorkspace;
}

/// Pick the step formulation a tableau calls for: Radau IIA integrates
/// the constrained DAE, tableaux with a d-vector use the null-space
/// variant, everything else the plain VPRK system.
pub fn method_for_tableau(tableau: &PartitionedTableau) -> Box<dyn OneStepMethod> {
    match tableau.family {
        TableauFamily::RadauIIA => Box::new(RadauDaeMethod::new(tableau.clone())),
        _ if tableau.d.is_some() => Box::new(VprkLobattoMethod::new(tableau.clone())),
        _ => Box::new(VprkMethod::new(tableau.clone())),
    }
}

pub(crate) fn solve_method(
    method: &dyn OneStepMethod,
    sys: &DegenerateLagrangianSystem,
    z: &PhasePoint,
    h: f64,
    cfg: &SolverConfig,
    warm: Option<&StageWorkspace>,
) -> std::result::Result<(Vec<f64>, SolveReport), SolverError> {
    let d = sys.dim();
    let guess = method.initial_guess(d, warm);
    let mut scratch = Scratch::new(d, method.tableau().stages());
    newton_solve(
        |u, out| method.residual(sys, z, h, u, &mut scratch, out),
        None,
        &guess,
        cfg,
    )
}

fn step_with(
    method: &dyn OneStepMethod,
    sys: &DegenerateLagrangianSystem,
    z_n: &PhasePoint,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepResult> {
    // negative h steps backwards in time (reversibility checks)
    if h == 0.0 || !h.is_finite() {
        return Err(Error::Config(format!("step size must be nonzero, got {h}")));
    }
    let (u, report) = solve_method(method, sys, z_n, h, cfg, None).map_err(Error::Solver)?;
    let mut state = CompensatedState::new(z_n);
    let stages = method.apply(sys, &mut state, h, &u);
    Ok(StepResult {
        next: state.point(),
        stages,
        midpoint_stage_index: method.tableau().midpoint_stage_index(),
        report,
    })
}

/// One variational partitioned Runge-Kutta step for tableaux with
/// linearly independent stage velocities (Gauss-Legendre, Lobatto
/// IIID/IIIE, SRK3).
pub fn vprk_step(
    sys: &DegenerateLagrangianSystem,
    tableau: &PartitionedTableau,
    z_n: &PhasePoint,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepResult> {
    match tableau.family {
        TableauFamily::GaussLegendre
        | TableauFamily::LobattoIIID
        | TableauFamily::LobattoIIIE
        | TableauFamily::Srk3 => {}
        other => {
            return Err(Error::Config(format!(
                "vprk_step requires linearly independent stage velocities; \
                 family {other:?} needs the Lobatto or Radau variant"
            )))
        }
    }
    step_with(&VprkMethod::new(tableau.clone()), sys, z_n, h, cfg)
}

/// One VPRK step with the null-space constraint sum_i d_i V_i = 0 and
/// the multiplier mu entering the stage momenta as -mu d_i / b_i.
pub fn vprk_lobatto_step(
    sys: &DegenerateLagrangianSystem,
    tableau: &PartitionedTableau,
    z_n: &PhasePoint,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepResult> {
    if tableau.d.is_none() {
        return Err(Error::Config(
            "vprk_lobatto_step requires a tableau with a d-vector".into(),
        ));
    }
    step_with(&VprkLobattoMethod::new(tableau.clone()), sys, z_n, h, cfg)
}

/// One Radau IIA collocation step on the index-2 DAE
/// qdot = lambda, pdot = -grad H + (d theta/dq)^T lambda, phi(q, p) = 0.
/// Stiff accuracy places the end of the step on the constraint.
pub fn radau_dae_step(
    sys: &DegenerateLagrangianSystem,
    tableau: &PartitionedTableau,
    z_n: &PhasePoint,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepResult> {
    if tableau.family != TableauFamily::RadauIIA {
        return Err(Error::Config("radau_dae_step requires a Radau IIA tableau".into()));
    }
    step_with(&RadauDaeMethod::new(tableau.clone()), sys, z_n, h, cfg)
}

// ---------------------------------------------------------------------------
// VPRK: unknowns are the stage velocities V (s*d values).
// ---------------------------------------------------------------------------

pub struct VprkMethod {
    tableau: PartitionedTableau,
}

impl VprkMethod {
    pub fn new(tableau: PartitionedTableau) -> Self {
        VprkMethod { tableau }
    }

    /// Fill scratch.qs with Q_i = q_n + h sum_j a_ij V_j and scratch.fs
    /// with the stage forces.
    fn stages_into(
        &self,
        sys: &DegenerateLagrangianSystem,
        z: &PhasePoint,
        h: f64,
        v: &[f64],
        scratch: &mut Scratch,
    ) {
        let s = self.tableau.stages();
        let d = sys.dim();
        let a = &self.tableau.q_tableau.a;
        for i in 0..s {
            for k in 0..d {
                let mut acc = z.q[k];
                for j in 0..s {
                    acc += h * a[i][j] * v[j * d + k];
                }
                scratch.qs[i][k] = acc;
            }
        }
        for j in 0..s {
            let (qs, fs) = (&scratch.qs[j], &mut scratch.fs[j]);
            sys.force_with(qs, &v[j * d..(j + 1) * d], &mut scratch.jac, &mut scratch.grad, fs);
        }
    }
}

impl OneStepMethod for VprkMethod {
    fn tableau(&self) -> &PartitionedTableau {
        &self.tableau
    }

    fn unknown_count(&self, d: usize) -> usize {
        self.tableau.stages() * d
    }

    fn initial_guess(&self, d: usize, warm: Option<&StageWorkspace>) -> Vec<f64> {
        let n = self.unknown_count(d);
        match warm {
            Some(w) if w.s == self.tableau.stages() && w.d == d => {
                let mut g = Vec::with_capacity(n);
                for vs in &w.v_stages {
                    g.extend_from_slice(vs);
                }
                g
            }
            _ => vec![0.0; n],
        }
    }

    fn residual(
        &self,
        sys: &DegenerateLagrangianSystem,
        z: &PhasePoint,
        h: f64,
        u: &[f64],
        scratch: &mut Scratch,
        out: &mut [f64],
    ) {
        let s = self.tableau.stages();
        let d = sys.dim();
        self.stages_into(sys, z, h, u, scratch);
        let abar = &self.p_a();
        for i in 0..s {
            sys.theta(&scratch.qs[i], &mut scratch.th);
            for k in 0..d {
                let mut acc = scratch.th[k] - z.p[k];
                for j in 0..s {
                    acc -= h * abar[i][j] * scratch.fs[j][k];
                }
                out[i * d + k] = acc;
            }
        }
    }

    fn plain_output(
        &self,
        sys: &DegenerateLagrangianSystem,
        z: &PhasePoint,
        h: f64,
        u: &[f64],
        scratch: &mut Scratch,
    ) -> PhasePoint {
        self.stages_into(sys, z, h, u, scratch);
        self.output_cached(z, h, u, scratch)
    }

    fn output_cached(&self, z: &PhasePoint, h: f64, u: &[f64], scratch: &Scratch) -> PhasePoint {
        let s = self.tableau.stages();
        let d = z.dim();
        let b = &self.tableau.q_tableau.b;
        let bbar = &self.tableau.p_tableau.b;
        let mut q = z.q.clone();
        let mut p = z.p.clone();
        for i in 0..s {
            for k in 0..d {
                q[k] += h * b[i] * u[i * d + k];
                p[k] += h * bbar[i] * scratch.fs[i][k];
            }
        }
        PhasePoint::new(q, p)
    }

    fn q_increment(&self, d: usize, h: f64, u: &[f64], out: &mut [f64]) {
        let s = self.tableau.stages();
        let b = &self.tableau.q_tableau.b;
        for k in 0..d {
            out[k] = 0.0;
            for i in 0..s {
                out[k] += h * b[i] * u[i * d + k];
            }
        }
    }

    fn apply(
        &self,
        sys: &DegenerateLagrangianSystem,
        state: &mut CompensatedState,
        h: f64,
        u: &[f64],
    ) -> StageWorkspace {
        let s = self.tableau.stages();
        let d = state.dim();
        let mut scratch = Scratch::new(d, s);
        let z = state.point();
        self.stages_into(sys, &z, h, u, &mut scratch);
        let abar = self.p_a();
        let ws = build_workspace(&z, h, u, &scratch, &abar, None, &self.tableau);
        commit_updates(state, h, u, &scratch.fs, &self.tableau);
        ws
    }
}

impl VprkMethod {
    fn p_a(&self) -> Vec<Vec<f64>> {
        self.tableau.p_tableau.a.clone()
    }
}

// ---------------------------------------------------------------------------
// VPRK with null-space constraint: unknowns [V (s*d); mu (d)].
// ---------------------------------------------------------------------------

pub struct VprkLobattoMethod {
    inner: VprkMethod,
    d_vec: Vec<f64>,
}

impl VprkLobattoMethod {
    pub fn new(tableau: PartitionedTableau) -> Self {
        let d_vec = tableau
            .d
            .clone()
            .expect("VprkLobattoMethod requires a d-vector");
        VprkLobattoMethod {
            inner: VprkMethod::new(tableau),
            d_vec,
        }
    }
}

impl OneStepMethod for VprkLobattoMethod {
    fn tableau(&self) -> &PartitionedTableau {
        &self.inner.tableau
    }

    fn unknown_count(&self, d: usize) -> usize {
        self.inner.tableau.stages() * d + d
    }

    fn initial_guess(&self, d: usize, warm: Option<&StageWorkspace>) -> Vec<f64> {
        let s = self.inner.tableau.stages();
        let mut g = vec![0.0; s * d + d];
        if let Some(w) = warm {
            if w.s == s && w.d == d {
                for (i, vs) in w.v_stages.iter().enumerate() {
                    g[i * d..(i + 1) * d].copy_from_slice(vs);
                }
                if let Some(mu) = &w.mu {
                    g[s * d..].copy_from_slice(mu);
                }
            }
        }
        g
    }

    fn residual(
        &self,
        sys: &DegenerateLagrangianSystem,
        z: &PhasePoint,
        h: f64,
        u: &[f64],
        scratch: &mut Scratch,
        out: &mut [f64],
    ) {
        let s = self.inner.tableau.stages();
        let d = sys.dim();
        let (v, mu) = u.split_at(s * d);
        self.inner.stages_into(sys, z, h, v, scratch);
        let abar = &self.inner.tableau.p_tableau.a;
        let b = &self.inner.tableau.q_tableau.b;
        for i in 0..s {
            sys.theta(&scratch.qs[i], &mut scratch.th);
            for k in 0..d {
                let mut acc = scratch.th[k] - z.p[k] + mu[k] * self.d_vec[i] / b[i];
                for j in 0..s {
                    acc -= h * abar[i][j] * scratch.fs[j][k];
                }
                out[i * d + k] = acc;
            }
        }
        for k in 0..d {
            let mut acc = 0.0;
            for i in 0..s {
                acc += self.d_vec[i] * v[i * d + k];
            }
            out[s * d + k] = acc;
        }
    }

    fn plain_output(
        &self,
        sys: &DegenerateLagrangianSystem,
        z: &PhasePoint,
        h: f64,
        u: &[f64],
        scratch: &mut Scratch,
    ) -> PhasePoint {
        let s = self.inner.tableau.stages();
        let d = sys.dim();
        self.inner.plain_output(sys, z, h, &u[..s * d], scratch)
    }

    fn output_cached(&self, z: &PhasePoint, h: f64, u: &[f64], scratch: &Scratch) -> PhasePoint {
        let s = self.inner.tableau.stages();
        let d = z.dim();
        self.inner.output_cached(z, h, &u[..s * d], scratch)
    }

    fn q_increment(&self, d: usize, h: f64, u: &[f64], out: &mut [f64]) {
        let s = self.inner.tableau.stages();
        self.inner.q_increment(d, h, &u[..s * d], out);
    }

    fn apply(
        &self,
        sys: &DegenerateLagrangianSystem,
        state: &mut CompensatedState,
        h: f64,
        u: &[f64],
    ) -> StageWorkspace {
        let s = self.inner.tableau.stages();
        let d = state.dim();
        let (v, mu) = u.split_at(s * d);
        let mut scratch = Scratch::new(d, s);
        let z = state.point();
        self.inner.stages_into(sys, &z, h, v, &mut scratch);
        let abar = self.inner.p_a();
        let mut ws = build_workspace(&z, h, v, &scratch, &abar, Some((mu, &self.d_vec)), self.tableau());
        ws.mu = Some(mu.to_vec());
        commit_updates(state, h, v, &scratch.fs, self.tableau());
        ws
    }
}

// ---------------------------------------------------------------------------
// Radau IIA on the index-2 DAE: unknowns are the stage multipliers.
// ---------------------------------------------------------------------------

pub struct RadauDaeMethod {
    tableau: PartitionedTableau,
}

impl RadauDaeMethod {
    pub fn new(tableau: PartitionedTableau) -> Self {
        RadauDaeMethod { tableau }
    }

    /// Fill scratch.qs with Q_i and scratch.fs with
    /// pdot_i = -grad H(Q_i) + J^T(Q_i) Lambda_i.
    fn stages_into(
        &self,
        sys: &DegenerateLagrangianSystem,
        z: &PhasePoint,
        h: f64,
        lam: &[f64],
        scratch: &mut Scratch,
    ) {
        let s = self.tableau.stages();
        let d = sys.dim();
        let a = &self.tableau.q_tableau.a;
        for i in 0..s {
            for k in 0..d {
                let mut acc = z.q[k];
                for j in 0..s {
                    acc += h * a[i][j] * lam[j * d + k];
                }
                scratch.qs[i][k] = acc;
            }
        }
        for j in 0..s {
            sys.theta_jacobian(&scratch.qs[j], &mut scratch.jac);
            sys.hamiltonian_gradient(&scratch.qs[j], &mut scratch.grad);
            for k in 0..d {
                let mut acc = -scratch.grad[k];
                for l in 0..d {
                    acc += scratch.jac[(l, k)] * lam[j * d + l];
                }
                scratch.fs[j][k] = acc;
            }
        }
    }
}

impl OneStepMethod for RadauDaeMethod {
    fn tableau(&self) -> &PartitionedTableau {
        &self.tableau
    }

    fn unknown_count(&self, d: usize) -> usize {
        self.tableau.stages() * d
    }

    fn initial_guess(&self, d: usize, warm: Option<&StageWorkspace>) -> Vec<f64> {
        let n = self.unknown_count(d);
        match warm {
            Some(w) if w.s == self.tableau.stages() && w.d == d => {
                let mut g = Vec::with_capacity(n);
                for vs in &w.v_stages {
                    g.extend_from_slice(vs);
                }
                g
            }
            _ => vec![0.0; n],
        }
    }

    fn residual(
        &self,
        sys: &DegenerateLagrangianSystem,
        z: &PhasePoint,
        h: f64,
        u: &[f64],
        scratch: &mut Scratch,
        out: &mut [f64],
    ) {
        let s = self.tableau.stages();
        let d = sys.dim();
        self.stages_into(sys, z, h, u, scratch);
        let a = &self.tableau.q_tableau.a;
        // phi(Q_i, P_i) = 0 with P_i = p_n + h sum_j a_ij pdot_j
        for i in 0..s {
            sys.theta(&scratch.qs[i], &mut scratch.th);
            for k in 0..d {
                let mut p_ik = z.p[k];
                for j in 0..s {
                    p_ik += h * a[i][j] * scratch.fs[j][k];
                }
                out[i * d + k] = p_ik - scratch.th[k];
            }
        }
    }

    fn plain_output(
        &self,
        sys: &DegenerateLagrangianSystem,
        z: &PhasePoint,
        h: f64,
        u: &[f64],
        scratch: &mut Scratch,
    ) -> PhasePoint {
        self.stages_into(sys, z, h, u, scratch);
        self.output_cached(z, h, u, scratch)
    }

    fn output_cached(&self, z: &PhasePoint, h: f64, u: &[f64], scratch: &Scratch) -> PhasePoint {
        let s = self.tableau.stages();
        let d = z.dim();
        let b = &self.tableau.q_tableau.b;
        let mut q = z.q.clone();
        let mut p = z.p.clone();
        for i in 0..s {
            for k in 0..d {
                q[k] += h * b[i] * u[i * d + k];
                p[k] += h * b[i] * scratch.fs[i][k];
            }
        }
        PhasePoint::new(q, p)
    }

    fn q_increment(&self, d: usize, h: f64, u: &[f64], out: &mut [f64]) {
        let s = self.tableau.stages();
        let b = &self.tableau.q_tableau.b;
        for k in 0..d {
            out[k] = 0.0;
            for i in 0..s {
                out[k] += h * b[i] * u[i * d + k];
            }
        }
    }

    fn apply(
        &self,
        sys: &DegenerateLagrangianSystem,
        state: &mut CompensatedState,
        h: f64,
        u: &[f64],
    ) -> StageWorkspace {
        let s = self.tableau.stages();
        let d = state.dim();
        let mut scratch = Scratch::new(d, s);
        let z = state.point();
        self.stages_into(sys, &z, h, u, &mut scratch);
        let a = self.tableau.q_tableau.a.clone();
        let mut ws = build_workspace(&z, h, u, &scratch, &a, None, &self.tableau);
        ws.stage_multipliers = Some(
            (0..s)
                .map(|i| u[i * d..(i + 1) * d].to_vec())
                .collect(),
        );
        commit_updates(state, h, u, &scratch.fs, &self.tableau);
        ws
    }
}

// ---------------------------------------------------------------------------
// Shared helpers.
// ---------------------------------------------------------------------------

/// Assemble the stage workspace; `p_coeffs` is the matrix defining the
/// stage momenta, `mu_term` the optional (mu, d-vector) contribution.
fn build_workspace(
    z: &PhasePoint,
    h: f64,
    v: &[f64],
    scratch: &Scratch,
    p_coeffs: &[Vec<f64>],
    mu_term: Option<(&[f64], &[f64])>,
    tableau: &PartitionedTableau,
) -> StageWorkspace {
    let s = tableau.stages();
    let d = z.dim();
    let b = &tableau.q_tableau.b;
    let mut p_stages = vec![vec![0.0; d]; s];
    for i in 0..s {
        for k in 0..d {
            let mut acc = z.p[k];
            for j in 0..s {
                acc += h * p_coeffs[i][j] * scratch.fs[j][k];
            }
            if let Some((mu, dv)) = mu_term {
                acc -= mu[k] * dv[i] / b[i];
            }
            p_stages[i][k] = acc;
        }
    }
    StageWorkspace {
        s,
        d,
        q_stages: scratch.qs.clone(),
        v_stages: (0..s).map(|i| v[i * d..(i + 1) * d].to_vec()).collect(),
        p_stages,
        f_stages: scratch.fs.clone(),
        mu: None,
        stage_multipliers: None,
    }
}

/// q += h sum_i b_i V_i and p += h sum_i bbar_i F_i with split weights:
/// machine parts first, then the corrections, all Kahan-accumulated.
fn commit_updates(
    state: &mut CompensatedState,
    h: f64,
    v: &[f64],
    fs: &[Vec<f64>],
    tableau: &PartitionedTableau,
) {
    let s = tableau.stages();
    let d = state.dim();
    for i in 0..s {
        let bv = tableau.b_split[i].value;
        let bf = tableau.bbar_split[i].value;
        for k in 0..d {
            state.add_q(k, h * bv * v[i * d + k]);
            state.add_p(k, h * bf * fs[i][k]);
        }
    }
    for i in 0..s {
        let bv = tableau.b_split[i].correction;
        let bf = tableau.bbar_split[i].correction;
        if bv == 0.0 && bf == 0.0 {
            continue;
        }
        for k in 0..d {
            state.add_q(k, h * bv * v[i * d + k]);
            state.add_p(k, h * bf * fs[i][k]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{initial_momentum, lotka_volterra, rotator};
    use crate::tableaux;
    use approx::assert_abs_diff_eq;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn implicit_midpoint_on_rotator_matches_cayley_map() {
        // closed form (I - h/2 A)^{-1} (I + h/2 A) for the linear rotator
        let sys = rotator();
        let t = tableaux::gauss_legendre(1).unwrap();
        let z0 = initial_momentum(&sys, &[1.0, 0.0]).unwrap();
        let r = vprk_step(&sys, &t, &z0, 0.2, &cfg()).unwrap();
        assert_abs_diff_eq!(r.next.q[0], 0.99 / 1.01, epsilon = 1e-14);
        assert_abs_diff_eq!(r.next.q[1], 0.20 / 1.01, epsilon = 1e-14);
        // midpoint rule conserves the quadratic invariant |q|^2
        let norm2 = r.next.q[0].powi(2) + r.next.q[1].powi(2);
        assert_abs_diff_eq!(norm2, 1.0, epsilon = 1e-15);
        assert_eq!(r.midpoint_stage_index, Some(0));
    }

    #[test]
    fn gauss_methods_preserve_linear_constraint() {
        let sys = rotator();
        let z0 = initial_momentum(&sys, &[1.0, 0.0]).unwrap();
        for s in 1..=4 {
            let t = tableaux::gauss_legendre(s).unwrap();
            let r = vprk_step(&sys, &t, &z0, 0.1, &cfg()).unwrap();
            let res = sys.constraint_inf_norm(&r.next);
            assert!(res <= 10.0 * r.report.tolerance, "s={s}: {res}");
        }
    }

    #[test]
    fn stage_constraint_satisfied_on_lotka_volterra() {
        let sys = lotka_volterra(1.0, 1.0, 1.0, 2.0);
        let z0 = initial_momentum(&sys, &[1.0, 1.0]).unwrap();
        let t = tableaux::gauss_legendre(2).unwrap();
        let r = vprk_step(&sys, &t, &z0, 0.1, &cfg()).unwrap();
        assert!(r.stages.stage_constraint_norm(&sys) <= 10.0 * r.report.tolerance);
    }

    #[test]
    fn lobatto_step_solves_nullspace_constraint() {
        let sys = rotator();
        let z0 = initial_momentum(&sys, &[1.0, 0.0]).unwrap();
        let t = tableaux::by_name("lobatto-iiia-2").unwrap();
        let r = vprk_lobatto_step(&sys, &t, &z0, 0.1, &cfg()).unwrap();
        // sum_i d_i V_i = 0 is one of the solved equations
        let d_vec = t.d.as_ref().unwrap();
        for k in 0..2 {
            let sum: f64 = (0..2).map(|i| d_vec[i] * r.stages.v_stages[i][k]).sum();
            assert!(sum.abs() <= 10.0 * r.report.tolerance);
        }
        assert!(r.stages.stage_constraint_norm(&sys) <= 10.0 * r.report.tolerance);
        assert!(r.stages.mu.is_some());
    }

    #[test]
    fn radau_lands_on_the_constraint() {
        let sys = lotka_volterra(1.0, 1.0, 1.0, 2.0);
        let z0 = initial_momentum(&sys, &[1.0, 1.0]).unwrap();
        let t = tableaux::radau_iia(2).unwrap();
        let r = radau_dae_step(&sys, &t, &z0, 0.1, &cfg()).unwrap();
        assert!(sys.constraint_inf_norm(&r.next) <= 10.0 * r.report.tolerance);
    }

    #[test]
    fn wrong_family_step_functions_are_rejected() {
        let sys = rotator();
        let z0 = initial_momentum(&sys, &[1.0, 0.0]).unwrap();
        let lob = tableaux::by_name("lobatto-iiia-2").unwrap();
        let gl = tableaux::gauss_legendre(1).unwrap();
        assert!(vprk_step(&sys, &lob, &z0, 0.1, &cfg()).is_err());
        assert!(vprk_lobatto_step(&sys, &gl, &z0, 0.1, &cfg()).is_err());
        assert!(radau_dae_step(&sys, &gl, &z0, 0.1, &cfg()).is_err());
        assert!(vprk_step(&sys, &gl, &z0, 0.0, &cfg()).is_err());
        // backwards steps are allowed at the one-step level
        assert!(vprk_step(&sys, &gl, &z0, -0.1, &cfg()).is_ok());
    }

    #[test]
    fn initial_momentum_examples() {
        let lv = lotka_volterra(1.0, 1.0, 1.0, 2.0);
        assert_eq!(initial_momentum(&lv, &[1.0, 1.0]).unwrap().p, vec![1.0, 1.0]);
        let rot = rotator();
        assert_eq!(initial_momentum(&rot, &[1.0, 0.0]).unwrap().p, vec![0.0, 0.5]);
    }
}
