//! Degenerate Lagrangian systems L = theta(q) . qdot - H(q).
//!
//! A system is an immutable bundle of the one-form theta, its Jacobian,
//! the Hamiltonian and its gradient, plus an optional Noether momentum
//! map. Evaluation is pure and reentrant, so systems can be shared
//! read-only across concurrent trajectories.

mod guiding_centre;
mod lotka_volterra;
mod point_vortices;
mod rotator;

pub use guiding_centre::{guiding_centre, FieldSpec};
pub use lotka_volterra::{lotka_volterra, lotka_volterra_force_closed};
pub use point_vortices::{point_vortices, point_vortices_force_closed};
pub use rotator::{rotator, rotator_exact};

use crate::error::{Error, Result};
use nalgebra::DMatrix;

type VecFn = Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
type MatFn = Box<dyn Fn(&[f64], &mut DMatrix<f64>) + Send + Sync>;
type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type DomainFn = Box<dyn Fn(&[f64]) -> Option<String> + Send + Sync>;

/// A point (q, p) on the cotangent bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Self {
        debug_assert_eq!(q.len(), p.len());
        PhasePoint { q, p }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }
}

/// Integration state: time, phase point, and the projection multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState {
    pub t: f64,
    pub point: PhasePoint,
    pub lambda: Vec<f64>,
}

impl ExtendedState {
    pub fn new(t: f64, point: PhasePoint, lambda: Vec<f64>) -> Self {
        debug_assert_eq!(point.dim(), lambda.len());
        ExtendedState { t, point, lambda }
    }

    /// State at the initial time: p = theta(q), lambda = 0.
    pub fn initial(sys: &DegenerateLagrangianSystem, t: f64, q: Vec<f64>) -> Result<Self> {
        let point = initial_momentum(sys, &q)?;
        let lambda = vec![0.0; sys.dim()];
        Ok(ExtendedState { t, point, lambda })
    }
}

/// Exact initialization on the constraint submanifold: (q0, theta(q0)).
pub fn initial_momentum(sys: &DegenerateLagrangianSystem, q0: &[f64]) -> Result<PhasePoint> {
    sys.check_domain(q0)?;
    let mut p = vec![0.0; sys.dim()];
    sys.theta(q0, &mut p);
    Ok(PhasePoint::new(q0.to_vec(), p))
}

pub struct DegenerateLagrangianSystem {
    dim: usize,
    label: String,
    /// Paper-standard starting configuration for this benchmark.
    pub default_q0: Vec<f64>,
    theta_fn: VecFn,
    theta_jac_fn: MatFn,
    hamiltonian_fn: ScalarFn,
    grad_h_fn: VecFn,
    momentum_fn: Option<ScalarFn>,
    domain_fn: Option<DomainFn>,
}

impl std::fmt::Debug for DegenerateLagrangianSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DegenerateLagrangianSystem")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .finish()
    }
}

impl DegenerateLagrangianSystem {
    #[allow(clippy::too_many_arguments)]
    fn new(
        dim: usize,
        label: &str,
        default_q0: Vec<f64>,
        theta_fn: VecFn,
        theta_jac_fn: MatFn,
        hamiltonian_fn: ScalarFn,
        grad_h_fn: VecFn,
        momentum_fn: Option<ScalarFn>,
        domain_fn: Option<DomainFn>,
    ) -> Self {
        DegenerateLagrangianSystem {
            dim,
            label: label.to_string(),
            default_q0,
            theta_fn,
            theta_jac_fn,
            hamiltonian_fn,
            grad_h_fn,
            momentum_fn,
            domain_fn,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// theta(q) into `out`.
    pub fn theta(&self, q: &[f64], out: &mut [f64]) {
        (self.theta_fn)(q, out);
    }

    pub fn theta_vec(&self, q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.theta(q, &mut out);
        out
    }

    /// J with J[(i, j)] = d theta_i / d q^j.
    pub fn theta_jacobian(&self, q: &[f64], out: &mut DMatrix<f64>) {
        (self.theta_jac_fn)(q, out);
    }

    pub fn theta_jacobian_mat(&self, q: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        self.theta_jacobian(q, &mut out);
        out
    }

    pub fn hamiltonian(&self, q: &[f64]) -> f64 {
        (self.hamiltonian_fn)(q)
    }

    pub fn hamiltonian_gradient(&self, q: &[f64], out: &mut [f64]) {
        (self.grad_h_fn)(q, out);
    }

    pub fn has_momentum_map(&self) -> bool {
        self.momentum_fn.is_some()
    }

    /// Noether momentum map P(q), if the system has one.
    pub fn momentum_map(&self, q: &[f64]) -> Option<f64> {
        self.momentum_fn.as_ref().map(|f| f(q))
    }

    /// Err for configurations outside the system's domain.
    pub fn check_domain(&self, q: &[f64]) -> Result<()> {
        if let Some(f) = &self.domain_fn {
            if let Some(detail) = f(q) {
                return Err(Error::Domain {
                    system: self.label.clone(),
                    detail,
                });
            }
        }
        Ok(())
    }

    /// Dirac constraint phi(q, p) = p - theta(q). Its Jacobians are
    /// phi_q = -d theta/dq and phi_p = identity.
    pub fn constraint(&self, z: &PhasePoint) -> Vec<f64> {
        let mut th = vec![0.0; self.dim];
        self.theta(&z.q, &mut th);
        z.p.iter().zip(&th).map(|(p, t)| p - t).collect()
    }

    pub fn constraint_inf_norm(&self, z: &PhasePoint) -> f64 {
        self.constraint(z)
            .iter()
            .fold(0.0, |m, r| f64::max(m, r.abs()))
    }

    /// Generalized force dL/dq: f_i = sum_j (d theta_j / d q^i) v_j - dH/dq^i.
    pub fn force(&self, q: &[f64], v: &[f64], out: &mut [f64]) {
        let d = self.dim;
        let mut jac = DMatrix::zeros(d, d);
        self.theta_jacobian(q, &mut jac);
        let mut grad = vec![0.0; d];
        self.hamiltonian_gradient(q, &mut grad);
        for i in 0..d {
            let mut acc = -grad[i];
            for j in 0..d {
                acc += jac[(j, i)] * v[j];
            }
            out[i] = acc;
        }
    }

    /// Force with a caller-provided Jacobian workspace (hot path).
    pub(crate) fn force_with(
        &self,
        q: &[f64],
        v: &[f64],
        jac: &mut DMatrix<f64>,
        grad: &mut [f64],
        out: &mut [f64],
    ) {
        self.theta_jacobian(q, jac);
        self.hamiltonian_gradient(q, grad);
        for i in 0..self.dim {
            let mut acc = -grad[i];
            for j in 0..self.dim {
                acc += jac[(j, i)] * v[j];
            }
            out[i] = acc;
        }
    }

    /// Noncanonical symplectic matrix
    /// Omega_bar_ij = d theta_j / d q^i - d theta_i / d q^j,
    /// antisymmetric by construction.
    pub fn omega_bar(&self, q: &[f64]) -> DMatrix<f64> {
        let d = self.dim;
        let mut jac = DMatrix::zeros(d, d);
        self.theta_jacobian(q, &mut jac);
        let mut out = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in (i + 1)..d {
                let v = jac[(j, i)] - jac[(i, j)];
                out[(i, j)] = v;
                out[(j, i)] = -v;
            }
        }
        out
    }
}

/// Compare the hand-coded Jacobian and Hamiltonian gradient against
/// central finite differences at the given sample points; returns the
/// worst relative error. Step per component: eps^(1/3) * max(|q_i|, 1).
pub fn validate_derivatives(sys: &DegenerateLagrangianSystem, samples: &[Vec<f64>]) -> f64 {
    let d = sys.dim();
    let h0 = f64::EPSILON.powf(1.0 / 3.0);
    let mut worst: f64 = 0.0;
    let mut jac = DMatrix::zeros(d, d);
    let (mut tp, mut tm) = (vec![0.0; d], vec![0.0; d]);
    for q in samples {
        sys.theta_jacobian(q, &mut jac);
        let mut grad = vec![0.0; d];
        sys.hamiltonian_gradient(q, &mut grad);
        for j in 0..d {
            let h = h0 * q[j].abs().max(1.0);
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[j] += h;
            qm[j] -= h;
            sys.theta(&qp, &mut tp);
            sys.theta(&qm, &mut tm);
            for i in 0..d {
                let fd = (tp[i] - tm[i]) / (2.0 * h);
                let err = (jac[(i, j)] - fd).abs() / jac[(i, j)].abs().max(1.0);
                worst = worst.max(err);
            }
            let fd = (sys.hamiltonian(&qp) - sys.hamiltonian(&qm)) / (2.0 * h);
            let err = (grad[j] - fd).abs() / grad[j].abs().max(1.0);
            worst = worst.max(err);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_vanishes_on_the_submanifold() {
        let sys = lotka_volterra(1.0, 1.0, 1.0, 2.0);
        let z = PhasePoint::new(vec![1.0, 1.0], vec![1.0, 1.0]);
        assert_eq!(sys.constraint(&z), vec![0.0, 0.0]);

        let sys = rotator();
        let z = PhasePoint::new(vec![1.0, 0.0], vec![0.0, 0.5]);
        assert_eq!(sys.constraint(&z), vec![0.0, 0.0]);
    }

    #[test]
    fn constraint_is_linear_in_p() {
        let sys = point_vortices(0.1, 0.1);
        let q = vec![1.0, 0.1, 1.0, -0.1];
        let mut p = sys.theta_vec(&q);
        p[0] += 1e-3;
        let c = sys.constraint(&PhasePoint::new(q, p));
        assert!((c[0] - 1e-3).abs() < 1e-18);
        assert_eq!(&c[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn initial_momentum_lies_on_the_constraint() {
        let sys = lotka_volterra(1.0, 1.0, 1.0, 2.0);
        let z = initial_momentum(&sys, &[1.0, 1.0]).unwrap();
        assert_eq!(z.p, vec![1.0, 1.0]);
        assert_eq!(sys.constraint_inf_norm(&z), 0.0);
    }

    #[test]
    fn omega_bar_is_exactly_antisymmetric() {
        let sys = point_vortices(0.1, 0.2);
        for q in [
            vec![1.0, 0.1, 1.0, -0.1],
            vec![0.3, -0.7, 1.4, 0.2],
            vec![-1.1, 0.4, 0.2, 0.9],
        ] {
            let w = sys.omega_bar(&q);
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(w[(i, j)], -w[(j, i)]);
                }
            }
        }
    }

    #[test]
    fn derivative_validation_across_all_systems() {
        let samples2: Vec<Vec<f64>> = (0..20)
            .map(|k| {
                let t = 0.3 + 0.11 * k as f64;
                vec![0.5 + t.sin().abs(), 0.5 + t.cos().abs()]
            })
            .collect();
        assert!(validate_derivatives(&rotator(), &samples2) <= 1e-9);
        assert!(validate_derivatives(&lotka_volterra(1.0, 1.0, 1.0, 2.0), &samples2) <= 1e-6);

        let samples4: Vec<Vec<f64>> = (0..20)
            .map(|k| {
                let t = 0.17 * k as f64;
                vec![1.0 + 0.4 * t.sin(), 0.2 * t.cos(), -0.8 + 0.3 * t.sin(), 0.5 + 0.2 * t.cos()]
            })
            .collect();
        assert!(validate_derivatives(&point_vortices(0.1, 0.1), &samples4) <= 1e-6);

        let gc_samples: Vec<Vec<f64>> = (0..20)
            .map(|k| {
                let t = 0.23 * k as f64;
                vec![1.5 + 0.75 * (0.5 + 0.5 * t.sin()), 0.4 * t.cos(), t, 0.1 + 0.05 * t.sin()]
            })
            .collect();
        let tok = guiding_centre(FieldSpec::tokamak());
        assert!(validate_derivatives(&tok, &gc_samples) <= 1e-6);
        let sym = guiding_centre(FieldSpec::symmetric());
        assert!(validate_derivatives(&sym, &gc_samples) <= 1e-6);
    }
}
