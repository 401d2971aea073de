//! Planar rotator: theta(q) = (-q2, q1)/2, H = |q|^2 / 2.
//!
//! The exact flow is rigid rotation with period 2 pi, which makes this
//! the analytically solvable validation system: theta is linear, so
//! every variational Runge-Kutta method preserves the Dirac constraint
//! to solver tolerance and all projections return zero multipliers.

use super::DegenerateLagrangianSystem;

pub fn rotator() -> DegenerateLagrangianSystem {
    DegenerateLagrangianSystem::new(
        2,
        "rotator",
        vec![1.0, 0.0],
        Box::new(|q, out| {
            out[0] = -0.5 * q[1];
            out[1] = 0.5 * q[0];
        }),
        Box::new(|_q, jac| {
            jac[(0, 0)] = 0.0;
            jac[(0, 1)] = -0.5;
            jac[(1, 0)] = 0.5;
            jac[(1, 1)] = 0.0;
        }),
        Box::new(|q| 0.5 * (q[0] * q[0] + q[1] * q[1])),
        Box::new(|q, out| {
            out[0] = q[0];
            out[1] = q[1];
        }),
        None,
        None,
    )
}

/// Exact solution of the rotator flow after time t.
pub fn rotator_exact(q0: &[f64], t: f64) -> Vec<f64> {
    let (s, c) = t.sin_cos();
    vec![c * q0[0] - s * q0[1], s * q0[0] + c * q0[1]]
}
