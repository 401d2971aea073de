//! Two-species Lotka-Volterra system in its degenerate Lagrangian form:
//! theta = (log(q2)/q1 + q2, q1), H = a1 q1 + a2 q2 - b1 log q1 - b2 log q2.
//!
//! The intended domain is the open positive quadrant; with the standard
//! parameters (1, 1, 1, 2) and q0 = (1, 1) the solution is periodic.

use super::DegenerateLagrangianSystem;

pub fn lotka_volterra(a1: f64, a2: f64, b1: f64, b2: f64) -> DegenerateLagrangianSystem {
    DegenerateLagrangianSystem::new(
        2,
        "lotka-volterra",
        vec![1.0, 1.0],
        Box::new(|q, out| {
            out[0] = q[1].ln() / q[0] + q[1];
            out[1] = q[0];
        }),
        Box::new(|q, jac| {
            jac[(0, 0)] = -q[1].ln() / (q[0] * q[0]);
            jac[(0, 1)] = 1.0 / (q[0] * q[1]) + 1.0;
            jac[(1, 0)] = 1.0;
            jac[(1, 1)] = 0.0;
        }),
        Box::new(move |q| a1 * q[0] + a2 * q[1] - b1 * q[0].ln() - b2 * q[1].ln()),
        Box::new(move |q, out| {
            out[0] = a1 - b1 / q[0];
            out[1] = a2 - b2 / q[1];
        }),
        None,
        Some(Box::new(|q| {
            if q[0] <= 0.0 || q[1] <= 0.0 {
                Some(format!(
                    "populations must be positive, got ({}, {})",
                    q[0], q[1]
                ))
            } else {
                None
            }
        })),
    )
}

/// Hand-coded closed forms of the forces, used to cross-check the
/// generic J^T v - grad H contraction.
pub fn lotka_volterra_force_closed(
    (a1, a2, b1, b2): (f64, f64, f64, f64),
    q: &[f64],
    v: &[f64],
) -> [f64; 2] {
    [
        v[1] - q[1].ln() / (q[0] * q[0]) * v[0] - a1 + b1 / q[0],
        (1.0 + 1.0 / (q[0] * q[1])) * v[0] - a2 + b2 / q[1],
    ]
}
