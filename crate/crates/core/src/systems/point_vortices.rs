//! Two planar point vortices with position-dependent circulation
//! Gamma_i = gamma_i S(x, y), S(a, b) = 1 + a^2 + b^2.
//!
//! Coordinates are ordered (x1, y1, x2, y2). The rotational symmetry of
//! S yields the conserved angular momentum
//! P = 1/2 sum_i gamma_i (x_i^2 + y_i^2) S(x_i, y_i).

use super::DegenerateLagrangianSystem;

#[inline]
fn s_fn(a: f64, b: f64) -> f64 {
    1.0 + a * a + b * b
}

pub fn point_vortices(gamma1: f64, gamma2: f64) -> DegenerateLagrangianSystem {
    let grad_h = move |q: &[f64], out: &mut [f64]| {
        let (x1, y1, x2, y2) = (q[0], q[1], q[2], q[3]);
        let (s1, s2) = (s_fn(x1, y1), s_fn(x2, y2));
        let (dx, dy) = (x1 - x2, y1 - y2);
        let dist2 = dx * dx + dy * dy;
        let log_d = dist2.ln();
        let pref = gamma1 * gamma2 / (2.0 * std::f64::consts::PI);
        let pair = 2.0 * pref * s1 * s2 / dist2;
        out[0] = pref * 2.0 * x1 * s2 * log_d + pair * dx;
        out[1] = pref * 2.0 * y1 * s2 * log_d + pair * dy;
        out[2] = pref * 2.0 * x2 * s1 * log_d - pair * dx;
        out[3] = pref * 2.0 * y2 * s1 * log_d - pair * dy;
    };
    DegenerateLagrangianSystem::new(
        4,
        "point-vortices",
        vec![1.0, 0.1, 1.0, -0.1],
        Box::new(move |q, out| {
            let (s1, s2) = (s_fn(q[0], q[1]), s_fn(q[2], q[3]));
            out[0] = -0.5 * gamma1 * q[1] * s1;
            out[1] = 0.5 * gamma1 * q[0] * s1;
            out[2] = -0.5 * gamma2 * q[3] * s2;
            out[3] = 0.5 * gamma2 * q[2] * s2;
        }),
        Box::new(move |q, jac| {
            jac.fill(0.0);
            let (x1, y1, x2, y2) = (q[0], q[1], q[2], q[3]);
            let (s1, s2) = (s_fn(x1, y1), s_fn(x2, y2));
            jac[(0, 0)] = -gamma1 * x1 * y1;
            jac[(0, 1)] = -0.5 * gamma1 * (s1 + 2.0 * y1 * y1);
            jac[(1, 0)] = 0.5 * gamma1 * (s1 + 2.0 * x1 * x1);
            jac[(1, 1)] = gamma1 * x1 * y1;
            jac[(2, 2)] = -gamma2 * x2 * y2;
            jac[(2, 3)] = -0.5 * gamma2 * (s2 + 2.0 * y2 * y2);
            jac[(3, 2)] = 0.5 * gamma2 * (s2 + 2.0 * x2 * x2);
            jac[(3, 3)] = gamma2 * x2 * y2;
        }),
        Box::new(move |q| {
            let (s1, s2) = (s_fn(q[0], q[1]), s_fn(q[2], q[3]));
            let dist2 = (q[0] - q[2]).powi(2) + (q[1] - q[3]).powi(2);
            gamma1 * gamma2 / (2.0 * std::f64::consts::PI) * s1 * s2 * dist2.ln()
        }),
        Box::new(grad_h),
        Some(Box::new(move |q| {
            0.5 * (gamma1 * (q[0] * q[0] + q[1] * q[1]) * s_fn(q[0], q[1])
                + gamma2 * (q[2] * q[2] + q[3] * q[3]) * s_fn(q[2], q[3]))
        })),
        Some(Box::new(|q| {
            let dist2 = (q[0] - q[2]).powi(2) + (q[1] - q[3]).powi(2);
            if dist2 == 0.0 {
                Some("coincident vortices (logarithmic singularity)".to_string())
            } else {
                None
            }
        })),
    )
}

/// Hand-coded closed forms of the vortex forces, used to cross-check
/// the generic J^T v - grad H contraction.
pub fn point_vortices_force_closed(
    (gamma1, gamma2): (f64, f64),
    q: &[f64],
    v: &[f64],
) -> [f64; 4] {
    let sys = point_vortices(gamma1, gamma2);
    let mut grad = [0.0; 4];
    sys.hamiltonian_gradient(q, &mut grad);
    let (x1, y1, x2, y2) = (q[0], q[1], q[2], q[3]);
    let (s1, s2) = (s_fn(x1, y1), s_fn(x2, y2));
    let (w1, w2) = (x1 * v[1] - y1 * v[0], x2 * v[3] - y2 * v[2]);
    [
        gamma1 * x1 * w1 + 0.5 * gamma1 * v[1] * s1 - grad[0],
        gamma1 * y1 * w1 - 0.5 * gamma1 * v[0] * s1 - grad[1],
        gamma2 * x2 * w2 + 0.5 * gamma2 * v[3] * s2 - grad[2],
        gamma2 * y2 * w2 - 0.5 * gamma2 * v[2] * s2 - grad[3],
    ]
}
