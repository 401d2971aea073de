//! Guiding-centre dynamics: theta = A(x) + u b(x) on the spatial
//! components, H = u^2/2 + mu |B(x)|.
//!
//! Two analytic field configurations are provided: a tokamak-like field
//! in toroidal coordinates (R, Z, phi, u) where theta_3 carries the
//! factor R and constitutes the conserved toroidal momentum, and a
//! z-symmetric Cartesian field B = (0, 0, B0 (1 + x^2 + y^2)) with the
//! gauge A = B0/2 (-y (1 + (x^2+y^2)/2), x (1 + (x^2+y^2)/2), 0).

use super::DegenerateLagrangianSystem;

/// Magnetic field configuration with its physical constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    Tokamak {
        r0: f64,
        b0: f64,
        qsafe: f64,
        mu: f64,
    },
    Symmetric {
        b0: f64,
        mu: f64,
    },
}

impl FieldSpec {
    /// Standard tokamak constants R0 = 2, B0 = 5, qsafe = 2, mu = 0.01.
    pub fn tokamak() -> Self {
        FieldSpec::Tokamak {
            r0: 2.0,
            b0: 5.0,
            qsafe: 2.0,
            mu: 0.01,
        }
    }

    /// Symmetric field B0 = 1, mu = 0.01.
    pub fn symmetric() -> Self {
        FieldSpec::Symmetric { b0: 1.0, mu: 0.01 }
    }

    pub fn mu(&self) -> f64 {
        match self {
            FieldSpec::Tokamak { mu, .. } | FieldSpec::Symmetric { mu, .. } => *mu,
        }
    }

    /// Physical field components: (B_R, B_Z, B_phi) for the tokamak,
    /// (B_x, B_y, B_z) for the symmetric field.
    pub fn b_field(&self, x: &[f64]) -> [f64; 3] {
        match *self {
            FieldSpec::Tokamak { r0, b0, qsafe, .. } => {
                let (rr, z) = (x[0], x[1]);
                [
                    -b0 * z / (qsafe * rr),
                    b0 * (rr - r0) / (qsafe * rr),
                    -b0 * r0 / rr,
                ]
            }
            FieldSpec::Symmetric { b0, .. } => {
                [0.0, 0.0, b0 * (1.0 + x[0] * x[0] + x[1] * x[1])]
            }
        }
    }

    /// Vector potential components in the same frame as `b_field`.
    pub fn vector_potential(&self, x: &[f64]) -> [f64; 3] {
        match *self {
            FieldSpec::Tokamak { r0, b0, qsafe, .. } => {
                let (rr, z) = (x[0], x[1]);
                let r2 = (rr - r0) * (rr - r0) + z * z;
                [
                    b0 * r0 * z / (2.0 * rr),
                    -(rr / r0).ln() * b0 * r0 / 2.0,
                    -b0 * r2 / (2.0 * qsafe * rr),
                ]
            }
            FieldSpec::Symmetric { b0, .. } => {
                let w = 1.0 + 0.5 * (x[0] * x[0] + x[1] * x[1]);
                [-0.5 * b0 * x[1] * w, 0.5 * b0 * x[0] * w, 0.0]
            }
        }
    }

    pub fn b_magnitude(&self, x: &[f64]) -> f64 {
        match *self {
            FieldSpec::Tokamak { r0, b0, qsafe, .. } => {
                let (rr, z) = (x[0], x[1]);
                let r2 = (rr - r0) * (rr - r0) + z * z;
                b0 * (r2 + qsafe * qsafe * r0 * r0).sqrt() / (qsafe * rr)
            }
            FieldSpec::Symmetric { b0, .. } => b0 * (1.0 + x[0] * x[0] + x[1] * x[1]),
        }
    }
}

pub fn guiding_centre(field: FieldSpec) -> DegenerateLagrangianSystem {
    match field {
        FieldSpec::Tokamak { r0, b0, qsafe, mu } => tokamak_system(r0, b0, qsafe, mu),
        FieldSpec::Symmetric { b0, mu } => symmetric_system(b0, mu),
    }
}

fn tokamak_system(r0: f64, b0: f64, qsafe: f64, mu: f64) -> DegenerateLagrangianSystem {
    let geom = move |q: &[f64]| -> (f64, f64, f64) {
        let (rr, z) = (q[0], q[1]);
        let r2 = (rr - r0) * (rr - r0) + z * z;
        let s = (r2 + qsafe * qsafe * r0 * r0).sqrt();
        (rr, z, s)
    };
    DegenerateLagrangianSystem::new(
        4,
        "guiding-centre-tokamak",
        vec![2.5, 0.0, 0.0, 0.1],
        Box::new(move |q, out| {
            let (rr, z, s) = geom(q);
            let u = q[3];
            let r2 = (rr - r0) * (rr - r0) + z * z;
            out[0] = b0 * r0 * z / (2.0 * rr) - u * z / s;
            out[1] = -(rr / r0).ln() * b0 * r0 / 2.0 + u * (rr - r0) / s;
            out[2] = -b0 * r2 / (2.0 * qsafe) - u * qsafe * r0 * rr / s;
            out[3] = 0.0;
        }),
        Box::new(move |q, jac| {
            jac.fill(0.0);
            let (rr, z, s) = geom(q);
            let u = q[3];
            let s3 = s * s * s;
            let dr = rr - r0;
            jac[(0, 0)] = -b0 * r0 * z / (2.0 * rr * rr) + u * z * dr / s3;
            jac[(0, 1)] = b0 * r0 / (2.0 * rr) - u * (1.0 / s - z * z / s3);
            jac[(0, 3)] = -z / s;
            jac[(1, 0)] = -b0 * r0 / (2.0 * rr) + u * (1.0 / s - dr * dr / s3);
            jac[(1, 1)] = -u * dr * z / s3;
            jac[(1, 3)] = dr / s;
            jac[(2, 0)] = -b0 * dr / qsafe - u * qsafe * r0 * (1.0 / s - rr * dr / s3);
            jac[(2, 1)] = -b0 * z / qsafe + u * qsafe * r0 * rr * z / s3;
            jac[(2, 3)] = -qsafe * r0 * rr / s;
        }),
        Box::new(move |q| {
            let (rr, _, s) = geom(q);
            0.5 * q[3] * q[3] + mu * b0 * s / (qsafe * rr)
        }),
        Box::new(move |q, out| {
            let (rr, z, s) = geom(q);
            out[0] = mu * b0 * ((rr - r0) / (s * qsafe * rr) - s / (qsafe * rr * rr));
            out[1] = mu * b0 * z / (s * qsafe * rr);
            out[2] = 0.0;
            out[3] = q[3];
        }),
        Some(Box::new(move |q| {
            let (rr, z, s) = geom(q);
            let r2 = (rr - r0) * (rr - r0) + z * z;
            -b0 * r2 / (2.0 * qsafe) - q[3] * qsafe * r0 * rr / s
        })),
        Some(Box::new(|q| {
            if q[0] <= 0.0 {
                Some(format!("major radius must be positive, got R = {}", q[0]))
            } else {
                None
            }
        })),
    )
}

fn symmetric_system(b0: f64, mu: f64) -> DegenerateLagrangianSystem {
    DegenerateLagrangianSystem::new(
        4,
        "guiding-centre-symmetric",
        vec![0.5, 0.0, 0.0, 0.55],
        Box::new(move |q, out| {
            let w = 1.0 + 0.5 * (q[0] * q[0] + q[1] * q[1]);
            out[0] = -0.5 * b0 * q[1] * w;
            out[1] = 0.5 * b0 * q[0] * w;
            out[2] = q[3];
            out[3] = 0.0;
        }),
        Box::new(move |q, jac| {
            jac.fill(0.0);
            let (x, y) = (q[0], q[1]);
            let w = 1.0 + 0.5 * (x * x + y * y);
            jac[(0, 0)] = -0.5 * b0 * y * x;
            jac[(0, 1)] = -0.5 * b0 * (w + y * y);
            jac[(1, 0)] = 0.5 * b0 * (w + x * x);
            jac[(1, 1)] = 0.5 * b0 * x * y;
            jac[(2, 3)] = 1.0;
        }),
        Box::new(move |q| {
            0.5 * q[3] * q[3] + mu * b0 * (1.0 + q[0] * q[0] + q[1] * q[1])
        }),
        Box::new(move |q, out| {
            out[0] = 2.0 * mu * b0 * q[0];
            out[1] = 2.0 * mu * b0 * q[1];
            out[2] = 0.0;
            out[3] = q[3];
        }),
        Some(Box::new(|q| q[3])),
        None,
    )
}
