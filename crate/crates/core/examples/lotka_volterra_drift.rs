//! Constraint drift of unprojected methods on a nonlinear one-form:
//! odd-stage Gauss methods oscillate about the constraint submanifold,
//! even-stage methods drift, and the two-stage Lobatto IIIA pair leaves
//! the domain within a few dozen steps.
//!
//! Run with: cargo run --release --example lotka_volterra_drift

use vprk::diagnostics::{drift_estimate, DiagnosticSeries};
use vprk::nlsolve::SolverConfig;
use vprk::projections::{integrate, ProjectedStepper, ProjectionKind, ProjectionOptions};
use vprk::systems::lotka_volterra;
use vprk::tableaux;

fn main() {
    let sys = lotka_volterra(1.0, 1.0, 1.0, 2.0);
    let (h, nsteps) = (0.1, 10_000);
    for name in ["glrk1", "glrk2", "glrk3", "srk3", "lobatto-iiid-2", "lobatto-iiia-2"] {
        let t = tableaux::by_name(name).unwrap();
        let st = ProjectedStepper::new(
            &t,
            ProjectionKind::None,
            ProjectionOptions::default(),
            SolverConfig::default(),
        )
        .unwrap();
        let out = integrate(&sys, &st, &[1.0, 1.0], h, nsteps).unwrap();
        match &out.failure {
            Some((step, err)) => {
                println!("{name:<16} diverged at step {step}: {err}");
            }
            None => {
                let series = DiagnosticSeries::compute(&sys, &out.trajectory);
                let blocks = drift_estimate(&series.constraint_residual, 10);
                println!(
                    "{name:<16} |phi| block maxima: first {:.2e}, middle {:.2e}, last {:.2e} ({})",
                    blocks[0],
                    blocks[4],
                    blocks[9],
                    if blocks[9] > 3.0 * blocks[0] {
                        "drifting"
                    } else {
                        "bounded"
                    }
                );
            }
        }
    }
}
