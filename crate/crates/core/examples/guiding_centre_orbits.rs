//! Guiding-centre test particles in the tokamak-like field: the
//! toroidal momentum theta_3 is a Noether invariant, preserved to
//! round-off by the symmetric projection over long runs.
//!
//! Run with: cargo run --release --example guiding_centre_orbits

use vprk::diagnostics::DiagnosticSeries;
use vprk::nlsolve::SolverConfig;
use vprk::projections::{integrate, ProjectedStepper, ProjectionKind, ProjectionOptions};
use vprk::systems::{guiding_centre, FieldSpec};
use vprk::tableaux;

fn main() {
    let sys = guiding_centre(FieldSpec::tokamak());
    // (u, h) for the four reference particles
    let particles = [
        ("deeply trapped", 0.1, 5.0),
        ("barely trapped", 0.3375, 3.0),
        ("barely passing", 0.3425, 2.5),
        ("deeply passing", 0.5, 2.5),
    ];
    let t = tableaux::by_name("glrk2").unwrap();
    let st = ProjectedStepper::new(
        &t,
        ProjectionKind::Symmetric,
        ProjectionOptions::default(),
        SolverConfig::default(),
    )
    .unwrap();
    for (label, u, h) in particles {
        let q0 = [2.5, 0.0, 0.0, u];
        let out = integrate(&sys, &st, &q0, h, 10_000).unwrap();
        match &out.failure {
            Some((step, err)) => println!("{label:<15} u={u:<7} diverged at step {step}: {err}"),
            None => {
                let series = DiagnosticSeries::compute(&sys, &out.trajectory);
                let mom = series.momentum_error.as_ref().unwrap();
                let max_p = mom.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                let max_e = series
                    .energy_error
                    .iter()
                    .fold(0.0_f64, |m, v| m.max(v.abs()));
                println!(
                    "{label:<15} u={u:<7} 1e4 steps at h={h}: max |dP| = {max_p:.2e}, max |dH| = {max_e:.2e}"
                );
            }
        }
    }
}
