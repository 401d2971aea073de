//! Instability of the symplectic projection: for the barely passing
//! guiding-centre particle nothing bounds the Lagrange multiplier, so
//! its oscillation amplitude grows until the projection overwhelms the
//! integration step.
//!
//! Run with: cargo run --release --example multiplier_growth

use vprk::diagnostics::DiagnosticSeries;
use vprk::nlsolve::SolverConfig;
use vprk::projections::{integrate, ProjectedStepper, ProjectionKind, ProjectionOptions};
use vprk::systems::{guiding_centre, FieldSpec};
use vprk::tableaux;

fn main() {
    let sys = guiding_centre(FieldSpec::tokamak());
    let t = tableaux::by_name("glrk3").unwrap();
    let st = ProjectedStepper::new(
        &t,
        ProjectionKind::Symplectic,
        ProjectionOptions::default(),
        SolverConfig::default(),
    )
    .unwrap();
    let out = integrate(&sys, &st, &[2.5, 0.0, 0.0, 0.3425], 2.5, 10_000).unwrap();
    let series = DiagnosticSeries::compute(&sys, &out.trajectory);
    let lam = &series.lambda_norm;
    println!("barely passing particle, glrk3 + symplectic projection, h = 2.5");
    if let Some((step, err)) = &out.failure {
        println!("run terminated at step {step}: {err}");
    }
    // amplitude envelope in tenths of the recorded run
    let n = lam.len();
    for k in 0..10 {
        let lo = n * k / 10;
        let hi = n * (k + 1) / 10;
        let peak = lam[lo..hi].iter().fold(0.0_f64, |m, v| m.max(*v));
        println!(
            "steps {:>5}..{:>5}: max |lambda| = {:.3e} {}",
            lo,
            hi,
            peak,
            "#".repeat(((peak.log10() + 7.0).max(0.0) * 4.0) as usize)
        );
    }
}
