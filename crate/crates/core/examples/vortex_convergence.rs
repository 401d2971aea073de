//! Convergence orders on the leapfrogging point-vortex problem: the
//! symmetric projection restores the full order 2s of the Gauss methods
//! and lifts the momentum order to 2s + 2.
//!
//! Run with: cargo run --release --example vortex_convergence

use vprk::diagnostics::{convergence_order, Trajectory};
use vprk::nlsolve::SolverConfig;
use vprk::projections::{integrate, ProjectedStepper, ProjectionKind, ProjectionOptions};
use vprk::systems::point_vortices;
use vprk::tableaux;

fn main() {
    let sys = point_vortices(0.1, 0.1);
    let q0 = [1.0, 0.1, 1.0, -0.1];
    let h_list = [0.2, 0.1, 0.05, 0.025];
    let t_end = 10.0;

    let reference: Trajectory = {
        let t = tableaux::by_name("glrk3").unwrap();
        let st = ProjectedStepper::new(
            &t,
            ProjectionKind::Symmetric,
            ProjectionOptions::default(),
            SolverConfig::default(),
        )
        .unwrap();
        integrate(&sys, &st, &q0, 0.0025, 4000).unwrap().trajectory
    };

    println!(
        "{:<22} {:>8} {:>8} {:>9}",
        "method", "solution", "energy", "momentum"
    );
    for (name, kind) in [
        ("glrk1", ProjectionKind::None),
        ("glrk2", ProjectionKind::None),
        ("glrk1", ProjectionKind::Symmetric),
        ("glrk2", ProjectionKind::Symmetric),
        ("glrk2", ProjectionKind::Midpoint),
    ] {
        let t = tableaux::by_name(name).unwrap();
        let st = ProjectedStepper::new(
            &t,
            kind,
            ProjectionOptions::default(),
            SolverConfig::default(),
        )
        .unwrap();
        let fit = convergence_order(
            &sys,
            |h, n| {
                let out = integrate(&sys, &st, &q0, h, n)?;
                Ok(out.trajectory)
            },
            &h_list,
            t_end,
            &reference,
        )
        .unwrap();
        let s = |v: Option<f64>| v.map(|x| format!("{x:8.2}")).unwrap_or_else(|| "   floor".into());
        println!(
            "{:<22} {} {} {}",
            format!("{name}+{}", kind.as_str()),
            s(fit.solution_slope),
            s(fit.energy_slope),
            s(fit.momentum_slope)
        );
    }
}
