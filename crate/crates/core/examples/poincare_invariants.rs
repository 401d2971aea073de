//! Poincare integral invariants over an advected loop and surface in
//! the symmetric guiding-centre field: the canonical forms are
//! conserved by the unprojected method, the noncanonical forms by the
//! symmetric projection, the corrected (q, lambda) forms by the
//! symplectic projection; the standard projection drifts in all of
//! them.
//!
//! Run with: cargo run --release --example poincare_invariants

use vprk::diagnostics::{
    integrate_ensemble, loop_invariant_i1, seed_loop, seed_surface, surface_invariant_i2,
    InvariantForm, LoopEnsemble, SurfaceEnsemble,
};
use vprk::nlsolve::SolverConfig;
use vprk::projections::{ProjectedStepper, ProjectionKind, ProjectionOptions};
use vprk::systems::{guiding_centre, FieldSpec};
use vprk::tableaux;

fn main() {
    let sys = guiding_centre(FieldSpec::symmetric());
    let t = tableaux::by_name("glrk1").unwrap();
    let (h, nsteps, every) = (10.0, 100, 10);
    let cases = [
        (ProjectionKind::None, InvariantForm::Canonical),
        (ProjectionKind::Symmetric, InvariantForm::Noncanonical),
        (ProjectionKind::Symplectic, InvariantForm::Corrected),
        (ProjectionKind::Standard, InvariantForm::Noncanonical),
    ];
    println!("loop: 256 samples; surface: 32x32 Chebyshev grid; h = 10, 100 steps\n");
    println!(
        "{:<34} {:>13} {:>13}",
        "projection / form", "I1 variation", "I2 variation"
    );
    for (kind, form) in cases {
        let st = ProjectedStepper::new(
            &t,
            kind,
            ProjectionOptions::default(),
            SolverConfig::default(),
        )
        .unwrap();
        let loop_series =
            integrate_ensemble(&sys, &st, &seed_loop(256), h, nsteps, every).unwrap();
        let ens = LoopEnsemble::new(loop_series).unwrap();
        let i1 = loop_invariant_i1(&sys, &ens, form, h).unwrap();
        let surf_series =
            integrate_ensemble(&sys, &st, &seed_surface(31), h, nsteps, every).unwrap();
        let ens2 = SurfaceEnsemble::new(surf_series, 31).unwrap();
        let i2 = surface_invariant_i2(&sys, &ens2, form, h).unwrap();
        let rel = |v: &[f64]| {
            v.iter()
                .map(|x| (x - v[0]).abs() / v[0].abs())
                .fold(0.0_f64, f64::max)
        };
        println!(
            "{:<34} {:>13.3e} {:>13.3e}",
            format!("{} / {}", kind.as_str(), form.as_str()),
            rel(&i1),
            rel(&i2)
        );
    }
}
