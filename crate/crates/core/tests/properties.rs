//! Property tests for the solver, coefficient splitting, drift blocks
//! and configuration round trips.

use proptest::prelude::*;
use vprk::config::RunConfig;
use vprk::diagnostics::drift_estimate;
use vprk::nlsolve::{kahan_accumulate, newton_solve, SolverConfig};
use vprk::projections::{integrate, ProjectedStepper, ProjectionKind, ProjectionOptions};
use vprk::systems::{initial_momentum, rotator};
use vprk::tableaux::{self, split_coefficients};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_machine_part_is_the_correctly_rounded_parse(num in 1u32..100_000, den in 1u32..100_000) {
        // render num/den to 36 decimal digits by long division
        let mut digits = String::new();
        let int_part = num / den;
        digits.push_str(&int_part.to_string());
        digits.push('.');
        let mut rem = (num % den) as u64;
        for _ in 0..36 {
            rem *= 10;
            digits.push(char::from(b'0' + (rem / den as u64) as u8));
            rem %= den as u64;
        }
        let sc = split_coefficients(&digits).unwrap();
        let parsed: f64 = digits.parse().unwrap();
        prop_assert_eq!(sc.value, parsed);
        // the correction is below half an ulp of the value
        let ulp = f64::EPSILON * sc.value.abs().max(f64::MIN_POSITIVE);
        prop_assert!(sc.correction.abs() <= 0.5 * ulp * 1.0000001);
    }

    #[test]
    fn kahan_running_sum_tracks_exact_rationals(incs in proptest::collection::vec(-1000i32..1000, 1..200)) {
        // increments of the form k/64 are exact in binary; the Kahan sum
        // of exact values must be exact
        let (mut s, mut c) = (0.0, 0.0);
        let mut exact_num = 0i64;
        for k in &incs {
            (s, c) = kahan_accumulate(s, c, *k as f64 / 64.0);
            exact_num += *k as i64;
        }
        prop_assert_eq!(s + c, exact_num as f64 / 64.0);
    }

    #[test]
    fn drift_blocks_cover_the_series_maximum(values in proptest::collection::vec(-1e3f64..1e3, 10..500)) {
        let blocks = drift_estimate(&values, 10);
        let overall = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let block_max = blocks.iter().fold(0.0_f64, |m, v| m.max(*v));
        prop_assert_eq!(overall, block_max);
        prop_assert_eq!(blocks.len(), 10);
    }

    #[test]
    fn config_round_trip(
        problem_idx in 0usize..5,
        tableau_idx in 0usize..23,
        proj_idx in 0usize..5,
        h in 0.001f64..1.0,
        nsteps in 1usize..10_000,
        interval in 1usize..100,
    ) {
        let mut cfg = RunConfig::default();
        cfg.problem = vprk::config::problem_names()[problem_idx].to_string();
        cfg.tableau = vprk::tableaux::registry_names()[tableau_idx].clone();
        cfg.projection = ProjectionKind::all()[proj_idx];
        cfg.h = h;
        cfg.nsteps = nsteps;
        cfg.output_interval = interval;
        let round = RunConfig::parse(&cfg.serialize()).unwrap();
        prop_assert_eq!(round, cfg);
    }

    #[test]
    fn newton_is_deterministic_on_random_quadratics(
        a in 0.5f64..3.0,
        b in -2.0f64..2.0,
        x0 in -5.0f64..5.0,
    ) {
        let f = |x: &[f64], r: &mut [f64]| {
            r[0] = a * x[0] * x[0] + b * x[0] - 1.0;
        };
        let r1 = newton_solve(f, None, &[x0.abs() + 1.0], &SolverConfig::default());
        let r2 = newton_solve(f, None, &[x0.abs() + 1.0], &SolverConfig::default());
        match (r1, r2) {
            (Ok((x1, rep1)), Ok((x2, rep2))) => {
                prop_assert_eq!(x1, x2);
                prop_assert_eq!(rep1.residual_history, rep2.residual_history);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "nondeterministic outcome"),
        }
    }

    #[test]
    fn rotator_steps_preserve_norm_and_constraint(h in 0.01f64..0.3, s in 1usize..4) {
        // quadratic invariant and linear constraint survive any Gauss step
        let sys = rotator();
        let t = tableaux::gauss_legendre(s).unwrap();
        let z0 = initial_momentum(&sys, &[1.0, 0.0]).unwrap();
        let r = vprk::integrators::vprk_step(&sys, &t, &z0, h, &SolverConfig::default()).unwrap();
        let norm = (r.next.q[0].powi(2) + r.next.q[1].powi(2)).sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        prop_assert!(sys.constraint_inf_norm(&r.next) < 1e-12);
    }
}

#[test]
fn trajectories_are_bitwise_deterministic() {
    let sys = vprk::systems::point_vortices(0.1, 0.1);
    let t = tableaux::gauss_legendre(2).unwrap();
    let st = ProjectedStepper::new(
        &t,
        ProjectionKind::Symmetric,
        ProjectionOptions::default(),
        SolverConfig::default(),
    )
    .unwrap();
    let run = || {
        integrate(&sys, &st, &[1.0, 0.1, 1.0, -0.1], 0.1, 50)
            .unwrap()
            .trajectory
    };
    let (a, b) = (run(), run());
    for (sa, sb) in a.states.iter().zip(&b.states) {
        assert_eq!(sa.point.q, sb.point.q);
        assert_eq!(sa.point.p, sb.point.p);
        assert_eq!(sa.lambda, sb.lambda);
    }
}
