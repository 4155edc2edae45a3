mod common;

use common::z_grid;
use proptest::prelude::*;
use tempus_core::{
    make_timescale, perturb, residual_first_order, residual_second_order, run_campaign, run_campaign_with,
    Coefficient, EquationSpec, Error, Execution, GridFunction, PerturbationKind, PerturbationSpec,
    TimeScaleFamily,
};

fn cc_equation() -> EquationSpec {
    EquationSpec::constant(&z_grid(0, 10), -3.0, 2.0, None, 1.0, 2.0).unwrap()
}

#[test]
fn families() {
    let u = make_timescale(&TimeScaleFamily::Uniform {
        a: 0.0,
        b: 5.0,
        h: 1.0,
    })
    .unwrap();
    assert_eq!(u.points(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    let q = make_timescale(&TimeScaleFamily::QScale {
        t0: 1.0,
        q: 2.0,
        n: 4,
    })
    .unwrap();
    assert_eq!(q.points(), &[1.0, 2.0, 4.0, 8.0]);
    let s = make_timescale(&TimeScaleFamily::Sample { a: 0.0, b: 1.0, n: 5 }).unwrap();
    assert_eq!(s.points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    let h = make_timescale(&TimeScaleFamily::Uniform {
        a: 0.0,
        b: 1.0,
        h: 0.1,
    })
    .unwrap();
    assert_eq!(h.len(), 11);

    let mixed = TimeScaleFamily::Mixed(vec![
        TimeScaleFamily::Uniform {
            a: 0.0,
            b: 1.0,
            h: 0.5,
        },
        TimeScaleFamily::QScale {
            t0: 2.0,
            q: 2.0,
            n: 3,
        },
    ]);
    assert_eq!(
        make_timescale(&mixed).unwrap().points(),
        &[0.0, 0.5, 1.0, 2.0, 4.0, 8.0]
    );
    let overlapping = TimeScaleFamily::Mixed(vec![
        TimeScaleFamily::Uniform {
            a: 0.0,
            b: 2.0,
            h: 1.0,
        },
        TimeScaleFamily::Points(vec![1.5, 3.0]),
    ]);
    assert_eq!(make_timescale(&overlapping), Err(Error::NonMonotone { index: 3 }));

    for bad in [
        TimeScaleFamily::Uniform {
            a: 0.0,
            b: 1.0,
            h: 0.0,
        },
        TimeScaleFamily::QScale {
            t0: 1.0,
            q: 1.0,
            n: 4,
        },
        TimeScaleFamily::QScale {
            t0: -1.0,
            q: 2.0,
            n: 4,
        },
        TimeScaleFamily::QScale {
            t0: 1.0,
            q: 2.0,
            n: 1,
        },
    ] {
        assert!(
            matches!(make_timescale(&bad), Err(Error::InvalidFamily(_))),
            "{bad:?}"
        );
    }
}

#[test]
fn zero_magnitude_is_identity() {
    let eq = cc_equation();
    let exact = eq.exact_solution().unwrap();
    for kind in [
        PerturbationKind::PointwiseUniform,
        PerturbationKind::SingleSpike,
        PerturbationKind::SmoothBump,
        PerturbationKind::ResidualTargeted,
    ] {
        let y = perturb(&exact, &PerturbationSpec::new(kind, 0.0, 3, false), &eq).unwrap();
        assert_eq!(y, exact);
    }
}

#[test]
fn spike_has_exact_height() {
    let eq = cc_equation();
    let exact = eq.exact_solution().unwrap();
    for seed in 0..50 {
        let spec = PerturbationSpec::new(PerturbationKind::SingleSpike, 0.125, seed, true);
        let y = perturb(&exact, &spec, &eq).unwrap();
        assert_eq!(y.sup_distance(&exact).unwrap(), 0.125);
        assert_eq!((y[0], y[1], y[10]), (exact[0], exact[1], exact[10]));
    }
}

#[test]
fn residual_targeted_hits_its_residual() {
    let eq = cc_equation();
    let exact = eq.exact_solution().unwrap();
    let (p, q, f) = eq.second_order_coefficients().unwrap();
    for seed in 0..20 {
        let spec = PerturbationSpec::new(PerturbationKind::ResidualTargeted, 0.01, seed, true);
        let y = perturb(&exact, &spec, &eq).unwrap();
        let r = residual_second_order(&y, &p, &q, &f).unwrap();
        assert!((r.value - 0.01).abs() <= 1e-12 * r.scale, "{r:?}");
        assert_eq!((y[0], y[1]), (exact[0], exact[1]));

        let half = perturb(
            &exact,
            &PerturbationSpec {
                magnitude: 0.005,
                ..spec
            },
            &eq,
        )
        .unwrap();
        let rh = residual_second_order(&half, &p, &q, &f).unwrap();
        assert!((rh.value / r.value - 0.5).abs() <= 1e-10);
    }
}

#[test]
fn residual_targeted_first_order() {
    let ts = z_grid(0, 20);
    let d = Coefficient::constant(&ts, -0.3).unwrap();
    let f = GridFunction::from_fn(&ts, |t| t.sin()).unwrap();
    let eq = EquationSpec::first_order(d.clone(), f.clone(), 1.0).unwrap();
    let exact = eq.exact_solution().unwrap();
    let spec = PerturbationSpec::new(PerturbationKind::ResidualTargeted, 0.02, 9, false);
    let y = perturb(&exact, &spec, &eq).unwrap();
    let r = residual_first_order(&y, &d, &f).unwrap();
    assert!((r.value - 0.02).abs() <= 1e-12 * r.scale);
    assert!((y[0] - exact[0]).abs() <= 0.02);
}

proptest! {
    #[test]
    fn pointwise_kinds_stay_within_magnitude(seed in any::<u64>(), m in 0.0f64..1.0, pin in any::<bool>()) {
        let eq = cc_equation();
        let exact = eq.exact_solution().unwrap();
        for kind in [PerturbationKind::PointwiseUniform, PerturbationKind::SmoothBump, PerturbationKind::SingleSpike] {
            let spec = PerturbationSpec::new(kind, m, seed, pin);
            let y = perturb(&exact, &spec, &eq).unwrap();
            // Offsets are exact; only the addition to x rounds.
            prop_assert!(y.sup_distance(&exact).unwrap() <= m + 4.0 * f64::EPSILON * exact.sup_norm());
            prop_assert_eq!(&y, &perturb(&exact, &spec, &eq).unwrap());
            if pin {
                prop_assert_eq!((y[0], y[1]), (exact[0], exact[1]));
            }
        }
    }
}

#[test]
fn negative_magnitude_rejected() {
    let eq = cc_equation();
    let exact = eq.exact_solution().unwrap();
    let spec = PerturbationSpec::new(PerturbationKind::PointwiseUniform, -1.0, 0, false);
    assert!(matches!(
        perturb(&exact, &spec, &eq),
        Err(Error::InvalidPerturbation(_))
    ));
}

#[test]
fn campaigns_are_schedule_independent() {
    let eq = EquationSpec::constant(
        &z_grid(0, 30),
        -3.0,
        2.0,
        Some(GridFunction::constant(&z_grid(0, 30), 1.0).unwrap()),
        0.5,
        0.5,
    )
    .unwrap();
    let spec = PerturbationSpec::new(PerturbationKind::ResidualTargeted, 1e-3, 100, true);
    let seq = run_campaign_with(&eq, &spec, 40, Execution::Sequential).unwrap();
    let par = run_campaign_with(&eq, &spec, 40, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    assert!(seq.all_pass());
    assert_eq!(seq.rows.first().unwrap().seed, 100);
    assert_eq!(seq.rows.last().unwrap().seed, 139);
    let worst = seq
        .rows
        .iter()
        .find(|r| r.empirical_constant == seq.max_empirical_constant)
        .unwrap();
    assert_eq!(worst.seed, seq.worst_trial_seed);
    assert_eq!(run_campaign(&eq, &spec, 40).unwrap(), seq);
}

#[test]
fn campaign_reports_failing_seed() {
    let ts = z_grid(0, 2);
    let spec = PerturbationSpec::new(PerturbationKind::SingleSpike, 0.1, 5, true);
    // Three points with two pinned leave no interior point for a spike.
    let eq = EquationSpec::constant(&ts, -3.0, 2.0, None, 1.0, 2.0).unwrap();
    let err = run_campaign(&eq, &spec, 3).unwrap_err();
    assert_eq!(err.seed, 5);
    assert!(matches!(err.source, Error::InvalidPerturbation(_)));

    let eq = EquationSpec::constant(&ts, 0.0, 1.0, None, 1.0, 2.0).unwrap();
    let spec = PerturbationSpec::new(PerturbationKind::PointwiseUniform, 0.1, 5, true);
    let err = run_campaign(&eq, &spec, 3).unwrap_err();
    assert!(err.source.is_hypothesis_violation());
}
