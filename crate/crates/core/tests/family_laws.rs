//! Structural laws tying the family constructors together: relabeling
//! symmetry, specialization identities between the equal-warp families and
//! their general counterparts, degenerate parameter values, and a randomized
//! parameter sweep over every family.

use biwarp_core::defaults::TOL_KILLING;
use biwarp_core::expr::{parse_expr, Point, VarSet};
use biwarp_core::families::list_required_params;
use biwarp_core::geometry::MetricSpec;
use biwarp_core::killing::{is_killing, killing_residual, GridSpec};
use biwarp_core::{build_family, FamilyId, FamilyInstance, FamilyParams, ParamReq};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params(pairs: &[(&str, f64)]) -> FamilyParams {
    let mut p = FamilyParams::new();
    for (name, value) in pairs {
        p = p.set(name, *value);
    }
    p
}

fn warp(src: &str) -> biwarp_core::expr::ScalarExpr {
    parse_expr(src, &VarSet::warp()).expect("warp source parses")
}

fn random_point_in(bounds: [[f64; 2]; 3], rng: &mut ChaCha8Rng) -> Point {
    Point::new(
        rng.random_range(bounds[0][0]..=bounds[0][1]),
        rng.random_range(bounds[1][0]..=bounds[1][1]),
        rng.random_range(bounds[2][0]..=bounds[2][1]),
    )
}

/// Relabeling x¹ ↔ x² (swap the warps, swap and transpose the components)
/// is an isometry, so it must send Killing fields to Killing fields.
#[test]
fn relabeling_axes_preserves_the_killing_property() {
    for id in FamilyId::ALL {
        let inst = biwarp_core::default_instance(id).unwrap();
        let swapped_metric = MetricSpec::new(
            inst.metric.f2().clone(),
            inst.metric.f1().clone(),
            inst.metric.k3(),
        )
        .unwrap();
        let swapped_field = inst.field.mirror_swap();
        let mut bounds = inst.validity.bounds();
        bounds.swap(0, 1);
        let grid = GridSpec::new(bounds, inst.validity.counts()).unwrap();
        let report = killing_residual(&swapped_metric, &swapped_field, &grid).unwrap();
        assert!(
            report.max_abs <= 1e-8,
            "{id}: relabeled residual {}",
            report.max_abs
        );
    }
}

fn assert_same_instance(label: &str, a: &FamilyInstance, b: &FamilyInstance) {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    assert_eq!(
        a.validity.bounds(),
        b.validity.bounds(),
        "{label}: validity boxes differ"
    );
    for _ in 0..25 {
        let p = random_point_in(a.validity.bounds(), &mut rng);
        let fa = [
            a.metric.f1().eval(p).unwrap(),
            a.metric.f2().eval(p).unwrap(),
        ];
        let fb = [
            b.metric.f1().eval(p).unwrap(),
            b.metric.f2().eval(p).unwrap(),
        ];
        for i in 0..2 {
            assert!(
                (fa[i] - fb[i]).abs() <= 1e-12 * (1.0 + fa[i].abs()),
                "{label}: warp {i} differs at {p:?}: {} vs {}",
                fa[i],
                fb[i]
            );
        }
        assert_eq!(a.metric.k3(), b.metric.k3(), "{label}: k3 differs");
        let va = a.field.values(p).unwrap();
        let vb = b.field.values(p).unwrap();
        for i in 0..3 {
            assert!(
                (va[i] - vb[i]).abs() <= 1e-12 * (1.0 + va[i].abs()),
                "{label}: component {i} differs at {p:?}: {} vs {}",
                va[i],
                vb[i]
            );
        }
    }
}

/// Every equal-warp family is the specialization of a general family, and
/// every demonstration configuration is a member of its parent family; the
/// corresponding constructors must produce identical instances.
#[test]
fn specializations_match_their_general_families() {
    let f = "exp(0.7 * t)";

    let c1a = build_family(
        FamilyId::C1A,
        &params(&[("c", 0.8), ("k3", 1.3)]).with_warp1(warp(f)),
    )
    .unwrap();
    let t1a = build_family(
        FamilyId::T1A,
        &params(&[("c", 0.8), ("k3", 1.3)])
            .with_warp1(warp(f))
            .with_warp2(warp(f)),
    )
    .unwrap();
    assert_same_instance("C1A = T1A on equal warps", &c1a, &t1a);

    let c2a = build_family(
        FamilyId::C2A,
        &params(&[("c", 0.8), ("k3", 1.3)]).with_warp1(warp(f)),
    )
    .unwrap();
    let t2a = build_family(
        FamilyId::T2A,
        &params(&[("c", 0.8), ("k3", 1.3)])
            .with_warp1(warp(f))
            .with_warp2(warp(f)),
    )
    .unwrap();
    assert_same_instance("C2A = T2A on equal warps", &c2a, &t2a);

    let c1b = build_family(
        FamilyId::C1B,
        &params(&[("c1", 1.1), ("c2", -0.4), ("k1", 2.5), ("k3", 0.9)]),
    )
    .unwrap();
    let t1b = build_family(
        FamilyId::T1B,
        &params(&[("c1", 1.1), ("c2", -0.4), ("k1", 2.5), ("k3", 0.9)])
            .with_warp2(warp("2.5")),
    )
    .unwrap();
    assert_same_instance("C1B = T1B with constant f2", &c1b, &t1b);

    let c2b = build_family(
        FamilyId::C2B,
        &params(&[("c1", -0.4), ("c2", 1.1), ("k1", 2.5), ("k3", 0.9)]),
    )
    .unwrap();
    let t2b = build_family(
        FamilyId::T2B,
        &params(&[("c1", -0.4), ("c2", 1.1), ("k2", 2.5), ("k3", 0.9)])
            .with_warp1(warp("2.5")),
    )
    .unwrap();
    assert_same_instance("C2B = T2B with constant f1", &c2b, &t2b);

    let c3a = build_family(
        FamilyId::C3A,
        &params(&[("c1", 0.3), ("c2", -0.6), ("k0", 1.2), ("k3", 0.8)]).with_warp1(warp(f)),
    )
    .unwrap();
    let t3c = build_family(
        FamilyId::T3C,
        &params(&[("c1", 0.3), ("c2", -0.6), ("k0", 1.2), ("c0", 1.0), ("k3", 0.8)])
            .with_warp1(warp(f)),
    )
    .unwrap();
    assert_same_instance("C3A = T3C with unit ratio", &c3a, &t3c);

    let c3b = build_family(
        FamilyId::C3B,
        &params(&[
            ("c", 0.9),
            ("c0", 1.4),
            ("k0", 0.6),
            ("cbar", 0.5),
            ("chat1", 0.2),
            ("chat2", -0.3),
            ("tau1", 0.0),
            ("tau2", 0.0),
            ("k3", 1.1),
        ]),
    )
    .unwrap();
    let t3d = build_family(
        FamilyId::T3D,
        &params(&[
            ("c", 0.9),
            ("c1", 1.4),
            ("c2", 1.4),
            ("k0", 0.6),
            ("cbar", 0.5),
            ("chat1", 0.2),
            ("chat2", -0.3),
            ("tau1", 0.0),
            ("tau2", 0.0),
            ("k3", 1.1),
        ]),
    )
    .unwrap();
    assert_same_instance("C3B = T3D with equal scales", &c3b, &t3d);

    let ex1 = build_family(
        FamilyId::EX1,
        &params(&[("c", 0.7), ("a1", 0.5), ("a2", 1.5), ("k3", 1.0)]),
    )
    .unwrap();
    let t1a_ex = build_family(
        FamilyId::T1A,
        &params(&[("c", 0.7), ("k3", 1.0)])
            .with_warp1(warp("exp(0.5 * t)"))
            .with_warp2(warp("exp(1.5 * t)")),
    )
    .unwrap();
    assert_same_instance("EX1 member of T1A", &ex1, &t1a_ex);

    let ex2 = build_family(
        FamilyId::EX2,
        &params(&[("c", 0.7), ("a1", 0.5), ("a2", 1.5), ("k3", 1.0)]),
    )
    .unwrap();
    let t2a_ex = build_family(
        FamilyId::T2A,
        &params(&[("c", 0.7), ("k3", 1.0)])
            .with_warp1(warp("exp(0.5 * t)"))
            .with_warp2(warp("exp(1.5 * t)")),
    )
    .unwrap();
    assert_same_instance("EX2 member of T2A", &ex2, &t2a_ex);

    let ex3 = build_family(
        FamilyId::EX3,
        &params(&[("c", 0.8), ("a1", 0.5), ("a2", 1.5), ("k3", 1.0)]),
    )
    .unwrap();
    let t3b_ex = build_family(
        FamilyId::T3B,
        &params(&[
            ("c", 0.8),
            ("c1", 1.0),
            ("c2", 1.0),
            ("cbar1", 0.5),
            ("cbar2", 1.5),
            ("chat1", 0.0),
            ("chat2", 0.0),
            ("k3", 1.0),
        ]),
    )
    .unwrap();
    assert_same_instance("EX3 member of T3B", &ex3, &t3b_ex);

    let ex4 = build_family(
        FamilyId::EX4,
        &params(&[("c", 0.8), ("a1", 0.7), ("a2", 1.6), ("k3", 1.0)]),
    )
    .unwrap();
    let t3d_ex = build_family(
        FamilyId::T3D,
        &params(&[
            ("c", 0.8),
            ("c1", 0.7),
            ("c2", 1.6),
            ("k0", 1.0),
            ("cbar", 1.0),
            ("chat1", 0.0),
            ("chat2", 0.0),
            ("tau1", 0.0),
            ("tau2", 0.0),
            ("k3", 1.0),
        ]),
    )
    .unwrap();
    assert_same_instance("EX4 member of T3D", &ex4, &t3d_ex);

    let ex5 = build_family(
        FamilyId::EX5,
        &params(&[("c", 0.8), ("k", 1.7), ("k0", 0.9), ("k3", 1.0)]),
    )
    .unwrap();
    let c3b_ex = build_family(
        FamilyId::C3B,
        &params(&[
            ("c", 0.8),
            ("c0", 1.7),
            ("k0", 0.9),
            ("cbar", 1.0),
            ("chat1", 0.0),
            ("chat2", 0.0),
            ("tau1", 0.0),
            ("tau2", 0.0),
            ("k3", 1.0),
        ]),
    )
    .unwrap();
    assert_same_instance("EX5 member of C3B", &ex5, &c3b_ex);

    let ex6 = build_family(
        FamilyId::EX6,
        &params(&[("c", 0.8), ("k", 1.3), ("k0", 0.9), ("k3", 1.0)]),
    )
    .unwrap();
    let c3b_ex6 = build_family(
        FamilyId::C3B,
        &params(&[
            ("c", 0.8),
            ("c0", 1.0),
            ("k0", 0.9),
            ("cbar", 1.3),
            ("chat1", 0.0),
            ("chat2", 0.0),
            ("tau1", 0.0),
            ("tau2", 0.0),
            ("k3", 1.0),
        ]),
    )
    .unwrap();
    assert_same_instance("EX6 member of C3B", &ex6, &c3b_ex6);
}

/// Setting every free parameter to zero lands on a degenerate but still
/// valid member of each family.
#[test]
fn degenerate_members_stay_killing() {
    for id in FamilyId::ALL {
        let mut p = FamilyParams::new();
        for spec in list_required_params(id) {
            let v = if spec.req == ParamReq::Free { 0.0 } else { spec.default };
            p = p.set(spec.name, v);
        }
        let inst = build_family(id, &p)
            .unwrap_or_else(|e| panic!("{id}: degenerate member rejected: {e}"));
        let verdict = is_killing(&inst.metric, &inst.field, &inst.validity, TOL_KILLING).unwrap();
        assert!(
            verdict.killing,
            "{id}: degenerate residual {}",
            verdict.report.max_abs
        );
    }
}

fn draw(req: ParamReq, rng: &mut ChaCha8Rng) -> f64 {
    match req {
        ParamReq::Free => rng.random_range(-1.5..=1.5),
        ParamReq::NonZero => {
            let v = rng.random_range(0.3..=1.8);
            if rng.random_bool(0.5) {
                v
            } else {
                -v
            }
        }
        ParamReq::Positive => rng.random_range(0.3..=1.8),
        ParamReq::Negative => -rng.random_range(0.3..=1.8),
        ParamReq::Fixed(v) => v,
    }
}

/// Randomly drawn admissible parameters always produce Killing fields, for
/// every family.
#[test]
fn random_parameters_stay_killing() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for id in FamilyId::ALL {
        for round in 0..5 {
            let mut p = FamilyParams::new();
            for spec in list_required_params(id) {
                p = p.set(spec.name, draw(spec.req, &mut rng));
            }
            match id {
                FamilyId::EX1 | FamilyId::EX2 | FamilyId::EX3 | FamilyId::EX4 => {
                    // The demonstration configurations need distinct rates.
                    let a1 = p.get("a1").unwrap();
                    let mut a2 = p.get("a2").unwrap();
                    if (a1 - a2).abs() < 0.1 {
                        a2 = a1 + 1.0;
                        if a2.abs() < 0.05 {
                            a2 = a1 - 1.0;
                        }
                    }
                    p = p.set("a2", a2);
                }
                FamilyId::T3D | FamilyId::C3B => {
                    // The drift terms require a vanishing rate; alternate
                    // between the two admissible regimes.
                    if round % 2 == 0 {
                        p = p.set("cbar", 0.0);
                    } else {
                        p = p.set("tau1", 0.0).set("tau2", 0.0);
                    }
                }
                _ => {}
            }
            let inst = build_family(id, &p)
                .unwrap_or_else(|e| panic!("{id} round {round}: rejected: {e}"));
            let verdict =
                is_killing(&inst.metric, &inst.field, &inst.validity, TOL_KILLING).unwrap();
            let shown: Vec<String> = p
                .names()
                .map(|n| format!("{n}={}", p.get(n).unwrap()))
                .collect();
            assert!(
                verdict.killing,
                "{id} round {round}: residual {} with {shown:?}",
                verdict.report.max_abs
            );
        }
    }
}
