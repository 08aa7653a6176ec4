//! Hot-path benchmarks: expression jets, residual grids, warp
//! classification, and the RK4 integrators.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use biwarp_core::dynamics::{integrate_flow, integrate_geodesic};
use biwarp_core::expr::Point;
use biwarp_core::{
    classify_warps, default_instance, killing_residual, parse_expr, FamilyId, GridSpec,
    VarSet,
};

fn bench_expr_jets(c: &mut Criterion) {
    let field_vars = VarSet::field();
    let expr = parse_expr(
        "0.7*x1*sin(2*x2) - exp(0.3*x3)*cos(x1) + x2^2/(3 + x3^2)",
        &field_vars,
    )
    .unwrap();
    let p = Point { x1: 0.4, x2: -0.7, x3: 0.2 };
    c.bench_function("expr_jet1_mixed_terms", |b| {
        b.iter(|| black_box(&expr).jet1(black_box(p)).unwrap())
    });

    let warp_vars = VarSet::warp();
    let warp = parse_expr("2.5*exp(0.4*t) + 1/cosh(0.9*t)", &warp_vars).unwrap();
    c.bench_function("warp_jet2_univariate", |b| {
        b.iter(|| black_box(&warp).jet2(black_box(0.3)).unwrap())
    });
}

fn bench_killing_residual(c: &mut Criterion) {
    let inst = default_instance(FamilyId::T3D).unwrap();
    let grid = GridSpec::new(inst.validity.bounds(), [9, 9, 9]).unwrap();
    c.bench_function("killing_residual_9x9x9", |b| {
        b.iter(|| killing_residual(&inst.metric, &inst.field, black_box(&grid)).unwrap())
    });
}

fn bench_classify(c: &mut Criterion) {
    let vars = VarSet::warp();
    let f1 = parse_expr("exp(0.7*t)", &vars).unwrap();
    let f2 = parse_expr("1/cosh(1.3*t)", &vars).unwrap();
    c.bench_function("classify_warps_41_samples", |b| {
        b.iter(|| classify_warps(black_box(&f1), black_box(&f2), (-1.0, 1.0), 41, 1e-9).unwrap())
    });
}

fn bench_integrators(c: &mut Criterion) {
    let inst = default_instance(FamilyId::T3B).unwrap();
    let x0 = inst.validity.center();
    c.bench_function("flow_rk4_400_steps", |b| {
        b.iter_batched(
            || (inst.metric.clone(), inst.field.clone()),
            |(m, f)| integrate_flow(&m, &f, black_box(x0), 0.5, 400).unwrap(),
            BatchSize::SmallInput,
        )
    });

    let (w1, w2) = inst.metric.warp_jets(x0.x3).unwrap();
    let s = 0.5 / 3.0f64.sqrt();
    let v0 = [s * w1.value, s * w2.value, s * inst.metric.k3()];
    c.bench_function("geodesic_rk4_400_steps", |b| {
        b.iter(|| integrate_geodesic(&inst.metric, black_box(x0), v0, 1.0, 400).unwrap())
    });
}

criterion_group!(
    kernels,
    bench_expr_jets,
    bench_killing_residual,
    bench_classify,
    bench_integrators
);
criterion_main!(kernels);
