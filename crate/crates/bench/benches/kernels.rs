//! Benchmarks for the hot kernels: almost-period scans (tabulated and
//! direct), quadrature-backed evaluation, and the bounded-solution march.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use recurlab::neutral::{bounded_solution_on, DichotomyOptions, OdeSystem};
use recurlab::scan::{almost_period_set, ScanOptions};
use recurlab::{ProbeWindow, Signal, C64};

fn quasi_periodic() -> Signal {
    Signal::sin()
        .add(&Signal::trig_poly(vec![
            (C64::new(0.0, -0.5), 2f64.sqrt()),
            (C64::new(0.0, 0.5), -(2f64.sqrt())),
        ]))
        .unwrap()
}

fn bench_scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("almost_period_scan");
    group.sample_size(10);

    for (label, signal) in [
        ("sin", Signal::sin()),
        ("quasi_periodic", quasi_periodic()),
        ("aa_step", Signal::aa_step(recurlab::AaBranch::Phi)),
    ] {
        group.bench_with_input(BenchmarkId::new("range_800", label), &signal, |b, f| {
            let opts = ScanOptions::default();
            let window = ProbeWindow::symmetric(2.0);
            b.iter(|| almost_period_set(f, 0.25, &window, (0.0, 800.0), &opts).unwrap());
        });
    }

    // Quadrature-backed signal: the table fill dominates.
    let integral = Signal::cos().indefinite_integral(0.0);
    group.bench_function("integral_of_cos_range_800", |b| {
        let opts = ScanOptions::default();
        let window = ProbeWindow::symmetric(2.0);
        b.iter(|| almost_period_set(&integral, 0.25, &window, (0.0, 800.0), &opts).unwrap());
    });
    group.finish();
}

fn bench_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval");
    let pf = Signal::cos().indefinite_integral(0.0);
    pf.eval(100.0); // warm the checkpoint chain
    group.bench_function("integral_point", |b| {
        let mut t = 0.0f64;
        b.iter(|| {
            t = (t + 0.37) % 100.0;
            pf.eval(t)
        });
    });
    group.bench_function("integral_grid_10k", |b| {
        b.iter(|| pf.eval_grid(0.0, 0.01, 10_000));
    });
    group.finish();
}

fn bench_solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("bounded_solution");
    group.sample_size(10);
    let ode = OdeSystem::scalar(&[2.0, 3.0]);
    let forcing = quasi_periodic();
    group.bench_function("second_order_span_100", |b| {
        b.iter(|| {
            bounded_solution_on(&ode, &forcing, (-50.0, 50.0), &DichotomyOptions::default())
                .unwrap()
        });
    });
    group.finish();
}

criterion_group!(benches, bench_scans, bench_eval, bench_solver);
criterion_main!(benches);
