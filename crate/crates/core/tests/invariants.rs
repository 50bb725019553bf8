//! Property tests for the operator identities, scan-set laws, and solver
//! round trips.

use proptest::prelude::*;

use recurlab::linalg::CMat;
use recurlab::neutral::{bounded_solution_on, DichotomyOptions, OdeSystem};
use recurlab::quad::integrate;
use recurlab::scan::{almost_period_set, joint_tuple, metric_d, ScanOptions};
use recurlab::value::{sup_dist, sup_norm};
use recurlab::{ProbeWindow, Signal, C64};

fn term_strategy() -> impl Strategy<Value = (C64, f64)> {
    ((-1.0..1.0f64, -1.0..1.0f64), -5.0..5.0f64)
        .prop_map(|((re, im), omega)| (C64::new(re, im), omega))
}

fn trig_poly() -> impl Strategy<Value = Signal> {
    prop::collection::vec(term_strategy(), 1..4).prop_map(Signal::trig_poly)
}

/// Test-side reference integrator: composite 16-node Gauss–Legendre on fixed
/// panels, independent of the adaptive path under test.
fn reference_integral(f: &Signal, a: f64, b: f64) -> C64 {
    const NODES: [f64; 8] = [
        0.095_012_509_837_637_44,
        0.281_603_550_779_258_9,
        0.458_016_777_657_227_4,
        0.617_876_244_402_643_7,
        0.755_404_408_355_003,
        0.865_631_202_387_831_7,
        0.944_575_023_073_232_6,
        0.989_400_934_991_649_9,
    ];
    const WEIGHTS: [f64; 8] = [
        0.189_450_610_455_068_5,
        0.182_603_415_044_923_6,
        0.169_156_519_395_002_5,
        0.149_595_988_816_576_7,
        0.124_628_971_255_533_9,
        0.095_158_511_682_492_78,
        0.062_253_523_938_647_89,
        0.027_152_459_411_754_1,
    ];
    let panels = 64usize;
    let width = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            acc += (f.eval(mid + half * x)[0] + f.eval(mid - half * x)[0]) * (w * half);
        }
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // h·M_h f = Δ_h(P f): both sides are quadratures of f over [t, t+h].
    #[test]
    fn telescoping_identity(f in trig_poly(), h in 0.3..2.5f64, t in -6.0..6.0f64) {
        let tol = 10.0 * f.quad_tol();
        let mean = f.running_mean(h).unwrap();
        let moving = f.indefinite_integral(0.0).difference(h).unwrap();
        let lhs = mean.eval(t)[0] * h;
        let rhs = moving.eval(t)[0];
        prop_assert!((lhs - rhs).norm() <= tol, "|hM - dP| = {}", (lhs - rhs).norm());

        // Independent reference route.
        let oracle = reference_integral(&f, t, t + h);
        prop_assert!((rhs - oracle).norm() <= tol, "|dP - oracle| = {}", (rhs - oracle).norm());
    }

    // The running mean is the uniform limit of translate averages; the
    // sampled deviation decreases along n = 4, 16, 64.
    #[test]
    fn cesaro_identity_decreases(f in trig_poly(), k in 0.5..2.0f64) {
        let target = f.sub(&f.running_mean(k).unwrap()).unwrap();
        let deviation = |n: usize| -> f64 {
            let mut avg: Option<Signal> = None;
            for j in 1..=n {
                let part = f
                    .sub(&f.translate(k * j as f64 / n as f64))
                    .unwrap()
                    .scale(C64::new(1.0 / n as f64, 0.0));
                avg = Some(match avg {
                    None => part,
                    Some(acc) => acc.add(&part).unwrap(),
                });
            }
            let avg = avg.unwrap();
            let mut sup = 0.0f64;
            for i in 0..=40 {
                let t = -5.0 + 0.25 * i as f64;
                sup = sup.max(sup_dist(&target.eval(t), &avg.eval(t)));
            }
            sup
        };
        let d4 = deviation(4);
        let d16 = deviation(16);
        let d64 = deviation(64);
        prop_assert!(d16 <= d4 + 1e-9, "d4={d4} d16={d16}");
        prop_assert!(d64 <= d16 + 1e-9, "d16={d16} d64={d64}");
        prop_assert!(d64 <= 0.5 * d4 + 1e-6, "no decay: d4={d4} d64={d64}");
    }

    // Evaluation distributes over sums and scalar multiples bitwise.
    #[test]
    fn linearity_bitwise(f in trig_poly(), g in trig_poly(), re in -2.0..2.0f64, im in -2.0..2.0f64, t in -10.0..10.0f64) {
        let sum = f.add(&g).unwrap();
        prop_assert_eq!(sum.eval(t)[0], f.eval(t)[0] + g.eval(t)[0]);
        let c = C64::new(re, im);
        prop_assert_eq!(f.scale(c).eval(t)[0], c * f.eval(t)[0]);
    }

    // Nested translations merge, so composition is bit-exact.
    #[test]
    fn translation_composes(f in trig_poly(), a in -7.0..7.0f64, b in -7.0..7.0f64, t in -5.0..5.0f64) {
        let twice = f.translate(a).translate(b);
        let once = f.translate(a + b);
        prop_assert_eq!(twice.eval(t), once.eval(t));
    }

    // ε ≤ ε′ and K ⊇ K′ imply membership containment on the shared lattice.
    #[test]
    fn almost_period_sets_are_monotone(
        f in trig_poly(),
        eps in 0.05..0.4f64,
        factor in 1.0..3.0f64,
        shrink in 0.2..1.0f64,
    ) {
        let opts = ScanOptions { refine: false, ..ScanOptions::default() };
        let range = (0.0, 40.0);
        let big = ProbeWindow::symmetric(3.0);
        let small = ProbeWindow::symmetric(3.0 * shrink);
        let tight = almost_period_set(&f, eps, &big, range, &opts).unwrap();
        let loose = almost_period_set(&f, eps * factor, &small, range, &opts).unwrap();
        for m in &tight.members {
            prop_assert!(
                loose.members.binary_search_by(|x| x.partial_cmp(m).unwrap()).is_ok(),
                "member {m} missing after relaxing"
            );
        }
    }

    // Two almost-periods on the fattened window compose into a 2ε-period.
    #[test]
    fn shifts_compose_within_doubled_eps(f in trig_poly(), eps in 0.1..0.4f64) {
        let opts = ScanOptions { refine: false, ..ScanOptions::default() };
        let range = (0.0, 30.0);
        let window = ProbeWindow::symmetric(2.0);
        let fat = window.widened(range.1);
        let set = almost_period_set(&f, eps, &fat, range, &opts).unwrap();
        let samples = window.samples();
        let base: Vec<_> = samples.iter().map(|&t| f.eval(t)).collect();
        let n = set.members.len().min(4);
        for &t1 in set.members.iter().take(n) {
            for &t2 in set.members.iter().rev().take(n) {
                let tau = t1 + t2;
                let mut sup = 0.0f64;
                for (idx, &t) in samples.iter().enumerate() {
                    sup = sup.max(sup_dist(&f.eval(t + tau), &base[idx]));
                }
                prop_assert!(sup <= 2.0 * eps + 1e-12, "tau={tau}: sup {sup} > 2eps");
            }
        }
    }

    // Stacking intersects member sets exactly on the shared lattice.
    #[test]
    fn stacked_scan_is_intersection(f in trig_poly(), g in trig_poly(), eps in 0.1..0.5f64) {
        let opts = ScanOptions { refine: false, ..ScanOptions::default() };
        let range = (0.0, 30.0);
        let w = ProbeWindow::symmetric(2.0);
        let a = almost_period_set(&f, eps, &w, range, &opts).unwrap();
        let b = almost_period_set(&g, eps, &w, range, &opts).unwrap();
        let joint = joint_tuple(vec![f, g]).unwrap();
        let j = almost_period_set(&joint, eps, &w, range, &opts).unwrap();
        let expected: Vec<f64> = a
            .members
            .iter()
            .copied()
            .filter(|m| b.members.binary_search_by(|x| x.partial_cmp(m).unwrap()).is_ok())
            .collect();
        prop_assert_eq!(&j.members, &expected);
    }

    // The locally uniform metric is symmetric bitwise and satisfies the
    // triangle inequality up to rounding.
    #[test]
    fn metric_symmetry_and_triangle(f in trig_poly(), g in trig_poly(), h in trig_poly()) {
        let dfg = metric_d(&f, &g, 6).unwrap().value;
        let dgf = metric_d(&g, &f, 6).unwrap().value;
        prop_assert_eq!(dfg.to_bits(), dgf.to_bits());
        let dfh = metric_d(&f, &h, 6).unwrap().value;
        let dgh = metric_d(&g, &h, 6).unwrap().value;
        prop_assert!(dfh <= dfg + dgh + 1e-12);
        prop_assert!(dfg <= 1.0 + 1e-15);
    }

    // Scans are reproducible bit-for-bit.
    #[test]
    fn scans_are_deterministic(f in trig_poly(), eps in 0.05..0.5f64) {
        let opts = ScanOptions::default();
        let w = ProbeWindow::symmetric(2.0);
        let a = almost_period_set(&f, eps, &w, (0.0, 25.0), &opts).unwrap();
        let b = almost_period_set(&f, eps, &w, (0.0, 25.0), &opts).unwrap();
        prop_assert_eq!(&a.members, &b.members);
        prop_assert_eq!(a.max_gap.to_bits(), b.max_gap.to_bits());
        // Members satisfy the sampled criterion, and the recorded gap is
        // consistent with the member list.
        let samples = w.samples();
        let base: Vec<_> = samples.iter().map(|&t| f.eval(t)).collect();
        for &m in a.members.iter().take(5) {
            let mut sup = 0.0f64;
            for (idx, &t) in samples.iter().enumerate() {
                sup = sup.max(sup_dist(&f.eval(t + m), &base[idx]));
            }
            prop_assert!(sup <= eps + 1e-9, "member {m} violates criterion: {sup}");
        }
        prop_assert_eq!(a.max_gap.to_bits(), a.recompute_max_gap().to_bits());
    }
}

fn hyperbolic_ode(roots: &[C64]) -> OdeSystem {
    // Build y^{(n)} + Σ a_k y^{(k)} with the prescribed characteristic roots.
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    for &root in roots {
        let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= root * c;
        }
        coeffs = next;
    }
    // coeffs[k] multiplies λ^k; leading coefficient is 1.
    let blocks = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|&c| CMat::from_rows(1, 1, vec![c]))
        .collect();
    OdeSystem::new(roots.len(), 1, blocks).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // Forward-then-solve reproduces generator-built solutions.
    #[test]
    fn bounded_solve_round_trip(
        f in trig_poly(),
        re1 in 0.4..2.0f64,
        re2 in 0.4..2.0f64,
        sign in prop::bool::ANY,
        im in -1.0..1.0f64,
    ) {
        let r1 = C64::new(-re1, im);
        let r2 = C64::new(if sign { re2 } else { -re2 }, -im);
        let ode = hyperbolic_ode(&[r1, r2]);
        let forcing = ode.apply(&f).unwrap();
        let traj = bounded_solution_on(&ode, &forcing, (-8.0, 8.0), &DichotomyOptions::default())
            .unwrap();
        let mut worst = 0.0f64;
        for idx in 0..traj.len() {
            let t = traj.time(idx);
            worst = worst.max(sup_dist(traj.at(0, idx), &f.eval(t)));
        }
        prop_assert!(worst <= 2e-5, "round trip err {worst}");
        prop_assert!(traj.derivative_consistency() <= 1e-2);
    }

    // Character forcing solves to the inverse characteristic gain.
    #[test]
    fn eigenrelation(omega in -4.0..4.0f64, re1 in 0.4..2.0f64, re2 in 0.4..2.0f64) {
        let ode = hyperbolic_ode(&[C64::new(-re1, 0.3), C64::new(-re2, -0.7)]);
        let traj = bounded_solution_on(
            &ode,
            &Signal::character(omega),
            (-6.0, 6.0),
            &DichotomyOptions::default(),
        )
        .unwrap();
        let gain = ode.char_matrix(C64::new(0.0, omega)).inverse().unwrap()[(0, 0)];
        let mut worst = 0.0f64;
        for idx in 0..traj.len() {
            let t = traj.time(idx);
            worst = worst.max((traj.at(0, idx)[0] - gain * C64::cis(omega * t)).norm());
        }
        prop_assert!(worst <= 1e-5, "eigenrelation err {worst}");
    }

    // The adaptive integrator agrees with the reference rule on rough widths.
    #[test]
    fn quadrature_matches_reference(f in trig_poly(), a in -4.0..4.0f64, w in 0.1..3.0f64) {
        let fun = |t: f64| f.eval(t);
        let ours = integrate(&fun, a, a + w, 1e-10, 1)[0];
        let reference = reference_integral(&f, a, a + w);
        prop_assert!((ours - reference).norm() <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    // The dense-grid path agrees with pointwise evaluation: bitwise for
    // direct generators, within rounding for segment-summed integrals.
    #[test]
    fn grid_evaluation_matches_pointwise(f in trig_poly(), t0 in -5.0..5.0f64) {
        let grid = f.eval_grid(t0, 0.01, 400);
        for i in (0..400).step_by(37) {
            let direct = f.eval(t0 + i as f64 * 0.01);
            prop_assert_eq!(grid[i], direct[0]);
        }
        // Both routes carry their own quadrature error (the grid path sums
        // per-segment quadratures, the pointwise path one local quadrature),
        // so they agree within a couple of tolerances.
        let p = f.indefinite_integral(0.0);
        let grid = p.eval_grid(t0, 0.01, 400);
        for i in (0..400).step_by(23) {
            let direct = p.eval(t0 + i as f64 * 0.01);
            prop_assert!((grid[i] - direct[0]).norm() <= 2.0 * p.quad_tol(),
                "grid {} vs direct {}", grid[i], direct[0]);
        }
    }

    // Tabulated and direct scans accept the same shifts.
    #[test]
    fn tabulated_scan_matches_direct(f in trig_poly(), eps in 0.05..0.5f64) {
        let w = ProbeWindow::symmetric(2.0);
        let range = (0.0, 30.0);
        let tabulated = almost_period_set(&f, eps, &w, range, &ScanOptions::default()).unwrap();
        let direct_opts = ScanOptions { tabulate_limit: 0, ..ScanOptions::default() };
        let direct = almost_period_set(&f, eps, &w, range, &direct_opts).unwrap();
        prop_assert_eq!(&tabulated.members, &direct.members);
    }
}

#[test]
fn scan_members_identical_across_worker_pools() {
    let f = Signal::sin()
        .add(&Signal::trig_poly(vec![
            (C64::new(0.0, -0.5), 2f64.sqrt()),
            (C64::new(0.0, 0.5), -(2f64.sqrt())),
        ]))
        .unwrap();
    let run = || {
        almost_period_set(
            &f,
            0.3,
            &ProbeWindow::symmetric(3.0),
            (0.0, 120.0),
            &ScanOptions::default(),
        )
        .unwrap()
    };
    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = pool1.install(run);
    let b = pool4.install(run);
    assert_eq!(a.members, b.members);
    assert_eq!(a.max_gap.to_bits(), b.max_gap.to_bits());
}

#[test]
fn sampled_sup_norm_example() {
    // sup norm on stacked components is the max of the component sups.
    let st = Signal::stack(vec![Signal::sin(), Signal::cos().scale(C64::new(2.0, 0.0))]).unwrap();
    let w = ProbeWindow::symmetric(4.0);
    let sup = w
        .samples()
        .iter()
        .map(|&t| sup_norm(&st.eval(t)))
        .fold(0.0, f64::max);
    assert!((sup - 2.0).abs() < 1e-6);
}
