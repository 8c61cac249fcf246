#![allow(clippy::excessive_precision)]

use tfspde_core::bench::{
    collect_records, fit_records, spatial_sample, t1h_diagnostic, temporal_sample, TemporalLadder,
};
use tfspde_core::fem::FemOperator;
use tfspde_core::mlop::MLPropagator;
use std::sync::Arc;

use tfspde_core::bench::McEstimate;
use tfspde_core::noise::{JumpSpec, QWienerSpec, TimeGrid};
use tfspde_core::scheme::{required_times, Preset, ProblemSpec, Stepper};

fn warmed(op: &FemOperator, alpha: f64, times: &[f64]) -> MLPropagator {
    let mut p = MLPropagator::from_operator(alpha, op).unwrap();
    p.warm(times).unwrap();
    p
}

#[test]
fn degenerate_ladder_has_zero_error() {
    let problem = Preset::P3.problem();
    let op = Preset::P3.spatial().operator(16).unwrap();
    let ladder = TemporalLadder::new(16, vec![16]).unwrap();
    let prop = warmed(&op, problem.alpha, &ladder.required_times(1.0).unwrap());
    let stepper = Stepper::new(&problem, &op, &prop).unwrap();
    for s in 0..4 {
        assert_eq!(temporal_sample(&problem, &stepper, &op, &ladder, 3, s).unwrap(), vec![0.0]);
    }
}

#[test]
fn temporal_errors_shrink_with_the_step() {
    let problem = Preset::P3.problem();
    let op = Preset::P3.spatial().operator(16).unwrap();
    let ladder = TemporalLadder::new(256, vec![8, 16, 32, 64]).unwrap();
    let prop = warmed(&op, problem.alpha, &ladder.required_times(1.0).unwrap());
    let stepper = Stepper::new(&problem, &op, &prop).unwrap();
    let rows = (0..16).map(|s| temporal_sample(&problem, &stepper, &op, &ladder, 21, s)).collect();
    let res: Vec<f64> = ladder.steps.iter().map(|&s| 1.0 / s as f64).collect();
    let collected = collect_records(&res, rows).unwrap();
    assert!(collected.aborted.is_empty());
    let fit = fit_records(&collected.records).unwrap();
    assert!(fit.slope > 0.0 && fit.slope_stderr.is_some(), "{fit:?}");
}

#[test]
fn spatial_errors_of_the_linear_problem() {
    let problem = Preset::P1.problem();
    let grid = TimeGrid::new(1.0, 4).unwrap();
    let times = required_times(&grid);
    let setup = Preset::P1.spatial();
    let reference_op = setup.operator(256).unwrap();
    let reference_prop = warmed(&reference_op, problem.alpha, &times);
    let reference_stepper = Stepper::new(&problem, &reference_op, &reference_prop).unwrap();
    let ops: Vec<FemOperator> = [8, 16, 32, 64].iter().map(|&n| setup.operator(n).unwrap()).collect();
    let props: Vec<MLPropagator> = ops.iter().map(|op| warmed(op, problem.alpha, &times)).collect();
    let steppers: Vec<Stepper<'_>> = ops.iter().zip(&props).map(|(o, p)| Stepper::new(&problem, o, p).unwrap()).collect();
    let coarse: Vec<(&FemOperator, &Stepper<'_>)> = ops.iter().zip(&steppers).collect();
    let sq = spatial_sample(&problem, &coarse, (&reference_op, &reference_stepper), grid, 0, 0).unwrap();
    // halving h never increases the error beyond a 5% band
    for w in sq.windows(2) {
        assert!(w[1].sqrt() <= 1.05 * w[0].sqrt());
    }
    let res: Vec<f64> = [8.0, 16.0, 32.0, 64.0].iter().map(|n| 1.0 / n).collect();
    let recs = collect_records(&res, vec![Ok(sq)]).unwrap().records;
    let fit = fit_records(&recs).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.2, "{}", fit.slope);
}

#[test]
fn t1h_diagnostic_behaviour() {
    let setup = Preset::P1.spatial();
    let alpha = 0.8;
    let t = 0.3;
    let fine = setup.operator(256).unwrap();
    let fine_prop = warmed(&fine, alpha, &[t, 50.0]);
    let v: Vec<f64> = fine_prop.decomposition().mode(0).iter().map(|c| c.re).collect();

    let same = t1h_diagnostic((&fine, &fine_prop), (&fine, &fine_prop), t, &v).unwrap();
    assert!(same < 1e-12, "{same}");

    let mut values = Vec::new();
    for n in [8, 16, 32, 64] {
        let op = setup.operator(n).unwrap();
        let prop = warmed(&op, alpha, &[t]);
        values.push(t1h_diagnostic((&op, &prop), (&fine, &fine_prop), t, &v).unwrap());
    }
    for w in values.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.25, "{values:?}");
    }

    let op = setup.operator(8).unwrap();
    let prop = warmed(&op, alpha, &[50.0]);
    let late = t1h_diagnostic((&op, &prop), (&fine, &fine_prop), 50.0, &v).unwrap();
    assert!(late < values[0]);
}

/// Additive noise on the first sine mode keeps the solution in the first discrete
/// eigenvector, where the coupled difference is `Σ_j (k(T − t_j) − k(T − t_J)) Δβ_j` with
/// `k(u) = u^{α−1} E_{α,α}(−μ_h u^α)`. Its variance is a finite kernel sum, evaluated in
/// 60-digit arithmetic for `h = 1/8`, `α = 0.8`, 1024 reference steps.
#[test]
fn coupled_error_of_additive_noise_matches_the_kernel_sum() {
    const EXACT: [(usize, f64); 4] = [
        (16, 0.045356156701472765869),
        (32, 0.024934408773746081892),
        (64, 0.011765824033204928776),
        (128, 0.0048416820233036407762),
    ];
    let problem = ProblemSpec {
        alpha: 0.8,
        horizon: 1.0,
        drift: None,
        diffusion: Some(Arc::new(|_, _| 1.0)),
        jump_response: None,
        initial: Arc::new(|_| 0.0),
        lipschitz: 0.0,
        wiener: QWienerSpec::new(1, 1.0).unwrap(),
        jumps: JumpSpec::none(),
    };
    problem.validate().unwrap();
    let op = Preset::P1.spatial().operator(8).unwrap();
    let ladder = TemporalLadder::new(1024, EXACT.iter().map(|e| e.0).collect()).unwrap();
    let prop = warmed(&op, problem.alpha, &ladder.required_times(1.0).unwrap());
    let stepper = Stepper::new(&problem, &op, &prop).unwrap();
    let mode_norm = op.mass_norm(&op.l2_project(|x| problem.wiener.eigenfunction(1, x))).powi(2);
    let rows: Vec<Vec<f64>> = (0..4000).map(|s| temporal_sample(&problem, &stepper, &op, &ladder, 77, s).unwrap()).collect();
    for (k, &(n, v)) in EXACT.iter().enumerate() {
        let xs: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        let est = McEstimate::from_samples(&xs);
        let want = mode_norm * v;
        assert!(est.within(want, 3.0), "{n} steps: {est:?} vs {want}");
    }
}
