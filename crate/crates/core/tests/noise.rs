use proptest::prelude::*;
use tfspde_core::bench::McEstimate;
use tfspde_core::fem::{assemble, BoundaryCondition, CoefficientField, FemOperator, Mesh1D};
use tfspde_core::noise::{compensated_jump_term, sample_path, JumpSpec, MarkLaw, NoisePath, QWienerSpec, TimeGrid};

const SAMPLES: u64 = 10_000;

fn operator() -> FemOperator {
    assemble(&Mesh1D::uniform(0.0, 1.0, 32).unwrap(), &CoefficientField::constant(1.0, 0.0), BoundaryCondition::dirichlet())
        .unwrap()
}

fn wiener(n: usize) -> QWienerSpec {
    QWienerSpec::new(n, 1.0).unwrap()
}

fn jumps() -> JumpSpec {
    JumpSpec::sine_profile(2.0, MarkLaw::Uniform { lo: -0.5, hi: 0.5 }).unwrap()
}

#[test]
fn identical_inputs_give_identical_paths() {
    let grid = TimeGrid::new(1.0, 64).unwrap();
    let a = sample_path(&wiener(8), &jumps(), grid, 42, 5);
    let b = sample_path(&wiener(8), &jumps(), grid, 42, 5);
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    assert_ne!(a, sample_path(&wiener(8), &jumps(), grid, 42, 6));
    assert_ne!(a, sample_path(&wiener(8), &jumps(), grid, 43, 5));
}

#[test]
fn csv_dump_layout() {
    let grid = TimeGrid::new(1.0, 2).unwrap();
    let p = sample_path(&wiener(2), &JumpSpec::none(), grid, 1, 0);
    let csv = p.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "sample,interval,stream,index,value");
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[1].starts_with("0,0,0,1,"));
}

#[test]
fn kl_increment_energy_matches_trace() {
    // E Σ_i q_i Δβ_i² = Δt Σ q_i
    let q = wiener(16);
    let grid = TimeGrid::new(1.0, 8).unwrap();
    let mut per_interval = Vec::new();
    for s in 0..SAMPLES {
        let p = sample_path(&q, &JumpSpec::none(), grid, 2024, s);
        per_interval.push(p.wiener_increments(3).iter().map(|w| w * w).sum::<f64>());
    }
    let est = McEstimate::from_samples(&per_interval);
    assert!(est.within(grid.dt() * q.trace(), 3.0), "{est:?} vs {}", grid.dt() * q.trace());
}

#[test]
fn jump_counts_are_poisson_with_the_right_mean() {
    let grid = TimeGrid::new(1.0, 16).unwrap();
    let counts: Vec<f64> = (0..SAMPLES)
        .map(|s| sample_path(&wiener(0), &jumps(), grid, 99, s).total_jumps() as f64)
        .collect();
    let est = McEstimate::from_samples(&counts);
    assert!(est.within(2.0, 3.0), "{est:?}");
    // Poisson: variance equals the mean
    let var = est.stderr * est.stderr * SAMPLES as f64;
    assert!((var - 2.0).abs() < 0.15, "{var}");
}

#[test]
fn jump_times_fall_in_their_interval() {
    let grid = TimeGrid::new(2.0, 10).unwrap();
    for s in 0..200 {
        let p = sample_path(&wiener(0), &JumpSpec::sine_profile(20.0, MarkLaw::Normal { std: 1.0 }).unwrap(), grid, 3, s);
        for j in 0..10 {
            let events = p.jumps(j);
            assert!(events.windows(2).all(|w| w[0].time <= w[1].time));
            for e in events {
                assert!(e.time >= grid.time(j) && e.time < grid.time(j + 1));
            }
        }
    }
}

fn wiener_integral_nodes(op: &FemOperator, path: &NoisePath, modes: &[Vec<f64>]) -> Vec<f64> {
    let mut x = vec![0.0; op.mesh().n_nodes()];
    for j in 0..path.intervals() {
        for (mode, w) in modes.iter().zip(path.wiener_increments(j)) {
            for (xk, mk) in x.iter_mut().zip(mode) {
                *xk += w * mk;
            }
        }
    }
    x
}

#[test]
fn ito_isometry() {
    // E‖∫₀ᵀ dW‖² = T Σ q_i ‖P_h e_i‖²
    let op = operator();
    let q = wiener(8);
    let grid = TimeGrid::new(1.0, 4).unwrap();
    let modes: Vec<Vec<f64>> = (1..=8).map(|i| op.to_nodes(&op.l2_project(|x| q.eigenfunction(i, x)))).collect();
    let expected: f64 = modes.iter().enumerate().map(|(i, m)| q.eigenvalue(i + 1) * op.nodal_mass_norm(m).powi(2)).sum();
    let norms: Vec<f64> = (0..SAMPLES)
        .map(|s| {
            let p = sample_path(&q, &JumpSpec::none(), grid, 17, s);
            op.nodal_mass_norm(&wiener_integral_nodes(&op, &p, &modes)).powi(2)
        })
        .collect();
    let est = McEstimate::from_samples(&norms);
    assert!(est.within(expected, 3.0), "{est:?} vs {expected}");
}

#[test]
fn jump_isometry_and_martingale_mean() {
    // θ = θ₀ p: E‖∫∫ θ z Ñ‖² = T λ_J E[z²] θ₀² ‖p_h‖²
    let op = operator();
    let spec = JumpSpec::sine_profile(2.0, MarkLaw::Uniform { lo: -0.2, hi: 0.6 }).unwrap();
    let theta0 = 1.5;
    let grid = TimeGrid::new(1.0, 8).unwrap();
    let profile: Vec<f64> = op.mesh().nodes().iter().map(|&x| theta0 * (spec.profile)(x)).collect();
    let mean_term: Vec<f64> = profile.iter().map(|p| p * spec.compensator_rate()).collect();
    let mut norms = Vec::new();
    let mut mid_values = Vec::new();
    let mid = op.mesh().n_nodes() / 2;
    for s in 0..SAMPLES {
        let path = sample_path(&wiener(0), &spec, grid, 5, s);
        let mut total = vec![0.0; profile.len()];
        for j in 0..grid.intervals {
            let evals: Vec<Vec<f64>> = path.jumps(j).iter().map(|e| profile.iter().map(|p| e.mark * p).collect()).collect();
            let term = compensated_jump_term(&path, j, &evals, &mean_term).unwrap();
            for (t, v) in total.iter_mut().zip(term) {
                *t += v;
            }
        }
        norms.push(op.nodal_mass_norm(&total).powi(2));
        mid_values.push(total[mid]);
    }
    let expected = grid.horizon * spec.intensity * spec.mark_law.second_moment() * op.nodal_mass_norm(&profile).powi(2);
    let est = McEstimate::from_samples(&norms);
    assert!(est.within(expected, 3.0), "{est:?} vs {expected}");
    let centre = McEstimate::from_samples(&mid_values);
    assert!(centre.within(0.0, 3.0), "{centre:?}");
}

#[test]
fn symmetric_marks_cancel() {
    let path = {
        let mut s = 0;
        loop {
            let p = sample_path(&wiener(0), &JumpSpec::sine_profile(3.0, MarkLaw::Normal { std: 1.0 }).unwrap(), TimeGrid::new(1.0, 1).unwrap(), 0, s);
            if p.jumps(0).len() == 2 {
                break p;
            }
            s += 1;
        }
    };
    let g0 = [0.3, -0.7, 1.1];
    let evals: Vec<Vec<f64>> = [0.5, -0.5].iter().map(|z| g0.iter().map(|g| z * g).collect()).collect();
    let term = compensated_jump_term(&path, 0, &evals, &[0.0; 3]).unwrap();
    assert!(term.iter().all(|v| *v == 0.0));
}

#[test]
fn coarse_increments_have_summed_variance() {
    let q = wiener(1);
    let grid = TimeGrid::new(1.0, 64).unwrap();
    let xs: Vec<f64> = (0..SAMPLES)
        .map(|s| {
            let c = sample_path(&q, &JumpSpec::none(), grid, 8, s).coarsen(8).unwrap();
            c.beta_increment(2, 0).powi(2)
        })
        .collect();
    let est = McEstimate::from_samples(&xs);
    assert!(est.within(8.0 / 64.0, 3.0), "{est:?}");
}

#[test]
fn coarsening_edge_cases() {
    let grid = TimeGrid::new(1.0, 12).unwrap();
    let p = sample_path(&wiener(3), &jumps(), grid, 1, 1);
    assert_eq!(p.coarsen(1).unwrap(), p);
    assert!(p.coarsen(5).is_err());
    assert!(p.coarsen(0).is_err());
    let one = p.coarsen(12).unwrap();
    assert_eq!(one.intervals(), 1);
    assert_eq!(one.jumps(0).len(), p.total_jumps());
    for i in 0..3 {
        let direct: f64 = (0..12).map(|j| p.beta_increment(j, i)).sum();
        assert!((one.beta_increment(0, i) - direct).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coarsening_composes_bitwise(seed in any::<u64>(), f1 in 1usize..4, f2 in 1usize..4) {
        let m = 2 * 3 * 4 * 2;
        let grid = TimeGrid::new(1.0, m).unwrap();
        let p = sample_path(&wiener(4), &jumps(), grid, seed, 0);
        let f1 = [1, 2, 3, 4][f1 - 1];
        let f2 = [1, 2, 4][f2 - 1];
        prop_assume!(m % (f1 * f2) == 0);
        let twice = p.coarsen(f1).unwrap().coarsen(f2).unwrap();
        let once = p.coarsen(f1 * f2).unwrap();
        prop_assert_eq!(twice, once);
    }
}
