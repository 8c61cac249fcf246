//! Built-in consistency checks. Each check is self-contained, deterministic and reports a
//! one-line detail; `run_all` is what `tfspde selftest` executes.

use std::f64::consts::PI;
use std::time::Instant;

use tfspde_core::bench::McEstimate;
use tfspde_core::fem::{assemble, BoundaryCondition, CoefficientField, FemOperator, Mesh1D};
use tfspde_core::linalg::{symmetric_eigen, Cholesky};
use tfspde_core::mlop::{quadrature_oracle, MLPropagator, Which};
use tfspde_core::noise::{compensated_jump_term, sample_path, JumpSpec, MarkLaw, NoisePath, QWienerSpec, TimeGrid};
use tfspde_core::scheme::{reference_linear, required_times, Preset, Record, Stepper};
use tfspde_core::special::{gamma_fn, mainardi_moment, ml_laplace_residual, mittag_leffler, MLParams};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "ok  " } else { "FAIL" };
        write!(f, "{tag} {:<28} {:>8.2}s  {}", self.name, self.seconds, self.detail)
    }
}

type Outcome = Result<String, String>;

fn timed(name: &'static str, body: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let r = body();
    let seconds = start.elapsed().as_secs_f64();
    match r {
        Ok(detail) => Check { name, pass: true, detail, seconds },
        Err(detail) => Check { name, pass: false, detail, seconds },
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn ml(alpha: f64, beta: f64, z: f64) -> Result<f64, String> {
    mittag_leffler(MLParams::new(alpha, beta).map_err(err)?, z).map_err(err)
}

/// `E_{1,1}(z) = e^z`, `E_{2,1}(−z²) = cos z`, `E_{1,2}(z) = (e^z − 1)/z` on `[−5, 5]`.
pub fn ml_reductions() -> Check {
    timed("ml_reductions", || {
        let mut worst = 0.0f64;
        for i in 0..=1000 {
            let z = -5.0 + 0.01 * i as f64;
            let exp_m1 = if z == 0.0 { 1.0 } else { z.exp_m1() / z };
            for (got, want, floor) in [
                (ml(1.0, 1.0, z)?, z.exp(), 0.0),
                (ml(2.0, 1.0, -z * z)?, z.cos(), 1e-13),
                (ml(1.0, 2.0, z)?, exp_m1, 0.0),
            ] {
                let e = (got - want).abs() / (want.abs() + floor);
                worst = worst.max(e);
            }
        }
        if worst <= 1e-10 {
            Ok(format!("worst relative error {worst:.2e}"))
        } else {
            Err(format!("worst relative error {worst:.2e} > 1e-10"))
        }
    })
}

/// `∫ θ^μ M_α(θ) dθ = Γ(1+μ)/Γ(1+αμ)`.
pub fn mainardi_moments() -> Check {
    timed("mainardi_moments", || {
        let mut worst = 0.0f64;
        for alpha in [0.6, 0.76, 0.8, 0.9] {
            for mu in [-0.5, 0.0, 0.5, 1.0, 2.0] {
                let want = gamma_fn(1.0 + mu).map_err(err)? / gamma_fn(1.0 + alpha * mu).map_err(err)?;
                let got = mainardi_moment(alpha, mu).map_err(err)?;
                worst = worst.max((got - want).abs() / want.abs());
            }
        }
        if worst <= 1e-6 {
            Ok(format!("worst relative error {worst:.2e}"))
        } else {
            Err(format!("worst relative error {worst:.2e} > 1e-6"))
        }
    })
}

/// Laplace transform of `t^{β−1} E_{α,β}(λt^α)` against `σ^{α−β}/(σ^α − λ)`.
pub fn laplace_identity() -> Check {
    timed("laplace_identity", || {
        let mut worst = 0.0f64;
        for (a, b, lambda, sigma) in
            [(1.0, 1.0, -1.0, 1.0), (0.8, 0.8, -1.0, 2.0), (0.8, 1.0, -3.0, 1.5), (0.9, 0.9, -10.0, 1.0), (0.76, 1.0, -0.5, 3.0)]
        {
            let r = ml_laplace_residual(MLParams::new(a, b).map_err(err)?, lambda, sigma).map_err(err)?;
            worst = worst.max(r);
        }
        if worst <= 1e-8 {
            Ok(format!("worst residual {worst:.2e}"))
        } else {
            Err(format!("worst residual {worst:.2e} > 1e-8"))
        }
    })
}

/// Forward differences of a completely monotone function alternate in sign:
/// `(−1)^k Δ_h^k f ≥ 0`. Checked to order 4 for `E_α(−x)` and `E_{α,α}(−x)`.
pub fn complete_monotonicity() -> Check {
    timed("complete_monotonicity", || {
        const H: f64 = 0.25;
        const N: usize = 160;
        let mut checked = 0;
        for alpha in [0.76, 0.8, 0.9, 1.0] {
            for beta in [1.0, alpha] {
                let f: Vec<f64> = (0..N + 5).map(|i| ml(alpha, beta, -H * i as f64)).collect::<Result<_, _>>()?;
                let mut diff = f;
                for k in 1..=4 {
                    diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    // allow a few ulps of the largest function value per difference order
                    let slack = 1e-15 * (1u32 << k) as f64;
                    if let Some((i, d)) = diff.iter().enumerate().find(|(_, d)| sign * **d < -slack) {
                        return Err(format!("E_({alpha},{beta}): order-{k} difference {d:e} at x = {}", H * i as f64));
                    }
                    checked += diff.len();
                }
            }
        }
        Ok(format!("{checked} differences of orders 1-4 have the right sign"))
    })
}

/// `t₂^a − t₁^a ≤ (t₂ − t₁)^a` for `0 ≤ t₁ < t₂`, `0 < a < 1`.
pub fn power_difference_bound() -> Check {
    timed("power_difference_bound", || {
        let starts = [0.0, 1e-9, 1e-6, 1e-3, 0.01, 0.3, 1.0, 5.0, 100.0];
        let gaps = [1e-12, 1e-9, 1e-4, 1e-2, 0.1, 0.5, 1.0, 10.0, 1e3];
        let exponents = [1e-3, 0.1, 0.25, 0.5, 0.6, 0.76, 0.8, 0.9, 0.999];
        let mut worst = f64::MIN;
        for &t1 in &starts {
            for &g in &gaps {
                for &a in &exponents {
                    let t2: f64 = t1 + g;
                    let lhs = t2.powf(a) - t1.powf(a);
                    let rhs = g.powf(a);
                    // rounding of t2 and the two powers
                    if lhs > rhs * (1.0 + 1e-12) + 4.0 * f64::EPSILON * t2.powf(a) {
                        return Err(format!("violated at t1 = {t1}, t2 = {t2}, a = {a}: {lhs} > {rhs}"));
                    }
                    worst = worst.max(lhs / rhs);
                }
            }
        }
        Ok(format!("{} triples, largest ratio {worst:.6}", starts.len() * gaps.len() * exponents.len()))
    })
}

fn operator(n_cells: usize, q: f64, bc: BoundaryCondition) -> Result<FemOperator, String> {
    let mesh = Mesh1D::uniform(0.0, 1.0, n_cells).map_err(err)?;
    assemble(&mesh, &CoefficientField::constant(1.0, q), bc).map_err(err)
}

/// Mass SPD, stiffness symmetric for `q = 0`, coercive symmetric part after the shift for
/// `q ≠ 0`, and the row sums of the pure Neumann matrices.
pub fn fem_structure() -> Check {
    timed("fem_structure", || {
        for q in [0.0, 10.0, -25.0] {
            let op = operator(32, q, BoundaryCondition::dirichlet())?;
            if !op.mass().is_symmetric() {
                return Err(format!("q = {q}: mass matrix not symmetric"));
            }
            Cholesky::factor(op.mass()).map_err(|e| format!("q = {q}: mass not SPD: {e}"))?;
            if q == 0.0 && !op.stiffness().is_symmetric() {
                return Err("diffusion-only stiffness not symmetric".into());
            }
            let (eig, _) = symmetric_eigen(&op.stiffness().symmetric_part()).map_err(err)?;
            let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
            if !(min > 0.0) {
                return Err(format!("q = {q}: symmetric part of the form has eigenvalue {min:e}"));
            }
        }
        let n = 20;
        let h = 1.0 / n as f64;
        let op = operator(n, 0.0, BoundaryCondition::neumann())?;
        for i in 0..op.n_dof() {
            let m: f64 = op.mass().row(i).iter().sum();
            let want = if i == 0 || i == op.n_dof() - 1 { h / 2.0 } else { h };
            if (m - want).abs() > 1e-14 {
                return Err(format!("mass row {i} sums to {m}, want {want}"));
            }
            let k: f64 = op.stiffness().row(i).iter().sum();
            if k.abs() > 1e-12 / h {
                return Err(format!("Neumann stiffness row {i} sums to {k:e}"));
            }
        }
        Ok("SPD mass, coercive shifted forms, exact row sums".into())
    })
}

/// Coarse increments are exact sums of fine ones; coarsening composes bitwise; splicing
/// after step `m` never changes the first `m` states.
pub fn noise_coupling() -> Check {
    timed("noise_coupling", || {
        let q = QWienerSpec::new(6, 1.0).map_err(err)?;
        let jumps = JumpSpec::sine_profile(4.0, MarkLaw::Uniform { lo: -0.5, hi: 0.5 }).map_err(err)?;
        let grid = TimeGrid::new(1.0, 64).map_err(err)?;
        for s in 0..16 {
            let fine = sample_path(&q, &jumps, grid, 11, s);
            for f in [2, 4, 8, 64] {
                let coarse = fine.coarsen(f).map_err(err)?;
                for j in 0..coarse.intervals() {
                    let merged: Vec<_> = (j * f..(j + 1) * f).flat_map(|k| fine.jumps(k).iter().copied()).collect();
                    if coarse.jumps(j) != merged.as_slice() {
                        return Err(format!("jumps of coarse interval {j} (factor {f}) differ"));
                    }
                    for i in 0..q.n_modes {
                        let sum: f64 = (j * f..(j + 1) * f).map(|k| fine.beta_increment(k, i)).sum();
                        if (coarse.beta_increment(j, i) - sum).abs() > 1e-14 {
                            return Err(format!("increment {i} of coarse interval {j} (factor {f}) is not the fine sum"));
                        }
                    }
                }
            }
            if fine.coarsen(2).and_then(|c| c.coarsen(4)).map_err(err)? != fine.coarsen(8).map_err(err)? {
                return Err("coarsening does not compose".into());
            }
        }

        let problem = Preset::P3.problem();
        let op = Preset::P3.spatial().operator(16).map_err(err)?;
        let grid = TimeGrid::new(problem.horizon, 16).map_err(err)?;
        let mut prop = MLPropagator::from_operator(problem.alpha, &op).map_err(err)?;
        prop.warm(&required_times(&grid)).map_err(err)?;
        let stepper = Stepper::new(&problem, &op, &prop).map_err(err)?;
        let a = sample_path(&problem.wiener, &problem.jumps, grid, 5, 0);
        let b = sample_path(&problem.wiener, &problem.jumps, grid, 5, 1);
        let ta = stepper.run(&a, Record::All).map_err(err)?;
        for cut in [1, 7, 15] {
            let tb = stepper.run(&a.splice(&b, cut).map_err(err)?, Record::All).map_err(err)?;
            if ta.states[..=cut] != tb.states[..=cut] {
                return Err(format!("states before interval {cut} depend on later noise"));
            }
        }
        Ok("exact coarse sums, composing coarsening, adapted stepping".into())
    })
}

fn node_vector_sum(paths: &[Vec<f64>], weights: &[f64], n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (p, w) in paths.iter().zip(weights) {
        for (xk, pk) in x.iter_mut().zip(p) {
            *xk += w * pk;
        }
    }
    x
}

/// Monte Carlo estimate of one noise moment next to its exact value.
#[derive(Debug, Clone, Copy)]
pub struct MomentCheck {
    pub label: &'static str,
    pub estimate: McEstimate,
    pub expected: f64,
}

impl MomentCheck {
    pub fn z_score(&self) -> f64 {
        (self.estimate.mean - self.expected) / self.estimate.stderr
    }
}

/// `E‖∫ dW_h‖² = T Σ q_i ‖P_h e_i‖²`, `E‖∫∫ θz Ñ‖² = T λ E[z²] ‖θ_h‖²` and the zero mean of
/// the compensated integral at the mid node, over `samples` paths.
pub fn noise_moments(samples: u64, seed: u64) -> Result<[MomentCheck; 3], String> {
    let op = operator(32, 0.0, BoundaryCondition::dirichlet())?;
    let n = op.mesh().n_nodes();
    let q = QWienerSpec::new(8, 1.0).map_err(err)?;
    let grid = TimeGrid::new(1.0, 4).map_err(err)?;
    let modes: Vec<Vec<f64>> = (1..=q.n_modes).map(|i| op.to_nodes(&op.l2_project(|x| q.eigenfunction(i, x)))).collect();
    let ito_expected: f64 =
        modes.iter().enumerate().map(|(i, m)| q.eigenvalue(i + 1) * op.nodal_mass_norm(m).powi(2)).sum::<f64>() * grid.horizon;
    // asymmetric marks, so the compensator does real work
    let spec = JumpSpec::sine_profile(3.0, MarkLaw::Uniform { lo: -0.2, hi: 0.6 }).map_err(err)?;
    let profile: Vec<f64> = op.mesh().nodes().iter().map(|&x| 1.5 * (spec.profile)(x)).collect();
    let mean_term: Vec<f64> = profile.iter().map(|p| p * spec.compensator_rate()).collect();
    let jump_expected = grid.horizon * spec.intensity * spec.mark_law.second_moment() * op.nodal_mass_norm(&profile).powi(2);

    let mid = n / 2;
    let (mut ito, mut jump, mut centre) = (Vec::new(), Vec::new(), Vec::new());
    for s in 0..samples {
        let path: NoisePath = sample_path(&q, &spec, grid, seed, s);
        let mut w = vec![0.0; n];
        let mut z = vec![0.0; n];
        for j in 0..grid.intervals {
            for (wk, v) in w.iter_mut().zip(node_vector_sum(&modes, &path.wiener_increments(j), n)) {
                *wk += v;
            }
            let evals: Vec<Vec<f64>> = path.jumps(j).iter().map(|e| profile.iter().map(|p| e.mark * p).collect()).collect();
            for (zk, v) in z.iter_mut().zip(compensated_jump_term(&path, j, &evals, &mean_term).map_err(err)?) {
                *zk += v;
            }
        }
        ito.push(op.nodal_mass_norm(&w).powi(2));
        jump.push(op.nodal_mass_norm(&z).powi(2));
        centre.push(z[mid]);
    }
    Ok([
        MomentCheck { label: "ito", estimate: McEstimate::from_samples(&ito), expected: ito_expected },
        MomentCheck { label: "jump", estimate: McEstimate::from_samples(&jump), expected: jump_expected },
        MomentCheck { label: "mean", estimate: McEstimate::from_samples(&centre), expected: 0.0 },
    ])
}

/// [`noise_moments`], each within three standard errors.
pub fn noise_isometries(samples: u64, seed: u64) -> Check {
    timed("noise_isometries", || {
        let moments = noise_moments(samples, seed)?;
        let ok = moments.iter().all(|m| m.estimate.within(m.expected, 3.0));
        let detail = moments
            .iter()
            .map(|m| format!("{} {:.5} vs {:.5} ({:+.2} s.e.)", m.label, m.estimate.mean, m.expected, m.z_score()))
            .collect::<Vec<_>>()
            .join(", ");
        if ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

/// Spectral propagators against the subordination quadrature on 16 dofs, `q ∈ {0, 10}`.
pub fn propagator_cross_validation() -> Check {
    timed("propagator_cross_check", || {
        let mut worst = 0.0f64;
        let times = [0.1, 0.5, 1.0];
        for q in [0.0, 10.0] {
            let op = operator(17, q, BoundaryCondition::dirichlet())?;
            let v = op.l2_project(|x| x * (1.0 - x) * (3.0 * x).exp() + 0.3 * (7.0 * PI * x).sin());
            for alpha in [0.76, 0.8, 0.9] {
                let mut p = MLPropagator::from_operator(alpha, &op).map_err(err)?;
                p.warm(&times).map_err(err)?;
                for t in times {
                    for which in [Which::S1, Which::S2] {
                        let spectral = p.apply(which, t, &v).map_err(err)?;
                        let oracle = quadrature_oracle(&op, alpha, t, &v, which).map_err(err)?;
                        let diff: Vec<f64> = spectral.iter().zip(&oracle).map(|(a, b)| a - b).collect();
                        worst = worst.max(op.mass_norm(&diff) / op.mass_norm(&oracle));
                    }
                }
            }
        }
        if worst <= 1e-6 {
            Ok(format!("worst relative difference {worst:.2e}"))
        } else {
            Err(format!("worst relative difference {worst:.2e} > 1e-6"))
        }
    })
}

/// The deterministic linear problem on 64 cells with `Δt = 1/64` follows the discrete
/// eigenmode `E_α(−μ_h t^α) X₀` at every step.
pub fn linear_exactness() -> Check {
    timed("linear_exactness", || {
        let problem = Preset::P1.problem();
        let op = Preset::P1.spatial().operator(64).map_err(err)?;
        let grid = TimeGrid::new(problem.horizon, 64).map_err(err)?;
        let mut prop = MLPropagator::from_operator(problem.alpha, &op).map_err(err)?;
        prop.warm(&required_times(&grid)).map_err(err)?;
        let stepper = Stepper::new(&problem, &op, &prop).map_err(err)?;
        let path = sample_path(&problem.wiener, &problem.jumps, grid, 0, 0);
        let traj = stepper.run(&path, Record::All).map_err(err)?;
        let x0 = &traj.states[0];
        let h = 1.0 / 64.0;
        // first eigenvalue of the P1 Laplacian pencil
        let mu = 6.0 / (h * h) * (1.0 - (PI * h).cos()) / (2.0 + (PI * h).cos());
        let scale = x0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut worst = 0.0f64;
        let mut worst_ref = 0.0f64;
        for (t, state) in traj.times.iter().zip(&traj.states) {
            let e = ml(problem.alpha, 1.0, -mu * t.powf(problem.alpha))?;
            let r = reference_linear(&problem, &op, &prop, *t).map_err(err)?;
            for ((s, x), rv) in state.iter().zip(x0).zip(&r) {
                worst = worst.max((s - e * x).abs() / scale);
                worst_ref = worst_ref.max((s - rv).abs() / scale);
            }
        }
        let detail = format!("{} steps, eigenmode deviation {worst:.2e}, reference deviation {worst_ref:.2e}", traj.steps.len() - 1);
        if worst <= 1e-12 && worst_ref <= 1e-12 {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

pub const SELFTEST_SAMPLES: u64 = 10_000;
pub const SELFTEST_SEED: u64 = 0;

pub fn run_all() -> Vec<Check> {
    vec![
        ml_reductions(),
        mainardi_moments(),
        laplace_identity(),
        complete_monotonicity(),
        power_difference_bound(),
        fem_structure(),
        noise_coupling(),
        noise_isometries(SELFTEST_SAMPLES, SELFTEST_SEED),
        propagator_cross_validation(),
        linear_exactness(),
    ]
}
