//! The fully discrete Mittag-Leffler exponential integrator
//!
//! `X_m = S₁h(t_m) X₀h + Σ_{j<m} (t_m − t_j)^{α−1} S₂h(t_m − t_j) [Δt P_h F(X_j) + P_h B(X_j) ΔW_j + P_h ∫G Ñ]`
//!
//! evaluated in the eigenbasis of `−A_h`, where every history term is a diagonal scaling.
//! Nonlinear coefficients act on nodal values and enter through `P_h I_h`, the projection of
//! their piecewise-linear interpolant.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::{assemble, BoundaryCondition, CoefficientField, FemOperator, Field, Mesh1D};
use crate::mlop::{MLPropagator, Modal, ModalScalar};
use crate::noise::{JumpSpec, MarkLaw, NoisePath, QWienerSpec, TimeGrid};
use crate::special::gamma_fn;
use crate::math;

/// Pointwise coefficient `(x, u) ↦ value`.
pub type NodalMap = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Scalar map `u ↦ value`.
pub type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sampled states used by the Lipschitz spot-check.
const LIPSCHITZ_PROBES: [f64; 9] = [-4.0, -1.5, -0.6, -0.1, 0.0, 0.2, 0.7, 1.9, 5.0];

/// Model data: order, horizon, coefficients, initial value and driving noise.
#[derive(Clone)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub horizon: f64,
    /// `f(x, u)` of `F(X)(x) = f(x, X(x))`
    pub drift: Option<NodalMap>,
    /// `b(x, u)` of `(B(X)w)(x) = b(x, X(x)) w(x)`
    pub diffusion: Option<NodalMap>,
    /// `g₀` of `G(z, X)(x) = z g₀(X(x)) p(x)` with `p` the jump profile
    pub jump_response: Option<ScalarMap>,
    pub initial: Field,
    pub lipschitz: f64,
    pub wiener: QWienerSpec,
    pub jumps: JumpSpec,
}

impl core::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("alpha", &self.alpha)
            .field("horizon", &self.horizon)
            .field("drift", &self.drift.is_some())
            .field("diffusion", &self.diffusion.is_some())
            .field("jump_response", &self.jump_response.is_some())
            .field("lipschitz", &self.lipschitz)
            .field("wiener", &self.wiener)
            .field("jumps", &self.jumps)
            .finish()
    }
}

fn sup_ratio(f: impl Fn(f64, f64) -> f64, xs: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &x in xs {
        for (k, &u) in LIPSCHITZ_PROBES.iter().enumerate() {
            for &v in &LIPSCHITZ_PROBES[k + 1..] {
                worst = worst.max((f(x, u) - f(x, v)).abs() / (u - v).abs());
            }
        }
    }
    worst
}

impl ProblemSpec {
    /// Checks the order and horizon, then spot-checks the declared Lipschitz constant:
    /// `|f(x,u) − f(x,v)|`, `|b(x,u) − b(x,v)|` and `(λ_J E[z²])^{1/2} sup|p| |g₀(u) − g₀(v)|`
    /// must all stay below `L |u − v|` on a fixed set of probe states and points of `[a, b]`.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.75 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {} outside (3/4, 1]", self.alpha)));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidParameter(format!("horizon T = {} must be positive", self.horizon)));
        }
        if !(self.lipschitz >= 0.0) || !self.lipschitz.is_finite() {
            return Err(Error::InvalidParameter(format!("Lipschitz constant {}", self.lipschitz)));
        }
        let (a, b) = (self.wiener.a, self.wiener.b);
        let xs: Vec<f64> = (0..=8).map(|k| a + (b - a) * k as f64 / 8.0).collect();
        let bound = self.lipschitz * (1.0 + 1e-9) + 1e-12;
        let check = |name: &str, ratio: f64| {
            if ratio > bound {
                Err(Error::InvalidParameter(format!(
                    "{name} has sampled Lipschitz ratio {ratio} above the declared L = {}",
                    self.lipschitz
                )))
            } else {
                Ok(())
            }
        };
        if let Some(f) = &self.drift {
            check("drift", sup_ratio(|x, u| f(x, u), &xs))?;
        }
        if let Some(g) = &self.diffusion {
            check("diffusion", sup_ratio(|x, u| g(x, u), &xs))?;
        }
        if let Some(g0) = &self.jump_response {
            let p_sup = xs.iter().map(|&x| (self.jumps.profile)(x).abs()).fold(0.0, f64::max);
            let scale = math::sqrt(self.jumps.intensity * self.jumps.mark_law.second_moment()) * p_sup;
            check("jump coefficient", scale * sup_ratio(|_, u| g0(u), &xs[..1]))?;
        }
        Ok(())
    }

    /// True when `F = B = G = 0`.
    pub fn is_linear(&self) -> bool {
        self.drift.is_none() && self.diffusion.is_none() && self.jump_response.is_none()
    }
}

/// Spatial data of a preset.
#[derive(Clone)]
pub struct SpatialSetup {
    pub coefficients: CoefficientField,
    pub bc: BoundaryCondition,
    pub a: f64,
    pub b: f64,
}

impl SpatialSetup {
    pub fn operator(&self, n_cells: usize) -> Result<FemOperator> {
        assemble(&Mesh1D::uniform(self.a, self.b, n_cells)?, &self.coefficients, self.bc)
    }
}

/// Shipped test problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// deterministic linear, `X₀ = sin πx`, Dirichlet, `D = 1`, `q = 0`
    P1,
    /// multiplicative Wiener noise, no jumps, advection `q = 2`
    P2,
    /// multiplicative Wiener noise and compensated jumps
    P3,
}

/// Default jump response `g₀(u) = clamp(u/2, −1, 1)`.
pub fn clamp_response(u: f64) -> f64 {
    (0.5 * u).clamp(-1.0, 1.0)
}

impl Preset {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "P1" | "p1" => Some(Preset::P1),
            "P2" | "p2" => Some(Preset::P2),
            "P3" | "p3" => Some(Preset::P3),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::P1 => "P1",
            Preset::P2 => "P2",
            Preset::P3 => "P3",
        }
    }

    pub fn advection(&self) -> f64 {
        match self {
            Preset::P2 => 2.0,
            _ => 0.0,
        }
    }

    pub fn problem(&self) -> ProblemSpec {
        let sine: Field = Arc::new(math::sin_pi);
        let base = ProblemSpec {
            alpha: 0.8,
            horizon: 1.0,
            drift: None,
            diffusion: None,
            jump_response: None,
            initial: sine,
            lipschitz: 0.0,
            wiener: QWienerSpec::new(0, 1.0).expect("valid"),
            jumps: JumpSpec::none(),
        };
        let drift: NodalMap = Arc::new(|_, u| math::sin(u));
        let diffusion: NodalMap = Arc::new(|_, u| 0.5 * u);
        match self {
            Preset::P1 => base,
            Preset::P2 => ProblemSpec {
                drift: Some(drift),
                diffusion: Some(diffusion),
                lipschitz: 1.0,
                wiener: QWienerSpec::new(16, 1.0).expect("valid"),
                ..base
            },
            Preset::P3 => ProblemSpec {
                drift: Some(drift),
                diffusion: Some(diffusion),
                jump_response: Some(Arc::new(clamp_response)),
                lipschitz: 1.0,
                wiener: QWienerSpec::new(16, 1.0).expect("valid"),
                jumps: JumpSpec::sine_profile(2.0, MarkLaw::Uniform { lo: -0.5, hi: 0.5 }).expect("valid"),
                ..base
            },
        }
    }

    pub fn spatial(&self) -> SpatialSetup {
        SpatialSetup {
            coefficients: CoefficientField::constant(1.0, self.advection()),
            bc: BoundaryCondition::dirichlet(),
            a: 0.0,
            b: 1.0,
        }
    }
}

/// Which steps a trajectory keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Record {
    All,
    Final,
    /// steps `0, k, 2k, …` and the final step
    Every(usize),
}

impl Record {
    fn keeps(&self, m: usize, last: usize) -> bool {
        match *self {
            Record::All => true,
            Record::Final => m == last,
            Record::Every(k) => m == last || (k > 0 && m % k == 0),
        }
    }
}

/// States `X^h_m` at the recorded steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<usize>,
    pub times: Vec<f64>,
    /// dof vectors
    pub states: Vec<Vec<f64>>,
    pub dt: f64,
    pub n_cells: usize,
    pub seed: u64,
    pub sample_index: u64,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("a trajectory records its final step")
    }
}

/// Times the propagator cache must hold before stepping on `grid`: every lag `kΔt`.
pub fn required_times(grid: &TimeGrid) -> Vec<f64> {
    grid.times()
}

/// Precomputed nodal data shared by all samples on one mesh.
pub struct Stepper<'a> {
    problem: &'a ProblemSpec,
    op: &'a FemOperator,
    propagator: &'a MLPropagator,
    x_nodes: Vec<f64>,
    /// nodal values of `P_h e_i`
    modes: Vec<Vec<f64>>,
    profile: Vec<f64>,
    initial: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(problem: &'a ProblemSpec, op: &'a FemOperator, propagator: &'a MLPropagator) -> Result<Self> {
        problem.validate()?;
        if propagator.n_dof() != op.n_dof() {
            return Err(Error::Dimension { expected: op.n_dof(), got: propagator.n_dof() });
        }
        if (propagator.alpha() - problem.alpha).abs() > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "propagator order {} differs from problem order {}",
                propagator.alpha(),
                problem.alpha
            )));
        }
        let x_nodes = op.mesh().nodes().to_vec();
        let q = problem.wiener;
        let modes = if problem.diffusion.is_some() {
            (1..=q.n_modes).map(|i| op.to_nodes(&op.l2_project(|x| q.eigenfunction(i, x)))).collect()
        } else {
            Vec::new()
        };
        let profile = x_nodes.iter().map(|&x| (problem.jumps.profile)(x)).collect();
        let initial = op.l2_project(|x| (problem.initial)(x));
        Ok(Self { problem, op, propagator, x_nodes, modes, profile, initial })
    }

    /// `X₀h = P_h X₀`
    pub fn initial_state(&self) -> &[f64] {
        &self.initial
    }

    /// Nodal values of the integrand of step `j` given the nodal state `u`:
    /// `Δt (f(x,u) + c₀u) + b(x,u) Σ √q_i Δβ_i (P_h e_i)(x) + Σ_k z_k g₀(u) p(x) − Δt λ_J E[z] g₀(u) p(x)`.
    fn increment_nodes(&self, u: &[f64], path: &NoisePath, j: usize, dt: f64) -> Vec<f64> {
        let p = self.problem;
        let c0 = self.op.shift();
        let mut g = vec![0.0; u.len()];
        if let Some(f) = &p.drift {
            for (k, gk) in g.iter_mut().enumerate() {
                *gk = dt * (f(self.x_nodes[k], u[k]) + c0 * u[k]);
            }
        } else if c0 != 0.0 {
            for (gk, &uk) in g.iter_mut().zip(u) {
                *gk = dt * c0 * uk;
            }
        }
        if let Some(b) = &p.diffusion {
            let dw = path.wiener_increments(j);
            for (k, gk) in g.iter_mut().enumerate() {
                let mut w = 0.0;
                for (mode, d) in self.modes.iter().zip(&dw) {
                    w += d * mode[k];
                }
                *gk += b(self.x_nodes[k], u[k]) * w;
            }
        }
        if let Some(g0) = &p.jump_response {
            // Σ_k z_k − Δt λ_J E[z] multiplies g₀(u) p(x) for this coefficient family
            let marks: f64 = path.jumps(j).iter().map(|e| e.mark).sum();
            let weight = marks - dt * p.jumps.compensator_rate();
            if weight != 0.0 {
                for (k, gk) in g.iter_mut().enumerate() {
                    *gk += weight * g0(u[k]) * self.profile[k];
                }
            }
        }
        g
    }

    /// Runs the scheme over the grid of `path`, keeping the steps selected by `record`.
    pub fn run(&self, path: &NoisePath, record: Record) -> Result<Trajectory> {
        let grid = path.grid;
        if (grid.horizon - self.problem.horizon).abs() > 1e-12 * self.problem.horizon {
            return Err(Error::GridMismatch(format!(
                "noise horizon {} differs from problem horizon {}",
                grid.horizon, self.problem.horizon
            )));
        }
        if self.problem.diffusion.is_some() && path.n_modes() != self.modes.len() {
            return Err(Error::GridMismatch(format!(
                "noise carries {} Wiener modes, problem expects {}",
                path.n_modes(),
                self.modes.len()
            )));
        }
        match self.propagator.modal::<f64>() {
            Some(m) => self.run_in(m, path, record),
            None => {
                let m = self.propagator.modal::<Complex64>().expect("basis is real or complex");
                self.run_in(m, path, record)
            }
        }
    }

    fn run_in<T: ModalScalar>(&self, modal: Modal<'_, T>, path: &NoisePath, record: Record) -> Result<Trajectory> {
        let grid = path.grid;
        let steps = grid.intervals;
        let dt = grid.dt();
        let alpha = self.problem.alpha;
        let n = self.op.n_dof();
        let linear = self.problem.is_linear() && self.op.shift() == 0.0;

        // lag kernels w_k = t_k^{α−1} E_{α,α}(−λ t_k^α) and free evolution E_{α,1}(−λ t_m^α)
        let mut kernels: Vec<Vec<T>> = Vec::with_capacity(steps + 1);
        let mut free: Vec<&[T]> = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            let t = grid.time(k);
            let (e1, e2) = modal.cached(t)?;
            free.push(e1);
            if k == 0 || linear {
                kernels.push(Vec::new());
            } else {
                let s = T::from_real(math::powf(t, alpha - 1.0));
                kernels.push(e2.iter().map(|&e| e * s).collect());
            }
        }

        let c0 = modal.to_modes(&self.initial);
        let mut history: Vec<Vec<T>> = Vec::with_capacity(if linear { 0 } else { steps });
        let mut out = Trajectory {
            steps: Vec::new(),
            times: Vec::new(),
            states: Vec::new(),
            dt,
            n_cells: self.op.mesh().n_cells(),
            seed: path.seed,
            sample_index: path.sample_index,
        };
        let mut state = self.initial.clone();
        let mut coeffs = vec![T::zero(); n];
        for m in 0..=steps {
            if m > 0 {
                for (c, (&a, &e)) in coeffs.iter_mut().zip(c0.iter().zip(free[m])) {
                    *c = a * e;
                }
                for (j, d) in history.iter().enumerate() {
                    let w = &kernels[m - j];
                    for ((c, &dk), &wk) in coeffs.iter_mut().zip(d).zip(w) {
                        *c += wk * dk;
                    }
                }
                state = modal.from_modes(&coeffs);
                if state.iter().any(|v| !v.is_finite()) {
                    return Err(Error::BlowUp { step: m });
                }
            }
            if record.keeps(m, steps) {
                out.steps.push(m);
                out.times.push(grid.time(m));
                out.states.push(state.clone());
            }
            if m < steps && !linear {
                let u = self.op.to_nodes(&state);
                let g = self.increment_nodes(&u, path, m, dt);
                history.push(modal.load_to_modes(&self.op.nodal_load(&g)));
            }
        }
        Ok(out)
    }
}

/// Runs the scheme for one noise path.
pub fn step_all(
    problem: &ProblemSpec,
    op: &FemOperator,
    propagator: &MLPropagator,
    path: &NoisePath,
    record: Record,
) -> Result<Trajectory> {
    Stepper::new(problem, op, propagator)?.run(path, record)
}

/// `S₁h(t) X₀h`, the semidiscrete solution of the linear problem.
pub fn reference_linear(problem: &ProblemSpec, op: &FemOperator, propagator: &MLPropagator, t: f64) -> Result<Vec<f64>> {
    // a Gårding shift turns into the drift c₀X, so the problem is no longer linear-free
    if !problem.is_linear() || op.shift() != 0.0 {
        return Err(Error::NotLinear);
    }
    let x0 = op.l2_project(|x| (problem.initial)(x));
    propagator.s1h_apply(t, &x0)
}

/// Outcome of the well-posedness smallness check.
#[derive(Debug, Clone, PartialEq)]
pub struct Advisory {
    pub value: f64,
    pub pass: bool,
    pub message: String,
}

/// `(9/2)(C₁α/Γ(1+α))² (L/γ) (1/(2α−1))^{1/2}` with `C₁ = 1` and `γ` the smallest real part
/// of the discrete spectrum. A surrogate only: the true constants are not computable, so
/// the result is advisory and never blocks a run.
pub fn wellposedness_advisory(problem: &ProblemSpec, gamma: f64) -> Advisory {
    let a = problem.alpha;
    let value = match gamma_fn(1.0 + a) {
        Ok(g) if gamma > 0.0 && 2.0 * a > 1.0 => {
            let c = a / g;
            4.5 * c * c * (problem.lipschitz / gamma) * math::sqrt(1.0 / (2.0 * a - 1.0))
        }
        _ => f64::INFINITY,
    };
    let pass = value < 1.0;
    let message = if pass {
        format!("well-posedness surrogate {value:.6} < 1 (C1 = 1, gamma = {gamma:.6})")
    } else {
        format!("WARNING: well-posedness surrogate {value:.6} >= 1 (C1 = 1, gamma = {gamma:.6}); uniqueness is not guaranteed by the smallness condition")
    };
    Advisory { value, pass, message }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn advisory_examples() {
        let mut p = Preset::P1.problem();
        let ok = wellposedness_advisory(&p, 9.87);
        assert_eq!(ok.value, 0.0);
        assert!(ok.pass);
        p.lipschitz = 1e6;
        let bad = wellposedness_advisory(&p, 9.87);
        assert!(!bad.pass && bad.message.starts_with("WARNING"));
    }

    #[test]
    fn presets_validate() {
        for p in [Preset::P1, Preset::P2, Preset::P3] {
            p.problem().validate().unwrap();
            assert_eq!(Preset::from_name(p.name()), Some(p));
        }
        assert!(Preset::P1.problem().is_linear());
    }

    #[test]
    fn lipschitz_spot_check_rejects_understated_constants() {
        let mut p = Preset::P2.problem();
        p.lipschitz = 0.9;
        assert!(p.validate().is_err());
        p.lipschitz = 1.0;
        p.diffusion = Some(Arc::new(|_, u| 3.0 * u));
        assert!(p.validate().is_err());
    }

    #[test]
    fn record_selection() {
        assert!(Record::Final.keeps(8, 8) && !Record::Final.keeps(0, 8));
        assert!(Record::Every(3).keeps(6, 8) && Record::Every(3).keeps(8, 8) && !Record::Every(3).keeps(7, 8));
    }
}
