//! Strong-error measurement on coupled noise paths and log-log rate fitting.
//!
//! The per-sample kernels ([`temporal_sample`], [`spatial_sample`]) are pure; the
//! caller decides how samples are scheduled and hands the results back in sample order to
//! [`collect_records`], so the reduction never depends on scheduling.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::FemOperator;
use crate::mlop::MLPropagator;
use crate::noise::{sample_path, TimeGrid};
use crate::scheme::{ProblemSpec, Record, Stepper};
use crate::math;

/// Mean of a sample population with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Sequential left-to-right accumulation. The standard error uses the unbiased
    /// variance and is zero for a single sample.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { mean: f64::NAN, stderr: f64::NAN, samples: 0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            math::sqrt(var / n as f64)
        } else {
            0.0
        };
        Self { mean, stderr, samples: n }
    }

    /// `|mean − expected| ≤ k · stderr`
    pub fn within(&self, expected: f64, k: f64) -> bool {
        (self.mean - expected).abs() <= k * self.stderr
    }
}

/// Strong error at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub resolution: f64,
    /// `(mean of ‖·‖²_M)^{1/2}`
    pub error: f64,
    /// standard error of the squared-error mean
    pub stderr: f64,
    pub samples: usize,
    /// per-sample `‖X_ref − X‖²_M`, in sample order
    pub squared_errors: Vec<f64>,
}

impl ErrorRecord {
    pub fn from_squared_errors(resolution: f64, squared_errors: Vec<f64>) -> Result<Self> {
        if squared_errors.is_empty() {
            return Err(Error::Empty("error record without samples"));
        }
        if squared_errors.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::InvalidParameter(format!("non-finite squared error at resolution {resolution}")));
        }
        let est = McEstimate::from_samples(&squared_errors);
        Ok(Self {
            resolution,
            error: math::sqrt(est.mean),
            stderr: est.stderr,
            samples: squared_errors.len(),
            squared_errors,
        })
    }

    pub fn mean_squared(&self) -> f64 {
        self.error * self.error
    }

    /// The squared-error mean is indistinguishable from zero at three standard errors.
    pub fn at_noise_floor(&self) -> bool {
        self.mean_squared() <= 3.0 * self.stderr
    }
}

/// Least-squares line through `(ln resolution, ln error)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
    /// delete-one-sample jackknife over the Monte Carlo samples, when available
    pub slope_stderr: Option<f64>,
    /// resolutions that entered the fit
    pub used: Vec<f64>,
    pub excluded_finest: bool,
}

impl RateFit {
    /// `slope − k·s.e. > 0`
    pub fn positive_at(&self, k: f64) -> bool {
        match self.slope_stderr {
            Some(se) => self.slope - k * se > 0.0,
            None => false,
        }
    }
}

/// `(slope, intercept, r², residuals)` of the least-squares line through `(x, y)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64, Vec<f64>)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::Empty("a line fit needs at least two points"));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all resolutions coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (intercept + slope * a)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((slope, intercept, r_squared, residuals))
}

/// Log-log fit of plain `(resolution, error)` pairs.
pub fn fit_points(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.iter().any(|&(r, e)| !(r > 0.0 && e > 0.0)) {
        return Err(Error::InvalidParameter("log-log fit needs positive resolutions and errors".into()));
    }
    let x: Vec<f64> = points.iter().map(|p| math::ln(p.0)).collect();
    let y: Vec<f64> = points.iter().map(|p| math::ln(p.1)).collect();
    let (slope, intercept, r_squared, residuals) = least_squares(&x, &y)?;
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        residuals,
        slope_stderr: None,
        used: points.iter().map(|p| p.0).collect(),
        excluded_finest: false,
    })
}

/// Fits the records, dropping the finest one when it sits at the noise floor. The slope
/// standard error is the delete-one-sample jackknife over the shared Monte Carlo samples,
/// which keeps the correlation between resolutions.
pub fn fit_records(records: &[ErrorRecord]) -> Result<RateFit> {
    if records.is_empty() {
        return Err(Error::Empty("no error records"));
    }
    let mut order: Vec<&ErrorRecord> = records.iter().collect();
    order.sort_by(|a, b| b.resolution.total_cmp(&a.resolution));
    let finest = order.last().expect("non-empty");
    let excluded_finest = order.len() > 2 && finest.at_noise_floor();
    if excluded_finest {
        order.pop();
    }
    let points: Vec<(f64, f64)> = order.iter().map(|r| (r.resolution, r.error)).collect();
    let mut fit = fit_points(&points)?;
    fit.excluded_finest = excluded_finest;

    let m = order[0].samples;
    if m > 1 && order.iter().all(|r| r.samples == m) {
        let x: Vec<f64> = points.iter().map(|p| math::ln(p.0)).collect();
        let sums: Vec<f64> = order.iter().map(|r| r.squared_errors.iter().sum()).collect();
        let mut slopes = Vec::with_capacity(m);
        for s in 0..m {
            let y: Vec<f64> = order
                .iter()
                .zip(&sums)
                .map(|(r, total)| 0.5 * math::ln((total - r.squared_errors[s]) / (m - 1) as f64))
                .collect();
            if y.iter().all(|v| v.is_finite()) {
                slopes.push(least_squares(&x, &y)?.0);
            }
        }
        if slopes.len() == m {
            let mean = slopes.iter().sum::<f64>() / m as f64;
            let ss: f64 = slopes.iter().map(|s| (s - mean) * (s - mean)).sum();
            fit.slope_stderr = Some(math::sqrt(ss * (m - 1) as f64 / m as f64));
        }
    }
    Ok(fit)
}

/// `min(αβ, 2 − 2α)/2`
pub fn predicted_temporal_rate(alpha: f64, beta: f64) -> f64 {
    (alpha * beta).min(2.0 - 2.0 * alpha) / 2.0
}

/// `β`
pub fn predicted_spatial_rate(beta: f64) -> f64 {
    beta
}

/// Resolution ladder of a temporal experiment, as step counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalLadder {
    pub reference_steps: usize,
    /// coarsest first
    pub steps: Vec<usize>,
}

impl TemporalLadder {
    /// Every ladder entry must divide the reference and be strictly coarser.
    pub fn new(reference_steps: usize, steps: Vec<usize>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Empty("empty resolution ladder"));
        }
        for w in steps.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter("ladder step counts must strictly increase".into()));
            }
        }
        for &s in &steps {
            if s == 0 || s > reference_steps || reference_steps % s != 0 {
                return Err(Error::Coarsen { factor: s, intervals: reference_steps });
            }
        }
        Ok(Self { reference_steps, steps })
    }

    /// Every time the propagator needs on any grid of the ladder.
    pub fn required_times(&self, horizon: f64) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for &s in self.steps.iter().chain([&self.reference_steps]) {
            out.extend(TimeGrid::new(horizon, s)?.times());
        }
        Ok(out)
    }
}

/// Squared final-time errors of every ladder entry for one sample: the reference run and
/// each coarse run share one fine noise path.
pub fn temporal_sample(
    problem: &ProblemSpec,
    stepper: &Stepper<'_>,
    op: &FemOperator,
    ladder: &TemporalLadder,
    seed: u64,
    sample_index: u64,
) -> Result<Vec<f64>> {
    let fine = TimeGrid::new(problem.horizon, ladder.reference_steps)?;
    let path = sample_path(&problem.wiener, &problem.jumps, fine, seed, sample_index);
    let reference = stepper.run(&path, Record::Final)?;
    let x_ref = reference.final_state();
    let mut out = Vec::with_capacity(ladder.steps.len());
    for &s in &ladder.steps {
        let coarse = path.coarsen(ladder.reference_steps / s)?;
        let traj = stepper.run(&coarse, Record::Final)?;
        let diff: Vec<f64> = x_ref.iter().zip(traj.final_state()).map(|(a, b)| a - b).collect();
        let e = op.mass_norm(&diff);
        out.push(e * e);
    }
    Ok(out)
}

/// Largest fraction of aborted samples an experiment tolerates.
pub const MAX_ABORT_FRACTION: f64 = 0.01;

/// Outcome of reducing per-sample results.
#[derive(Debug, Clone, PartialEq)]
pub struct Collected {
    pub records: Vec<ErrorRecord>,
    /// `(sample index, message)` of aborted samples
    pub aborted: Vec<(u64, String)>,
}

/// Fixed-order reduction of per-sample squared errors (one entry per resolution).
/// Aborted samples are dropped and listed; more than 1% aborted fails the experiment.
pub fn collect_records(resolutions: &[f64], per_sample: Vec<Result<Vec<f64>>>) -> Result<Collected> {
    let total = per_sample.len();
    let mut columns: Vec<Vec<f64>> = resolutions.iter().map(|_| Vec::with_capacity(total)).collect();
    let mut aborted = Vec::new();
    for (s, r) in per_sample.into_iter().enumerate() {
        match r {
            Ok(v) if v.len() == resolutions.len() => {
                for (c, e) in columns.iter_mut().zip(v) {
                    c.push(e);
                }
            }
            Ok(v) => return Err(Error::Dimension { expected: resolutions.len(), got: v.len() }),
            Err(e) => aborted.push((s as u64, format!("{e}"))),
        }
    }
    if aborted.len() as f64 > MAX_ABORT_FRACTION * total as f64 {
        return Err(Error::InvalidParameter(format!("{} of {total} samples aborted", aborted.len())));
    }
    let records = resolutions
        .iter()
        .zip(columns)
        .map(|(&r, c)| ErrorRecord::from_squared_errors(r, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(Collected { records, aborted })
}

/// Squared final-time errors of every coarse mesh for one sample. All meshes are driven by
/// the same noise path on `grid`; coarse solutions are interpolated onto the reference mesh
/// and the difference is measured in its L² norm.
pub fn spatial_sample(
    problem: &ProblemSpec,
    coarse: &[(&FemOperator, &Stepper<'_>)],
    reference: (&FemOperator, &Stepper<'_>),
    grid: TimeGrid,
    seed: u64,
    sample_index: u64,
) -> Result<Vec<f64>> {
    let path = sample_path(&problem.wiener, &problem.jumps, grid, seed, sample_index);
    let (ref_op, ref_stepper) = reference;
    let x_ref = ref_op.to_nodes(ref_stepper.run(&path, Record::Final)?.final_state());
    let mut out = Vec::with_capacity(coarse.len());
    for (op, stepper) in coarse {
        let x = stepper.run(&path, Record::Final)?;
        let fine = op.mesh().prolong(&op.to_nodes(x.final_state()), ref_op.mesh())?;
        let diff: Vec<f64> = x_ref.iter().zip(&fine).map(|(a, b)| a - b).collect();
        let e = ref_op.nodal_mass_norm(&diff);
        out.push(e * e);
    }
    Ok(out)
}

/// `‖S₁,fine(t) v − prolong(S₁,coarse(t) P_h v)‖_M` on the fine mesh.
pub fn t1h_diagnostic(
    coarse: (&FemOperator, &MLPropagator),
    fine: (&FemOperator, &MLPropagator),
    t: f64,
    v: &[f64],
) -> Result<f64> {
    let (cop, cprop) = coarse;
    let (fop, fprop) = fine;
    if cop.mesh().a() != fop.mesh().a() || cop.mesh().b() != fop.mesh().b() || cop.bc() != fop.bc() {
        return Err(Error::MeshMismatch("coarse and fine operators live on different domains".into()));
    }
    let sf = fprop.s1h_apply(t, v)?;
    let pv = cop.project_from(fop, v)?;
    let sc = cprop.s1h_apply(t, &pv)?;
    let prolonged = cop.mesh().prolong(&cop.to_nodes(&sc), fop.mesh())?;
    let diff: Vec<f64> = fop.to_nodes(&sf).iter().zip(&prolonged).map(|(a, b)| a - b).collect();
    Ok(fop.nodal_mass_norm(&diff))
}
