//! Output files. Every artifact is rendered in memory before anything touches the disk, so a
//! failed report leaves no partial output behind. Nothing written here carries a timestamp or
//! the worker count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tfspde_core::bench::{ErrorRecord, RateFit};
use tfspde_core::fem::FemOperator;
use tfspde_core::scheme::{Advisory, Trajectory};

use crate::config::RunConfig;
use crate::error::AppError;
use crate::experiment::{ExperimentOutcome, SolveOutcome};

pub const MANIFEST: &str = "manifest.json";
pub const TRAJECTORY: &str = "trajectory.csv";
pub const NOISE: &str = "noise.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvisoryEntry {
    /// `null` when the surrogate is unbounded
    pub value: Option<f64>,
    pub pass: bool,
    pub message: String,
}

impl From<&Advisory> for AdvisoryEntry {
    fn from(a: &Advisory) -> Self {
        Self { value: a.value.is_finite().then_some(a.value), pass: a.pass, message: a.message.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub n_cells: usize,
    pub steps: usize,
    pub dt: f64,
    pub sample_index: u64,
    pub recorded_steps: usize,
    pub final_mass_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordEntry {
    pub resolution: f64,
    pub error: f64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbortEntry {
    pub sample: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub kind: String,
    pub predicted_rate: f64,
    pub measured_rate: f64,
    pub slope_stderr: Option<f64>,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
    pub fitted_resolutions: Vec<f64>,
    pub excluded_finest: bool,
    pub records: Vec<RecordEntry>,
    pub aborted: Vec<AbortEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// SHA-256 of the canonical TOML of `config`
    pub config_hash: String,
    pub config: RunConfig,
    pub advisory: AdvisoryEntry,
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSummary>,
}

impl Manifest {
    fn new(command: &str, cfg: &RunConfig, advisory: &Advisory) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: cfg.seed,
            config_hash: cfg.hash(),
            config: cfg.model(),
            advisory: advisory.into(),
            outputs: Vec::new(),
            solve: None,
            convergence: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, AppError> {
        serde_json::from_str(text).map_err(|e| AppError::Parse(format!("manifest: {e}")))
    }

    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Rendered files, keyed by name relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub files: Vec<(String, String)>,
}

impl Report {
    fn assemble(mut manifest: Manifest, mut files: Vec<(String, String)>) -> Self {
        manifest.outputs = files.iter().map(|(n, _)| n.clone()).collect();
        manifest.outputs.push(MANIFEST.into());
        files.push((MANIFEST.into(), manifest.to_json()));
        Self { files }
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, AppError> {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, contents) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|e| AppError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// `t,node_index,x_coord,value` over every recorded step and every mesh node, boundary
/// nodes included.
pub fn trajectory_csv(op: &FemOperator, traj: &Trajectory) -> String {
    let nodes = op.mesh().nodes();
    let mut s = String::from("t,node_index,x_coord,value\n");
    for (t, state) in traj.times.iter().zip(&traj.states) {
        for (i, (x, v)) in nodes.iter().zip(op.to_nodes(state)).enumerate() {
            writeln!(s, "{t},{i},{x},{v}").expect("string write");
        }
    }
    s
}

pub fn records_csv(records: &[ErrorRecord]) -> String {
    let mut s = String::from("resolution,error,stderr,samples\n");
    for r in records {
        writeln!(s, "{},{},{},{}", r.resolution, r.error, r.stderr, r.samples).expect("string write");
    }
    s
}

/// Log-log plot of the errors with the fitted line and a line of the predicted slope
/// through the coarsest point.
pub fn convergence_svg(records: &[ErrorRecord], fit: &RateFit, predicted: f64, label: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const PAD: f64 = 60.0;
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.error > 0.0)
        .map(|r| (r.resolution.log10(), r.error.log10()))
        .collect();
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    if pts.is_empty() {
        writeln!(s, r#"<text x="{PAD}" y="{PAD}">all errors are zero</text>"#).unwrap();
        s.push_str("</svg>\n");
        return s;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let (x0, x1) = (x0.floor().min(x1.ceil() - 1.0), x1.ceil());
    let (y0, y1) = (y0.floor().min(y1.ceil() - 1.0), y1.ceil());
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let line = |s: &mut String, (ax, ay): (f64, f64), (bx, by): (f64, f64), style: &str| {
        writeln!(s, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#, px(ax), py(ay), px(bx), py(by)).unwrap();
    };
    line(&mut s, (x0, y0), (x1, y0), r#"stroke="black""#);
    line(&mut s, (x0, y0), (x0, y1), r#"stroke="black""#);
    for d in (x0 as i32)..=(x1 as i32) {
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">1e{d}</text>"#, px(d as f64), H - PAD + 18.0).unwrap();
    }
    for d in (y0 as i32)..=(y1 as i32) {
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">1e{d}</text>"#, PAD - 6.0, py(d as f64) + 4.0).unwrap();
    }
    // the fit lives in natural logs; base-10 coordinates share the slope
    let lo = pts.iter().map(|p| p.0).fold(f64::MAX, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::MIN, f64::max);
    let c = fit.intercept / std::f64::consts::LN_10;
    let clip = |y: f64| y.clamp(y0, y1);
    line(&mut s, (lo, clip(c + fit.slope * lo)), (hi, clip(c + fit.slope * hi)), r#"stroke="steelblue" stroke-width="2""#);
    let (cx, cy) = pts.iter().copied().fold((f64::MIN, 0.0), |a, p| if p.0 > a.0 { p } else { a });
    line(&mut s, (cx, cy), (lo, clip(cy + predicted * (lo - cx))), r#"stroke="gray" stroke-dasharray="6,4""#);
    for r in records.iter().filter(|r| r.error > 0.0) {
        let x = r.resolution.log10();
        let hi = (r.mean_squared() + r.stderr).sqrt().log10();
        let lo = (r.mean_squared() - r.stderr).max(r.mean_squared() * 1e-3).sqrt().log10();
        line(&mut s, (x, clip(lo)), (x, clip(hi)), r#"stroke="black""#);
        writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="firebrick"/>"#, px(x), py(r.error.log10())).unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14">{label}: fitted slope {:.3}, predicted {:.3}</text>"#,
        PAD,
        PAD - 20.0,
        fit.slope,
        predicted
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

pub fn solve_report(cfg: &RunConfig, outcome: &SolveOutcome) -> Report {
    let traj = &outcome.trajectory;
    let mut manifest = Manifest::new("solve", cfg, &outcome.advisory);
    manifest.solve = Some(SolveSummary {
        n_cells: traj.n_cells,
        steps: *traj.steps.last().expect("final step"),
        dt: traj.dt,
        sample_index: traj.sample_index,
        recorded_steps: traj.steps.len(),
        final_mass_norm: outcome.op.mass_norm(traj.final_state()),
    });
    let files = vec![(TRAJECTORY.into(), trajectory_csv(&outcome.op, traj)), (NOISE.into(), outcome.path.to_csv())];
    Report::assemble(manifest, files)
}

/// Builds the whole report for a convergence study. Fails before rendering anything when
/// there is nothing to report.
pub fn experiment_report(cfg: &RunConfig, command: &str, outcome: &ExperimentOutcome) -> Result<Report, AppError> {
    if outcome.records.is_empty() {
        return Err(AppError::Validation("no error records to report".into()));
    }
    let fit = &outcome.fit;
    let mut manifest = Manifest::new(command, cfg, &outcome.advisory);
    manifest.convergence = Some(ConvergenceSummary {
        kind: outcome.kind.name().into(),
        predicted_rate: outcome.predicted_rate,
        measured_rate: fit.slope,
        slope_stderr: fit.slope_stderr,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        residuals: fit.residuals.clone(),
        fitted_resolutions: fit.used.clone(),
        excluded_finest: fit.excluded_finest,
        records: outcome
            .records
            .iter()
            .map(|r| RecordEntry { resolution: r.resolution, error: r.error, stderr: r.stderr, samples: r.samples })
            .collect(),
        aborted: outcome.aborted.iter().map(|(s, m)| AbortEntry { sample: *s, reason: m.clone() }).collect(),
    });
    let stem = format!("convergence_{}", outcome.kind.name());
    let label = match outcome.kind.name() {
        "time" => "strong error vs step size",
        _ => "strong error vs mesh width",
    };
    let files = vec![
        (format!("{stem}.csv"), records_csv(&outcome.records)),
        (format!("{stem}.svg"), convergence_svg(&outcome.records, fit, outcome.predicted_rate, label)),
    ];
    Ok(Report::assemble(manifest, files))
}

/// Render and write a convergence report into `dir`.
pub fn emit_report(cfg: &RunConfig, command: &str, outcome: &ExperimentOutcome, dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    experiment_report(cfg, command, outcome)?.write(dir)
}
