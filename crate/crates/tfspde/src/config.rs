//! TOML run configuration. Every table rejects unknown keys; missing keys fall back to the
//! preset defaults.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tfspde_core::noise::{JumpSpec, MarkLaw, QWienerSpec};
use tfspde_core::scheme::{Preset, ProblemSpec, SpatialSetup};
use tfspde_core::fem::CoefficientField;

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub problem: ProblemConfig,
    pub mesh: MeshConfig,
    pub noise: NoiseConfig,
    pub solve: SolveConfig,
    pub experiment: ExperimentConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            problem: ProblemConfig::default(),
            mesh: MeshConfig::default(),
            noise: NoiseConfig::default(),
            solve: SolveConfig::default(),
            experiment: ExperimentConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemConfig {
    pub preset: String,
    pub alpha: Option<f64>,
    pub horizon: Option<f64>,
    /// advection speed `q`; the preset value when absent
    pub advection: Option<f64>,
    pub diffusion: f64,
    pub lipschitz: Option<f64>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self { preset: "P1".into(), alpha: None, horizon: None, advection: None, diffusion: 1.0, lipschitz: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshConfig {
    pub n_cells: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { n_cells: 64 }
    }
}

/// Noise parameters; absent values keep the preset's.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub n_modes: Option<usize>,
    pub mode_decay: Option<f64>,
    pub jump_intensity: Option<f64>,
    /// `"uniform"` (with `mark_lo`, `mark_hi`) or `"normal"` (with `mark_std`)
    pub mark_law: Option<String>,
    pub mark_lo: Option<f64>,
    pub mark_hi: Option<f64>,
    pub mark_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub steps: usize,
    pub record_every: usize,
    pub sample_index: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { steps: 64, record_every: 1, sample_index: 0 }
    }
}

/// Ladders hold step counts for `converge-time` and cell counts for `converge-space`,
/// coarsest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub beta: f64,
    pub samples: usize,
    pub time_ladder: Vec<usize>,
    pub time_reference: usize,
    pub space_ladder: Vec<usize>,
    pub space_reference: usize,
    /// fixed step count of `converge-space`
    pub space_steps: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            beta: 2.0,
            samples: 32,
            time_ladder: vec![16, 32, 64, 128],
            time_reference: 1024,
            space_ladder: vec![8, 16, 32, 64],
            space_reference: 256,
            space_steps: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// Model objects built from a validated configuration.
pub struct Resolved {
    pub preset: Preset,
    pub problem: ProblemSpec,
    pub spatial: SpatialSetup,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, AppError> {
        toml::from_str(text).map_err(|e| AppError::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The configuration without the output location, which never affects results.
    pub fn model(&self) -> RunConfig {
        RunConfig { output: OutputConfig { dir: PathBuf::new() }, ..self.clone() }
    }

    /// SHA-256 of the canonical TOML form of [`RunConfig::model`].
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(&self.model()).expect("configuration serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn resolve(&self) -> Result<Resolved, AppError> {
        let invalid = |m: String| Err(AppError::Validation(m));
        let Some(preset) = Preset::from_name(&self.problem.preset) else {
            return invalid(format!("unknown preset {:?} (expected P1, P2 or P3)", self.problem.preset));
        };
        let mut problem = preset.problem();
        if let Some(a) = self.problem.alpha {
            problem.alpha = a;
        }
        if let Some(t) = self.problem.horizon {
            problem.horizon = t;
        }
        if let Some(l) = self.problem.lipschitz {
            problem.lipschitz = l;
        }
        let n = &self.noise;
        let q = problem.wiener;
        problem.wiener = QWienerSpec::new(n.n_modes.unwrap_or(q.n_modes), n.mode_decay.unwrap_or(q.mode_decay))
            .map_err(AppError::validation)?;
        let law = match n.mark_law.as_deref() {
            None => match (n.mark_lo, n.mark_hi, n.mark_std) {
                (None, None, None) => problem.jumps.mark_law,
                _ => return invalid("mark parameters given without mark_law".into()),
            },
            Some("uniform") => {
                if n.mark_std.is_some() {
                    return invalid("mark_std does not apply to a uniform mark law".into());
                }
                match (n.mark_lo, n.mark_hi) {
                    (Some(lo), Some(hi)) => MarkLaw::Uniform { lo, hi },
                    _ => return invalid("uniform mark law needs mark_lo and mark_hi".into()),
                }
            }
            Some("normal") => {
                if n.mark_lo.is_some() || n.mark_hi.is_some() {
                    return invalid("mark_lo/mark_hi do not apply to a normal mark law".into());
                }
                match n.mark_std {
                    Some(std) => MarkLaw::Normal { std },
                    None => return invalid("normal mark law needs mark_std".into()),
                }
            }
            Some(other) => return invalid(format!("unknown mark law {other:?} (expected uniform or normal)")),
        };
        let intensity = n.jump_intensity.unwrap_or(problem.jumps.intensity);
        problem.jumps = JumpSpec::new(intensity, law, problem.jumps.profile.clone()).map_err(AppError::validation)?;
        problem.validate().map_err(AppError::validation)?;

        let mut spatial = preset.spatial();
        let d = self.problem.diffusion;
        let q = self.problem.advection.unwrap_or(preset.advection());
        if !(d > 0.0 && d.is_finite() && q.is_finite()) {
            return invalid(format!("diffusion {d} must be positive and advection {q} finite"));
        }
        spatial.coefficients = CoefficientField::constant(d, q);
        if self.mesh.n_cells < 2 {
            return invalid(format!("mesh needs at least 2 cells, got {}", self.mesh.n_cells));
        }
        let e = &self.experiment;
        if !(0.0..=2.0).contains(&e.beta) {
            return invalid(format!("beta = {} outside [0, 2]", e.beta));
        }
        if e.samples == 0 {
            return invalid("experiment needs at least one sample".into());
        }
        if self.solve.steps == 0 || e.space_steps == 0 {
            return invalid("step counts must be positive".into());
        }
        Ok(Resolved { preset, problem, spatial })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::parse("sed = 1"), Err(AppError::Parse(_))));
        assert!(matches!(RunConfig::parse("[mesh]\ncells = 3"), Err(AppError::Parse(_))));
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn mark_law_validation() {
        let cfg = RunConfig::parse("[problem]\npreset = \"P3\"\n[noise]\nmark_law = \"normal\"\nmark_lo = 1.0").unwrap();
        assert!(matches!(cfg.resolve(), Err(AppError::Validation(_))));
        let cfg = RunConfig::parse("[problem]\npreset = \"P3\"\n[noise]\nmark_law = \"normal\"\nmark_std = 0.3").unwrap();
        assert_eq!(cfg.resolve().unwrap().problem.jumps.mark_law, MarkLaw::Normal { std: 0.3 });
    }

    #[test]
    fn hash_ignores_output_dir() {
        let mut a = RunConfig::default();
        let h = a.hash();
        a.output.dir = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), h);
        a.seed = 7;
        assert_ne!(a.hash(), h);
    }

    #[test]
    fn invalid_order_is_a_validation_error() {
        let cfg = RunConfig::parse("[problem]\nalpha = 0.5").unwrap();
        assert!(matches!(cfg.resolve(), Err(AppError::Validation(_))));
    }
}
