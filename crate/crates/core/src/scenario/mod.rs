//! Config-driven scenarios: parse, validate, execute, and write artifacts.
//!
//! A scenario is a TOML document (schema in `docs/scenario-schema.md`)
//! naming one model, one evolution config, optional scans and the analyses
//! to run. Execution is pure: every artifact is built in memory first and
//! only then written, each file through a temporary name and a rename.

mod bundled;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{
    conditioned_energy_deficit, conservation_audit, energy_ledger, golden_rule_fit, initial_state, output,
    run_scan, signature_report, simulate, transition_probability, validate_scan, AnalysisError, AxisSpec,
    ConservationAudit, DeficitReport, GoldenRuleFit, LedgerSummary, ScanAxis, ScanResult, SignatureReport,
    SignatureTolerances, Target, MIN_CONDITIONING_PROBABILITY,
};
use crate::constants::{ConstantsError, ConstantsTable};
use crate::dynamics::{DynamicsError, EvolutionConfig};
use crate::hilbert::{CoherentSpec, HERMITIAN_TOL};
use crate::models::{
    gravito_classical_params_with, gravito_vacuum_coupling_with, gw_energy_density_with, GravitoMapping, ModelError,
    ModelSpec,
};

pub use bundled::{bundled, find_bundled, BundledScenario};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.json";
pub const LEDGER_FILE: &str = "ledger.csv";
pub const PROBABILITY_FILE: &str = "probability.csv";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("config does not match the schema: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error("analysis failed: {0}")]
    Analysis(AnalysisError),
    #[error("cannot write artifacts: {0}")]
    Write(#[from] io::Error),
}

impl ScenarioError {
    /// Process exit code: 2 for invalid input, 3 for numerical aborts, 1 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Analysis(e) if e.is_numerical_abort() => 3,
            ScenarioError::Analysis(AnalysisError::ConditioningTooSmall { .. }) => 3,
            ScenarioError::Write(_) => 1,
            _ => 2,
        }
    }
}

impl From<AnalysisError> for ScenarioError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Model(m) => ScenarioError::Invalid(m.to_string()),
            AnalysisError::Dynamics(DynamicsError::Config(m)) => ScenarioError::Invalid(m),
            AnalysisError::Axis(m) => ScenarioError::Invalid(m),
            other => ScenarioError::Analysis(other),
        }
    }
}

impl From<ModelError> for ScenarioError {
    fn from(e: ModelError) -> Self {
        ScenarioError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisBlock {
    #[serde(default = "yes")]
    pub ledger: bool,
    #[serde(default)]
    pub deficit: bool,
    /// Requires detuning, intensity and time scans.
    #[serde(default)]
    pub signature: bool,
    #[serde(default)]
    pub signature_tolerances: SignatureTolerances,
    /// Requires a peak_detuning scan.
    #[serde(default)]
    pub golden_rule_fit: bool,
}

fn yes() -> bool {
    true
}

impl Default for AnalysisBlock {
    fn default() -> Self {
        Self {
            ledger: true,
            deficit: false,
            signature: false,
            signature_tolerances: SignatureTolerances::default(),
            golden_rule_fit: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Used when the command line gives no output directory.
    #[serde(default)]
    pub directory: Option<PathBuf>,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
}

fn all_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: None,
            formats: all_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub model: ModelSpec,
    pub evolution: EvolutionConfig,
    /// Defaults to the detector's first excited level.
    #[serde(default)]
    pub target: Option<Target>,
    #[serde(default)]
    pub scan: Vec<AxisSpec>,
    #[serde(default)]
    pub analysis: AnalysisBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

/// Command-line overrides of the evolution block.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(dt) = o.dt {
            self.evolution.dt = dt;
        }
        if let Some(t) = o.t_max {
            self.evolution.t_max = t;
        }
    }

    pub fn target(&self) -> Target {
        self.target.unwrap_or_else(|| Target::default_for(&self.model))
    }

    fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }

    /// Schema-level and physics-domain checks, without evolving anything.
    /// Returns the model with gravitational-wave parameters resolved.
    pub fn validate(&self, constants: &ConstantsTable) -> Result<ModelSpec, ScenarioError> {
        let invalid = |m: String| Err(ScenarioError::Invalid(m));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return invalid(format!("name {:?} must be non-empty ASCII letters, digits, '_' or '-'", self.name));
        }
        if self.output.formats.is_empty() {
            return invalid("output.formats must name at least one format".into());
        }
        self.model.validate()?;
        let model = self.model.resolve(constants)?;
        model.validate()?;
        self.evolution.validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        let psi0 = initial_state(&model)?;
        self.target().locate(psi0.space())?;

        let mut axes = Vec::new();
        for spec in &self.scan {
            if axes.contains(&spec.axis) {
                return invalid(format!("more than one {} scan", spec.axis));
            }
            axes.push(spec.axis);
            validate_scan(&model, &self.evolution, self.target(), spec.axis, &spec.values()?)?;
        }
        if self.analysis.signature {
            for needed in [ScanAxis::Detuning, ScanAxis::Intensity, ScanAxis::Time] {
                if !axes.contains(&needed) {
                    return invalid(format!("analysis.signature needs a {needed} scan"));
                }
            }
        }
        if self.analysis.golden_rule_fit && !axes.contains(&ScanAxis::PeakDetuning) {
            return invalid("analysis.golden_rule_fit needs a peak_detuning scan".into());
        }
        let t = &self.analysis.signature_tolerances;
        if !(t.intensity_slope > 0.0 && t.gap > 0.0 && t.t_min > 0.0) {
            return invalid("signature tolerances must be positive".into());
        }
        Ok(model)
    }
}

/// Read a scenario from a file path, or from the bundled set when no such
/// file exists and the argument names a bundled scenario.
pub fn load(source: &str) -> Result<(ScenarioConfig, String), ScenarioError> {
    let path = Path::new(source);
    let text = if path.exists() {
        fs::read_to_string(path).map_err(|e| ScenarioError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
    } else if let Some(b) = find_bundled(source) {
        b.text.to_string()
    } else {
        return Err(ScenarioError::Read {
            path: path.to_path_buf(),
            message: "no such file or bundled scenario".into(),
        });
    };
    Ok((ScenarioConfig::parse(&text)?, text))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GravitoReport {
    pub vacuum_coupling: f64,
    pub energy_density: f64,
    pub mapping: GravitoMapping,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanDigest {
    pub axis: ScanAxis,
    pub points: usize,
    pub failed: usize,
    pub numerical_aborts: usize,
}

/// Everything `report.json` holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub description: String,
    pub model: ModelSpec,
    pub target: Target,
    pub evolution: EvolutionConfig,
    pub final_probability: f64,
    pub ledger: Option<LedgerSummary>,
    pub conservation: Option<ConservationAudit>,
    pub deficit: Option<DeficitReport>,
    pub scans: Vec<ScanDigest>,
    pub signature: Option<SignatureReport>,
    pub golden_rule_fit: Option<GoldenRuleFit>,
    pub gravito: Option<GravitoReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub norm_drift: f64,
    pub top_level: f64,
    pub hermitian: f64,
    pub coherent_tail_default: f64,
    pub min_conditioning_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub tool_version: &'static str,
    /// SHA-256 of the config text as read.
    pub config_sha256: String,
    /// Config after command-line overrides.
    pub effective_config: ScenarioConfig,
    pub constants_version: String,
    pub constants_sha256: String,
    pub tolerances: Tolerances,
    pub artifacts: Vec<ArtifactEntry>,
}

/// In-memory artifacts of one run, in write order.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub report: Report,
    pub files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// Write every file into `dir` through a temporary name and a rename, so
    /// no file is ever observed half-written.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            let tmp = dir.join(format!(".{name}.tmp"));
            fs::write(&tmp, bytes)?;
            fs::rename(&tmp, dir.join(name))?;
        }
        Ok(())
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing CSV to memory cannot fail");
    buf
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s.into_bytes()
}

/// Validate and run a scenario. Nothing touches the filesystem.
pub fn execute(cfg: &ScenarioConfig, source_text: &str, constants: &ConstantsTable) -> Result<Artifacts, ScenarioError> {
    let model = cfg.validate(constants)?;
    let target = cfg.target();
    let mut files = Vec::new();

    let traj = simulate(&model, &cfg.evolution)?;
    let probability = transition_probability(&traj, target)?;
    if cfg.wants(Format::Csv) {
        files.push((
            PROBABILITY_FILE.to_string(),
            csv_bytes(|b| output::write_probability_csv(b, &traj, &probability)),
        ));
    }

    let ledger = if cfg.analysis.ledger {
        let ledger = energy_ledger(&traj, &model)?;
        if cfg.wants(Format::Csv) {
            files.push((LEDGER_FILE.to_string(), csv_bytes(|b| output::write_ledger_csv(b, &ledger))));
        }
        Some(ledger.summary())
    } else {
        None
    };
    let conservation = if model.is_full_quantum() {
        Some(conservation_audit(&traj, &model)?)
    } else {
        None
    };
    let deficit = if cfg.analysis.deficit {
        Some(conditioned_energy_deficit(&traj, &model)?)
    } else {
        None
    };

    let scans = cfg
        .scan
        .par_iter()
        .map(|spec| run_scan(&model, &cfg.evolution, target, spec.axis, &spec.values()?))
        .collect::<Result<Vec<ScanResult>, _>>()?;
    if cfg.wants(Format::Csv) {
        for scan in &scans {
            files.push((
                format!("scan_{}.csv", scan.axis),
                csv_bytes(|b| output::write_scan_csv(b, scan)),
            ));
        }
    }
    let signature = if cfg.analysis.signature {
        Some(signature_report(&scans, &cfg.analysis.signature_tolerances)?)
    } else {
        None
    };
    let golden = if cfg.analysis.golden_rule_fit {
        let scan = scans
            .iter()
            .find(|s| s.axis == ScanAxis::PeakDetuning)
            .expect("validated above");
        Some(golden_rule_fit(scan)?)
    } else {
        None
    };
    let gravito = match &cfg.model {
        ModelSpec::Gravito(p) => Some(GravitoReport {
            vacuum_coupling: gravito_vacuum_coupling_with(p, constants)?,
            energy_density: gw_energy_density_with(p, constants),
            mapping: gravito_classical_params_with(p, constants)?,
        }),
        _ => None,
    };

    let report = Report {
        scenario: cfg.name.clone(),
        description: cfg.description.clone(),
        model,
        target,
        evolution: cfg.evolution,
        final_probability: *probability.last().expect("trajectory is non-empty"),
        ledger,
        conservation,
        deficit,
        scans: scans
            .iter()
            .map(|s| ScanDigest {
                axis: s.axis,
                points: s.len(),
                failed: s.errors.len(),
                numerical_aborts: s.errors.iter().filter(|e| e.numerical_abort).count(),
            })
            .collect(),
        signature,
        golden_rule_fit: golden,
        gravito,
    };
    if cfg.wants(Format::Json) {
        files.push((REPORT_FILE.to_string(), json_bytes(&report)));
    }

    let manifest = Manifest {
        scenario: cfg.name.clone(),
        tool_version: env!("CARGO_PKG_VERSION"),
        config_sha256: sha256_hex(source_text.as_bytes()),
        effective_config: cfg.clone(),
        constants_version: constants.version.clone(),
        constants_sha256: constants.hash(),
        tolerances: Tolerances {
            norm_drift: cfg.evolution.norm_drift_tol,
            top_level: cfg.evolution.top_level_tol,
            hermitian: HERMITIAN_TOL,
            coherent_tail_default: CoherentSpec::DEFAULT_TAIL,
            min_conditioning_probability: MIN_CONDITIONING_PROBABILITY,
        },
        artifacts: files
            .iter()
            .map(|(name, bytes)| ArtifactEntry {
                file: name.clone(),
                sha256: sha256_hex(bytes),
            })
            .collect(),
    };
    files.push((MANIFEST_FILE.to_string(), json_bytes(&manifest)));
    Ok(Artifacts { report, files })
}
