//! Scenario files: versioned TOML, unknown keys rejected.

use std::path::Path;

use driftheat::battery::{dictionary_row, random_field};
use driftheat::fd::FdGrid;
use driftheat::monitors::{default_time_grid, time_grid, GammaSchedule, MuSchedule, Schedule};
use driftheat::{GaussianProfile, HermiteField, InitialData, ModelKind, ProfileFamily, SolitonModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    SolitonIdentities,
    ClassicalBound,
    CriticalBound,
    ScheduleBound,
    BakryEmeryBound,
    BakryEmeryConstant,
    HypercontractivityProbe,
    AnsatzCoefficients,
    MonitoredDerivative,
    Sharpness,
    FdOracle,
    LaplacianCommutes,
    DivergenceIdentity,
    BochnerIdentity,
    FlowNormIdentity,
    HeatKernel,
    SchurIdentity,
    SchurRows,
    Tables,
}

impl CheckName {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::SolitonIdentities => "soliton_identities",
            CheckName::ClassicalBound => "classical_bound",
            CheckName::CriticalBound => "critical_bound",
            CheckName::ScheduleBound => "schedule_bound",
            CheckName::BakryEmeryBound => "bakry_emery_bound",
            CheckName::BakryEmeryConstant => "bakry_emery_constant",
            CheckName::HypercontractivityProbe => "hypercontractivity_probe",
            CheckName::AnsatzCoefficients => "ansatz_coefficients",
            CheckName::MonitoredDerivative => "monitored_derivative",
            CheckName::Sharpness => "sharpness",
            CheckName::FdOracle => "fd_oracle",
            CheckName::LaplacianCommutes => "laplacian_commutes",
            CheckName::DivergenceIdentity => "divergence_identity",
            CheckName::BochnerIdentity => "bochner_identity",
            CheckName::FlowNormIdentity => "flow_norm_identity",
            CheckName::HeatKernel => "heat_kernel",
            CheckName::SchurIdentity => "schur_identity",
            CheckName::SchurRows => "schur_rows",
            CheckName::Tables => "tables",
        }
    }

    /// Checks that need `[data]`.
    pub fn needs_data(&self) -> bool {
        matches!(
            self,
            CheckName::ClassicalBound
                | CheckName::CriticalBound
                | CheckName::ScheduleBound
                | CheckName::BakryEmeryBound
                | CheckName::HypercontractivityProbe
                | CheckName::AnsatzCoefficients
                | CheckName::MonitoredDerivative
                | CheckName::Sharpness
                | CheckName::FdOracle
                | CheckName::LaplacianCommutes
                | CheckName::FlowNormIdentity
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: Option<u64>,
    pub checks: Vec<CheckName>,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub data: Option<DataSpec>,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub fd: Option<FdSpec>,
    #[serde(default)]
    pub tolerance: ToleranceSpec,
    #[serde(default)]
    pub identities: IdentitySpec,
    #[serde(default)]
    pub schur: SchurSpec,
    #[serde(default)]
    pub bakry_emery: BakryEmerySpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default = "default_kind")]
    pub kind: ModelKind,
    #[serde(default = "one")]
    pub dim: usize,
    #[serde(default)]
    pub potential_shift: f64,
}

fn default_kind() -> ModelKind {
    ModelKind::EuclideanGaussian
}

fn one() -> usize {
    1
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            dim: 1,
            potential_shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    /// A row of the solution dictionary.
    Row { row: u32, c: Option<f64> },
    Profile { family: ProfileFamily, c: f64 },
    Hermite { max_degree: u32, terms: Vec<TermSpec> },
    /// All coefficients up to `max_degree` drawn from `[-1, 1]` with the scenario seed.
    Random { max_degree: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub index: Vec<u32>,
    pub coeff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub gamma: GammaSchedule,
    pub mu: MuSchedule,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub points: usize,
    pub first: f64,
    pub last: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdSpec {
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_fd_times")]
    pub times: Vec<f64>,
    #[serde(default = "default_window")]
    pub window: f64,
}

fn default_half_width() -> f64 {
    FdGrid::default().half_width
}
fn default_nodes() -> usize {
    FdGrid::default().nodes
}
fn default_dt() -> f64 {
    FdGrid::default().dt
}
fn default_fd_times() -> Vec<f64> {
    vec![0.5, 1.0]
}
fn default_window() -> f64 {
    4.0
}

impl Default for FdSpec {
    fn default() -> Self {
        Self {
            half_width: default_half_width(),
            nodes: default_nodes(),
            dt: default_dt(),
            times: default_fd_times(),
            window: default_window(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default = "closed_form_tol")]
    pub closed_form: f64,
    #[serde(default = "numeric_tol")]
    pub numeric: f64,
}

fn closed_form_tol() -> f64 {
    driftheat::monitors::CLOSED_FORM_TOL
}
fn numeric_tol() -> f64 {
    driftheat::monitors::NUMERIC_TOL
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self {
            closed_form: closed_form_tol(),
            numeric: numeric_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySpec {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_batches")]
    pub batches: usize,
}

fn default_count() -> usize {
    1000
}
fn default_batches() -> usize {
    1
}

impl Default for IdentitySpec {
    fn default() -> Self {
        Self {
            count: default_count(),
            batches: default_batches(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchurSpec {
    #[serde(default = "default_taus")]
    pub taus: Vec<f64>,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_schur_order")]
    pub order: usize,
}

fn default_taus() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.9]
}
fn default_dims() -> Vec<usize> {
    vec![1, 2, 3]
}
fn default_samples() -> usize {
    20
}
fn default_schur_order() -> usize {
    40
}

impl Default for SchurSpec {
    fn default() -> Self {
        Self {
            taus: default_taus(),
            dims: default_dims(),
            samples: default_samples(),
            order: default_schur_order(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BakryEmerySpec {
    #[serde(default = "default_be_t")]
    pub t: f64,
    #[serde(default = "default_be_gamma")]
    pub gamma: f64,
}

fn default_be_t() -> f64 {
    1.0
}
fn default_be_gamma() -> f64 {
    1.0
}

impl Default for BakryEmerySpec {
    fn default() -> Self {
        Self {
            t: default_be_t(),
            gamma: default_be_gamma(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Reverse-profile constant `c`, reporting `L(v)`.
    C,
    /// Constant weight factor `γ`, comparing the Bakry–Émery constant with quadrature.
    Gamma,
    /// Sub-critical `ε`, comparing `e^{-t} C^{4/n}` with its large-time limit.
    Epsilon,
    /// Kernel time `τ`, reporting the Schur row constants.
    Tau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    /// Evaluation time for the `gamma` and `epsilon` sweeps.
    #[serde(default)]
    pub t: Option<f64>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.name.trim().is_empty() {
            return bad("scenario name is empty".into());
        }
        if self.tolerance.closed_form <= 0.0 || self.tolerance.numeric <= 0.0 {
            return bad("tolerances must be positive".into());
        }
        if let Some(c) = self.checks.iter().find(|c| c.needs_data()) {
            if self.data.is_none() {
                return bad(format!("check {} needs a [data] section", c.as_str()));
            }
        }
        if self.checks.contains(&CheckName::ScheduleBound) && self.schedule.is_none() {
            return bad("check schedule_bound needs a [schedule] section".into());
        }
        if let Some(g) = &self.grid {
            if g.points == 0 || !(g.first > 0.0 && g.last > g.first) {
                return bad("grid needs points >= 1 and 0 < first < last".into());
            }
        }
        if self.identities.count == 0 || self.identities.batches == 0 {
            return bad("identities.count and identities.batches must be positive".into());
        }
        if self.schur.samples == 0 || self.schur.dims.iter().any(|&d| d == 0) {
            return bad("schur.samples and schur.dims must be positive".into());
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return bad("sweep.values is empty".into());
            }
        }
        // Building the model and data surfaces parameter errors early.
        self.model()?;
        if self.data.is_some() {
            self.initial_data()?;
        }
        if let Some(s) = &self.schedule {
            s.to_schedule().validate(&self.times()).map_err(CliError::from_config)?;
        }
        if let Some(fd) = &self.fd {
            FdGrid::new(fd.half_width, fd.nodes, fd.dt).map_err(CliError::from_config)?;
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn model(&self) -> Result<SolitonModel, CliError> {
        Ok(SolitonModel::new(self.model.kind, self.model.dim)
            .map_err(CliError::from_config)?
            .with_potential_shift(self.model.potential_shift))
    }

    pub fn times(&self) -> Vec<f64> {
        match &self.grid {
            Some(g) => time_grid(g.points, g.first, g.last),
            None => default_time_grid(),
        }
    }

    pub fn fd(&self) -> FdSpec {
        self.fd.clone().unwrap_or_default()
    }

    pub fn initial_data(&self) -> Result<InitialData, CliError> {
        let spec = self
            .data
            .as_ref()
            .ok_or_else(|| CliError::Config("scenario has no [data] section".into()))?;
        let model = self.model()?;
        let n = model.dim();
        let euclid = |what: &str| -> Result<(), CliError> {
            if model.kind() != ModelKind::EuclideanGaussian {
                return Err(CliError::Config(format!("{what} is only defined on the Euclidean model")));
            }
            Ok(())
        };
        let data = match spec {
            DataSpec::Row { row, c } => {
                euclid("data.kind = \"row\"")?;
                dictionary_row(*row, n, *c).map_err(CliError::from_config)?
            }
            DataSpec::Profile { family, c } => {
                euclid("data.kind = \"profile\"")?;
                InitialData::Profile(GaussianProfile::new(*family, *c, n).map_err(CliError::from_config)?)
            }
            DataSpec::Hermite { max_degree, terms } => InitialData::Field(
                HermiteField::from_terms(model, *max_degree, terms.iter().map(|t| (t.index.clone(), t.coeff)))
                    .map_err(CliError::from_config)?,
            ),
            DataSpec::Random { max_degree } => {
                euclid("data.kind = \"random\"")?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed());
                InitialData::Field(random_field(&mut rng, n, *max_degree).map_err(CliError::from_config)?)
            }
        };
        Ok(data)
    }
}

impl ScheduleSpec {
    pub fn to_schedule(&self) -> Schedule {
        Schedule {
            gamma: self.gamma,
            mu: self.mu,
            alpha: self.alpha,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
schema_version = 1
name = "row1"
checks = ["classical_bound", "critical_bound"]

[model]
kind = "euclidean_gaussian"
dim = 1

[data]
kind = "row"
row = 1
"#;

    #[test]
    fn parses_basic_scenario() {
        let s = Scenario::from_toml(BASIC).unwrap();
        assert_eq!(s.checks.len(), 2);
        assert_eq!(s.times().len(), 40);
        assert_eq!(s.seed(), DEFAULT_SEED);
        assert!(matches!(s.initial_data().unwrap(), InitialData::Field(_)));
    }

    #[test]
    fn rejects_unknown_keys_and_checks() {
        let extra = BASIC.replace("dim = 1", "dim = 1\ncolour = \"red\"");
        assert!(Scenario::from_toml(&extra).is_err());
        let unknown = BASIC.replace("\"critical_bound\"", "\"critical_bond\"");
        assert!(Scenario::from_toml(&unknown).is_err());
        let data_extra = BASIC.replace("row = 1", "row = 1\nfoo = 2");
        assert!(Scenario::from_toml(&data_extra).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Scenario::from_toml(&BASIC.replace("schema_version = 1", "schema_version = 2")).is_err());
        assert!(Scenario::from_toml(&BASIC.replace("row = 1", "row = 9")).is_err());
        let missing = BASIC.replace("[data]\nkind = \"row\"\nrow = 1\n", "");
        assert!(Scenario::from_toml(&missing).is_err());
        let neg = BASIC.replace("kind = \"row\"\nrow = 1", "kind = \"profile\"\nfamily = \"reverse\"\nc = -1.0");
        assert!(Scenario::from_toml(&neg).is_err());
    }

    #[test]
    fn schedule_section() {
        let text = BASIC.replace("checks = [\"classical_bound\", \"critical_bound\"]", "checks = [\"schedule_bound\"]")
            + "\n[schedule]\ngamma = { kind = \"critical\" }\nmu = \"constant\"\nalpha = 1.0\n";
        let s = Scenario::from_toml(&text).unwrap();
        assert_eq!(s.schedule.unwrap().mu, MuSchedule::Constant);
        let sub = text.replace("{ kind = \"critical\" }", "{ kind = \"sub_critical\", value = 0.1 }");
        assert_eq!(Scenario::from_toml(&sub).unwrap().schedule.unwrap().gamma, GammaSchedule::SubCritical(0.1));
    }
}
