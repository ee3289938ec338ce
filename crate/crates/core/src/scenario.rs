//! Scenario files: everything a run needs besides the city.
//!
//! A scenario is a TOML document with `version = 1`. The city file path is
//! resolved relative to the scenario file. Only `seed`, `city`,
//! `epidemic.sigma_per_hour` and the population distributions are required.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agenda::AgendaConfig;
use crate::cityfile::{line_col, load_city, CityFileError};
use crate::engine::{run, RunOutput, SeedSpec, SimConfig, SimError, DEFAULT_DT_S};
use crate::epidemic::EpidemicParams;
use crate::population::{synthesize_population, DemographicConfig, PersonId, PopulationError};
use crate::transit::TransitSearch;
use crate::travel::ModeSpeeds;
use crate::world::World;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub seed: u64,
    #[serde(default = "default_days")]
    pub days: u32,
    #[serde(default = "default_dt")]
    pub dt_s: f64,
    /// City file, relative to the scenario file.
    pub city: PathBuf,
    pub population: DemographicConfig,
    pub epidemic: EpidemicParams,
    #[serde(default)]
    pub seeding: SeedingConfig,
    #[serde(default)]
    pub agenda: AgendaConfig,
    #[serde(default)]
    pub travel: TravelConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory of the scenario file.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_days() -> u32 {
    30
}
fn default_dt() -> f64 {
    DEFAULT_DT_S
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedingConfig {
    /// Number of index cases drawn at random. Ignored when `persons` is set.
    pub count: usize,
    pub persons: Vec<u32>,
    /// Susceptible people vaccinated at the start.
    pub vaccinated: usize,
}

impl Default for SeedingConfig {
    fn default() -> Self {
        SeedingConfig {
            count: 1,
            persons: Vec::new(),
            vaccinated: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TravelConfig {
    pub speeds: ModeSpeeds,
    pub transit: TransitSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub report_every_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_every_s: Option<f64>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            report_every_s: 3600.0,
            snapshot_every_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub path: PathBuf,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.path.display(), self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    /// Dotted key path, e.g. `epidemic.sigma_per_hour`.
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(ParseError),
    #[error("invalid scenario:\n{}", list(.0))]
    Invalid(Vec<ValidationError>),
}

fn list(errs: &[ValidationError]) -> String {
    errs.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    City(#[from] CityFileError),
    #[error(transparent)]
    Population(#[from] PopulationError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

const REQUIRED: [&str; 7] = [
    "seed",
    "city",
    "epidemic.sigma_per_hour",
    "population.population_size",
    "population.age_bins",
    "population.household_sizes",
    "population.commute_distance",
];

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    parse_scenario(&text, path, &base)
}

/// Parse and validate scenario text. `path` is used in messages only;
/// `base_dir` anchors the city path.
pub fn parse_scenario(text: &str, path: &Path, base_dir: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ScenarioError::Parse(ParseError {
            path: path.to_path_buf(),
            line,
            column,
            message: e.message().to_string(),
        })
    })?;

    let mut errs = Vec::new();
    match table.get("version") {
        Some(toml::Value::Integer(v)) if *v == i64::from(SCENARIO_VERSION) => {}
        Some(v) => errs.push(invalid(text, "version", format!("unsupported version {v}, expected {SCENARIO_VERSION}"))),
        None => errs.push(invalid(text, "version", "missing required field".into())),
    }
    for key in REQUIRED {
        if lookup(&table, key).is_none() {
            errs.push(invalid(text, key, "missing required field".into()));
        }
    }
    if !errs.is_empty() {
        return Err(ScenarioError::Invalid(errs));
    }

    let mut cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_col(text, s.start).0);
        ScenarioError::Invalid(vec![ValidationError {
            field: field_at(text, line).unwrap_or_default(),
            line,
            message: e.message().to_string(),
        }])
    })?;
    cfg.base_dir = base_dir.to_path_buf();

    let errs = cfg.problems().into_iter().map(|(k, m)| invalid(text, &k, m)).collect::<Vec<_>>();
    if !errs.is_empty() {
        return Err(ScenarioError::Invalid(errs));
    }
    Ok(cfg)
}

fn invalid(text: &str, field: &str, message: String) -> ValidationError {
    ValidationError {
        field: field.to_string(),
        line: key_line(text, field),
        message,
    }
}

fn lookup<'a>(table: &'a toml::Table, dotted: &str) -> Option<&'a toml::Value> {
    let mut parts = dotted.split('.');
    let mut v = table.get(parts.next()?)?;
    for p in parts {
        v = v.as_table()?.get(p)?;
    }
    Some(v)
}

/// Line of the key at a dotted path, falling back to the line of its
/// nearest enclosing table header.
fn key_line(text: &str, dotted: &str) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    let mut header = String::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            header = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            let depth = header.split('.').count();
            if is_prefix(&header, dotted) && best.is_none_or(|b| depth > b.1) {
                best = Some((n + 1, depth));
            }
            continue;
        }
        let Some((key, _)) = line.split_once('=') else { continue };
        let key = key.trim();
        let full = if header.is_empty() { key.to_string() } else { format!("{header}.{key}") };
        if full == dotted {
            return Some(n + 1);
        }
    }
    best.map(|b| b.0)
}

fn is_prefix(header: &str, dotted: &str) -> bool {
    dotted == header || dotted.starts_with(&format!("{header}."))
}

/// Dotted path of the key defined on `line`, if any.
fn field_at(text: &str, line: Option<usize>) -> Option<String> {
    let line = line?;
    let mut header = String::new();
    for (n, raw) in text.lines().enumerate().take(line) {
        let l = raw.trim();
        if l.starts_with('[') {
            header = l.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if n + 1 == line {
                return Some(header);
            }
        } else if n + 1 == line {
            let key = l.split_once('=').map(|(k, _)| k.trim()).unwrap_or("");
            return Some(if header.is_empty() { key.to_string() } else { format!("{header}.{key}") });
        }
    }
    None
}

impl ScenarioConfig {
    /// Absolute or working-directory relative path of the city file.
    pub fn city_path(&self) -> PathBuf {
        self.base_dir.join(&self.city)
    }

    pub fn sim_config(&self) -> SimConfig {
        let seeding = if self.seeding.persons.is_empty() {
            SeedSpec::Count(self.seeding.count)
        } else {
            SeedSpec::Persons(self.seeding.persons.iter().map(|&p| PersonId(p)).collect())
        };
        SimConfig {
            dt_s: self.dt_s,
            days: self.days,
            seed: self.seed,
            epidemic: self.epidemic.clone(),
            agenda: self.agenda.clone(),
            speeds: self.travel.speeds,
            transit_search: self.travel.transit.clone(),
            seeding,
            vaccinated: self.seeding.vaccinated,
            report_every_s: self.output.report_every_s,
            snapshot_every_s: self.output.snapshot_every_s,
        }
    }

    /// Problems as (dotted key, message) pairs.
    pub fn problems(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        // TOML integers are signed.
        if i64::try_from(self.seed).is_err() {
            out.push(("seed".into(), format!("must be at most {}", i64::MAX)));
        }
        if !self.city_path().is_file() {
            out.push(("city".into(), format!("file {} does not exist", self.city_path().display())));
        }
        for (k, m) in self.sim_config().problems() {
            let key = if k.starts_with("speeds.") {
                format!("travel.{k}")
            } else if k.starts_with("modal_split.") {
                format!("agenda.{k}")
            } else if self.epidemic_key(k) {
                format!("epidemic.{k}")
            } else {
                k.to_string()
            };
            out.push((key, m));
        }
        for (k, m) in self.population.problems() {
            out.push((format!("population.{k}"), m));
        }
        let t = &self.travel.transit;
        if t.radii_m.is_empty() || t.radii_m.iter().any(|r| !(*r > 0.0)) {
            out.push(("travel.transit.radii_m".into(), "needs at least one positive radius".into()));
        }
        if !(t.walk_speed_mps > 0.0) {
            out.push(("travel.transit.walk_speed_mps".into(), "must be positive".into()));
        }
        if self.seeding.persons.is_empty() && self.seeding.count > self.population.population_size {
            out.push(("seeding.count".into(), "exceeds the population size".into()));
        }
        out
    }

    fn epidemic_key(&self, k: &str) -> bool {
        self.epidemic.problems().iter().any(|(e, _)| *e == k)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Output directory from the file, relative to the scenario file.
    pub fn output_dir(&self) -> Option<PathBuf> {
        self.output.dir.as_ref().map(|d| self.base_dir.join(d))
    }
}

/// The world, population and run output of a scenario.
pub struct ScenarioRun {
    pub world: World,
    pub output: RunOutput,
    pub population: crate::population::Population,
}

/// Load the city, synthesize the population and run to the horizon.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun, RunError> {
    let world = load_city(&cfg.city_path())?;
    let population = synthesize_population(&world.city, &cfg.population, cfg.seed)?;
    let output = run(&world, population.clone(), cfg.sim_config())?;
    Ok(ScenarioRun {
        world,
        output,
        population,
    })
}
