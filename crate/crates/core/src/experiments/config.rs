use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::array_model::{ArrayConfig, FrequencyDistribution};
use crate::error::{Result, RfdaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Beampattern,
    Moments,
    Ks,
    DetectExample,
    DetectSweep,
    CrbMse,
    Coherence,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Beampattern,
        Scenario::Moments,
        Scenario::Ks,
        Scenario::DetectExample,
        Scenario::DetectSweep,
        Scenario::CrbMse,
        Scenario::Coherence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Beampattern => "beampattern",
            Scenario::Moments => "moments",
            Scenario::Ks => "ks",
            Scenario::DetectExample => "detect_example",
            Scenario::DetectSweep => "detect_sweep",
            Scenario::CrbMse => "crb_mse",
            Scenario::Coherence => "coherence",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = RfdaError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == key)
            .ok_or_else(|| RfdaError::Config(format!("unknown scenario `{s}`")))
    }
}

/// Normalized `(q, p)` evaluation lattice, inclusive end points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OffsetGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub q_points: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub p_points: usize,
}

impl Default for OffsetGrid {
    fn default() -> Self {
        Self {
            q_min: -0.5,
            q_max: 0.5,
            q_points: 21,
            p_min: -0.1,
            p_max: 0.1,
            p_points: 21,
        }
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl OffsetGrid {
    pub fn qs(&self) -> Vec<f64> {
        linspace(self.q_min, self.q_max, self.q_points)
    }

    pub fn ps(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.p_points)
    }

    /// `(q, p)` pairs, `q` varying fastest.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let qs = self.qs();
        self.ps()
            .into_iter()
            .flat_map(|p| qs.iter().map(move |&q| (q, p)))
            .collect()
    }
}

/// Point target at the interface: degrees, metres, and power relative to
/// the reference SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub direction_deg: f64,
    pub range_m: f64,
    #[serde(default)]
    pub relative_db: f64,
}

impl TargetSpec {
    pub fn new(direction_deg: f64, range_m: f64, relative_db: f64) -> Self {
        Self {
            direction_deg,
            range_m,
            relative_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub array: ArrayConfig,
    pub distribution: FrequencyDistribution,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; 0 picks the machine default.
    pub threads: usize,
    /// Per-element input SNR of a 0 dB target, noise power 1.
    pub snr_db: Vec<f64>,
    pub output_path: PathBuf,
    /// Draw new offsets per trial; when unset, detection and CRB scenarios
    /// keep one draw and the others redraw.
    pub redraw_m: Option<bool>,
    /// Use linear offsets `m = n` instead of a random draw (beampattern only).
    pub lfda: bool,
    /// Range cells of the processing lattice when the law is not discrete.
    pub m_levels: Option<usize>,
    pub grid: OffsetGrid,
    pub targets: Vec<TargetSpec>,
    pub sparsity: Option<usize>,
    /// Snapshots for the multiple-measurement algorithms.
    pub snapshots: usize,
    pub ks_alpha: f64,
    /// Support threshold of the FOCUSS family, relative to the largest row.
    pub support_threshold: f64,
    pub coherence_radii: Vec<f64>,
    pub epsilon: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Moments,
            array: ArrayConfig::s_band(64).expect("valid defaults"),
            distribution: FrequencyDistribution::discrete_uniform(32).expect("valid defaults"),
            trials: 2000,
            seed: 0,
            threads: 0,
            snr_db: vec![],
            output_path: PathBuf::from("results"),
            redraw_m: None,
            lfda: false,
            m_levels: None,
            grid: OffsetGrid::default(),
            targets: vec![],
            sparsity: None,
            snapshots: 8,
            ks_alpha: 0.05,
            support_threshold: 0.1,
            coherence_radii: vec![0.25, 0.3, 0.35, 0.4],
            epsilon: 0.01,
        }
    }
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Set a dotted `key` inside `table`, creating intermediate tables.
fn set_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    if key.split('.').any(str::is_empty) {
        return Err(RfdaError::Config(format!("malformed key `{key}`")));
    }
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("split yields at least one part");
    let mut cur = table;
    for part in parts {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| RfdaError::Config(format!("`{part}` in `{key}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    /// Parse TOML text and apply `key=value` overrides (dotted keys address
    /// nested sections; values use TOML syntax, bare words become strings).
    pub fn from_toml_str(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| RfdaError::Config(format!("invalid TOML: {e}")))?;
        for (k, v) in overrides {
            set_dotted(&mut table, k, parse_value(v))?;
        }
        // a partial [array] section inherits the default element count
        if let Some(toml::Value::Table(arr)) = table.get_mut("array") {
            arr.entry("n_elements")
                .or_insert(toml::Value::Integer(Self::default().array.n_elements() as i64));
        }
        // a partial [distribution] section of the default kind inherits its parameters
        if let Some(toml::Value::Table(dist)) = table.get_mut("distribution") {
            let default = toml::Table::try_from(Self::default().distribution).expect("distribution serializes");
            if dist.get("kind").is_none_or(|k| Some(k) == default.get("kind")) {
                for (k, v) in default {
                    dist.entry(k).or_insert(v);
                }
            }
        }
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| RfdaError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| RfdaError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// Whether trials redraw the offsets, after scenario defaults.
    pub fn redraws(&self) -> bool {
        self.redraw_m.unwrap_or(!matches!(
            self.scenario,
            Scenario::DetectExample | Scenario::DetectSweep | Scenario::CrbMse
        ))
    }

    /// Range cells of the processing lattice.
    pub fn lattice_levels(&self) -> usize {
        match self.distribution {
            FrequencyDistribution::DiscreteUniform { m_levels } => self.m_levels.unwrap_or(m_levels),
            _ => self.m_levels.unwrap_or(32),
        }
    }

    /// SNR points after scenario defaults.
    pub fn snr_points(&self) -> Vec<f64> {
        if !self.snr_db.is_empty() {
            return self.snr_db.clone();
        }
        match self.scenario {
            Scenario::DetectExample => vec![0.0],
            Scenario::DetectSweep => (0..11).map(|k| -24.0 + 3.0 * k as f64).collect(),
            Scenario::CrbMse => vec![0.0, 5.0, 10.0, 15.0, 20.0],
            _ => vec![],
        }
    }

    /// Targets after scenario defaults.
    pub fn target_specs(&self) -> Vec<TargetSpec> {
        if !self.targets.is_empty() {
            return self.targets.clone();
        }
        match self.scenario {
            Scenario::DetectExample => vec![
                TargetSpec::new(-30.0, 10.0, 10.0),
                TargetSpec::new(5.0, 70.0, 10.0),
                TargetSpec::new(60.0, 120.0, 0.0),
            ],
            Scenario::DetectSweep => vec![TargetSpec::new(-20.0, 30.0, 0.0), TargetSpec::new(25.0, 95.0, 0.0)],
            Scenario::CrbMse => vec![TargetSpec::new(10.0, 50.3, 0.0)],
            _ => vec![],
        }
    }

    /// Recovery sparsity after scenario defaults.
    pub fn sparsity_k(&self) -> usize {
        self.sparsity.unwrap_or(match self.scenario {
            Scenario::Coherence => 2,
            _ => self.target_specs().len().max(1),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(RfdaError::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        match self.scenario {
            Scenario::Moments if self.trials < 2 => return bad("moments needs at least 2 trials".into()),
            Scenario::Ks if self.trials < 50 => return bad("ks needs at least 50 trials".into()),
            _ => {}
        }
        if self.snapshots == 0 {
            return bad("snapshots must be at least 1".into());
        }
        if self.grid.q_points == 0 || self.grid.p_points == 0 {
            return bad("grid needs at least one point per axis".into());
        }
        if !(self.ks_alpha > 0.0 && self.ks_alpha < 1.0) {
            return bad(format!("ks_alpha must lie in (0, 1), got {}", self.ks_alpha));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if !(self.support_threshold >= 0.0 && self.support_threshold < 1.0) {
            return bad(format!("support_threshold must lie in [0, 1), got {}", self.support_threshold));
        }
        if self.m_levels == Some(0) {
            return bad("m_levels must be at least 1".into());
        }
        for t in self.target_specs() {
            if !(t.direction_deg.abs() < 90.0) || !(t.range_m >= 0.0) || !t.relative_db.is_finite() {
                return bad(format!("invalid target {t:?}"));
            }
        }
        if self.snr_points().iter().any(|s| !s.is_finite()) {
            return bad("snr_db entries must be finite".into());
        }
        let needs_targets = matches!(
            self.scenario,
            Scenario::DetectExample | Scenario::DetectSweep | Scenario::CrbMse
        );
        if needs_targets && self.target_specs().is_empty() {
            return bad(format!("scenario {} needs targets", self.scenario));
        }
        if needs_targets && self.snr_points().is_empty() {
            return bad(format!("scenario {} needs snr_db", self.scenario));
        }
        if self.scenario == Scenario::CrbMse && self.target_specs().len() != 1 {
            return bad("crb_mse takes exactly one target".into());
        }
        let k = self.sparsity_k();
        if k == 0 || k >= self.array.n_elements() {
            return bad(format!("sparsity {k} must lie in [1, N)"));
        }
        Ok(())
    }
}
