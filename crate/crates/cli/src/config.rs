//! Scenario configuration: JSON schema, validation, builtin scenarios,
//! and inline immersion definitions via the expression grammar.

use serde::{Deserialize, Serialize};
use umbilic_core::ambient::AmbientSpace;
use umbilic_core::catalog::{self, CatalogEntry, GroundTruth};
use umbilic_core::develop::Thresholds;
use umbilic_core::diagnostics::{SuiteConfig, TheoremId};
use umbilic_core::error::{GeomError, Result};
use umbilic_core::immersion::ParametricImmersion;
use umbilic_core::Vector;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbientConfig {
    Euclidean { dim: usize },
    LevelSet { dim: usize, constraint: String },
}

impl AmbientConfig {
    pub fn build(&self) -> Result<AmbientSpace> {
        match self {
            AmbientConfig::Euclidean { dim } => Ok(AmbientSpace::euclidean(*dim)),
            AmbientConfig::LevelSet { dim, constraint } => {
                AmbientSpace::level_set(*dim, constraint)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeModeConfig {
    Analytic,
    FiniteDifference { step: Option<f64> },
}

impl Default for DerivativeModeConfig {
    fn default() -> Self {
        DerivativeModeConfig::Analytic
    }
}

/// Custom immersion defined in the config via the expression grammar.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InlineImmersion {
    pub name: String,
    pub vars: Vec<String>,
    pub components: Vec<String>,
    pub domain: Vec<[f64; 2]>,
    pub ambient: AmbientConfig,
    #[serde(default)]
    pub derivative_mode: DerivativeModeConfig,
    /// Chart point seeding curves and grids; defaults to the box center.
    #[serde(default)]
    pub center: Option<Vec<f64>>,
}

impl InlineImmersion {
    pub fn build(&self) -> Result<CatalogEntry> {
        let vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        let comps: Vec<&str> = self.components.iter().map(|s| s.as_str()).collect();
        let ambient = self.ambient.build()?;
        let immersion = match &self.derivative_mode {
            DerivativeModeConfig::Analytic => ParametricImmersion::analytic(
                &self.name,
                &vars,
                &comps,
                &self.domain,
                ambient,
            )?,
            DerivativeModeConfig::FiniteDifference { step } => {
                ParametricImmersion::finite_difference(
                    &self.name,
                    &vars,
                    &comps,
                    &self.domain,
                    ambient,
                    *step,
                )?
            }
        };
        let center = match &self.center {
            Some(c) => Vector::from_vec(c.clone()),
            None => Vector::from_iterator(
                self.domain.len(),
                self.domain.iter().map(|[lo, hi]| 0.5 * (lo + hi)),
            ),
        };
        let name: &'static str = Box::leak(self.name.clone().into_boxed_str());
        Ok(CatalogEntry {
            name,
            immersion,
            flags: GroundTruth {
                totally_umbilic: false,
                extrinsic_sphere: false,
                constant_isotropic: false,
                hypersurface: false,
            },
            center,
        })
    }
}

/// One scenario: an ensemble of immersions and the suites to run on them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    /// Catalog entry names.
    #[serde(default)]
    pub entries: Vec<String>,
    /// Custom immersions defined inline.
    #[serde(default)]
    pub inline_immersions: Vec<InlineImmersion>,
    pub suites: Vec<TheoremId>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_span")]
    pub span: [f64; 2],
    #[serde(default = "default_c_values")]
    pub c_values: Vec<f64>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_defect_directions")]
    pub defect_directions: usize,
    #[serde(default = "default_seed_points")]
    pub seed_points: usize,
    #[serde(default = "default_seed_directions")]
    pub seed_directions: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Export one CSV per representative trajectory.
    #[serde(default = "default_true")]
    pub export_trajectories: bool,
    /// Export the full seed set instead of one representative per kind.
    #[serde(default)]
    pub export_all_seeds: bool,
    /// Row cap per exported CSV; longer trajectories are strided.
    #[serde(default = "default_max_csv_rows")]
    pub max_csv_rows: usize,
}

fn default_seed() -> u64 {
    42
}
fn default_step() -> f64 {
    umbilic_core::tol::DEFAULT_STEP
}
fn default_span() -> [f64; 2] {
    [-std::f64::consts::PI, std::f64::consts::PI]
}
fn default_c_values() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn default_grid_points() -> usize {
    9
}
fn default_defect_directions() -> usize {
    umbilic_core::tol::DEFAULT_DIRECTIONS
}
fn default_seed_points() -> usize {
    4
}
fn default_seed_directions() -> usize {
    6
}
fn default_true() -> bool {
    true
}
fn default_max_csv_rows() -> usize {
    1000
}

impl ScenarioConfig {
    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            step: self.step,
            span: self.span,
            c_values: self.c_values.clone(),
            grid_points: self.grid_points,
            defect_directions: self.defect_directions,
            seed_points: self.seed_points,
            seed_directions: self.seed_directions,
            thresholds: self.thresholds,
        }
    }

    /// Resolve entries against the catalog plus inline definitions.
    pub fn resolve_entries(&self) -> Result<Vec<CatalogEntry>> {
        let mut out = Vec::new();
        for name in &self.entries {
            let entry = catalog::lookup(name).ok_or_else(|| {
                GeomError::ConfigInvalid(format!(
                    "unknown catalog entry '{name}'; available: {}",
                    catalog::names().join(", ")
                ))
            })?;
            out.push(entry);
        }
        for inline in &self.inline_immersions {
            out.push(inline.build()?);
        }
        if out.is_empty() {
            return Err(GeomError::ConfigInvalid(
                "scenario defines no immersions".into(),
            ));
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        self.resolve_entries()?;
        if self.suites.is_empty() {
            return Err(GeomError::ConfigInvalid("scenario requests no suites".into()));
        }
        self.suite_config().validate()?;
        if self.max_csv_rows < 2 {
            return Err(GeomError::ConfigInvalid(
                "max_csv_rows must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// Builtin scenarios addressable by name from `--scenario`.
pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    let base = ScenarioConfig {
        name: name.to_string(),
        entries: vec![],
        inline_immersions: vec![],
        suites: vec![],
        seed: default_seed(),
        step: default_step(),
        span: default_span(),
        c_values: default_c_values(),
        grid_points: default_grid_points(),
        defect_directions: default_defect_directions(),
        seed_points: default_seed_points(),
        seed_directions: default_seed_directions(),
        thresholds: Thresholds::default(),
        export_trajectories: true,
        export_all_seeds: false,
        max_csv_rows: default_max_csv_rows(),
    };
    let mk = |entries: &[&str], suites: Vec<TheoremId>| ScenarioConfig {
        entries: entries.iter().map(|s| s.to_string()).collect(),
        suites,
        ..base.clone()
    };
    match name {
        "sphere-mainth" => Some(mk(
            &["sphere2", "sphere3", "sphere2-in-R4"],
            vec![TheoremId::MainThForward, TheoremId::Corollary],
        )),
        "ellipsoid-secondth" => Some(mk(
            &["ellipsoid-1-1-2"],
            vec![TheoremId::SecondTh, TheoremId::MainThConverse],
        )),
        "torus-secondth" => Some(mk(
            &["torus-2-1"],
            vec![TheoremId::SecondTh, TheoremId::MainThConverse],
        )),
        "cylinder-secondth" => Some(mk(&["cylinder"], vec![TheoremId::SecondTh])),
        "clifford-secondth" => Some(mk(&["clifford-in-S3"], vec![TheoremId::SecondTh])),
        "sphere-prop14" => Some(mk(&["sphere2"], vec![TheoremId::PlanarImpliesPg])),
        "veronese-thirdth" => Some(mk(&["veronese-in-S4"], vec![TheoremId::ThirdTh])),
        "smoke" => Some(ScenarioConfig {
            span: [-1.2, 1.2],
            seed_points: 2,
            seed_directions: 2,
            grid_points: 4,
            ..mk(&["sphere2"], vec![TheoremId::Corollary])
        }),
        _ => None,
    }
}

pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "sphere-mainth",
        "ellipsoid-secondth",
        "torus-secondth",
        "cylinder-secondth",
        "clifford-secondth",
        "sphere-prop14",
        "veronese-thirdth",
        "smoke",
    ]
}

/// Load a scenario from a builtin name or a JSON file path.
pub fn load_scenario(spec: &str) -> std::result::Result<ScenarioConfig, String> {
    if let Some(cfg) = builtin(spec) {
        return Ok(cfg);
    }
    let path = std::path::Path::new(spec);
    if !path.exists() {
        return Err(format!(
            "'{spec}' is neither a builtin scenario ({}) nor an existing file",
            builtin_names().join(", ")
        ));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("reading {spec}: {e}"))?;
    let cfg: ScenarioConfig =
        serde_json::from_str(&text).map_err(|e| format!("parsing {spec}: {e}"))?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for name in builtin_names() {
            let cfg = builtin(name).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn inline_immersion_round_trip() {
        let json = r#"{
            "name": "custom-cylinder",
            "entries": [],
            "inline_immersions": [{
                "name": "cyl",
                "vars": ["u", "v"],
                "components": ["cos(u)", "sin(u)", "v"],
                "domain": [[-6.0, 6.0], [-6.0, 6.0]],
                "ambient": {"euclidean": {"dim": 3}}
            }],
            "suites": ["SecondTH"]
        }"#;
        let cfg: ScenarioConfig = serde_json::from_str(json).unwrap();
        cfg.validate().unwrap();
        let entries = cfg.resolve_entries().unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].immersion.dim(), 2);
    }

    #[test]
    fn unknown_entry_is_rejected() {
        let cfg = ScenarioConfig {
            entries: vec!["nonexistent".into()],
            ..builtin("smoke").unwrap()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn bad_thresholds_are_rejected() {
        let mut cfg = builtin("smoke").unwrap();
        cfg.thresholds = Thresholds {
            planar: 1e-3,
            reject: 1e-6,
        };
        assert!(cfg.validate().is_err());
    }
}
