//! Run configuration documents and model-spec loading.

use crate::failure::Failure;
use holecov::inference::ObjectiveKind;
use holecov::{CovarianceModel, ModelTemplate};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};

/// Everything a subcommand needs. Paths are resolved against the directory
/// of the config file; after resolution `model` holds the model document
/// itself so that outputs are self-describing.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queries: Option<QuerySource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holdout: Option<HoldoutSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub allow_uncertified: bool,
}

/// A model given inline or as a path to a JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Path(PathBuf),
    Inline(Value),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    pub path: PathBuf,
    #[serde(default = "x_col")]
    pub x: String,
    #[serde(default = "y_col")]
    pub y: String,
    #[serde(default = "value_col")]
    pub value: String,
}

fn x_col() -> String {
    "x".into()
}

fn y_col() -> String {
    "y".into()
}

fn value_col() -> String {
    "value".into()
}

/// Planar lattice `[x0, x1, y0, y1]` with `n1 × n2` nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub extent: [f64; 4],
    pub resolution: [usize; 2],
    #[serde(default)]
    pub normalize: bool,
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), Failure> {
        if self.resolution.iter().any(|&n| n < 2) {
            return Err(Failure::input(format!("grid resolution {:?} needs at least 2 nodes per axis", self.resolution)));
        }
        let [x0, x1, y0, y1] = self.extent;
        if !(x0 < x1 && y0 < y1) || self.extent.iter().any(|v| !v.is_finite()) {
            return Err(Failure::input(format!("grid extent {:?} must be finite with x0 < x1 and y0 < y1", self.extent)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let [x0, x1, y0, y1] = self.extent;
        let [n1, n2] = self.resolution;
        let node = |lo: f64, hi: f64, n: usize, k: usize| lo + (hi - lo) * k as f64 / (n - 1) as f64;
        (0..n1 * n2).map(|k| vec![node(x0, x1, n1, k % n1), node(y0, y1, n2, k / n1)]).collect()
    }
}

/// Prediction locations: a CSV of points or a lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuerySource {
    Points {
        path: PathBuf,
        #[serde(default = "x_col")]
        x: String,
        #[serde(default = "y_col")]
        y: String,
    },
    Grid(GridSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub template: ModelTemplate,
    pub init: Vec<f64>,
    #[serde(default = "default_objective")]
    pub objective: ObjectiveKind,
    /// Pair radius for the composite likelihood; defaults to a third of the
    /// domain diameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Variogram directions for least squares.
    #[serde(default = "default_directions")]
    pub directions: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lag_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_lag: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evals: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
}

fn default_objective() -> ObjectiveKind {
    ObjectiveKind::Cl
}

fn default_directions() -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.0], vec![0.0, 1.0]]
}

/// Held-out rows: explicit indices, or a fraction drawn with `seed`
/// (the run seed when absent).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoldoutSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Regular simulation lattice starting at the origin.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "unit")]
    pub spacing: f64,
}

fn unit() -> f64 {
    1.0
}

/// Parses a JSON document, reporting the location of syntax and schema
/// errors.
pub fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let mut cfg: RunConfig = parse_json(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.rebase(&base);
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(ModelSource::Path(p)) = &mut self.model {
            join(p);
        }
        if let Some(d) = &mut self.data {
            join(&mut d.path);
        }
        if let Some(QuerySource::Points { path, .. }) = &mut self.queries {
            join(path);
        }
        if let Some(p) = &mut self.output {
            join(p);
        }
    }

    /// Builds the model and replaces the source by the model document.
    pub fn resolve_model(&mut self) -> Result<CovarianceModel, Failure> {
        let model = match &self.model {
            None => return Err(Failure::input("no model given")),
            Some(ModelSource::Path(p)) => {
                let doc: Value = parse_json(p)?;
                model_from_value(doc).map_err(|m| Failure::input(format!("{}: {m}", p.display())))?
            }
            Some(ModelSource::Inline(v)) => {
                model_from_value(v.clone()).map_err(|m| Failure::input(format!("config field 'model': {m}")))?
            }
        };
        let doc = serde_json::to_value(&model).map_err(|e| Failure::numerical(e.to_string()))?;
        self.model = Some(ModelSource::Inline(doc));
        Ok(model)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[derive(Deserialize)]
struct TemplateDoc {
    #[serde(flatten)]
    template: ModelTemplate,
    values: Vec<f64>,
}

/// Accepts a model document (`kind`), a template with values
/// (`template`, `values`), or any document with a `model` field such as a
/// fit report.
pub fn model_from_value(v: Value) -> Result<CovarianceModel, String> {
    let Value::Object(map) = &v else {
        return Err("a model document must be a JSON object".into());
    };
    if map.contains_key("kind") {
        serde_json::from_value(v).map_err(|e| e.to_string())
    } else if map.contains_key("template") {
        let doc: TemplateDoc = serde_json::from_value(v).map_err(|e| e.to_string())?;
        doc.template.build(&doc.values).map_err(|e| e.to_string())
    } else if let Some(inner) = map.get("model") {
        model_from_value(inner.clone())
    } else {
        Err("expected a 'kind', 'template' or 'model' field".into())
    }
}
