//! Experiment configuration: JSON with strict key checking, named range
//! errors, and nearest-key suggestions for typos.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use capkit::sphere_geom::ShapeSpec;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Capacity,
    Hadamard,
    Flow,
    BrunnMinkowski,
    Constants,
    Selftest,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Capacity => "capacity",
            ExperimentKind::Hadamard => "hadamard",
            ExperimentKind::Flow => "flow",
            ExperimentKind::BrunnMinkowski => "brunn_minkowski",
            ExperimentKind::Constants => "constants",
            ExperimentKind::Selftest => "selftest",
        }
    }
}

/// Fully validated plan with defaults filled in; serialized back into the
/// report provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub kind: ExperimentKind,
    pub n: usize,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub pairs: Vec<(ShapeSpec, ShapeSpec)>,
    pub grid_resolution: usize,
    pub target_cells: usize,
    /// 0 selects the alpha-matched default 1 + alpha/2.
    pub grading: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
    pub quad_resolution: usize,
    pub fit_points: usize,
    pub fit_samples: usize,
    pub t1: f64,
    pub constraint: FlowConstraint,
    pub max_steps: usize,
    pub stall_tol: f64,
    pub flatness_tol: f64,
    pub cv_tol: f64,
    pub anchor_tol: f64,
    pub classical_tol: f64,
    pub hausdorff_tol: f64,
    pub bm_pairs: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowConstraint {
    Volume,
    MeanWidth,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            kind: ExperimentKind::Selftest,
            n: 2,
            alpha: 1.0,
            shape: None,
            pairs: Vec::new(),
            grid_resolution: 512,
            target_cells: 3000,
            grading: 0.0,
            gap_tol: 1e-6,
            max_iter: 0,
            quad_resolution: 64,
            fit_points: 8,
            fit_samples: 64,
            t1: 0.0,
            constraint: FlowConstraint::Volume,
            max_steps: 200,
            stall_tol: 0.02,
            flatness_tol: 0.02,
            cv_tol: 0.05,
            anchor_tol: 0.02,
            classical_tol: 0.005,
            hausdorff_tol: 0.02,
            bm_pairs: 10,
            seed: 0,
            output_dir: PathBuf::from("capkit-out"),
            cache_dir: None,
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "kind",
    "n",
    "alpha",
    "shape",
    "pairs",
    "grid_resolution",
    "target_cells",
    "grading",
    "gap_tol",
    "max_iter",
    "quad_resolution",
    "fit_points",
    "fit_samples",
    "t1",
    "constraint",
    "max_steps",
    "stall_tol",
    "flatness_tol",
    "cv_tol",
    "anchor_tol",
    "classical_tol",
    "hausdorff_tol",
    "bm_pairs",
    "seed",
    "output_dir",
    "cache_dir",
];

const SHAPE_KEYS: &[&str] = &[
    "kind", "radius", "center", "a", "b", "c", "vertices", "rho", "seed", "degree", "margin",
];

fn levenshtein(a: &str, b: &str) -> usize {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            cur[j] = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn nearest_key(key: &str, known: &'static [&'static str]) -> Option<&'static str> {
    known
        .iter()
        .map(|k| (levenshtein(key, k), *k))
        .min()
        .filter(|(d, _)| *d <= 3)
        .map(|(_, k)| k)
}

fn check_keys(
    obj: &serde_json::Map<String, Value>,
    known: &'static [&'static str],
    ctx: &str,
) -> Result<(), ConfigError> {
    for key in obj.keys() {
        if !known.contains(&key.as_str()) {
            let hint = nearest_key(key, known)
                .map(|k| format!("; did you mean \"{k}\"?"))
                .unwrap_or_default();
            return Err(ConfigError(format!("unknown key \"{key}\"{ctx}{hint}")));
        }
    }
    Ok(())
}

fn get_f64(obj: &serde_json::Map<String, Value>, key: &str) -> Result<Option<f64>, ConfigError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| ConfigError(format!("key \"{key}\" must be a number"))),
    }
}

fn get_usize(obj: &serde_json::Map<String, Value>, key: &str) -> Result<Option<usize>, ConfigError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|u| Some(u as usize))
            .ok_or_else(|| ConfigError(format!("key \"{key}\" must be a nonnegative integer"))),
    }
}

fn parse_shape(v: &Value) -> Result<ShapeSpec, ConfigError> {
    let obj = v
        .as_object()
        .ok_or_else(|| ConfigError("shape must be an object".into()))?;
    check_keys(obj, SHAPE_KEYS, " in shape")?;
    serde_json::from_value(v.clone())
        .map_err(|e| ConfigError(format!("invalid shape: {e}")))
}

/// Parse and validate a configuration document.
pub fn parse_config_str(text: &str) -> Result<ExperimentPlan, ConfigError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| ConfigError(format!("not valid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| ConfigError("top level must be an object".into()))?;
    check_keys(obj, KNOWN_KEYS, "")?;

    let kind_str = obj
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| ConfigError("missing required key \"kind\"".into()))?;
    let kind: ExperimentKind = serde_json::from_value(Value::String(kind_str.into()))
        .map_err(|_| {
            ConfigError(format!(
                "unknown kind \"{kind_str}\" (expected capacity, hadamard, flow, \
                 brunn_minkowski, constants or selftest)"
            ))
        })?;

    let mut plan = ExperimentPlan { kind, ..Default::default() };
    if let Some(n) = get_usize(obj, "n")? {
        if n != 2 && n != 3 {
            return Err(ConfigError(format!("\"n\" = {n} outside the valid set {{2, 3}}")));
        }
        plan.n = n;
    }
    if let Some(alpha) = get_f64(obj, "alpha")? {
        let hi = 2.0f64.min(plan.n as f64);
        if alpha <= 0.0 || alpha >= hi {
            return Err(ConfigError(format!(
                "\"alpha\" = {alpha} outside the valid range (0, {hi})"
            )));
        }
        plan.alpha = alpha;
    }
    if let Some(v) = obj.get("shape") {
        plan.shape = Some(parse_shape(v)?);
    }
    if let Some(v) = obj.get("pairs") {
        let arr = v
            .as_array()
            .ok_or_else(|| ConfigError("\"pairs\" must be an array of [omega, l]".into()))?;
        for item in arr {
            let pair = item
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| ConfigError("each pair must be [omega, l]".into()))?;
            plan.pairs.push((parse_shape(&pair[0])?, parse_shape(&pair[1])?));
        }
    }
    macro_rules! num_field {
        ($key:literal, $field:ident, usize, $lo:expr) => {
            if let Some(v) = get_usize(obj, $key)? {
                if v < $lo {
                    return Err(ConfigError(format!(
                        "\"{}\" = {v} below the minimum {}",
                        $key, $lo
                    )));
                }
                plan.$field = v;
            }
        };
        ($key:literal, $field:ident, f64, $lo:expr, $hi:expr) => {
            if let Some(v) = get_f64(obj, $key)? {
                if v < $lo || v > $hi {
                    return Err(ConfigError(format!(
                        "\"{}\" = {v} outside the valid range [{}, {}]",
                        $key, $lo, $hi
                    )));
                }
                plan.$field = v;
            }
        };
    }
    num_field!("grid_resolution", grid_resolution, usize, 16);
    num_field!("target_cells", target_cells, usize, 100);
    num_field!("grading", grading, f64, 0.0, 3.0);
    num_field!("gap_tol", gap_tol, f64, 0.0, 1.0);
    num_field!("max_iter", max_iter, usize, 0);
    num_field!("quad_resolution", quad_resolution, usize, 16);
    num_field!("fit_points", fit_points, usize, 4);
    num_field!("fit_samples", fit_samples, usize, 8);
    num_field!("t1", t1, f64, 0.0, 1.0);
    num_field!("max_steps", max_steps, usize, 1);
    num_field!("stall_tol", stall_tol, f64, 0.0, 1.0);
    num_field!("flatness_tol", flatness_tol, f64, 0.0, 1.0);
    num_field!("cv_tol", cv_tol, f64, 0.0, 1.0);
    num_field!("anchor_tol", anchor_tol, f64, 0.0, 1.0);
    num_field!("classical_tol", classical_tol, f64, 0.0, 1.0);
    num_field!("hausdorff_tol", hausdorff_tol, f64, 0.0, 1.0);
    num_field!("bm_pairs", bm_pairs, usize, 1);
    if let Some(v) = obj.get("seed") {
        plan.seed = v
            .as_u64()
            .ok_or_else(|| ConfigError("\"seed\" must be a nonnegative integer".into()))?;
    }
    if let Some(v) = obj.get("constraint") {
        plan.constraint = serde_json::from_value(v.clone())
            .map_err(|_| ConfigError("\"constraint\" must be volume or mean_width".into()))?;
    }
    if let Some(v) = obj.get("output_dir") {
        plan.output_dir = PathBuf::from(
            v.as_str()
                .ok_or_else(|| ConfigError("\"output_dir\" must be a string".into()))?,
        );
    }
    if let Some(v) = obj.get("cache_dir") {
        plan.cache_dir = Some(PathBuf::from(
            v.as_str()
                .ok_or_else(|| ConfigError("\"cache_dir\" must be a string".into()))?,
        ));
    }

    // kind-specific requirements
    match plan.kind {
        ExperimentKind::Capacity | ExperimentKind::Flow => {
            if plan.shape.is_none() {
                return Err(ConfigError(format!(
                    "kind \"{}\" requires a \"shape\"",
                    plan.kind.as_str()
                )));
            }
        }
        _ => {}
    }
    Ok(plan)
}

pub fn parse_config(path: &std::path::Path) -> Result<ExperimentPlan, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

/// Canonical serialization for provenance hashing.
pub fn canonical_plan_json(plan: &ExperimentPlan) -> String {
    // serde_json with struct order is deterministic; re-serialize through a
    // BTreeMap to make it order-canonical as well
    let v = serde_json::to_value(plan).expect("plan serializes");
    fn sort(v: Value) -> Value {
        match v {
            Value::Object(map) => {
                let sorted: BTreeMap<String, Value> =
                    map.into_iter().map(|(k, x)| (k, sort(x))).collect();
                Value::Object(sorted.into_iter().collect())
            }
            Value::Array(a) => Value::Array(a.into_iter().map(sort).collect()),
            other => other,
        }
    }
    serde_json::to_string(&sort(v)).expect("canonical json")
}
