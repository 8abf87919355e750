//! JSON mapping specification files.
//!
//! ```json
//! {
//!   "p": 4,
//!   "interval": { "lower": 0, "upper": null, "lower_open": true, "upper_open": true },
//!   "means": [ { "kind": "power", "order": -1, "arity": 2 }, ... ],
//!   "alpha": [[1, 2], [2, 3], [3, 4], [4, 1]]
//! }
//! ```
//!
//! `null` endpoints stand for infinities. Mean kinds `harmonic`,
//! `geometric`, `arithmetic` and `quadratic` are aliases for power means of
//! order -1, 0, 1 and 2 and are written back in the `power` form. Indices
//! in `alpha` are 1-based.

use std::io::Read;
use std::path::Path;

use meanmap_core::averaging::{compose, AveragingMapping, ComposedMapping, IndexVector};
use meanmap_core::mean::{make_power_mean, PowerMeanSpec};
use meanmap_core::Interval;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fixtures;

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed spec: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error("unknown builtin fixture `{0}`")]
    UnknownFixture(String),
}

fn invalid(location: impl Into<String>, message: impl ToString) -> SpecError {
    SpecError::Invalid {
        location: location.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    #[serde(default)]
    pub lower_open: bool,
    #[serde(default)]
    pub upper_open: bool,
}

impl Default for IntervalSpec {
    fn default() -> Self {
        Self {
            lower: Some(0.0),
            upper: None,
            lower_open: true,
            upper_open: true,
        }
    }
}

impl IntervalSpec {
    pub fn to_interval(&self) -> Result<Interval, meanmap_core::Error> {
        Interval::new(
            self.lower.unwrap_or(f64::NEG_INFINITY),
            self.upper.unwrap_or(f64::INFINITY),
            self.lower_open,
            self.upper_open,
        )
    }
}

/// A mean entry after alias resolution. Serializes as
/// `{"kind": "power", "order": s, "arity": n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMean", into = "RawMean")]
pub struct MeanEntry {
    pub order: f64,
    pub arity: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMean {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<f64>,
    arity: usize,
}

impl TryFrom<RawMean> for MeanEntry {
    type Error = String;

    fn try_from(raw: RawMean) -> Result<Self, String> {
        let alias = match raw.kind.as_str() {
            "power" => None,
            "harmonic" => Some(-1.0),
            "geometric" => Some(0.0),
            "arithmetic" => Some(1.0),
            "quadratic" => Some(2.0),
            other => return Err(format!("unknown mean kind `{other}`")),
        };
        let order = match (alias, raw.order) {
            (None, Some(o)) => o,
            (None, None) => return Err("power mean needs an `order`".into()),
            (Some(a), None) => a,
            (Some(a), Some(o)) if a == o => a,
            (Some(a), Some(o)) => {
                return Err(format!("kind `{}` has order {a}, but order {o} was given", raw.kind))
            }
        };
        Ok(MeanEntry {
            order,
            arity: raw.arity,
        })
    }
}

impl From<MeanEntry> for RawMean {
    fn from(m: MeanEntry) -> Self {
        RawMean {
            kind: "power".into(),
            order: Some(m.order),
            arity: m.arity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingSpecFile {
    pub p: usize,
    #[serde(default)]
    pub interval: IntervalSpec,
    pub means: Vec<MeanEntry>,
    pub alpha: Vec<Vec<i64>>,
}

/// Samples used to falsify declared mean flags when a spec is loaded.
const LOAD_CHECK_SAMPLES: usize = 64;

impl MappingSpecFile {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files always serialize")
    }

    /// Validates the file and builds the composed mapping.
    pub fn build(&self) -> Result<ComposedMapping, SpecError> {
        if self.p == 0 {
            return Err(invalid("p", "must be at least 1"));
        }
        if self.means.len() != self.p {
            return Err(invalid(
                "means",
                format!("expected p = {} entries, found {}", self.p, self.means.len()),
            ));
        }
        if self.alpha.len() != self.p {
            return Err(invalid(
                "alpha",
                format!("expected p = {} rows, found {}", self.p, self.alpha.len()),
            ));
        }
        let interval = self.interval.to_interval().map_err(|e| invalid("interval", e))?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut means = Vec::with_capacity(self.p);
        for (i, entry) in self.means.iter().enumerate() {
            let loc = format!("means[{}]", i + 1);
            let spec = PowerMeanSpec::new(entry.order, entry.arity).map_err(|e| invalid(&loc, e))?;
            let mean = make_power_mean(spec)
                .and_then(|m| m.restricted(interval))
                .and_then(|m| m.validated(&mut rng, LOAD_CHECK_SAMPLES))
                .map_err(|e| invalid(&loc, e))?;
            means.push(mean);
        }
        for (i, (row, entry)) in self.alpha.iter().zip(&self.means).enumerate() {
            if row.len() != entry.arity {
                return Err(invalid(
                    format!("alpha row {}", i + 1),
                    format!("has {} entries but means[{}] has arity {}", row.len(), i + 1, entry.arity),
                ));
            }
        }
        let alpha = IndexVector::from_one_based(&self.alpha, self.p).map_err(|e| invalid("alpha", e))?;
        let base = AveragingMapping::new(means).map_err(|e| invalid("means", e))?;
        compose(base, alpha).map_err(|e| invalid("spec", e))
    }
}

/// A parsed and validated spec together with its mapping.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub file: MappingSpecFile,
    pub mapping: ComposedMapping,
}

pub fn parse_spec(text: &str) -> Result<LoadedSpec, SpecError> {
    let file = MappingSpecFile::from_json(text)?;
    let mapping = file.build()?;
    Ok(LoadedSpec { file, mapping })
}

/// Loads a spec from a path, from stdin when the path is `-`, or from a
/// bundled fixture when it reads `builtin:<name>`.
pub fn load_spec(path: &str) -> Result<LoadedSpec, SpecError> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|source| SpecError::Io {
                path: "<stdin>".into(),
                source,
            })?;
        buf
    } else if let Some(name) = path.strip_prefix("builtin:") {
        fixtures::get(name)
            .ok_or_else(|| SpecError::UnknownFixture(name.into()))?
            .to_string()
    } else {
        std::fs::read_to_string(Path::new(path)).map_err(|source| SpecError::Io {
            path: path.into(),
            source,
        })?
    };
    parse_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_example2_parses_to_cyclic_mapping() {
        let spec = parse_spec(fixtures::get("example2").unwrap()).unwrap();
        let orders: Vec<f64> = spec.file.means.iter().map(|m| m.order).collect();
        assert_eq!(orders, vec![-1.0, 0.0, 1.0, 2.0]);
        assert_eq!(spec.mapping.alpha().to_one_based(), vec![vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 1]]);
        let y = spec.mapping.apply(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((y[1] - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_index_reports_row_and_position() {
        let text = r#"{"p":2,"means":[{"kind":"arithmetic","arity":2},{"kind":"arithmetic","arity":2}],
                       "alpha":[[1,2],[0,1]]}"#;
        let err = parse_spec(text).unwrap_err().to_string();
        assert!(err.contains("row 2, position 1"), "{err}");
        assert!(err.contains("index 0"), "{err}");
    }

    #[test]
    fn means_length_mismatch() {
        let text = r#"{"p":2,"means":[{"kind":"arithmetic","arity":2}],"alpha":[[1,2],[2,1]]}"#;
        let err = parse_spec(text).unwrap_err().to_string();
        assert!(err.starts_with("means:"), "{err}");
    }

    #[test]
    fn row_arity_mismatch() {
        let text = r#"{"p":2,"means":[{"kind":"arithmetic","arity":2},{"kind":"arithmetic","arity":3}],
                       "alpha":[[1,2],[2,1]]}"#;
        let err = parse_spec(text).unwrap_err().to_string();
        assert!(err.contains("alpha row 2"), "{err}");
    }

    #[test]
    fn alias_conflicts_and_unknown_kinds() {
        let bad = r#"{"p":1,"means":[{"kind":"harmonic","order":2,"arity":1}],"alpha":[[1]]}"#;
        assert!(parse_spec(bad).is_err());
        let unknown = r#"{"p":1,"means":[{"kind":"gini","arity":1}],"alpha":[[1]]}"#;
        assert!(parse_spec(unknown).unwrap_err().to_string().contains("gini"));
        let ok = r#"{"p":1,"means":[{"kind":"harmonic","order":-1,"arity":1}],"alpha":[[1]]}"#;
        assert!(parse_spec(ok).is_ok());
    }

    #[test]
    fn interval_outside_positive_reals_is_rejected() {
        let text = r#"{"p":1,"interval":{"lower":-1,"upper":1},"means":[{"kind":"arithmetic","arity":1}],"alpha":[[1]]}"#;
        let err = parse_spec(text).unwrap_err().to_string();
        assert!(err.starts_with("means[1]"), "{err}");
    }

    #[test]
    fn narrower_interval_is_honored() {
        let text = r#"{"p":1,"interval":{"lower":1,"upper":3},"means":[{"kind":"arithmetic","arity":1}],"alpha":[[1]]}"#;
        let spec = parse_spec(text).unwrap();
        assert!(spec.mapping.apply(&[0.5]).is_err());
        assert_eq!(spec.mapping.apply(&[2.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn aliases_normalize_on_output() {
        let spec = MappingSpecFile::from_json(fixtures::get("example2").unwrap()).unwrap();
        let out = spec.to_json();
        assert!(!out.contains("harmonic"));
        assert!(out.contains(r#""kind": "power""#));
        assert_eq!(MappingSpecFile::from_json(&out).unwrap(), spec);
    }
}
