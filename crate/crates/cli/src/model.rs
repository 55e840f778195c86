//! The JSON model file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use weighted_thermo::equilibrium::InvariantMeasure;
use weighted_thermo::potential::PotentialEntry;
use weighted_thermo::{FactorChain, FiniteDepth, WeightVector};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Weights {
    Direct { a: WeightVector },
    LogScales { log_scales: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budget {
    pub n_max: usize,
    pub q_max: f64,
    pub q_steps: usize,
    /// Target marginal error for projections.
    pub tol: f64,
    pub max_words: u64,
    /// Largest block length accepted by `project-marginals`.
    pub max_block: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            n_max: 12,
            q_max: 40.0,
            q_steps: 81,
            tol: 1e-9,
            max_words: 10_000_000,
            max_block: 3,
        }
    }
}

const TOP_LEVEL_KEYS: [&str; 6] = ["chain", "a", "log_scales", "potentials", "measures", "budget"];

#[derive(Debug, Clone, Deserialize)]
struct RawModel {
    chain: FactorChain,
    #[serde(flatten)]
    weights: Weights,
    #[serde(default)]
    potentials: BTreeMap<String, PotentialEntry>,
    #[serde(default)]
    measures: BTreeMap<String, InvariantMeasure>,
    #[serde(default)]
    budget: Budget,
}

/// A validated model: every potential and measure is checked against the
/// chain at load time.
#[derive(Debug, Clone)]
pub struct Model {
    pub chain: FactorChain,
    pub a: WeightVector,
    pub potentials: BTreeMap<String, Vec<FiniteDepth>>,
    pub measures: BTreeMap<String, InvariantMeasure>,
    pub budget: Budget,
}

impl Model {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Model(format!("model file: {e}")))?;
        // `flatten` rules out deny_unknown_fields, so check keys by hand.
        if let Some(obj) = value.as_object() {
            if let Some(k) = obj.keys().find(|k| !TOP_LEVEL_KEYS.contains(&k.as_str())) {
                return Err(CliError::Model(format!("model file: unknown field {k:?}")));
            }
            if obj.contains_key("a") == obj.contains_key("log_scales") {
                return Err(CliError::Model(
                    "model file: give exactly one of \"a\" and \"log_scales\"".into(),
                ));
            }
        }
        let raw: RawModel =
            serde_json::from_value(value).map_err(|e| CliError::Model(format!("model file: {e}")))?;
        let a = match raw.weights {
            Weights::Direct { a } => a,
            Weights::LogScales { log_scales } => WeightVector::from_log_scales(&log_scales)?,
        };
        a.check_against(&raw.chain)?;
        let mut potentials = BTreeMap::new();
        for (name, entry) in raw.potentials {
            let built = entry
                .build(&raw.chain)
                .map_err(|e| CliError::Model(format!("potential {name:?}: {e}")))?;
            potentials.insert(name, built);
        }
        let na = raw.chain.alphabet_size(0);
        for (name, m) in &raw.measures {
            if m.alphabet() != na {
                return Err(CliError::Model(format!(
                    "measure {name:?} has {} symbols, the base alphabet has {na}",
                    m.alphabet()
                )));
            }
        }
        let b = raw.budget;
        if b.q_steps == 0 || !b.q_max.is_finite() || b.q_max < 0.0 || !(b.tol > 0.0) {
            return Err(CliError::Model(
                "budget: q_steps must be positive, q_max finite and non-negative, tol positive".into(),
            ));
        }
        Ok(Self {
            chain: raw.chain,
            a,
            potentials,
            measures: raw.measures,
            budget: b,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Model(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn potential(&self, name: &str) -> Result<&[FiniteDepth], CliError> {
        self.potentials.get(name).map(Vec::as_slice).ok_or_else(|| {
            CliError::Model(format!(
                "no potential named {name:?} (available: {})",
                list(self.potentials.keys())
            ))
        })
    }

    pub fn scalar_potential(&self, name: &str) -> Result<&FiniteDepth, CliError> {
        match self.potential(name)? {
            [p] => Ok(p),
            v => Err(CliError::Model(format!(
                "potential {name:?} has {} components; this command takes a scalar potential",
                v.len()
            ))),
        }
    }

    pub fn measure(&self, name: &str) -> Result<&InvariantMeasure, CliError> {
        self.measures.get(name).ok_or_else(|| {
            CliError::Model(format!(
                "no measure named {name:?} (available: {})",
                list(self.measures.keys())
            ))
        })
    }
}

fn list<'a>(names: impl Iterator<Item = &'a String>) -> String {
    let v: Vec<&str> = names.map(String::as_str).collect();
    if v.is_empty() {
        "none".into()
    } else {
        v.join(", ")
    }
}
