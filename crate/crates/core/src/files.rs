//! JSON wire formats for chains and cost specifications.
//!
//! A chain file looks like
//! `{"states": ["a", "b"], "P": [[0, 1], [1, 0]], "init": "a", "labels": [0, 1]}`
//! and a cost spec is either `{"type": "matrix", "values": [[..], ..]}` or
//! `{"type": "labels_absdiff", "scale": "none" | "one_minus_gamma"}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::{
    cost_from_labels, validate_chain, GroundCost, LabelScale, MarkovChain, Violation,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    pub states: Vec<String>,
    #[serde(rename = "P")]
    pub kernel: Vec<Vec<f64>>,
    pub init: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<f64>>,
}

impl ChainFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Builds the chain without rejecting it, together with its
    /// violations. An unknown `init` id is reported as out of range.
    pub fn to_chain_unchecked(&self) -> (MarkovChain, Vec<Violation>) {
        let init = self.states.iter().position(|s| *s == self.init).unwrap_or(self.states.len());
        let chain = MarkovChain::from_parts(
            self.states.clone(),
            self.kernel.clone(),
            init,
            self.labels.clone(),
        );
        let violations = validate_chain(&chain);
        (chain, violations)
    }

    pub fn to_chain(&self) -> Result<MarkovChain> {
        let (chain, violations) = self.to_chain_unchecked();
        if violations.is_empty() {
            Ok(chain)
        } else {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            Err(Error::InvalidChain(msg.join("; ")))
        }
    }
}

impl From<&MarkovChain> for ChainFile {
    fn from(chain: &MarkovChain) -> Self {
        Self {
            states: chain.states().to_vec(),
            kernel: chain.kernel_rows(),
            init: chain.states()[chain.init()].clone(),
            labels: chain.labels().map(<[f64]>::to_vec),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CostSpec {
    Matrix { values: Vec<Vec<f64>> },
    LabelsAbsdiff { scale: LabelScale },
}

impl Default for CostSpec {
    fn default() -> Self {
        CostSpec::LabelsAbsdiff { scale: LabelScale::None }
    }
}

impl CostSpec {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn build(&self, x: &MarkovChain, y: &MarkovChain, gamma: f64) -> Result<GroundCost> {
        match self {
            CostSpec::Matrix { values } => {
                if values.len() != x.len() || values.iter().any(|r| r.len() != y.len()) {
                    let cols = values.first().map_or(0, Vec::len);
                    return Err(Error::DimensionMismatch {
                        expected: format!("{}x{} cost matrix", x.len(), y.len()),
                        got: format!("{}x{}", values.len(), cols),
                    });
                }
                GroundCost::explicit(values.clone())
            }
            CostSpec::LabelsAbsdiff { scale } => cost_from_labels(x, y, *scale, gamma),
        }
    }
}
