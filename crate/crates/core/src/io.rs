//! JSON file formats for models, pair relations and proofs.
//!
//! Models:
//! `{"type":"neighborhood","states":["s","t"],"N":{"s":[[],["s","t"]],"t":[]},"V":{"p":["s"]}}`
//! or `{"type":"kripke","states":[...],"R":{"s":["t"],"t":[]},"V":{...}}`.
//! Relations: `{"pairs":[["s","s'"]]}`. Output is compact with sorted sets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bisim::PairRelation;
use crate::model::{AnyModel, ModelDescription, ModelError, ModelRef, Violation};
use crate::proofsys::ProofScript;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid model: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Model(ModelError),
    #[error("unknown {side} state {name:?} in relation")]
    UnknownPairState { side: &'static str, name: String },
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<ModelError> for IoError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Invalid(v) => IoError::Invalid(v),
            other => IoError::Model(other),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ModelFile {
    Neighborhood {
        states: Vec<String>,
        #[serde(rename = "N")]
        neighborhoods: BTreeMap<String, Vec<Vec<String>>>,
        #[serde(rename = "V", default)]
        valuation: BTreeMap<String, Vec<String>>,
    },
    Kripke {
        states: Vec<String>,
        #[serde(rename = "R")]
        successors: BTreeMap<String, Vec<String>>,
        #[serde(rename = "V", default)]
        valuation: BTreeMap<String, Vec<String>>,
    },
}

pub fn parse_description(text: &str) -> Result<ModelDescription, IoError> {
    Ok(match serde_json::from_str(text)? {
        ModelFile::Neighborhood {
            states,
            neighborhoods,
            valuation,
        } => ModelDescription::Neighborhood {
            states,
            neighborhoods,
            valuation,
        },
        ModelFile::Kripke {
            states,
            successors,
            valuation,
        } => ModelDescription::Kripke {
            states,
            successors,
            valuation,
        },
    })
}

pub fn model_from_json(text: &str) -> Result<AnyModel, IoError> {
    Ok(parse_description(text)?.build()?)
}

pub fn description_to_value(description: ModelDescription) -> serde_json::Value {
    let file = match description {
        ModelDescription::Neighborhood {
            states,
            neighborhoods,
            valuation,
        } => ModelFile::Neighborhood {
            states,
            neighborhoods,
            valuation,
        },
        ModelDescription::Kripke {
            states,
            successors,
            valuation,
        } => ModelFile::Kripke {
            states,
            successors,
            valuation,
        },
    };
    serde_json::to_value(file).expect("serializable")
}

pub fn model_to_value<'a>(model: impl Into<ModelRef<'a>>) -> serde_json::Value {
    description_to_value(match model.into() {
        ModelRef::Neighborhood(m) => m.describe(),
        ModelRef::Kripke(k) => k.describe(),
    })
}

pub fn model_to_json<'a>(model: impl Into<ModelRef<'a>>) -> String {
    model_to_value(model).to_string()
}

#[derive(Serialize, Deserialize)]
struct RelationFile {
    pairs: Vec<(String, String)>,
}

pub fn relation_from_json(
    text: &str,
    left: &[String],
    right: &[String],
) -> Result<PairRelation, IoError> {
    let file: RelationFile = serde_json::from_str(text)?;
    file.pairs
        .iter()
        .map(|(a, b)| {
            let i = left
                .iter()
                .position(|s| s == a)
                .ok_or_else(|| IoError::UnknownPairState {
                    side: "left",
                    name: a.clone(),
                })?;
            let j = right
                .iter()
                .position(|s| s == b)
                .ok_or_else(|| IoError::UnknownPairState {
                    side: "right",
                    name: b.clone(),
                })?;
            Ok((i, j))
        })
        .collect()
}

pub fn relation_to_value(z: &PairRelation, left: &[String], right: &[String]) -> serde_json::Value {
    let pairs = z
        .iter()
        .map(|(i, j)| (left[i].clone(), right[j].clone()))
        .collect();
    serde_json::to_value(RelationFile { pairs }).expect("serializable")
}

pub fn relation_to_json(z: &PairRelation, left: &[String], right: &[String]) -> String {
    relation_to_value(z, left, right).to_string()
}

pub fn proof_from_json(text: &str) -> Result<ProofScript, IoError> {
    Ok(serde_json::from_str(text)?)
}
