//! The on-disk model format: a JSON document describing players, places,
//! transitions, arcs, the initial marking, and optionally a stage-game
//! reward table and discount factor. Parsing is lossless and strict
//! (unknown keys are rejected with position info); export emits a
//! canonical, key-order-normalized form that reparses byte-identically.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::RewardTable;
use crate::net::{
    validate_net, Arc, Marking, NetDefinition, Node, Place, Player, StateTag, Transition, Violation,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Semantic { path: String, message: String },
    #[error("model fails net validation:{}", .0.iter().map(|v| format!("\n  - {v}")).collect::<String>())]
    Validation(Vec<Violation>),
}

fn semantic(path: impl Into<String>, message: impl Into<String>) -> ModelError {
    ModelError::Semantic {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    schema_version: u32,
    players: Vec<Player>,
    places: Vec<PlaceDoc>,
    transitions: Vec<TransitionDoc>,
    arcs: Vec<ArcDoc>,
    initial_marking: MarkingDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rewards_table: Option<RewardTableDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    discount: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaceDoc {
    id: String,
    description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag: Option<StateTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    id: String,
    owner: Player,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    routing_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rewards: Option<Vec<f64>>,
    description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcDoc {
    from: String,
    to: String,
}

/// Either a list of place ids holding one token each, or a map from place
/// id to token count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum MarkingDoc {
    List(Vec<String>),
    Counts(BTreeMap<String, u64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RewardTableDoc {
    #[serde(rename = "Aa1")]
    aa1: f64,
    #[serde(rename = "An1")]
    an1: f64,
    #[serde(rename = "Dd1")]
    dd1: f64,
    #[serde(rename = "Dn1")]
    dn1: f64,
    #[serde(rename = "Aa2")]
    aa2: f64,
    #[serde(rename = "An2")]
    an2: f64,
    #[serde(rename = "Dd2")]
    dd2: f64,
    #[serde(rename = "Dn2")]
    dn2: f64,
}

impl From<RewardTableDoc> for RewardTable {
    fn from(doc: RewardTableDoc) -> RewardTable {
        RewardTable {
            attacker: [[doc.aa1, doc.an1], [doc.dd1, doc.dn1]],
            defender: [[doc.aa2, doc.an2], [doc.dd2, doc.dn2]],
        }
    }
}

impl From<&RewardTable> for RewardTableDoc {
    fn from(table: &RewardTable) -> RewardTableDoc {
        RewardTableDoc {
            aa1: table.attacker[0][0],
            an1: table.attacker[0][1],
            dd1: table.attacker[1][0],
            dn1: table.attacker[1][1],
            aa2: table.defender[0][0],
            an2: table.defender[0][1],
            dd2: table.defender[1][0],
            dn2: table.defender[1][1],
        }
    }
}

/// A parsed model: the net plus the optional game annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedModel {
    pub net: NetDefinition,
    pub rewards: Option<RewardTable>,
    pub discount: Option<f64>,
}

/// Parses a model document. Syntax and schema problems carry the line and
/// column; semantic problems carry the field path; a structurally broken
/// net is reported through its full validation report.
pub fn parse_model(text: &str) -> Result<ParsedModel, ModelError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        if e.is_syntax() || e.is_eof() {
            ModelError::Syntax {
                line,
                column,
                message,
            }
        } else {
            ModelError::Schema {
                line,
                column,
                message,
            }
        }
    })?;
    lower(doc)
}

fn lower(doc: ModelDoc) -> Result<ParsedModel, ModelError> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(semantic(
            "schema_version",
            format!(
                "unsupported version {}, expected {SCHEMA_VERSION}",
                doc.schema_version
            ),
        ));
    }

    let places: Vec<Place> = doc
        .places
        .iter()
        .map(|p| Place {
            label: p.id.clone(),
            description: p.description.clone(),
            tag: p.tag.unwrap_or_default(),
        })
        .collect();

    let mut transitions = Vec::with_capacity(doc.transitions.len());
    for (i, t) in doc.transitions.iter().enumerate() {
        let routing_prob = t.routing_prob.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&routing_prob) {
            return Err(semantic(
                format!("transitions[{i}].routing_prob"),
                format!("{routing_prob} outside [0,1]"),
            ));
        }
        let rate = t.rate.unwrap_or(1.0);
        if !rate.is_finite() || rate <= 0.0 {
            return Err(semantic(
                format!("transitions[{i}].rate"),
                format!("{rate} is not positive"),
            ));
        }
        let rewards = t
            .rewards
            .clone()
            .unwrap_or_else(|| vec![0.0; doc.players.len()]);
        if rewards.len() != doc.players.len() {
            return Err(semantic(
                format!("transitions[{i}].rewards"),
                format!(
                    "{} entries for {} players",
                    rewards.len(),
                    doc.players.len()
                ),
            ));
        }
        transitions.push(Transition {
            label: t.id.clone(),
            owner: t.owner,
            routing_prob,
            rate,
            rewards,
            description: t.description.clone(),
        });
    }

    let place_index = |label: &str| places.iter().position(|p| p.label == label);
    let transition_index = |label: &str| transitions.iter().position(|t| t.label == label);

    let mut arcs = Vec::with_capacity(doc.arcs.len());
    for (i, arc) in doc.arcs.iter().enumerate() {
        let resolve = |label: &str, path: String| -> Result<Node, ModelError> {
            match (place_index(label), transition_index(label)) {
                (Some(p), None) => Ok(Node::Place(crate::net::PlaceId(p))),
                (None, Some(t)) => Ok(Node::Transition(crate::net::TransitionId(t))),
                (Some(p), Some(_)) => Ok(Node::Place(crate::net::PlaceId(p))),
                (None, None) => Err(semantic(
                    path,
                    format!("`{label}` names no place or transition"),
                )),
            }
        };
        arcs.push(Arc {
            from: resolve(&arc.from, format!("arcs[{i}].from"))?,
            to: resolve(&arc.to, format!("arcs[{i}].to"))?,
        });
    }

    let mut counts = vec![0usize; places.len()];
    match &doc.initial_marking {
        MarkingDoc::List(labels) => {
            for label in labels {
                let p = place_index(label).ok_or_else(|| {
                    semantic("initial_marking", format!("unknown place `{label}`"))
                })?;
                counts[p] += 1;
            }
        }
        MarkingDoc::Counts(map) => {
            for (label, &n) in map {
                let p = place_index(label).ok_or_else(|| {
                    semantic("initial_marking", format!("unknown place `{label}`"))
                })?;
                counts[p] += n as usize;
            }
        }
    }
    let initial_marking = Marking::from_counts(&counts, doc.players.len());

    if let Some(discount) = doc.discount {
        if !(discount > 0.0 && discount < 1.0) {
            return Err(semantic(
                "discount",
                format!("{discount} outside the open interval (0,1)"),
            ));
        }
    }

    let net = NetDefinition::from_parts(doc.players, places, transitions, arcs, initial_marking);
    let violations = validate_net(&net);
    if !violations.is_empty() {
        return Err(ModelError::Validation(violations));
    }

    Ok(ParsedModel {
        net,
        rewards: doc.rewards_table.map(RewardTable::from),
        discount: doc.discount,
    })
}

/// Serializes a net (and optional game annotations) to the canonical
/// document form: fixed key order, two-space indentation, defaults
/// omitted, trailing newline. Exporting a parsed document reproduces the
/// exported bytes exactly.
pub fn export_model(
    net: &NetDefinition,
    rewards: Option<&RewardTable>,
    discount: Option<f64>,
) -> String {
    let places = net
        .places()
        .iter()
        .map(|p| PlaceDoc {
            id: p.label.clone(),
            description: p.description.clone(),
            tag: (p.tag != StateTag::Plain).then_some(p.tag),
        })
        .collect();

    let transitions = net
        .transitions()
        .iter()
        .map(|t| TransitionDoc {
            id: t.label.clone(),
            owner: t.owner,
            routing_prob: (t.routing_prob != 1.0).then_some(t.routing_prob),
            rate: (t.rate != 1.0).then_some(t.rate),
            rewards: t
                .rewards
                .iter()
                .any(|&r| r != 0.0)
                .then(|| t.rewards.clone()),
            description: t.description.clone(),
        })
        .collect();

    let label = |node: Node| match node {
        Node::Place(p) => net.place(p).label.clone(),
        Node::Transition(t) => net.transition(t).label.clone(),
    };
    let arcs = net
        .arcs()
        .iter()
        .map(|a| ArcDoc {
            from: label(a.from),
            to: label(a.to),
        })
        .collect();

    let counts = net.initial_marking().counts();
    let initial_marking = if counts.iter().all(|&c| c <= 1) {
        MarkingDoc::List(
            net.place_ids()
                .filter(|&p| net.initial_marking().count(p) == 1)
                .map(|p| net.place(p).label.clone())
                .collect(),
        )
    } else {
        MarkingDoc::Counts(
            net.place_ids()
                .filter(|&p| net.initial_marking().count(p) > 0)
                .map(|p| {
                    (
                        net.place(p).label.clone(),
                        net.initial_marking().count(p) as u64,
                    )
                })
                .collect(),
        )
    };

    let doc = ModelDoc {
        schema_version: SCHEMA_VERSION,
        players: net.players().to_vec(),
        places,
        transitions,
        arcs,
        initial_marking,
        rewards_table: rewards.map(RewardTableDoc::from),
        discount,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("model serialization is infallible");
    text.push('\n');
    text
}
