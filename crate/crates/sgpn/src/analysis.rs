//! The end-to-end evaluation pipeline: equilibrium, reduction,
//! reachability, transition matrix, stationary distribution, outcome
//! report. Each stage's failure is reported under the stage that raised
//! it.

use serde::Serialize;
use thiserror::Error;

use crate::catalog::{CatalogEntry, ProvenanceNote};
use crate::chain::{build_tpm, outcome_report, stationary_distribution, ChainError};
use crate::game::{indifference_residuals, solve_ne, EquilibriumError, RewardTable, StrategyPair};
use crate::model::ParsedModel;
use crate::net::NetDefinition;
use crate::reachability::{
    build_reachability, reduce_to_attack_defend, OutcomeDistribution, ReachabilityError,
    ReduceError,
};

/// A model handed to the pipeline: a net plus optional game annotations
/// and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisInput {
    pub name: String,
    pub net: NetDefinition,
    pub rewards: Option<RewardTable>,
    /// Discount factor carried from the model file, if any.
    pub discount: Option<f64>,
    pub provenance: Vec<ProvenanceNote>,
}

impl From<CatalogEntry> for AnalysisInput {
    fn from(entry: CatalogEntry) -> Self {
        AnalysisInput {
            name: entry.key.to_string(),
            net: entry.net,
            rewards: entry.rewards,
            discount: None,
            provenance: entry.provenance,
        }
    }
}

impl AnalysisInput {
    pub fn from_parsed(name: impl Into<String>, parsed: ParsedModel) -> Self {
        AnalysisInput {
            name: name.into(),
            net: parsed.net,
            rewards: parsed.rewards,
            discount: parsed.discount,
            provenance: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    /// Strategy to analyze; defaults to the solved equilibrium.
    pub strategy: Option<StrategyPair>,
    pub max_nodes: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            strategy: None,
            max_nodes: 4096,
        }
    }
}

/// Everything the pipeline computed, full precision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub model: String,
    pub strategy: StrategyPair,
    /// Whether the strategy came from the solved equilibrium rather than
    /// a caller override.
    pub strategy_from_equilibrium: bool,
    /// Residuals of the two indifference equations at the strategy, when
    /// the model carries rewards.
    pub indifference_residuals: Option<(f64, f64)>,
    pub outcome: OutcomeDistribution,
    pub stationary: Vec<f64>,
    pub reach_nodes: usize,
    pub reach_edges: usize,
    pub provenance: Vec<ProvenanceNote>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("equilibrium stage: {0}")]
    Equilibrium(#[from] EquilibriumError),
    #[error("reduction stage: {0}")]
    Reduction(#[from] ReduceError),
    #[error("reachability stage: {0}")]
    Reachability(#[from] ReachabilityError),
    #[error("reachability stage: graph truncated at {max_nodes} nodes; raise the node budget")]
    Truncated { max_nodes: usize },
    #[error("chain stage: {0}")]
    Chain(#[from] ChainError),
    #[error("configuration: {0}")]
    Config(String),
}

/// Runs the whole pipeline on a tagged model: solve the equilibrium
/// (unless a strategy is supplied), reduce to the attack-defend skeleton,
/// build the reachability graph and transition matrix, and report the
/// stationary outcome distribution.
pub fn analyze(
    input: &AnalysisInput,
    options: &AnalysisOptions,
) -> Result<AnalysisReport, PipelineError> {
    let mut warnings = Vec::new();
    let (strategy, from_equilibrium) = match (options.strategy, &input.rewards) {
        (Some(s), rewards) => {
            if rewards.is_some() {
                warnings.push("strategy override in effect; equilibrium not used".to_string());
            }
            (s, false)
        }
        (None, Some(table)) => (solve_ne(table)?, true),
        (None, None) => {
            return Err(PipelineError::Config(
                "model has no reward table; supply a strategy".to_string(),
            ))
        }
    };

    let residuals = input
        .rewards
        .as_ref()
        .map(|table| indifference_residuals(table, &strategy));

    let reduced = reduce_to_attack_defend(&input.net)?;
    let graph = build_reachability(&reduced, &strategy, options.max_nodes)?;
    if graph.truncated {
        return Err(PipelineError::Truncated {
            max_nodes: options.max_nodes,
        });
    }
    let tpm = build_tpm(&graph);
    let stationary = stationary_distribution(&tpm)?;
    let outcome = outcome_report(&reduced, &graph, &stationary)?;

    Ok(AnalysisReport {
        model: input.name.clone(),
        strategy,
        strategy_from_equilibrium: from_equilibrium,
        indifference_residuals: residuals,
        outcome,
        reach_nodes: graph.node_count(),
        reach_edges: graph.edge_count(),
        stationary: stationary.into_vec(),
        provenance: input.provenance.clone(),
        warnings,
    })
}

/// Which strategy component a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    AttackProbability,
    DefendProbability,
}

impl SweepParameter {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepParameter::AttackProbability => "p_attack",
            SweepParameter::DefendProbability => "p_defend",
        }
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "pa" | "p_a" | "p_attack" => Ok(SweepParameter::AttackProbability),
            "pd" | "p_d" | "p_defend" => Ok(SweepParameter::DefendProbability),
            other => Err(format!(
                "unknown sweep parameter `{other}`; use p_attack or p_defend"
            )),
        }
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: &'static str,
    pub value: f64,
    pub no_attack: f64,
    pub success: f64,
    pub defended: f64,
}

/// Sweeps one strategy component over a grid, holding the other at the
/// equilibrium (or at a supplied base strategy), and reports the outcome
/// distribution at each point through the full pipeline.
pub fn sweep(
    input: &AnalysisInput,
    parameter: SweepParameter,
    from: f64,
    to: f64,
    step: f64,
    options: &AnalysisOptions,
) -> Result<Vec<SweepRow>, PipelineError> {
    if !step.is_finite() || step <= 0.0 {
        return Err(PipelineError::Config(format!(
            "sweep step {step} must be positive"
        )));
    }
    if from > to {
        return Err(PipelineError::Config(format!(
            "sweep range is empty: from {from} > to {to}"
        )));
    }
    if !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) {
        return Err(PipelineError::Config(format!(
            "sweep range [{from}, {to}] leaves [0,1]"
        )));
    }

    let base = match (options.strategy, &input.rewards) {
        (Some(s), _) => s,
        (None, Some(table)) => solve_ne(table)?,
        (None, None) => {
            return Err(PipelineError::Config(
                "model has no reward table; supply a base strategy".to_string(),
            ))
        }
    };

    let points = ((to - from) / step + 1e-9).floor() as usize + 1;
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let value = (from + i as f64 * step).min(to);
        let strategy = match parameter {
            SweepParameter::AttackProbability => StrategyPair::new(value, base.p_defend),
            SweepParameter::DefendProbability => StrategyPair::new(base.p_attack, value),
        };
        let point_options = AnalysisOptions {
            strategy: Some(strategy),
            max_nodes: options.max_nodes,
        };
        let report = analyze(input, &point_options)?;
        rows.push(SweepRow {
            param: parameter.column_name(),
            value,
            no_attack: report.outcome.no_attack,
            success: report.outcome.attack_success,
            defended: report.outcome.attack_defended,
        });
    }
    Ok(rows)
}
