//! Stochastic game Petri nets for Mobile IP attack/defense analysis.
//!
//! The library models binding-update attacks and their defenses as Petri
//! nets whose transitions are partitioned between an attacker, a defender,
//! and the environment. From a model it can:
//!
//! - solve the mixed-strategy equilibrium of the attacker-defender stage
//!   game ([`game`]),
//! - reduce a tagged model to its attack-defend skeleton and explore the
//!   reachable markings ([`reachability`]),
//! - compute steady-state probabilities of the outcome states ([`chain`]),
//! - cross-check the analytic results with seeded Monte Carlo runs
//!   ([`sim`]),
//! - read and write models as JSON documents ([`model`]) and run the whole
//!   pipeline in one call ([`analysis`]).
//!
//! Eight ready-made Mobile IP models (four attacks, four defenses) ship in
//! [`catalog`].
//!
//! With the default `parallel` feature, Monte Carlo runs fan out on a
//! rayon pool; results are bit-identical to the sequential path.

pub mod analysis;
pub mod catalog;
pub mod chain;
pub mod game;
pub mod model;
pub mod net;
pub mod reachability;
pub mod sim;

pub use analysis::{analyze, sweep, AnalysisInput, AnalysisOptions, AnalysisReport, SweepRow};
pub use catalog::{CatalogEntry, CatalogKey};
pub use game::{solve_ne, RewardTable, StrategyPair};
pub use model::{export_model, parse_model, ParsedModel};
pub use net::{validate_net, Marking, NetDefinition};
pub use reachability::{build_reachability, reduce_to_attack_defend, OutcomeDistribution};
pub use sim::{simulate, simulate_sequential, SimConfig, SimResult};
