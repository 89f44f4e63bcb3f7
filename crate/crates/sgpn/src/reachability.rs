//! Reachability graphs of a net under a strategy profile, and the
//! reduction of tagged models to the canonical attack-defend skeleton used
//! for steady-state analysis.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::game::{RewardTable, StrategyPair};
use crate::net::{
    choice_distribution, game_role, ChoiceRule, GameRole, Marking, NetBuilder, NetDefinition,
    NetError, Player, StateTag, TransitionId,
};

/// Cap on tokens per place during exploration; exceeding it marks the
/// graph truncated. Catalog nets are 1-bounded, so the bound only guards
/// against runaway user models.
pub const TOKEN_BOUND: usize = 8;

/// One probabilistic firing between two discovered markings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReachEdge {
    pub src: usize,
    pub dst: usize,
    pub transition: TransitionId,
    pub probability: f64,
}

/// Graph of markings reachable from the initial marking. Node 0 is the
/// initial marking; duplicate markings are merged, so cycles (such as
/// outcome states returning to ready) appear as back edges.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityGraph {
    pub nodes: Vec<Marking>,
    pub edges: Vec<ReachEdge>,
    pub terminal_nodes: Vec<usize>,
    /// Set when exploration stopped early (node budget or token bound);
    /// the graph then only covers the explored prefix.
    pub truncated: bool,
}

impl ReachabilityGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = &ReachEdge> {
        self.edges.iter().filter(move |e| e.src == node)
    }

    /// Nodes whose marking places at least one token in a place carrying
    /// the tag.
    pub fn nodes_with_tag(&self, net: &NetDefinition, tag: StateTag) -> Vec<usize> {
        let tagged = net.places_tagged(tag);
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, m)| tagged.iter().any(|&p| m.count(p) >= 1))
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReachabilityError {
    #[error("token game: {0}")]
    Net(#[from] NetError),
    #[error("probability {name} = {value} outside [0,1]")]
    Domain { name: &'static str, value: f64 },
}

/// Explores markings breadth-first from the initial marking, labelling
/// each edge with its choice probability under `strategy`. Zero-probability
/// branches are not expanded. Exploration stops and flags the graph as
/// truncated once `max_nodes` markings are discovered or a place exceeds
/// [`TOKEN_BOUND`] tokens.
pub fn build_reachability(
    net: &NetDefinition,
    strategy: &StrategyPair,
    max_nodes: usize,
) -> Result<ReachabilityGraph, ReachabilityError> {
    build_reachability_bounded(net, strategy, max_nodes, TOKEN_BOUND)
}

/// [`build_reachability`] with an explicit per-place token cap.
pub fn build_reachability_bounded(
    net: &NetDefinition,
    strategy: &StrategyPair,
    max_nodes: usize,
    token_bound: usize,
) -> Result<ReachabilityGraph, ReachabilityError> {
    let rule = ChoiceRule::Strategy(*strategy);
    let mut nodes: Vec<Marking> = vec![net.initial_marking().clone()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    index.insert(net.initial_marking().counts(), 0);
    let mut edges = Vec::new();
    let mut terminal_nodes = Vec::new();
    let mut truncated = false;

    let mut queue = VecDeque::from([0usize]);
    while let Some(src) = queue.pop_front() {
        let marking = nodes[src].clone();
        let choices = choice_distribution(net, &marking, &rule)?;
        if choices.is_empty() {
            terminal_nodes.push(src);
            continue;
        }
        for (&transition, &probability) in &choices {
            if probability == 0.0 {
                continue;
            }
            let next = crate::net::fire(net, &marking, transition)?;
            if next.counts().iter().any(|&c| c > token_bound) {
                truncated = true;
                continue;
            }
            let dst = match index.get(&next.counts()) {
                Some(&i) => i,
                None => {
                    if nodes.len() >= max_nodes {
                        truncated = true;
                        continue;
                    }
                    let i = nodes.len();
                    index.insert(next.counts(), i);
                    nodes.push(next);
                    queue.push_back(i);
                    i
                }
            };
            edges.push(ReachEdge {
                src,
                dst,
                transition,
                probability,
            });
        }
    }

    Ok(ReachabilityGraph {
        nodes,
        edges,
        terminal_nodes,
        truncated,
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error("reduction requires a place tagged `{0}`; none found")]
    MissingTag(&'static str),
    #[error("reduction requires exactly one place tagged `{tag}`; found {count}")]
    AmbiguousTag { tag: &'static str, count: usize },
}

fn unique_tagged(net: &NetDefinition, tag: StateTag) -> Result<String, ReduceError> {
    let places = net.places_tagged(tag);
    match places.as_slice() {
        [] => Err(ReduceError::MissingTag(tag.name())),
        [p] => Ok(net.place(*p).description.clone()),
        _ => Err(ReduceError::AmbiguousTag {
            tag: tag.name(),
            count: places.len(),
        }),
    }
}

/// Collapses a tagged model to the canonical attack-defend skeleton:
/// the ready place branches on the attacker (attack or stand down), a
/// contested place branches on the defender (defend or pass), and every
/// outcome returns to ready. Descriptions carry over from the tagged
/// source places; untagged places are dropped. The construction is
/// tag-driven, so a net already in reduced shape maps onto itself.
pub fn reduce_to_attack_defend(net: &NetDefinition) -> Result<NetDefinition, ReduceError> {
    let ready = unique_tagged(net, StateTag::Ready)?;
    let no_attack = unique_tagged(net, StateTag::NoAttack)?;
    let success = unique_tagged(net, StateTag::AttackSuccess)?;
    let defended = unique_tagged(net, StateTag::AttackDefended)?;

    Ok(NetBuilder::new()
        .tagged_place("Ready", &ready, StateTag::Ready)
        .place("Contested", "Attack launched; defense outcome pending.")
        .tagged_place("No attack", &no_attack, StateTag::NoAttack)
        .tagged_place("Attack succeeded", &success, StateTag::AttackSuccess)
        .tagged_place("Attack defended", &defended, StateTag::AttackDefended)
        .transition("Attack", Player::Attacker, "Attacker launches the attack.")
        .input("Ready")
        .output("Contested")
        .routing(0.5)
        .transition("Stand down", Player::Attacker, "Attacker stands down.")
        .input("Ready")
        .output("No attack")
        .routing(0.5)
        .transition("Defend", Player::Defender, "Defender blocks the attack.")
        .input("Contested")
        .output("Attack defended")
        .routing(0.5)
        .transition("No defend", Player::Defender, "Defender misses the attack.")
        .input("Contested")
        .output("Attack succeeded")
        .routing(0.5)
        .transition(
            "Back to ready (no attack)",
            Player::Environment,
            "Round ends without an attack.",
        )
        .input("No attack")
        .output("Ready")
        .transition(
            "Back to ready (succeeded)",
            Player::Environment,
            "Round ends after a successful attack.",
        )
        .input("Attack succeeded")
        .output("Ready")
        .transition(
            "Back to ready (defended)",
            Player::Environment,
            "Round ends after a defended attack.",
        )
        .input("Attack defended")
        .output("Ready")
        .initial(&["Ready"])
        .build())
}

/// Copies the stage-game payoffs onto the game transitions of a reduced
/// net: the defend branch pays the (attack, defend) cell, the pass branch
/// the (attack, idle) cell, and the stand-down branch the (hold, idle)
/// cell. The defender's counterfactual cost when no attack occurs cannot
/// be attached to any fired transition and stays in the reward table.
pub fn with_stage_rewards(net: &NetDefinition, table: &RewardTable) -> NetDefinition {
    let attacker = net.player_index(Player::Attacker);
    let defender = net.player_index(Player::Defender);
    let mut out = net.clone();
    let assign = |rewards: &mut Vec<f64>, a: f64, d: f64| {
        if let Some(i) = attacker {
            rewards[i] = a;
        }
        if let Some(i) = defender {
            rewards[i] = d;
        }
    };
    let mut transitions = out.transitions().to_vec();
    for (i, record) in transitions.iter_mut().enumerate() {
        match game_role(net, TransitionId(i)) {
            Some(GameRole::Defend) => assign(
                &mut record.rewards,
                table.attacker[0][0],
                table.defender[0][0],
            ),
            Some(GameRole::Pass) => assign(
                &mut record.rewards,
                table.attacker[0][1],
                table.defender[0][1],
            ),
            Some(GameRole::StandDown) => assign(
                &mut record.rewards,
                table.attacker[1][1],
                table.defender[1][1],
            ),
            _ => {}
        }
    }
    out = NetDefinition::from_parts(
        out.players().to_vec(),
        out.places().to_vec(),
        transitions,
        out.arcs().to_vec(),
        out.initial_marking().clone(),
    );
    out
}

/// Steady-state shares of the three game outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub no_attack: f64,
    pub attack_success: f64,
    pub attack_defended: f64,
}

impl OutcomeDistribution {
    pub fn components(&self) -> [f64; 3] {
        [self.no_attack, self.attack_success, self.attack_defended]
    }
}

/// Closed-form outcome distribution of the attack-defend game at a
/// strategy: no attack with probability `1 - p_attack`, success with
/// `p_attack * (1 - p_defend)`, and the defended share as the residual so
/// the three sum to 1 exactly.
pub fn outcome_distribution(
    strategy: &StrategyPair,
) -> Result<OutcomeDistribution, ReachabilityError> {
    for (name, value) in [
        ("p_attack", strategy.p_attack),
        ("p_defend", strategy.p_defend),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(ReachabilityError::Domain { name, value });
        }
    }
    let no_attack = 1.0 - strategy.p_attack;
    let attack_success = strategy.p_attack * (1.0 - strategy.p_defend);
    let attack_defended = 1.0 - no_attack - attack_success;
    Ok(OutcomeDistribution {
        no_attack,
        attack_success,
        attack_defended,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::validate_net;
    use approx::assert_abs_diff_eq;

    fn linear_chain() -> NetDefinition {
        NetBuilder::new()
            .place("a", "first")
            .place("b", "second")
            .place("c", "third")
            .transition("ab", Player::Environment, "")
            .input("a")
            .output("b")
            .transition("bc", Player::Environment, "")
            .input("b")
            .output("c")
            .initial(&["a"])
            .build()
    }

    /// A tagged source model with extra untagged plumbing places, shaped
    /// like the catalog defense nets.
    fn tagged_model() -> NetDefinition {
        NetBuilder::new()
            .tagged_place("idle", "Attacker is ready.", StateTag::Ready)
            .place("staging", "Attack under preparation.")
            .tagged_place("normal", "Traffic flows normally.", StateTag::NoAttack)
            .tagged_place(
                "breach",
                "Attack reached its goal.",
                StateTag::AttackSuccess,
            )
            .tagged_place("caught", "Attack was stopped.", StateTag::AttackDefended)
            .transition("prepare", Player::Attacker, "")
            .input("idle")
            .output("staging")
            .transition("strike", Player::Attacker, "")
            .input("staging")
            .output("breach")
            .routing(0.5)
            .transition("abort", Player::Attacker, "")
            .input("staging")
            .output("normal")
            .routing(0.5)
            .transition("catch", Player::Defender, "")
            .input("breach")
            .output("caught")
            .initial(&["idle"])
            .build()
    }

    #[test]
    fn chain_gives_linear_graph_with_unit_edges() {
        let net = linear_chain();
        let g = build_reachability(&net, &StrategyPair::new(0.5, 0.5), 64).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.edges.iter().all(|e| e.probability == 1.0));
        assert_eq!(g.terminal_nodes, vec![2]);
        assert!(!g.truncated);
    }

    #[test]
    fn exploration_is_deterministic() {
        let net = tagged_model();
        let s = StrategyPair::new(0.3, 0.7);
        let a = build_reachability(&net, &s, 64).unwrap();
        let b = build_reachability(&net, &s, 64).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn node_budget_truncates_and_flags() {
        let net = linear_chain();
        let g = build_reachability(&net, &StrategyPair::new(0.5, 0.5), 2).unwrap();
        assert!(g.truncated);
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn token_pileup_hits_the_bound_and_truncates() {
        // Each firing returns the trigger token and adds one to the sink,
        // so the sink grows without bound.
        let net = NetBuilder::new()
            .place("trigger", "")
            .place("sink", "")
            .transition("spawn", Player::Environment, "")
            .input("trigger")
            .output("trigger")
            .output("sink")
            .initial(&["trigger"])
            .build();
        let g = build_reachability(&net, &StrategyPair::new(0.5, 0.5), 1024).unwrap();
        assert!(g.truncated);
        assert_eq!(g.node_count(), TOKEN_BOUND + 1);
    }

    #[test]
    fn reduced_graph_contains_the_three_outcome_states() {
        let reduced = reduce_to_attack_defend(&tagged_model()).unwrap();
        let g = build_reachability(&reduced, &StrategyPair::new(0.25, 2.0 / 3.0), 64).unwrap();
        assert_eq!(g.node_count(), 5);
        for tag in [
            StateTag::NoAttack,
            StateTag::AttackSuccess,
            StateTag::AttackDefended,
        ] {
            assert_eq!(g.nodes_with_tag(&reduced, tag).len(), 1, "missing {tag:?}");
        }
        // Outcome states loop back to ready, so nothing is terminal.
        assert!(g.terminal_nodes.is_empty());
    }

    #[test]
    fn reduction_produces_the_canonical_five_place_net() {
        let reduced = reduce_to_attack_defend(&tagged_model()).unwrap();
        assert_eq!(validate_net(&reduced), vec![]);
        assert_eq!(reduced.places().len(), 5);
        assert_eq!(reduced.transitions().len(), 7);
        // Descriptions carry over from the tagged source places.
        let ready = reduced.place_id("Ready").unwrap();
        assert_eq!(reduced.place(ready).description, "Attacker is ready.");
    }

    #[test]
    fn reduction_is_idempotent_up_to_isomorphism() {
        let once = reduce_to_attack_defend(&tagged_model()).unwrap();
        let twice = reduce_to_attack_defend(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn reduction_reports_the_missing_tag() {
        let net = NetBuilder::new()
            .tagged_place("idle", "", StateTag::Ready)
            .tagged_place("normal", "", StateTag::NoAttack)
            .tagged_place("caught", "", StateTag::AttackDefended)
            .transition("t", Player::Environment, "")
            .input("idle")
            .output("normal")
            .initial(&["idle"])
            .build();
        assert_eq!(
            reduce_to_attack_defend(&net),
            Err(ReduceError::MissingTag("attack_success"))
        );
    }

    #[test]
    fn stage_rewards_land_on_the_game_branches() {
        let table = RewardTable {
            attacker: [[-0.3, 0.6], [0.0, 0.0]],
            defender: [[-0.15, -0.6], [-0.15, 0.0]],
        };
        let reduced = reduce_to_attack_defend(&tagged_model()).unwrap();
        let net = with_stage_rewards(&reduced, &table);
        let rewards = |label: &str| {
            net.transition(net.transition_id(label).unwrap())
                .rewards
                .clone()
        };
        assert_eq!(rewards("Defend"), vec![-0.3, -0.15, 0.0]);
        assert_eq!(rewards("No defend"), vec![0.6, -0.6, 0.0]);
        assert_eq!(rewards("Stand down"), vec![0.0, 0.0, 0.0]);
        assert_eq!(rewards("Attack"), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn outcome_distribution_matches_reported_steady_state() {
        let d = outcome_distribution(&StrategyPair::new(0.25, 0.6667)).unwrap();
        assert_abs_diff_eq!(d.no_attack, 0.75, epsilon = 1e-4);
        assert_abs_diff_eq!(d.attack_success, 0.08333, epsilon = 1e-4);
        assert_abs_diff_eq!(d.attack_defended, 0.16667, epsilon = 1e-4);
        assert_eq!(d.components().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn outcome_distribution_edges() {
        let d = outcome_distribution(&StrategyPair::new(0.0, 0.3)).unwrap();
        assert_eq!(d.components(), [1.0, 0.0, 0.0]);
        let d = outcome_distribution(&StrategyPair::new(1.0, 1.0)).unwrap();
        assert_eq!(d.components(), [0.0, 0.0, 1.0]);
        assert!(matches!(
            outcome_distribution(&StrategyPair::new(1.2, 0.5)),
            Err(ReachabilityError::Domain {
                name: "p_attack",
                ..
            })
        ));
    }
}
