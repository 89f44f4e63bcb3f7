//! Net data model and executable token-game semantics: places, transitions
//! partitioned among players, arcs, markings with per-token reward vectors,
//! enabledness, firing, and probabilistic choice among enabled transitions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::StrategyPair;

/// Dense index of a place within its net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlaceId(pub usize);

/// Dense index of a transition within its net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TransitionId(pub usize);

/// The players among which transitions are partitioned. Transitions that
/// belong to neither side of the game (protocol mechanics such as sending
/// data or returning to a ready state) are owned by the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Attacker,
    Defender,
    Environment,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Attacker => f.write_str("attacker"),
            Player::Defender => f.write_str("defender"),
            Player::Environment => f.write_str("environment"),
        }
    }
}

/// Marks the role a place plays in the attack-defend game. `Plain` places
/// carry no role.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum StateTag {
    Ready,
    AttackSuccess,
    AttackDefended,
    NoAttack,
    #[default]
    Plain,
}

impl StateTag {
    pub fn name(self) -> &'static str {
        match self {
            StateTag::Ready => "ready",
            StateTag::AttackSuccess => "attack_success",
            StateTag::AttackDefended => "attack_defended",
            StateTag::NoAttack => "no_attack",
            StateTag::Plain => "plain",
        }
    }

    /// Whether this tag marks a terminal game outcome.
    pub fn is_outcome(self) -> bool {
        matches!(
            self,
            StateTag::AttackSuccess | StateTag::AttackDefended | StateTag::NoAttack
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Place {
    pub label: String,
    pub description: String,
    pub tag: StateTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub label: String,
    pub owner: Player,
    /// Static routing probability used when no strategy applies.
    pub routing_prob: f64,
    /// Firing rate, carried as data; only the simulator's optional event
    /// clock consumes it.
    pub rate: f64,
    /// Reward granted on firing, one entry per player in net order.
    pub rewards: Vec<f64>,
    pub description: String,
}

/// One endpoint of an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Node {
    Place(PlaceId),
    Transition(TransitionId),
}

/// A directed arc. Validation, not the type system, enforces that arcs
/// alternate between places and transitions, so that malformed inputs can
/// be reported rather than rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub from: Node,
    pub to: Node,
}

/// A token with its accumulated per-player reward vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub rewards: Vec<f64>,
}

impl Token {
    pub fn zeroed(players: usize) -> Self {
        Token {
            rewards: vec![0.0; players],
        }
    }
}

/// Distribution of tokens over places. Tokens within a place are kept in a
/// canonical order so equal markings compare bit-equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marking {
    slots: Vec<Vec<Token>>,
}

impl Marking {
    pub fn empty(place_count: usize) -> Self {
        Marking {
            slots: vec![Vec::new(); place_count],
        }
    }

    /// Builds a marking with `counts[i]` zero-reward tokens in place `i`.
    pub fn from_counts(counts: &[usize], players: usize) -> Self {
        Marking {
            slots: counts
                .iter()
                .map(|&n| (0..n).map(|_| Token::zeroed(players)).collect())
                .collect(),
        }
    }

    pub fn place_count(&self) -> usize {
        self.slots.len()
    }

    pub fn count(&self, place: PlaceId) -> usize {
        self.slots.get(place.0).map_or(0, Vec::len)
    }

    pub fn tokens(&self, place: PlaceId) -> &[Token] {
        &self.slots[place.0]
    }

    pub fn total_tokens(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    /// Token counts per place; this is the identity used for
    /// reachability-state comparison (reward vectors excluded, otherwise
    /// reward accumulation would make the state space infinite).
    pub fn counts(&self) -> Vec<usize> {
        self.slots.iter().map(Vec::len).collect()
    }

    /// Component-wise sum of every token's reward vector.
    pub fn total_rewards(&self, players: usize) -> Vec<f64> {
        let mut totals = vec![0.0; players];
        for tokens in &self.slots {
            for token in tokens {
                for (t, r) in totals.iter_mut().zip(&token.rewards) {
                    *t += r;
                }
            }
        }
        totals
    }

    fn canonicalize(&mut self) {
        for tokens in &mut self.slots {
            tokens.sort_by(|a, b| {
                a.rewards
                    .iter()
                    .zip(&b.rewards)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        }
    }
}

/// The net: players, places, player-partitioned transitions with routing
/// probabilities, firing rates and per-player rewards, arcs, and the
/// initial marking. Values are immutable after construction; every
/// operation on them is a pure function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetDefinition {
    players: Vec<Player>,
    places: Vec<Place>,
    transitions: Vec<Transition>,
    arcs: Vec<Arc>,
    initial_marking: Marking,
}

impl NetDefinition {
    /// Assembles a net from raw parts without validating it; run
    /// [`validate_net`] to obtain the violation report.
    pub fn from_parts(
        players: Vec<Player>,
        places: Vec<Place>,
        transitions: Vec<Transition>,
        arcs: Vec<Arc>,
        initial_marking: Marking,
    ) -> Self {
        NetDefinition {
            players,
            places,
            transitions,
            arcs,
            initial_marking,
        }
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn player_index(&self, player: Player) -> Option<usize> {
        self.players.iter().position(|&p| p == player)
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial_marking
    }

    pub fn place(&self, id: PlaceId) -> &Place {
        &self.places[id.0]
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id.0]
    }

    pub fn place_id(&self, label: &str) -> Option<PlaceId> {
        self.places
            .iter()
            .position(|p| p.label == label)
            .map(PlaceId)
    }

    pub fn transition_id(&self, label: &str) -> Option<TransitionId> {
        self.transitions
            .iter()
            .position(|t| t.label == label)
            .map(TransitionId)
    }

    pub fn place_ids(&self) -> impl Iterator<Item = PlaceId> {
        (0..self.places.len()).map(PlaceId)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransitionId> {
        (0..self.transitions.len()).map(TransitionId)
    }

    /// Input places of a transition, deduplicated, in place order.
    pub fn transition_inputs(&self, t: TransitionId) -> Vec<PlaceId> {
        let mut inputs: Vec<PlaceId> = self
            .arcs
            .iter()
            .filter_map(|a| match (a.from, a.to) {
                (Node::Place(p), Node::Transition(x)) if x == t => Some(p),
                _ => None,
            })
            .collect();
        inputs.sort();
        inputs.dedup();
        inputs
    }

    /// Output places of a transition, deduplicated, in place order.
    pub fn transition_outputs(&self, t: TransitionId) -> Vec<PlaceId> {
        let mut outputs: Vec<PlaceId> = self
            .arcs
            .iter()
            .filter_map(|a| match (a.from, a.to) {
                (Node::Transition(x), Node::Place(p)) if x == t => Some(p),
                _ => None,
            })
            .collect();
        outputs.sort();
        outputs.dedup();
        outputs
    }

    pub fn places_tagged(&self, tag: StateTag) -> Vec<PlaceId> {
        self.places
            .iter()
            .enumerate()
            .filter(|(_, p)| p.tag == tag)
            .map(|(i, _)| PlaceId(i))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("marking covers {got} places but the net has {expected}")]
    MarkingMismatch { got: usize, expected: usize },
    #[error("transition `{0}` is not enabled in this marking")]
    NotEnabled(String),
    #[error("no positive choice weight among enabled transitions {0:?}")]
    NoChoiceWeight(Vec<String>),
    #[error("reward vector length {got} does not match {expected} players")]
    RewardLength { got: usize, expected: usize },
}

/// A single validation finding. Violations are data, not failures: a net
/// that breaks several rules yields one entry per broken rule.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("net has no places and no transitions")]
    EmptyNet,
    #[error("net declares no players")]
    NoPlayers,
    #[error("player `{0}` is declared more than once")]
    DuplicatePlayer(Player),
    #[error("place label `{0}` is not unique")]
    DuplicatePlaceLabel(String),
    #[error("transition label `{0}` is not unique")]
    DuplicateTransitionLabel(String),
    #[error("label `{0}` names both a place and a transition")]
    SharedLabel(String),
    #[error("arc {from} -> {to} connects two {kind}s; arcs must alternate places and transitions")]
    NonBipartiteArc {
        from: String,
        to: String,
        kind: &'static str,
    },
    #[error("transition `{0}` has no input arc")]
    NoInputArc(String),
    #[error("transition `{0}` has no output arc")]
    NoOutputArc(String),
    #[error("conflict set {{{members}}} owned by {owner} has routing mass {mass} != 1")]
    ConflictRoutingMass {
        owner: Player,
        members: String,
        mass: f64,
    },
    #[error("transition `{label}` has routing probability {value} outside [0,1]")]
    RoutingOutOfRange { label: String, value: f64 },
    #[error("transition `{label}` has non-positive firing rate {value}")]
    NonPositiveRate { label: String, value: f64 },
    #[error("transition `{label}` has {got} reward entries for {expected} players")]
    RewardVectorLength {
        label: String,
        got: usize,
        expected: usize,
    },
    #[error("more than one place tagged attack_success: {0}")]
    MultipleSuccessPlaces(String),
    #[error("initial marking covers {got} places but the net has {expected}")]
    InitialMarkingShape { got: usize, expected: usize },
}

/// Checks every structural invariant of the net and reports each breach
/// with the offending element named. A valid net yields an empty report.
pub fn validate_net(net: &NetDefinition) -> Vec<Violation> {
    let mut report = Vec::new();

    if net.places.is_empty() && net.transitions.is_empty() {
        report.push(Violation::EmptyNet);
    }
    if net.players.is_empty() {
        report.push(Violation::NoPlayers);
    }
    let mut seen_players = BTreeSet::new();
    for &p in &net.players {
        if !seen_players.insert(p) {
            report.push(Violation::DuplicatePlayer(p));
        }
    }

    let mut place_labels = BTreeSet::new();
    for p in &net.places {
        if !place_labels.insert(p.label.as_str()) {
            report.push(Violation::DuplicatePlaceLabel(p.label.clone()));
        }
    }
    let mut transition_labels = BTreeSet::new();
    for t in &net.transitions {
        if !transition_labels.insert(t.label.as_str()) {
            report.push(Violation::DuplicateTransitionLabel(t.label.clone()));
        }
        if place_labels.contains(t.label.as_str()) {
            report.push(Violation::SharedLabel(t.label.clone()));
        }
    }

    let node_name = |n: Node| match n {
        Node::Place(p) => net.places[p.0].label.clone(),
        Node::Transition(t) => net.transitions[t.0].label.clone(),
    };
    for arc in &net.arcs {
        let kind = match (arc.from, arc.to) {
            (Node::Place(_), Node::Place(_)) => Some("place"),
            (Node::Transition(_), Node::Transition(_)) => Some("transition"),
            _ => None,
        };
        if let Some(kind) = kind {
            report.push(Violation::NonBipartiteArc {
                from: node_name(arc.from),
                to: node_name(arc.to),
                kind,
            });
        }
    }

    for t in net.transition_ids() {
        let record = net.transition(t);
        if net.transition_inputs(t).is_empty() {
            report.push(Violation::NoInputArc(record.label.clone()));
        }
        if net.transition_outputs(t).is_empty() {
            report.push(Violation::NoOutputArc(record.label.clone()));
        }
        if !(0.0..=1.0).contains(&record.routing_prob) {
            report.push(Violation::RoutingOutOfRange {
                label: record.label.clone(),
                value: record.routing_prob,
            });
        }
        if !record.rate.is_finite() || record.rate <= 0.0 {
            report.push(Violation::NonPositiveRate {
                label: record.label.clone(),
                value: record.rate,
            });
        }
        if record.rewards.len() != net.players.len() {
            report.push(Violation::RewardVectorLength {
                label: record.label.clone(),
                got: record.rewards.len(),
                expected: net.players.len(),
            });
        }
    }

    for set in conflict_sets(net) {
        let mass: f64 = set.iter().map(|&t| net.transition(t).routing_prob).sum();
        if (mass - 1.0).abs() > 1e-9 {
            let owner = net.transition(set[0]).owner;
            let members = set
                .iter()
                .map(|&t| net.transition(t).label.as_str())
                .collect::<Vec<_>>()
                .join(", ");
            report.push(Violation::ConflictRoutingMass {
                owner,
                members,
                mass,
            });
        }
    }

    let success_places = net.places_tagged(StateTag::AttackSuccess);
    if success_places.len() > 1 {
        let labels = success_places
            .iter()
            .map(|&p| net.place(p).label.as_str())
            .collect::<Vec<_>>()
            .join(", ");
        report.push(Violation::MultipleSuccessPlaces(labels));
    }

    if net.initial_marking.place_count() != net.places.len() {
        report.push(Violation::InitialMarkingShape {
            got: net.initial_marking.place_count(),
            expected: net.places.len(),
        });
    }

    report
}

/// Groups transitions that share an owner and, transitively, an input
/// place. Every transition belongs to exactly one conflict set, possibly a
/// singleton; routing probabilities must sum to 1 within each set.
pub fn conflict_sets(net: &NetDefinition) -> Vec<Vec<TransitionId>> {
    let n = net.transitions.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    // Union transitions of the same owner that read a common place.
    let mut readers: BTreeMap<(PlaceId, Player), usize> = BTreeMap::new();
    for t in net.transition_ids() {
        let owner = net.transition(t).owner;
        for p in net.transition_inputs(t) {
            match readers.get(&(p, owner)) {
                Some(&other) => {
                    let a = find(&mut parent, t.0);
                    let b = find(&mut parent, other);
                    parent[a] = b;
                }
                None => {
                    readers.insert((p, owner), t.0);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<TransitionId>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(TransitionId(i));
    }
    groups.into_values().collect()
}

/// Transitions enabled in `m`: those whose every input place holds at
/// least one token.
pub fn enabled_transitions(
    net: &NetDefinition,
    m: &Marking,
) -> Result<BTreeSet<TransitionId>, NetError> {
    if m.place_count() != net.places.len() {
        return Err(NetError::MarkingMismatch {
            got: m.place_count(),
            expected: net.places.len(),
        });
    }
    Ok(net
        .transition_ids()
        .filter(|&t| {
            let inputs = net.transition_inputs(t);
            !inputs.is_empty() && inputs.iter().all(|&p| m.count(p) >= 1)
        })
        .collect())
}

/// Fires `t` atomically: one token leaves each input place, one token
/// enters each output place, and the transition's reward vector is added
/// once to the moving token. When a firing joins several tokens, their
/// accumulated rewards merge into the first output so that the total
/// reward over any firing sequence equals the sum of fired rewards.
pub fn fire(net: &NetDefinition, m: &Marking, t: TransitionId) -> Result<Marking, NetError> {
    let enabled = enabled_transitions(net, m)?;
    if !enabled.contains(&t) {
        return Err(NetError::NotEnabled(net.transition(t).label.clone()));
    }

    let record = net.transition(t);
    if record.rewards.len() != net.players.len() {
        return Err(NetError::RewardLength {
            got: record.rewards.len(),
            expected: net.players.len(),
        });
    }

    let mut next = m.clone();
    let mut carried = vec![0.0; net.players.len()];
    for p in net.transition_inputs(t) {
        // Tokens are kept canonically sorted; removing the front keeps the
        // operation deterministic.
        let token = next.slots[p.0].remove(0);
        for (c, r) in carried.iter_mut().zip(&token.rewards) {
            *c += r;
        }
    }
    for (c, r) in carried.iter_mut().zip(&record.rewards) {
        *c += r;
    }

    let outputs = net.transition_outputs(t);
    for (i, p) in outputs.iter().enumerate() {
        let token = if i == 0 {
            Token {
                rewards: carried.clone(),
            }
        } else {
            Token::zeroed(net.players.len())
        };
        next.slots[p.0].push(token);
    }
    next.canonicalize();
    Ok(next)
}

/// The roles a transition can take in the attack-defend game, derived from
/// its owner and the tags of its output places (or of a conflicting
/// sibling's outputs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameRole {
    Attack,
    StandDown,
    Defend,
    Pass,
}

/// Infers the game role of a transition, if any. Attacker transitions
/// feeding a `no_attack` place stand down; their conflict siblings attack.
/// Defender transitions feeding `attack_defended` defend, those feeding
/// `attack_success` pass, and an untagged sibling takes the opposite role.
/// Environment transitions never carry a role.
pub fn game_role(net: &NetDefinition, t: TransitionId) -> Option<GameRole> {
    let owner = net.transition(t).owner;
    if owner == Player::Environment {
        return None;
    }
    let output_tags = |t: TransitionId| -> BTreeSet<StateTag> {
        net.transition_outputs(t)
            .iter()
            .map(|&p| net.place(p).tag)
            .collect()
    };
    let own_tags = output_tags(t);
    let siblings: Vec<TransitionId> = conflict_sets(net)
        .into_iter()
        .find(|set| set.contains(&t))
        .unwrap_or_default()
        .into_iter()
        .filter(|&s| s != t)
        .collect();
    let sibling_tags: BTreeSet<StateTag> = siblings.iter().flat_map(|&s| output_tags(s)).collect();

    match owner {
        Player::Attacker => {
            if own_tags.contains(&StateTag::NoAttack) {
                Some(GameRole::StandDown)
            } else if sibling_tags.contains(&StateTag::NoAttack) {
                Some(GameRole::Attack)
            } else {
                None
            }
        }
        Player::Defender => {
            if own_tags.contains(&StateTag::AttackDefended) {
                Some(GameRole::Defend)
            } else if own_tags.contains(&StateTag::AttackSuccess)
                || sibling_tags.contains(&StateTag::AttackDefended)
            {
                Some(GameRole::Pass)
            } else if sibling_tags.contains(&StateTag::AttackSuccess) {
                Some(GameRole::Defend)
            } else {
                None
            }
        }
        Player::Environment => None,
    }
}

/// How to weight enabled transitions when forming a choice distribution.
#[derive(Debug, Clone, Copy)]
pub enum ChoiceRule<'a> {
    /// Game transitions are weighted by the strategy (attack vs stand-down
    /// at `p_attack`, defend vs pass at `p_defend`); everything else uses
    /// its static routing probability.
    Strategy(StrategyPair),
    /// Explicit weight per transition; missing transitions weigh zero.
    Override(&'a BTreeMap<TransitionId, f64>),
}

/// Probability of each enabled transition firing next. Weights are
/// normalized so the distribution sums to 1; a single enabled transition
/// gets probability 1. An empty map signals a dead (terminal) marking.
pub fn choice_distribution(
    net: &NetDefinition,
    m: &Marking,
    rule: &ChoiceRule<'_>,
) -> Result<BTreeMap<TransitionId, f64>, NetError> {
    let enabled = enabled_transitions(net, m)?;
    if enabled.is_empty() {
        return Ok(BTreeMap::new());
    }

    let mut weights: BTreeMap<TransitionId, f64> = BTreeMap::new();
    for &t in &enabled {
        let w = match rule {
            ChoiceRule::Strategy(s) => match game_role(net, t) {
                Some(GameRole::Attack) => s.p_attack,
                Some(GameRole::StandDown) => 1.0 - s.p_attack,
                Some(GameRole::Defend) => s.p_defend,
                Some(GameRole::Pass) => 1.0 - s.p_defend,
                None => net.transition(t).routing_prob,
            },
            ChoiceRule::Override(map) => map.get(&t).copied().unwrap_or(0.0),
        };
        weights.insert(t, w);
    }

    let total: f64 = weights.values().sum();
    if !total.is_finite() || total <= 0.0 {
        let labels = enabled
            .iter()
            .map(|&t| net.transition(t).label.clone())
            .collect();
        return Err(NetError::NoChoiceWeight(labels));
    }
    for w in weights.values_mut() {
        *w /= total;
    }
    Ok(weights)
}

/// Fluent constructor for nets. Place and transition labels are resolved
/// at `build` time; referring to an undeclared label panics, since the
/// builder is for statically known nets (the parser has its own checked
/// path).
#[derive(Debug, Default)]
pub struct NetBuilder {
    players: Vec<Player>,
    places: Vec<Place>,
    transitions: Vec<Transition>,
    rewards_by_transition: Vec<Option<Vec<f64>>>,
    arcs: Vec<(String, String, bool)>, // (place, transition, place_is_input)
    initial: Vec<String>,
}

impl NetBuilder {
    pub fn new() -> Self {
        NetBuilder {
            players: vec![Player::Attacker, Player::Defender, Player::Environment],
            ..Default::default()
        }
    }

    pub fn players(mut self, players: &[Player]) -> Self {
        self.players = players.to_vec();
        self
    }

    pub fn place(self, label: &str, description: &str) -> Self {
        self.tagged_place(label, description, StateTag::Plain)
    }

    pub fn tagged_place(mut self, label: &str, description: &str, tag: StateTag) -> Self {
        self.places.push(Place {
            label: label.to_string(),
            description: description.to_string(),
            tag,
        });
        self
    }

    /// Starts a transition; subsequent `input`/`output`/`routing`/`rate`/
    /// `rewards` calls refine it until the next `transition`.
    pub fn transition(mut self, label: &str, owner: Player, description: &str) -> Self {
        self.transitions.push(Transition {
            label: label.to_string(),
            owner,
            routing_prob: 1.0,
            rate: 1.0,
            rewards: Vec::new(),
            description: description.to_string(),
        });
        self.rewards_by_transition.push(None);
        self
    }

    pub fn input(mut self, place: &str) -> Self {
        let t = self.current_label();
        self.arcs.push((place.to_string(), t, true));
        self
    }

    pub fn output(mut self, place: &str) -> Self {
        let t = self.current_label();
        self.arcs.push((place.to_string(), t, false));
        self
    }

    pub fn routing(mut self, p: f64) -> Self {
        self.transitions
            .last_mut()
            .expect("routing() before any transition")
            .routing_prob = p;
        self
    }

    pub fn rate(mut self, r: f64) -> Self {
        self.transitions
            .last_mut()
            .expect("rate() before any transition")
            .rate = r;
        self
    }

    pub fn rewards(mut self, rewards: &[f64]) -> Self {
        *self
            .rewards_by_transition
            .last_mut()
            .expect("rewards() before any transition") = Some(rewards.to_vec());
        self
    }

    pub fn initial(mut self, places: &[&str]) -> Self {
        self.initial = places.iter().map(|s| s.to_string()).collect();
        self
    }

    fn current_label(&self) -> String {
        self.transitions
            .last()
            .expect("arc before any transition")
            .label
            .clone()
    }

    pub fn build(mut self) -> NetDefinition {
        let players = self.players.len();
        for (t, rewards) in self
            .transitions
            .iter_mut()
            .zip(self.rewards_by_transition.iter())
        {
            t.rewards = rewards.clone().unwrap_or_else(|| vec![0.0; players]);
        }

        let place_index = |places: &[Place], label: &str| -> PlaceId {
            PlaceId(
                places
                    .iter()
                    .position(|p| p.label == label)
                    .unwrap_or_else(|| panic!("unknown place label `{label}`")),
            )
        };
        let transition_index = |transitions: &[Transition], label: &str| -> TransitionId {
            TransitionId(
                transitions
                    .iter()
                    .position(|t| t.label == label)
                    .unwrap_or_else(|| panic!("unknown transition label `{label}`")),
            )
        };

        let arcs = self
            .arcs
            .iter()
            .map(|(place, transition, place_is_input)| {
                let p = Node::Place(place_index(&self.places, place));
                let t = Node::Transition(transition_index(&self.transitions, transition));
                if *place_is_input {
                    Arc { from: p, to: t }
                } else {
                    Arc { from: t, to: p }
                }
            })
            .collect();

        let mut counts = vec![0usize; self.places.len()];
        for label in &self.initial {
            counts[place_index(&self.places, label).0] += 1;
        }
        let initial_marking = Marking::from_counts(&counts, players);

        NetDefinition::from_parts(
            self.players,
            self.places,
            self.transitions,
            arcs,
            initial_marking,
        )
    }
}
