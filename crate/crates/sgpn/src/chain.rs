//! Transition probability matrices over reachability-graph nodes and
//! their stationary distributions. The direct linear solve is
//! authoritative; a damped power iteration independently cross-checks
//! every result.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::net::{NetDefinition, StateTag};
use crate::reachability::{OutcomeDistribution, ReachabilityGraph};

/// Row-stochastic matrix of state-to-state firing probabilities, indexed
/// by reachability-graph node. Terminal states self-loop so every row
/// keeps unit mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionProbabilityMatrix {
    dim: usize,
    rows: Vec<f64>,
}

impl TransitionProbabilityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, src: usize, dst: usize) -> f64 {
        self.rows[src * self.dim + dst]
    }

    pub fn row(&self, src: usize) -> &[f64] {
        &self.rows[src * self.dim..(src + 1) * self.dim]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.row(i).iter().sum()).collect()
    }
}

/// Stationary probability vector over reachability-graph nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryDistribution(Vec<f64>);

impl StationaryDistribution {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Max-norm of `vM - v`.
    pub fn residual(&self, m: &TransitionProbabilityMatrix) -> f64 {
        multiply_left(&self.0, m)
            .iter()
            .zip(&self.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for StationaryDistribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("row {row} sums to {sum}, expected 1 within 1e-9")]
    NotStochastic { row: usize, sum: f64 },
    #[error(
        "chain has {count} recurrent classes reachable from node 0; steady state is ambiguous"
    )]
    MultipleRecurrentClasses { count: usize },
    #[error("direct stationary solve failed: singular restricted system")]
    SingularSystem,
    #[error("direct solve produced negative mass {value} at node {node}")]
    NegativeMass { node: usize, value: f64 },
    #[error(
        "power iteration disagrees with the direct solve by {delta} after {iterations} iterations"
    )]
    CrossCheckMismatch { delta: f64, iterations: usize },
    #[error("power iteration did not reach tolerance {tolerance} in {iterations} iterations")]
    NonConvergence { tolerance: f64, iterations: usize },
    #[error("no stationary mass on outcome-tagged states")]
    NoOutcomeMass,
}

/// Sums edge probabilities into matrix cells; terminal nodes (no outgoing
/// edges) become absorbing self-loops.
pub fn build_tpm(graph: &ReachabilityGraph) -> TransitionProbabilityMatrix {
    let dim = graph.node_count();
    let mut rows = vec![0.0; dim * dim];
    for edge in &graph.edges {
        rows[edge.src * dim + edge.dst] += edge.probability;
    }
    for node in 0..dim {
        let sum: f64 = rows[node * dim..(node + 1) * dim].iter().sum();
        if sum == 0.0 {
            rows[node * dim + node] = 1.0;
        }
    }
    TransitionProbabilityMatrix { dim, rows }
}

fn multiply_left(v: &[f64], m: &TransitionProbabilityMatrix) -> Vec<f64> {
    let mut out = vec![0.0; m.dim];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        for (j, out_j) in out.iter_mut().enumerate() {
            *out_j += vi * m.get(i, j);
        }
    }
    out
}

/// Nodes reachable from `start` along positive-probability entries.
fn reachable_from(m: &TransitionProbabilityMatrix, start: usize) -> Vec<bool> {
    let mut seen = vec![false; m.dim];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(i) = stack.pop() {
        for (j, &p) in m.row(i).iter().enumerate() {
            if p > 0.0 && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// The recurrent classes among states reachable from node 0. A state is
/// recurrent when every state it can reach can reach it back.
fn recurrent_classes(m: &TransitionProbabilityMatrix) -> Vec<Vec<usize>> {
    let from_start = reachable_from(m, 0);
    let reach: Vec<Vec<bool>> = (0..m.dim).map(|i| reachable_from(m, i)).collect();
    let mut assigned = vec![false; m.dim];
    let mut classes = Vec::new();
    for x in 0..m.dim {
        if !from_start[x] || assigned[x] {
            continue;
        }
        let recurrent = (0..m.dim).all(|y| !reach[x][y] || reach[y][x]);
        if !recurrent {
            continue;
        }
        let class: Vec<usize> = (0..m.dim).filter(|&y| reach[x][y] && reach[y][x]).collect();
        for &y in &class {
            assigned[y] = true;
        }
        classes.push(class);
    }
    classes
}

const POWER_TOLERANCE: f64 = 1e-12;
const POWER_MAX_ITERATIONS: usize = 1_000_000;
/// Damping keeps the iteration convergent on periodic chains such as the
/// ready -> outcome -> ready cycles of reduced models.
const POWER_DAMPING: f64 = 0.99;

fn power_iteration(m: &TransitionProbabilityMatrix) -> Result<Vec<f64>, ChainError> {
    let mut v = vec![0.0; m.dim];
    v[0] = 1.0;
    for iteration in 0..POWER_MAX_ITERATIONS {
        let stepped = multiply_left(&v, m);
        let next: Vec<f64> = stepped
            .iter()
            .zip(&v)
            .map(|(s, old)| POWER_DAMPING * s + (1.0 - POWER_DAMPING) * old)
            .collect();
        let delta = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if delta <= POWER_TOLERANCE {
            let _ = iteration;
            return Ok(v);
        }
    }
    Err(ChainError::NonConvergence {
        tolerance: POWER_TOLERANCE,
        iterations: POWER_MAX_ITERATIONS,
    })
}

/// Solves `vM = v`, `sum v = 1` for the recurrent class reachable from
/// node 0; transient states carry zero mass. The restricted linear system
/// is solved directly, then a damped power iteration from node 0 must
/// agree within 1e-9 or the result is rejected.
pub fn stationary_distribution(
    m: &TransitionProbabilityMatrix,
) -> Result<StationaryDistribution, ChainError> {
    for (row, sum) in m.row_sums().into_iter().enumerate() {
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ChainError::NotStochastic { row, sum });
        }
    }

    let classes = recurrent_classes(m);
    if classes.len() != 1 {
        return Err(ChainError::MultipleRecurrentClasses {
            count: classes.len(),
        });
    }
    let class = &classes[0];
    let k = class.len();

    // Restricted system: columns of (M^T - I) give the balance equations;
    // the last is replaced by the normalization constraint.
    let mut system = DMatrix::<f64>::zeros(k, k);
    for (row, &j) in class.iter().enumerate().take(k - 1) {
        for (col, &i) in class.iter().enumerate() {
            let mut value = m.get(i, j);
            if i == j {
                value -= 1.0;
            }
            system[(row, col)] = value;
        }
    }
    for col in 0..k {
        system[(k - 1, col)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k);
    rhs[k - 1] = 1.0;
    let solution = system.lu().solve(&rhs).ok_or(ChainError::SingularSystem)?;

    let mut v = vec![0.0; m.dim];
    for (slot, &node) in class.iter().enumerate() {
        let mass = solution[slot];
        if mass < -1e-12 {
            return Err(ChainError::NegativeMass { node, value: mass });
        }
        v[node] = mass.max(0.0);
    }

    let check = power_iteration(m)?;
    let delta = check
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if delta > 1e-9 {
        return Err(ChainError::CrossCheckMismatch {
            delta,
            iterations: POWER_MAX_ITERATIONS,
        });
    }

    Ok(StationaryDistribution(v))
}

/// Restricts the stationary vector to outcome-tagged nodes and
/// renormalizes it to an [`OutcomeDistribution`]. A node holding tokens in
/// several outcome places counts once, with success taking precedence over
/// defended over no-attack.
pub fn outcome_report(
    net: &NetDefinition,
    graph: &ReachabilityGraph,
    v: &StationaryDistribution,
) -> Result<OutcomeDistribution, ChainError> {
    let mut mass = [0.0f64; 3]; // no_attack, success, defended
    for (node, marking) in graph.nodes.iter().enumerate() {
        let outcome = node_outcome(net, marking);
        match outcome {
            Some(StateTag::AttackSuccess) => mass[1] += v[node],
            Some(StateTag::AttackDefended) => mass[2] += v[node],
            Some(StateTag::NoAttack) => mass[0] += v[node],
            _ => {}
        }
    }
    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        return Err(ChainError::NoOutcomeMass);
    }
    let no_attack = mass[0] / total;
    let attack_success = mass[1] / total;
    Ok(OutcomeDistribution {
        no_attack,
        attack_success,
        attack_defended: 1.0 - no_attack - attack_success,
    })
}

/// Wraps the chain induced by a strategy as a discounted game over its
/// states, for utility evaluation. `rewards` is indexed
/// `[state][player]`; a missing discount falls back to
/// [`crate::game::DEFAULT_DISCOUNT`].
pub fn discounted_game(
    m: &TransitionProbabilityMatrix,
    rewards: Vec<Vec<f64>>,
    discount: Option<f64>,
) -> Result<crate::game::DiscountedGame, crate::game::GameError> {
    let kernel = (0..m.dim()).map(|i| m.row(i).to_vec()).collect();
    crate::game::DiscountedGame::new(
        rewards,
        kernel,
        discount.unwrap_or(crate::game::DEFAULT_DISCOUNT),
    )
}

/// The outcome a marking represents, if any. Success dominates defended
/// dominates no-attack when several outcome places hold tokens at once.
pub fn node_outcome(net: &NetDefinition, marking: &crate::net::Marking) -> Option<StateTag> {
    let holds = |tag: StateTag| {
        net.places_tagged(tag)
            .iter()
            .any(|&p| marking.count(p) >= 1)
    };
    if holds(StateTag::AttackSuccess) {
        Some(StateTag::AttackSuccess)
    } else if holds(StateTag::AttackDefended) {
        Some(StateTag::AttackDefended)
    } else if holds(StateTag::NoAttack) {
        Some(StateTag::NoAttack)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::StrategyPair;
    use crate::net::{NetBuilder, Player};
    use crate::reachability::{build_reachability, reduce_to_attack_defend, ReachEdge};
    use approx::assert_abs_diff_eq;

    fn graph_from(edges: Vec<ReachEdge>, nodes: usize) -> ReachabilityGraph {
        let has_out: Vec<bool> = (0..nodes)
            .map(|i| edges.iter().any(|e| e.src == i))
            .collect();
        ReachabilityGraph {
            nodes: (0..nodes).map(|_| crate::net::Marking::empty(0)).collect(),
            terminal_nodes: (0..nodes).filter(|&i| !has_out[i]).collect(),
            edges,
            truncated: false,
        }
    }

    fn edge(src: usize, dst: usize, probability: f64) -> ReachEdge {
        ReachEdge {
            src,
            dst,
            transition: crate::net::TransitionId(0),
            probability,
        }
    }

    #[test]
    fn terminal_nodes_become_self_loops() {
        let m = build_tpm(&graph_from(vec![edge(0, 1, 1.0)], 2));
        assert_eq!(m.row(0), &[0.0, 1.0]);
        assert_eq!(m.row(1), &[0.0, 1.0]);
    }

    #[test]
    fn parallel_edges_add_up() {
        let m = build_tpm(&graph_from(
            vec![edge(0, 1, 0.3), edge(0, 1, 0.2), edge(0, 0, 0.5)],
            2,
        ));
        assert_abs_diff_eq!(m.get(0, 1), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn absorbing_start_keeps_all_mass() {
        let m = build_tpm(&graph_from(vec![edge(0, 0, 1.0), edge(1, 0, 1.0)], 2));
        let v = stationary_distribution(&m).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn symmetric_two_state_chain_is_uniform() {
        let m = build_tpm(&graph_from(
            vec![
                edge(0, 0, 0.5),
                edge(0, 1, 0.5),
                edge(1, 0, 0.5),
                edge(1, 1, 0.5),
            ],
            2,
        ));
        let v = stationary_distribution(&m).unwrap();
        assert_abs_diff_eq!(v[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(v[1], 0.5, epsilon = 1e-10);
    }

    #[test]
    fn periodic_cycle_is_handled_by_damping() {
        // Deterministic 3-cycle: period 3, uniform stationary vector.
        let m = build_tpm(&graph_from(
            vec![edge(0, 1, 1.0), edge(1, 2, 1.0), edge(2, 0, 1.0)],
            3,
        ));
        let v = stationary_distribution(&m).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(v[i], 1.0 / 3.0, epsilon = 1e-10);
        }
        assert!(v.residual(&m) <= 1e-10);
    }

    #[test]
    fn transient_prefix_gets_zero_mass() {
        let m = build_tpm(&graph_from(vec![edge(0, 1, 1.0), edge(1, 2, 1.0)], 3));
        let v = stationary_distribution(&m).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn two_absorbing_states_are_rejected() {
        let m = build_tpm(&graph_from(vec![edge(0, 1, 0.5), edge(0, 2, 0.5)], 3));
        assert!(matches!(
            stationary_distribution(&m),
            Err(ChainError::MultipleRecurrentClasses { count: 2 })
        ));
    }

    #[test]
    fn substochastic_rows_are_rejected() {
        let graph = graph_from(vec![edge(0, 1, 0.5)], 2);
        let mut m = build_tpm(&graph);
        m.rows[1] = 0.0; // break row 0 after the self-loop fill-in
        m.rows[0] = 0.25;
        assert!(matches!(
            stationary_distribution(&m),
            Err(ChainError::NotStochastic { row: 0, .. })
        ));
    }

    fn reduced_replay_pipeline(
        strategy: StrategyPair,
    ) -> (
        crate::net::NetDefinition,
        ReachabilityGraph,
        StationaryDistribution,
    ) {
        let source = NetBuilder::new()
            .tagged_place("ready", "Attacker is ready.", crate::net::StateTag::Ready)
            .tagged_place(
                "quiet",
                "No attack this round.",
                crate::net::StateTag::NoAttack,
            )
            .tagged_place(
                "breach",
                "Attack succeeded.",
                crate::net::StateTag::AttackSuccess,
            )
            .tagged_place(
                "caught",
                "Attack defended.",
                crate::net::StateTag::AttackDefended,
            )
            .transition("spin", Player::Environment, "")
            .input("ready")
            .output("quiet")
            .transition("a", Player::Environment, "")
            .input("quiet")
            .output("breach")
            .transition("b", Player::Environment, "")
            .input("breach")
            .output("caught")
            .initial(&["ready"])
            .build();
        let net = reduce_to_attack_defend(&source).unwrap();
        let graph = build_reachability(&net, &strategy, 64).unwrap();
        let m = build_tpm(&graph);
        let v = stationary_distribution(&m).unwrap();
        (net, graph, v)
    }

    #[test]
    fn reduced_model_outcomes_match_the_reported_triple() {
        let (net, graph, v) = reduced_replay_pipeline(StrategyPair::new(0.25, 2.0 / 3.0));
        let outcome = outcome_report(&net, &graph, &v).unwrap();
        assert_abs_diff_eq!(outcome.no_attack, 0.75, epsilon = 1e-9);
        assert_abs_diff_eq!(outcome.attack_success, 0.08333, epsilon = 1e-4);
        assert_abs_diff_eq!(outcome.attack_defended, 0.16667, epsilon = 1e-4);
    }

    #[test]
    fn ready_row_folds_to_the_branch_products() {
        let (net, graph, _) = reduced_replay_pipeline(StrategyPair::new(0.25, 2.0 / 3.0));
        let m = build_tpm(&graph);
        let node_of = |tag: crate::net::StateTag| graph.nodes_with_tag(&net, tag)[0];
        let ready = 0usize;
        let contested = (0..graph.node_count())
            .find(|&i| {
                i != ready
                    && !graph
                        .nodes_with_tag(&net, crate::net::StateTag::NoAttack)
                        .contains(&i)
                    && node_outcome(&net, &graph.nodes[i]).is_none()
            })
            .unwrap();
        let fold = |target: usize| {
            m.get(ready, target) + m.get(ready, contested) * m.get(contested, target)
        };
        assert_abs_diff_eq!(
            fold(node_of(crate::net::StateTag::NoAttack)),
            0.75,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            fold(node_of(crate::net::StateTag::AttackSuccess)),
            0.25 / 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            fold(node_of(crate::net::StateTag::AttackDefended)),
            0.25 * 2.0 / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn never_attacking_puts_all_outcome_mass_on_no_attack() {
        let (net, graph, v) = reduced_replay_pipeline(StrategyPair::new(0.0, 0.5));
        let outcome = outcome_report(&net, &graph, &v).unwrap();
        assert_eq!(outcome.no_attack, 1.0);
        assert_eq!(outcome.attack_success, 0.0);
    }

    #[test]
    fn derived_operating_point_reproduces_published_success_rate() {
        // p_attack chosen so that p_attack * (1 - 0.724) hits the published
        // success probability.
        let p_attack = 0.0857412 / (1.0 - 0.724);
        let (net, graph, v) = reduced_replay_pipeline(StrategyPair::new(p_attack, 0.724));
        let outcome = outcome_report(&net, &graph, &v).unwrap();
        assert_abs_diff_eq!(outcome.attack_success, 0.0857412, epsilon = 1e-6);
    }

    #[test]
    fn unreachable_self_loops_get_no_mass() {
        // Two disconnected absorbing nodes: only the start's class counts.
        let m = build_tpm(&graph_from(vec![], 2));
        let v = stationary_distribution(&m).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn chain_utilities_use_the_default_discount() {
        // Absorbing start with unit attacker reward: geometric series.
        let m = build_tpm(&graph_from(vec![edge(0, 0, 1.0)], 1));
        let game = discounted_game(&m, vec![vec![1.0, 0.0]], None).unwrap();
        let u = crate::game::discounted_utility(&game, 0).unwrap();
        assert_abs_diff_eq!(
            u[0],
            1.0 / (1.0 - crate::game::DEFAULT_DISCOUNT),
            epsilon = 1e-9
        );
    }

    #[test]
    fn stationarity_residual_is_tiny_on_reduced_chains() {
        let (_, graph, v) = reduced_replay_pipeline(StrategyPair::new(0.25, 2.0 / 3.0));
        let m = build_tpm(&graph);
        assert!(v.residual(&m) <= 1e-10);
        assert!(v.as_slice().iter().sum::<f64>() - 1.0 <= 1e-9);
    }
}
