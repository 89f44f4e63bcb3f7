//! Property-based invariants across modules: the closed-form outcome
//! distribution against the full chain pipeline, equilibrium invariances,
//! and conservation laws of the token game.

use proptest::prelude::*;

use sgpn::catalog::{load, CatalogKey};
use sgpn::chain::{build_tpm, outcome_report, stationary_distribution};
use sgpn::game::{solve_ne, RewardTable, StrategyPair};
use sgpn::net::{choice_distribution, enabled_transitions, fire, ChoiceRule};
use sgpn::reachability::{
    build_reachability, outcome_distribution, reduce_to_attack_defend, with_stage_rewards,
};

fn probability() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

/// Random reward tables that admit an interior equilibrium away from the
/// degenerate boundary.
fn interior_table() -> impl Strategy<Value = RewardTable> {
    (
        prop::array::uniform4(-1.0..1.0f64),
        prop::array::uniform4(-1.0..1.0f64),
    )
        .prop_map(|(a, d)| RewardTable {
            attacker: [[a[0], a[1]], [a[2], a[3]]],
            defender: [[d[0], d[1]], [d[2], d[3]]],
        })
        .prop_filter("needs a well-conditioned interior equilibrium", |t| {
            let a = &t.attacker;
            let d = &t.defender;
            let g = (a[0][0] - a[1][0]) - (a[0][1] - a[1][1]);
            let h = (d[0][0] - d[0][1]) - (d[1][0] - d[1][1]);
            if g.abs() < 1e-2 || h.abs() < 1e-2 {
                return false;
            }
            matches!(solve_ne(t), Ok(ne) if ne.p_attack > 1e-3
                && ne.p_attack < 1.0 - 1e-3
                && ne.p_defend > 1e-3
                && ne.p_defend < 1.0 - 1e-3)
        })
}

proptest! {
    /// The stationary distribution of the reduced chain, restricted to
    /// outcome states and renormalized, equals the closed-form outcome
    /// distribution; two independent computation routes.
    #[test]
    fn chain_pipeline_matches_closed_form_outcomes(
        p_attack in probability(),
        p_defend in probability(),
    ) {
        let strategy = StrategyPair::new(p_attack, p_defend);
        let reduced = reduce_to_attack_defend(&load(CatalogKey::ReplayDefense).net).unwrap();
        let graph = build_reachability(&reduced, &strategy, 64).unwrap();
        let tpm = build_tpm(&graph);
        let stationary = stationary_distribution(&tpm).unwrap();
        let via_chain = outcome_report(&reduced, &graph, &stationary).unwrap();
        let closed = outcome_distribution(&strategy).unwrap();
        prop_assert!((via_chain.no_attack - closed.no_attack).abs() <= 1e-9);
        prop_assert!((via_chain.attack_success - closed.attack_success).abs() <= 1e-9);
        prop_assert!((via_chain.attack_defended - closed.attack_defended).abs() <= 1e-9);
    }

    /// Choice distributions are genuine distributions at every reachable
    /// marking of the reduced game.
    #[test]
    fn choice_distributions_sum_to_one(
        p_attack in 0.01..0.99f64,
        p_defend in 0.01..0.99f64,
    ) {
        let strategy = StrategyPair::new(p_attack, p_defend);
        let reduced = reduce_to_attack_defend(&load(CatalogKey::ReplayDefense).net).unwrap();
        let graph = build_reachability(&reduced, &strategy, 64).unwrap();
        for marking in &graph.nodes {
            let dist =
                choice_distribution(&reduced, marking, &ChoiceRule::Strategy(strategy)).unwrap();
            prop_assert!(!dist.is_empty());
            let total: f64 = dist.values().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    /// Shifting all of one player's payoffs by a constant, or scaling them
    /// by a positive factor, does not move the equilibrium.
    #[test]
    fn equilibrium_is_invariant_under_affine_payoff_changes(
        table in interior_table(),
        shift in -5.0..5.0f64,
        scale in 0.1..10.0f64,
    ) {
        let base = solve_ne(&table).unwrap();

        let mut shifted = table;
        for row in shifted.attacker.iter_mut() {
            for cell in row.iter_mut() {
                *cell += shift;
            }
        }
        let ne = solve_ne(&shifted).unwrap();
        prop_assert!((ne.p_attack - base.p_attack).abs() <= 1e-6);
        prop_assert!((ne.p_defend - base.p_defend).abs() <= 1e-6);

        let mut scaled = table;
        for row in scaled.defender.iter_mut() {
            for cell in row.iter_mut() {
                *cell *= scale;
            }
        }
        let ne = solve_ne(&scaled).unwrap();
        prop_assert!((ne.p_attack - base.p_attack).abs() <= 1e-6);
        prop_assert!((ne.p_defend - base.p_defend).abs() <= 1e-6);
    }

    /// Interior solutions always zero the indifference residuals and
    /// survive the best-response check.
    #[test]
    fn interior_solutions_verify(table in interior_table()) {
        let ne = solve_ne(&table).unwrap();
        let (ra, rd) = sgpn::game::indifference_residuals(&table, &ne);
        prop_assert!(ra.abs() <= 1e-9 && rd.abs() <= 1e-9);
        let check = sgpn::game::verify_equilibrium(&table, &ne, 1e-9);
        prop_assert!(check.holds);
    }

    /// Along any random firing sequence of the reduced replay game, the
    /// total token reward equals the sum of the fired transitions'
    /// rewards, per player.
    #[test]
    fn reward_totals_are_conserved(choices in prop::collection::vec(0usize..4, 1..40)) {
        let entry = load(CatalogKey::ReplayDefense);
        let table = entry.rewards.unwrap();
        let reduced = with_stage_rewards(
            &reduce_to_attack_defend(&entry.net).unwrap(),
            &table,
        );
        let players = reduced.players().len();
        let mut marking = reduced.initial_marking().clone();
        let mut fired_total = vec![0.0f64; players];
        for pick in choices {
            let enabled: Vec<_> = enabled_transitions(&reduced, &marking)
                .unwrap()
                .into_iter()
                .collect();
            if enabled.is_empty() {
                break;
            }
            let t = enabled[pick % enabled.len()];
            for (acc, r) in fired_total
                .iter_mut()
                .zip(&reduced.transition(t).rewards)
            {
                *acc += r;
            }
            marking = fire(&reduced, &marking, t).unwrap();
        }
        let held = marking.total_rewards(players);
        for (a, b) in held.iter().zip(&fired_total) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    /// Transition matrices built from any strategy are row-stochastic.
    #[test]
    fn transition_matrices_are_row_stochastic(
        p_attack in probability(),
        p_defend in probability(),
    ) {
        let strategy = StrategyPair::new(p_attack, p_defend);
        for key in CatalogKey::DEFENSES {
            let reduced = reduce_to_attack_defend(&load(key).net).unwrap();
            let graph = build_reachability(&reduced, &strategy, 64).unwrap();
            let tpm = build_tpm(&graph);
            for sum in tpm.row_sums() {
                prop_assert!((sum - 1.0).abs() <= 1e-9);
            }
        }
    }
}
