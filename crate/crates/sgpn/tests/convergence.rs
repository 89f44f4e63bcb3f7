//! Monte Carlo against the analytic chain for every defense model:
//! at 10^6 runs each outcome frequency must sit within 3 binomial sigma
//! of its stationary value, and the empirical mean attacker reward within
//! 3 sigma of the stage-game expectation.

use sgpn::catalog::{load, CatalogKey};
use sgpn::chain::{build_tpm, outcome_report, stationary_distribution};
use sgpn::game::solve_ne;
use sgpn::reachability::{build_reachability, reduce_to_attack_defend, with_stage_rewards};
use sgpn::sim::{simulate, SimConfig};

const RUNS: u64 = 1_000_000;

#[test]
fn defense_models_converge_to_their_analytic_outcomes() {
    for key in CatalogKey::DEFENSES {
        let entry = load(key);
        let table = entry.rewards.unwrap();
        let ne = solve_ne(&table).unwrap();
        let reduced = with_stage_rewards(&reduce_to_attack_defend(&entry.net).unwrap(), &table);

        let graph = build_reachability(&reduced, &ne, 64).unwrap();
        let tpm = build_tpm(&graph);
        let stationary = stationary_distribution(&tpm).unwrap();
        let analytic = outcome_report(&reduced, &graph, &stationary).unwrap();

        let result = simulate(&reduced, &SimConfig::new(RUNS, 42, ne)).unwrap();
        assert_eq!(result.truncated_runs, 0, "{key}");

        let pairs = [
            ("no_attack", result.no_attack_frequency, analytic.no_attack),
            (
                "attack_success",
                result.attack_success_frequency,
                analytic.attack_success,
            ),
            (
                "attack_defended",
                result.attack_defended_frequency,
                analytic.attack_defended,
            ),
        ];
        for (name, empirical, expected) in pairs {
            let sigma = (expected * (1.0 - expected) / RUNS as f64).sqrt();
            assert!(
                (empirical - expected).abs() <= 3.0 * sigma,
                "{key} {name}: {empirical} vs {expected} (3 sigma = {:.2e})",
                3.0 * sigma
            );
        }

        // The attacker's mean token reward tracks the stage-game value:
        // per-run rewards span at most one unit, so 3 sigma stays below
        // 3 / sqrt(runs) * spread.
        let expected_reward = table.expected_payoffs(&ne).0;
        let spread = 0.9; // widest attacker payoff gap across the catalog
        let bound = 3.0 * spread / (RUNS as f64).sqrt();
        assert!(
            (result.mean_rewards[0] - expected_reward).abs() <= bound,
            "{key} attacker reward {} vs {expected_reward}",
            result.mean_rewards[0]
        );
    }
}
