//! The attacker-defender stage game: payoff tables, mixed-strategy
//! equilibrium by indifference, best-response verification, and discounted
//! utilities over a state-transition kernel.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Attacker's binary action in the stage game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackerAction {
    Attack,
    Hold,
}

/// Defender's binary action in the stage game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefenderAction {
    Defend,
    Idle,
}

/// Payoffs of the 2x2 attacker-defender game.
///
/// Both tables are indexed `[attacker action][defender action]`, with
/// `Attack` and `Defend` at index 0. `attacker` holds the attacker's
/// payoffs, `defender` the defender's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardTable {
    pub attacker: [[f64; 2]; 2],
    pub defender: [[f64; 2]; 2],
}

impl RewardTable {
    pub fn attacker_payoff(&self, a: AttackerAction, d: DefenderAction) -> f64 {
        self.attacker[a as usize][d as usize]
    }

    pub fn defender_payoff(&self, a: AttackerAction, d: DefenderAction) -> f64 {
        self.defender[a as usize][d as usize]
    }

    /// Expected (attacker, defender) payoffs when both players mix.
    pub fn expected_payoffs(&self, s: &StrategyPair) -> (f64, f64) {
        let pa = s.p_attack;
        let pd = s.p_defend;
        let mix = |t: &[[f64; 2]; 2]| {
            pa * (pd * t[0][0] + (1.0 - pd) * t[0][1])
                + (1.0 - pa) * (pd * t[1][0] + (1.0 - pd) * t[1][1])
        };
        (mix(&self.attacker), mix(&self.defender))
    }

    pub fn is_finite(&self) -> bool {
        self.attacker
            .iter()
            .chain(self.defender.iter())
            .flatten()
            .all(|v| v.is_finite())
    }
}

/// Mixing probabilities of the two players: the attacker plays `Attack`
/// with probability `p_attack`, the defender plays `Defend` with
/// probability `p_defend`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyPair {
    pub p_attack: f64,
    pub p_defend: f64,
}

impl StrategyPair {
    pub fn new(p_attack: f64, p_defend: f64) -> Self {
        Self { p_attack, p_defend }
    }

    pub fn in_unit_interval(&self) -> bool {
        (0.0..=1.0).contains(&self.p_attack) && (0.0..=1.0).contains(&self.p_defend)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    /// The indifference equation degenerates: this player's payoff gap does
    /// not depend on the opponent's mix, so any strategy is a best response.
    #[error("{player} is indifferent under every opponent mix; any strategy is a best response")]
    Degenerate { player: &'static str },
    /// The indifference solution falls outside [0,1]: the game has no
    /// interior mixed equilibrium and must be checked on pure profiles.
    #[error("indifference solution {value} for {unknown} lies outside [0,1]; equilibrium is in pure strategies")]
    PureStrategyRegime { unknown: &'static str, value: f64 },
}

/// Solves the interior mixed-strategy Nash equilibrium of the 2x2 game.
///
/// The defender's mix makes the attacker indifferent between attacking and
/// holding; the attacker's mix makes the defender indifferent between
/// defending and idling. Solutions outside [0,1] are reported as errors,
/// never clamped.
pub fn solve_ne(table: &RewardTable) -> Result<StrategyPair, EquilibriumError> {
    let a = &table.attacker;
    // p_defend * a[0][0] + (1-p_defend) * a[0][1] = p_defend * a[1][0] + (1-p_defend) * a[1][1]
    let denom = ((a[0][0] - a[0][1]) - a[1][0]) + a[1][1];
    if denom == 0.0 {
        return Err(EquilibriumError::Degenerate { player: "attacker" });
    }
    let p_defend = (a[1][1] - a[0][1]) / denom;
    if !(0.0..=1.0).contains(&p_defend) {
        return Err(EquilibriumError::PureStrategyRegime {
            unknown: "p_defend",
            value: p_defend,
        });
    }

    let d = &table.defender;
    // p_attack * d[0][0] + (1-p_attack) * d[1][0] = p_attack * d[0][1] + (1-p_attack) * d[1][1]
    let denom = ((d[0][0] - d[1][0]) - d[0][1]) + d[1][1];
    if denom == 0.0 {
        return Err(EquilibriumError::Degenerate { player: "defender" });
    }
    let p_attack = (d[1][1] - d[1][0]) / denom;
    if !(0.0..=1.0).contains(&p_attack) {
        return Err(EquilibriumError::PureStrategyRegime {
            unknown: "p_attack",
            value: p_attack,
        });
    }

    Ok(StrategyPair { p_attack, p_defend })
}

/// Left-minus-right residuals of the two indifference equations at `s`.
///
/// The first component is the attacker's payoff gap (attack minus hold)
/// under the defender's mix, the second the defender's gap (defend minus
/// idle) under the attacker's mix. Both vanish at an interior equilibrium.
pub fn indifference_residuals(table: &RewardTable, s: &StrategyPair) -> (f64, f64) {
    let a = &table.attacker;
    let pd = s.p_defend;
    let attacker = (pd * a[0][0] + (1.0 - pd) * a[0][1]) - (pd * a[1][0] + (1.0 - pd) * a[1][1]);
    let d = &table.defender;
    let pa = s.p_attack;
    let defender = (pa * d[0][0] + (1.0 - pa) * d[1][0]) - (pa * d[0][1] + (1.0 - pa) * d[1][1]);
    (attacker, defender)
}

/// Result of a best-response check at a strategy profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumCheck {
    /// No unilateral pure deviation gains more than the tolerance.
    pub holds: bool,
    /// Largest payoff gain the attacker can realize by a pure deviation.
    pub attacker_gain: f64,
    /// Largest payoff gain the defender can realize by a pure deviation.
    pub defender_gain: f64,
}

/// Checks whether `s` is a Nash equilibrium by comparing each player's
/// expected payoff against both pure deviations, the opponent held fixed.
pub fn verify_equilibrium(table: &RewardTable, s: &StrategyPair, tol: f64) -> EquilibriumCheck {
    let (attacker_at_s, defender_at_s) = table.expected_payoffs(s);

    let attacker_pure = |pa: f64| table.expected_payoffs(&StrategyPair::new(pa, s.p_defend)).0;
    let attacker_gain = attacker_pure(1.0).max(attacker_pure(0.0)) - attacker_at_s;

    let defender_pure = |pd: f64| table.expected_payoffs(&StrategyPair::new(s.p_attack, pd)).1;
    let defender_gain = defender_pure(1.0).max(defender_pure(0.0)) - defender_at_s;

    EquilibriumCheck {
        holds: attacker_gain <= tol && defender_gain <= tol,
        attacker_gain,
        defender_gain,
    }
}

/// Discount factor applied when a model file does not set one.
pub const DEFAULT_DISCOUNT: f64 = 0.9;

/// A discounted stochastic game evaluated under a fixed stationary profile:
/// per-state per-player rewards, a row-stochastic state-transition kernel,
/// and a discount factor in (0,1).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountedGame {
    rewards: Vec<Vec<f64>>,
    kernel: Vec<Vec<f64>>,
    discount: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("kernel row {row} sums to {sum}, expected 1 within 1e-9")]
    NotStochastic { row: usize, sum: f64 },
    #[error("discount factor {0} outside the open interval (0,1)")]
    DiscountOutOfRange(f64),
    #[error("kernel is {rows}x{cols}, expected square of the state count {states}")]
    KernelShape {
        rows: usize,
        cols: usize,
        states: usize,
    },
    #[error("state {state} has {got} reward entries, expected {expected}")]
    RewardShape {
        state: usize,
        got: usize,
        expected: usize,
    },
    #[error("player index {player} out of range for {players} players")]
    PlayerOutOfRange { player: usize, players: usize },
    #[error("utility vector has {got} entries for {expected} states")]
    UtilityShape { got: usize, expected: usize },
    #[error("discounted system unexpectedly singular")]
    Singular,
}

impl DiscountedGame {
    /// Builds a game, checking that the kernel is square and row-stochastic,
    /// reward rows are uniform in length, and the discount lies in (0,1).
    pub fn new(
        rewards: Vec<Vec<f64>>,
        kernel: Vec<Vec<f64>>,
        discount: f64,
    ) -> Result<Self, GameError> {
        if !(discount > 0.0 && discount < 1.0) {
            return Err(GameError::DiscountOutOfRange(discount));
        }
        let states = rewards.len();
        if kernel.len() != states || kernel.iter().any(|r| r.len() != states) {
            return Err(GameError::KernelShape {
                rows: kernel.len(),
                cols: kernel.first().map_or(0, Vec::len),
                states,
            });
        }
        let players = rewards.first().map_or(0, Vec::len);
        for (state, r) in rewards.iter().enumerate() {
            if r.len() != players {
                return Err(GameError::RewardShape {
                    state,
                    got: r.len(),
                    expected: players,
                });
            }
        }
        for (row, r) in kernel.iter().enumerate() {
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(GameError::NotStochastic { row, sum });
            }
        }
        Ok(Self {
            rewards,
            kernel,
            discount,
        })
    }

    pub fn state_count(&self) -> usize {
        self.rewards.len()
    }

    pub fn player_count(&self) -> usize {
        self.rewards.first().map_or(0, Vec::len)
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn reward(&self, state: usize, player: usize) -> f64 {
        self.rewards[state][player]
    }

    pub fn kernel_row(&self, state: usize) -> &[f64] {
        &self.kernel[state]
    }
}

/// Per-state discounted utility of one player under the fixed profile.
///
/// Solves the fixed point `U = R + discount * Q U` directly; the solution
/// equals the infinite discounted reward sum.
pub fn discounted_utility(game: &DiscountedGame, player: usize) -> Result<Vec<f64>, GameError> {
    if player >= game.player_count() {
        return Err(GameError::PlayerOutOfRange {
            player,
            players: game.player_count(),
        });
    }
    let n = game.state_count();
    let mut system = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            system[(i, j)] -= game.discount * game.kernel[i][j];
        }
    }
    let rhs = DVector::from_fn(n, |i, _| game.rewards[i][player]);
    let solution = system.lu().solve(&rhs).ok_or(GameError::Singular)?;
    Ok(solution.iter().copied().collect())
}

/// Max-norm residual of the optimality equation
/// `U(p) = R(p) + discount * sum_x U(x) Q(x|p)` over all states.
pub fn optimality_residual(
    game: &DiscountedGame,
    player: usize,
    utility: &[f64],
) -> Result<f64, GameError> {
    if player >= game.player_count() {
        return Err(GameError::PlayerOutOfRange {
            player,
            players: game.player_count(),
        });
    }
    if utility.len() != game.state_count() {
        return Err(GameError::UtilityShape {
            got: utility.len(),
            expected: game.state_count(),
        });
    }
    let mut worst = 0.0f64;
    for state in 0..game.state_count() {
        let continuation: f64 = game.kernel[state]
            .iter()
            .zip(utility)
            .map(|(q, u)| q * u)
            .sum();
        let residual = utility[state] - game.rewards[state][player] - game.discount * continuation;
        worst = worst.max(residual.abs());
    }
    Ok(worst)
}
