//! Built-in Mobile IP models: four binding-update attacks and their four
//! defense counterparts, with place/transition descriptions, game tags,
//! and reward tables. Each element carries a provenance note saying
//! whether it comes from the published tables or was reconstructed.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::game::RewardTable;
use crate::net::{NetBuilder, NetDefinition, Player, StateTag};

/// Keys of the eight built-in models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogKey {
    DosAttack,
    DosDefense,
    RedirectionAttack,
    RedirectionDefense,
    BombingAttack,
    BombingDefense,
    ReplayAttack,
    ReplayDefense,
}

impl CatalogKey {
    pub const ALL: [CatalogKey; 8] = [
        CatalogKey::DosAttack,
        CatalogKey::DosDefense,
        CatalogKey::RedirectionAttack,
        CatalogKey::RedirectionDefense,
        CatalogKey::BombingAttack,
        CatalogKey::BombingDefense,
        CatalogKey::ReplayAttack,
        CatalogKey::ReplayDefense,
    ];

    pub const DEFENSES: [CatalogKey; 4] = [
        CatalogKey::DosDefense,
        CatalogKey::RedirectionDefense,
        CatalogKey::BombingDefense,
        CatalogKey::ReplayDefense,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogKey::DosAttack => "dos-attack",
            CatalogKey::DosDefense => "dos-defense",
            CatalogKey::RedirectionAttack => "redirection-attack",
            CatalogKey::RedirectionDefense => "redirection-defense",
            CatalogKey::BombingAttack => "bombing-attack",
            CatalogKey::BombingDefense => "bombing-defense",
            CatalogKey::ReplayAttack => "replay-attack",
            CatalogKey::ReplayDefense => "replay-defense",
        }
    }
}

impl fmt::Display for CatalogKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("unknown model key `{key}`; valid keys: {valid}")]
pub struct UnknownKey {
    pub key: String,
    pub valid: String,
}

impl FromStr for CatalogKey {
    type Err = UnknownKey;

    fn from_str(s: &str) -> Result<Self, UnknownKey> {
        CatalogKey::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownKey {
                key: s.to_string(),
                valid: CatalogKey::ALL.map(|k| k.as_str()).join(", "),
            })
    }
}

/// Whether a catalog element is taken from the published tables or was
/// reconstructed to complete the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Published,
    Reconstructed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProvenanceNote {
    pub subject: String,
    pub provenance: Provenance,
}

fn note(subject: &str, provenance: Provenance) -> ProvenanceNote {
    ProvenanceNote {
        subject: subject.to_string(),
        provenance,
    }
}

/// A fully constructed built-in model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub key: CatalogKey,
    pub title: String,
    pub summary: String,
    pub net: NetDefinition,
    /// Stage-game payoffs; absent on the attack-only models.
    pub rewards: Option<RewardTable>,
    pub provenance: Vec<ProvenanceNote>,
}

/// One line of [`list`] output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogSummary {
    pub key: CatalogKey,
    pub title: String,
    pub summary: String,
}

/// The published replay-defense payoffs: capture penalty -0.3, unopposed
/// gain 0.6 for the attacker; defense cost -0.15 and breach cost -0.6 for
/// the defender; idle outcomes pay nothing.
pub fn replay_reward_table() -> RewardTable {
    RewardTable {
        attacker: [[-0.3, 0.6], [0.0, 0.0]],
        defender: [[-0.15, -0.6], [-0.15, 0.0]],
    }
}

/// Rebuilds a reward table from a published operating point, keeping the
/// replay table's structure: zero idle payoffs, a fixed capture penalty
/// and defense cost, and the unopposed gain / breach cost solved backward
/// from the indifference equations so the equilibrium lands on
/// `p_defend` and the success rate on `success`.
fn reconstructed_reward_table(p_defend: f64, success: f64) -> RewardTable {
    let capture_penalty = -0.3;
    let defense_cost = -0.15;
    let p_attack = success / (1.0 - p_defend);
    let unopposed_gain = -capture_penalty * p_defend / (1.0 - p_defend);
    let breach_cost = defense_cost / p_attack;
    RewardTable {
        attacker: [[capture_penalty, unopposed_gain], [0.0, 0.0]],
        defender: [[defense_cost, breach_cost], [defense_cost, 0.0]],
    }
}

/// Published (p_defend, attack success probability) operating points of
/// the three defenses whose full payoff figures are not recoverable.
pub const DOS_OPERATING_POINT: (f64, f64) = (0.724, 0.0857412);
pub const BOMBING_OPERATING_POINT: (f64, f64) = (0.70, 0.0642);
pub const REDIRECTION_OPERATING_POINT: (f64, f64) = (0.684, 0.07287);

fn dos_attack_net() -> NetDefinition {
    NetBuilder::new()
        .tagged_place("State 1", "Attacker is ready to attack.", StateTag::Ready)
        .place("State 2", "Attacker has created bogus registration.")
        .tagged_place(
            "State 3",
            "Attacker's fake request is accepted by MN.",
            StateTag::AttackSuccess,
        )
        .transition(
            "Create bogus reg",
            Player::Attacker,
            "Attacker is creating a bogus registration.",
        )
        .input("State 1")
        .output("State 2")
        .transition(
            "Send Fake Req",
            Player::Attacker,
            "Attacker is sending the fake registration request to MN.",
        )
        .input("State 2")
        .output("State 3")
        .transition(
            "Tunnel Packet to Attacker",
            Player::Environment,
            "MN is fooled by the fake request. Data is tunneled to attacker instead of MN.",
        )
        .input("State 3")
        .output("State 3")
        .initial(&["State 1"])
        .build()
}

fn dos_defense_net() -> NetDefinition {
    NetBuilder::new()
        .tagged_place("State 1", "Attacker is ready to attack.", StateTag::Ready)
        .place("State 2", "Attacker has created bogus registration.")
        .place(
            "State 3",
            "Attacker's fake registration request is submitted to CN.",
        )
        .tagged_place(
            "State 4",
            "MN's authenticate request is accepted by CN.",
            StateTag::NoAttack,
        )
        .place("State 5", "MN is ready to send registration request.")
        .tagged_place(
            "State 6",
            "Attacker's authentication is failed and attack is not done.",
            StateTag::AttackDefended,
        )
        .tagged_place(
            "State 7",
            "Attacker's fake registration is accepted and traffic is tunneled to the attacker.",
            StateTag::AttackSuccess,
        )
        .transition(
            "Create bogus reg",
            Player::Attacker,
            "Attacker is creating a bogus registration.",
        )
        .input("State 1")
        .output("State 2")
        .transition(
            "Send Fake Req",
            Player::Attacker,
            "Attacker is sending the fake registration request to MN.",
        )
        .input("State 2")
        .output("State 3")
        .transition(
            "Fail to Authenticate",
            Player::Defender,
            "CN is unsuccessfully authenticating the registration request of the attacker.",
        )
        .input("State 3")
        .output("State 6")
        .routing(0.5)
        .transition(
            "Successfully Authenticate",
            Player::Defender,
            "CN is successfully authenticating the registration request of the MN.",
        )
        .input("State 3")
        .output("State 7")
        .routing(0.5)
        .transition(
            "Send Reg Req",
            Player::Environment,
            "MN is sending valid registration request to CN.",
        )
        .input("State 5")
        .output("State 4")
        .transition(
            "Tunnel Packet to MN",
            Player::Environment,
            "CN is tunneling packet to MN.",
        )
        .input("State 4")
        .output("State 5")
        .initial(&["State 1", "State 5"])
        .build()
}

fn redirection_attack_net() -> NetDefinition {
    NetBuilder::new()
        .tagged_place("State 1", "Attacker is ready.", StateTag::Ready)
        .place(
            "State 2",
            "Attacker has collected IP addresses of MN and CN.",
        )
        .place("State 3", "Attacker has created fabricated BU.")
        .place(
            "State 4",
            "CN has updated binding cache using wrong IP address.",
        )
        .place("State 5", "CN is ready to send data.")
        .tagged_place(
            "State 6",
            "CN has sent data to wrong CoA.",
            StateTag::AttackSuccess,
        )
        .transition(
            "Collect IP Addresses of MN & CN",
            Player::Attacker,
            "Attacker is collecting IP addresses of MN & CN.",
        )
        .input("State 1")
        .output("State 2")
        .transition(
            "Create Fabricated BU",
            Player::Attacker,
            "Attacker is creating fabricated BU.",
        )
        .input("State 2")
        .output("State 3")
        .transition(
            "Req to Update Binding Cache",
            Player::Attacker,
            "Attacker is requesting to update the binding cache with it's fake BU.",
        )
        .input("State 3")
        .output("State 4")
        .transition(
            "Send Data to New CoA",
            Player::Environment,
            "CN is sending data to wrong CoA.",
        )
        .input("State 4")
        .input("State 5")
        .output("State 6")
        .transition(
            "Back to Ready",
            Player::Environment,
            "CN is getting back to ready to send data again.",
        )
        .input("State 6")
        .output("State 5")
        .initial(&["State 1", "State 5"])
        .build()
}

fn redirection_defense_net() -> NetDefinition {
    NetBuilder::new()
        .tagged_place("State 1", "Attacker is ready.", StateTag::Ready)
        .place(
            "State 2",
            "Attacker has collected IP addresses of MN and CN.",
        )
        .place("State 3", "Attacker has created fabricated BU.")
        .place(
            "State 4",
            "CN has received requests to update binding cache.",
        )
        .tagged_place("State 5", "CN is ready to send data.", StateTag::NoAttack)
        .tagged_place(
            "State 6",
            "CN has failed to authenticate wrong BU and attack is failed.",
            StateTag::AttackDefended,
        )
        .tagged_place(
            "State 7",
            "CN has sent data to wrong CoA.",
            StateTag::AttackSuccess,
        )
        .transition(
            "Collect IP Addresses of MN & CN",
            Player::Attacker,
            "Attacker is collecting IP addresses of MN & CN.",
        )
        .input("State 1")
        .output("State 2")
        .transition(
            "Create Fabricated BU",
            Player::Attacker,
            "Attacker is creating fabricated BU.",
        )
        .input("State 2")
        .output("State 3")
        .transition(
            "Req to Update Binding Cache",
            Player::Attacker,
            "Attacker is requesting to update the binding cache with it's fake BU.",
        )
        .input("State 3")
        .output("State 4")
        .transition(
            "Fail to Authenticate BU",
            Player::Defender,
            "CN is failing to authenticate attacker's fake BU.",
        )
        .input("State 4")
        .output("State 6")
        .routing(0.5)
        .transition(
            "Send Data to New CoA",
            Player::Defender,
            "CN is sending data to wrong CoA without authenticating the BU.",
        )
        .input("State 4")
        .input("State 5")
        .output("State 7")
        .routing(0.5)
        .initial(&["State 1", "State 5"])
        .build()
}

fn bombing_attack_net() -> NetDefinition {
    NetBuilder::new()
        .tagged_place("State 1", "Attacker is ready to attack.", StateTag::Ready)
        .place(
            "State 2",
            "Attacker has established TCP connection with streaming server.",
        )
        .place(
            "State 3",
            "Attacker has obtained data packets from streaming server along with sequence numbers.",
        )
        .place("State 4", "CN updates the binding cache with wrong BU.")
        .place("State 5", "CN (Streaming Server) is ready to send data.")
        .tagged_place(
            "State 6",
            "Victim MN has received unsolicited stream of data from streaming server.",
            StateTag::AttackSuccess,
        )
        .transition(
            "Create TCP/IP Connection",
            Player::Attacker,
            "Attacker is creating a TCP/IP connection with server.",
        )
        .input("State 1")
        .output("State 2")
        .transition(
            "Request for streaming data",
            Player::Attacker,
            "Attacker is requesting for streaming data from streaming server.",
        )
        .input("State 2")
        .output("State 3")
        .transition(
            "Send fake BU to Server",
            Player::Attacker,
            "Attacker is sending fake BU to server specifying that it has changed its location.",
        )
        .input("State 3")
        .output("State 4")
        .transition(
            "Send data to new CoA",
            Player::Environment,
            "CN, in this case the streaming server is sending data to victim's IP.",
        )
        .input("State 4")
        .input("State 5")
        .output("State 6")
        .initial(&["State 1", "State 5"])
        .build()
}

fn bombing_defense_net() -> NetDefinition {
    NetBuilder::new()
        .tagged_place("State 1", "Attacker is ready to attack.", StateTag::Ready)
        .place(
            "State 2",
            "Attacker has established TCP connection with streaming server.",
        )
        .place(
            "State 3",
            "Attacker has obtained data packets from streaming server along with sequence numbers.",
        )
        .place("State 4", "CN updates the binding cache with wrong BU.")
        .tagged_place(
            "State 5",
            "CN (Streaming Server) is ready to send data.",
            StateTag::NoAttack,
        )
        .tagged_place(
            "State 6",
            "Victim MN has received unsolicited stream of data from streaming server.",
            StateTag::AttackSuccess,
        )
        .tagged_place(
            "State 7",
            "Victim MN has sent TCP RESET and attack is failed.",
            StateTag::AttackDefended,
        )
        .transition(
            "Create TCP/IP Connection",
            Player::Attacker,
            "Attacker is creating a TCP/IP connection with server.",
        )
        .input("State 1")
        .output("State 2")
        .transition(
            "Request for streaming data",
            Player::Attacker,
            "Attacker is requesting for streaming data from streaming server.",
        )
        .input("State 2")
        .output("State 3")
        .transition(
            "Send fake BU to Server",
            Player::Attacker,
            "Attacker is sending fake BU to server specifying that it has changed its location.",
        )
        .input("State 3")
        .output("State 4")
        .transition(
            "Send data to new CoA",
            Player::Environment,
            "CN, in this case the streaming server is sending data to victim's IP.",
        )
        .input("State 4")
        .input("State 5")
        .output("State 6")
        .transition(
            "Send TCP RESET",
            Player::Defender,
            "Victim MN is sending TCP RESET signal to CN.",
        )
        .input("State 6")
        .output("State 7")
        .initial(&["State 1", "State 5"])
        .build()
}

fn replay_attack_net() -> NetDefinition {
    NetBuilder::new()
        .place("State 1", "MN is ready.")
        .tagged_place("State 2", "Attacker is ready.", StateTag::Ready)
        .place(
            "State 3",
            "MN's IP is changed due to change of its location.",
        )
        .place(
            "State 4",
            "Attacker has sent a fake BU which was recorded before.",
        )
        .place("State 5", "MN has sent the BU to the CN.")
        .place(
            "State 6",
            "CN has updated the binding cache with attacker's BU.",
        )
        .place("State 7", "CN is ready to send data.")
        .tagged_place(
            "State 8",
            "CN has sent data to updated wrong CoA.",
            StateTag::AttackSuccess,
        )
        .transition(
            "MN ready",
            Player::Environment,
            "MN is becoming ready to interact with CN.",
        )
        .input("State 5")
        .output("State 1")
        .transition(
            "Obtain new IP",
            Player::Environment,
            "MN is obtaining a new IP because it has changed its location.",
        )
        .input("State 1")
        .output("State 3")
        .transition(
            "Send Previously Saved BU",
            Player::Attacker,
            "MN is sending BU to CN.",
        )
        .input("State 2")
        .output("State 4")
        .transition(
            "MN req to update BU",
            Player::Environment,
            "MN is requesting to update binding cache with its BU.",
        )
        .input("State 3")
        .output("State 5")
        .transition(
            "Attacker req to update BU",
            Player::Attacker,
            "Attacker is requesting to update binding cache with its BU.",
        )
        .input("State 4")
        .output("State 6")
        .transition(
            "Send data to new CoA",
            Player::Environment,
            "CN is sending data to fake CoA.",
        )
        .input("State 6")
        .output("State 8")
        .transition(
            "Get Back to Ready",
            Player::Environment,
            "CN is getting ready to send data again.",
        )
        .input("State 8")
        .output("State 7")
        .initial(&["State 1", "State 2"])
        .build()
}

fn replay_defense_net() -> NetDefinition {
    NetBuilder::new()
        .place("State 1", "MN is ready.")
        .tagged_place("State 2", "Attacker is ready.", StateTag::Ready)
        .place(
            "State 3",
            "MN's IP is changed due to change of its location.",
        )
        .place(
            "State 4",
            "Attacker has sent a fake BU which was recorded before.",
        )
        .place("State 5", "MN has sent the BU to the CN.")
        .place(
            "State 6",
            "CN has received requests to update the binding cache.",
        )
        .tagged_place("State 7", "CN is ready to send data.", StateTag::NoAttack)
        .tagged_place(
            "State 8",
            "CN has failed to authenticate fake BU and attack is failed.",
            StateTag::AttackDefended,
        )
        .tagged_place(
            "State 9",
            "CN has sent data to updated wrong CoA.",
            StateTag::AttackSuccess,
        )
        .transition(
            "MN ready",
            Player::Environment,
            "MN is becoming ready to interact with CN.",
        )
        .input("State 5")
        .output("State 7")
        .transition(
            "Obtain new IP",
            Player::Environment,
            "MN is obtaining a new IP because it has changed its location.",
        )
        .input("State 1")
        .output("State 3")
        .transition(
            "Send Previously Saved BU",
            Player::Attacker,
            "MN is sending BU to CN.",
        )
        .input("State 2")
        .output("State 4")
        .transition(
            "MN req to update BU",
            Player::Environment,
            "MN is requesting to update binding cache with its BU.",
        )
        .input("State 3")
        .output("State 5")
        .transition(
            "Attacker req to update BU",
            Player::Attacker,
            "Attacker is requesting to update binding cache with its BU.",
        )
        .input("State 4")
        .output("State 6")
        .transition(
            "Authenticate BU",
            Player::Defender,
            "CN is authenticating the BU send by the attacker.",
        )
        .input("State 6")
        .output("State 8")
        .routing(0.5)
        .transition(
            "Send data to new CoA",
            Player::Defender,
            "CN is sending data to fake CoA without authenticating the BU.",
        )
        .input("State 6")
        .output("State 9")
        .routing(0.5)
        .initial(&["State 1", "State 2"])
        .build()
}

const WIRING_NOTE: &str = "arc wiring inferred from the step narrative and table row order";

/// Loads one built-in model.
pub fn load(key: CatalogKey) -> CatalogEntry {
    match key {
        CatalogKey::DosAttack => CatalogEntry {
            key,
            title: "Denial-of-Service (DoS) attack".into(),
            summary: "Attacker creates a bogus registration request naming its own address as \
                      the MN's care-of address, so traffic is tunneled to the attacker."
                .into(),
            net: dos_attack_net(),
            rewards: None,
            provenance: vec![
                note("place and transition descriptions", Provenance::Published),
                note(WIRING_NOTE, Provenance::Reconstructed),
            ],
        },
        CatalogKey::DosDefense => CatalogEntry {
            key,
            title: "Denial-of-Service (DoS) defense".into(),
            summary: "Strong authentication on registration traffic rejects the attacker's \
                      bogus registration while the MN keeps registering normally."
                .into(),
            net: dos_defense_net(),
            rewards: Some(reconstructed_reward_table(
                DOS_OPERATING_POINT.0,
                DOS_OPERATING_POINT.1,
            )),
            provenance: vec![
                note("place and transition descriptions", Provenance::Published),
                note(WIRING_NOTE, Provenance::Reconstructed),
                note(
                    "place `State 7` (attack success outcome)",
                    Provenance::Reconstructed,
                ),
                note(
                    "reward table derived from the operating point p_defend=0.724, success=0.0857412",
                    Provenance::Reconstructed,
                ),
            ],
        },
        CatalogKey::RedirectionAttack => CatalogEntry {
            key,
            title: "Redirection attack".into(),
            summary: "Attacker sends a fabricated binding update so the CN redirects the MN's \
                      traffic to a wrong care-of address."
                .into(),
            net: redirection_attack_net(),
            rewards: None,
            provenance: vec![
                note("place and transition descriptions", Provenance::Published),
                note(WIRING_NOTE, Provenance::Reconstructed),
            ],
        },
        CatalogKey::RedirectionDefense => CatalogEntry {
            key,
            title: "Redirection defense".into(),
            summary: "CN authenticates every binding update before use and drops the \
                      attacker's fabricated BU."
                .into(),
            net: redirection_defense_net(),
            rewards: Some(reconstructed_reward_table(
                REDIRECTION_OPERATING_POINT.0,
                REDIRECTION_OPERATING_POINT.1,
            )),
            provenance: vec![
                note("place and transition descriptions", Provenance::Published),
                note(WIRING_NOTE, Provenance::Reconstructed),
                note(
                    "place `State 7` and transition `Send Data to New CoA` (pass branch)",
                    Provenance::Reconstructed,
                ),
                note(
                    "reward table derived from the operating point p_defend=0.684, success=0.07287",
                    Provenance::Reconstructed,
                ),
            ],
        },
        CatalogKey::BombingAttack => CatalogEntry {
            key,
            title: "Bombing attack".into(),
            summary: "Attacker requests a large data stream, then redirects it with a fake \
                      binding update so the stream bombs the victim MN."
                .into(),
            net: bombing_attack_net(),
            rewards: None,
            provenance: vec![
                note("place and transition descriptions", Provenance::Published),
                note(WIRING_NOTE, Provenance::Reconstructed),
            ],
        },
        CatalogKey::BombingDefense => CatalogEntry {
            key,
            title: "Bombing defense".into(),
            summary: "The victim MN answers the unsolicited stream with a TCP RESET, cutting \
                      the redirected flow."
                .into(),
            net: bombing_defense_net(),
            rewards: Some(reconstructed_reward_table(
                BOMBING_OPERATING_POINT.0,
                BOMBING_OPERATING_POINT.1,
            )),
            provenance: vec![
                note("place and transition descriptions", Provenance::Published),
                note(WIRING_NOTE, Provenance::Reconstructed),
                note(
                    "reward table derived from the operating point p_defend=0.70, success=0.0642",
                    Provenance::Reconstructed,
                ),
            ],
        },
        CatalogKey::ReplayAttack => CatalogEntry {
            key,
            title: "Replay attack".into(),
            summary: "Attacker records a binding update and replays it to the CN after the MN \
                      moves again, diverting traffic to a stale address."
                .into(),
            net: replay_attack_net(),
            rewards: None,
            provenance: vec![
                note("place and transition descriptions", Provenance::Published),
                note(WIRING_NOTE, Provenance::Reconstructed),
            ],
        },
        CatalogKey::ReplayDefense => CatalogEntry {
            key,
            title: "Replay defense".into(),
            summary: "CN authenticates binding updates against stored sequence numbers, so the \
                      replayed BU fails authentication."
                .into(),
            net: replay_defense_net(),
            rewards: Some(replay_reward_table()),
            provenance: vec![
                note("place and transition descriptions", Provenance::Published),
                note(WIRING_NOTE, Provenance::Reconstructed),
                note(
                    "place `State 9` and transition `Send data to new CoA` (pass branch)",
                    Provenance::Reconstructed,
                ),
                note("reward table", Provenance::Published),
            ],
        },
    }
}

/// Loads a model by its string key.
pub fn load_key(key: &str) -> Result<CatalogEntry, UnknownKey> {
    key.parse().map(load)
}

/// All eight models as one-line summaries.
pub fn list() -> Vec<CatalogSummary> {
    CatalogKey::ALL
        .into_iter()
        .map(|key| {
            let entry = load(key);
            CatalogSummary {
                key,
                title: entry.title,
                summary: entry.summary,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_tpm, node_outcome, outcome_report, stationary_distribution};
    use crate::game::{solve_ne, StrategyPair};
    use crate::net::validate_net;
    use crate::reachability::{build_reachability, reduce_to_attack_defend};
    use approx::assert_abs_diff_eq;

    #[test]
    fn every_entry_validates_cleanly() {
        for key in CatalogKey::ALL {
            let entry = load(key);
            assert_eq!(validate_net(&entry.net), vec![], "{key} fails validation");
        }
    }

    #[test]
    fn list_covers_all_keys_with_summaries() {
        let summaries = list();
        assert_eq!(summaries.len(), 8);
        for s in &summaries {
            assert!(!s.summary.is_empty());
            assert_eq!(s.key, s.key.as_str().parse::<CatalogKey>().unwrap());
        }
    }

    #[test]
    fn unknown_keys_list_the_valid_ones() {
        let err = load_key("replay").unwrap_err();
        assert!(err.valid.contains("replay-defense"));
    }

    #[test]
    fn dos_attack_matches_the_published_structure() {
        let entry = load(CatalogKey::DosAttack);
        assert_eq!(entry.net.places().len(), 3);
        assert_eq!(entry.net.transitions().len(), 3);
        for label in [
            "Create bogus reg",
            "Send Fake Req",
            "Tunnel Packet to Attacker",
        ] {
            assert!(entry.net.transition_id(label).is_some(), "missing {label}");
        }
    }

    #[test]
    fn dos_attack_walks_its_three_state_path() {
        let net = load(CatalogKey::DosAttack).net;
        let graph = build_reachability(&net, &StrategyPair::new(1.0, 0.0), 16).unwrap();
        assert_eq!(graph.node_count(), 3);
        let path: Vec<(usize, usize)> = graph.edges.iter().map(|e| (e.src, e.dst)).collect();
        assert!(path.contains(&(0, 1)));
        assert!(path.contains(&(1, 2)));
        assert!(path.contains(&(2, 2))); // attack state persists

        // Firing the first step moves the token from State 1 to State 2.
        let create = net.transition_id("Create bogus reg").unwrap();
        let next = crate::net::fire(&net, net.initial_marking(), create).unwrap();
        assert_eq!(next.count(net.place_id("State 1").unwrap()), 0);
        assert_eq!(next.count(net.place_id("State 2").unwrap()), 1);
    }

    #[test]
    fn table_sizes_match_the_published_models() {
        let sizes = [
            (CatalogKey::DosAttack, 3, 3),
            (CatalogKey::RedirectionAttack, 6, 5),
            (CatalogKey::BombingAttack, 6, 4),
            (CatalogKey::ReplayAttack, 8, 7),
        ];
        for (key, places, transitions) in sizes {
            let net = load(key).net;
            assert_eq!(net.places().len(), places, "{key} places");
            assert_eq!(net.transitions().len(), transitions, "{key} transitions");
        }
    }

    #[test]
    fn replay_defense_carries_the_published_rewards() {
        let table = load(CatalogKey::ReplayDefense).rewards.unwrap();
        assert_eq!(table.attacker, [[-0.3, 0.6], [0.0, 0.0]]);
        assert_eq!(table.defender, [[-0.15, -0.6], [-0.15, 0.0]]);
    }

    #[test]
    fn bombing_defense_sends_tcp_reset_into_the_defended_place() {
        let net = load(CatalogKey::BombingDefense).net;
        let reset = net.transition_id("Send TCP RESET").unwrap();
        let outputs = net.transition_outputs(reset);
        assert_eq!(outputs.len(), 1);
        assert_eq!(net.place(outputs[0]).tag, StateTag::AttackDefended);
    }

    #[test]
    fn replay_defense_initial_marking_enables_exactly_the_ready_consumers() {
        let net = load(CatalogKey::ReplayDefense).net;
        let enabled = crate::net::enabled_transitions(&net, net.initial_marking()).unwrap();
        // Derive the expectation independently from the arc list: the
        // transitions whose inputs sit inside the initially marked places.
        let marked: Vec<_> = net
            .place_ids()
            .filter(|&p| net.initial_marking().count(p) >= 1)
            .collect();
        let expected: std::collections::BTreeSet<_> = net
            .transition_ids()
            .filter(|&t| {
                let inputs = net.transition_inputs(t);
                !inputs.is_empty() && inputs.iter().all(|p| marked.contains(p))
            })
            .collect();
        assert_eq!(enabled, expected);
        assert_eq!(enabled.len(), 2);
    }

    #[test]
    fn every_defense_reduces_to_a_small_graph() {
        for key in CatalogKey::DEFENSES {
            let entry = load(key);
            let reduced = reduce_to_attack_defend(&entry.net).unwrap();
            let ne = solve_ne(&entry.rewards.unwrap()).unwrap();
            let graph = build_reachability(&reduced, &ne, 64).unwrap();
            assert!(
                graph.node_count() <= 6,
                "{key}: {} nodes",
                graph.node_count()
            );
            assert!(!graph.truncated);
        }
    }

    #[test]
    fn reconstructed_tables_hit_the_published_operating_points() {
        let points = [
            (CatalogKey::DosDefense, DOS_OPERATING_POINT),
            (CatalogKey::BombingDefense, BOMBING_OPERATING_POINT),
            (CatalogKey::RedirectionDefense, REDIRECTION_OPERATING_POINT),
        ];
        for (key, (p_defend, success)) in points {
            let ne = solve_ne(&load(key).rewards.unwrap()).unwrap();
            assert_abs_diff_eq!(ne.p_defend, p_defend, epsilon = 1e-9);
            assert_abs_diff_eq!(ne.p_attack * (1.0 - ne.p_defend), success, epsilon = 1e-9);
        }
    }

    #[test]
    fn replay_defense_golden_outcome_triple() {
        let entry = load(CatalogKey::ReplayDefense);
        let ne = solve_ne(&entry.rewards.unwrap()).unwrap();
        let reduced = reduce_to_attack_defend(&entry.net).unwrap();
        let graph = build_reachability(&reduced, &ne, 64).unwrap();
        let tpm = build_tpm(&graph);
        let stationary = stationary_distribution(&tpm).unwrap();
        let outcome = outcome_report(&reduced, &graph, &stationary).unwrap();
        assert_abs_diff_eq!(outcome.no_attack, 0.75, epsilon = 1e-4);
        assert_abs_diff_eq!(outcome.attack_success, 0.08333, epsilon = 1e-4);
        assert_abs_diff_eq!(outcome.attack_defended, 0.16667, epsilon = 1e-4);
    }

    /// Probability of ever visiting a success-tagged marking, computed by
    /// fixpoint iteration over the reachability graph (test-side oracle).
    fn success_hitting_probability(net: &NetDefinition) -> f64 {
        let graph = build_reachability(net, &StrategyPair::new(1.0, 0.0), 1024).unwrap();
        assert!(!graph.truncated);
        let tpm = build_tpm(&graph);
        let success: Vec<bool> = graph
            .nodes
            .iter()
            .map(|m| node_outcome(net, m) == Some(StateTag::AttackSuccess))
            .collect();
        let n = graph.node_count();
        let mut h = vec![0.0f64; n];
        for _ in 0..20_000 {
            let mut next = vec![0.0; n];
            for i in 0..n {
                next[i] = if success[i] {
                    1.0
                } else {
                    (0..n).map(|j| tpm.get(i, j) * h[j]).sum()
                };
            }
            h = next;
        }
        h[0]
    }

    #[test]
    fn attack_models_reach_success_with_probability_one() {
        for key in [
            CatalogKey::DosAttack,
            CatalogKey::RedirectionAttack,
            CatalogKey::BombingAttack,
            CatalogKey::ReplayAttack,
        ] {
            let net = load(key).net;
            let h = success_hitting_probability(&net);
            assert_abs_diff_eq!(h, 1.0, epsilon = 1e-9);
        }
    }
}
