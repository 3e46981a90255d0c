//! Round-based session engine: Alice uploads symbols onto the shared carrier,
//! players download and retrieve them, stray symbols are inserted and publicly
//! compared, and adversary hooks act on the state in transit. Transcripts are
//! reproducible bit-for-bit from the seed.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::adversary::AttackModel;
use crate::carrier::{
    apply_hadamard_round_wires, build_carrier, download_operator, encode_message, encoded_state,
    upload, uploaded_joint, RoundParity, SchemeSpec, SchemeVariant,
};
use crate::codes::retrieve_classical;
use crate::error::{Error, Result};
use crate::qudit::{QuditState, SparseDensity, WireRole};

/// A protocol participant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartyId {
    Alice,
    Player(u32),
    Eve,
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartyId::Alice => write!(f, "alice"),
            PartyId::Player(i) => write!(f, "player_{i}"),
            PartyId::Eve => write!(f, "eve"),
        }
    }
}

impl FromStr for PartyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alice" => Ok(PartyId::Alice),
            "eve" => Ok(PartyId::Eve),
            other => other
                .strip_prefix("player_")
                .and_then(|rest| rest.parse().ok())
                .map(PartyId::Player)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown party `{s}`"))),
        }
    }
}

impl Serialize for PartyId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PartyId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse()
            .map_err(|_| D::Error::custom(format!("unknown party `{s}`")))
    }
}

fn default_stray_fraction() -> f64 {
    0.25
}

fn default_true() -> bool {
    true
}

/// Everything needed to run one reproducible session.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SessionConfig {
    pub scheme: SchemeSpec,
    pub rounds: u32,
    #[serde(default)]
    pub payload: Vec<u32>,
    #[serde(default = "default_stray_fraction")]
    pub stray_fraction: f64,
    pub rng_seed: u64,
    #[serde(default = "default_true")]
    pub hadamard_every_round: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary: Option<AttackModel>,
    /// Player indices (1-based) that retrieve each round; defaults to all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieve_subset: Option<Vec<u32>>,
    /// Player indices that publicly announce stray outcomes; defaults to all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub announce_subset: Option<Vec<u32>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RoundKind {
    Stray,
    Payload,
    Filler,
}

/// One transcript line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub parity: RoundParity,
    pub is_stray: bool,
    pub symbol_sent: u32,
    pub symbol_retrieved: Option<u32>,
    /// Stray outcome reconstructed from the announcing subset.
    pub announced: Option<u32>,
    /// Set on stray rounds: did the announcement mismatch the sent symbol?
    pub detection_flag: Option<bool>,
    /// Difference recovered by Eve this round, when she is attached.
    pub eve_difference: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetectionStats {
    pub stray_rounds: u32,
    pub mismatches: u32,
    pub mismatch_rate: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SessionSummary {
    pub rounds: u32,
    pub payload_rounds: u32,
    pub payload_recovered: u32,
    pub stray_rounds: u32,
    pub mismatches: u32,
    pub mismatch_rate: f64,
    pub eve_differences: Vec<u32>,
    /// Max pairwise in-transit distance seen by a passive interceptor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passive_leakage: Option<f64>,
    pub final_carrier_fidelity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub scheme: SchemeSpec,
    pub rng_seed: u64,
    pub records: Vec<RoundRecord>,
    pub final_carrier_fidelity: f64,
    pub summary: SessionSummary,
}

impl SessionTranscript {
    /// One JSON object per round, then one `{"summary": ...}` line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("record serializes"));
            out.push('\n');
        }
        let summary = serde_json::json!({ "scheme": self.scheme, "rng_seed": self.rng_seed, "summary": self.summary });
        out.push_str(&serde_json::to_string(&summary).expect("summary serializes"));
        out.push('\n');
        out
    }
}

/// Compares announced stray outcomes against the sent symbols.
pub fn detection_check(transcript: &SessionTranscript) -> DetectionStats {
    let mut stray_rounds = 0;
    let mut mismatches = 0;
    for record in &transcript.records {
        if record.is_stray {
            stray_rounds += 1;
            if record.announced != Some(record.symbol_sent) {
                mismatches += 1;
            }
        }
    }
    DetectionStats {
        stray_rounds,
        mismatches,
        mismatch_rate: if stray_rounds == 0 {
            0.0
        } else {
            mismatches as f64 / stray_rounds as f64
        },
    }
}

/// Decodes a symbol from (player index, measured digit) shares.
pub(crate) fn decode_shares(scheme: &SchemeSpec, shares: &[(u32, u32)]) -> Result<u32> {
    match scheme.variant() {
        SchemeVariant::Kd => shares
            .first()
            .map(|&(_, v)| v)
            .ok_or(Error::InsufficientShares { needed: 1, got: 0 }),
        SchemeVariant::TwoTwo | SchemeVariant::Nn { .. } => match scheme.round_parity() {
            RoundParity::Odd => {
                let first = shares
                    .first()
                    .ok_or(Error::InsufficientShares { needed: 1, got: 0 })?
                    .1;
                if shares.iter().any(|&(_, v)| v != first) {
                    return Err(Error::InconsistentShares);
                }
                Ok(first)
            }
            RoundParity::Even => {
                let w = scheme.width() as usize;
                if shares.len() != w {
                    return Err(Error::InsufficientShares {
                        needed: w,
                        got: shares.len(),
                    });
                }
                Ok(shares.iter().map(|&(_, v)| v).sum::<u32>() % 2)
            }
        },
        SchemeVariant::Kn { k, .. } => {
            if (shares.len() as u32) < k {
                return Err(Error::InsufficientShares {
                    needed: k as usize,
                    got: shares.len(),
                });
            }
            let spec = scheme.code_spec().expect("kn scheme carries a code");
            let evals: Vec<(u32, u32)> = shares.iter().map(|&(p, v)| (p - 1, v)).collect();
            retrieve_classical(&spec, &evals)
        }
    }
}

fn checked_player_subset(scheme: &SchemeSpec, subset: Option<&Vec<u32>>) -> Result<Vec<u32>> {
    let w = scheme.width();
    let mut players: Vec<u32> = match subset {
        Some(list) => list.clone(),
        None => (1..=w).collect(),
    };
    players.sort_unstable();
    players.dedup();
    if players.is_empty() || players.iter().any(|&p| p == 0 || p > w) {
        return Err(Error::InvalidConfig("player subset out of range".into()));
    }
    match scheme.variant() {
        SchemeVariant::Kn { k, .. } => {
            if (players.len() as u32) < k {
                return Err(Error::InsufficientShares {
                    needed: k as usize,
                    got: players.len(),
                });
            }
        }
        SchemeVariant::TwoTwo | SchemeVariant::Nn { .. } => {
            if players.len() as u32 != w {
                return Err(Error::InsufficientShares {
                    needed: w as usize,
                    got: players.len(),
                });
            }
        }
        SchemeVariant::Kd => {}
    }
    Ok(players)
}

/// Measurement-based retrieval from a downloaded message state by an
/// authorized subset of players, seeded for reproducibility.
pub fn authorized_retrieve(
    scheme: &SchemeSpec,
    downloaded: &QuditState,
    subset: &[PartyId],
    rng_seed: u64,
) -> Result<u32> {
    let mut players = Vec::new();
    for party in subset {
        match party {
            PartyId::Player(i) => players.push(*i),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "`{other}` cannot retrieve shares"
                )))
            }
        }
    }
    players.sort_unstable();
    players.dedup();
    let w = scheme.width();
    if players.iter().any(|&p| p == 0 || p > w) {
        return Err(Error::InvalidConfig("player subset out of range".into()));
    }
    let needed = match scheme.variant() {
        SchemeVariant::Kn { k, .. } => k,
        SchemeVariant::TwoTwo | SchemeVariant::Nn { .. } => match scheme.round_parity() {
            RoundParity::Odd => 1,
            RoundParity::Even => w,
        },
        SchemeVariant::Kd => 1,
    };
    if (players.len() as u32) < needed {
        return Err(Error::InsufficientShares {
            needed: needed as usize,
            got: players.len(),
        });
    }
    if downloaded.layout() != &scheme.message_layout() {
        return Err(Error::LayoutMismatch);
    }
    let wires: Vec<usize> = players.iter().map(|&p| (p - 1) as usize).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let outcome = downloaded.measure_computational(&wires, &mut rng)?;
    let shares: Vec<(u32, u32)> = players
        .iter()
        .zip(outcome.digits.iter())
        .map(|(&p, &v)| (p, v))
        .collect();
    decode_shares(scheme, &shares)
}

/// Only the acting players apply their inverse CNOTs; the carrier keeps any
/// entanglement the absent players would have cleaned.
pub fn partial_download(
    joint: &QuditState,
    scheme: &SchemeSpec,
    acting_players: &[u32],
) -> Result<QuditState> {
    let w = scheme.width();
    if acting_players.is_empty() || acting_players.iter().any(|&p| p == 0 || p > w) {
        return Err(Error::InvalidWireSubset);
    }
    let mut state = joint.clone();
    for &p in acting_players {
        let control = state
            .layout()
            .position(WireRole::Player(p))
            .ok_or_else(|| Error::InvalidScheme(format!("no player_{p} wire")))?;
        let target = state
            .layout()
            .position(WireRole::Message(p))
            .ok_or_else(|| Error::InvalidScheme(format!("no message_{p} wire")))?;
        state = state.apply_inverse_cnot(control, target, 1)?;
    }
    Ok(state)
}

/// Outcome of one retrieval/cleaning ordering.
#[derive(Clone, Debug)]
pub struct OrderingOutcome {
    pub symbol: u32,
    pub final_state: QuditState,
}

/// Runs retrieval-then-clean and clean-then-retrieval on the same uploaded
/// joint with the same measurement seed, for the commutation check.
pub fn retrieval_cleaning_orderings(
    scheme: &SchemeSpec,
    symbol: u32,
    subset: &[u32],
    rng_seed: u64,
) -> Result<(OrderingOutcome, OrderingOutcome)> {
    let w = scheme.width();
    let complement: Vec<u32> = (1..=w).filter(|p| !subset.contains(p)).collect();
    let joint = uploaded_joint(scheme, symbol)?;

    let run = |first: &[u32], second: &[u32], measure_between: bool| -> Result<OrderingOutcome> {
        let measure_wires: Vec<usize> = subset.iter().map(|&p| (p - 1 + w + 1) as usize).collect();
        let mut state = if first.is_empty() {
            joint.clone()
        } else {
            partial_download(&joint, scheme, first)?
        };
        let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
        let mut measured: Option<Vec<(u32, u32)>> = None;
        if measure_between {
            let outcome = state.measure_computational(&measure_wires, &mut rng)?;
            measured = Some(
                subset
                    .iter()
                    .zip(outcome.digits.iter())
                    .map(|(&p, &v)| (p, v))
                    .collect(),
            );
            state = outcome.post_state;
        }
        if !second.is_empty() {
            state = partial_download(&state, scheme, second)?;
        }
        let shares = match measured {
            Some(shares) => shares,
            None => {
                let outcome = state.measure_computational(&measure_wires, &mut rng)?;
                let shares = subset
                    .iter()
                    .zip(outcome.digits.iter())
                    .map(|(&p, &v)| (p, v))
                    .collect();
                state = outcome.post_state;
                shares
            }
        };
        Ok(OrderingOutcome {
            symbol: decode_shares(scheme, &shares)?,
            final_state: state,
        })
    };

    // retrieval first: subset downloads and measures, then the rest clean
    let retrieve_first = run(subset, &complement, true)?;
    // cleaning first: the rest clean, then the subset downloads and measures
    let clean_first = run(&complement, subset, false)?;
    Ok((retrieve_first, clean_first))
}

struct RoundPlan {
    parity: RoundParity,
    kind: RoundKind,
    symbol: u32,
}

fn role_positions(state: &QuditState, make: fn(u32) -> WireRole, count: u32) -> Result<Vec<usize>> {
    (1..=count)
        .map(|j| {
            state
                .layout()
                .position(make(j))
                .ok_or_else(|| Error::InvalidScheme(format!("missing `{}` wire", make(j))))
        })
        .collect()
}

impl SessionConfig {
    fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.stray_fraction) {
            return Err(Error::InvalidConfig(
                "stray_fraction must lie in [0, 1)".into(),
            ));
        }
        let d = self.scheme.dimension();
        if let Some(&bad) = self.payload.iter().find(|&&s| s >= d) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad,
                dimension: d,
            });
        }
        checked_player_subset(&self.scheme, self.retrieve_subset.as_ref())?;
        checked_player_subset(&self.scheme, self.announce_subset.as_ref())?;
        match &self.adversary {
            Some(AttackModel::EntangleDifference) => {
                if !matches!(
                    self.scheme.variant(),
                    SchemeVariant::Kd | SchemeVariant::Kn { .. }
                ) {
                    return Err(Error::UnsupportedAttack(
                        "entangle_difference runs on the kd and kn carriers".into(),
                    ));
                }
            }
            Some(AttackModel::InsiderB3) => {
                return Err(Error::UnsupportedAttack(
                    "insider_b3 is a standalone experiment, not a session adversary".into(),
                ));
            }
            Some(AttackModel::ContaminateCarrier { .. })
            | Some(AttackModel::PassiveIntercept)
            | None => {}
        }
        Ok(())
    }
}

/// Runs one full session: per round, encode, upload, adversary transit hook,
/// download, retrieve, optional Hadamard round.
pub fn run_session(config: &SessionConfig) -> Result<SessionTranscript> {
    config.validate()?;
    let scheme = &config.scheme;
    let d = scheme.dimension();
    let w = scheme.width();
    let mut rng = ChaCha12Rng::seed_from_u64(config.rng_seed);

    let contaminating = matches!(
        config.adversary,
        Some(AttackModel::ContaminateCarrier { .. })
    );

    // Round parities: the end-of-round Hadamard alternates the (2,2)/(n,n)
    // carrier between odd and even form. With the per-round re-contamination
    // model the Hadamard is folded into the round start, so the check parity
    // is already the flipped one.
    let mut parities = Vec::with_capacity(config.rounds as usize);
    let mut parity = scheme.round_parity();
    for _ in 0..config.rounds {
        let effective = if contaminating && config.hadamard_every_round && scheme.parity_matters() {
            parity.flip()
        } else {
            parity
        };
        parities.push(effective);
        if config.hadamard_every_round && scheme.parity_matters() {
            parity = parity.flip();
        }
    }
    let final_parity = parity;

    // Stray plan, then symbols, drawn in round order for reproducibility.
    let stray_draws: Vec<f64> = (0..config.rounds).map(|_| rng.gen()).collect();
    let stray_mask: Vec<bool> = (0..config.rounds as usize)
        .map(|i| {
            let forced = scheme.parity_matters() && parities[i] == RoundParity::Odd;
            forced || stray_draws[i] < config.stray_fraction
        })
        .collect();
    let payload_slots = stray_mask.iter().filter(|s| !**s).count();
    if config.payload.len() > payload_slots {
        return Err(Error::InvalidConfig(format!(
            "payload of {} symbols exceeds the {} non-stray rounds",
            config.payload.len(),
            payload_slots
        )));
    }
    let mut payload_iter = config.payload.iter();
    let mut plan = Vec::with_capacity(config.rounds as usize);
    for i in 0..config.rounds as usize {
        let (kind, symbol) = if stray_mask[i] {
            (RoundKind::Stray, rng.gen_range(0..d))
        } else if let Some(&s) = payload_iter.next() {
            (RoundKind::Payload, s)
        } else {
            (RoundKind::Filler, rng.gen_range(0..d))
        };
        plan.push(RoundPlan {
            parity: parities[i],
            kind,
            symbol,
        });
    }

    let retrieve_players = checked_player_subset(scheme, config.retrieve_subset.as_ref())?;
    let announce_players = checked_player_subset(scheme, config.announce_subset.as_ref())?;

    // World state: carrier wires plus whatever the adversary keeps attached.
    let mut world = build_carrier(&scheme.with_parity(parities[0]))?.into_state();
    if matches!(config.adversary, Some(AttackModel::EntangleDifference)) {
        let eve_labels: Vec<WireRole> = (1..=w).map(WireRole::Eve).collect();
        let eve_zero = encoded_state(scheme, 0, eve_labels)?;
        world = world.tensor(&eve_zero)?;
    }
    let contaminate_ancillas = match &config.adversary {
        Some(model @ AttackModel::ContaminateCarrier { .. }) => {
            Some(crate::adversary::resolve_ancillas(model, d)?)
        }
        _ => None,
    };
    let mut eve = crate::adversary::DifferenceEve::new();
    let mut passive_marginals: Vec<SparseDensity> = Vec::new();

    let mut records = Vec::with_capacity(config.rounds as usize);
    for (i, round) in plan.iter().enumerate() {
        let scheme_r = scheme.with_parity(round.parity);
        if let Some(ancillas) = &contaminate_ancillas {
            // Fresh re-entanglement each round: Eve rebuilds her hold on the
            // carrier, and the end-of-round Hadamard lands before the check.
            let pre = if config.hadamard_every_round && scheme.parity_matters() {
                scheme_r.with_parity(round.parity.flip())
            } else {
                scheme_r.clone()
            };
            let contaminated = crate::adversary::build_contaminated_carrier(&pre, ancillas)?;
            world = if config.hadamard_every_round {
                apply_hadamard_round_wires(&contaminated, scheme)?
            } else {
                contaminated
            };
        }

        let message = encode_message(&scheme_r, round.symbol)?;
        let mut joint = world.tensor(&message)?;
        joint = upload(&joint, &scheme_r)?;

        if matches!(config.adversary, Some(AttackModel::PassiveIntercept)) {
            let message_wires = role_positions(&joint, WireRole::Message, w)?;
            passive_marginals.push(joint.reduced_sparse(&message_wires)?);
        }

        let mut eve_difference = None;
        if matches!(config.adversary, Some(AttackModel::EntangleDifference)) {
            let (transited, difference) = eve.transit(joint, scheme, &mut rng)?;
            joint = transited;
            eve_difference = difference;
        }

        joint = download_operator(&joint, &scheme_r)?;
        let message_wires = role_positions(&joint, WireRole::Message, w)?;
        let outcome = joint.measure_computational(&message_wires, &mut rng)?;
        world = outcome
            .post_state
            .remove_wires(&message_wires, &outcome.digits)?;

        let share_at = |players: &[u32]| -> Vec<(u32, u32)> {
            players
                .iter()
                .map(|&p| (p, outcome.digits[(p - 1) as usize]))
                .collect()
        };
        let symbol_retrieved = decode_shares(&scheme_r, &share_at(&retrieve_players)).ok();
        let is_stray = round.kind == RoundKind::Stray;
        let announced = if is_stray {
            decode_shares(&scheme_r, &share_at(&announce_players)).ok()
        } else {
            None
        };
        let detection_flag = is_stray.then(|| announced != Some(round.symbol));

        if config.hadamard_every_round && !contaminating {
            world = apply_hadamard_round_wires(&world, scheme)?;
        }

        records.push(RoundRecord {
            round: i as u32 + 1,
            parity: round.parity,
            is_stray,
            symbol_sent: round.symbol,
            symbol_retrieved,
            announced,
            detection_flag,
            eve_difference,
        });
    }

    // Final carrier quality against the clean carrier of the closing parity.
    let reference = build_carrier(&scheme.with_parity(final_parity))?;
    let final_carrier_fidelity = if world.layout() == reference.state().layout() {
        world.fidelity(reference.state())?
    } else {
        let carrier_wires: Vec<usize> = {
            let mut wires = vec![world
                .layout()
                .position(WireRole::Alice)
                .ok_or_else(|| Error::InvalidScheme("missing alice wire".into()))?];
            wires.extend(role_positions(&world, WireRole::Player, w)?);
            wires
        };
        world
            .overlap_with_pure_on(&carrier_wires, reference.state())?
            .max(0.0)
            .sqrt()
    };

    let passive_leakage = if passive_marginals.is_empty() {
        None
    } else {
        let mut max_distance: f64 = 0.0;
        for (i, a) in passive_marginals.iter().enumerate() {
            for b in passive_marginals.iter().skip(i + 1) {
                max_distance = max_distance.max(a.trace_distance(b)?);
            }
        }
        Some(max_distance)
    };

    let payload_rounds = plan.iter().filter(|r| r.kind == RoundKind::Payload).count() as u32;
    let payload_recovered = plan
        .iter()
        .zip(records.iter())
        .filter(|(p, r)| p.kind == RoundKind::Payload && r.symbol_retrieved == Some(p.symbol))
        .count() as u32;
    let eve_differences: Vec<u32> = records.iter().filter_map(|r| r.eve_difference).collect();

    let mut transcript = SessionTranscript {
        scheme: scheme.clone(),
        rng_seed: config.rng_seed,
        records,
        final_carrier_fidelity,
        summary: SessionSummary {
            rounds: config.rounds,
            payload_rounds,
            payload_recovered,
            stray_rounds: 0,
            mismatches: 0,
            mismatch_rate: 0.0,
            eve_differences,
            passive_leakage,
            final_carrier_fidelity,
        },
    };
    let detection = detection_check(&transcript);
    transcript.summary.stray_rounds = detection.stray_rounds;
    transcript.summary.mismatches = detection.mismatches;
    transcript.summary.mismatch_rate = detection.mismatch_rate;
    Ok(transcript)
}
