//! Carrier construction and the upload/download/Hadamard-round transforms for
//! each scheme: key distribution, (2,2) and (n,n) sharing, and the (k,n)
//! threshold code carrier.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::codes::{codeword_state, CodeSpec};
use crate::error::{Error, Result};
use crate::qudit::{QuditState, RegisterLayout, WireRole};

/// Odd/even round tag; drives the alternating encodings of the (2,2) and
/// (n,n) schemes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundParity {
    #[default]
    Odd,
    Even,
}

impl RoundParity {
    pub fn flip(self) -> Self {
        match self {
            RoundParity::Odd => RoundParity::Even,
            RoundParity::Even => RoundParity::Odd,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeVariant {
    /// Two-party key distribution over a shared Bell pair.
    Kd,
    /// (2,2) secret sharing: one dealer, two players.
    TwoTwo,
    /// (n,n) sharing: all players reconstruct together.
    Nn { n: u32 },
    /// (k,n) threshold sharing over the polynomial code, d = n prime.
    Kn { k: u32, n: u32 },
}

/// Which protocol variant is running, plus the current round parity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchemeSpecRepr", into = "SchemeSpecRepr")]
pub struct SchemeSpec {
    variant: SchemeVariant,
    round_parity: RoundParity,
}

#[derive(Serialize, Deserialize)]
struct SchemeSpecRepr {
    variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    #[serde(default)]
    parity: RoundParity,
}

impl TryFrom<SchemeSpecRepr> for SchemeSpec {
    type Error = Error;

    fn try_from(repr: SchemeSpecRepr) -> Result<Self> {
        let spec = match repr.variant.as_str() {
            "kd" => SchemeSpec::kd(),
            "two_two" => SchemeSpec::two_two(),
            "nn" => {
                let n = repr
                    .n
                    .ok_or_else(|| Error::InvalidScheme("nn needs n".into()))?;
                SchemeSpec::nn(n)?
            }
            "kn" => {
                let k = repr
                    .k
                    .ok_or_else(|| Error::InvalidScheme("kn needs k".into()))?;
                let n = repr
                    .n
                    .ok_or_else(|| Error::InvalidScheme("kn needs n".into()))?;
                SchemeSpec::kn(k, n)?
            }
            other => return Err(Error::InvalidScheme(format!("unknown variant `{other}`"))),
        };
        Ok(spec.with_parity(repr.parity))
    }
}

impl From<SchemeSpec> for SchemeSpecRepr {
    fn from(spec: SchemeSpec) -> Self {
        let (variant, k, n) = match spec.variant {
            SchemeVariant::Kd => ("kd", None, None),
            SchemeVariant::TwoTwo => ("two_two", None, None),
            SchemeVariant::Nn { n } => ("nn", None, Some(n)),
            SchemeVariant::Kn { k, n } => ("kn", Some(k), Some(n)),
        };
        SchemeSpecRepr {
            variant: variant.into(),
            k,
            n,
            parity: spec.round_parity,
        }
    }
}

impl SchemeSpec {
    pub fn kd() -> Self {
        Self {
            variant: SchemeVariant::Kd,
            round_parity: RoundParity::Odd,
        }
    }

    pub fn two_two() -> Self {
        Self {
            variant: SchemeVariant::TwoTwo,
            round_parity: RoundParity::Odd,
        }
    }

    pub fn nn(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidScheme(
                "nn scheme needs at least 2 players".into(),
            ));
        }
        Ok(Self {
            variant: SchemeVariant::Nn { n },
            round_parity: RoundParity::Odd,
        })
    }

    pub fn kn(k: u32, n: u32) -> Result<Self> {
        CodeSpec::new(k, n)?;
        Ok(Self {
            variant: SchemeVariant::Kn { k, n },
            round_parity: RoundParity::Odd,
        })
    }

    pub fn variant(&self) -> SchemeVariant {
        self.variant
    }

    pub fn round_parity(&self) -> RoundParity {
        self.round_parity
    }

    pub fn with_parity(&self, parity: RoundParity) -> Self {
        Self {
            variant: self.variant,
            round_parity: parity,
        }
    }

    /// Qudit dimension: 2 except for the (k,n) code where d = n.
    pub fn dimension(&self) -> u32 {
        match self.variant {
            SchemeVariant::Kn { n, .. } => n,
            _ => 2,
        }
    }

    /// Player count, which also equals the message width.
    pub fn width(&self) -> u32 {
        match self.variant {
            SchemeVariant::Kd => 1,
            SchemeVariant::TwoTwo => 2,
            SchemeVariant::Nn { n } => n,
            SchemeVariant::Kn { n, .. } => n,
        }
    }

    /// Whether odd/even rounds use different encodings.
    pub fn parity_matters(&self) -> bool {
        matches!(
            self.variant,
            SchemeVariant::TwoTwo | SchemeVariant::Nn { .. }
        )
    }

    /// Retrieval threshold: k for (k,n); otherwise every player.
    pub fn threshold(&self) -> u32 {
        match self.variant {
            SchemeVariant::Kn { k, .. } => k,
            _ => self.width(),
        }
    }

    pub fn code_spec(&self) -> Option<CodeSpec> {
        match self.variant {
            SchemeVariant::Kn { k, n } => CodeSpec::new(k, n).ok(),
            _ => None,
        }
    }

    pub fn carrier_layout(&self) -> RegisterLayout {
        let mut labels = vec![WireRole::Alice];
        labels.extend((1..=self.width()).map(WireRole::Player));
        RegisterLayout::new(self.dimension(), labels).expect("carrier layout is valid")
    }

    pub fn message_layout(&self) -> RegisterLayout {
        RegisterLayout::new(
            self.dimension(),
            (1..=self.width()).map(WireRole::Message).collect(),
        )
        .expect("message layout is valid")
    }

    /// Per-message-wire CNOT powers of Alice's uploading operator.
    pub fn upload_powers(&self) -> Vec<u32> {
        let w = self.width() as usize;
        match self.variant {
            SchemeVariant::Kd => vec![1],
            SchemeVariant::TwoTwo | SchemeVariant::Nn { .. } => match self.round_parity {
                RoundParity::Odd => vec![1; w],
                RoundParity::Even => {
                    let mut powers = vec![0; w];
                    powers[0] = 1;
                    powers
                }
            },
            SchemeVariant::Kn { .. } => self
                .code_spec()
                .expect("kn scheme carries a code")
                .special_vector()
                .to_vec(),
        }
    }
}

/// Encoding |s̄⟩ of a symbol over the given wire labels, per scheme and parity.
pub fn encoded_state(
    scheme: &SchemeSpec,
    symbol: u32,
    labels: Vec<WireRole>,
) -> Result<QuditState> {
    let d = scheme.dimension();
    if symbol >= d {
        return Err(Error::SymbolOutOfRange {
            symbol,
            dimension: d,
        });
    }
    let w = scheme.width() as usize;
    match scheme.variant {
        SchemeVariant::Kd => QuditState::basis_state(RegisterLayout::new(2, labels)?, &[symbol]),
        SchemeVariant::TwoTwo | SchemeVariant::Nn { .. } => {
            let layout = RegisterLayout::new(2, labels)?;
            match scheme.round_parity {
                RoundParity::Odd => QuditState::basis_state(layout, &vec![symbol; w]),
                RoundParity::Even => {
                    // (1/√2)(|+⟩^w + (−1)^s |−⟩^w): uniform over bitstrings of
                    // parity s, every amplitude positive.
                    let terms = (0..1u32 << w).filter_map(|bits| {
                        let digits: Vec<u32> = (0..w).map(|i| (bits >> (w - 1 - i)) & 1).collect();
                        let parity: u32 = digits.iter().sum::<u32>() % 2;
                        (parity == symbol).then_some((digits, Complex64::new(1.0, 0.0)))
                    });
                    QuditState::from_amplitudes(layout, terms)
                }
            }
        }
        SchemeVariant::Kn { k, n } => codeword_state(&CodeSpec::new(k, n)?, symbol, labels),
    }
}

/// Message encoding on the message wires, ready to tensor with the carrier.
pub fn encode_message(scheme: &SchemeSpec, symbol: u32) -> Result<QuditState> {
    encoded_state(
        scheme,
        symbol,
        (1..=scheme.width()).map(WireRole::Message).collect(),
    )
}

/// The shared entangled carrier (1/√d) Σ_q |q⟩_alice |q̄⟩_players.
#[derive(Clone, Debug)]
pub struct CarrierState {
    scheme: SchemeSpec,
    state: QuditState,
}

impl CarrierState {
    pub fn scheme(&self) -> &SchemeSpec {
        &self.scheme
    }

    pub fn state(&self) -> &QuditState {
        &self.state
    }

    pub fn into_state(self) -> QuditState {
        self.state
    }
}

pub fn build_carrier(scheme: &SchemeSpec) -> Result<CarrierState> {
    let d = scheme.dimension();
    let labels: Vec<WireRole> = (1..=scheme.width()).map(WireRole::Player).collect();
    let mut terms: Vec<(Vec<u32>, Complex64)> = Vec::new();
    for q in 0..d {
        let block = encoded_state(scheme, q, labels.clone())?;
        for (digits, amp) in block.terms() {
            let mut key = Vec::with_capacity(digits.len() + 1);
            key.push(q);
            key.extend(digits);
            terms.push((key, amp));
        }
    }
    let state = QuditState::from_amplitudes(scheme.carrier_layout(), terms)?;
    Ok(CarrierState {
        scheme: scheme.clone(),
        state,
    })
}

fn wire_position(state: &QuditState, role: WireRole) -> Result<usize> {
    state
        .layout()
        .position(role)
        .ok_or_else(|| Error::InvalidScheme(format!("register has no `{role}` wire")))
}

/// Alice's uploading operator: the scheme's CNOT powers from her carrier wire
/// onto the message wires. Maps |q⟩_a |s̄⟩ to |q⟩_a |(q+s)‾⟩ branchwise.
pub fn upload(joint: &QuditState, scheme: &SchemeSpec) -> Result<QuditState> {
    let alice = wire_position(joint, WireRole::Alice)?;
    let mut state = joint.clone();
    for (idx, &power) in scheme.upload_powers().iter().enumerate() {
        if power % scheme.dimension() == 0 {
            continue;
        }
        let target = wire_position(&state, WireRole::Message(idx as u32 + 1))?;
        state = state.apply_cnot(alice, target, power)?;
    }
    Ok(state)
}

/// The players' downloading operator C_B⁻¹: each player's inverse CNOT onto
/// their own message wire. Exposed separately so a session can keep adversary
/// wires attached while the players act.
pub fn download_operator(joint: &QuditState, scheme: &SchemeSpec) -> Result<QuditState> {
    let mut state = joint.clone();
    for j in 1..=scheme.width() {
        let control = wire_position(&state, WireRole::Player(j))?;
        let target = wire_position(&state, WireRole::Message(j))?;
        state = state.apply_inverse_cnot(control, target, 1)?;
    }
    Ok(state)
}

/// Full download: players apply C_B⁻¹, after which the message must factor
/// from the carrier (purity deficit below 1e-10 across the cut).
pub fn download(joint: &QuditState, scheme: &SchemeSpec) -> Result<(CarrierState, QuditState)> {
    let expected = scheme.carrier_layout().concat(&scheme.message_layout())?;
    if joint.layout() != &expected {
        return Err(Error::InvalidScheme(
            "download expects exactly the carrier and message wires".into(),
        ));
    }
    let state = download_operator(joint, scheme)?;
    let message_wires: Vec<usize> = (1..=scheme.width())
        .map(|j| wire_position(&state, WireRole::Message(j)))
        .collect::<Result<_>>()?;
    let (carrier, message) = state.split(&message_wires)?;
    Ok((
        CarrierState {
            scheme: scheme.clone(),
            state: carrier,
        },
        message,
    ))
}

/// Applies the joint Fourier round to the carrier wires (Alice plus every
/// player) of an arbitrary register, leaving other wires alone.
pub fn apply_hadamard_round_wires(state: &QuditState, scheme: &SchemeSpec) -> Result<QuditState> {
    let mut out = state.apply_fourier(wire_position(state, WireRole::Alice)?, false)?;
    for j in 1..=scheme.width() {
        out = out.apply_fourier(wire_position(state, WireRole::Player(j))?, false)?;
    }
    out.prune();
    Ok(out)
}

/// End-of-round Hadamard by all legitimate parties. Leaves KD and (k,n)
/// carriers fixed and swaps odd ↔ even for (2,2)/(n,n).
pub fn hadamard_round(carrier: &CarrierState) -> Result<CarrierState> {
    if carrier.state.layout() != &carrier.scheme.carrier_layout() {
        return Err(Error::InvalidScheme(
            "hadamard round expects a clean carrier".into(),
        ));
    }
    let state = apply_hadamard_round_wires(&carrier.state, &carrier.scheme)?;
    let scheme = if carrier.scheme.parity_matters() {
        carrier
            .scheme
            .with_parity(carrier.scheme.round_parity().flip())
    } else {
        carrier.scheme.clone()
    };
    Ok(CarrierState { scheme, state })
}

/// Carrier ⊗ encoded message with the message uploaded — the in-transit form.
pub fn uploaded_joint(scheme: &SchemeSpec, symbol: u32) -> Result<QuditState> {
    let carrier = build_carrier(scheme)?;
    let message = encode_message(scheme, symbol)?;
    upload(&carrier.state.tensor(&message)?, scheme)
}
