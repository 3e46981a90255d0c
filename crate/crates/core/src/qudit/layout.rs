//! Register layouts: which wires exist and who owns them.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Role tag for a single wire of a register.
///
/// Indices are 1-based, matching the usual party numbering
/// (player_1 ... player_n, message_1 ... message_n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WireRole {
    Alice,
    Player(u32),
    Message(u32),
    Eve(u32),
}

impl fmt::Display for WireRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WireRole::Alice => write!(f, "alice"),
            WireRole::Player(i) => write!(f, "player_{i}"),
            WireRole::Message(i) => write!(f, "message_{i}"),
            WireRole::Eve(i) => write!(f, "eve_{i}"),
        }
    }
}

impl FromStr for WireRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "alice" {
            return Ok(WireRole::Alice);
        }
        let parse = |prefix: &str| -> Option<u32> {
            s.strip_prefix(prefix).and_then(|rest| rest.parse().ok())
        };
        if let Some(i) = parse("player_") {
            Ok(WireRole::Player(i))
        } else if let Some(i) = parse("message_") {
            Ok(WireRole::Message(i))
        } else if let Some(i) = parse("eve_") {
            Ok(WireRole::Eve(i))
        } else {
            Err(Error::DuplicateLabel(format!("unknown wire label `{s}`")))
        }
    }
}

impl Serialize for WireRole {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for WireRole {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse()
            .map_err(|_| D::Error::custom(format!("unknown wire label `{s}`")))
    }
}

/// Ordered list of wire labels sharing a single qudit dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    dimension: u32,
    labels: Vec<WireRole>,
}

impl RegisterLayout {
    pub fn new(dimension: u32, labels: Vec<WireRole>) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::DimensionTooSmall);
        }
        if labels.is_empty() {
            return Err(Error::EmptyRegister);
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
        }
        Ok(Self { dimension, labels })
    }

    /// A single-wire register, handy for building message qudits.
    pub fn single(dimension: u32, label: WireRole) -> Result<Self> {
        Self::new(dimension, vec![label])
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn wire_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[WireRole] {
        &self.labels
    }

    /// Position of a role in the register, if present.
    pub fn position(&self, role: WireRole) -> Option<usize> {
        self.labels.iter().position(|l| *l == role)
    }

    /// Positions of every wire matching the predicate, in wire order.
    pub fn positions_where(&self, mut pred: impl FnMut(WireRole) -> bool) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| pred(**l))
            .map(|(i, _)| i)
            .collect()
    }

    /// Concatenation for tensor products; labels must stay unique.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Self::new(self.dimension, labels)
    }

    /// Sub-register made of the given wires, keeping their order.
    pub fn subset(&self, wires: &[usize]) -> Result<Self> {
        self.check_wires(wires)?;
        let labels = wires.iter().map(|&w| self.labels[w]).collect();
        Self::new(self.dimension, labels)
    }

    /// Validates a nonempty, in-range, duplicate-free wire list.
    pub fn check_wires(&self, wires: &[usize]) -> Result<()> {
        if wires.is_empty() {
            return Err(Error::InvalidWireSubset);
        }
        for (i, &w) in wires.iter().enumerate() {
            if w >= self.labels.len() {
                return Err(Error::WireOutOfRange {
                    wire: w,
                    count: self.labels.len(),
                });
            }
            if wires[..i].contains(&w) {
                return Err(Error::InvalidWireSubset);
            }
        }
        Ok(())
    }

    pub fn check_wire(&self, wire: usize) -> Result<()> {
        if wire >= self.labels.len() {
            return Err(Error::WireOutOfRange {
                wire,
                count: self.labels.len(),
            });
        }
        Ok(())
    }

    /// d^wire_count, or None on overflow.
    pub fn total_dimension(&self) -> Option<u128> {
        let mut total: u128 = 1;
        for _ in 0..self.labels.len() {
            total = total.checked_mul(self.dimension as u128)?;
            if total > u64::MAX as u128 {
                return None;
            }
        }
        Some(total)
    }

    /// Same wires, new labels. Used to move an encoded block between owners.
    pub fn relabeled(&self, labels: Vec<WireRole>) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::DigitCountMismatch {
                expected: self.labels.len(),
                got: labels.len(),
            });
        }
        Self::new(self.dimension, labels)
    }
}
