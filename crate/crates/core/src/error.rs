//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: u32, got: u32 },
    #[error("wire {wire} out of range for register of {count} wires")]
    WireOutOfRange { wire: usize, count: usize },
    #[error("digit {digit} out of range for dimension {dimension}")]
    DigitOutOfRange { digit: u32, dimension: u32 },
    #[error("expected {expected} digits, got {got}")]
    DigitCountMismatch { expected: usize, got: usize },
    #[error("control and target wires must differ")]
    ControlEqualsTarget,
    #[error("duplicate wire label {0}")]
    DuplicateLabel(String),
    #[error("register must have at least one wire")]
    EmptyRegister,
    #[error("qudit dimension must be at least 2")]
    DimensionTooSmall,
    #[error("wire subset is empty or repeats wires")]
    InvalidWireSubset,
    #[error("state layouts do not match")]
    LayoutMismatch,
    #[error("dense backend capped at total dimension 2^24 (requested {0})")]
    DenseCapExceeded(u128),
    #[error("reduced register too large for a dense density matrix ({0})")]
    DensityTooLarge(u128),
    #[error("zero-norm projection: amplitudes are internally corrupted")]
    ZeroNormProjection,
    #[error("{0} is not an odd prime")]
    NotPrime(u32),
    #[error("threshold k={k} out of range for n={n} players")]
    ThresholdOutOfRange { k: u32, n: u32 },
    #[error("basis vector index {index} exceeds the maximum degree for n={n}")]
    BasisIndexOutOfRange { index: u32, n: u32 },
    #[error("symbol {symbol} out of range for dimension {dimension}")]
    SymbolOutOfRange { symbol: u32, dimension: u32 },
    #[error("power-sum recursion index m={m} outside the validity window for p={p}")]
    RecursionOutOfWindow { m: u32, p: u32 },
    #[error("need at least {needed} shares, got {got}")]
    InsufficientShares { needed: usize, got: usize },
    #[error("shares are inconsistent: no degree-bounded polynomial fits all evaluations")]
    InconsistentShares,
    #[error("duplicate evaluation position {0}")]
    DuplicatePosition(u32),
    #[error("state is not an eigenstate: branch phase deviation {0} exceeds tolerance")]
    NotAnEigenstate(f64),
    #[error("residual entanglement across the cut: purity deficit {0}")]
    ResidualEntanglement(f64),
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("invalid session config: {0}")]
    InvalidConfig(String),
    #[error("attack not supported: {0}")]
    UnsupportedAttack(String),
    #[error("ancilla state list is not normalizable")]
    NonNormalizableAncilla,
}

pub type Result<T> = std::result::Result<T, Error>;
