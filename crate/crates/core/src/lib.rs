//! Qudit state-vector simulation of secure entangled carriers: key
//! distribution, (2,2)/(n,n) secret sharing, and (k,n) threshold sharing over
//! polynomial/CSS codes, together with the adversary models that probe them.
//!
//! The crate is organized around five pieces:
//!
//! * [`qudit`] — registers of d-level systems with sparse (default) and dense
//!   amplitude backends, permutation gates, the d-level Fourier transform,
//!   density matrices and seeded measurement.
//! * [`codes`] — everything over Z_p: power sums, the degree basis vectors,
//!   codeword construction, logical phase operators, Lagrange retrieval.
//! * [`carrier`] — carrier states per scheme and the upload / download /
//!   Hadamard-round transforms.
//! * [`protocol`] — the multi-party round engine with stray-symbol insertion,
//!   public comparison checks and reproducible transcripts.
//! * [`adversary`] — executable attack experiments and their reports.

pub mod adversary;
pub mod carrier;
pub mod codes;
pub mod error;
pub mod protocol;
pub mod qudit;

pub use adversary::{
    build_contaminated_carrier, contamination_detection, contamination_monte_carlo,
    entangle_difference_attack, exact_stray_mismatch_probability, insider_b3_attack,
    passive_intercept, resolve_ancillas, AttackModel, AttackReport,
};
pub use carrier::{
    apply_hadamard_round_wires, build_carrier, download, download_operator, encode_message,
    encoded_state, hadamard_round, upload, uploaded_joint, CarrierState, RoundParity, SchemeSpec,
    SchemeVariant,
};
pub use codes::{
    basis_vector, check_logical_z, codeword_state, encode_codeword, encode_via_circuit_23,
    is_odd_prime, logical_z_powers, power_sum, power_sum_by_recursion, retrieve_classical,
    retrieve_pairwise_23, verify_code_relations, CodeSpec, Codeword, RelationEntry, RelationReport,
};
pub use error::{Error, Result};
pub use protocol::{
    authorized_retrieve, detection_check, partial_download, retrieval_cleaning_orderings,
    run_session, DetectionStats, OrderingOutcome, PartyId, RoundRecord, SessionConfig,
    SessionSummary, SessionTranscript,
};
pub use qudit::{
    omega_pow, Backend, DensityMatrix, MeasurementOutcome, QuditState, RegisterLayout,
    SparseDensity, StateDump, WireRole,
};
