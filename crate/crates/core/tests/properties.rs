//! Property tests for the qudit engine: norm preservation, permutation-gate
//! sparsity, Fourier unitarity, density-matrix validity, and agreement
//! between the sparse and dense backends.

use num_complex::Complex64;
use proptest::prelude::*;
use qcarrier_core::{QuditState, RegisterLayout, WireRole};

fn layout(d: u32, wires: usize) -> RegisterLayout {
    RegisterLayout::new(d, (1..=wires as u32).map(WireRole::Message).collect()).unwrap()
}

#[derive(Clone, Debug)]
enum GateOp {
    Cnot {
        control: usize,
        target: usize,
        power: u32,
    },
    InverseCnot {
        control: usize,
        target: usize,
        power: u32,
    },
    Pauli {
        wire: usize,
        x: u32,
        z: u32,
    },
    Fourier {
        wire: usize,
        conjugated: bool,
    },
}

impl GateOp {
    fn apply(&self, state: &QuditState) -> QuditState {
        match *self {
            GateOp::Cnot {
                control,
                target,
                power,
            } => state.apply_cnot(control, target, power).unwrap(),
            GateOp::InverseCnot {
                control,
                target,
                power,
            } => state.apply_inverse_cnot(control, target, power).unwrap(),
            GateOp::Pauli { wire, x, z } => state.apply_pauli(wire, x, z).unwrap(),
            GateOp::Fourier { wire, conjugated } => state.apply_fourier(wire, conjugated).unwrap(),
        }
    }

    fn is_permutation(&self) -> bool {
        !matches!(self, GateOp::Fourier { .. })
    }
}

fn arb_gate(d: u32, wires: usize) -> impl Strategy<Value = GateOp> {
    let pair = (0..wires, 0..wires).prop_filter("distinct wires", |(c, t)| c != t);
    prop_oneof![
        (pair.clone(), 0..d).prop_map(|((control, target), power)| GateOp::Cnot {
            control,
            target,
            power
        }),
        (pair, 0..d).prop_map(|((control, target), power)| GateOp::InverseCnot {
            control,
            target,
            power
        }),
        (0..wires, 0..d, 0..d).prop_map(|(wire, x, z)| GateOp::Pauli { wire, x, z }),
        (0..wires, any::<bool>())
            .prop_map(|(wire, conjugated)| GateOp::Fourier { wire, conjugated }),
    ]
}

fn arb_terms(d: u32, wires: usize) -> impl Strategy<Value = Vec<(Vec<u32>, Complex64)>> {
    prop::collection::vec(
        (
            prop::collection::vec(0..d, wires),
            -1.0..1.0f64,
            -1.0..1.0f64,
        ),
        1..8,
    )
    .prop_filter_map("needs weight", |raw| {
        let terms: Vec<(Vec<u32>, Complex64)> = raw
            .into_iter()
            .map(|(digits, re, im)| (digits, Complex64::new(re, im)))
            .collect();
        let weight: f64 = terms.iter().map(|(_, a)| a.norm_sqr()).sum();
        (weight > 1e-6).then_some(terms)
    })
}

type GateCase = (u32, usize, Vec<(Vec<u32>, Complex64)>, Vec<GateOp>);

fn arb_case() -> impl Strategy<Value = GateCase> {
    (prop::sample::select(vec![2u32, 3, 5]), 2usize..=6).prop_flat_map(|(d, wires)| {
        (
            Just(d),
            Just(wires),
            arb_terms(d, wires),
            prop::collection::vec(arb_gate(d, wires), 1..10),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn gates_preserve_the_norm((d, wires, terms, ops) in arb_case()) {
        let mut state = QuditState::from_amplitudes(layout(d, wires), terms).unwrap();
        for op in &ops {
            state = op.apply(&state);
            prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12,
                "norm drifted to {}", state.norm_sqr());
        }
    }

    #[test]
    fn permutation_gates_preserve_sparsity((d, wires, terms, ops) in arb_case()) {
        let mut state = QuditState::from_amplitudes(layout(d, wires), terms).unwrap();
        for op in ops.iter().filter(|op| op.is_permutation()) {
            let before = state.nonzero_count();
            state = op.apply(&state);
            prop_assert_eq!(state.nonzero_count(), before);
        }
    }

    #[test]
    fn fourier_conjugate_round_trip((d, wires, terms, _) in arb_case(), wire_pick in any::<prop::sample::Index>()) {
        let state = QuditState::from_amplitudes(layout(d, wires), terms).unwrap();
        let wire = wire_pick.index(wires);
        let round = state
            .apply_fourier(wire, false).unwrap()
            .apply_fourier(wire, true).unwrap();
        prop_assert!(round.fidelity(&state).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn sparse_and_dense_backends_agree((d, wires, terms, ops) in arb_case()) {
        // total dimension stays at or below 3^8 territory (5^6 < 3^9)
        let mut sparse = QuditState::from_amplitudes(layout(d, wires), terms).unwrap();
        let mut dense = sparse.to_dense().unwrap();
        for op in &ops {
            sparse = op.apply(&sparse);
            dense = op.apply(&dense);
        }
        prop_assert!(sparse.fidelity(&dense).unwrap() > 1.0 - 1e-12);
        let js = serde_json::to_string(&sparse.dump()).unwrap();
        let jd = serde_json::to_string(&dense.dump()).unwrap();
        prop_assert_eq!(js, jd);
    }

    #[test]
    fn partial_trace_yields_a_valid_density_matrix((d, wires, terms, ops) in arb_case(), keep_pick in any::<prop::sample::Index>()) {
        let mut state = QuditState::from_amplitudes(layout(d, wires), terms).unwrap();
        for op in &ops {
            state = op.apply(&state);
        }
        let keep = keep_pick.index(wires.min(3)) + 1; // 1..=3 kept wires
        let keep_wires: Vec<usize> = (0..keep).collect();
        let rho = state.partial_trace(&keep_wires).unwrap();
        prop_assert!(rho.validate().is_ok());
    }

    #[test]
    fn inverse_cnot_undoes_cnot(terms in arb_terms(3, 4),
                                control in 0usize..4, target in 0usize..4, power in 0u32..3) {
        prop_assume!(control != target);
        let state = QuditState::from_amplitudes(layout(3, 4), terms).unwrap();
        let round = state
            .apply_cnot(control, target, power).unwrap()
            .apply_inverse_cnot(control, target, power).unwrap();
        prop_assert!(round.fidelity(&state).unwrap() > 1.0 - 1e-12);
    }
}

#[test]
fn seeded_bell_measurements_hit_the_born_frequencies() {
    let bell = QuditState::from_amplitudes(
        layout(2, 2),
        [
            (vec![0, 0], Complex64::new(1.0, 0.0)),
            (vec![1, 1], Complex64::new(1.0, 0.0)),
        ],
    )
    .unwrap();
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2024);
    let mut zeros = 0u32;
    for _ in 0..10_000 {
        let outcome = bell.measure_computational(&[0], &mut rng).unwrap();
        if outcome.digits[0] == 0 {
            zeros += 1;
        }
    }
    let frequency = zeros as f64 / 10_000.0;
    assert!((frequency - 0.5).abs() < 0.02, "P(0) = {frequency}");
}

#[test]
fn measurement_collapse_is_consistent() {
    let bell = QuditState::from_amplitudes(
        layout(2, 2),
        [
            (vec![0, 0], Complex64::new(1.0, 0.0)),
            (vec![1, 1], Complex64::new(1.0, 0.0)),
        ],
    )
    .unwrap();
    let outcome = bell.measure_computational_seeded(&[0], 3).unwrap();
    // the other wire collapsed with it
    let full = outcome
        .post_state
        .measure_computational_seeded(&[0, 1], 4)
        .unwrap();
    assert_eq!(full.digits[0], full.digits[1]);
    assert!((full.probability - 1.0).abs() < 1e-12);
}
