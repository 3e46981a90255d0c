//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured figure next to its pinned tolerance.

use std::process::Command;
use std::time::Instant;

use qcarrier_core::{
    build_carrier, contamination_detection, contamination_monte_carlo, download, encode_codeword,
    encode_message, entangle_difference_attack, hadamard_round, insider_b3_attack,
    passive_intercept, power_sum, power_sum_by_recursion, resolve_ancillas,
    retrieval_cleaning_orderings, uploaded_joint, AttackModel, CodeSpec, PartyId, RoundParity,
    SchemeSpec,
};

fn all_schemes() -> Vec<SchemeSpec> {
    vec![
        SchemeSpec::kd(),
        SchemeSpec::two_two(),
        SchemeSpec::two_two().with_parity(RoundParity::Even),
        SchemeSpec::nn(3).unwrap(),
        SchemeSpec::nn(3).unwrap().with_parity(RoundParity::Even),
        SchemeSpec::kn(2, 3).unwrap(),
        SchemeSpec::kn(3, 5).unwrap(),
    ]
}

fn subsets(n: usize, size: usize) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut stack: Vec<(Vec<u32>, usize)> = vec![(Vec::new(), 0)];
    while let Some((current, next)) = stack.pop() {
        if current.len() == size {
            out.push(current);
            continue;
        }
        for i in next..n {
            let mut extended = current.clone();
            extended.push(i as u32 + 1);
            stack.push((extended, i + 1));
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_01_codewords_match_the_printed_superpositions() {
    let start = Instant::now();
    let spec = CodeSpec::new(2, 3).unwrap();
    let expected: [&[[u32; 3]]; 3] = [
        &[[0, 0, 0], [1, 1, 1], [2, 2, 2]],
        &[[0, 1, 2], [1, 2, 0], [2, 0, 1]],
        &[[0, 2, 1], [1, 0, 2], [2, 1, 0]],
    ];
    let amp = (1.0f64 / 3.0).sqrt();
    let mut worst: f64 = 0.0;
    for s in 0..3u32 {
        let state = encode_codeword(&spec, s).unwrap().state;
        assert_eq!(state.nonzero_count(), 3, "three branches per codeword");
        for digits in expected[s as usize] {
            let a = state.amplitude(digits);
            worst = worst.max((a.re - amp).abs()).max(a.im.abs());
        }
    }
    assert!(worst < 1e-12, "amplitude deviation {worst}");
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "runtime {elapsed:?} exceeds 1 s"
    );
    println!("criterion 01: PASS — (2,3) codeword deviation {worst:.2e} < 1e-12, {elapsed:?}");
}

#[test]
fn criterion_02_carrier_invariance_under_the_hadamard_round() {
    let start = Instant::now();
    let mut worst_fixed: f64 = 0.0;
    for scheme in [
        SchemeSpec::kd(),
        SchemeSpec::kn(2, 3).unwrap(),
        SchemeSpec::kn(3, 5).unwrap(),
    ] {
        let carrier = build_carrier(&scheme).unwrap();
        let rolled = hadamard_round(&carrier).unwrap();
        let fidelity = rolled.state().fidelity(carrier.state()).unwrap();
        worst_fixed = worst_fixed.max(1.0 - fidelity);
        assert!(fidelity >= 1.0 - 1e-10, "{scheme:?} fidelity {fidelity}");
    }
    let odd = build_carrier(&SchemeSpec::two_two()).unwrap();
    let even = build_carrier(&SchemeSpec::two_two().with_parity(RoundParity::Even)).unwrap();
    let swapped = hadamard_round(&odd).unwrap();
    let swap_fidelity = swapped.state().fidelity(even.state()).unwrap();
    assert!(
        swap_fidelity >= 1.0 - 1e-12,
        "parity swap fidelity {swap_fidelity}"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "runtime {elapsed:?} exceeds 5 s"
    );
    println!(
        "criterion 02: PASS — worst invariance deficit {worst_fixed:.2e} < 1e-10, \
         (2,2) swap deficit {:.2e}, {elapsed:?}",
        1.0 - swap_fidelity
    );
}

#[test]
fn criterion_03_upload_download_round_trip() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for scheme in all_schemes() {
        let carrier = build_carrier(&scheme).unwrap();
        for s in 0..scheme.dimension() {
            let (after, message) = download(&uploaded_joint(&scheme, s).unwrap(), &scheme).unwrap();
            let message_fidelity = message
                .fidelity(&encode_message(&scheme, s).unwrap())
                .unwrap();
            let carrier_fidelity = after.state().fidelity(carrier.state()).unwrap();
            worst = worst
                .max(1.0 - message_fidelity)
                .max(1.0 - carrier_fidelity);
            assert!(message_fidelity >= 1.0 - 1e-12, "{scheme:?} s={s}");
            assert!(carrier_fidelity >= 1.0 - 1e-12, "{scheme:?} s={s}");
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "runtime {elapsed:?} exceeds 30 s"
    );
    println!("criterion 03: PASS — worst round-trip deficit {worst:.2e} < 1e-12, {elapsed:?}");
}

#[test]
fn criterion_04_zero_in_transit_leakage() {
    let mut worst: f64 = 0.0;
    for scheme in all_schemes() {
        let symbols: Vec<u32> = (0..scheme.dimension()).collect();
        let report = passive_intercept(&scheme, &symbols).unwrap();
        for distance in &report.distances {
            worst = worst.max(*distance);
            assert!(*distance < 1e-10, "{scheme:?} leaked {distance}");
        }
    }
    println!("criterion 04: PASS — max in-transit trace distance {worst:.2e} < 1e-10");
}

#[test]
fn criterion_05_threshold_property() {
    // every k-subset retrieves s; every (k−1)-subset marginal is blind
    let mut checks = 0u32;
    let mut worst_marginal: f64 = 0.0;
    for (k, n) in [(2u32, 3u32), (3, 5)] {
        let scheme = SchemeSpec::kn(k, n).unwrap();
        let spec = CodeSpec::new(k, n).unwrap();
        for s in 0..n {
            let (_, message) = download(&uploaded_joint(&scheme, s).unwrap(), &scheme).unwrap();
            for subset in subsets(n as usize, k as usize) {
                let parties: Vec<PartyId> = subset.iter().map(|&p| PartyId::Player(p)).collect();
                let seed = u64::from(s * 100) + subset[0] as u64;
                let retrieved =
                    qcarrier_core::authorized_retrieve(&scheme, &message, &parties, seed).unwrap();
                assert_eq!(retrieved, s, "(k,n)=({k},{n}) subset {subset:?}");
                checks += 1;
            }
        }
        // blind marginals: all (k−1)-position reductions agree across symbols
        for positions in subsets(n as usize, (k - 1) as usize) {
            let wires: Vec<usize> = positions.iter().map(|&p| (p - 1) as usize).collect();
            let mut first = None;
            for s in 0..n {
                let rho = encode_codeword(&spec, s)
                    .unwrap()
                    .state
                    .partial_trace(&wires)
                    .unwrap();
                match &first {
                    None => first = Some(rho),
                    Some(reference) => {
                        let distance = reference.trace_distance(&rho).unwrap();
                        worst_marginal = worst_marginal.max(distance);
                        assert!(distance < 1e-10, "positions {positions:?} s={s}");
                    }
                }
            }
        }
    }
    println!(
        "criterion 05: PASS — {checks} subset retrievals exact, \
         max blind-marginal distance {worst_marginal:.2e} < 1e-10"
    );
}

#[test]
fn criterion_06_difference_attack_and_detection_statistics() {
    // exact difference recovery for all Z₃ sequences of length ≤ 4
    let scheme = SchemeSpec::kn(2, 3).unwrap();
    let mut sequences = 0u32;
    for len in 2usize..=4 {
        for code in 0..3u32.pow(len as u32) {
            let mut symbols = Vec::with_capacity(len);
            let mut rest = code;
            for _ in 0..len {
                symbols.push(rest % 3);
                rest /= 3;
            }
            let report = entangle_difference_attack(&scheme, &symbols, false, 1234).unwrap();
            let expected: Vec<u32> = symbols[1..]
                .iter()
                .map(|&s| (3 + symbols[0] - s) % 3)
                .collect();
            assert_eq!(report.differences, expected, "sequence {symbols:?}");
            sequences += 1;
        }
    }

    // Monte Carlo detection frequency vs the exact amplitude probability
    let kd = SchemeSpec::kd();
    let model = AttackModel::ContaminateCarrier {
        ancillas: None,
        preset: Some("orthogonal".into()),
    };
    let ancillas = resolve_ancillas(&model, 2).unwrap();
    let exact = contamination_detection(&kd, &ancillas, None)
        .unwrap()
        .detection_probability;
    assert!(
        (exact - 0.5).abs() < 1e-12,
        "exact KD orthogonal probability is 1/2"
    );
    let (report, transcript) = contamination_monte_carlo(&kd, &model, 10_000, 0.25, 7).unwrap();
    let frequency = report.detection_probability;
    assert!(
        (frequency - exact).abs() <= 0.02,
        "frequency {frequency} vs exact {exact} over {} checks",
        transcript.summary.stray_rounds
    );
    println!(
        "criterion 06: PASS — {sequences} difference sequences exact; \
         mismatch frequency {frequency:.4} within ±0.02 of exact {exact}"
    );
}

#[test]
fn criterion_07_insider_marginal_is_symbol_independent() {
    let report = insider_b3_attack().unwrap();
    let worst = report.distances.iter().copied().fold(0.0f64, f64::max);
    assert_eq!(report.distances.len(), 3);
    assert!(worst < 1e-10, "insider marginal distance {worst}");
    println!("criterion 07: PASS — max pairwise marginal distance {worst:.2e} < 1e-10");
}

#[test]
fn criterion_08_power_sum_lemma() {
    let start = Instant::now();
    let mut checked = 0u32;
    for p in [3u32, 5, 7, 11, 13] {
        for k in 1..p {
            let direct = power_sum(k, p).unwrap();
            let expected = if k == p - 1 { p - 1 } else { 0 };
            assert_eq!(direct, expected, "S_{k}({p})");
            checked += 1;
        }
        // recursion agrees on its whole validity window 1 ≤ m−1 ≤ p−2
        for m in 2..p {
            assert_eq!(
                power_sum_by_recursion(m, p).unwrap(),
                power_sum(m - 1, p).unwrap(),
                "recursion S_{}({p})",
                m - 1
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "runtime {elapsed:?} exceeds 1 s"
    );
    println!(
        "criterion 08: PASS — {checked} power sums match −δ(k, p−1), both methods, {elapsed:?}"
    );
}

#[test]
fn criterion_09_retrieval_and_cleaning_commute() {
    let scheme = SchemeSpec::kn(2, 3).unwrap();
    let mut cases = 0u32;
    for s in 0..3u32 {
        for subset in subsets(3, 2) {
            let (retrieve_first, clean_first) =
                retrieval_cleaning_orderings(&scheme, s, &subset, 4242).unwrap();
            assert_eq!(retrieve_first.symbol, s);
            assert_eq!(clean_first.symbol, s);
            let fidelity = retrieve_first
                .final_state
                .fidelity(&clean_first.final_state)
                .unwrap();
            assert!(fidelity >= 1.0 - 1e-12, "s={s} subset {subset:?}");
            cases += 1;
        }
    }
    println!("criterion 09: PASS — {cases} orderings agree on symbol and final carrier");
}

#[test]
fn criterion_10_cli_transcripts_reproduce_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.toml");
    std::fs::write(
        &config,
        r#"
rounds = 40
rng_seed = 99
stray_fraction = 0.25
payload = [2, 0, 1, 1]
hadamard_every_round = true

[scheme]
variant = "kn"
k = 2
n = 3

[adversary]
kind = "entangle_difference"
"#,
    )
    .unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qcarrier"))
            .args(["run-session", "--config", config.to_str().unwrap()])
            .output()
            .expect("binary runs")
    };
    let a = run();
    let b = run();
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout, "transcripts must be byte-identical");
    assert_eq!(a.status.code(), b.status.code());
    println!(
        "criterion 10: PASS — two runs produced identical {}-byte transcripts",
        a.stdout.len()
    );
}
