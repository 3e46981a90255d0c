//! Arithmetic over Z_p and the polynomial/CSS threshold code: power sums,
//! the degree basis vectors and their orthogonality relations, codeword
//! construction, logical phase operators, and classical symbol retrieval by
//! Lagrange interpolation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{omega_pow, QuditState, RegisterLayout, WireRole};

pub fn is_odd_prime(n: u32) -> bool {
    if n < 3 || n.is_multiple_of(2) {
        return false;
    }
    let mut f = 3u32;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut base = base % modulus;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Inverse by Fermat: a^(p-2) mod p. Fine at desk-scale moduli.
pub fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a % p, p - 2, p)
}

/// S_k(p) = Σ_{j=1}^{p-1} j^k mod p by direct summation.
/// Equals p−1 (≡ −1) exactly when (p−1) | k, and 0 otherwise.
pub fn power_sum(k: u32, p: u32) -> Result<u32> {
    if !is_odd_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let modulus = p as u64;
    let mut acc = 0u64;
    for j in 1..p as u64 {
        acc = (acc + mod_pow(j, k as u64, modulus)) % modulus;
    }
    Ok(acc as u32)
}

/// S_{m−1}(p) through the binomial recursion
/// S_{m−1}(p) = −(1/m) Σ_{r=1}^{m−2} C(m,r) S_r(p), base S_1(p) = 0.
/// Valid for 1 ≤ m−1 ≤ p−2; at m = p the 1/m factor vanishes mod p.
pub fn power_sum_by_recursion(m: u32, p: u32) -> Result<u32> {
    if !is_odd_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m < 2 || m >= p {
        return Err(Error::RecursionOutOfWindow { m, p });
    }
    let modulus = p as u64;
    // binomials mod p via the Pascal triangle, rows 0..=m
    let mut binom = vec![vec![0u64; m as usize + 1]; m as usize + 1];
    for row in 0..=m as usize {
        binom[row][0] = 1;
        for col in 1..=row {
            binom[row][col] = (binom[row - 1][col - 1]
                + if col < row { binom[row - 1][col] } else { 0 })
                % modulus;
        }
    }
    let mut sums = vec![0u64; m as usize]; // sums[r] = S_r(p), index 1..m-1
    for t in 2..m as usize {
        let mut acc = 0u64;
        for r in 1..=t - 1 {
            acc = (acc + binom[t + 1][r] * sums[r]) % modulus;
        }
        let inv = mod_inv((t + 1) as u64, modulus);
        sums[t] = (modulus - acc % modulus) % modulus * inv % modulus;
    }
    Ok(sums[(m - 1) as usize] as u32)
}

/// Basis vector e_l with components j^l mod n (0⁰ = 1).
/// l is bounded by the largest admissible threshold, l ≤ (n−1)/2.
pub fn basis_vector(l: u32, n: u32) -> Result<Vec<u32>> {
    if !is_odd_prime(n) {
        return Err(Error::NotPrime(n));
    }
    if l > (n - 1) / 2 {
        return Err(Error::BasisIndexOutOfRange { index: l, n });
    }
    Ok((0..n)
        .map(|j| {
            if l == 0 {
                1
            } else {
                mod_pow(j as u64, l as u64, n as u64) as u32
            }
        })
        .collect())
}

/// Description of the (k, n) threshold code over Z_n.
///
/// The codeword space is spanned by the cosets of C = span{e_0..e_{k−2}}
/// inside C⊥ = span{e_0..e_{k−1}}; the special vector e = e_{k−1} carries
/// the secret symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    k: u32,
    n: u32,
    basis: Vec<Vec<u32>>,
}

impl CodeSpec {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        if !is_odd_prime(n) {
            return Err(Error::NotPrime(n));
        }
        if k < 2 || k > n.div_ceil(2) {
            return Err(Error::ThresholdOutOfRange { k, n });
        }
        let basis = (0..k)
            .map(|l| basis_vector(l, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { k, n, basis })
    }

    /// The canonical n = 2k−1 instance.
    pub fn standard(k: u32) -> Result<Self> {
        Self::new(k, 2 * k - 1)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Qudit dimension; equals the player count.
    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// The special vector e = e_{k−1}.
    pub fn special_vector(&self) -> &[u32] {
        &self.basis[(self.k - 1) as usize]
    }

    fn inner_product(&self, a: &[u32], b: &[u32]) -> u32 {
        let n = self.n as u64;
        a.iter()
            .zip(b.iter())
            .fold(0u64, |acc, (&x, &y)| (acc + x as u64 * y as u64) % n) as u32
    }
}

/// One inner-product check from the orthogonality relations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationEntry {
    pub i: u32,
    pub j: u32,
    pub value: u32,
    pub expected: u32,
    pub pass: bool,
}

/// Full table of e_i·e_j mod n against the required pattern:
/// zero everywhere except e·e = −1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationReport {
    pub k: u32,
    pub n: u32,
    pub entries: Vec<RelationEntry>,
    pub all_pass: bool,
}

pub fn verify_code_relations(spec: &CodeSpec) -> RelationReport {
    let k = spec.k();
    let n = spec.n();
    let mut entries = Vec::new();
    let mut all_pass = true;
    for i in 0..k {
        for j in 0..k {
            let value = spec.inner_product(&spec.basis()[i as usize], &spec.basis()[j as usize]);
            let expected = if i == k - 1 && j == k - 1 { n - 1 } else { 0 };
            let pass = value == expected;
            all_pass &= pass;
            entries.push(RelationEntry {
                i,
                j,
                value,
                expected,
                pass,
            });
        }
    }
    RelationReport {
        k,
        n,
        entries,
        all_pass,
    }
}

/// An encoded symbol: |s̄⟩ over n qudits of dimension n.
#[derive(Clone, Debug)]
pub struct Codeword {
    pub symbol: u32,
    pub state: QuditState,
}

fn message_labels(n: u32) -> Vec<WireRole> {
    (1..=n).map(WireRole::Message).collect()
}

/// |s̄⟩ = n^{−(k−1)/2} Σ_{c∈C} |c + s·e⟩ over the given wire labels.
pub fn codeword_state(spec: &CodeSpec, s: u32, labels: Vec<WireRole>) -> Result<QuditState> {
    let n = spec.n();
    let k = spec.k();
    if s >= n {
        return Err(Error::SymbolOutOfRange {
            symbol: s,
            dimension: n,
        });
    }
    let layout = RegisterLayout::new(n, labels)?;
    let branch_count = (n as u64).pow(k - 1);
    let amp = Complex64::new((branch_count as f64).sqrt().recip(), 0.0);
    let mut terms = Vec::with_capacity(branch_count as usize);
    let mut coeffs = vec![0u32; (k - 1) as usize];
    loop {
        // digits_j = (Σ_l c_l (e_l)_j + s (e)_j) mod n, i.e. P_{c,s}(j)
        let digits: Vec<u32> = (0..n as usize)
            .map(|j| {
                let mut acc = s as u64 * spec.special_vector()[j] as u64 % n as u64;
                for (l, &c) in coeffs.iter().enumerate() {
                    acc = (acc + c as u64 * spec.basis()[l][j] as u64) % n as u64;
                }
                acc as u32
            })
            .collect();
        terms.push((digits, amp));
        // next c in mixed radix
        let mut carry = true;
        for c in coeffs.iter_mut() {
            if carry {
                *c += 1;
                if *c == n {
                    *c = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    QuditState::from_amplitudes(layout, terms)
}

/// Codeword over message wires, the form Alice hands to the carrier.
pub fn encode_codeword(spec: &CodeSpec, s: u32) -> Result<Codeword> {
    Ok(Codeword {
        symbol: s,
        state: codeword_state(spec, s, message_labels(spec.n()))?,
    })
}

/// The (2,3) encoding circuit: spread |0⟩ into (1/√3)Σ|c,c,c⟩ with a Fourier
/// gate and two CNOTs, then shift with (I ⊗ X ⊗ X²)^s.
pub fn encode_via_circuit_23(s: u32) -> Result<Codeword> {
    if s >= 3 {
        return Err(Error::SymbolOutOfRange {
            symbol: s,
            dimension: 3,
        });
    }
    let layout = RegisterLayout::new(3, message_labels(3))?;
    let state = QuditState::basis_state(layout, &[0, 0, 0])?
        .apply_fourier(0, false)?
        .apply_cnot(0, 1, 1)?
        .apply_cnot(0, 2, 1)?
        .apply_pauli(1, s, 0)?
        .apply_pauli(2, (2 * s) % 3, 0)?;
    Ok(Codeword { symbol: s, state })
}

/// Per-wire Z powers of the logical phase operator Z̄ = ⊗_j Z^{(e)_j}.
pub fn logical_z_powers(spec: &CodeSpec) -> Vec<u32> {
    spec.special_vector().to_vec()
}

/// Common eigenphase of `transformed` relative to `original`; errors when the
/// branch phases disagree beyond 1e-10 (input was not an eigenstate).
pub fn eigenphase(original: &QuditState, transformed: &QuditState) -> Result<Complex64> {
    let mut phase: Option<Complex64> = None;
    let mut max_dev: f64 = 0.0;
    for (digits, amp) in original.terms() {
        if amp.norm() < 1e-12 {
            continue;
        }
        let ratio = transformed.amplitude(&digits) / amp;
        match phase {
            None => phase = Some(ratio),
            Some(p) => max_dev = max_dev.max((ratio - p).norm()),
        }
    }
    if max_dev > 1e-10 {
        return Err(Error::NotAnEigenstate(max_dev));
    }
    phase.ok_or(Error::ZeroNormProjection)
}

/// Applies Z̄ to a codeword and returns the global phase, ω^{−s}.
pub fn check_logical_z(spec: &CodeSpec, codeword: &QuditState) -> Result<Complex64> {
    let mut state = codeword.clone();
    for (wire, &power) in logical_z_powers(spec).iter().enumerate() {
        state = state.apply_pauli(wire, 0, power)?;
    }
    eigenphase(codeword, &state)
}

/// Maps a unit phase to the exponent t with phase ≈ ω^t.
pub fn phase_to_exponent(phase: Complex64, d: u32) -> Result<u32> {
    for t in 0..d {
        if (phase - omega_pow(d, t as i64)).norm() < 1e-8 {
            return Ok(t);
        }
    }
    Err(Error::NotAnEigenstate(1.0))
}

/// Pairwise phase retrieval for the (2,3) code: Z_i^{−1} Z_j with j following
/// i cyclically has eigenvalue ω^s on |s̄⟩.
pub fn retrieve_pairwise_23(codeword: &QuditState, first: usize, second: usize) -> Result<u32> {
    if codeword.dimension() != 3 || codeword.wire_count() != 3 {
        return Err(Error::InvalidScheme(
            "pairwise phase retrieval is defined for (2,3)".into(),
        ));
    }
    if second != (first + 1) % 3 {
        return Err(Error::InvalidWireSubset);
    }
    let transformed = codeword
        .apply_pauli(first, 0, 2)?
        .apply_pauli(second, 0, 1)?;
    phase_to_exponent(eigenphase(codeword, &transformed)?, 3)
}

/// Recovers the leading coefficient s from ≥ k evaluations (position, value)
/// of one degree-(k−1) polynomial over Z_n. Extra evaluations must be
/// consistent with the interpolated polynomial, otherwise the share set is
/// reported as corrupted.
pub fn retrieve_classical(spec: &CodeSpec, evaluations: &[(u32, u32)]) -> Result<u32> {
    let k = spec.k() as usize;
    let n = spec.n() as u64;
    if evaluations.len() < k {
        return Err(Error::InsufficientShares {
            needed: k,
            got: evaluations.len(),
        });
    }
    let mut evals = evaluations.to_vec();
    evals.sort_by_key(|&(x, _)| x);
    for (i, &(x, y)) in evals.iter().enumerate() {
        if x as u64 >= n || y as u64 >= n {
            return Err(Error::DigitOutOfRange {
                digit: x.max(y),
                dimension: spec.n(),
            });
        }
        if i > 0 && evals[i - 1].0 == x {
            return Err(Error::DuplicatePosition(x));
        }
    }

    // Lagrange coefficients of the unique degree-(k−1) polynomial through the
    // first k nodes.
    let nodes = &evals[..k];
    let mut coeffs = vec![0u64; k];
    for (i, &(xi, yi)) in nodes.iter().enumerate() {
        let mut numer = vec![0u64; k];
        numer[0] = 1;
        let mut degree = 0usize;
        let mut denom = 1u64;
        for (j, &(xj, _)) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            // multiply numer by (x − x_j)
            let neg_xj = (n - xj as u64 % n) % n;
            for t in (0..=degree).rev() {
                let v = numer[t];
                numer[t + 1] = (numer[t + 1] + v) % n;
                numer[t] = v * neg_xj % n;
            }
            degree += 1;
            denom = denom * ((xi as u64 + n - xj as u64) % n) % n;
        }
        let factor = yi as u64 % n * mod_inv(denom, n) % n;
        for (c, v) in coeffs.iter_mut().zip(numer.iter()) {
            *c = (*c + factor * v) % n;
        }
    }

    // Every provided evaluation must sit on the interpolated polynomial.
    for &(x, y) in &evals {
        let mut acc = 0u64;
        for (deg, &c) in coeffs.iter().enumerate() {
            acc = (acc + c * mod_pow(x as u64, deg as u64, n)) % n;
        }
        if acc != y as u64 {
            return Err(Error::InconsistentShares);
        }
    }
    Ok(coeffs[k - 1] as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sum(1, 5).unwrap(), 0);
        assert_eq!(power_sum(4, 5).unwrap(), 4); // ≡ −1 mod 5
        assert_eq!(power_sum(2, 3).unwrap(), (1 + 4) % 3); // hand oracle: 2
        assert!(matches!(power_sum(2, 4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn power_sum_kronecker_pattern() {
        for p in [3u32, 5, 7, 11, 13] {
            for k in 1..p {
                let expected = if k == p - 1 { p - 1 } else { 0 };
                assert_eq!(power_sum(k, p).unwrap(), expected, "S_{k}({p})");
            }
            // (p−1) | k beyond the first period as well
            assert_eq!(power_sum(2 * (p - 1), p).unwrap(), p - 1);
        }
    }

    #[test]
    fn recursion_matches_direct_summation() {
        assert_eq!(
            power_sum_by_recursion(3, 5).unwrap(),
            power_sum(2, 5).unwrap()
        );
        assert_eq!(
            power_sum_by_recursion(4, 7).unwrap(),
            power_sum(3, 7).unwrap()
        );
        for p in [5u32, 7, 11, 13] {
            for m in 2..p {
                assert_eq!(
                    power_sum_by_recursion(m, p).unwrap(),
                    power_sum(m - 1, p).unwrap(),
                    "S_{}({p}) via recursion",
                    m - 1
                );
            }
        }
        assert!(matches!(
            power_sum_by_recursion(5, 5),
            Err(Error::RecursionOutOfWindow { .. })
        ));
        assert!(matches!(
            power_sum_by_recursion(1, 5),
            Err(Error::RecursionOutOfWindow { .. })
        ));
    }

    #[test]
    fn basis_vector_examples() {
        assert_eq!(basis_vector(0, 3).unwrap(), vec![1, 1, 1]);
        assert_eq!(basis_vector(1, 3).unwrap(), vec![0, 1, 2]);
        assert_eq!(basis_vector(2, 5).unwrap(), vec![0, 1, 4, 4, 1]); // j² mod 5
        assert!(matches!(
            basis_vector(2, 3),
            Err(Error::BasisIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn code_spec_bounds() {
        assert!(CodeSpec::new(2, 3).is_ok());
        assert!(matches!(CodeSpec::new(2, 4), Err(Error::NotPrime(4))));
        assert!(matches!(
            CodeSpec::new(3, 3),
            Err(Error::ThresholdOutOfRange { .. })
        ));
        assert!(matches!(
            CodeSpec::new(1, 3),
            Err(Error::ThresholdOutOfRange { .. })
        ));
        assert_eq!(CodeSpec::standard(3).unwrap().n(), 5);
    }

    #[test]
    fn relations_for_small_codes() {
        // (2,3): e·e = 0 + 1 + 4 = 5 ≡ 2 ≡ −1 mod 3
        let spec = CodeSpec::new(2, 3).unwrap();
        let report = verify_code_relations(&spec);
        assert!(report.all_pass);
        let ee = report
            .entries
            .iter()
            .find(|e| e.i == 1 && e.j == 1)
            .unwrap();
        assert_eq!(ee.value, 2);

        // (3,5): e_1·e_1 = 0+1+4+9+16 = 30 ≡ 0
        let spec = CodeSpec::new(3, 5).unwrap();
        let report = verify_code_relations(&spec);
        assert!(report.all_pass);
        let e11 = report
            .entries
            .iter()
            .find(|e| e.i == 1 && e.j == 1)
            .unwrap();
        assert_eq!(e11.value, 0);

        for n in [3u32, 5, 7, 11] {
            let spec = CodeSpec::new(n.div_ceil(2), n).unwrap();
            assert!(verify_code_relations(&spec).all_pass, "relations for n={n}");
        }
    }

    #[test]
    fn codewords_of_2_3_match_the_printed_superpositions() {
        let spec = CodeSpec::new(2, 3).unwrap();
        let expected: [&[[u32; 3]]; 3] = [
            &[[0, 0, 0], [1, 1, 1], [2, 2, 2]],
            &[[0, 1, 2], [1, 2, 0], [2, 0, 1]],
            &[[0, 2, 1], [1, 0, 2], [2, 1, 0]],
        ];
        let amp = (1.0f64 / 3.0).sqrt();
        for s in 0..3u32 {
            let cw = encode_codeword(&spec, s).unwrap();
            assert_eq!(cw.state.nonzero_count(), 3);
            for digits in expected[s as usize] {
                let a = cw.state.amplitude(digits);
                assert_abs_diff_eq!(a.re, amp, epsilon = 1e-12);
                assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn circuit_matches_direct_construction() {
        let spec = CodeSpec::new(2, 3).unwrap();
        for s in 0..3u32 {
            let direct = encode_codeword(&spec, s).unwrap();
            let circuit = encode_via_circuit_23(s).unwrap();
            assert_abs_diff_eq!(
                circuit.state.fidelity(&direct.state).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn measuring_the_zero_codeword_yields_each_branch_with_a_third() {
        let spec = CodeSpec::new(2, 3).unwrap();
        let state = encode_codeword(&spec, 0).unwrap().state;
        let branches = [[0u32, 0, 0], [1, 1, 1], [2, 2, 2]];
        for seed in 0..12u64 {
            let m = state
                .measure_computational_seeded(&[0, 1, 2], seed)
                .unwrap();
            assert!(branches.iter().any(|b| b.as_slice() == m.digits));
            assert_abs_diff_eq!(m.probability, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn codeword_branch_amplitudes_are_uniform() {
        for (k, n) in [(2u32, 3u32), (3, 5), (4, 7)] {
            let spec = CodeSpec::new(k, n).unwrap();
            let branches = (n as usize).pow(k - 1);
            let expected = (branches as f64).sqrt().recip();
            let cw = encode_codeword(&spec, 1).unwrap();
            assert_eq!(cw.state.nonzero_count(), branches);
            for (_, amp) in cw.state.terms() {
                assert_abs_diff_eq!(amp.norm(), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn codewords_are_orthonormal() {
        for (k, n) in [(2u32, 3u32), (3, 5), (4, 7)] {
            let spec = CodeSpec::new(k, n).unwrap();
            let words: Vec<_> = (0..n)
                .map(|s| encode_codeword(&spec, s).unwrap().state)
                .collect();
            for (i, a) in words.iter().enumerate() {
                for (j, b) in words.iter().enumerate() {
                    let ip = a.inner(b).unwrap().norm();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(ip, expected, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn logical_z_phases() {
        let spec = CodeSpec::new(2, 3).unwrap();
        assert_eq!(logical_z_powers(&spec), vec![0, 1, 2]); // I ⊗ Z ⊗ Z²
        for s in 0..3u32 {
            let cw = encode_codeword(&spec, s).unwrap();
            let phase = check_logical_z(&spec, &cw.state).unwrap();
            let expected = omega_pow(3, -(s as i64));
            assert_abs_diff_eq!((phase - expected).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn pairwise_phase_retrieval() {
        for s in 0..3u32 {
            let cw = encode_via_circuit_23(s).unwrap();
            for (a, b) in [(0usize, 1usize), (1, 2), (2, 0)] {
                assert_eq!(retrieve_pairwise_23(&cw.state, a, b).unwrap(), s);
            }
        }
        let cw = encode_via_circuit_23(1).unwrap();
        assert!(retrieve_pairwise_23(&cw.state, 0, 2).is_err());
    }

    #[test]
    fn non_eigenstate_is_reported() {
        let spec = CodeSpec::new(2, 3).unwrap();
        let layout = RegisterLayout::new(3, (1..=3).map(WireRole::Message).collect()).unwrap();
        // |000⟩ + |012⟩ mixes eigenspaces of Z̄
        let state = QuditState::from_amplitudes(
            layout,
            [
                (vec![0, 0, 0], Complex64::new(1.0, 0.0)),
                (vec![0, 1, 2], Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert!(matches!(
            check_logical_z(&spec, &state),
            Err(Error::NotAnEigenstate(_))
        ));
    }

    /// Brute-force oracle: every polynomial over Z_n of degree ≤ k−1,
    /// restricted to leading coefficient position k−1.
    fn consistent_leading_coeffs(spec: &CodeSpec, points: &[(u32, u32)]) -> Vec<u32> {
        let n = spec.n() as u64;
        let k = spec.k();
        let mut found = Vec::new();
        let total = n.pow(k);
        for enc in 0..total {
            let mut coeffs = Vec::with_capacity(k as usize);
            let mut rest = enc;
            for _ in 0..k {
                coeffs.push(rest % n);
                rest /= n;
            }
            let fits = points.iter().all(|&(x, y)| {
                let mut acc = 0u64;
                for (deg, &c) in coeffs.iter().enumerate() {
                    acc = (acc + c * mod_pow(x as u64, deg as u64, n)) % n;
                }
                acc == y as u64
            });
            if fits {
                found.push(coeffs[(k - 1) as usize] as u32);
            }
        }
        found.sort_unstable();
        found.dedup();
        found
    }

    #[test]
    fn interpolation_matches_brute_force() {
        let spec = CodeSpec::new(2, 3).unwrap();
        for points in [vec![(0u32, 0u32), (1, 1)], vec![(1, 1), (2, 2)]] {
            let oracle = consistent_leading_coeffs(&spec, &points);
            assert_eq!(oracle, vec![1]);
            assert_eq!(retrieve_classical(&spec, &points).unwrap(), 1);
        }
    }

    #[test]
    fn interpolation_recovers_measured_codeword_shares() {
        let spec = CodeSpec::new(3, 5).unwrap();
        let cw = encode_codeword(&spec, 2).unwrap();
        let m = cw
            .state
            .measure_computational_seeded(&[0, 1, 2, 3, 4], 11)
            .unwrap();
        // any 3 of the 5 positions give back the symbol
        for positions in [[0usize, 1, 2], [1, 3, 4], [0, 2, 4]] {
            let evals: Vec<(u32, u32)> =
                positions.iter().map(|&p| (p as u32, m.digits[p])).collect();
            let oracle = consistent_leading_coeffs(&spec, &evals);
            assert_eq!(oracle, vec![2]);
            assert_eq!(retrieve_classical(&spec, &evals).unwrap(), 2);
        }
    }

    #[test]
    fn interpolation_error_paths() {
        let spec = CodeSpec::new(2, 3).unwrap();
        assert!(matches!(
            retrieve_classical(&spec, &[(0, 1)]),
            Err(Error::InsufficientShares { .. })
        ));
        assert!(matches!(
            retrieve_classical(&spec, &[(0, 1), (0, 2)]),
            Err(Error::DuplicatePosition(0))
        ));
        // (0,0),(1,1) fixes P(x) = x, so P(2) = 2; a corrupted third share trips
        assert!(matches!(
            retrieve_classical(&spec, &[(0, 0), (1, 1), (2, 1)]),
            Err(Error::InconsistentShares)
        ));
    }
}
