//! Sparse/dense state vectors over registers of d-level systems, with the
//! permutation gates (generalized CNOT powers, X/Z) and the d-level Fourier
//! transform used by the carrier protocols.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::layout::{RegisterLayout, WireRole};

/// Sparse entries with |amplitude| below this are dropped after non-permutation
/// operations, so permutation-gate sparsity counts stay exact.
pub const PRUNE_EPSILON: f64 = 1e-14;

/// Dense vectors are refused above this total dimension.
pub const DENSE_CAP: u128 = 1 << 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// ω^exponent for ω = exp(2πi/d), with exact values on the real/imaginary axes
/// so that permutation gates and qubit Hadamards stay free of rounding dust.
pub fn omega_pow(dimension: u32, exponent: i64) -> Complex64 {
    let d = dimension as i64;
    let t = exponent.rem_euclid(d) as u32;
    if (4 * t).is_multiple_of(dimension) {
        return match (4 * t / dimension) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / dimension as f64)
}

/// Which amplitude container a state uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Sparse,
    Dense,
}

#[derive(Clone, Debug)]
enum StateRepr {
    Sparse(BTreeMap<Vec<u32>, Complex64>),
    Dense(Vec<Complex64>),
}

/// Pure state of a qudit register. Operations return new states; values are
/// immutable once built, so states can move freely between threads.
#[derive(Clone, Debug)]
pub struct QuditState {
    layout: RegisterLayout,
    repr: StateRepr,
}

/// Result of a computational-basis measurement on a subset of wires.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub digits: Vec<u32>,
    pub probability: f64,
    pub post_state: QuditState,
}

/// Serializable state dump: amplitudes sorted lexicographically by digits,
/// identical across backends once pruned.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateDump {
    pub dimension: u32,
    pub labels: Vec<String>,
    pub amplitudes: Vec<AmplitudeEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub digits: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

fn digits_to_index(digits: &[u32], d: u32) -> usize {
    let mut idx = 0usize;
    for &digit in digits {
        idx = idx * d as usize + digit as usize;
    }
    idx
}

fn index_to_digits(mut idx: usize, d: u32, wires: usize) -> Vec<u32> {
    let mut digits = vec![0u32; wires];
    for w in (0..wires).rev() {
        digits[w] = (idx % d as usize) as u32;
        idx /= d as usize;
    }
    digits
}

impl QuditState {
    /// |digits⟩ on the sparse backend.
    pub fn basis_state(layout: RegisterLayout, digits: &[u32]) -> Result<Self> {
        Self::check_digits(&layout, digits)?;
        let mut map = BTreeMap::new();
        map.insert(digits.to_vec(), Complex64::new(1.0, 0.0));
        Ok(Self {
            layout,
            repr: StateRepr::Sparse(map),
        })
    }

    /// |digits⟩ on the dense backend.
    pub fn basis_state_dense(layout: RegisterLayout, digits: &[u32]) -> Result<Self> {
        Self::check_digits(&layout, digits)?;
        let total = Self::dense_len(&layout)?;
        let mut vec = vec![ZERO; total];
        vec[digits_to_index(digits, layout.dimension())] = Complex64::new(1.0, 0.0);
        Ok(Self {
            layout,
            repr: StateRepr::Dense(vec),
        })
    }

    /// Builds a normalized sparse state from raw (digits, amplitude) terms.
    /// Repeated digit tuples accumulate.
    pub fn from_amplitudes<I>(layout: RegisterLayout, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut map: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (digits, amp) in terms {
            Self::check_digits(&layout, &digits)?;
            *map.entry(digits).or_insert(ZERO) += amp;
        }
        let mut state = Self {
            layout,
            repr: StateRepr::Sparse(map),
        };
        state.normalize()?;
        Ok(state)
    }

    fn check_digits(layout: &RegisterLayout, digits: &[u32]) -> Result<()> {
        if digits.len() != layout.wire_count() {
            return Err(Error::DigitCountMismatch {
                expected: layout.wire_count(),
                got: digits.len(),
            });
        }
        for &digit in digits {
            if digit >= layout.dimension() {
                return Err(Error::DigitOutOfRange {
                    digit,
                    dimension: layout.dimension(),
                });
            }
        }
        Ok(())
    }

    fn dense_len(layout: &RegisterLayout) -> Result<usize> {
        let total = layout.total_dimension().unwrap_or(u128::MAX);
        if total > DENSE_CAP {
            return Err(Error::DenseCapExceeded(total));
        }
        Ok(total as usize)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn dimension(&self) -> u32 {
        self.layout.dimension()
    }

    pub fn wire_count(&self) -> usize {
        self.layout.wire_count()
    }

    pub fn backend(&self) -> Backend {
        match &self.repr {
            StateRepr::Sparse(_) => Backend::Sparse,
            StateRepr::Dense(_) => Backend::Dense,
        }
    }

    /// Stored terms (sparse) or terms above the prune threshold (dense).
    pub fn nonzero_count(&self) -> usize {
        match &self.repr {
            StateRepr::Sparse(map) => map.len(),
            StateRepr::Dense(vec) => vec.iter().filter(|a| a.norm() >= PRUNE_EPSILON).count(),
        }
    }

    pub fn amplitude(&self, digits: &[u32]) -> Complex64 {
        match &self.repr {
            StateRepr::Sparse(map) => map.get(digits).copied().unwrap_or(ZERO),
            StateRepr::Dense(vec) => vec[digits_to_index(digits, self.dimension())],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match &self.repr {
            StateRepr::Sparse(map) => map.values().map(|a| a.norm_sqr()).sum(),
            StateRepr::Dense(vec) => vec.iter().map(|a| a.norm_sqr()).sum(),
        }
    }

    /// Rescales to unit norm and prunes sparse dust.
    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm < PRUNE_EPSILON {
            return Err(Error::ZeroNormProjection);
        }
        let inv = norm.recip();
        match &mut self.repr {
            StateRepr::Sparse(map) => {
                for amp in map.values_mut() {
                    *amp *= inv;
                }
            }
            StateRepr::Dense(vec) => {
                for amp in vec.iter_mut() {
                    *amp *= inv;
                }
            }
        }
        self.prune();
        Ok(())
    }

    /// Drops entries with |amplitude| < PRUNE_EPSILON: sparse entries are
    /// removed, dense entries zeroed, so both backends carry the same numbers.
    pub fn prune(&mut self) {
        match &mut self.repr {
            StateRepr::Sparse(map) => {
                map.retain(|_, amp| amp.norm() >= PRUNE_EPSILON);
            }
            StateRepr::Dense(vec) => {
                for amp in vec.iter_mut() {
                    if *amp != ZERO && amp.norm() < PRUNE_EPSILON {
                        *amp = ZERO;
                    }
                }
            }
        }
    }

    pub fn to_sparse(&self) -> Self {
        match &self.repr {
            StateRepr::Sparse(_) => self.clone(),
            StateRepr::Dense(vec) => {
                let d = self.dimension();
                let w = self.wire_count();
                let mut map = BTreeMap::new();
                for (idx, amp) in vec.iter().enumerate() {
                    if amp.norm() >= PRUNE_EPSILON {
                        map.insert(index_to_digits(idx, d, w), *amp);
                    }
                }
                Self {
                    layout: self.layout.clone(),
                    repr: StateRepr::Sparse(map),
                }
            }
        }
    }

    pub fn to_dense(&self) -> Result<Self> {
        match &self.repr {
            StateRepr::Dense(_) => Ok(self.clone()),
            StateRepr::Sparse(map) => {
                let total = Self::dense_len(&self.layout)?;
                let d = self.dimension();
                let mut vec = vec![ZERO; total];
                for (digits, amp) in map {
                    vec[digits_to_index(digits, d)] = *amp;
                }
                Ok(Self {
                    layout: self.layout.clone(),
                    repr: StateRepr::Dense(vec),
                })
            }
        }
    }

    /// Same amplitudes under new wire labels.
    pub fn with_labels(&self, labels: Vec<WireRole>) -> Result<Self> {
        let layout = self.layout.relabeled(labels)?;
        Ok(Self {
            layout,
            repr: self.repr.clone(),
        })
    }

    /// Tensor product; both factors must share the qudit dimension and the
    /// combined labels must stay unique. Dense ⊗ dense stays dense.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        match (&self.repr, &other.repr) {
            (StateRepr::Dense(a), StateRepr::Dense(b)) => {
                Self::dense_len(&layout)?;
                let mut vec = vec![ZERO; a.len() * b.len()];
                for (i, &ai) in a.iter().enumerate() {
                    if ai == ZERO {
                        continue;
                    }
                    for (j, &bj) in b.iter().enumerate() {
                        vec[i * b.len() + j] = ai * bj;
                    }
                }
                Ok(Self {
                    layout,
                    repr: StateRepr::Dense(vec),
                })
            }
            _ => {
                let a = self.to_sparse();
                let b = other.to_sparse();
                let (StateRepr::Sparse(am), StateRepr::Sparse(bm)) = (&a.repr, &b.repr) else {
                    unreachable!()
                };
                let mut map = BTreeMap::new();
                for (ka, va) in am {
                    for (kb, vb) in bm {
                        let mut key = ka.clone();
                        key.extend_from_slice(kb);
                        map.insert(key, va * vb);
                    }
                }
                Ok(Self {
                    layout,
                    repr: StateRepr::Sparse(map),
                })
            }
        }
    }

    fn check_cnot_wires(&self, control: usize, target: usize) -> Result<()> {
        self.layout.check_wire(control)?;
        self.layout.check_wire(target)?;
        if control == target {
            return Err(Error::ControlEqualsTarget);
        }
        Ok(())
    }

    /// Generalized CNOT power: |i, j⟩ → |i, j + v·i mod d⟩.
    pub fn apply_cnot(&self, control: usize, target: usize, power: u32) -> Result<Self> {
        self.check_cnot_wires(control, target)?;
        let d = self.dimension() as u64;
        let v = (power as u64) % d;
        Ok(self.permute_digits(|digits| {
            let shifted = (digits[target] as u64 + v * digits[control] as u64) % d;
            (target, shifted as u32)
        }))
    }

    /// Inverse of `apply_cnot`: |i, j⟩ → |i, j − v·i mod d⟩.
    pub fn apply_inverse_cnot(&self, control: usize, target: usize, power: u32) -> Result<Self> {
        self.check_cnot_wires(control, target)?;
        let d = self.dimension() as u64;
        let v = (power as u64) % d;
        Ok(self.permute_digits(|digits| {
            let sub = (v * digits[control] as u64) % d;
            let shifted = (digits[target] as u64 + d - sub) % d;
            (target, shifted as u32)
        }))
    }

    /// One-wire basis permutation. The closure sees the full digit tuple and
    /// returns the wire to rewrite plus its new digit.
    fn permute_digits(&self, f: impl Fn(&[u32]) -> (usize, u32)) -> Self {
        match &self.repr {
            StateRepr::Sparse(map) => {
                let mut out = BTreeMap::new();
                for (key, amp) in map {
                    let (wire, digit) = f(key);
                    let mut nk = key.clone();
                    nk[wire] = digit;
                    out.insert(nk, *amp);
                }
                Self {
                    layout: self.layout.clone(),
                    repr: StateRepr::Sparse(out),
                }
            }
            StateRepr::Dense(vec) => {
                let d = self.dimension();
                let w = self.wire_count();
                let mut out = vec![ZERO; vec.len()];
                for (idx, amp) in vec.iter().enumerate() {
                    if *amp == ZERO {
                        continue;
                    }
                    let mut digits = index_to_digits(idx, d, w);
                    let (wire, digit) = f(&digits);
                    digits[wire] = digit;
                    out[digits_to_index(&digits, d)] = *amp;
                }
                Self {
                    layout: self.layout.clone(),
                    repr: StateRepr::Dense(out),
                }
            }
        }
    }

    /// X^x then Z^z on one wire: |i⟩ → ω^{z(i+x)} |i+x mod d⟩.
    pub fn apply_pauli(&self, wire: usize, x_power: u32, z_power: u32) -> Result<Self> {
        self.layout.check_wire(wire)?;
        let d = self.dimension();
        let x = (x_power as u64 % d as u64) as u32;
        let z = z_power as i64;
        let mut out = self.permute_digits(|digits| (wire, (digits[wire] + x) % d));
        match &mut out.repr {
            StateRepr::Sparse(map) => {
                for (key, amp) in map.iter_mut() {
                    *amp *= omega_pow(d, z * key[wire] as i64);
                }
            }
            StateRepr::Dense(vec) => {
                let w = self.wire_count();
                for (idx, amp) in vec.iter_mut().enumerate() {
                    if *amp == ZERO {
                        continue;
                    }
                    let digits = index_to_digits(idx, d, w);
                    *amp *= omega_pow(d, z * digits[wire] as i64);
                }
            }
        }
        Ok(out)
    }

    /// d-level Fourier transform on one wire: F|j⟩ = (1/√d) Σ_k ω^{jk}|k⟩.
    /// With `conjugated` the exponent sign flips, giving F⁻¹ up to ordering.
    pub fn apply_fourier(&self, wire: usize, conjugated: bool) -> Result<Self> {
        self.layout.check_wire(wire)?;
        let d = self.dimension();
        let scale = (d as f64).sqrt().recip();
        let sign: i64 = if conjugated { -1 } else { 1 };
        match &self.repr {
            StateRepr::Sparse(map) => {
                let mut out: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
                for (key, amp) in map {
                    let j = key[wire] as i64;
                    for k in 0..d {
                        let coeff = omega_pow(d, sign * j * k as i64) * scale;
                        let mut nk = key.clone();
                        nk[wire] = k;
                        *out.entry(nk).or_insert(ZERO) += amp * coeff;
                    }
                }
                let mut state = Self {
                    layout: self.layout.clone(),
                    repr: StateRepr::Sparse(out),
                };
                state.prune();
                Ok(state)
            }
            StateRepr::Dense(vec) => {
                let w = self.wire_count();
                let stride: usize = (d as usize).pow((w - 1 - wire) as u32);
                let block = stride * d as usize;
                let mut out = vec![ZERO; vec.len()];
                for base in (0..vec.len()).step_by(block) {
                    for off in 0..stride {
                        for j in 0..d {
                            let amp = vec[base + off + j as usize * stride];
                            if amp == ZERO {
                                continue;
                            }
                            for k in 0..d {
                                let coeff = omega_pow(d, sign * j as i64 * k as i64) * scale;
                                out[base + off + k as usize * stride] += amp * coeff;
                            }
                        }
                    }
                }
                let mut state = Self {
                    layout: self.layout.clone(),
                    repr: StateRepr::Dense(out),
                };
                state.prune();
                Ok(state)
            }
        }
    }

    /// Applies an arbitrary d×d matrix on one wire. Kept crate-private: the
    /// public surface only exposes the named protocol gates.
    pub(crate) fn apply_single_wire_matrix(
        &self,
        wire: usize,
        matrix: &[Vec<Complex64>],
    ) -> Result<Self> {
        self.layout.check_wire(wire)?;
        let d = self.dimension() as usize;
        if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: matrix.len() as u32,
            });
        }
        let sparse = self.to_sparse();
        let StateRepr::Sparse(map) = &sparse.repr else {
            unreachable!()
        };
        let mut out: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (key, amp) in map {
            let j = key[wire] as usize;
            for (k, row) in matrix.iter().enumerate() {
                let coeff = row[j];
                if coeff == ZERO {
                    continue;
                }
                let mut nk = key.clone();
                nk[wire] = k as u32;
                *out.entry(nk).or_insert(ZERO) += amp * coeff;
            }
        }
        let mut state = Self {
            layout: self.layout.clone(),
            repr: StateRepr::Sparse(out),
        };
        state.prune();
        Ok(state)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        let mut acc = ZERO;
        match (&self.repr, &other.repr) {
            (StateRepr::Sparse(a), StateRepr::Sparse(b)) => {
                let (small, big, flip) = if a.len() <= b.len() {
                    (a, b, false)
                } else {
                    (b, a, true)
                };
                for (key, amp) in small {
                    if let Some(bamp) = big.get(key) {
                        acc += if flip {
                            bamp.conj() * amp
                        } else {
                            amp.conj() * bamp
                        };
                    }
                }
            }
            (StateRepr::Dense(a), StateRepr::Dense(b)) => {
                for (x, y) in a.iter().zip(b.iter()) {
                    acc += x.conj() * y;
                }
            }
            (StateRepr::Sparse(a), StateRepr::Dense(b)) => {
                let d = self.dimension();
                for (key, amp) in a {
                    acc += amp.conj() * b[digits_to_index(key, d)];
                }
            }
            (StateRepr::Dense(a), StateRepr::Sparse(b)) => {
                let d = self.dimension();
                for (key, amp) in b {
                    acc += a[digits_to_index(key, d)].conj() * amp;
                }
            }
        }
        Ok(acc)
    }

    /// |⟨self|other⟩| for pure states.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Tr(ρ_left²) for the reduced state on `left_wires`, computed from the
    /// Gram matrix of sparse rows so large registers never materialize.
    pub fn purity_across(&self, left_wires: &[usize]) -> Result<f64> {
        self.layout.check_wires(left_wires)?;
        let rows = self.group_rows(left_wires);
        let mut purity = 0.0;
        let rows: Vec<&BTreeMap<Vec<u32>, Complex64>> = rows.values().collect();
        for a in &rows {
            for b in &rows {
                let mut ip = ZERO;
                let (small, big, flip) = if a.len() <= b.len() {
                    (*a, *b, false)
                } else {
                    (*b, *a, true)
                };
                for (key, amp) in small {
                    if let Some(bamp) = big.get(key) {
                        ip += if flip {
                            bamp * amp.conj()
                        } else {
                            amp * bamp.conj()
                        };
                    }
                }
                purity += ip.norm_sqr();
            }
        }
        Ok(purity)
    }

    /// Splits into (left pattern → map of complement pattern → amplitude).
    fn group_rows(
        &self,
        left_wires: &[usize],
    ) -> BTreeMap<Vec<u32>, BTreeMap<Vec<u32>, Complex64>> {
        let sparse = self.to_sparse();
        let StateRepr::Sparse(map) = &sparse.repr else {
            unreachable!()
        };
        let rest: Vec<usize> = (0..self.wire_count())
            .filter(|w| !left_wires.contains(w))
            .collect();
        let mut rows: BTreeMap<Vec<u32>, BTreeMap<Vec<u32>, Complex64>> = BTreeMap::new();
        for (key, amp) in map {
            let left: Vec<u32> = left_wires.iter().map(|&w| key[w]).collect();
            let right: Vec<u32> = rest.iter().map(|&w| key[w]).collect();
            rows.entry(left).or_default().insert(right, *amp);
        }
        rows
    }

    /// Factors a product state across the cut (complement | right_wires).
    /// Fails with the purity deficit when the cut carries entanglement.
    pub fn split(&self, right_wires: &[usize]) -> Result<(QuditState, QuditState)> {
        self.layout.check_wires(right_wires)?;
        if right_wires.len() == self.wire_count() {
            return Err(Error::InvalidWireSubset);
        }
        let left_wires: Vec<usize> = (0..self.wire_count())
            .filter(|w| !right_wires.contains(w))
            .collect();
        let purity = self.purity_across(&left_wires)?;
        let deficit = 1.0 - purity;
        if deficit > 1e-10 {
            return Err(Error::ResidualEntanglement(deficit));
        }

        // Reference row with maximal weight fixes the right factor's phase.
        let rows = self.group_rows(&left_wires);
        let mut best: Option<(&Vec<u32>, f64)> = None;
        for (left, row) in &rows {
            let weight: f64 = row.values().map(|a| a.norm_sqr()).sum();
            if best.is_none_or(|(_, w)| weight > w) {
                best = Some((left, weight));
            }
        }
        let (ref_left, ref_weight) = best.ok_or(Error::ZeroNormProjection)?;
        let ref_row = &rows[ref_left];
        let scale = ref_weight.sqrt().recip();
        let right_map: BTreeMap<Vec<u32>, Complex64> = ref_row
            .iter()
            .map(|(k, a)| (k.clone(), a * scale))
            .collect();

        // Left coefficients are projections onto the right factor.
        let mut left_map: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (left, row) in &rows {
            let mut coeff = ZERO;
            for (k, a) in row {
                if let Some(g) = right_map.get(k) {
                    coeff += g.conj() * a;
                }
            }
            if coeff.norm() >= PRUNE_EPSILON {
                left_map.insert(left.clone(), coeff);
            }
        }

        let left_layout = self.layout.subset(&left_wires)?;
        let right_layout = self.layout.subset(right_wires)?;
        let mut left = QuditState {
            layout: left_layout,
            repr: StateRepr::Sparse(left_map),
        };
        left.normalize()?;
        let right = QuditState {
            layout: right_layout,
            repr: StateRepr::Sparse(right_map),
        };
        Ok((left, right))
    }

    /// Born-rule outcome distribution for a computational-basis measurement
    /// of `wires`, keyed by digit tuple in wire order.
    pub fn outcome_distribution(&self, wires: &[usize]) -> Result<BTreeMap<Vec<u32>, f64>> {
        self.layout.check_wires(wires)?;
        let mut marginal: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (key, amp) in self.terms() {
            let outcome: Vec<u32> = wires.iter().map(|&w| key[w]).collect();
            *marginal.entry(outcome).or_insert(0.0) += amp.norm_sqr();
        }
        Ok(marginal)
    }

    /// Born-rule measurement of `wires` in the computational basis, collapsing
    /// the state. Deterministic for a given RNG stream.
    pub fn measure_computational<R: Rng>(
        &self,
        wires: &[usize],
        rng: &mut R,
    ) -> Result<MeasurementOutcome> {
        let marginal = self.outcome_distribution(wires)?;
        let sparse = self.to_sparse();
        let StateRepr::Sparse(map) = &sparse.repr else {
            unreachable!()
        };
        let total: f64 = marginal.values().sum();
        if total < 1e-12 {
            return Err(Error::ZeroNormProjection);
        }
        let draw: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen: Option<(&Vec<u32>, f64)> = None;
        for (outcome, weight) in &marginal {
            acc += weight;
            if draw < acc {
                chosen = Some((outcome, *weight));
                break;
            }
        }
        // Guard against the draw landing on the last bucket by rounding.
        let (digits, probability) = match chosen {
            Some((o, p)) => (o.clone(), p),
            None => {
                let (o, p) = marginal
                    .iter()
                    .next_back()
                    .ok_or(Error::ZeroNormProjection)?;
                (o.clone(), *p)
            }
        };

        let inv = probability.sqrt().recip();
        let mut post: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (key, amp) in map {
            if wires
                .iter()
                .zip(digits.iter())
                .all(|(&w, &digit)| key[w] == digit)
            {
                post.insert(key.clone(), amp * inv);
            }
        }
        let post_state = match self.backend() {
            Backend::Sparse => QuditState {
                layout: self.layout.clone(),
                repr: StateRepr::Sparse(post),
            },
            Backend::Dense => QuditState {
                layout: self.layout.clone(),
                repr: StateRepr::Sparse(post),
            }
            .to_dense()?,
        };
        Ok(MeasurementOutcome {
            digits,
            probability: probability / total,
            post_state,
        })
    }

    /// Seeded convenience wrapper around `measure_computational`.
    pub fn measure_computational_seeded(
        &self,
        wires: &[usize],
        rng_seed: u64,
    ) -> Result<MeasurementOutcome> {
        let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
        self.measure_computational(wires, &mut rng)
    }

    /// Drops wires that have collapsed to definite digits (post-measurement).
    pub fn remove_wires(&self, wires: &[usize], digits: &[u32]) -> Result<Self> {
        self.layout.check_wires(wires)?;
        if wires.len() != digits.len() {
            return Err(Error::DigitCountMismatch {
                expected: wires.len(),
                got: digits.len(),
            });
        }
        if wires.len() == self.wire_count() {
            return Err(Error::InvalidWireSubset);
        }
        let keep: Vec<usize> = (0..self.wire_count())
            .filter(|w| !wires.contains(w))
            .collect();
        let sparse = self.to_sparse();
        let StateRepr::Sparse(map) = &sparse.repr else {
            unreachable!()
        };
        let mut out: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (key, amp) in map {
            if wires
                .iter()
                .zip(digits.iter())
                .any(|(&w, &digit)| key[w] != digit)
            {
                return Err(Error::ResidualEntanglement(amp.norm_sqr()));
            }
            out.insert(keep.iter().map(|&w| key[w]).collect(), *amp);
        }
        let layout = self.layout.subset(&keep)?;
        let state = QuditState {
            layout,
            repr: StateRepr::Sparse(out),
        };
        match self.backend() {
            Backend::Sparse => Ok(state),
            Backend::Dense => state.to_dense(),
        }
    }

    /// Canonical dump: amplitudes sorted lexicographically by digit tuple,
    /// bit-exact across backends after pruning.
    pub fn dump(&self) -> StateDump {
        let sparse = self.to_sparse();
        let StateRepr::Sparse(map) = &sparse.repr else {
            unreachable!()
        };
        StateDump {
            dimension: self.dimension(),
            labels: self.layout.labels().iter().map(|l| l.to_string()).collect(),
            amplitudes: map
                .iter()
                .map(|(digits, amp)| AmplitudeEntry {
                    digits: digits.clone(),
                    re: amp.re,
                    im: amp.im,
                })
                .collect(),
        }
    }

    /// Iterates stored terms as (digits, amplitude), in lexicographic order.
    pub fn terms(&self) -> Vec<(Vec<u32>, Complex64)> {
        let sparse = self.to_sparse();
        let StateRepr::Sparse(map) = sparse.repr else {
            unreachable!()
        };
        map.into_iter().collect()
    }
}
