//! Reduced density matrices and the metrics built on them: trace distance,
//! purity, von Neumann entropy, and overlap with pure references.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qudit::layout::RegisterLayout;
use crate::qudit::state::QuditState;

/// Dense reduced matrices are refused above this dimension; use
/// [`SparseDensity`] for larger registers.
pub const DENSITY_CAP: u128 = 2048;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Hermitian, unit-trace, positive-semidefinite matrix over a reduced register.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    layout: RegisterLayout,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(layout: RegisterLayout, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = layout.total_dimension().unwrap_or(u128::MAX);
        if dim > DENSITY_CAP {
            return Err(Error::DensityTooLarge(dim));
        }
        if matrix.nrows() != dim as usize || matrix.ncols() != dim as usize {
            return Err(Error::DimensionMismatch {
                expected: dim as u32,
                got: matrix.nrows() as u32,
            });
        }
        Ok(Self { layout, matrix })
    }

    /// ρ = |ψ⟩⟨ψ| for a small pure state.
    pub fn from_pure(state: &QuditState) -> Result<Self> {
        let keep: Vec<usize> = (0..state.wire_count()).collect();
        state.partial_trace_grouped(&keep, &[])
    }

    /// I/dim over the given layout.
    pub fn maximally_mixed(layout: RegisterLayout) -> Result<Self> {
        let dim = layout.total_dimension().unwrap_or(u128::MAX);
        if dim > DENSITY_CAP {
            return Err(Error::DensityTooLarge(dim));
        }
        let n = dim as usize;
        let matrix = DMatrix::from_diagonal_element(n, n, Complex64::new(1.0 / n as f64, 0.0));
        Ok(Self { layout, matrix })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diagonal().sum()
    }

    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                acc += (self.matrix[(i, j)] * self.matrix[(j, i)]).re;
            }
        }
        acc
    }

    /// Eigenvalues of the (Hermitian) matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = nalgebra::linalg::SymmetricEigen::new(self.matrix.clone());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// Checks trace = 1 (1e-10), Hermiticity (1e-10) and positivity (−1e-9).
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::ResidualEntanglement((tr.re - 1.0).abs()));
        }
        let mut herm_dev: f64 = 0.0;
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                herm_dev = herm_dev.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        if herm_dev > 1e-10 {
            return Err(Error::ResidualEntanglement(herm_dev));
        }
        let min_eig = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min_eig < -1e-9 {
            return Err(Error::ResidualEntanglement(-min_eig));
        }
        Ok(())
    }

    /// ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.layout.dimension() != other.layout.dimension() || self.dim() != other.dim() {
            return Err(Error::LayoutMismatch);
        }
        let diff = &self.matrix - &other.matrix;
        let eig = nalgebra::linalg::SymmetricEigen::new(diff);
        Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
    }

    /// −Σ λ log_base λ over eigenvalues above 1e-12.
    pub fn von_neumann_entropy(&self, base: f64) -> f64 {
        self.eigenvalues()
            .iter()
            .filter(|&&l| l > 1e-12)
            .map(|&l| -l * l.ln())
            .sum::<f64>()
            / base.ln()
    }

    /// ⟨ψ|ρ|ψ⟩ for a pure reference over the same register.
    pub fn overlap_with_pure(&self, reference: &QuditState) -> Result<f64> {
        if reference.layout() != &self.layout {
            return Err(Error::LayoutMismatch);
        }
        let terms = reference.terms();
        let d = self.layout.dimension();
        let mut acc = ZERO;
        for (ki, ai) in &terms {
            let i = digits_index(ki, d);
            for (kj, aj) in &terms {
                let j = digits_index(kj, d);
                acc += ai.conj() * self.matrix[(i, j)] * aj;
            }
        }
        Ok(acc.re)
    }
}

fn digits_index(digits: &[u32], d: u32) -> usize {
    let mut idx = 0usize;
    for &digit in digits {
        idx = idx * d as usize + digit as usize;
    }
    idx
}

/// Reduced density operator stored as a sparse map of
/// (row digits, column digits) → entry. Suits registers far beyond the dense cap.
#[derive(Clone, Debug)]
pub struct SparseDensity {
    layout: RegisterLayout,
    entries: BTreeMap<(Vec<u32>, Vec<u32>), Complex64>,
}

impl SparseDensity {
    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn entries(&self) -> &BTreeMap<(Vec<u32>, Vec<u32>), Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries
            .iter()
            .filter(|((r, c), _)| r == c)
            .map(|(_, v)| *v)
            .sum()
    }

    /// ½‖ρ − σ‖₁ computed on the joint support subspace, which is exact
    /// because both operators vanish outside it.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.layout.dimension() != other.layout.dimension()
            || self.layout.wire_count() != other.layout.wire_count()
        {
            return Err(Error::LayoutMismatch);
        }
        let mut support: BTreeSet<Vec<u32>> = BTreeSet::new();
        for (r, c) in self.entries.keys().chain(other.entries.keys()) {
            support.insert(r.clone());
            support.insert(c.clone());
        }
        let basis: Vec<Vec<u32>> = support.into_iter().collect();
        if basis.len() as u128 > DENSITY_CAP {
            return Err(Error::DensityTooLarge(basis.len() as u128));
        }
        let index: BTreeMap<&Vec<u32>, usize> =
            basis.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut diff = DMatrix::from_element(basis.len(), basis.len(), ZERO);
        for ((r, c), v) in &self.entries {
            diff[(index[r], index[c])] += v;
        }
        for ((r, c), v) in &other.entries {
            diff[(index[r], index[c])] -= v;
        }
        let eig = nalgebra::linalg::SymmetricEigen::new(diff);
        Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
    }
}

impl QuditState {
    /// Reduced density matrix on `keep_wires` (in the given order), dense.
    pub fn partial_trace(&self, keep_wires: &[usize]) -> Result<DensityMatrix> {
        self.layout().check_wires(keep_wires)?;
        let traced: Vec<usize> = (0..self.wire_count())
            .filter(|w| !keep_wires.contains(w))
            .collect();
        self.partial_trace_grouped(keep_wires, &traced)
    }

    pub(crate) fn partial_trace_grouped(
        &self,
        keep_wires: &[usize],
        traced: &[usize],
    ) -> Result<DensityMatrix> {
        let layout = self.layout().subset(keep_wires)?;
        let dim = layout.total_dimension().unwrap_or(u128::MAX);
        if dim > DENSITY_CAP {
            return Err(Error::DensityTooLarge(dim));
        }
        let d = self.dimension();
        let mut groups: BTreeMap<Vec<u32>, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (key, amp) in self.terms() {
            let env: Vec<u32> = traced.iter().map(|&w| key[w]).collect();
            let kept: Vec<u32> = keep_wires.iter().map(|&w| key[w]).collect();
            groups
                .entry(env)
                .or_default()
                .push((digits_index(&kept, d), amp));
        }
        let n = dim as usize;
        let mut matrix = DMatrix::from_element(n, n, ZERO);
        for group in groups.values() {
            for (i, a) in group {
                for (j, b) in group {
                    matrix[(*i, *j)] += a * b.conj();
                }
            }
        }
        DensityMatrix::new(layout, matrix)
    }

    /// Sparse reduced density operator on `keep_wires`; no size cap beyond
    /// what the state itself occupies.
    pub fn reduced_sparse(&self, keep_wires: &[usize]) -> Result<SparseDensity> {
        self.layout().check_wires(keep_wires)?;
        let layout = self.layout().subset(keep_wires)?;
        let traced: Vec<usize> = (0..self.wire_count())
            .filter(|w| !keep_wires.contains(w))
            .collect();
        let mut groups: BTreeMap<Vec<u32>, Vec<(Vec<u32>, Complex64)>> = BTreeMap::new();
        for (key, amp) in self.terms() {
            let env: Vec<u32> = traced.iter().map(|&w| key[w]).collect();
            let kept: Vec<u32> = keep_wires.iter().map(|&w| key[w]).collect();
            groups.entry(env).or_default().push((kept, amp));
        }
        let mut entries: BTreeMap<(Vec<u32>, Vec<u32>), Complex64> = BTreeMap::new();
        for group in groups.values() {
            for (ki, a) in group {
                for (kj, b) in group {
                    *entries.entry((ki.clone(), kj.clone())).or_insert(ZERO) += a * b.conj();
                }
            }
        }
        // keep the support tight for the eigen step
        entries.retain(|_, v| v.norm() >= 1e-18);
        Ok(SparseDensity { layout, entries })
    }

    /// ⟨ref|ρ_wires|ref⟩ where ρ_wires is the reduced state on `wires`
    /// (ascending order), without materializing the matrix.
    pub fn overlap_with_pure_on(&self, wires: &[usize], reference: &QuditState) -> Result<f64> {
        self.layout().check_wires(wires)?;
        if reference.layout() != &self.layout().subset(wires)? {
            return Err(Error::LayoutMismatch);
        }
        let env: Vec<usize> = (0..self.wire_count())
            .filter(|w| !wires.contains(w))
            .collect();
        if env.is_empty() {
            return Ok(self.inner(reference)?.norm_sqr());
        }
        let mut rows: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (key, amp) in self.terms() {
            let env_key: Vec<u32> = env.iter().map(|&w| key[w]).collect();
            let kept: Vec<u32> = wires.iter().map(|&w| key[w]).collect();
            let coeff = reference.amplitude(&kept).conj() * amp;
            *rows.entry(env_key).or_insert(ZERO) += coeff;
        }
        Ok(rows.values().map(|v| v.norm_sqr()).sum())
    }
}
