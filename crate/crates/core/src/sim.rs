//! Exact statevector and density-matrix simulation.
//!
//! Wire `w` of an `n`-qubit register is bit `n - 1 - w` of the basis index,
//! so wire 0 is the most significant bit, matching the gate operand order.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::SimError;
use crate::gates::{GateKind, Matrix};

/// Largest register for which [`circuit_unitary`] builds a full matrix.
pub const UNITARY_CAP: usize = 10;
/// Default largest register held as a density matrix.
pub const DEFAULT_DENSITY_CAP: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Offsets of the `2^k` local basis states of `wires` inside an
/// `n`-qubit index, with the first wire as the local MSB.
fn local_offsets(n: usize, wires: &[usize]) -> (usize, Vec<usize>) {
    let k = wires.len();
    let mut mask = 0usize;
    for &w in wires {
        mask |= 1 << (n - 1 - w);
    }
    let offsets = (0..1usize << k)
        .map(|sub| {
            let mut off = 0;
            for (j, &w) in wires.iter().enumerate() {
                if sub >> (k - 1 - j) & 1 == 1 {
                    off |= 1 << (n - 1 - w);
                }
            }
            off
        })
        .collect();
    (mask, offsets)
}

/// Applies a `2^k x 2^k` matrix to `wires` of a dense amplitude vector.
fn apply_kernel(amps: &mut [Complex64], n: usize, u: &Matrix, wires: &[usize]) {
    let dim = u.nrows();
    debug_assert_eq!(dim, 1 << wires.len());
    let (mask, offsets) = local_offsets(n, wires);
    let mut buf = vec![ZERO; dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (b, off) in buf.iter_mut().zip(&offsets) {
            *b = amps[base | off];
        }
        for (row, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (col, b) in buf.iter().enumerate() {
                acc += u[(row, col)] * b;
            }
            amps[base | off] = acc;
        }
    }
}

fn check_wires(n: usize, wires: &[usize]) -> Result<(), SimError> {
    match wires.iter().find(|&&w| w >= n) {
        Some(&wire) => Err(SimError::WireOutOfRange { wire, n }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        if amps.len() != 1 << n {
            return Err(SimError::DimensionMismatch {
                state: n,
                other: amps.len().trailing_zeros() as usize,
            });
        }
        Ok(StateVector { n, amps })
    }

    /// Tensor product of single-qubit states, wire 0 first.
    pub fn product(qubits: &[[Complex64; 2]]) -> Self {
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for q in qubits {
            amps = amps.iter().flat_map(|a| [a * q[0], a * q[1]]).collect();
        }
        StateVector {
            n: qubits.len(),
            amps,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_matrix(&mut self, u: &Matrix, wires: &[usize]) -> Result<(), SimError> {
        check_wires(self.n, wires)?;
        apply_kernel(&mut self.amps, self.n, u, wires);
        Ok(())
    }

    pub fn apply_gate(&mut self, kind: GateKind, wires: &[usize]) -> Result<(), SimError> {
        self.apply_matrix(&kind.matrix(), wires)
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<(), SimError> {
        self.check_circuit(circuit)?;
        for g in circuit.gates() {
            apply_kernel(&mut self.amps, self.n, &g.kind.matrix(), &g.wires);
        }
        Ok(())
    }

    /// Applies the exact inverse: gates reversed, matrices adjointed.
    pub fn apply_circuit_inverse(&mut self, circuit: &Circuit) -> Result<(), SimError> {
        self.check_circuit(circuit)?;
        for g in circuit.gates().iter().rev() {
            apply_kernel(&mut self.amps, self.n, &g.kind.matrix().adjoint(), &g.wires);
        }
        Ok(())
    }

    fn check_circuit(&self, circuit: &Circuit) -> Result<(), SimError> {
        if circuit.n_wires() != self.n {
            return Err(SimError::DimensionMismatch {
                state: self.n,
                other: circuit.n_wires(),
            });
        }
        Ok(())
    }

    /// Moves the amplitude on wire `w` to wire `perm[w]`.
    pub fn permute_wires(&self, perm: &[usize]) -> StateVector {
        let n = self.n;
        let mut amps = vec![ZERO; self.amps.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            let mut out = 0;
            for (w, &target) in perm.iter().enumerate() {
                if idx >> (n - 1 - w) & 1 == 1 {
                    out |= 1 << (n - 1 - target);
                }
            }
            amps[out] = *a;
        }
        StateVector { n, amps }
    }
}

/// Row-major density matrix over `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &StateVector) -> Result<Self, SimError> {
        Self::from_pure_with_cap(psi, DEFAULT_DENSITY_CAP)
    }

    pub fn from_pure_with_cap(psi: &StateVector, cap: usize) -> Result<Self, SimError> {
        if psi.n > cap {
            return Err(SimError::SizeCap {
                what: "density matrix",
                cap,
                requested: psi.n,
            });
        }
        let dim = psi.amps.len();
        let mut data = vec![ZERO; dim * dim];
        for (r, a) in psi.amps.iter().enumerate() {
            for (c, b) in psi.amps.iter().enumerate() {
                data[r * dim + c] = a * b.conj();
            }
        }
        Ok(DensityMatrix { n: psi.n, data })
    }

    pub fn from_matrix(m: &Matrix) -> Result<Self, SimError> {
        let dim = m.nrows();
        if !dim.is_power_of_two() || m.ncols() != dim {
            return Err(SimError::DimensionMismatch {
                state: dim.trailing_zeros() as usize,
                other: m.ncols().trailing_zeros() as usize,
            });
        }
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = m[(r, c)];
            }
        }
        Ok(DensityMatrix {
            n: dim.trailing_zeros() as usize,
            data,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn to_matrix(&self) -> Matrix {
        let d = self.dim();
        DMatrix::from_row_slice(d, d, &self.data)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut err: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                err = err.max((self.entry(r, c) - self.entry(c, r).conj()).norm());
            }
        }
        err
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.to_matrix())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// `rho -> U rho U^dagger` on `wires`.
    pub fn apply_matrix(&mut self, u: &Matrix, wires: &[usize]) -> Result<(), SimError> {
        check_wires(self.n, wires)?;
        let n = self.n;
        // The row index occupies the high n bits of the doubled register.
        apply_kernel(&mut self.data, 2 * n, u, wires);
        let col_wires: Vec<usize> = wires.iter().map(|w| w + n).collect();
        apply_kernel(&mut self.data, 2 * n, &u.conjugate(), &col_wires);
        Ok(())
    }

    /// Replaces the reduced state of `wires` by the maximally mixed state
    /// with probability `p`.
    pub fn depolarize(&mut self, wires: &[usize], p: f64) -> Result<(), SimError> {
        check_wires(self.n, wires)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(SimError::InvalidProbability(p));
        }
        if p == 0.0 {
            return Ok(());
        }
        let n = self.n;
        let dim = self.dim();
        let (mask, offsets) = local_offsets(n, wires);
        let scale = p / offsets.len() as f64;
        let blocks: Vec<usize> = (0..dim).filter(|i| i & mask == 0).collect();
        let mut traced = Vec::with_capacity(blocks.len() * blocks.len());
        for &r0 in &blocks {
            for &c0 in &blocks {
                let sum: Complex64 = offsets
                    .iter()
                    .map(|o| self.data[(r0 | o) * dim + (c0 | o)])
                    .sum();
                traced.push(sum);
            }
        }
        for v in self.data.iter_mut() {
            *v *= 1.0 - p;
        }
        let mut it = traced.into_iter();
        for &r0 in &blocks {
            for &c0 in &blocks {
                let sum = it.next().expect("one traced entry per block pair");
                for o in &offsets {
                    self.data[(r0 | o) * dim + (c0 | o)] += sum * scale;
                }
            }
        }
        Ok(())
    }

    /// Applies `circuit`, following every multi-qubit gate with the
    /// depolarizing channel on its operands.
    pub fn apply_circuit_noisy(
        &mut self,
        circuit: &Circuit,
        noise: &NoiseModel,
    ) -> Result<(), SimError> {
        if circuit.n_wires() != self.n {
            return Err(SimError::DimensionMismatch {
                state: self.n,
                other: circuit.n_wires(),
            });
        }
        noise.validate()?;
        for g in circuit.gates() {
            self.apply_matrix(&g.kind.matrix(), &g.wires)?;
            if g.wires.len() > 1 {
                self.depolarize(&g.wires, noise.p_two_qubit)?;
            }
        }
        Ok(())
    }
}

/// Depolarizing strength applied after every multi-qubit gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p_two_qubit: f64,
}

impl NoiseModel {
    pub fn new(p_two_qubit: f64) -> Result<Self, SimError> {
        let m = NoiseModel { p_two_qubit };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless() -> Self {
        NoiseModel { p_two_qubit: 0.0 }
    }

    fn validate(&self) -> Result<(), SimError> {
        if (0.0..=1.0).contains(&self.p_two_qubit) {
            Ok(())
        } else {
            Err(SimError::InvalidProbability(self.p_two_qubit))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn n_qubits(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.n,
            QuantumState::Mixed(r) => r.n,
        }
    }
}

/// Applies `circuit` to `state` noiselessly.
pub fn apply_circuit(state: QuantumState, circuit: &Circuit) -> Result<QuantumState, SimError> {
    match state {
        QuantumState::Pure(mut s) => {
            s.apply_circuit(circuit)?;
            Ok(QuantumState::Pure(s))
        }
        QuantumState::Mixed(mut r) => {
            r.apply_circuit_noisy(circuit, &NoiseModel::noiseless())?;
            Ok(QuantumState::Mixed(r))
        }
    }
}

/// Two-qubit depolarizing channel on `pair`.
pub fn depolarize_two_qubit(
    state: QuantumState,
    pair: (usize, usize),
    p: f64,
) -> Result<QuantumState, SimError> {
    match state {
        QuantumState::Pure(_) => Err(SimError::PureState),
        QuantumState::Mixed(mut r) => {
            r.depolarize(&[pair.0, pair.1], p)?;
            Ok(QuantumState::Mixed(r))
        }
    }
}

/// Uhlmann fidelity `Tr[sqrt(sqrt(r1) r2 sqrt(r1))]^2`; the overlap
/// shortcut is used when either state is pure.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64, SimError> {
    if a.n_qubits() != b.n_qubits() {
        return Err(SimError::DimensionMismatch {
            state: a.n_qubits(),
            other: b.n_qubits(),
        });
    }
    let f = match (a, b) {
        (QuantumState::Pure(x), QuantumState::Pure(y)) => x.inner(y).norm_sqr(),
        (QuantumState::Pure(x), QuantumState::Mixed(r))
        | (QuantumState::Mixed(r), QuantumState::Pure(x)) => expectation(r, x),
        (QuantumState::Mixed(r1), QuantumState::Mixed(r2)) => mixed_fidelity(r1, r2)?,
    };
    Ok(f.clamp(0.0, 1.0))
}

/// `<phi| rho |phi>`.
pub fn expectation(rho: &DensityMatrix, phi: &StateVector) -> f64 {
    let d = rho.dim();
    let mut acc = ZERO;
    for r in 0..d {
        let left = phi.amps[r].conj();
        if left == ZERO {
            continue;
        }
        let row: Complex64 = (0..d).map(|c| rho.data[r * d + c] * phi.amps[c]).sum();
        acc += left * row;
    }
    acc.re
}

const PSD_TOL: f64 = 1e-9;

fn mixed_fidelity(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64, SimError> {
    let e1 = SymmetricEigen::new(r1.to_matrix());
    let min1 = e1.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min1 < -PSD_TOL {
        return Err(SimError::NotPsd(min1));
    }
    let min2 = r2.min_eigenvalue();
    if min2 < -PSD_TOL {
        return Err(SimError::NotPsd(min2));
    }
    let sqrt_vals = e1
        .eigenvalues
        .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let v = &e1.eigenvectors;
    let sqrt1 = v * DMatrix::from_diagonal(&sqrt_vals) * v.adjoint();
    let m = &sqrt1 * r2.to_matrix() * &sqrt1;
    // Symmetrise against round-off before the Hermitian solver.
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let inner: f64 = SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    Ok(inner * inner)
}

/// Full unitary of `circuit`, one column per basis input.
pub fn circuit_unitary(circuit: &Circuit) -> Result<Matrix, SimError> {
    let n = circuit.n_wires();
    if n > UNITARY_CAP {
        return Err(SimError::SizeCap {
            what: "circuit unitary",
            cap: UNITARY_CAP,
            requested: n,
        });
    }
    let dim = 1 << n;
    let mut u = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let mut s = StateVector::basis(n, col);
        s.apply_circuit(circuit)?;
        for (row, a) in s.amps.iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}

/// Statevector storing only non-zero amplitudes, for circuits that keep
/// the state close to a basis state (permutations, phases, a few
/// Hadamards) on registers too wide for a dense vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    n: usize,
    amps: BTreeMap<u64, Complex64>,
}

const SPARSE_PRUNE: f64 = 1e-14;

impl SparseState {
    pub fn basis(n: usize, index: u64) -> Self {
        assert!(n <= 64, "sparse state limited to 64 wires");
        let mut amps = BTreeMap::new();
        amps.insert(index, Complex64::new(1.0, 0.0));
        SparseState { n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &BTreeMap<u64, Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.amps.get(&index).copied().unwrap_or(ZERO)
    }

    pub fn apply_matrix(&mut self, u: &Matrix, wires: &[usize]) -> Result<(), SimError> {
        check_wires(self.n, wires)?;
        let n = self.n;
        let k = wires.len();
        let bit = |w: usize| 1u64 << (n - 1 - w);
        let mask: u64 = wires.iter().map(|&w| bit(w)).fold(0, |a, b| a | b);
        let offset = |sub: usize| -> u64 {
            wires
                .iter()
                .enumerate()
                .filter(|(j, _)| sub >> (k - 1 - j) & 1 == 1)
                .map(|(_, &w)| bit(w))
                .fold(0, |a, b| a | b)
        };
        let offsets: Vec<u64> = (0..1usize << k).map(offset).collect();
        let mut out: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&idx, &a) in &self.amps {
            let base = idx & !mask;
            let sub = offsets
                .iter()
                .position(|&o| o == idx & mask)
                .expect("offset table covers every local pattern");
            for (row, &o) in offsets.iter().enumerate() {
                let coef = u[(row, sub)];
                if coef != ZERO {
                    *out.entry(base | o).or_insert(ZERO) += coef * a;
                }
            }
        }
        out.retain(|_, a| a.norm() > SPARSE_PRUNE);
        self.amps = out;
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<(), SimError> {
        if circuit.n_wires() != self.n {
            return Err(SimError::DimensionMismatch {
                state: self.n,
                other: circuit.n_wires(),
            });
        }
        for g in circuit.gates() {
            self.apply_matrix(&g.kind.matrix(), &g.wires)?;
        }
        Ok(())
    }
}
