//! Bucket-brigade QRAM with qubit-qubit tree nodes.
//!
//! The circuit runs in three stages. Address bits are pushed one at a time
//! into the tree, the data bus qubits are routed to the addressed leaf and
//! back (pipelined two steps apart), and the address setting is undone.
//! With extensions on, SWAP-type gates that move a value onto an empty
//! register become `iSWAP` / `C-iSWAP`, the owed `S^dagger` powers are paid
//! on the bus, and bidirectional exchanges leave their `CZ` to the bus.

mod build;
mod compensation;
mod counts;
mod layout;
mod schedule;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QramError, SimError};
use crate::sim::SparseState;

pub use build::{build_qram_circuit, BusCorrection, PhaseCorrectionLedger, QramBuild};
pub use compensation::{ext2_compensation_plan, CompensationOp, CompensationPlan};
pub use counts::{closed_form_counts, count_gates, f_closed_form, GateCountReport, GateCounts};
pub use layout::TreeLayout;
pub use schedule::{
    find_conflicts, merged_pairs_closed_form, pipeline_schedule, pipeline_steps_closed_form,
    schedule_words, PipelineOp, PipelineSchedule,
};

/// Largest register the basis-state verifier accepts.
pub const VERIFY_WIRE_CAP: usize = 20;
const MAX_N: usize = 16;
const MAX_K: usize = 32;

fn default_true() -> bool {
    true
}

/// An `(n, k)` QRAM instance: `2^n` classical words of `k` bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QramSpec {
    pub n: usize,
    pub k: usize,
    pub memory: Vec<u64>,
    #[serde(default = "default_true")]
    pub extensions: bool,
    #[serde(default = "default_true")]
    pub pipeline: bool,
}

impl QramSpec {
    pub fn new(n: usize, k: usize, memory: Vec<u64>) -> Result<Self, QramError> {
        let spec = QramSpec {
            n,
            k,
            memory,
            extensions: true,
            pipeline: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_options(mut self, extensions: bool, pipeline: bool) -> Self {
        self.extensions = extensions;
        self.pipeline = pipeline;
        self
    }

    /// All-zero memory; enough for gate counting.
    pub fn zeroed(n: usize, k: usize) -> Result<Self, QramError> {
        if n == 0 || n > MAX_N {
            return Err(QramError::InvalidSpec(format!(
                "n = {n} outside 1..={MAX_N}"
            )));
        }
        QramSpec::new(n, k, vec![0; 1 << n])
    }

    pub fn validate(&self) -> Result<(), QramError> {
        if self.n == 0 || self.n > MAX_N {
            return Err(QramError::InvalidSpec(format!(
                "n = {} outside 1..={MAX_N}",
                self.n
            )));
        }
        if self.k == 0 || self.k > MAX_K {
            return Err(QramError::InvalidSpec(format!(
                "k = {} outside 1..={MAX_K}",
                self.k
            )));
        }
        if self.memory.len() != 1 << self.n {
            return Err(QramError::InvalidSpec(format!(
                "memory has {} words, expected 2^{} = {}",
                self.memory.len(),
                self.n,
                1usize << self.n
            )));
        }
        if let Some((i, &w)) = self
            .memory
            .iter()
            .enumerate()
            .find(|(_, &w)| w >> self.k != 0)
        {
            return Err(QramError::InvalidSpec(format!(
                "memory[{i}] = {w} does not fit in {} bits",
                self.k
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, QramError> {
        let spec: QramSpec =
            serde_json::from_str(text).map_err(|e| QramError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Bit `t` of a `k`-bit word, most significant first.
    pub fn word_bit(&self, word: u64, t: usize) -> bool {
        (word >> (self.k - 1 - t)) & 1 == 1
    }
}

/// One row of the ideal lookup: `|i>|z> -> |i>|z xor d_i>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QramBasisMap {
    pub address: usize,
    pub data_in: u64,
    pub data_out: u64,
}

/// The classical truth table of the ideal QRAM unitary.
pub fn ideal_qram_unitary(spec: &QramSpec) -> Vec<QramBasisMap> {
    let mut out = Vec::with_capacity(spec.memory.len() << spec.k);
    for (address, &word) in spec.memory.iter().enumerate() {
        for data_in in 0..1u64 << spec.k {
            out.push(QramBasisMap {
                address,
                data_in,
                data_out: data_in ^ word,
            });
        }
    }
    out
}

/// Full-register basis index of bus contents with every ancilla at `|0>`.
pub fn bus_basis_index(layout: &TreeLayout, address: usize, data: u64) -> u64 {
    let bus = ((address as u64) << layout.k()) | data;
    bus << (layout.n_wires() - layout.n() - layout.k())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QramVerification {
    pub inputs: usize,
    /// Largest `|amp - 1|` on the expected output over all inputs.
    pub max_deviation: f64,
    /// Largest probability left outside the expected output.
    pub max_leakage: f64,
    /// Largest probability on states with a non-zero ancilla.
    pub max_ancilla_population: f64,
}

impl QramVerification {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation < tol && self.max_leakage < tol && self.max_ancilla_population < tol
    }
}

/// Simulates the built circuit on every `|i>|z>` input.
pub fn verify_qram(spec: &QramSpec) -> Result<QramVerification, QramError> {
    spec.validate()?;
    let layout = TreeLayout::new(spec.n, spec.k);
    if layout.n_wires() > VERIFY_WIRE_CAP {
        return Err(SimError::SizeCap {
            what: "QRAM verification",
            cap: VERIFY_WIRE_CAP,
            requested: layout.n_wires(),
        }
        .into());
    }
    let build = build_qram_circuit(spec)?;
    let ancilla_mask = (1u64 << (layout.n_wires() - layout.n() - layout.k())) - 1;
    let rows = ideal_qram_unitary(spec);
    let per_input: Vec<(f64, f64, f64)> = rows
        .par_iter()
        .map(|row| -> Result<(f64, f64, f64), QramError> {
            let input = bus_basis_index(&layout, row.address, row.data_in);
            let expected = bus_basis_index(&layout, row.address, row.data_out);
            let mut psi = SparseState::basis(layout.n_wires(), input);
            psi.apply_circuit(&build.circuit)?;
            let dev = (psi.amplitude(expected) - 1.0).norm();
            let mut leak = 0.0;
            let mut anc = 0.0;
            for (&idx, amp) in psi.amplitudes() {
                if idx != expected {
                    leak += amp.norm_sqr();
                }
                if idx & ancilla_mask != 0 {
                    anc += amp.norm_sqr();
                }
            }
            Ok((dev, leak, anc))
        })
        .collect::<Result<_, _>>()?;
    let max = |f: fn(&(f64, f64, f64)) -> f64| per_input.iter().map(f).fold(0.0, f64::max);
    Ok(QramVerification {
        inputs: per_input.len(),
        max_deviation: max(|r| r.0),
        max_leakage: max(|r| r.1),
        max_ancilla_population: max(|r| r.2),
    })
}
