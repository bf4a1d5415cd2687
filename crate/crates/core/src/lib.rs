//! Compilation of SWAP networks into the native `{CZ, iSWAP}` gate set.
//!
//! Every SWAP becomes one fused `iSCZ` (or an `iSWAP` plus a `CZ`), and the
//! stray `S^dagger` phases are collected per wire and emitted as a single
//! trailing layer of `S^dagger`, `Z` or `S` gates. The crate also contains
//! an exact simulator used as the equivalence oracle, a noisy benchmark
//! harness for routed random permutations, and a bucket-brigade QRAM
//! builder with its gate-count analysis.
//!
//! Conventions used throughout: the first operand of a gate is the most
//! significant bit of its matrix, and wire 0 is the most significant bit of
//! a register's basis index.

pub mod circuit;
pub mod compiler;
pub mod error;
pub mod gates;
pub mod netbench;
pub mod qram;
pub mod sim;

pub use circuit::{Circuit, CouplingMap, Instruction, Metrics};
pub use error::{BenchError, CircuitError, CompileError, GateError, QramError, SimError};
pub use gates::{gate_matrix, GateKind, Matrix};
