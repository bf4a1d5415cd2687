//! Circuit intermediate representation, coupling maps and metrics.
//!
//! JSON layout:
//!
//! ```text
//! { "n": 3, "known_zero": [0],
//!   "gates": [ { "kind": "iscz", "wires": [0, 1], "params": [] } ] }
//! ```
//!
//! Coupling maps serialize as `{ "n": 3, "edges": [[0, 1], [1, 2]] }`.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::CircuitError;
use crate::gates::GateKind;

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub kind: GateKind,
    pub wires: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_wires: usize,
    gates: Vec<Instruction>,
    known_zero: BTreeSet<usize>,
}

impl Circuit {
    pub fn new(n_wires: usize) -> Result<Self, CircuitError> {
        if n_wires == 0 {
            return Err(CircuitError::NoWires);
        }
        Ok(Circuit {
            n_wires,
            gates: Vec::new(),
            known_zero: BTreeSet::new(),
        })
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn gates(&self) -> &[Instruction] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Wires asserted to start in `|0>`. Metadata only.
    pub fn known_zero(&self) -> &BTreeSet<usize> {
        &self.known_zero
    }

    pub fn set_known_zero<I: IntoIterator<Item = usize>>(
        &mut self,
        wires: I,
    ) -> Result<(), CircuitError> {
        let set: BTreeSet<usize> = wires.into_iter().collect();
        if let Some(&wire) = set.iter().find(|&&w| w >= self.n_wires) {
            return Err(CircuitError::ZeroWireOutOfRange {
                wire,
                n_wires: self.n_wires,
            });
        }
        self.known_zero = set;
        Ok(())
    }

    /// Appends a gate after checking arity and operand validity.
    pub fn push(&mut self, kind: GateKind, wires: &[usize]) -> Result<(), CircuitError> {
        let index = self.gates.len();
        check_operands(index, kind, wires, self.n_wires)?;
        self.gates.push(Instruction {
            kind,
            wires: wires.to_vec(),
        });
        Ok(())
    }

    pub fn extend_from(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        if other.n_wires != self.n_wires {
            return Err(CircuitError::WireCountMismatch {
                circuit: self.n_wires,
                map: other.n_wires,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// ASAP layer index (0-based) of every gate.
    pub fn layers(&self) -> Vec<usize> {
        let mut frontier = vec![0usize; self.n_wires];
        self.gates
            .iter()
            .map(|g| {
                let layer = g.wires.iter().map(|&w| frontier[w]).max().unwrap_or(0);
                for &w in &g.wires {
                    frontier[w] = layer + 1;
                }
                layer
            })
            .collect()
    }

    pub fn metrics(&self) -> Metrics {
        let layers = self.layers();
        let mut m = Metrics::default();
        let mut multi_layers = HashSet::new();
        for (g, &layer) in self.gates.iter().zip(&layers) {
            m.total_gates += 1;
            match g.wires.len() {
                1 => m.single_qubit_gates += 1,
                2 => m.two_qubit_gates += 1,
                _ => m.three_qubit_gates += 1,
            }
            if g.wires.len() > 1 {
                multi_layers.insert(layer);
            }
            m.depth = m.depth.max(layer + 1);
        }
        m.two_qubit_depth = multi_layers.len();
        m
    }

    /// Lists every multi-qubit gate with an operand pair that is not an edge.
    pub fn validate(&self, map: &CouplingMap) -> Result<Vec<Violation>, CircuitError> {
        if map.n_wires() != self.n_wires {
            return Err(CircuitError::WireCountMismatch {
                circuit: self.n_wires,
                map: map.n_wires(),
            });
        }
        let mut out = Vec::new();
        for (index, g) in self.gates.iter().enumerate() {
            let mut missing = Vec::new();
            for i in 0..g.wires.len() {
                for j in i + 1..g.wires.len() {
                    if !map.has_edge(g.wires[i], g.wires[j]) {
                        missing.push((g.wires[i], g.wires[j]));
                    }
                }
            }
            if !missing.is_empty() {
                out.push(Violation {
                    index,
                    kind: g.kind,
                    missing,
                });
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let raw = RawCircuit {
            n: self.n_wires,
            known_zero: self.known_zero.iter().copied().collect(),
            gates: self
                .gates
                .iter()
                .map(|g| RawGate {
                    kind: g.kind.name().to_string(),
                    wires: g.wires.clone(),
                    params: g.kind.params(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("circuit serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, CircuitError> {
        let raw: RawCircuit = serde_json::from_str(text).map_err(CircuitError::from_json)?;
        let mut c = Circuit::new(raw.n).map_err(|_| CircuitError::Field {
            field: "n".into(),
            message: "must be positive".into(),
        })?;
        c.set_known_zero(raw.known_zero)
            .map_err(|e| CircuitError::Field {
                field: "known_zero".into(),
                message: e.to_string(),
            })?;
        for (i, g) in raw.gates.into_iter().enumerate() {
            let kind =
                GateKind::from_name(&g.kind, &g.params).map_err(|e| CircuitError::Field {
                    field: format!("gates[{i}].kind"),
                    message: e.to_string(),
                })?;
            c.push(kind, &g.wires).map_err(|e| CircuitError::Field {
                field: format!("gates[{i}].wires"),
                message: e.to_string(),
            })?;
        }
        Ok(c)
    }
}

fn check_operands(
    index: usize,
    kind: GateKind,
    wires: &[usize],
    n_wires: usize,
) -> Result<(), CircuitError> {
    if wires.len() != kind.arity() {
        return Err(CircuitError::Arity {
            index,
            kind: kind.name().to_string(),
            expected: kind.arity(),
            found: wires.len(),
        });
    }
    for (i, &w) in wires.iter().enumerate() {
        if w >= n_wires {
            return Err(CircuitError::WireOutOfRange {
                index,
                wire: w,
                n_wires,
            });
        }
        if wires[..i].contains(&w) {
            return Err(CircuitError::RepeatedWire { index, wire: w });
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct RawCircuit {
    n: usize,
    #[serde(default)]
    known_zero: Vec<usize>,
    gates: Vec<RawGate>,
}

#[derive(Serialize, Deserialize)]
struct RawGate {
    kind: String,
    wires: Vec<usize>,
    #[serde(default)]
    params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub kind: GateKind,
    /// Operand pairs of this gate that are not edges.
    pub missing: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub total_gates: usize,
    pub single_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub three_qubit_gates: usize,
    pub depth: usize,
    /// Number of ASAP layers holding at least one multi-qubit gate.
    pub two_qubit_depth: usize,
}

/// Undirected connectivity graph over wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    n_wires: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl CouplingMap {
    pub fn new(n_wires: usize, edges: &[(usize, usize)]) -> Result<Self, CircuitError> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n_wires || b >= n_wires {
                return Err(CircuitError::InvalidMap(format!(
                    "edge ({a}, {b}) out of range for {n_wires} wires"
                )));
            }
            if a == b {
                return Err(CircuitError::InvalidMap(format!("self-loop on wire {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(CouplingMap {
            n_wires,
            edges: set,
        })
    }

    pub fn line(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        CouplingMap::new(n, &edges).expect("line edges are valid")
    }

    pub fn ring(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        CouplingMap::new(n, &edges).expect("ring edges are valid")
    }

    /// Row-major `rows x cols` grid; wire `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let w = r * cols + c;
                if c + 1 < cols {
                    edges.push((w, w + 1));
                }
                if r + 1 < rows {
                    edges.push((w, w + cols));
                }
            }
        }
        CouplingMap::new(rows * cols, &edges).expect("grid edges are valid")
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn to_json(&self) -> String {
        let raw = RawMap {
            n: self.n_wires,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("map serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, CircuitError> {
        let raw: RawMap = serde_json::from_str(text).map_err(CircuitError::from_json)?;
        let edges: Vec<_> = raw.edges.iter().map(|e| (e[0], e[1])).collect();
        CouplingMap::new(raw.n, &edges)
    }
}

#[derive(Serialize, Deserialize)]
struct RawMap {
    n: usize,
    edges: Vec<[usize; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_wire_compiled() -> Circuit {
        let mut c = Circuit::new(5).unwrap();
        for (a, b) in [(0, 1), (2, 3), (1, 2), (3, 4)] {
            c.push(GateKind::ISCZ, &[a, b]).unwrap();
        }
        for (w, g) in [
            GateKind::Sdag,
            GateKind::Z,
            GateKind::Z,
            GateKind::Sdag,
            GateKind::Z,
        ]
        .into_iter()
        .enumerate()
        {
            c.push(g, &[w]).unwrap();
        }
        c
    }

    #[test]
    fn empty_circuit_metrics() {
        let c = Circuit::new(3).unwrap();
        assert_eq!(c.metrics(), Metrics::default());
    }

    #[test]
    fn five_wire_depths() {
        // Hand enumeration: layer 0 = {(0,1),(2,3)}, layer 1 = {(1,2),(3,4)},
        // Sdag on wire 0 fits layer 1, every other phase gate lands in layer 2.
        let c = five_wire_compiled();
        assert_eq!(c.layers(), vec![0, 0, 1, 1, 1, 2, 2, 2, 2]);
        let m = c.metrics();
        assert_eq!(m.two_qubit_depth, 2);
        assert_eq!(m.depth, 3);
        assert_eq!(m.total_gates, 9);
        assert_eq!(m.single_qubit_gates, 5);
        assert_eq!(m.two_qubit_gates, 4);
    }

    #[test]
    fn sequential_cnots() {
        let mut c = Circuit::new(2).unwrap();
        for _ in 0..3 {
            c.push(GateKind::CNOT, &[0, 1]).unwrap();
        }
        assert_eq!(c.metrics().depth, 3);
        assert_eq!(c.metrics().two_qubit_depth, 3);
    }

    #[test]
    fn push_rejects_bad_operands() {
        let mut c = Circuit::new(3).unwrap();
        assert!(matches!(
            c.push(GateKind::CZ, &[0]),
            Err(CircuitError::Arity { .. })
        ));
        assert!(matches!(
            c.push(GateKind::CZ, &[0, 3]),
            Err(CircuitError::WireOutOfRange { .. })
        ));
        assert!(matches!(
            c.push(GateKind::CSwap, &[1, 0, 1]),
            Err(CircuitError::RepeatedWire { .. })
        ));
        assert!(Circuit::new(0).is_err());
    }

    #[test]
    fn coupling_validation() {
        let line = CouplingMap::line(3);
        let mut c = Circuit::new(3).unwrap();
        assert!(c.validate(&line).unwrap().is_empty());
        c.push(GateKind::ISCZ, &[0, 1]).unwrap();
        assert!(c.validate(&line).unwrap().is_empty());
        c.push(GateKind::ISCZ, &[0, 2]).unwrap();
        let v = c.validate(&line).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].index, 1);
        assert_eq!(v[0].missing, vec![(0, 2)]);
        c.push(GateKind::CSwap, &[0, 1, 2]).unwrap();
        let v = c.validate(&line).unwrap();
        assert_eq!(v[1].missing, vec![(0, 2)]);
        assert!(c.validate(&CouplingMap::line(4)).is_err());
    }

    #[test]
    fn coupling_map_rejects_bad_edges() {
        assert!(CouplingMap::new(3, &[(0, 3)]).is_err());
        assert!(CouplingMap::new(3, &[(1, 1)]).is_err());
        let g = CouplingMap::grid(2, 3);
        assert!(g.has_edge(0, 3) && g.has_edge(4, 5) && !g.has_edge(2, 3));
        assert!(CouplingMap::ring(4).has_edge(3, 0));
    }

    #[test]
    fn json_round_trip_five_wire() {
        let mut c = five_wire_compiled();
        c.set_known_zero([0, 4]).unwrap();
        let back = Circuit::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn json_preserves_fsim_parameters() {
        let mut c = Circuit::new(2).unwrap();
        let theta = std::f64::consts::PI / 7.0;
        let phi = 0.1 + 1e-15;
        c.push(GateKind::FSim { theta, phi }, &[0, 1]).unwrap();
        let back = Circuit::from_json(&c.to_json()).unwrap();
        assert_eq!(back.gates()[0].kind, GateKind::FSim { theta, phi });
    }

    #[test]
    fn json_errors_name_the_field() {
        let text = r#"{"n": 2, "gates": [{"kind": "cz", "wires": [0,1]}, {"kind": "bogus", "wires": [0]}]}"#;
        let err = Circuit::from_json(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gates[1].kind"), "{msg}");
        assert!(msg.contains("bogus"), "{msg}");

        let err = Circuit::from_json("{\"n\": 2,\n \"gates\": [}").unwrap_err();
        assert!(matches!(err, CircuitError::Json { line: 2, .. }), "{err}");
    }

    #[test]
    fn coupling_map_json_round_trip() {
        let g = CouplingMap::grid(2, 2);
        assert_eq!(CouplingMap::from_json(&g.to_json()).unwrap(), g);
    }
}
