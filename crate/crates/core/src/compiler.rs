//! SWAP-network compilation into `iSCZ` / `iSWAP` + `CZ` networks.
//!
//! Replacing `SWAP(a, b)` by `iSCZ(a, b)` leaves one `S^dagger` owed on each
//! of the two exchanged values. Those debts are counted per wire in a
//! [`PhaseLedger`]; because the counters are swapped along with the values,
//! every debt ends on the wire where its value finishes, and one trailing
//! layer of `S^dagger`/`Z`/`S` gates settles all of them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CouplingMap};
use crate::error::{CircuitError, CompileError};
use crate::gates::{max_abs_diff, GateKind};
use crate::sim::circuit_unitary;

/// Ordered list of SWAPs over `n` wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapPath {
    n_wires: usize,
    pairs: Vec<(usize, usize)>,
}

impl SwapPath {
    pub fn new(n_wires: usize, pairs: Vec<(usize, usize)>) -> Result<Self, CompileError> {
        if n_wires == 0 {
            return Err(CircuitError::NoWires.into());
        }
        for (index, &(a, b)) in pairs.iter().enumerate() {
            for w in [a, b] {
                if w >= n_wires {
                    return Err(CompileError::WireOutOfRange {
                        index,
                        wire: w,
                        n_wires,
                    });
                }
            }
            if a == b {
                return Err(CompileError::SelfSwap { index, wire: a });
            }
        }
        Ok(SwapPath { n_wires, pairs })
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `final_wire[v]`: where the value that started on wire `v` ends up.
    pub fn final_positions(&self) -> Vec<usize> {
        let mut pos: Vec<usize> = (0..self.n_wires).collect();
        let mut holder: Vec<usize> = (0..self.n_wires).collect();
        for &(a, b) in &self.pairs {
            holder.swap(a, b);
            pos[holder[a]] = a;
            pos[holder[b]] = b;
        }
        pos
    }

    /// `holder[w]`: which starting value sits on wire `w` at the end.
    pub fn final_arrangement(&self) -> Vec<usize> {
        let mut holder: Vec<usize> = (0..self.n_wires).collect();
        for &(a, b) in &self.pairs {
            holder.swap(a, b);
        }
        holder
    }

    /// The literal SWAP circuit.
    pub fn reference_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.n_wires).expect("validated wire count");
        for &(a, b) in &self.pairs {
            c.push(GateKind::SWAP, &[a, b]).expect("validated operands");
        }
        c
    }

    /// Fails on the first SWAP that is not an edge of `map`.
    pub fn check_edges(&self, map: &CouplingMap) -> Result<(), CompileError> {
        if map.n_wires() != self.n_wires {
            return Err(CircuitError::WireCountMismatch {
                circuit: self.n_wires,
                map: map.n_wires(),
            }
            .into());
        }
        for (index, &(a, b)) in self.pairs.iter().enumerate() {
            if !map.has_edge(a, b) {
                return Err(CompileError::NotAnEdge { index, a, b });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let raw = RawPath {
            n: self.n_wires,
            path: self.pairs.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("path serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, CompileError> {
        let raw: RawPath = serde_json::from_str(text)
            .map_err(|e| CompileError::Circuit(CircuitError::from_json(e)))?;
        SwapPath::new(raw.n, raw.path.iter().map(|p| (p[0], p[1])).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct RawPath {
    n: usize,
    path: Vec<[usize; 2]>,
}

/// Per-wire count of owed `S^dagger` gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseLedger {
    counts: Vec<u32>,
}

impl PhaseLedger {
    pub fn new(n_wires: usize) -> Self {
        PhaseLedger {
            counts: vec![0; n_wires],
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// One `iSCZ` on `(a, b)`: both values owe one more `S^dagger`, and the
    /// counters follow the values.
    pub fn record_swap(&mut self, a: usize, b: usize) {
        self.counts[a] += 1;
        self.counts[b] += 1;
        self.counts.swap(a, b);
    }

    /// A bare `iSWAP` moving the value on `from` onto a `|0>` wire `to`.
    pub fn record_move(&mut self, from: usize, to: usize) {
        self.counts[from] += 1;
        self.counts.swap(from, to);
    }

    /// Reduced powers `count mod 4`.
    pub fn powers(&self) -> Vec<u32> {
        self.counts.iter().map(|c| c % 4).collect()
    }

    /// The correction gate on each wire: 1 -> Sdag, 2 -> Z, 3 -> S, 0 -> none.
    pub fn layer(&self) -> Vec<Option<GateKind>> {
        self.counts
            .iter()
            .map(|&c| GateKind::from_sdag_power(c))
            .collect()
    }

    /// Appends the correction layer to `circuit`; returns the gate count.
    pub fn emit(&self, circuit: &mut Circuit) -> Result<usize, CircuitError> {
        let mut emitted = 0;
        for (w, g) in self.layer().into_iter().enumerate() {
            if let Some(g) = g {
                circuit.push(g, &[w])?;
                emitted += 1;
            }
        }
        Ok(emitted)
    }
}

/// One `iSCZ` per SWAP, then a single phase layer.
pub fn compile_iscz(path: &SwapPath) -> (Circuit, PhaseLedger) {
    let mut c = Circuit::new(path.n_wires).expect("validated wire count");
    let mut ledger = PhaseLedger::new(path.n_wires);
    for &(a, b) in &path.pairs {
        c.push(GateKind::ISCZ, &[a, b]).expect("validated operands");
        ledger.record_swap(a, b);
    }
    ledger.emit(&mut c).expect("phase layer wires are valid");
    (c, ledger)
}

/// Same as [`compile_iscz`] with each `iSCZ` split into `iSWAP` then `CZ`,
/// for hardware without the fused gate.
pub fn compile_iswap_cz(path: &SwapPath) -> (Circuit, PhaseLedger) {
    let mut c = Circuit::new(path.n_wires).expect("validated wire count");
    let mut ledger = PhaseLedger::new(path.n_wires);
    for &(a, b) in &path.pairs {
        c.push(GateKind::ISwap, &[a, b])
            .expect("validated operands");
        c.push(GateKind::CZ, &[a, b]).expect("validated operands");
        ledger.record_swap(a, b);
    }
    ledger.emit(&mut c).expect("phase layer wires are valid");
    (c, ledger)
}

/// Textbook decomposition: `SWAP(a, b) = CNOT(a,b) CNOT(b,a) CNOT(a,b)`.
pub fn compile_cnot_baseline(path: &SwapPath) -> Circuit {
    let mut c = Circuit::new(path.n_wires).expect("validated wire count");
    for &(a, b) in &path.pairs {
        for (x, y) in [(a, b), (b, a), (a, b)] {
            c.push(GateKind::CNOT, &[x, y]).expect("validated operands");
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ext1Output {
    pub circuit: Circuit,
    pub ledger: PhaseLedger,
    /// Wires holding `|0>` once the network has run.
    pub zero_wires: BTreeSet<usize>,
    /// Number of SWAPs realised by a bare `iSWAP`.
    pub bare_iswaps: usize,
    /// Number of SWAPs between two `|0>` wires, dropped entirely.
    pub dropped: usize,
}

/// Zero-state tracking: a SWAP with exactly one `|0>` side needs no `CZ`
/// (`b xor 0 = b`), and a SWAP of two `|0>` wires needs nothing.
///
/// The output circuit records `known_zero` as metadata; it is only
/// equivalent to the SWAP network on inputs where those wires are `|0>`.
pub fn compile_ext1(
    path: &SwapPath,
    known_zero: &BTreeSet<usize>,
) -> Result<Ext1Output, CompileError> {
    let mut c = Circuit::new(path.n_wires)?;
    c.set_known_zero(known_zero.iter().copied())?;
    let mut zero = known_zero.clone();
    let mut ledger = PhaseLedger::new(path.n_wires);
    let mut bare_iswaps = 0;
    let mut dropped = 0;
    for &(a, b) in &path.pairs {
        match (zero.contains(&a), zero.contains(&b)) {
            (true, true) => dropped += 1,
            (false, false) => {
                c.push(GateKind::ISCZ, &[a, b])?;
                ledger.record_swap(a, b);
            }
            (a_zero, _) => {
                let (data, empty) = if a_zero { (b, a) } else { (a, b) };
                c.push(GateKind::ISwap, &[a, b])?;
                ledger.record_move(data, empty);
                zero.remove(&empty);
                zero.insert(data);
                bare_iswaps += 1;
            }
        }
    }
    ledger.emit(&mut c)?;
    Ok(Ext1Output {
        circuit: c,
        ledger,
        zero_wires: zero,
        bare_iswaps,
        dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CzPolicy {
    Earliest,
    Latest,
}

/// The `CZ` half of a SWAP, bound to the two values it exchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PendingCz {
    pub swap_index: usize,
    /// Values identified by their starting wire.
    pub values: (usize, usize),
    /// Step at which the `CZ` was emitted: step `t` sits just before swap
    /// `t`, step `m` after the last swap.
    pub resolved_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ext2Output {
    pub circuit: Circuit,
    pub ledger: PhaseLedger,
    pub pending: Vec<PendingCz>,
}

/// `positions[t][v]`: wire holding value `v` after the first `t` swaps.
fn position_history(path: &SwapPath) -> Vec<Vec<usize>> {
    let n = path.n_wires;
    let mut pos: Vec<usize> = (0..n).collect();
    let mut holder: Vec<usize> = (0..n).collect();
    let mut out = vec![pos.clone()];
    for &(a, b) in &path.pairs {
        holder.swap(a, b);
        pos[holder[a]] = a;
        pos[holder[b]] = b;
        out.push(pos.clone());
    }
    out
}

/// For every SWAP, the steps at which its two values sit on coupled wires.
pub fn legal_cz_steps(path: &SwapPath, map: &CouplingMap) -> Result<Vec<Vec<usize>>, CompileError> {
    path.check_edges(map)?;
    let history = position_history(path);
    let mut out = Vec::with_capacity(path.len());
    for (index, &(a, b)) in path.pairs.iter().enumerate() {
        let before = &history[index];
        let (va, vb) = (holder_of(before, a), holder_of(before, b));
        let steps: Vec<usize> = history
            .iter()
            .enumerate()
            .filter(|(_, pos)| map.has_edge(pos[va], pos[vb]))
            .map(|(t, _)| t)
            .collect();
        if steps.is_empty() {
            return Err(CompileError::Unschedulable { index });
        }
        out.push(steps);
    }
    Ok(out)
}

fn holder_of(pos: &[usize], wire: usize) -> usize {
    pos.iter()
        .position(|&p| p == wire)
        .expect("positions form a permutation")
}

/// Deferred/advanced `CZ` scheduling with a fixed policy.
///
/// Ties inside a step are emitted in order of the lowest wire index.
pub fn compile_ext2(
    path: &SwapPath,
    map: &CouplingMap,
    policy: CzPolicy,
) -> Result<Ext2Output, CompileError> {
    let legal = legal_cz_steps(path, map)?;
    let steps: Vec<usize> = legal
        .iter()
        .map(|s| match policy {
            CzPolicy::Earliest => s[0],
            CzPolicy::Latest => *s.last().expect("non-empty"),
        })
        .collect();
    compile_ext2_with_schedule(path, map, &steps)
}

/// Emits each SWAP as an `iSWAP` and its `CZ` at the given step.
pub fn compile_ext2_with_schedule(
    path: &SwapPath,
    map: &CouplingMap,
    steps: &[usize],
) -> Result<Ext2Output, CompileError> {
    path.check_edges(map)?;
    if steps.len() != path.len() {
        return Err(CompileError::ScheduleLength {
            expected: path.len(),
            found: steps.len(),
        });
    }
    let history = position_history(path);
    let m = path.len();
    let mut pending = Vec::with_capacity(m);
    for (index, &(a, b)) in path.pairs.iter().enumerate() {
        let before = &history[index];
        let values = (holder_of(before, a), holder_of(before, b));
        let step = steps[index];
        if step > m || !map.has_edge(history[step][values.0], history[step][values.1]) {
            return Err(CompileError::IllegalPlacement { index, step });
        }
        pending.push(PendingCz {
            swap_index: index,
            values,
            resolved_at: Some(step),
        });
    }

    let mut c = Circuit::new(path.n_wires)?;
    let mut ledger = PhaseLedger::new(path.n_wires);
    for (t, pos) in history.iter().enumerate() {
        let mut here: Vec<(usize, usize)> = pending
            .iter()
            .filter(|p| p.resolved_at == Some(t))
            .map(|p| {
                let (x, y) = (pos[p.values.0], pos[p.values.1]);
                (x.min(y), x.max(y))
            })
            .collect();
        here.sort_unstable();
        for (x, y) in here {
            c.push(GateKind::CZ, &[x, y])?;
        }
        if t < m {
            let (a, b) = path.pairs[t];
            c.push(GateKind::ISwap, &[a, b])?;
            ledger.record_swap(a, b);
        }
    }
    ledger.emit(&mut c)?;
    Ok(Ext2Output {
        circuit: c,
        ledger,
        pending,
    })
}

/// Phase powers obtained by commuting each pair of `S^dagger` through the
/// remainder of the network: the debt of swap `g` on wire `A_g` lands on the
/// image of `A_g` under swaps `g+1..m`.
pub fn conjugation_phase_powers(path: &SwapPath) -> Vec<u32> {
    let mut powers = vec![0u32; path.n_wires];
    for (g, &(a, b)) in path.pairs.iter().enumerate() {
        for start in [a, b] {
            let mut w = start;
            for &(x, y) in &path.pairs[g + 1..] {
                if w == x {
                    w = y;
                } else if w == y {
                    w = x;
                }
            }
            powers[w] += 1;
        }
    }
    powers.iter().map(|p| p % 4).collect()
}

/// Largest entrywise deviation between `compiled` and the SWAP network.
///
/// With `zero_wires`, only columns whose inputs have those wires in `|0>`
/// are compared.
pub fn verify_equivalence(
    reference: &SwapPath,
    compiled: &Circuit,
    zero_wires: Option<&BTreeSet<usize>>,
) -> Result<f64, CompileError> {
    let n = reference.n_wires;
    if compiled.n_wires() != n {
        return Err(CircuitError::WireCountMismatch {
            circuit: compiled.n_wires(),
            map: n,
        }
        .into());
    }
    let want = circuit_unitary(&reference.reference_circuit())?;
    let got = circuit_unitary(compiled)?;
    let Some(zero) = zero_wires.filter(|z| !z.is_empty()) else {
        return Ok(max_abs_diff(&want, &got));
    };
    let mask: usize = zero.iter().map(|&w| 1usize << (n - 1 - w)).sum();
    let mut dev: f64 = 0.0;
    for col in (0..1usize << n).filter(|c| c & mask == 0) {
        for row in 0..1usize << n {
            dev = dev.max((want[(row, col)] - got[(row, col)]).norm());
        }
    }
    Ok(dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{gate_matrix, kron, Matrix};

    fn path(n: usize, pairs: &[(usize, usize)]) -> SwapPath {
        SwapPath::new(n, pairs.to_vec()).unwrap()
    }

    #[test]
    fn five_wire_phase_array() {
        let p = path(5, &[(0, 1), (2, 3), (1, 2), (3, 4)]);
        let (c, ledger) = compile_iscz(&p);
        assert_eq!(ledger.counts(), &[1, 2, 2, 1, 2]);
        use GateKind::*;
        assert_eq!(
            ledger.layer(),
            vec![Some(Sdag), Some(Z), Some(Z), Some(Sdag), Some(Z)]
        );
        assert_eq!(c.len(), 9);
        assert!(verify_equivalence(&p, &c, None).unwrap() < 1e-10);
    }

    #[test]
    fn empty_path() {
        let p = path(3, &[]);
        let (c, ledger) = compile_iscz(&p);
        assert!(c.is_empty());
        assert_eq!(ledger.counts(), &[0, 0, 0]);
        assert!(compile_cnot_baseline(&p).is_empty());
    }

    #[test]
    fn single_swap() {
        let p = path(2, &[(0, 1)]);
        let (c, _) = compile_iscz(&p);
        let kinds: Vec<_> = c.gates().iter().map(|g| g.kind).collect();
        assert_eq!(kinds, vec![GateKind::ISCZ, GateKind::Sdag, GateKind::Sdag]);
        assert!(verify_equivalence(&p, &c, None).unwrap() < 1e-12);
    }

    /// Brute-force the unique diagonal layer `D` of single-qubit powers of
    /// `S^dagger` with `D . N = P` for the bare iSCZ network `N`.
    fn solve_phase_layer(p: &SwapPath) -> Vec<Vec<u32>> {
        let n = p.n_wires();
        let mut net = Circuit::new(n).unwrap();
        for &(a, b) in p.pairs() {
            net.push(GateKind::ISCZ, &[a, b]).unwrap();
        }
        let nu = circuit_unitary(&net).unwrap();
        let pu = circuit_unitary(&p.reference_circuit()).unwrap();
        let sd = gate_matrix(GateKind::Sdag);
        let power = |k: u32| -> Matrix {
            let mut m = Matrix::identity(2, 2);
            for _ in 0..k {
                m = &m * &sd;
            }
            m
        };
        let mut solutions = Vec::new();
        for code in 0..4u32.pow(n as u32) {
            let powers: Vec<u32> = (0..n).map(|w| code / 4u32.pow(w as u32) % 4).collect();
            let mut d = Matrix::identity(1, 1);
            for &k in &powers {
                d = kron(&d, &power(k));
            }
            if max_abs_diff(&(d * &nu), &pu) < 1e-10 {
                solutions.push(powers);
            }
        }
        solutions
    }

    #[test]
    fn three_wire_ledger_matches_matrix_oracle() {
        let p = path(3, &[(0, 1), (1, 2), (0, 1)]);
        let solutions = solve_phase_layer(&p);
        assert_eq!(solutions.len(), 1);
        let (_, ledger) = compile_iscz(&p);
        assert_eq!(ledger.powers(), solutions[0]);
        assert_eq!(solutions[0], vec![2, 2, 2]);
    }

    #[test]
    fn five_wire_ledger_matches_matrix_oracle() {
        let p = path(5, &[(0, 1), (2, 3), (1, 2), (3, 4)]);
        assert_eq!(solve_phase_layer(&p), vec![vec![1, 2, 2, 1, 2]]);
    }

    #[test]
    fn cnot_baseline_counts() {
        let p = path(2, &[(0, 1)]);
        let c = compile_cnot_baseline(&p);
        assert_eq!(c.metrics().two_qubit_gates, 3);
        assert_eq!(c.metrics().two_qubit_depth, 3);
        assert!(verify_equivalence(&p, &c, None).unwrap() < 1e-12);
        let p = path(4, &[(0, 1), (2, 3), (1, 2), (0, 1), (2, 3)]);
        assert_eq!(compile_cnot_baseline(&p).metrics().two_qubit_gates, 15);
    }

    #[test]
    fn iswap_cz_split_is_equivalent() {
        let p = path(4, &[(0, 1), (2, 3), (1, 2), (0, 1)]);
        let (c, ledger) = compile_iswap_cz(&p);
        assert_eq!(ledger, compile_iscz(&p).1);
        assert!(verify_equivalence(&p, &c, None).unwrap() < 1e-10);
    }

    #[test]
    fn dropping_phase_layer_is_detected() {
        let p = path(3, &[(0, 1), (1, 2)]);
        let mut bare = Circuit::new(3).unwrap();
        for &(a, b) in p.pairs() {
            bare.push(GateKind::ISCZ, &[a, b]).unwrap();
        }
        assert!(verify_equivalence(&p, &bare, None).unwrap() >= 1.0);
    }

    #[test]
    fn ext1_reversal_with_zero_end() {
        // [a0, a1, a2] -> [a2, a1, a0] on a line with a0 = |0>.
        let p = path(3, &[(0, 1), (1, 2), (0, 1)]);
        let zero: BTreeSet<usize> = [0].into();
        let out = compile_ext1(&p, &zero).unwrap();
        let kinds: Vec<_> = out
            .circuit
            .gates()
            .iter()
            .filter(|g| g.wires.len() == 2)
            .map(|g| g.kind)
            .collect();
        // The two SWAPs that move a0 become bare iSWAPs.
        assert_eq!(
            kinds,
            vec![GateKind::ISwap, GateKind::ISwap, GateKind::ISCZ]
        );
        assert_eq!(out.bare_iswaps, 2);
        assert_eq!(out.zero_wires, [2].into());
        // a1 and a2 each picked up an extra phase.
        assert!(verify_equivalence(&p, &out.circuit, Some(&zero)).unwrap() < 1e-10);
        assert!(verify_equivalence(&p, &out.circuit, None).unwrap() > 0.5);
    }

    #[test]
    fn ext1_both_zero_drops_gate() {
        let p = path(2, &[(0, 1)]);
        let zero: BTreeSet<usize> = [0, 1].into();
        let out = compile_ext1(&p, &zero).unwrap();
        assert!(out.circuit.is_empty());
        assert_eq!(out.dropped, 1);
        assert!(verify_equivalence(&p, &out.circuit, Some(&zero)).unwrap() < 1e-12);
    }

    #[test]
    fn ext1_without_zeros_matches_plain_compile() {
        let p = path(4, &[(0, 1), (2, 3), (1, 2)]);
        let out = compile_ext1(&p, &BTreeSet::new()).unwrap();
        let (c, ledger) = compile_iscz(&p);
        assert_eq!(out.circuit, c);
        assert_eq!(out.ledger, ledger);
    }

    #[test]
    fn ext2_single_swap_earliest_is_at_the_swap() {
        let p = path(2, &[(0, 1)]);
        let out = compile_ext2(&p, &CouplingMap::line(2), CzPolicy::Earliest).unwrap();
        assert_eq!(out.pending[0].resolved_at, Some(0));
        let kinds: Vec<_> = out.circuit.gates().iter().map(|g| g.kind).collect();
        assert_eq!(kinds[..2], [GateKind::CZ, GateKind::ISwap]);
        assert!(verify_equivalence(&p, &out.circuit, None).unwrap() < 1e-12);
    }

    #[test]
    fn ext2_delayed_cz() {
        // The first exchange keeps only its iSWAP; its CZ waits until the
        // two values are neighbours again.
        let p = path(3, &[(1, 2), (0, 1), (1, 2)]);
        let map = CouplingMap::line(3);
        let legal = legal_cz_steps(&p, &map).unwrap();
        assert_eq!(legal[0], vec![0, 1, 3]);
        let out = compile_ext2(&p, &map, CzPolicy::Latest).unwrap();
        assert_eq!(out.pending[0].resolved_at, Some(3));
        assert!(verify_equivalence(&p, &out.circuit, None).unwrap() < 1e-10);
    }

    #[test]
    fn ext2_exhaustive_insertion_points() {
        let p = path(3, &[(0, 1), (1, 2), (0, 1)]);
        let map = CouplingMap::line(3);
        let legal = legal_cz_steps(&p, &map).unwrap();
        let mut combos = vec![vec![]];
        for options in &legal {
            combos = combos
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    options.iter().map(move |&s| {
                        let mut v = prefix.clone();
                        v.push(s);
                        v
                    })
                })
                .collect();
        }
        assert!(combos.len() > 1);
        for steps in combos {
            let out = compile_ext2_with_schedule(&p, &map, &steps).unwrap();
            assert!(out.circuit.validate(&map).unwrap().is_empty());
            let dev = verify_equivalence(&p, &out.circuit, None).unwrap();
            assert!(dev < 1e-10, "{steps:?}: {dev}");
        }
        let latest = compile_ext2(&p, &map, CzPolicy::Latest).unwrap();
        assert!(verify_equivalence(&p, &latest.circuit, None).unwrap() < 1e-10);
    }

    #[test]
    fn ext2_rejects_illegal_steps_and_non_edges() {
        let p = path(3, &[(0, 1), (1, 2)]);
        let map = CouplingMap::line(3);
        // Swap 0 exchanges values 0 and 1; after swap 1, value 0 sits on
        // wire 2 and value 1 on wire 0, which are not coupled.
        assert!(matches!(
            compile_ext2_with_schedule(&p, &map, &[2, 1]),
            Err(CompileError::IllegalPlacement { index: 0, step: 2 })
        ));
        assert!(matches!(
            compile_ext2_with_schedule(&p, &map, &[0]),
            Err(CompileError::ScheduleLength { .. })
        ));
        let far = path(3, &[(0, 2)]);
        assert!(matches!(
            compile_ext2(&far, &map, CzPolicy::Earliest),
            Err(CompileError::NotAnEdge { index: 0, .. })
        ));
    }

    #[test]
    fn conjugation_rule_on_five_wire_example() {
        let p = path(5, &[(0, 1), (2, 3), (1, 2), (3, 4)]);
        assert_eq!(conjugation_phase_powers(&p), vec![1, 2, 2, 1, 2]);
    }

    #[test]
    fn path_validation_and_json() {
        assert!(matches!(
            SwapPath::new(2, vec![(0, 2)]),
            Err(CompileError::WireOutOfRange { .. })
        ));
        assert!(matches!(
            SwapPath::new(2, vec![(1, 1)]),
            Err(CompileError::SelfSwap { .. })
        ));
        let p = path(4, &[(0, 1), (2, 3)]);
        assert_eq!(SwapPath::from_json(&p.to_json()).unwrap(), p);
        let parsed = SwapPath::from_json(r#"{"n": 3, "path": [[0, 1], [1, 2]]}"#).unwrap();
        assert_eq!(parsed.pairs(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn final_positions_track_values() {
        let p = path(3, &[(0, 1), (1, 2)]);
        assert_eq!(p.final_positions(), vec![2, 0, 1]);
        assert_eq!(p.final_arrangement(), vec![1, 2, 0]);
    }

    #[test]
    fn phase_layer_single_qubit_bound() {
        let p = path(2, &[(0, 1)]);
        let (c, _) = compile_iscz(&p);
        let m = c.metrics();
        // One SWAP already needs two corrections: min(2m, n) = 2.
        assert_eq!(m.single_qubit_gates, 2);
    }
}
