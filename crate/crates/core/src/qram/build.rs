use serde::Serialize;

use super::counts::GateCounts;
use super::layout::TreeLayout;
use super::schedule::{pipeline_schedule, PipelineOp, PipelineSchedule};
use super::QramSpec;
use crate::circuit::{Circuit, Instruction};
use crate::error::QramError;
use crate::gates::GateKind;

/// `S^dagger` powers owed by each bus value and the gates that pay them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PhaseCorrectionLedger {
    /// Per address bit: gates traversed on the way in and back out.
    pub address_traversals: Vec<u32>,
    /// Per data bit: traversals paid before the bus value is loaded.
    pub data_pre_copy: Vec<u32>,
    /// Per data bit: traversals paid after it is unloaded.
    pub data_post_copy: Vec<u32>,
    pub corrections: Vec<BusCorrection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BusCorrection {
    pub wire: usize,
    pub traversals: u32,
    /// Power of `S^dagger`, `traversals mod 4`.
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QramBuild {
    pub circuit: Circuit,
    pub layout: TreeLayout,
    pub schedule: PipelineSchedule,
    pub tally: GateCounts,
    pub ledger: PhaseCorrectionLedger,
    /// Bus-wire pairs of the `CZ`s left over by bidirectional exchanges.
    pub deferred_cz: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stage {
    Setting,
    Fetching,
}

struct Builder<'a> {
    spec: &'a QramSpec,
    t: TreeLayout,
    c: Circuit,
    tally: GateCounts,
    ext: bool,
}

impl Builder<'_> {
    fn push(&mut self, kind: GateKind, wires: &[usize]) {
        self.c
            .push(kind, wires)
            .expect("layout wires are in range and distinct");
    }

    /// A SWAP that only ever moves a value onto an empty register.
    fn move_swap(&mut self, x: usize, y: usize) {
        let kind = if self.ext {
            GateKind::ISwap
        } else {
            GateKind::SWAP
        };
        self.push(kind, &[x, y]);
    }

    fn move_cswap(&mut self, ctrl: usize, x: usize, y: usize) {
        let kind = if self.ext {
            GateKind::CISwap
        } else {
            GateKind::CSwap
        };
        self.push(kind, &[ctrl, x, y]);
    }

    fn count_pair(&mut self, stage: Stage, internal: bool) {
        match (stage, internal) {
            (Stage::Setting, true) => self.tally.setting_internal_pairs += 1,
            (Stage::Setting, false) => self.tally.setting_routing_pairs += 1,
            (Stage::Fetching, _) => self.tally.fetch_unidirectional_pairs += 1,
        }
        if self.ext {
            self.tally.ext1_savings += 1;
        }
    }

    fn route_down(&mut self, l: usize, stage: Stage) {
        for p in 0..1 << l {
            let (a, d) = (self.t.node_address(l, p), self.t.node_data(l, p));
            let (left, right) = (
                self.t.node_data(l + 1, 2 * p),
                self.t.node_data(l + 1, 2 * p + 1),
            );
            self.move_cswap(a, d, right);
            self.move_swap(d, left);
            self.count_pair(stage, false);
        }
    }

    fn route_up(&mut self, l: usize) {
        for p in 0..1 << l {
            let (a, d) = (self.t.node_address(l, p), self.t.node_data(l, p));
            let (left, right) = (
                self.t.node_data(l + 1, 2 * p),
                self.t.node_data(l + 1, 2 * p + 1),
            );
            self.move_swap(d, left);
            self.move_cswap(a, d, right);
            self.count_pair(Stage::Fetching, false);
        }
    }

    fn bidirectional(&mut self, l: usize) {
        for p in 0..1 << l {
            let (a, d) = (self.t.node_address(l, p), self.t.node_data(l, p));
            let (left, right) = (
                self.t.node_data(l + 1, 2 * p),
                self.t.node_data(l + 1, 2 * p + 1),
            );
            self.push(GateKind::X, &[a]);
            self.move_cswap(a, d, left);
            self.push(GateKind::X, &[a]);
            self.move_cswap(a, d, right);
            self.tally.fetch_bidirectional_pairs += 1;
            if self.ext {
                self.tally.ext2_savings += 1;
            }
        }
    }

    /// Moves the value that just reached layer `j` into its address register.
    fn internal_swap(&mut self, j: usize) {
        if j == 0 {
            let (a, d) = (self.t.node_address(0, 0), self.t.node_data(0, 0));
            self.push(GateKind::SWAP, &[a, d]);
            self.tally.setting_root_swaps += 1;
            return;
        }
        for p in 0..1 << (j - 1) {
            let parent = self.t.node_address(j - 1, p);
            self.move_swap(self.t.node_address(j, 2 * p), self.t.node_data(j, 2 * p));
            self.move_cswap(
                parent,
                self.t.node_address(j, 2 * p + 1),
                self.t.node_data(j, 2 * p + 1),
            );
            self.count_pair(Stage::Setting, true);
        }
    }

    /// Phase kickback of one memory bit column onto the leaf data registers.
    fn memory(&mut self, word: usize) {
        let l = self.t.n() - 1;
        for m in 0..1 << l {
            let (a, d) = (self.t.node_address(l, m), self.t.node_data(l, m));
            let bit = |cell: usize| self.spec.word_bit(self.spec.memory[cell], word);
            let (b0, b1) = (
                bit(self.t.memory_cell(m, false)),
                bit(self.t.memory_cell(m, true)),
            );
            match (b0, b1) {
                (false, false) => {}
                (true, true) => self.push(GateKind::Z, &[d]),
                (false, true) => self.push(GateKind::CZ, &[a, d]),
                (true, false) => {
                    self.push(GateKind::Z, &[d]);
                    self.push(GateKind::CZ, &[a, d]);
                }
            }
        }
    }

    fn sdag_power(&mut self, wire: usize, power: u32) {
        if let Some(g) = GateKind::from_sdag_power(power) {
            self.push(g, &[wire]);
        }
    }
}

/// Builds the full three-stage circuit for `spec`.
pub fn build_qram_circuit(spec: &QramSpec) -> Result<QramBuild, QramError> {
    spec.validate()?;
    let (n, k) = (spec.n, spec.k);
    let t = TreeLayout::new(n, k);
    let schedule = pipeline_schedule(spec)?;
    let mut b = Builder {
        spec,
        t,
        c: Circuit::new(t.n_wires())?,
        tally: GateCounts::default(),
        ext: spec.extensions,
    };
    let root = t.node_data(0, 0);
    let mut ledger = PhaseCorrectionLedger {
        address_traversals: vec![0; n],
        data_pre_copy: vec![0; k],
        data_post_copy: vec![0; k],
        corrections: Vec::new(),
    };

    // Address setting.
    let setting_start = b.c.len();
    for j in 0..n {
        b.push(GateKind::SWAP, &[t.address_bus(j), root]);
        for l in 0..j {
            b.route_down(l, Stage::Setting);
        }
        b.internal_swap(j);
        ledger.address_traversals[j] = 2 * (j + usize::from(j >= 1)) as u32;
    }
    let setting: Vec<Instruction> = b.c.gates()[setting_start..].to_vec();

    // Data fetch, in the Hadamard frame of the data bus.
    for w in 0..k {
        b.push(GateKind::H, &[t.data_bus(w)]);
    }
    if b.ext {
        for w in 0..k {
            ledger.data_pre_copy[w] = (n - 1) as u32;
            b.sdag_power(t.data_bus(w), ((n - 1) % 4) as u32);
        }
    }
    let mut deferred_cz = Vec::new();
    for op in schedule.ops() {
        match *op {
            PipelineOp::Load { word } | PipelineOp::Unload { word } => {
                b.push(GateKind::SWAP, &[t.data_bus(word), root]);
            }
            PipelineOp::Handoff { out, into } => {
                b.push(GateKind::SWAP, &[t.data_bus(out), root]);
                b.push(GateKind::SWAP, &[t.data_bus(into), root]);
            }
            PipelineOp::RouteDown { layer, .. } => {
                b.route_down(layer, Stage::Fetching);
                b.tally.fetch_routing_ops += 1;
            }
            PipelineOp::RouteUp { layer, .. } => {
                b.route_up(layer);
                b.tally.fetch_routing_ops += 1;
            }
            PipelineOp::Bidirectional { up, down, layer } => {
                b.bidirectional(layer);
                b.tally.fetch_routing_ops += 1;
                if b.ext {
                    deferred_cz.push((t.data_bus(up), t.data_bus(down)));
                }
            }
            PipelineOp::Memory { word } => b.memory(word),
        }
    }
    if b.ext {
        for w in 0..k {
            ledger.data_post_copy[w] = (n - 1) as u32;
            b.sdag_power(t.data_bus(w), ((n - 1) % 4) as u32);
        }
        for &(x, y) in &deferred_cz {
            b.push(GateKind::CZ, &[x, y]);
        }
        b.tally.cz_on_qpu = deferred_cz.len();
    }
    for w in 0..k {
        b.push(GateKind::H, &[t.data_bus(w)]);
    }

    // Uncompute: the setting gates in reverse order, then address corrections.
    for g in setting.iter().rev() {
        b.push(g.kind, &g.wires);
    }
    b.tally.uncompute_internal_pairs = b.tally.setting_internal_pairs;
    b.tally.uncompute_routing_pairs = b.tally.setting_routing_pairs;
    b.tally.uncompute_root_swaps = b.tally.setting_root_swaps;
    if b.ext {
        b.tally.ext1_savings += b.tally.uncompute_internal_pairs + b.tally.uncompute_routing_pairs;
        for j in 0..n {
            let traversals = ledger.address_traversals[j];
            b.sdag_power(t.address_bus(j), traversals % 4);
        }
    }

    if b.ext {
        let data = (0..k).flat_map(|w| {
            let wire = t.data_bus(w);
            [ledger.data_pre_copy[w], ledger.data_post_copy[w]].map(|tr| BusCorrection {
                wire,
                traversals: tr,
                power: tr % 4,
            })
        });
        let address = (0..n).map(|j| {
            let tr = ledger.address_traversals[j];
            BusCorrection {
                wire: t.address_bus(j),
                traversals: tr,
                power: tr % 4,
            }
        });
        ledger.corrections = data.chain(address).collect();
    }

    Ok(QramBuild {
        circuit: b.c,
        layout: t,
        schedule,
        tally: b.tally,
        ledger,
        deferred_cz,
    })
}
