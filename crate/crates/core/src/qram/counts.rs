use serde::Serialize;

use super::build::build_qram_circuit;
use super::compensation::ext2_compensation_plan;
use super::QramSpec;
use crate::error::QramError;

/// Gate-pair tallies of an `(n, k)` QRAM. A pair is one (SWAP, C-SWAP) per
/// parent node for Internal-SWAP and unidirectional Routing, or one
/// (C-SWAP, C-SWAP) for bidirectional Routing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub setting_internal_pairs: usize,
    pub setting_routing_pairs: usize,
    pub setting_root_swaps: usize,
    pub fetch_routing_ops: usize,
    pub fetch_unidirectional_pairs: usize,
    pub fetch_bidirectional_pairs: usize,
    pub uncompute_internal_pairs: usize,
    pub uncompute_routing_pairs: usize,
    pub uncompute_root_swaps: usize,
    pub ext1_savings: usize,
    pub ext2_savings: usize,
    pub cz_on_qpu: usize,
    pub ccz: usize,
    pub extra_memory_cells: usize,
}

impl GateCounts {
    pub fn internal_pairs(&self) -> usize {
        self.setting_internal_pairs + self.uncompute_internal_pairs
    }

    pub fn root_swaps(&self) -> usize {
        self.setting_root_swaps + self.uncompute_root_swaps
    }

    pub fn setting_uncompute_routing_pairs(&self) -> usize {
        self.setting_routing_pairs + self.uncompute_routing_pairs
    }

    /// `(label, value)` rows in table order.
    pub fn rows(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("setting: Internal-SWAP pairs", self.setting_internal_pairs),
            ("setting: root SWAPs", self.setting_root_swaps),
            ("setting: Routing pairs", self.setting_routing_pairs),
            ("fetching: Routing operations", self.fetch_routing_ops),
            (
                "fetching: unidirectional pairs",
                self.fetch_unidirectional_pairs,
            ),
            (
                "fetching: bidirectional pairs",
                self.fetch_bidirectional_pairs,
            ),
            (
                "uncomputing: Internal-SWAP pairs",
                self.uncompute_internal_pairs,
            ),
            ("uncomputing: root SWAPs", self.uncompute_root_swaps),
            ("uncomputing: Routing pairs", self.uncompute_routing_pairs),
            ("extension 1 savings", self.ext1_savings),
            ("extension 2 savings", self.ext2_savings),
            ("CZ on QPU", self.cz_on_qpu),
            ("CCZ", self.ccz),
            ("extra memory cells", self.extra_memory_cells),
        ]
    }
}

/// `sum_{i=1}^{k-1} min(i, n-1)`: Routing pairs merged by pipelining.
pub fn f_closed_form(n: usize, k: usize) -> usize {
    (1..k).map(|i| i.min(n - 1)).sum()
}

/// Every count evaluated from its closed form.
pub fn closed_form_counts(n: usize, k: usize) -> GateCounts {
    let p = 1usize << n;
    let f = f_closed_form(n, k);
    let uni: usize = (1..n).map(|i| (1 << (n - i)) * i.min(k)).sum();
    let bi: usize = (1..n).map(|i| (1 << (n - i - 1)) * (k - i.min(k))).sum();
    GateCounts {
        setting_internal_pairs: (p - 2) / 2,
        setting_routing_pairs: p - n - 1,
        setting_root_swaps: 1,
        fetch_routing_ops: 2 * (n - 1) * k - f,
        fetch_unidirectional_pairs: uni,
        fetch_bidirectional_pairs: bi,
        uncompute_internal_pairs: (p - 2) / 2,
        uncompute_routing_pairs: p - n - 1,
        uncompute_root_swaps: 1,
        ext1_savings: 3 * p - 2 * n - 4 + uni,
        ext2_savings: bi,
        cz_on_qpu: (0..k).map(|i| i.min(n - 1)).sum(),
        ccz: k - 1,
        extra_memory_cells: k - 1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateCountReport {
    pub n: usize,
    pub k: usize,
    pub closed_form: GateCounts,
    /// Tallies of the pipelined build with both extensions; `ccz` and
    /// `extra_memory_cells` come from the compensation plan.
    pub tallied: GateCounts,
}

impl GateCountReport {
    pub fn matches(&self) -> bool {
        self.closed_form == self.tallied
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut s = format!(
            "({}, {})-QRAM\n{:<34} {:>11} {:>8}\n",
            self.n, self.k, "operation", "closed form", "tallied"
        );
        for ((label, want), (_, got)) in
            self.closed_form.rows().into_iter().zip(self.tallied.rows())
        {
            let mark = if want == got { "" } else { "  MISMATCH" };
            s.push_str(&format!("{label:<34} {want:>11} {got:>8}{mark}\n"));
        }
        s
    }
}

/// Closed forms next to the tallies of an actual build.
pub fn count_gates(spec: &QramSpec) -> Result<GateCountReport, QramError> {
    spec.validate()?;
    let tuned = spec.clone().with_options(true, true);
    let build = build_qram_circuit(&tuned)?;
    let plan = ext2_compensation_plan(spec.n, spec.k);
    let mut tallied = build.tally;
    tallied.ccz = plan.ccz_count();
    tallied.extra_memory_cells = plan.extra_memory_cells();
    Ok(GateCountReport {
        n: spec.n,
        k: spec.k,
        closed_form: closed_form_counts(spec.n, spec.k),
        tallied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateKind;

    #[test]
    fn worked_values() {
        let c = closed_form_counts(2, 1);
        assert_eq!(c.internal_pairs(), 2);
        assert_eq!(c.root_swaps(), 2);
        assert_eq!(f_closed_form(3, 2), 1);
        assert_eq!(closed_form_counts(3, 2).fetch_routing_ops, 7);
        assert_eq!(f_closed_form(2, 3), 2);
        let c = closed_form_counts(3, 3);
        assert_eq!(c.cz_on_qpu, 3);
        assert_eq!(c.ccz, 2);
    }

    #[test]
    fn tallies_match_closed_forms() {
        for n in 1..=4 {
            for k in 1..=4 {
                let r = count_gates(&QramSpec::zeroed(n, k).unwrap()).unwrap();
                assert!(r.matches(), "{}", r.to_table());
            }
        }
    }

    #[test]
    fn tallies_match_gate_kinds() {
        for n in 1..=4 {
            for k in 1..=3 {
                let spec = QramSpec::zeroed(n, k).unwrap();
                let b = build_qram_circuit(&spec).unwrap();
                let count = |kind| b.circuit.gates().iter().filter(|g| g.kind == kind).count();
                let t = b.tally;
                let uni_like = t.internal_pairs()
                    + t.setting_uncompute_routing_pairs()
                    + t.fetch_unidirectional_pairs;
                assert_eq!(count(GateKind::ISwap), uni_like);
                assert_eq!(
                    count(GateKind::CISwap),
                    uni_like + 2 * t.fetch_bidirectional_pairs
                );
                assert_eq!(count(GateKind::SWAP), t.root_swaps() + 2 * n + 2 * k);
                assert_eq!(count(GateKind::CZ), t.cz_on_qpu);
                assert_eq!(count(GateKind::CSwap), 0);
            }
        }
    }

    #[test]
    fn table_lists_every_row() {
        let r = count_gates(&QramSpec::zeroed(2, 2).unwrap()).unwrap();
        assert_eq!(r.to_table().lines().count(), 2 + 14);
        assert!(!r.to_table().contains("MISMATCH"));
    }
}
