//! Bookkeeping for deferring the `CZ` of bidirectional exchanges when the
//! memory step XORs the word into the data register.
//!
//! Word `i` meets `n' = min(i, n-1)` earlier words inside the tree, which by
//! then hold `d_j xor m_j`. Skipping the exchange `CZ`s leaves the phase
//! `(-1)^{d_i * sum_j (d_{i-j} + m_{i-j})}`. It splits into one bus `CZ` per
//! met word and one `CCZ` reading an extra memory cell that stores the
//! parity of the met memory bits.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum CompensationOp {
    /// Bus `CZ` between words `word` and `partner`.
    Cz { word: usize, partner: usize },
    /// `CCZ` on word `word` controlled by the leaf address and the extra
    /// memory cell `cell`.
    Ccz { word: usize, cell: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompensationPlan {
    pub n: usize,
    pub k: usize,
    pub ops: Vec<CompensationOp>,
    /// `parity_sources[c]`: words whose memory bits cell `c` sums.
    pub parity_sources: Vec<Vec<usize>>,
}

pub fn ext2_compensation_plan(n: usize, k: usize) -> CompensationPlan {
    let mut ops = Vec::new();
    let mut parity_sources = Vec::new();
    for i in 1..k {
        let met = i.min(n - 1);
        for j in 1..=met {
            ops.push(CompensationOp::Cz {
                word: i,
                partner: i - j,
            });
        }
        ops.push(CompensationOp::Ccz {
            word: i,
            cell: parity_sources.len(),
        });
        parity_sources.push((i - met..i).collect());
    }
    CompensationPlan {
        n,
        k,
        ops,
        parity_sources,
    }
}

impl CompensationPlan {
    pub fn cz_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, CompensationOp::Cz { .. }))
            .count()
    }

    pub fn ccz_count(&self) -> usize {
        self.ops.len() - self.cz_count()
    }

    pub fn extra_memory_cells(&self) -> usize {
        self.parity_sources.len()
    }

    fn bit(&self, word: u64, t: usize) -> u64 {
        (word >> (self.k - 1 - t)) & 1
    }

    /// Classical contents of the extra cells for one memory word.
    pub fn parity_cells(&self, memory_word: u64) -> Vec<u64> {
        self.parity_sources
            .iter()
            .map(|src| src.iter().map(|&t| self.bit(memory_word, t)).sum::<u64>() % 2)
            .collect()
    }

    /// Sign produced by the plan on bus data `d` with addressed word `m`.
    pub fn sign(&self, d: u64, memory_word: u64) -> i32 {
        let cells = self.parity_cells(memory_word);
        let mut parity = 0;
        for op in &self.ops {
            parity ^= match *op {
                CompensationOp::Cz { word, partner } => self.bit(d, word) & self.bit(d, partner),
                CompensationOp::Ccz { word, cell } => self.bit(d, word) & cells[cell],
            };
        }
        if parity == 0 {
            1
        } else {
            -1
        }
    }

    /// The sign left behind by skipping every exchange `CZ`.
    pub fn target_sign(&self, d: u64, memory_word: u64) -> i32 {
        let mut total = 0;
        for i in 1..self.k {
            let met = i.min(self.n - 1);
            let sum: u64 = (1..=met)
                .map(|j| self.bit(d, i - j) + self.bit(memory_word, i - j))
                .sum();
            total += self.bit(d, i) * sum;
        }
        if total % 2 == 0 {
            1
        } else {
            -1
        }
    }
}
