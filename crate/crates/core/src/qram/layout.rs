use serde::Serialize;

/// Wire assignment of an `(n, k)` qubit-qubit QRAM.
///
/// Address bus on wires `0..n` (bit 0 is the most significant address
/// bit), data bus on `n..n+k`, then one address and one data register per
/// tree node in breadth-first order. Node `(l, m)` sits in layer `l < n` and
/// has children `(l+1, 2m)` and `(l+1, 2m+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeLayout {
    n: usize,
    k: usize,
}

impl TreeLayout {
    pub fn new(n: usize, k: usize) -> Self {
        TreeLayout { n, k }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_nodes(&self) -> usize {
        (1 << self.n) - 1
    }

    pub fn n_wires(&self) -> usize {
        self.n + self.k + 2 * self.n_nodes()
    }

    pub fn address_bus(&self, j: usize) -> usize {
        j
    }

    pub fn data_bus(&self, t: usize) -> usize {
        self.n + t
    }

    fn flat(&self, l: usize, m: usize) -> usize {
        debug_assert!(l < self.n && m < 1 << l);
        (1 << l) - 1 + m
    }

    pub fn node_address(&self, l: usize, m: usize) -> usize {
        self.n + self.k + 2 * self.flat(l, m)
    }

    pub fn node_data(&self, l: usize, m: usize) -> usize {
        self.node_address(l, m) + 1
    }

    /// Memory cell read by leaf `m` when its address register holds `bit`.
    pub fn memory_cell(&self, m: usize, bit: bool) -> usize {
        2 * m + bit as usize
    }

    /// Every wire of layer `l` and its data registers one layer down: the
    /// footprint of a Routing between layers `l` and `l + 1`.
    pub fn routing_wires(&self, l: usize) -> Vec<usize> {
        let mut w = Vec::new();
        for p in 0..1 << l {
            w.push(self.node_address(l, p));
            w.push(self.node_data(l, p));
            w.push(self.node_data(l + 1, 2 * p));
            w.push(self.node_data(l + 1, 2 * p + 1));
        }
        w
    }

    pub fn leaf_wires(&self) -> Vec<usize> {
        let l = self.n - 1;
        (0..1 << l)
            .flat_map(|m| [self.node_address(l, m), self.node_data(l, m)])
            .collect()
    }
}
