//! Random-permutation benchmark on a linear chain.
//!
//! Each trial draws a permutation, routes it with odd-even transposition
//! sort, compiles the resulting SWAP network in every requested mode and
//! simulates a random product input with and without depolarizing noise.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::compiler::{compile_cnot_baseline, compile_iscz, compile_iswap_cz, SwapPath};
use crate::error::BenchError;
use crate::sim::{
    fidelity, DensityMatrix, NoiseModel, QuantumState, StateVector, DEFAULT_DENSITY_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMode {
    /// Three CNOTs per SWAP.
    Cnot,
    /// One fused `iSCZ` per SWAP.
    Iscz,
    /// `iSWAP` followed by `CZ` per SWAP.
    IswapCz,
}

impl BenchMode {
    pub const ALL: [BenchMode; 3] = [BenchMode::Cnot, BenchMode::Iscz, BenchMode::IswapCz];

    pub fn name(self) -> &'static str {
        match self {
            BenchMode::Cnot => "cnot",
            BenchMode::Iscz => "iscz",
            BenchMode::IswapCz => "iswap_cz",
        }
    }

    pub fn compile(self, path: &SwapPath) -> Circuit {
        match self {
            BenchMode::Cnot => compile_cnot_baseline(path),
            BenchMode::Iscz => compile_iscz(path).0,
            BenchMode::IswapCz => compile_iswap_cz(path).0,
        }
    }
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchMode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BenchMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| BenchError::InvalidConfig(format!("unknown mode '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputPolicy {
    /// Independent Haar-random single-qubit states.
    HaarProduct,
    /// A uniformly random computational basis state. Blind to phase errors.
    RandomBasis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub p: f64,
    pub seed: u64,
    pub modes: Vec<BenchMode>,
    pub input: InputPolicy,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: (3..=8).collect(),
            trials: 100,
            p: 0.02,
            seed: 0,
            modes: BenchMode::ALL.to_vec(),
            input: InputPolicy::HaarProduct,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials == 0 {
            return Err(BenchError::InvalidConfig(
                "trials must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(BenchError::InvalidConfig(format!(
                "p = {} outside [0, 1]",
                self.p
            )));
        }
        if self.sizes.is_empty() {
            return Err(BenchError::InvalidConfig("no sizes given".into()));
        }
        if self.modes.is_empty() {
            return Err(BenchError::InvalidConfig("no modes given".into()));
        }
        if let Some(&n) = self
            .sizes
            .iter()
            .find(|&&n| n == 0 || n > DEFAULT_DENSITY_CAP)
        {
            return Err(BenchError::InvalidConfig(format!(
                "size {n} outside 1..={DEFAULT_DENSITY_CAP}"
            )));
        }
        Ok(())
    }
}

/// One CSV/JSON row: a trial compiled in one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub n: usize,
    pub trial: usize,
    pub mode: BenchMode,
    pub m_swaps: usize,
    pub two_qubit_gates: usize,
    pub depth: usize,
    pub two_qubit_depth: usize,
    pub fidelity_noiseless: f64,
    pub fidelity_noisy: f64,
    pub p: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub permutation: Vec<usize>,
    pub m_swaps: usize,
    pub modes: Vec<ModeRecord>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `trial` at size `n`, independent of scheduling.
pub fn trial_seed(master: u64, n: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ n as u64) ^ trial as u64)
}

/// Uniform permutation of `0..n` (Fisher-Yates on a ChaCha stream).
pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng);
    p
}

/// A routed permutation: the flat SWAP path and its parallel rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRoute {
    pub path: SwapPath,
    pub rounds: Vec<Vec<(usize, usize)>>,
}

/// Odd-even transposition sort on a line.
///
/// After the returned path runs, wire `i` holds the value that started on
/// wire `perm[i]`. Trailing empty rounds are dropped.
pub fn route_linear(perm: &[usize]) -> Result<LinearRoute, BenchError> {
    let n = perm.len();
    let mut target = vec![usize::MAX; n];
    for (i, &v) in perm.iter().enumerate() {
        if v >= n || target[v] != usize::MAX {
            return Err(BenchError::InvalidConfig(format!(
                "{perm:?} is not a permutation"
            )));
        }
        target[v] = i;
    }
    let mut key = target;
    let mut rounds = Vec::new();
    for r in 0..n {
        let mut round = Vec::new();
        for i in (r % 2..n.saturating_sub(1)).step_by(2) {
            if key[i] > key[i + 1] {
                key.swap(i, i + 1);
                round.push((i, i + 1));
            }
        }
        rounds.push(round);
    }
    while rounds.last().is_some_and(|r| r.is_empty()) {
        rounds.pop();
    }
    let pairs = rounds.iter().flatten().copied().collect();
    let path = SwapPath::new(n.max(1), pairs).map_err(BenchError::Compile)?;
    Ok(LinearRoute { path, rounds })
}

fn random_input(n: usize, policy: InputPolicy, rng: &mut ChaCha8Rng) -> StateVector {
    match policy {
        InputPolicy::HaarProduct => {
            let qubits: Vec<[Complex64; 2]> = (0..n)
                .map(|_| {
                    let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    [
                        Complex64::new(v[0], v[1]) / norm,
                        Complex64::new(v[2], v[3]) / norm,
                    ]
                })
                .collect();
            StateVector::product(&qubits)
        }
        InputPolicy::RandomBasis => StateVector::basis(n, rng.random_range(0..1usize << n)),
    }
}

/// Runs one trial in every configured mode.
pub fn run_trial(config: &BenchConfig, n: usize, trial: usize) -> Result<TrialRecord, BenchError> {
    let seed = trial_seed(config.seed, n, trial);
    let permutation = random_permutation(n, seed);
    let route = route_linear(&permutation)?;
    let path = route.path;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let input = random_input(n, config.input, &mut rng);
    let ideal = QuantumState::Pure(input.permute_wires(&path.final_positions()));
    let noise = NoiseModel::new(config.p)?;

    let mut modes = Vec::with_capacity(config.modes.len());
    for &mode in &config.modes {
        let circuit = mode.compile(&path);
        let metrics = circuit.metrics();
        let mut pure = input.clone();
        pure.apply_circuit(&circuit)?;
        let fidelity_noiseless = fidelity(&QuantumState::Pure(pure), &ideal)?;
        let mut rho = DensityMatrix::from_pure(&input)?;
        rho.apply_circuit_noisy(&circuit, &noise)?;
        let fidelity_noisy = fidelity(&QuantumState::Mixed(rho), &ideal)?;
        modes.push(ModeRecord {
            n,
            trial,
            mode,
            m_swaps: path.len(),
            two_qubit_gates: metrics.two_qubit_gates,
            depth: metrics.depth,
            two_qubit_depth: metrics.two_qubit_depth,
            fidelity_noiseless,
            fidelity_noisy,
            p: config.p,
            seed,
        });
    }
    Ok(TrialRecord {
        n,
        trial,
        seed,
        permutation,
        m_swaps: path.len(),
        modes,
    })
}

/// Runs every trial, in parallel on the current rayon pool. The result is
/// ordered by size, then trial index.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<TrialRecord>, BenchError> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .collect();
    jobs.par_iter()
        .map(|&(n, t)| run_trial(config, n, t))
        .collect()
}

/// Flattens trials into one row per (trial, mode).
pub fn mode_rows(records: &[TrialRecord]) -> Vec<ModeRecord> {
    records
        .iter()
        .flat_map(|r| r.modes.iter().cloned())
        .collect()
}

pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for row in mode_rows(records) {
        w.serialize(row)
            .map_err(|e| BenchError::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| BenchError::Output(e.to_string()))
}

pub fn to_json(records: &[TrialRecord]) -> String {
    serde_json::to_string_pretty(&mode_rows(records)).expect("records serialize")
}

/// Per-(n, mode) means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub mode: BenchMode,
    pub trials: usize,
    pub mean_m_swaps: f64,
    pub mean_two_qubit_gates: f64,
    pub mean_depth: f64,
    pub mean_two_qubit_depth: f64,
    pub mean_fidelity_noiseless: f64,
    pub mean_fidelity_noisy: f64,
}

pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let rows = mode_rows(records);
    let mut keys: Vec<(usize, BenchMode)> = rows.iter().map(|r| (r.n, r.mode)).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|(n, mode)| {
            let sel: Vec<&ModeRecord> =
                rows.iter().filter(|r| r.n == n && r.mode == mode).collect();
            let mean = |f: &dyn Fn(&ModeRecord) -> f64| {
                sel.iter().map(|r| f(r)).sum::<f64>() / sel.len() as f64
            };
            SummaryRow {
                n,
                mode,
                trials: sel.len(),
                mean_m_swaps: mean(&|r| r.m_swaps as f64),
                mean_two_qubit_gates: mean(&|r| r.two_qubit_gates as f64),
                mean_depth: mean(&|r| r.depth as f64),
                mean_two_qubit_depth: mean(&|r| r.two_qubit_depth as f64),
                mean_fidelity_noiseless: mean(&|r| r.fidelity_noiseless),
                mean_fidelity_noisy: mean(&|r| r.fidelity_noisy),
            }
        })
        .collect()
}

/// Aligned text table of [`summarize`].
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:>3} {:>9} {:>6} {:>8} {:>8} {:>8} {:>8} {:>10}\n",
        "n", "mode", "trials", "swaps", "2q", "depth", "2q_depth", "F_noisy"
    );
    for r in rows {
        s.push_str(&format!(
            "{:>3} {:>9} {:>6} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>10.6}\n",
            r.n,
            r.mode.name(),
            r.trials,
            r.mean_m_swaps,
            r.mean_two_qubit_gates,
            r.mean_depth,
            r.mean_two_qubit_depth,
            r.mean_fidelity_noisy
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply_route(n: usize, path: &SwapPath) -> Vec<usize> {
        let mut holder: Vec<usize> = (0..n).collect();
        for &(a, b) in path.pairs() {
            holder.swap(a, b);
        }
        holder
    }

    #[test]
    fn trivial_permutations() {
        assert_eq!(random_permutation(1, 5), vec![0]);
        assert!(route_linear(&[0, 1, 2]).unwrap().path.is_empty());
        assert_eq!(route_linear(&[1, 0]).unwrap().path.pairs(), &[(0, 1)]);
    }

    #[test]
    fn reversal_of_four() {
        let r = route_linear(&[3, 2, 1, 0]).unwrap();
        assert_eq!(r.path.len(), 6);
        assert_eq!(r.rounds.len(), 4);
        assert_eq!(apply_route(4, &r.path), vec![3, 2, 1, 0]);
    }

    #[test]
    fn route_realizes_permutation() {
        for seed in 0..200 {
            let n = 1 + (seed as usize % 12);
            let p = random_permutation(n, seed);
            let r = route_linear(&p).unwrap();
            assert_eq!(apply_route(n, &r.path), p);
            assert!(r.path.len() <= n * (n - 1) / 2);
            for (k, round) in r.rounds.iter().enumerate() {
                assert!(round.iter().all(|&(a, b)| b == a + 1 && a % 2 == k % 2));
            }
        }
    }

    #[test]
    fn rejects_non_permutation() {
        assert!(route_linear(&[0, 0]).is_err());
        assert!(route_linear(&[2, 0]).is_err());
    }

    #[test]
    fn permutation_determinism() {
        assert_eq!(random_permutation(9, 42), random_permutation(9, 42));
        assert_ne!(trial_seed(1, 3, 0), trial_seed(1, 3, 1));
        assert_ne!(trial_seed(1, 3, 0), trial_seed(1, 4, 0));
    }

    #[test]
    fn config_validation() {
        let mut c = BenchConfig {
            trials: 0,
            ..BenchConfig::default()
        };
        assert!(c.validate().is_err());
        c.trials = 1;
        c.p = 1.5;
        assert!(c.validate().is_err());
        c.p = 0.1;
        c.sizes = vec![11];
        assert!(c.validate().is_err());
        assert!("bogus".parse::<BenchMode>().is_err());
        assert_eq!("iswap_cz".parse::<BenchMode>().unwrap(), BenchMode::IswapCz);
    }

    #[test]
    fn small_run_is_exact_when_noiseless() {
        let c = BenchConfig {
            sizes: vec![3, 4],
            trials: 4,
            p: 0.0,
            seed: 9,
            ..BenchConfig::default()
        };
        let recs = run_benchmark(&c).unwrap();
        assert_eq!(recs.len(), 8);
        for row in mode_rows(&recs) {
            assert!((row.fidelity_noiseless - 1.0).abs() < 1e-9);
            assert!((row.fidelity_noisy - row.fidelity_noiseless).abs() < 1e-12);
        }
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "n,trial,mode,m_swaps,two_qubit_gates,depth,two_qubit_depth,fidelity_noiseless,fidelity_noisy,p,seed\n"
        ));
        assert_eq!(text.lines().count(), 1 + 8 * 3);
    }
}
