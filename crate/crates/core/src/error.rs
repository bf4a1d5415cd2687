use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("unknown gate kind '{0}'")]
    UnknownKind(String),
    #[error("gate '{kind}' expects {expected} parameter(s), found {found}")]
    ParamCount {
        kind: String,
        expected: usize,
        found: usize,
    },
    #[error("gate '{0}' has a non-finite parameter")]
    NonFiniteParam(String),
    #[error("gate '{0}' is not a two-qubit gate")]
    NotTwoQubit(String),
}

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("circuit must have at least one wire")]
    NoWires,
    #[error("gate {index} ({kind}): expected {expected} wire(s), got {found}")]
    Arity {
        index: usize,
        kind: String,
        expected: usize,
        found: usize,
    },
    #[error("gate {index}: wire {wire} out of range for {n_wires} wires")]
    WireOutOfRange {
        index: usize,
        wire: usize,
        n_wires: usize,
    },
    #[error("gate {index}: repeated operand wire {wire}")]
    RepeatedWire { index: usize, wire: usize },
    #[error("known_zero wire {wire} out of range for {n_wires} wires")]
    ZeroWireOutOfRange { wire: usize, n_wires: usize },
    #[error("coupling map: {0}")]
    InvalidMap(String),
    #[error("wire count mismatch: circuit has {circuit}, coupling map has {map}")]
    WireCountMismatch { circuit: usize, map: usize },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("JSON parse error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
}

impl CircuitError {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        CircuitError::Json {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("dimension mismatch: state has {state} qubits, operand needs {other}")]
    DimensionMismatch { state: usize, other: usize },
    #[error("{what} limited to {cap} qubits, requested {requested}")]
    SizeCap {
        what: &'static str,
        cap: usize,
        requested: usize,
    },
    #[error("operation requires a density matrix")]
    PureState,
    #[error("noisy simulation requires a density matrix")]
    NoiseOnPure,
    #[error("depolarizing probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("state is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("wire {wire} out of range for {n} qubits")]
    WireOutOfRange { wire: usize, n: usize },
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("swap {index}: wire {wire} out of range for {n_wires} wires")]
    WireOutOfRange {
        index: usize,
        wire: usize,
        n_wires: usize,
    },
    #[error("swap {index}: both operands are wire {wire}")]
    SelfSwap { index: usize, wire: usize },
    #[error("swap {index} ({a}, {b}) is not an edge of the coupling map")]
    NotAnEdge { index: usize, a: usize, b: usize },
    #[error(
        "pending CZ of swap {index} can never be scheduled: its values are never on coupled wires"
    )]
    Unschedulable { index: usize },
    #[error("CZ of swap {index} placed at step {step}, where its values are not on coupled wires")]
    IllegalPlacement { index: usize, step: usize },
    #[error("schedule lists {found} CZ placements for {expected} swaps")]
    ScheduleLength { expected: usize, found: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Error)]
pub enum QramError {
    #[error("invalid QRAM spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("output error: {0}")]
    Output(String),
}
