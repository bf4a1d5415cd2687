//! Command-line front end for the `swapnet` library.
//!
//! Exit codes: 0 on success, 1 when validation or verification fails, 2 on
//! I/O and parse errors.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use swapnet::compiler::{
    compile_cnot_baseline, compile_ext1, compile_ext2, compile_iscz, compile_iswap_cz,
    verify_equivalence, CzPolicy, SwapPath,
};
use swapnet::gates::{pauli_expansion, GateKind};
use swapnet::netbench::{self, BenchConfig, BenchMode, InputPolicy};
use swapnet::qram::{self, QramSpec, TreeLayout};
use swapnet::{BenchError, Circuit, CircuitError, CompileError, CouplingMap, QramError};

#[derive(Parser, Debug)]
#[command(
    name = "swapnet",
    version,
    about = "SWAP-network compiler, simulator and QRAM builder"
)]
struct Cli {
    /// Worker threads for parallel work (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a SWAP path to a native-gate circuit.
    Compile(CompileArgs),
    /// Check a compiled circuit against its SWAP path.
    Verify(VerifyArgs),
    /// Run the random-permutation benchmark.
    Bench(BenchArgs),
    /// Build a QRAM circuit from a spec file.
    QramBuild(QramBuildArgs),
    /// Compare QRAM closed-form gate counts with built-circuit tallies.
    QramCount(QramCountArgs),
    /// Simulate a QRAM circuit on every bus basis input.
    QramVerify(QramVerifyArgs),
    /// Print the pipelined data-fetch schedule.
    Schedule(ScheduleArgs),
    /// Print a gate matrix.
    Matrix(MatrixArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CompileMode {
    Iscz,
    #[value(name = "iswap_cz")]
    IswapCz,
    Cnot,
    Ext1,
    Ext2,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Policy {
    Earliest,
    Latest,
}

#[derive(Args, Debug)]
struct CompileArgs {
    #[arg(long)]
    path: PathBuf,
    #[arg(long, value_enum, default_value = "iscz")]
    mode: CompileMode,
    /// Wires known to start in |0> (ext1).
    #[arg(long, value_delimiter = ',')]
    zero: Vec<usize>,
    /// Coupling map JSON (ext2; defaults to a line).
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "earliest")]
    policy: Policy,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    path: PathBuf,
    #[arg(long)]
    circuit: PathBuf,
    /// Restrict to inputs with these wires in |0> (defaults to the
    /// circuit's own known_zero set).
    #[arg(long, value_delimiter = ',', conflicts_with = "full")]
    zero: Option<Vec<usize>>,
    /// Compare every input column, ignoring any known_zero set.
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Sizes as `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "3..8")]
    sizes: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.02)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "cnot,iscz,iswap_cz")]
    modes: Vec<String>,
    #[arg(long, value_enum, default_value = "haar")]
    input: Input,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Input {
    Haar,
    Basis,
}

#[derive(Args, Debug)]
struct QramBuildArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QramCountArgs {
    #[arg(long, required_unless_present = "spec")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "spec")]
    k: Option<usize>,
    #[arg(long, conflicts_with_all = ["n", "k"])]
    spec: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct QramVerifyArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, required_unless_present = "words")]
    k: Option<usize>,
    /// Explicit increasing list of word indices instead of `0..k`.
    #[arg(long, value_delimiter = ',', conflicts_with = "k")]
    words: Option<Vec<usize>>,
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    #[arg(long)]
    gate: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
    /// Also print the Pauli expansion of a two-qubit gate.
    #[arg(long)]
    pauli: bool,
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1.
    Validation(String),
    /// Exit 2.
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

fn io_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        match e {
            CircuitError::Json { .. } | CircuitError::Field { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::Circuit(c) => c.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<QramError> for CliError {
    fn from(e: QramError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Output(m) => CliError::Io(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn emit(out: &mut (dyn Write + Send), text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn metrics_line(c: &Circuit) -> String {
    let m = c.metrics();
    format!(
        "gates={} two_qubit_gates={} three_qubit_gates={} depth={} two_qubit_depth={}\n",
        m.total_gates, m.two_qubit_gates, m.three_qubit_gates, m.depth, m.two_qubit_depth
    )
}

fn load_path(path: &Path) -> Result<SwapPath, CliError> {
    Ok(SwapPath::from_json(&read(path)?)?)
}

fn load_qram_spec(path: &Path) -> Result<QramSpec, CliError> {
    let spec: QramSpec = serde_json::from_str(&read(path)?).map_err(|e| io_err(path, e))?;
    spec.validate()?;
    Ok(spec)
}

fn cmd_compile(
    a: &CompileArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    let path = load_path(&a.path)?;
    let circuit = match a.mode {
        CompileMode::Iscz => compile_iscz(&path).0,
        CompileMode::IswapCz => compile_iswap_cz(&path).0,
        CompileMode::Cnot => compile_cnot_baseline(&path),
        CompileMode::Ext1 => {
            let zero: BTreeSet<usize> = a.zero.iter().copied().collect();
            compile_ext1(&path, &zero)?.circuit
        }
        CompileMode::Ext2 => {
            let map = match &a.map {
                Some(p) => CouplingMap::from_json(&read(p)?)?,
                None => CouplingMap::line(path.n_wires()),
            };
            let policy = match a.policy {
                Policy::Earliest => CzPolicy::Earliest,
                Policy::Latest => CzPolicy::Latest,
            };
            compile_ext2(&path, &map, policy)?.circuit
        }
    };
    match &a.out {
        Some(p) => {
            write_file(p, &circuit.to_json())?;
            emit(out, &metrics_line(&circuit))
        }
        None => {
            emit(out, &circuit.to_json())?;
            emit(out, "\n")?;
            emit(err, &metrics_line(&circuit))
        }
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let path = load_path(&a.path)?;
    let circuit = Circuit::from_json(&read(&a.circuit)?)?;
    let zero: BTreeSet<usize> = match &a.zero {
        _ if a.full => BTreeSet::new(),
        Some(z) => z.iter().copied().collect(),
        None => circuit.known_zero().clone(),
    };
    let dev = verify_equivalence(&path, &circuit, Some(&zero))?;
    emit(out, &format!("max_deviation={dev:.3e}\n"))?;
    if dev <= a.tol {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "deviation {dev:.3e} exceeds tolerance {:.1e}",
            a.tol
        )))
    }
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Validation(format!("invalid --sizes '{s}'"));
    if let Some((lo, hi)) = s.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok((lo..=hi).collect())
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect()
    }
}

fn cmd_bench(a: &BenchArgs, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let modes = a
        .modes
        .iter()
        .map(|m| m.parse::<BenchMode>())
        .collect::<Result<Vec<_>, _>>()?;
    let config = BenchConfig {
        sizes: parse_sizes(&a.sizes)?,
        trials: a.trials,
        p: a.p,
        seed: a.seed,
        modes,
        input: match a.input {
            Input::Haar => InputPolicy::HaarProduct,
            Input::Basis => InputPolicy::RandomBasis,
        },
    };
    let records = netbench::run_benchmark(&config)?;
    if let Some(p) = &a.csv {
        let file = std::fs::File::create(p).map_err(|e| io_err(p, e))?;
        netbench::write_csv(&records, file)?;
    }
    if let Some(p) = &a.json {
        write_file(p, &netbench::to_json(&records))?;
    }
    emit(
        out,
        &netbench::summary_table(&netbench::summarize(&records)),
    )
}

fn cmd_qram_build(
    a: &QramBuildArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    let spec = load_qram_spec(&a.spec)?;
    let build = qram::build_qram_circuit(&spec)?;
    let summary = format!(
        "wires={} steps={} merged_pairs={} {}",
        build.layout.n_wires(),
        build.schedule.n_steps(),
        build.schedule.merged_pairs(),
        metrics_line(&build.circuit)
    );
    let ledger = serde_json::to_string(&build.ledger).expect("ledger serializes");
    match &a.out {
        Some(p) => {
            write_file(p, &build.circuit.to_json())?;
            emit(out, &summary)?;
            emit(out, &format!("phase_ledger={ledger}\n"))
        }
        None => {
            emit(out, &build.circuit.to_json())?;
            emit(out, "\n")?;
            emit(err, &summary)
        }
    }
}

fn cmd_qram_count(a: &QramCountArgs, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let spec = match (&a.spec, a.n, a.k) {
        (Some(p), _, _) => load_qram_spec(p)?,
        (None, Some(n), Some(k)) => QramSpec::zeroed(n, k)?,
        _ => {
            return Err(CliError::Validation(
                "give --spec or both --n and --k".into(),
            ))
        }
    };
    let report = qram::count_gates(&spec)?;
    if a.json {
        emit(out, &report.to_json())?;
        emit(out, "\n")?;
    } else {
        emit(out, &report.to_table())?;
    }
    if report.matches() {
        Ok(())
    } else {
        Err(CliError::Validation(
            "closed forms and tallies disagree".into(),
        ))
    }
}

fn cmd_qram_verify(a: &QramVerifyArgs, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let spec = load_qram_spec(&a.spec)?;
    let v = qram::verify_qram(&spec)?;
    emit(
        out,
        &format!(
            "inputs={} max_deviation={:.3e} max_leakage={:.3e} max_ancilla_population={:.3e}\n",
            v.inputs, v.max_deviation, v.max_leakage, v.max_ancilla_population
        ),
    )?;
    if v.passes(a.tol) {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "QRAM output deviates beyond {:.1e}",
            a.tol
        )))
    }
}

fn cmd_schedule(a: &ScheduleArgs, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let words = match (&a.words, a.k) {
        (Some(w), _) => w.clone(),
        (None, Some(k)) if k >= 1 => (0..k).collect(),
        _ => return Err(CliError::Validation("k must be at least 1".into())),
    };
    let s = qram::schedule_words(a.n, &words, !a.sequential)?;
    let layout = TreeLayout::new(a.n, words.last().map_or(1, |w| w + 1));
    let conflicts = qram::find_conflicts(&s, &layout);
    if a.json {
        emit(
            out,
            &serde_json::to_string_pretty(&s).expect("schedule serializes"),
        )?;
        emit(out, "\n")?;
    } else {
        emit(out, &s.to_text())?;
        emit(
            out,
            &format!(
                "steps={} merged_pairs={} conflicts={}\n",
                s.n_steps(),
                s.merged_pairs(),
                conflicts.len()
            ),
        )?;
    }
    if conflicts.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "wire conflicts: {conflicts:?}"
        )))
    }
}

/// Rounds values that would print as `-0.0000` to zero.
fn tidy(x: f64) -> f64 {
    if x.abs() < 5e-5 {
        0.0
    } else {
        x
    }
}

fn cmd_matrix(a: &MatrixArgs, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let kind = GateKind::from_name(&a.gate.to_ascii_lowercase(), &a.params)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let m = kind.matrix();
    let mut s = format!("{kind}\n");
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| {
                let z = m[(r, c)];
                format!("{:>7.4}{:+.4}i", tidy(z.re), tidy(z.im))
            })
            .collect();
        s.push_str(&row.join("  "));
        s.push('\n');
    }
    if a.pauli {
        let exp = pauli_expansion(kind).map_err(|e| CliError::Validation(e.to_string()))?;
        for (label, c) in exp.terms(1e-12) {
            s.push_str(&format!("{label}: {:+.6}{:+.6}i\n", c.re, c.im));
        }
    }
    emit(out, &s)
}

fn dispatch(
    cli: &Cli,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    match &cli.command {
        Command::Compile(a) => cmd_compile(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::QramBuild(a) => cmd_qram_build(a, out, err),
        Command::QramCount(a) => cmd_qram_count(a, out),
        Command::QramVerify(a) => cmd_qram_verify(a, out),
        Command::Schedule(a) => cmd_schedule(a, out),
        Command::Matrix(a) => cmd_matrix(a, out),
    }
}

/// Runs the CLI on `argv` (including the program name) with explicit
/// output streams and returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(CliError::Validation("--jobs must be at least 1".into())),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, out, err)),
            Err(e) => Err(CliError::Io(e.to_string())),
        },
        None => dispatch(&cli, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

/// Runs the CLI against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}
