use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },

    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("too many qubits: {0} (limit {max})", max = crate::bits::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("unsupported conjugation: {0}")]
    UnsupportedConjugation(String),

    #[error("operator is not diagonal")]
    NotDiagonal,

    #[error("observable is not a Hermitian Pauli")]
    NotHermitian,

    #[error("degenerate code size {m}x{n}: both dimensions must be at least 2")]
    DegenerateCode { m: usize, n: usize },

    #[error("incompatible code shapes: {0}")]
    IncompatibleShapes(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("asymmetry requirement unmet: n = {n} < ceil(m/2)^2 = {required}")]
    AsymmetryUnmet { n: usize, required: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration budget exceeded: {configs} > {cap}")]
    BudgetExceeded { configs: u64, cap: u64 },

    #[error("no threshold crossing in [{lo:e}, {hi:e}]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("infeasible qubit budget: need {need}, have {have}")]
    InfeasibleBudget { need: usize, have: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
