use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("empty Pauli string")]
    EmptyPauli,

    #[error("invalid Pauli character {ch:?} at position {pos}")]
    InvalidPauliChar { ch: char, pos: usize },

    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("gate `{gate}` expects {expected} qubit(s), got {found}")]
    GateArity {
        gate: String,
        expected: usize,
        found: usize,
    },

    #[error("gate `{gate}` acts twice on qubit {qubit}")]
    DuplicateQubit { gate: String, qubit: usize },

    #[error("rotation axis must not be the identity")]
    IdentityAxis,

    #[error("angle {0} is not finite")]
    NonFiniteAngle(f64),

    #[error("rotation angle {theta} outside [-pi/4, pi/4]; compile the circuit first")]
    AngleOutOfRange { theta: f64 },

    #[error("imaginary coefficient produced by branch phase i^{exponent}")]
    ImaginaryResidue { exponent: u8 },

    #[error("term limit of {limit} exceeded at rotation {gate_index} ({terms} terms)")]
    TermLimit {
        gate_index: usize,
        terms: usize,
        limit: usize,
    },

    #[error("invalid noise channel: {0}")]
    InvalidNoise(String),

    #[error("noise location {after} beyond the {rotations} rotations of the program")]
    NoiseLocation { after: usize, rotations: usize },

    #[error("instance generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("{what} supports at most {max} qubits, got {n}")]
    TooManyQubits { what: &'static str, n: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Stable machine-readable identifier for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::EmptyPauli => "empty_pauli",
            Error::InvalidPauliChar { .. } => "invalid_pauli_char",
            Error::QubitOutOfRange { .. } => "qubit_out_of_range",
            Error::GateArity { .. } => "gate_arity",
            Error::DuplicateQubit { .. } => "duplicate_qubit",
            Error::IdentityAxis => "identity_axis",
            Error::NonFiniteAngle(_) => "non_finite_angle",
            Error::AngleOutOfRange { .. } => "angle_out_of_range",
            Error::ImaginaryResidue { .. } => "imaginary_residue",
            Error::TermLimit { .. } => "term_limit",
            Error::InvalidNoise(_) => "invalid_noise",
            Error::NoiseLocation { .. } => "noise_location",
            Error::GenerationFailed { .. } => "generation_failed",
            Error::InvalidModel(_) => "invalid_model",
            Error::TooManyQubits { .. } => "too_many_qubits",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Schema(_) => "schema",
        }
    }
}
