use thiserror::Error;

/// Errors raised by the library. The CLI maps every variant to exit status 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotAPrimePower(u32),
    #[error("field size {0} exceeds the supported maximum of 32")]
    UnsupportedSize(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("universe of {size} subspaces exceeds the limit of {limit}")]
    UniverseTooLarge { size: u128, limit: u128 },
    #[error("code too large for exhaustive enumeration: {0}")]
    CodeTooLarge(String),
    #[error("operation requires a code over F_{expected}, got F_{got}")]
    WrongField { expected: u32, got: u32 },
    #[error("perfect hash order t = {t} exceeds the alphabet size q = {q}")]
    TooManySymbols { t: usize, q: u32 },
    #[error("code is degenerate: coordinate {0} is zero in every codeword")]
    DegenerateCode(usize),
    #[error("points do not span the ambient space (rank {rank} < {k})")]
    NonSpanningPoints { rank: usize, k: usize },
    #[error("point set is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("point set is not a 2-blocking set")]
    NotBlocking,
    #[error("generator matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("no verified construction after {0} attempts")]
    RetriesExhausted(usize),
    #[error("unsupported strategy: {0}")]
    UnsupportedStrategy(String),
    #[error("graph with {n} vertices exceeds the limit of {limit} for this mode")]
    GraphTooLarge { n: usize, limit: usize },
    #[error("argument {value} outside the domain {domain}")]
    OutOfDomain { value: f64, domain: String },
    #[error("root bracketing failed: {0}")]
    BracketFailure(String),
    #[error("k = {0} is outside the supported range 2..=6")]
    KTooLarge(usize),
    #[error("time limit exceeded; optimum lies in [{lower}, {upper}]")]
    TimeLimitExceeded { lower: usize, upper: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
