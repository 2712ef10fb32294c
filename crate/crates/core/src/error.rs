use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("negative mass {value} at cell {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("mass sums to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("empty table")]
    EmptyTable,
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("axis mismatch: {0}")]
    AxisMismatch(String),
    #[error("sequence length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("symbol index {index} out of range for alphabet of size {size}")]
    InvalidSymbol { index: usize, size: usize },
    #[error("table of {cells} cells exceeds the limit of {limit}")]
    TooLarge { cells: u128, limit: usize },
    #[error("auxiliary alphabet of size {found} exceeds cap {cap}")]
    CardinalityExceeded { found: usize, cap: usize },
    #[error("induced conditional deviates from the target (TV {tv})")]
    TargetMismatch { tv: f64 },
    #[error("no consistent witness found (best TV gap {gap})")]
    InfeasibleTarget { gap: f64 },
    #[error("R1 = {r1} is below R2 = {r2}")]
    RateSplitInvalid { r1: f64, r2: f64 },
    #[error("rate leaves no binning slack (gamma = {gamma})")]
    NonPositiveGamma { gamma: f64 },
    #[error("distribution is not Markov X - Y - Z (TV {tv})")]
    NotMarkov { tv: f64 },
    #[error("exact evaluation needs {work} cells, budget is {budget}")]
    BudgetExceeded { work: u128, budget: u128 },
    #[error("codebook of 2^{bits} entries exceeds the 2^{max_bits} limit")]
    CodebookTooLarge { bits: u32, max_bits: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
