use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("configuration must have at least one site")]
    EmptyConfiguration,
    #[error("lane count must be at least 1")]
    NoLanes,
    #[error("cell value {value} at site {site} exceeds lane count {lanes}")]
    CellOutOfRange { site: usize, value: u32, lanes: u32 },
    #[error("fill value {0} must be 0 or the lane count")]
    InvalidFill(u32),
    #[error("word must have at least one symbol")]
    EmptyWord,
    #[error("symbol {value} exceeds alphabet maximum {max}")]
    SymbolOutOfRange { value: u32, max: u32 },
    #[error("invalid digit {0:?} in configuration string")]
    InvalidDigit(char),
    #[error("window start {start} is after end {end}")]
    InvalidWindow { start: isize, end: isize },
    #[error("pattern longer than text")]
    PatternTooLong,
    #[error("operation requires a ring configuration")]
    NotRing,
    #[error("lane count mismatch: expected {expected}, found {found}")]
    LaneMismatch { expected: u32, found: u32 },
    #[error("velocity must be at least 1")]
    ZeroVelocity,
    #[error("superfast undefined")]
    SuperfastUndefined,
    #[error("density {0} outside [0, lanes]")]
    DensityOutOfRange(String),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(String),
    #[error("unbounded minimal word")]
    UnboundedMinimalWord,
    #[error("word too short: need at least {needed} symbols, found {found}")]
    WordTooShort { needed: usize, found: usize },
    #[error("no gap anchor")]
    NoGapAnchor,
    #[error("fast coding needs zero fills on both sides")]
    FastFill,
    #[error("zero symbol index {index} outside [1, {v}]")]
    ZeroIndexOutOfRange { index: u32, v: u32 },
    #[error("not a minimal fast word")]
    NotMinimalFastWord,
    #[error("invalid bundle")]
    InvalidBundle,
    #[error("enumeration budget: {sites} sites exceeds {limit}")]
    EnumerationBudget { sites: usize, limit: usize },
    #[error("tracer stranded")]
    TracerStranded,
    #[error("at least one step is required")]
    NoSteps,
    #[error("index {0} is not resolvable")]
    Unresolvable(isize),
}

pub type Result<T> = std::result::Result<T, Error>;
