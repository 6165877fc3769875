use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input text is empty")]
    EmptyInput,
    #[error("window parameter tau={tau} too large for text length n={n}")]
    TauTooLarge { tau: usize, n: usize },
    #[error("alphabet/window combination needs lookup tables beyond the supported size")]
    ConfigTooLarge,
    #[error("position {pos} out of range [1..{max}]")]
    OutOfRange { pos: usize, max: usize },
    #[error("rank {rank} out of range [1..{max}]")]
    RankOutOfRange { rank: usize, max: usize },
    #[error("pattern symbol {sym} outside alphabet of size {sigma}")]
    BadSymbol { sym: u32, sigma: u32 },
    #[error("empty pattern")]
    EmptyPattern,
    #[error("sequence entries must share one length")]
    InconsistentLengths,
    #[error("string longer than the {max}-symbol encoding limit")]
    TooLong { max: usize },
    #[error("suffix positions are not in lexicographic order")]
    NotSorted,
    #[error("array too short: need at least {need} entries")]
    TooShort { need: usize },
    #[error("position {pos} is not periodic")]
    NotPeriodic { pos: usize },
    #[error("node handle {b}:{e} is not valid here")]
    InvalidNode { b: usize, e: usize },
    #[error("operation undefined on the root")]
    IsRoot,
    #[error("depth {d} out of range [0..{max}]")]
    DepthOutOfRange { d: usize, max: usize },
    #[error("text of length {n} exceeds the oracle ceiling {ceiling}")]
    TooLargeForOracle { n: usize, ceiling: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("index file corrupt: {0}")]
    Corrupt(String),
    #[error("index file version {0} not supported")]
    Version(u32),
}
