use thiserror::Error;

/// Failure modes for operations whose inputs come from user-facing
/// configuration (ranks, summation indices, Cesàro orders, cone data).
///
/// Cheap pointwise operations (`GroupPoint::xor_add`, `tau`, the system
/// evaluations) treat bad arguments as programmer errors and panic instead;
/// by the time those run, every parameter has already been validated here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value buffer has {got} entries but ranks {ranks:?} require {want}")]
    ShapeMismatch {
        ranks: Vec<u32>,
        want: usize,
        got: usize,
    },

    #[error("index {n} exceeds 2^{rank} = {max}; the kernel or sum is not constant on rank-{rank} cosets")]
    RankTooSmall { n: usize, rank: u32, max: usize },

    #[error("Cesàro order must lie in (0, 1], got {0}")]
    AlphaOutOfRange(f64),

    #[error("expected {want} per-axis entries, got {got}")]
    DimensionMismatch { want: usize, got: usize },

    #[error("maximal operator needs a non-empty family of means")]
    EmptyFamily,

    #[error("martingale maximal needs a non-empty index sequence")]
    EmptySequence,

    #[error("L^N index needs 0 < N < 2^n1, got N = {n} at n1 = {n1}")]
    LnIndexOutOfRange { n: usize, n1: u32 },

    #[error("cone axis {axis}: {reason}")]
    BadCone { axis: usize, reason: String },

    #[error("bad experiment parameter: {0}")]
    BadParameter(String),

    /// An internal invariant failed mid-run. Unlike the other variants this
    /// one signals corrupt computation rather than bad input, so callers
    /// should abort the run instead of adjusting parameters.
    #[error("runtime contract violated: {0}")]
    ContractViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
