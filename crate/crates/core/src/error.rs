use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group parameters m={m}, n={n}: both must be at least 1")]
    InvalidParams { m: u32, n: u32 },

    #[error("group G({m},{n}) has order {order} which exceeds the exact-engine cap of {cap} elements")]
    Capacity { m: u32, n: u32, order: String, cap: usize },

    #[error("parameter mismatch: G({0},{1}) vs G({2},{3})")]
    ParamMismatch(u32, u32, u32, u32),

    #[error("rank {rank} out of range for a group of order {order}")]
    IndexOutOfRange { rank: usize, order: usize },

    #[error("position {position} out of range 1..={n}")]
    PositionOutOfRange { position: u32, n: u32 },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("distance did not fall below {eps} within {max_t} steps (last distance {last})")]
    NotConverged { eps: f64, max_t: usize, last: f64 },
}
