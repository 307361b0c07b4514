use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown scenario case `{0}` (expected case3, case4 or case5)")]
    UnknownCase(String),

    #[error("operation requires a single-column array, got {rows}x{cols}")]
    NotSingleColumn { rows: usize, cols: usize },

    #[error("user {user} is not scheduled on PRB {prb}")]
    NotScheduled { user: usize, prb: usize },

    #[error("user {user} has no pilot assignment")]
    MissingPilot { user: usize },

    #[error("pilot length {m_p} cannot host 3 disjoint pools of {k_max}")]
    PilotsTooShort { m_p: usize, k_max: usize },

    #[error("empty sample series")]
    EmptySeries,

    #[error("failed to parse configuration: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("failed to serialize: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
