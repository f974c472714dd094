use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A norm spec, lattice literal, pair or config line could not be parsed.
    #[error("parse error at position {position} in `{input}`: {message}")]
    Parse {
        input: String,
        position: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular matrix (|det| = {det:e})")]
    Singular { det: f64 },

    #[error("enumeration would exceed capacity: {requested} > {cap}")]
    Capacity { requested: u128, cap: usize },

    #[error("flow time {s} outside supported range |s| <= {limit}")]
    Range { s: f64, limit: f64 },

    /// The hexagon equation has no root in the searched bracket.
    #[error("no solution for hexagon partner at theta = {theta}: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    NoSolution {
        theta: f64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("operation requires a domain that is not a parallelogram")]
    Parallelogram,

    /// A lattice that was supposed to be critical is not.
    #[error("lattice is not critical: covolume {covolume} vs expected {expected}{}", violating.map(|v| format!(", violating vector {v:?}")).unwrap_or_default())]
    NotCritical {
        covolume: f64,
        expected: f64,
        violating: Option<[f64; 3]>,
    },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(input: &str, position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            position,
            message: message.into(),
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::InvalidArgument(_) => 2,
            Error::Singular { .. } => 3,
            Error::Capacity { .. } => 4,
            Error::Range { .. } => 5,
            Error::NoSolution { .. }
            | Error::Parallelogram
            | Error::NotCritical { .. }
            | Error::Degenerate(_) => 6,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 7,
        }
    }
}
