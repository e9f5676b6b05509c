use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("space has no atoms")]
    EmptySpace,
    #[error("atom weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
    #[error("atom `{label}` has non-positive weight {weight}")]
    NonPositiveWeight { label: String, weight: f64 },
    #[error("duplicate atom label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown atom label `{0}`")]
    UnknownAtom(String),
    #[error("invalid cube dimension {0}")]
    InvalidDimension(usize),

    #[error("partition has no cells")]
    NoCells,
    #[error("cell {index} is empty or has zero measure")]
    EmptyCell { index: usize },
    #[error("cell {index} is not a valid cell of the space: {reason}")]
    InvalidCell { index: usize, reason: String },
    #[error("cells {first} and {second} overlap")]
    Overlap { first: usize, second: usize },
    #[error("cells do not cover the space (total measure {total})")]
    Cover { total: f64 },

    #[error("point outside the space: {0}")]
    OutOfDomain(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("spikes are not allowed on finite spaces")]
    SpikesOnFiniteSpace,

    #[error(
        "N = {n} gives non-integer count {product} for cell {cell}{}",
        match suggested {
            Some(m) => format!("; smallest feasible N is {m}"),
            None => String::new(),
        }
    )]
    NonIntegerAllocation {
        n: usize,
        cell: usize,
        product: f64,
        suggested: Option<usize>,
    },
    #[error("enumeration of {count} configurations exceeds the cap of {cap}")]
    EnumerationTooLarge { count: String, cap: u64 },
    #[error("operation requires a finite space")]
    NotFinite,
    #[error("point set is not uniform: counts {counts:?}, expected {expected:?}")]
    NotUniform { counts: Vec<usize>, expected: Vec<f64> },
    #[error("integration error {error} exceeds bound {bound}")]
    BoundViolation { error: f64, bound: f64 },

    #[error("linear program failed: {0}")]
    Solver(String),
    #[error("instance description: {0}")]
    Instance(String),
}
