use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("scale must be a nonnegative number, got {0}")]
    NegativeScale(f64),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("set sequence did not become periodic within {0} iterations")]
    IterationCap(usize),

    #[error("set is not inward: {0} points escape under the thickened relation")]
    NotInward(usize),

    #[error("tolerance relation must be reflexive and symmetric")]
    InvalidTolerance,

    #[error("condensation has {count} strongly connected components, enumeration limit is {limit}")]
    TooManyComponents { count: usize, limit: usize },

    #[error("map is not surjective: target index {0} has an empty fiber")]
    NotSurjective(usize),

    #[error("fiber {fiber} ({points:?}) is not contained in a single chain class")]
    FiberSplit { fiber: usize, points: Vec<usize> },

    #[error("isolated point counts differ: {left} vs {right}")]
    CountMismatch { left: usize, right: usize },

    #[error("relation is not a permutation")]
    NotPermutation,

    #[error("involution support is empty: the preimage of the set lies inside it")]
    EmptySupport,

    #[error("automorphism search exhausted its budget of {0} nodes")]
    BudgetExhausted(u64),

    #[error("chain relation at scale {lower} is not contained in the one at scale {upper}")]
    MonotonicityViolated { lower: f64, upper: f64 },

    #[error("system is not chain transitive at scale {0}")]
    NotChainTransitive(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
