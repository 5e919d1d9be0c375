use thiserror::Error;

/// Every failure the library can report.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field orders {0} and {1} have no configured common embedding")]
    IncompatibleFieldOrders(u32, u32),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("root vector has zero norm")]
    ZeroRoot,
    #[error("{0} is not a primitive root of unity of order {1}")]
    BadEigenvalue(String, u32),
    #[error("no finite order found below cap {0}")]
    OrderCapExceeded(usize),
    #[error("closure exceeded cap of {0} elements")]
    CapExceeded(usize),
    #[error("module closure did not stabilize")]
    NoStabilization,
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("overlap graph is disconnected")]
    DisconnectedOverlapGraph,
    #[error("Gram matrices cannot be matched: {0}")]
    GramMismatch(String),
    #[error("lattices live in different real structures")]
    StructureMismatch,
    #[error("not a sublattice")]
    NotASublattice,
    #[error("empty constraint set")]
    EmptyConstraintSet,
    #[error("constraints do not cut out a discrete set")]
    NotDiscrete,
    #[error("quotient has {0} elements, above the bound {1}")]
    QuotientTooLarge(String, usize),
    #[error("degenerate lattice: generators are linearly dependent over the reals")]
    DegenerateLattice,
    #[error("value is not in an imaginary quadratic subfield: {0}")]
    NotQuadratic(String),
    #[error("lattice is not invariant under the group")]
    NotInvariant,
    #[error("operator S is singular")]
    SingularS,
    #[error("path condition violated: node {0} not reachable through unit-modulus edges")]
    PathConditionViolated(usize),
    #[error("base lattice is not stable under the trace ring")]
    DeltaNotStable,
    #[error("graph is not a chain in the given numbering")]
    ChainConditionViolated,
    #[error("sub-system of the first n reflections is reducible")]
    SubsystemReducible,
    #[error("similarity search budget exceeded")]
    SearchBudgetExceeded,
    #[error("lattice is not a root lattice")]
    NotRootLattice,
    #[error("expected {expected} generators, found {found}")]
    WrongGeneratorCount { expected: usize, found: usize },
    #[error("relator {0} does not evaluate to the identity")]
    BadRelator(String),
    #[error("invalid Cartan data: {0}")]
    InvalidCartanData(String),
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
