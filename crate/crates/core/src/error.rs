use thiserror::Error;

/// A position `(i, j)` in an `n × n` matrix, 0-based internally.
pub type Pair = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix does not have rank one (rank {0})")]
    RankNotOne(usize),

    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("relation is not transitive: ({},{}) and ({},{}) present but ({},{}) missing",
        .first.0 + 1, .first.1 + 1, .second.0 + 1, .second.1 + 1, .first.0 + 1, .second.1 + 1)]
    NotClosed { first: Pair, second: Pair },

    #[error("subset is not a union of connected classes (splits the class containing {})", .0 + 1)]
    NotClassUnion(usize),

    #[error("weights are not transitive at ({},{}), ({},{})", .first.0 + 1, .first.1 + 1, .second.0 + 1, .second.1 + 1)]
    NotTransitive { first: Pair, second: Pair },

    #[error("weight at ({},{}) is zero", .0.0 + 1, .0.1 + 1)]
    ZeroWeight(Pair),

    #[error("weight missing for strict pair ({},{})", .0.0 + 1, .0.1 + 1)]
    MissingWeight(Pair),

    #[error("entry at ({},{}) lies outside the relation", .0.0 + 1, .0.1 + 1)]
    SupportViolation(Pair),

    #[error("matrix is not diagonalizable")]
    NotDiagonalizable,

    #[error("spectrum is not contained in the scalar field")]
    IrrationalSpectrum,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("not a Jordan homomorphism: fails on units ({},{}) and ({},{})",
        .0.0.0 + 1, .0.0.1 + 1, .0.1.0 + 1, .0.1.1 + 1)]
    NotJordan((Pair, Pair)),

    #[error("image of the unit at ({},{}) vanishes", .0.0 + 1, .0.1 + 1)]
    VanishingUnitImage(Pair),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("transitive map is trivial")]
    GIsTrivial,

    #[error("{} and {} are not connected", .0 + 1, .1 + 1)]
    NotEquivalent(usize, usize),

    #[error("map is not unital")]
    NotUnital,

    #[error("{file}:{line}: {rule}")]
    Parse {
        file: String,
        line: usize,
        rule: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
