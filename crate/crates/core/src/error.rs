//! Crate-wide error type. Every fallible operation reports through this
//! enum so that the verification layer can classify failures uniformly
//! (in particular `BudgetExceeded`, which downgrades an instance to
//! "unknown" instead of aborting a run).

use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Off-diagonal Coxeter matrix entry outside {2, 3, 4, 6, infinity}.
    UnsupportedBond { i: usize, j: usize, m: u32 },
    /// Asymmetric matrix, wrong diagonal, or wrong shape.
    MalformedMatrix(String),
    /// Operands built over different Coxeter systems.
    SystemMismatch,
    /// The operation requires a nonreduced input word/element.
    ReducedInput,
    /// Subset does not generate a finite parabolic.
    NotFiniteType,
    /// A stated hypothesis of the operation does not hold for the input.
    HypothesisFailed(String),
    /// An enumeration would exceed the configured budget.
    BudgetExceeded { budget: usize, needed: usize },
    /// No index of the scanned segment admits a second length-1 prefix.
    NoGapIndex,
    /// Left divisibility does not hold.
    NotDivisible,
    /// Factorizations of different products combined.
    ProductMismatch,
    /// Pattern/stratum index out of range.
    IndexOutOfRange,
    /// The word does not lie in any pattern slice.
    NotClassified,
    /// Structurally invalid input (shape, duplicate, inconsistency).
    MalformedInput(String),
    /// Object rank differs from the expected stratum rank.
    RankMismatch,
    /// The morphism is not a level morphism.
    NotLevel,
    /// Index map fails the morphism condition.
    InvalidMorphism,
    /// Category has a nonidentity endomorphism or isomorphism; its nerve
    /// is infinite-dimensional. Use an adjunction-based reduction instead.
    HasLoops,
    /// A claimed functor/object map is not functorial/monotone.
    NotFunctorial(String),
    /// Subcategory pair is not a valid complementary split.
    BadPartition(String),
    /// A morphism of the sequence is excluded from the restricted category.
    ForbiddenEdge,
    /// Invalid run configuration.
    ConfigError(String),
    /// Instance id not present in a report.
    UnknownInstance(String),
    /// Integer overflow in homology computation.
    Overflow,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedBond { i, j, m } => {
                write!(f, "unsupported bond m({i},{j}) = {m}; supported: 2,3,4,6,inf")
            }
            Error::MalformedMatrix(s) => write!(f, "malformed Coxeter matrix: {s}"),
            Error::SystemMismatch => write!(f, "operands belong to different Coxeter systems"),
            Error::ReducedInput => write!(f, "input is reduced; a nonreduced input is required"),
            Error::NotFiniteType => write!(f, "subset is not finite type"),
            Error::HypothesisFailed(s) => write!(f, "hypothesis failed: {s}"),
            Error::BudgetExceeded { budget, needed } => {
                write!(f, "budget exceeded: allowed {budget}, needed at least {needed}")
            }
            Error::NoGapIndex => write!(f, "no index admits a second length-1 prefix"),
            Error::NotDivisible => write!(f, "left divisibility does not hold"),
            Error::ProductMismatch => write!(f, "factorizations of different products"),
            Error::IndexOutOfRange => write!(f, "index out of range"),
            Error::NotClassified => write!(f, "word lies in no pattern slice"),
            Error::MalformedInput(s) => write!(f, "malformed input: {s}"),
            Error::RankMismatch => write!(f, "rank differs from the expected stratum"),
            Error::NotLevel => write!(f, "morphism is not level"),
            Error::InvalidMorphism => write!(f, "index map violates the morphism condition"),
            Error::HasLoops => write!(
                f,
                "category has nonidentity endomorphisms or isomorphisms; nerve unavailable"
            ),
            Error::NotFunctorial(s) => write!(f, "not functorial: {s}"),
            Error::BadPartition(s) => write!(f, "bad subcategory partition: {s}"),
            Error::ForbiddenEdge => write!(f, "sequence contains an excluded morphism"),
            Error::ConfigError(s) => write!(f, "config error: {s}"),
            Error::UnknownInstance(s) => write!(f, "unknown instance id: {s}"),
            Error::Overflow => write!(f, "integer overflow in exact computation"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
