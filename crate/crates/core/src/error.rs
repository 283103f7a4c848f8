use thiserror::Error;

/// Every failure the library can report.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate {sort} label `{label}`")]
    DuplicateLabel { sort: &'static str, label: String },
    #[error("relation matrix is {rows}x{cols} but the space has {points} points and {states} states")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        points: usize,
        states: usize,
    },
    #[error("ragged relation matrix: row {row} has {len} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("label `{0}` is used both as a point and as a state")]
    SortCollision(String),
    #[error("enumeration of {requested} exceeds the budget of {budget}")]
    BudgetExceeded { requested: u128, budget: u128 },

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("sort error at byte {pos}: {msg}")]
    Sort { pos: usize, msg: String },
    #[error("formula is not in normal form")]
    NotNormalized,
    #[error("unbound {sort} variable `{name}`")]
    UnboundVariable { sort: &'static str, name: String },
    #[error("unknown {sort} label `{label}`")]
    UnknownLabel { sort: &'static str, label: String },

    #[error("not adjoint at point `{point}` and state `{state}`")]
    NotAdjoint { point: String, state: String },
    #[error("ill-typed map: {0}")]
    IllTypedMap(String),
    #[error("target of the first transform is not the source of the second")]
    SpaceMismatch,
    #[error("assignment space of {requested} tuples exceeds the budget of {budget}")]
    ArityBudgetExceeded { requested: u128, budget: u128 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("topology is missing the empty set")]
    MissingEmpty,
    #[error("topology is missing the carrier")]
    MissingCarrier,
    #[error("opens {0} and {1} have a non-open intersection")]
    NotClosedUnderIntersection(String, String),
    #[error("opens {0} and {1} have a non-open union")]
    NotClosedUnderUnion(String, String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("not a topology: {0}")]
    NotATopology(String),
    #[error("sub-topology is not coarser: open {0} is missing from the finer topology")]
    NotCoarser(String),
    #[error("map is not continuous: preimage of open {0} is not open")]
    NotContinuous(String),
    #[error("invalid label `{label}`: {reason}")]
    InvalidLabel { label: String, reason: &'static str },
    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("order is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("order is not antisymmetric at `{0}` and `{1}`")]
    NotAntisymmetric(String, String),
    #[error("order is not transitive at `{0}`, `{1}`, `{2}`")]
    NotTransitive(String, String, String),

    #[error("family contains the empty set")]
    NotProper,
    #[error("family is not upward closed: {0}")]
    NotUpwardClosed(String),
    #[error("family is not closed under intersection: {0}")]
    NotIntersectionClosed(String),
    #[error("family decides neither {0} nor its complement")]
    NotUltra(String),
    #[error("map does not witness Rudin-Keisler reducibility")]
    RkCheckFailed,
    #[error("image {0} is not a member of the ultrafilter")]
    ImageNotInFilter(String),
    #[error("transform is not between ultrafilter encodings")]
    NotUltrafilterEncoding,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("perpendicularity is not symmetric at `{0}` and `{1}`")]
    NotSymmetric(String, String),
    #[error("`{0}` is self-perpendicular but is not zero")]
    SelfPerpNonZero(String),
    #[error("zero is not perpendicular to `{0}`")]
    ZeroNotPerp(String),
}

pub type Result<T> = std::result::Result<T, Error>;
