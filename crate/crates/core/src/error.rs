use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("fact {0} is not endogenous")]
    FactNotEndogenous(String),
    #[error("fact {0} is not in the database")]
    FactAbsent(String),
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("duplicate fact {0}")]
    DuplicateFact(String),
    #[error("relation {relation} has arity {expected}, got {got}")]
    ArityMismatch {
        relation: String,
        expected: usize,
        got: usize,
    },
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{0}")]
    Parse(String),
    #[error("head variable {0} does not occur in the body")]
    UnsafeHead(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("relation {0} is missing from the database schema")]
    SchemaMismatch(String),
    #[error("value function reads non-numeric constant {0}")]
    NonNumericConstant(String),
    #[error("invalid value function: {0}")]
    InvalidValueFunction(String),
    #[error("invalid aggregate: {0}")]
    InvalidAggregate(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("{n} endogenous facts exceed the brute-force cap of {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("sum_k vectors have mismatched lengths")]
    LengthMismatch,
    #[error("query is not all-hierarchical")]
    NotAllHierarchical,
    #[error("query is not q-hierarchical")]
    NotQHierarchical,
    #[error("query is not exists-hierarchical")]
    NotExistsHierarchical,
    #[error("query is not sq-hierarchical")]
    NotSQHierarchical,
    #[error("query is not a connected sq-hierarchical query")]
    NotConnectedSQ,
    #[error("query has a self-join on relation {0}")]
    SelfJoin(String),
    #[error("intractable: {0}")]
    IntractableClass(String),
    #[error("table variant mismatch")]
    VariantMismatch,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("map is not injective on {0}")]
    NonInjectiveOnDomain(String),
    #[error("engine {0} does not apply: {1}")]
    EngineNotApplicable(String, String),
}

pub type Result<T> = std::result::Result<T, Error>;
