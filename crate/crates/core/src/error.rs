use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HexError {
    #[error("unknown oracle &{0}")]
    UnknownOracle(String),
    #[error("gl-reduct requires ordinary program")]
    NotOrdinary,
    #[error("family derivation cap exceeded: {what} has {size} atoms, cap is {cap}")]
    CapExceeded { what: String, size: usize, cap: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("inconsistent support set at line {line}: atom {atom} occurs with both signs")]
    InconsistentSupportSet { line: usize, atom: String },
    #[error("family polarity mismatch for {external}: expected {expected}, found {found}")]
    FamilyPolarityMismatch { external: String, expected: char, found: char },
    #[error("incomplete family for {external}: assignment {assignment} is not covered")]
    IncompleteFamily { external: String, assignment: String },
    #[error("unsound family for {external}: assignment {assignment} matches a member but the oracle disagrees")]
    UnsoundFamily { external: String, assignment: String },
    #[error("no support family available for {0}")]
    MissingFamily(String),
    #[error("external atom {0} occurs under default negation; positive inlining is unsound for it")]
    NegatedOccurrence(String),
    #[error("family for {external} mentions {atom}, which is not an input atom")]
    FamilyDomainMismatch { external: String, atom: String },
    #[error("{predicate} is not an input predicate of {external}")]
    NotAnInput { external: String, predicate: String },
    #[error("symbol {0} is not fresh")]
    NotFresh(String),
    #[error("not a witness: {0}")]
    InvalidWitness(String),
    #[error("invalid benchmark spec: {0}")]
    InvalidBenchSpec(String),
    #[error("unknown {kind} {name}; available: {available}")]
    UnknownStrategy { kind: &'static str, name: String, available: String },
    #[error("{0}")]
    Io(String),
}

impl HexError {
    pub fn is_cap(&self) -> bool {
        matches!(self, HexError::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, HexError>;
