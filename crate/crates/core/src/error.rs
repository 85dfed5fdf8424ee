use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("system has no atoms")]
    Empty,
    #[error("length mismatch: expected {expected}, got {got} ({what})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("map sends atom {atom} to {target}, outside 0..{len}")]
    MapOutOfRange { atom: usize, target: usize, len: usize },
    #[error("measure at atom {0} is negative or not finite")]
    BadMeasure(usize),
    #[error("base measure has zero total mass")]
    ZeroMass,
    #[error("duplicate atom label {0:?}")]
    DuplicateLabel(String),
    #[error("value at atom {0} is not finite")]
    NonFinite(usize),
    #[error("support closure violated: null atom {atom} has supported preimage {preimage}")]
    SupportClosure { atom: usize, preimage: usize },
    #[error("invalid partition of unity: {0}")]
    InvalidPartition(String),
    #[error("iterate count must be at least 1")]
    NonPositiveIterate,
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("essential-mode functional charges null atom {0}")]
    EssentialNullCharge(usize),
    #[error("functional is not positive and normalized")]
    NotProbability,
    #[error("functional is not invariant (violation {0:e})")]
    NotInvariant(f64),
    #[error("functional has no divergence defect")]
    NotDivergent,
    #[error("functional does not charge any null atom in full mode")]
    NoNullCharge,
    #[error("inner problem value is -inf")]
    InfiniteInnerValue,
    #[error("phi_eps bracket vanishes at atom {0}")]
    VanishingBracket(usize),
    #[error("inner solution is not optimal: sup ratio {0}")]
    NotOptimal(f64),
    #[error("no tested ray parameter reaches the neighborhood threshold")]
    NeighborhoodUnreachable,
    #[error("norm ratio sequence does not decay within horizon {0}")]
    NonDecay(usize),
    #[error("linear program failed: {0}")]
    Lp(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
