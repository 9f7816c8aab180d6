use thiserror::Error;

/// Errors raised by the environment, heuristic and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("preference matrix must be square with at least 2 arms ({0})")]
    Dimension(String),

    #[error("entries ({i},{j}) and ({j},{i}) sum to {sum}, expected 1")]
    SkewViolation { i: usize, j: usize, sum: f64 },

    #[error("diagonal entry ({i},{i}) is {value}, expected 1")]
    DiagonalViolation { i: usize, value: f64 },

    #[error("off-diagonal entry ({i},{j}) = {value} is not in the open interval (0,1)")]
    RangeViolation { i: usize, j: usize, value: f64 },

    #[error("utility {index} = {value} is not a finite positive number")]
    InvalidUtility { index: usize, value: f64 },

    #[error("a duel needs two distinct arms (got {0} twice)")]
    SameArm(usize),

    #[error("arm {arm} is out of range for {n} arms")]
    ArmOutOfRange { arm: usize, n: usize },

    #[error("duels per query must be odd and positive (got {0})")]
    EvenX(u64),

    #[error("a set-winner draw needs at least two arms (got {0})")]
    EmptySubset(usize),

    #[error("pheromone entry {index} = {value} is not positive")]
    NonPositiveEntry { index: usize, value: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("utilities must satisfy u_i > u_j > 0 (got u_i = {u_i}, u_j = {u_j})")]
    UtilityOrder { u_i: f64, u_j: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no Condorcet winner exists for this preference matrix")]
    NoCondorcetWinner,

    #[error("stationary system is singular")]
    SingularSystem,

    #[error("instance too large: {0}")]
    ResourceLimit(String),

    #[error("horizon of {horizon} iterations exceeded")]
    HorizonExceeded { horizon: u64 },

    #[error("invalid environment document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            reason: "must lie in (0,1)",
        })
    }
}
