//! Process exit codes.

use casorati_core::Error;

pub const OK: u8 = 0;
pub const COUNTEREXAMPLE: u8 = 1;
pub const OUT_OF_DOMAIN: u8 = 2;
pub const RANK_DROP: u8 = 3;
pub const HYPOTHESIS_VIOLATED: u8 = 4;
pub const BRANCH_UNDETERMINED: u8 = 5;
pub const PROVISO_VIOLATED: u8 = 6;
/// Bad arguments, unknown ids, malformed points or geometry files.
pub const USAGE: u8 = 64;
/// Any other numerical failure.
pub const INTERNAL: u8 = 70;

pub fn code_for(e: &Error) -> u8 {
    match e {
        Error::OutOfDomain { .. } => OUT_OF_DOMAIN,
        Error::RankDrop { .. } => RANK_DROP,
        Error::HypothesisViolated(_) | Error::NotASubmersion { .. } => HYPOTHESIS_VIOLATED,
        Error::BranchUndetermined { .. } => BRANCH_UNDETERMINED,
        Error::ProvisoViolated(_) => PROVISO_VIOLATED,
        Error::Unknown(_) | Error::InvalidInput(_) | Error::DimensionMismatch { .. } => USAGE,
        _ => INTERNAL,
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: code_for(&e),
            message: e.to_string(),
        }
    }
}
