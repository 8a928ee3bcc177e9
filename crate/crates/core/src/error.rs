//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("division by a non-unit series (zero constant term)")]
    NonUnitDivisor,
    #[error("substituted series for {0} has a nonzero constant term")]
    NonzeroConstantTerm(&'static str),
    #[error("singular Jacobian at the origin")]
    SingularJacobian,
    #[error("Levi pivot F_zzbar(0) vanishes")]
    ZeroLeviPivot,
    #[error("hypersurface is 2-degenerate at the origin")]
    Degenerate,
    #[error("valid order {have} is below the required order {need}")]
    InsufficientOrder { have: u32, need: u32 },
    #[error("hypersurface fails validation: {0}")]
    Invalid(String),
    #[error("nonzero real scaling required, got zero")]
    ZeroScaling,
}
