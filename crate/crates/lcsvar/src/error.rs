//! Crate error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Model parameters violate an invariant (m >= 2, 0 < p < 1).
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    /// An enumeration or tabulation would exceed its stated budget.
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    /// An index or length argument is outside its admissible range.
    #[error("argument out of range: {0}")]
    OutOfRange(String),

    /// Exact rational arithmetic overflowed machine-width integers.
    #[error("exact rational overflow in {0}")]
    RationalOverflow(&'static str),

    /// A constants-ledger invariant failed; the message names the inequality.
    #[error("constants ledger invariant violated: {0}")]
    LedgerInvariant(String),

    /// The slope-event window [nu*n, n] does not intersect the interval I.
    #[error("empty slope window: {0}")]
    EmptySlopeWindow(String),

    /// Config file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
