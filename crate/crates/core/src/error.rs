use thiserror::Error;

/// Errors raised by the arithmetic and counting routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("operands live over different fields")]
    FieldMismatch,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("zero input not allowed: {0}")]
    ZeroInput(&'static str),

    #[error("polynomial is not square-free")]
    NotSquarefree,

    #[error("polynomial reduces to zero modulo {prime}")]
    ZeroReduction { prime: String },

    #[error("polynomials are not coprime")]
    NotCoprime,

    #[error("precondition violated: {0}")]
    PrecondViolated(String),

    #[error("budget exceeded for {what}: need {required}, budget {budget}")]
    BudgetExceeded {
        what: String,
        required: u128,
        budget: u128,
    },

    #[error("no root table for prime factor {0}")]
    MissingFactorTable(String),

    #[error("degenerate input: target is a p-th power and p divides k")]
    PthPowerDegenerate,

    #[error("{0} is not irreducible")]
    NotIrreducible(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks `required <= budget`, producing a `BudgetExceeded` that names `what`.
pub(crate) fn check_budget(what: impl Into<String>, required: u128, budget: u128) -> Result<()> {
    if required > budget {
        return Err(Error::BudgetExceeded {
            what: what.into(),
            required,
            budget,
        });
    }
    Ok(())
}
