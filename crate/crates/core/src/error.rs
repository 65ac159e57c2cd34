use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric input is outside the range the model is defined on.
    #[error("{field} = {value} is out of range: {expected}")]
    Domain {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// Inputs are individually valid but make a formula divide by zero or
    /// otherwise collapse.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The result is only defined in a regime the inputs do not satisfy.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(field: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            field,
            value,
            expected,
        }
    }
}
