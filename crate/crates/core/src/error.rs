use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A profile failed validation at construction.
    #[error("invalid drive profile: {field}: {reason}")]
    InvalidProfile { field: String, reason: String },

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation was applied to a value of the wrong kind (e.g. a
    /// displaced-regime Γ handed to the squeezed formula).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("distribution did not converge: m = {m}, Γ = {gamma}, reached n = {n_reached} with tail mass {tail_mass:e}")]
    Convergence {
        m: usize,
        gamma: f64,
        n_reached: usize,
        tail_mass: f64,
    },

    #[error("oracle failure: {0}")]
    Oracle(String),
}

impl Error {
    pub(crate) fn profile(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidProfile {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
