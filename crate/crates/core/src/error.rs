use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A state or argument lies outside the region where the equations are defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An RK stage evaluation left the domain; the caller shrinks the step.
    #[error("integration stage left the domain eps > 0")]
    DomainStep,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("eigenvalue iteration did not converge: {0}")]
    Convergence(String),
    #[error("blow-up fit failed: {0}")]
    Fit(String),
    /// Regularized pairing requested exactly at a pole; use the residue instead.
    #[error("lambda = {0} is a pole of the regularized pairing")]
    Pole(i64),
}

pub type Result<T> = std::result::Result<T, Error>;
