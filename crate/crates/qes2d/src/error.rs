use thiserror::Error;

/// Errors produced by the solvers and evaluators in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the formula is defined.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// The requested sign branch is not admissible for the given coupling.
    /// The negative branch only exists for couplings below 1/2.
    #[error("inadmissible sign branch: {0}")]
    BranchRule(String),

    /// Evaluation was requested outside the physical domain
    /// (singular axis, wrong half-plane, off the admissible axes).
    #[error("evaluation outside the admissible domain: {0}")]
    Domain(String),

    /// An iterative solver did not converge within its iteration budget.
    #[error("iteration failed to converge: {0}")]
    Convergence(String),

    /// Eigenvalues expected to be real carried an imaginary part above
    /// tolerance. This signals a coefficient bug, not a numerical hiccup.
    #[error("spectrum realness violated: {0}")]
    Realness(String),

    /// A value presented as an eigenvalue fails the truncation-consistency
    /// check of the recurrence.
    #[error("not an eigenvalue: {0}")]
    NotAnEigenvalue(String),

    /// No eigenstate exists with the requested node split.
    #[error("no eigenstate with the requested labels: {0}")]
    Labeling(String),

    /// A quadrature or grid computation could not meet its accuracy target.
    #[error("accuracy target not met: {0}")]
    Accuracy(String),

    /// A denominator or pivot degenerated below representable scale.
    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),
}

pub type Result<T> = std::result::Result<T, Error>;
