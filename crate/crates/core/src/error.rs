use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid effect {0}")]
    InvalidEffect(String),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NonHermitian(f64),

    #[error("invalid bipartite state: {0}")]
    InvalidState(String),

    #[error("unsupported state: Bob's marginal is rank deficient (smallest eigenvalue {0:e})")]
    RankDeficientMarginal(f64),

    #[error("noise insufficient: C is still negative ({0:e}) at lambda = 1/2")]
    NoiseInsufficient(f64),

    #[error("degenerate root: |dC/dlambda| = {0:e} at the robustness root")]
    DegenerateRoot(f64),

    #[error("robustness is not differentiable here: {0}")]
    NotDifferentiable(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}
