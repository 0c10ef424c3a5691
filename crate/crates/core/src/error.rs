use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An integrand produced NaN or an infinity at a quadrature node.
    #[error("integrand is not finite at node {index} (angle {angle}): {value}")]
    NonFinite { index: usize, angle: f64, value: f64 },

    #[error("integrand is zero at every node")]
    ZeroIntegrand,

    #[error("quadrature did not converge within {max_nodes} nodes (relative change {relative_change:e})")]
    NotConverged { max_nodes: usize, relative_change: f64 },

    /// The conditioning record has zero probability under the prior.
    #[error("impossible conditioning event: {0}")]
    ImpossibleConditioning(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// `|cos φ0| > 1`: the count asymmetry exceeds the fringe visibility.
    #[error("fringe-visibility violation: cos(phi0) = {cos_phi0}")]
    FringeVisibility { cos_phi0: f64 },

    #[error("conditioning event never sampled in {replicas} replicas")]
    NeverSampled { replicas: u64 },

    #[error("input error: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
