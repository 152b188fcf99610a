use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("k must be positive, got {0}")]
    NonPositiveWavenumber(f64),

    #[error("singular ring assembly: {0}")]
    SingularAssembly(String),

    #[error("extremal node: |s11| = {0} is within 1e-12 of 1")]
    Extremal(f64),

    #[error("ring is not symmetric: node II junction differs from node I")]
    NotSymmetric,

    #[error("degenerate localized state at n = {n}: coefficient norm {norm:e} vanishes")]
    DegenerateState { n: u32, norm: f64 },
}

pub(crate) fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveWavenumber(k))
    }
}
