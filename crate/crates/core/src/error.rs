use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("wavenumber {k} is within {margin} of the cutoff {n}*pi")]
    Cutoff { k: f64, n: u32, margin: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("mesh resolution: {0}")]
    Resolution(String),

    #[error("linear solver: {0}")]
    Solver(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("Gram matrix is numerically singular (condition number {condition:.3e}): {detail}")]
    SingularGram { condition: f64, detail: String },

    #[error("seed perturbation lies in the span of the right-inverse basis (residual {residual:.3e})")]
    DegenerateSeed { residual: f64 },

    #[error("fixed point diverged: {0}")]
    Divergence(String),

    #[error("partition cell {cell} has zero area on the quadrature set")]
    ZeroAreaCell { cell: usize },

    #[error("slab index 1+rho = {0} is not positive")]
    EvanescentSlab(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Cutoff { .. } => "cutoff",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Resolution(_) => "resolution",
            Error::Solver(_) => "solver",
            Error::Dimension(_) => "dimension",
            Error::SingularGram { .. } => "singular_gram",
            Error::DegenerateSeed { .. } => "degenerate_seed",
            Error::Divergence(_) => "divergence",
            Error::ZeroAreaCell { .. } => "zero_area_cell",
            Error::EvanescentSlab(_) => "evanescent_slab",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
