use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid laminate: {0}")]
    InvalidSpec(String),

    #[error("interface point: ({x}, {y}) lies on a material interface")]
    InterfacePoint { x: f64, y: f64 },

    #[error("point ({x}, {y}) lies outside the domain")]
    OutOfDomain { x: f64, y: f64 },

    #[error("tip abscissa {0} is outside [0, L]")]
    TipOutOfRange(f64),

    #[error("inadmissible tip: {0} is not on the tip lattice")]
    InadmissibleTip(f64),

    #[error("misaligned mesh: {0}")]
    MisalignedMesh(String),

    #[error("node ({x}, {y}) is not on the Dirichlet boundary")]
    NotOnDirichletBoundary { x: f64, y: f64 },

    #[error("invalid stiffness: {0}")]
    InvalidStiffness(String),

    #[error("linear solver did not converge: relative residual {residual:e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("field does not belong to this mesh: {0}")]
    MeshMismatch(String),

    #[error("invalid virtual extension: {0}")]
    InvalidVirtualExtension(String),

    #[error("straddles interface: [{l}, {l_plus}] crosses a material interface")]
    StraddlesInterface { l: f64, l_plus: f64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("closed form not applicable: {0}")]
    ClosedFormNotApplicable(String),

    #[error("rescaling inapplicable: {0}")]
    RescalingInapplicable(String),

    #[error("invalid load program: {0}")]
    InvalidLoad(String),

    #[error("non-monotone load: use nonmonotone_wrap")]
    NonMonotoneLoad,

    #[error("invariant breach: {0}")]
    InvariantBreach(String),

    #[error("effective toughness unavailable: {0}")]
    EffectiveToughnessUnavailable(String),

    #[error("window around {l} contains no lattice point")]
    EmptyWindow { l: f64 },

    #[error("invalid window: {0}")]
    InvalidWindow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
