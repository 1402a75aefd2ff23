use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the domain of `{chart}`")]
    OutsideDomain { chart: String, point: Vec<f64> },

    #[error("degenerate metric at {point:?}: |det| = {det:e} <= {threshold:e}")]
    DegenerateMetric {
        point: Vec<f64>,
        det: f64,
        threshold: f64,
    },

    #[error("metric at {point:?} is not symmetric (defect {defect:e})")]
    AsymmetricMetric { point: Vec<f64>, defect: f64 },

    #[error("signature mismatch at {point:?}: expected {expected} negative eigenvalue(s), found {found}")]
    SignatureMismatch {
        point: Vec<f64>,
        expected: usize,
        found: usize,
    },

    #[error("differential of the immersion has rank {rank} < {expected} at {point:?}")]
    RankDeficient {
        point: Vec<f64>,
        rank: usize,
        expected: usize,
    },

    #[error("not null at {point:?}: relative smallest eigenvalue {residual:e}")]
    NotNull { point: Vec<f64>, residual: f64 },

    #[error("induced metric has a {dim}-dimensional kernel at {point:?}")]
    KernelTooLarge { point: Vec<f64>, dim: usize },

    #[error("rigging tangent at {point:?}: |g(zeta, radical)| = {pairing:e}")]
    RiggingTangent { point: Vec<f64>, pairing: f64 },

    #[error("gradient vanishes at {point:?}")]
    VanishingGradient { point: Vec<f64> },

    #[error("rigging `{0}` carries no potential function")]
    NotGradient(String),

    #[error("eikonal profile blows up at {at} before reaching {target}")]
    BlowUp { at: f64, target: f64 },

    #[error("degenerate span of the supplied vectors")]
    DegenerateSpan,

    #[error("unknown catalog name `{0}`")]
    UnknownName(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("expression error: {0}")]
    Expr(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
