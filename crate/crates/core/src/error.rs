use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite model parameter: {0}")]
    NonFiniteParameter(&'static str),

    #[error("degenerate kinetic term")]
    DegenerateKinetic,

    #[error("degenerate mass matrix")]
    DegenerateMassMatrix,

    #[error("ansatz inadmissible: {0}")]
    AnsatzInadmissible(String),

    #[error("degenerate shift: free parameters b3 and b4 must be non-zero")]
    DegenerateShift,

    #[error("decoupling failed: cross term of magnitude {residual:e}")]
    DecouplingFailed { residual: f64 },

    #[error("not directly canonical: {0}")]
    NotDirectlyCanonical(String),

    #[error("not a standard mode (pCoeff = {p_coeff}, qCoeff = {q_coeff})")]
    NotStandardMode { p_coeff: f64, q_coeff: f64 },

    #[error("invalid mode (pCoeff = {p_coeff}, qCoeff = {q_coeff}): neither standard nor inverted")]
    InvalidMode { p_coeff: f64, q_coeff: f64 },

    #[error("Omega^2 must be positive, got {0}")]
    NonPositiveOmegaSq(f64),

    #[error("ladder operator with mu = nu = 0")]
    ZeroLadder,

    #[error("no differential part: ladder operator has nu = 0")]
    NoDifferentialPart,

    #[error("not tempered: Gaussian exponent has positive real part {sigma_re}")]
    NotTempered { sigma_re: f64 },

    #[error("truncated basis needs N >= 2, got {0}")]
    TruncationTooSmall(usize),

    #[error("invalid time grid: need 0 < dt < T (dt = {dt}, T = {horizon})")]
    InvalidTimeGrid { dt: f64, horizon: f64 },

    #[error("blow-up at t = {t}")]
    BlowUp { t: f64 },

    #[error("malformed range: {0}")]
    MalformedRange(String),

    #[error("missing fixture file: {}", .0.display())]
    MissingFixture(PathBuf),

    #[error("malformed fixture {}: {msg}", .path.display())]
    FixtureParse { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
