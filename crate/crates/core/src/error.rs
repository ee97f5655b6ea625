use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("conformal factor is not nodeless: Omega({x}) = {value}")]
    NotNodeless { x: f64, value: f64 },

    #[error("metric is degenerate at x = {x}: Omega = {value}")]
    DegenerateMetric { x: f64, value: f64 },

    #[error("x = {x} lies outside the tabulated hull [{lo}, {hi}]")]
    OutOfHull { x: f64, lo: f64, hi: f64 },

    #[error("non-finite value of Omega at x = {x}")]
    NonFinite { x: f64 },

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate}, error {error}")]
    QuadratureNonConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("integral of 1/Omega over the real line does not converge: {0}")]
    DivergentIntegral(String),

    #[error("quadrature {quadrature} disagrees with closed form {closed_form} (relative {relative})")]
    QuadratureMismatch {
        quadrature: f64,
        closed_form: f64,
        relative: f64,
    },

    #[error("inadmissible parameters: k_v^2 = {kv2} < k_y^2 + M^2 = {rhs}")]
    Inadmissible { kv2: f64, rhs: f64 },

    #[error("empty k_y range: k_v^2 = {kv2} < M^2 = {m2}")]
    EmptyRange { kv2: f64, m2: f64 },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("grid under-resolves the phase: h * |lambda| * max Omega = {0} > 0.5")]
    UnderResolved(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("eigensolver did not converge: {0}")]
    EigenNonConvergence(String),
}
