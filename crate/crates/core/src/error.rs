use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no wave number n >= 1 has a positive Turing value r_n^T")]
    NoPositiveTuring,

    #[error("auxiliary quantity (b+1)^2 (d1-d2)^4 - 4b (d1+d2)^4 is negative, a-/a+ undefined")]
    ComplexAux,

    #[error("characteristic equation for n = {n} has no purely imaginary root at r = {r}")]
    NoRoot { n: usize, r: f64 },

    #[error("root tracking did not converge after {iterations} iterations (|G| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("degenerate case: {0}")]
    DegenerateCase(String),

    #[error("near-resonant linear solve `{which}` (condition number {cond:e})")]
    ResonantMatrix { which: &'static str, cond: f64 },

    #[error("degenerate cubic coefficients: {0}")]
    DegenerateCubic(String),

    #[error("mixed equilibrium system is singular (d0 - b0 c0 = 0)")]
    SingularMixedSystem,

    #[error("integration blew up at t = {t}")]
    Blowup { t: f64 },

    #[error("prey density dropped to {value:e} at t = {t}, x index {index}")]
    PositivityViolation { t: f64, index: usize, value: f64 },

    #[error("diagnostic window too short: {0}")]
    WindowTooShort(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
