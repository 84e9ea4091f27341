use std::path::PathBuf;

use thiserror::Error;

/// Class or weight hypothesis that a theorem run depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Hypothesis {
    /// ω ∈ A_{p(M)}
    MuckenhouptPM,
    /// ψ ∈ 𝔐*
    MStar,
    /// ψ ∈ 𝔐
    M,
    /// ψ ∈ 𝔐′
    MPrime,
    /// ψ ∈ 𝔐₀
    M0,
    /// ψ ∈ F
    F,
    /// η(ψ; t) − t ≥ c > 0
    EtaGap,
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Hypothesis::MuckenhouptPM => "A_p(M)",
            Hypothesis::MStar => "M*",
            Hypothesis::M => "M",
            Hypothesis::MPrime => "M'",
            Hypothesis::M0 => "M0",
            Hypothesis::F => "F",
            Hypothesis::EtaGap => "eta gap",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite sample {value} at node {index} (x = {x})")]
    NonFiniteSample { index: usize, x: f64, value: f64 },

    #[error("modular diverged")]
    ModularDiverged,

    #[error("luxemburg bracket not found within [1e-12, 1e12]")]
    LuxemburgBracket,

    #[error("amemiya minimization failed to bracket")]
    AmemiyaBracket,

    #[error("luxemburg boundary check failed: modular(f/lambda) = {modular}")]
    LuxemburgBoundary { modular: f64 },

    #[error("complement diverged on grid")]
    ComplementDiverged,

    #[error("no exponent in (0, 1] makes M^p quasi-convex")]
    NoQuasiConvexExponent,

    #[error("invalid exponent p = {0}; need p > 1")]
    InvalidExponent(f64),

    #[error("weight is not integrable on the sampled interval [{a}, {b}]")]
    NonIntegrableWeight { a: f64, b: f64 },

    #[error("psi^2(k) = 0 at active harmonic k = {0}")]
    ZeroPsi(usize),

    #[error("psi has no continuous extension")]
    MissingExtension,

    #[error("eta({t}): psi does not fall below psi(t)/2 within the bracket bound")]
    EtaBracket { t: f64 },

    #[error("psi must be positive for k <= K_max; psi({k}) = {value}")]
    NonPositivePsi { k: usize, value: f64 },

    #[error("step h = {0} outside (0, pi)")]
    InvalidStep(f64),

    #[error("invalid modulus query: {0}")]
    InvalidModulus(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hypothesis failed: psi not in {0}")]
    PsiHypothesis(Hypothesis),

    #[error("hypothesis failed: weight not in A_p(M) (p = {p}, constant estimate {constant})")]
    WeightHypothesis { p: f64, constant: f64 },

    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    /// True for failures of a theorem's hypotheses (weight class or ψ class).
    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(self, Error::PsiHypothesis(_) | Error::WeightHypothesis { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
