use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown built-in graph `{0}`")]
    UnknownGraph(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("spin configuration {config:#x} does not fit a {n}-vertex graph")]
    ConfigMismatch { config: u64, n: usize },
    #[error("unsupported size: {what} is {n}, limit is {max}")]
    UnsupportedSize { what: &'static str, n: usize, max: usize },
    #[error("ground-state manifold incomplete: dimer flip of state {state:#x} leads outside it")]
    ManifoldIncomplete { state: u64 },
    #[error(
        "tunneling components {first} and {second} tie for the lowest eigenvalue {eigenvalue}"
    )]
    DegenerateGroundState { first: usize, second: usize, eigenvalue: f64 },
    #[error("eigensolver did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("norm drifted by {drift:e} during evolution")]
    NormDrift { drift: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("distribution is not normalized (total mass {total})")]
    NotNormalized { total: f64 },
    #[error("ground energy must be negative, got {0}")]
    NonNegativeGroundEnergy(i32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("fidelity {target} is not reached by the curve")]
    NoMatch { target: f64 },
    #[error("fidelity {target} is matched on several curve segments {segments:?}")]
    Ambiguous { target: f64, segments: Vec<usize> },
}
