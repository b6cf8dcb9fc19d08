use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Colour and entry fields are 0-based; messages number them from 1.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("s = {s} is outside the moment domain {domain}")]
    Domain { s: f64, domain: crate::dist::MomentDomain },

    #[error("entry ({},{}): {source}", .row + 1, .col + 1)]
    AtEntry {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("colour {} out of range 1..={b}", .color + 1)]
    InvalidColor { color: usize, b: usize },

    #[error("adaptive quadrature did not converge within {max_subdivisions} subdivisions on [{a}, {b}]")]
    Quadrature { a: f64, b: f64, max_subdivisions: usize },

    #[error("matrix entry ({},{}) = {value} is not strictly positive and finite", .row + 1, .col + 1)]
    NonPositiveEntry { row: usize, col: usize, value: f64 },

    #[error("power iteration did not converge within {iterations} iterations")]
    PowerIteration { iterations: usize },

    #[error("linear system is singular")]
    Singular,

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoSignChange { what: &'static str, lo: f64, hi: f64 },

    #[error("vertex budget exceeded: {needed} vertices requested, budget {budget}")]
    Budget { needed: u128, budget: usize },

    #[error("frontier of {size} particles at generation {generation} exceeds the budget of {budget} after pruning")]
    FrontierOverflow { generation: usize, size: usize, budget: usize },

    #[error("no finite mean: rho(1) = {rho1} >= 1")]
    NoFiniteMean { rho1: f64 },

    #[error("population dynamics diverged at iteration {iteration}: median of component {} exceeds {threshold:e}", .component + 1)]
    Diverged { iteration: usize, component: usize, threshold: f64 },

    #[error("{0}")]
    Unsupported(&'static str),
}

impl Error {
    pub(crate) fn at(self, row: usize, col: usize) -> Self {
        Error::AtEntry { row, col, source: Box::new(self) }
    }
}
