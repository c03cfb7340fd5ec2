use thiserror::Error;

use crate::bundle::Bundle;
use crate::cefai::Hyperplane;
use crate::pixep::RequirementConstraint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bundle {0} listed more than once")]
    DuplicateBundle(Bundle),
    #[error("bundle {0} missing from ranking")]
    MissingBundle(Bundle),
    #[error("bundle {superset} ranked below its subset {subset}")]
    MonotonicityViolation { subset: Bundle, superset: Bundle },
    #[error("relations are cyclic: {}", format_cycle(.0))]
    CyclicRelations(Vec<Bundle>),
    #[error("bundles {0} and {1} have equal value")]
    TiedSubsetSums(Bundle, Bundle),
    #[error("item count {0} outside supported range 1..=16")]
    ItemCount(usize),
    #[error("bundle {bundle} is not a subset of a {m}-item universe")]
    OutOfUniverse { bundle: Bundle, m: usize },

    #[error("income of agent {0} must be positive")]
    NonPositiveIncome(usize),
    #[error("price of item {0} must be positive")]
    NonPositivePrice(usize),
    #[error("allocation is not a partition: {0}")]
    InvalidAllocation(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("agent {agent} prices do not sum to income (R1)")]
    R1Violation { agent: usize },
    #[error("no epsilon > 0 satisfies the price requirements; binding constraint: {0}")]
    EmptyEpsilonInterval(RequirementConstraint),
    #[error("no subgame-perfect execution yields a competitive equilibrium")]
    NoValidSpe,

    #[error("incomes are not generic: {0}")]
    NotGeneric(Hyperplane),
    #[error("unsupported case m={m}, n={n}: {reason}")]
    UnsupportedCase { m: usize, n: usize, reason: String },
    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("instance with {m} items and {n} agents is too large for exhaustive search")]
    InstanceTooLarge { m: usize, n: usize },
    #[error("no income vector found in region after {0} attempts")]
    EmptyRegionSampler(usize),
    #[error("unknown range label {0:?}")]
    UnknownRange(String),
}

fn format_cycle(cycle: &[Bundle]) -> String {
    cycle
        .iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}
