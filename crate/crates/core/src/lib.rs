//! Competitive equilibria for indivisible items and agents with unequal
//! incomes.
//!
//! Agents hold strict preferences over bundles and spend a fiat budget.
//! [`cefai::solve`] builds an equilibrium for generic incomes whenever the
//! number of items is at most three, or four with at most three agents.
//! [`oracle`] decides existence by exhaustive search on small instances.

pub mod bundle;
pub mod cefai;
pub mod error;
pub mod fairness;
pub mod instances;
pub mod lp;
pub mod market;
pub mod oracle;
pub mod pixep;
pub mod preference;
pub mod rational;
pub mod sampling;

pub use bundle::{Bundle, ItemNames};
pub use cefai::{excluded_hyperplanes, is_generic, solve, Hyperplane, Range, SolveTranscript};
pub use error::{Error, Result};
pub use fairness::{audit_ce_fairness, check_guarantee, maximin, FairnessAudit, GuaranteeCheck};
pub use instances::{counterexample_4x4, counterexample_5x2, stratified_incomes, NamedInstance};
pub use market::{
    classify_bundle, is_dominated_by, verify_ce, verify_ce_with, AffordabilityRule, Allocation,
    BundleClassification, CEPair, CEReport, IncomeVector, PriceVector, Violation, ViolationKind,
};
pub use oracle::{ce_exists, ce_exists_report, no_ce_on_region, ExistenceReport, RegionReport};
pub use pixep::{
    check_requirements, execute_to_ce, resolve_epsilon, spe_outcomes, AffinePrice, EpsilonInterval,
    Execution, GameNode, Pick, Pixep, RequirementConstraint, Turn,
};
pub use preference::{
    additive_preference, complete_partial, make_preference, random_completion, random_preference,
    BundleClass, PartialRelations, PreferenceOrder,
};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
pub use sampling::{GridSampler, LinearConstraint, Region};
