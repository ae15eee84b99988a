//! Expected-utility representations under two sources of uncertainty.
//!
//! Preference data over prospects (state matrices `S × T`) or contingent
//! plans (`S × T × I`) can be checked against the axioms that characterize
//! product-belief expected utility, evaluated under explicit
//! representations, and fitted. Joint beliefs factorize into `p ⊗ q` exactly
//! when every 2×2 minor vanishes.

pub mod alternative;
pub mod axioms;
pub mod belief;
pub mod conditionals;
pub mod dataset;
pub mod error;
pub mod exec;
pub mod fitting;
pub mod generators;
pub mod representation;
pub mod space;
pub mod utility;

pub use alternative::{Alternative, Plan, Prospect};
pub use axioms::{
    check_dominance, check_invariance, check_natural_order, check_theorem1_hypotheses, check_theorem2_hypotheses,
    check_weak_order, check_weak_separability, summarize, AxiomReport, CheckOptions, ReportVerdict, Stage, Witness,
};
pub use belief::{Belief, JointBelief, ProductBelief};
pub use dataset::{Comparison, PreferenceDataset, Verdict};
pub use error::{Error, Result};
pub use exec::Execution;
pub use fitting::{count_violations, fit, test_independence_from_preferences, FitConfig, FitResult};
pub use representation::{
    evaluate_v, evaluate_v_nested, evaluate_w, factorize, induced_preference, normalize_representation, EURepresentation,
    FactorizationResult, Outcome, RepresentationKind,
};
pub use space::{Axis, FixedValue, StateSpace};
pub use utility::UtilityFunction;
