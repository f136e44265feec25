//! Covariate prioritization for planning a new study in a meta-analysis.
//!
//! Given the current evidence on each covariate's effect, the crate projects
//! what a planned study is expected to add, scores each covariate with seven
//! expected-impact criteria and sorts covariates into three categories:
//!
//! * **I**: the evidence is already convincing,
//! * **II**: inconclusive and worth measuring in the new study,
//! * **III**: no clinically relevant effect is expected to emerge.
//!
//! The [`planner`] module sweeps the planned sample size and the prior
//! inclusion probability.

pub mod criteria;
mod erf;
pub mod error;
pub mod evidence;
pub mod planner;
pub mod selection;
pub mod stat_core;

pub use criteria::{
    assess, bayes_factors, classify, conditional_power, criterion_value, expectation_change,
    kl_expected_impact, lcl_change, p_value_change, BayesFactors, Category, CriterionConfig,
    CriterionId, CriterionResult,
};
pub use error::{Error, Result};
pub use evidence::{
    init_spike_slab, project_full, project_plain, project_spike_slab, project_variance_fixed,
    project_variance_random, NormalSummary, ProjectedEvidence, SpikeSlabState, StudyPlan,
};
pub use planner::{
    assess_all, min_sample_size, sweep_prior, sweep_sample_size, Assessment, Covariate,
    MinSampleSize, SampleSizeSearch, SearchMethod, SweepAxis, SweepResult, SweepSpec,
};
pub use selection::{
    bfdr_categorize, bfdr_select, rank_covariates, BfdrOutcome, LfdrEntry, RankTable,
};
pub use stat_core::{
    normal_cdf, normal_pdf, normal_quantile, pool_fixed, Probability, WeightedEstimate,
};
