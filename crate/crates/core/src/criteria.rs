//! Expected-scientific-impact criteria for a single covariate.
//!
//! Each criterion compares the current evidence `N(μ₁, σ₁²)` with the
//! projected post-study evidence `N(μ₁, σ₂²)`. The frequentist criteria use
//! the normal summaries only; the Bayesian ones use the spike-and-slab states.

use std::fmt;
use std::str::FromStr;

use crate::error::{finite, open_unit, positive, Error, Result};
use crate::evidence::{NormalSummary, ProjectedEvidence};
use crate::stat_core::{ln_std_normal_sf, std_normal_cdf, two_sided_critical};

/// User-set parameters shared by all criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionConfig {
    /// Smallest clinically significant effect.
    pub delta: f64,
    /// Two-sided significance level.
    pub alpha: f64,
    /// Variance of the vague initial distribution in the KL criterion.
    pub sigma_init_sq: f64,
    /// Variance floor added in the KL criterion.
    pub omega: f64,
    /// Prior inclusion probability.
    pub pi0: f64,
    /// Bayes factor regarded as decisive support.
    pub bf_limit: f64,
    pub bfdr_level: f64,
    /// Conditional power separating category II from III.
    pub cp_threshold: f64,
}

impl Default for CriterionConfig {
    fn default() -> Self {
        Self {
            delta: 0.03,
            alpha: 6.9e-4,
            sigma_init_sq: 100.0,
            omega: 1e-4,
            pi0: 1e-6,
            bf_limit: 1e6,
            bfdr_level: 0.05,
            cp_threshold: 0.8,
        }
    }
}

impl CriterionConfig {
    pub fn validate(&self) -> Result<()> {
        finite("delta", self.delta)?;
        if self.delta < 0.0 {
            return Err(Error::OutOfRange {
                name: "delta",
                range: "[0, inf)",
                value: self.delta,
            });
        }
        open_unit("alpha", self.alpha)?;
        positive("sigma_init_sq", self.sigma_init_sq)?;
        positive("omega", self.omega)?;
        open_unit("pi0", self.pi0)?;
        finite("bf_limit", self.bf_limit)?;
        if self.bf_limit <= 1.0 {
            return Err(Error::OutOfRange {
                name: "bf_limit",
                range: "(1, inf)",
                value: self.bf_limit,
            });
        }
        open_unit("bfdr_level", self.bfdr_level)?;
        open_unit("cp_threshold", self.cp_threshold)?;
        Ok(())
    }

    /// `Φ⁻¹(1 - α/2)`.
    pub fn critical_value(&self) -> Result<f64> {
        two_sided_critical(self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriterionId {
    /// Conditional power.
    Cp,
    /// Change of the log p-value against the benchmark effect.
    DeltaLogP,
    /// Change of the lower confidence limit.
    Lcl,
    /// Kullback-Leibler based impact.
    Kl,
    /// Difference between prior and posterior expectation.
    DeltaE,
    /// Bayes factor before and after.
    Bf,
    /// Local false discovery rate feeding the BFDR selection.
    BfdrInput,
}

impl CriterionId {
    pub const ALL: [CriterionId; 7] = [
        CriterionId::Cp,
        CriterionId::DeltaLogP,
        CriterionId::Lcl,
        CriterionId::Kl,
        CriterionId::DeltaE,
        CriterionId::Bf,
        CriterionId::BfdrInput,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionId::Cp => "CP",
            CriterionId::DeltaLogP => "DLOGP",
            CriterionId::Lcl => "LCL",
            CriterionId::Kl => "KL",
            CriterionId::DeltaE => "DE",
            CriterionId::Bf => "BF",
            CriterionId::BfdrInput => "BFDR",
        }
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CriterionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = match s.trim().to_ascii_uppercase().as_str() {
            "CP" => CriterionId::Cp,
            "DLOGP" | "DELTA_LOG_P" => CriterionId::DeltaLogP,
            "LCL" => CriterionId::Lcl,
            "KL" => CriterionId::Kl,
            "DE" | "DELTA_E" => CriterionId::DeltaE,
            "BF" => CriterionId::Bf,
            "BFDR" | "BFDR_INPUT" => CriterionId::BfdrInput,
            other => return Err(Error::Unsupported(format!("unknown criterion '{other}'"))),
        };
        Ok(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    /// Convincing evidence already; no further study needed.
    I,
    /// Inconclusive but promising: the replication targets.
    II,
    /// No clinically significant effect expected.
    III,
    /// The criterion ranks but does not categorise.
    Unranked,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::I => "I",
            Category::II => "II",
            Category::III => "III",
            Category::Unranked => "UNRANKED",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One criterion's outcome for one covariate. `value` is `None` when the
/// criterion is not applicable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionResult {
    pub criterion: CriterionId,
    pub value: Option<f64>,
    pub category: Category,
}

impl CriterionResult {
    pub fn applicable(&self) -> bool {
        self.value.is_some()
    }
}

fn check_reduction(before: &NormalSummary, after_variance: f64, strict: bool) -> Result<()> {
    positive("after variance", after_variance)?;
    let ok = if strict {
        after_variance < before.variance
    } else {
        after_variance <= before.variance
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NoVarianceReduction {
            before: before.variance,
            after: after_variance,
        })
    }
}

/// Power of the updated meta-analysis to reject β = 0 when the new study's
/// estimate is drawn around the benchmark effect δ.
pub fn conditional_power(
    before: &NormalSummary,
    after_variance: f64,
    cfg: &CriterionConfig,
) -> Result<f64> {
    check_reduction(before, after_variance, true)?;
    let c = cfg.critical_value()?;
    let a1 = 1.0 / before.variance;
    let a2 = 1.0 / after_variance;
    let r = (a2 - a1).sqrt();
    let shift = before.mean * a1;
    let crit = c * a2.sqrt();
    let upper = std_normal_cdf((shift - crit) / r + cfg.delta * r);
    let lower = std_normal_cdf((-shift - crit) / r - cfg.delta * r);
    Ok(upper + lower)
}

/// `ln p₁ − ln E(p₂)` for the test of β = δ; `None` when μ₁ ≤ δ.
pub fn p_value_change(
    before: &NormalSummary,
    after_variance: f64,
    cfg: &CriterionConfig,
) -> Result<Option<f64>> {
    check_reduction(before, after_variance, false)?;
    let d = before.mean - cfg.delta;
    if d <= 0.0 {
        return Ok(None);
    }
    // the factor 2 of the two-sided p-values cancels
    let ln_p1 = ln_std_normal_sf(d / before.se());
    let ln_p2 = ln_std_normal_sf(d / after_variance.sqrt());
    Ok(Some(ln_p1 - ln_p2))
}

fn lower_limit(mean: f64, variance: f64, alpha: f64) -> Result<f64> {
    let z = two_sided_critical(alpha)?;
    Ok(mean - variance.sqrt() * z)
}

/// Expected gain of the (zero-clipped) lower confidence limit.
pub fn lcl_change(
    before: &NormalSummary,
    after_variance: f64,
    cfg: &CriterionConfig,
) -> Result<f64> {
    check_reduction(before, after_variance, false)?;
    let l1 = lower_limit(before.mean, before.variance, cfg.alpha)?;
    let l2 = lower_limit(before.mean, after_variance, cfg.alpha)?;
    Ok(l2.max(0.0) - l1.max(0.0))
}

/// KL-based impact: importance of the covariate times the expected gain in
/// divergence from the vague initial distribution.
pub fn kl_expected_impact(
    before: &NormalSummary,
    after_variance: f64,
    cfg: &CriterionConfig,
) -> Result<f64> {
    check_reduction(before, after_variance, false)?;
    let (m, s1, s2) = (before.mean, before.variance, after_variance);
    let w = cfg.omega;
    let importance = (m * m + s2) / (s2 + w);
    let gain = (2.0 * s2 - s1) / (cfg.sigma_init_sq + w) - ((s2 + w) / (s1 + w)).ln();
    Ok(0.25 * importance * gain)
}

fn spike_states(
    p: &ProjectedEvidence,
) -> Result<(
    crate::evidence::SpikeSlabState,
    crate::evidence::SpikeSlabState,
)> {
    match (p.spike_before, p.spike_after) {
        (Some(b), Some(a)) => Ok((b, a)),
        _ => Err(Error::MissingSpikeState),
    }
}

/// `π̂₂ μ̂₂ − π₁ μ₁`.
pub fn expectation_change(projected: &ProjectedEvidence) -> Result<f64> {
    let (before, after) = spike_states(projected)?;
    Ok(after.inclusion_prob() * after.slab.mean - before.inclusion_prob() * before.slab.mean)
}

/// Bayes factors relative to the prior inclusion odds, kept as natural logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesFactors {
    pub ln_before: f64,
    pub ln_after: f64,
}

impl BayesFactors {
    /// May be `+∞` when the posterior odds overflow; check `is_finite`.
    pub fn before(&self) -> f64 {
        self.ln_before.exp()
    }

    pub fn after(&self) -> f64 {
        self.ln_after.exp()
    }

    pub fn is_finite(&self) -> bool {
        self.ln_before.is_finite() && self.ln_after.is_finite()
    }

    /// `(after > limit, before > limit)`.
    pub fn bits(&self, bf_limit: f64) -> (bool, bool) {
        let ln_limit = bf_limit.ln();
        (self.ln_after > ln_limit, self.ln_before > ln_limit)
    }

    pub fn category(&self, bf_limit: f64) -> Category {
        match self.bits(bf_limit) {
            (_, true) => Category::I,
            (true, false) => Category::II,
            (false, false) => Category::III,
        }
    }
}

pub fn bayes_factors(projected: &ProjectedEvidence, cfg: &CriterionConfig) -> Result<BayesFactors> {
    let (before, after) = spike_states(projected)?;
    let ln_prior = crate::evidence::log_odds(open_unit("pi0", cfg.pi0)?);
    Ok(BayesFactors {
        ln_before: before.log_odds() - ln_prior,
        ln_after: after.log_odds() - ln_prior,
    })
}

/// Category implied by one criterion's own rule.
pub fn classify(
    criterion: CriterionId,
    projected: &ProjectedEvidence,
    cfg: &CriterionConfig,
) -> Result<Category> {
    let before = &projected.before;
    let after_var = projected.after.variance;
    let c = cfg.critical_value()?;
    let bf_label =
        || -> Result<Category> { Ok(bayes_factors(projected, cfg)?.category(cfg.bf_limit)) };
    let category = match criterion {
        CriterionId::Cp => {
            if (before.mean - cfg.delta) / before.se() > c {
                Category::I
            } else if conditional_power(before, after_var, cfg)? >= cfg.cp_threshold {
                Category::II
            } else {
                Category::III
            }
        }
        CriterionId::DeltaLogP => {
            let z1 = (before.mean - cfg.delta) / before.se();
            let p1 = 2.0 * ln_std_normal_sf(z1).exp();
            if p1 < cfg.alpha {
                Category::I
            } else if before.mean <= cfg.delta {
                Category::III
            } else {
                Category::II
            }
        }
        CriterionId::Lcl => {
            if lower_limit(before.mean, before.variance, cfg.alpha)? > cfg.delta {
                Category::I
            } else if lcl_change(before, after_var, cfg)? > 0.0 {
                Category::II
            } else {
                Category::III
            }
        }
        CriterionId::Kl | CriterionId::DeltaE => {
            if projected.spike_after.is_some() {
                bf_label()?
            } else {
                Category::Unranked
            }
        }
        CriterionId::Bf => bf_label()?,
        CriterionId::BfdrInput => {
            return Err(Error::Unsupported(
                "BFDR categories are assigned across covariates by selection::bfdr_categorize"
                    .into(),
            ))
        }
    };
    Ok(category)
}

/// Value of one criterion; `None` when not applicable.
///
/// BF reports the natural log of the post-study Bayes factor and BFDR the
/// post-study local false discovery rate.
pub fn criterion_value(
    criterion: CriterionId,
    projected: &ProjectedEvidence,
    cfg: &CriterionConfig,
) -> Result<Option<f64>> {
    let before = &projected.before;
    let after_var = projected.after.variance;
    let value = match criterion {
        CriterionId::Cp => Some(conditional_power(before, after_var, cfg)?),
        CriterionId::DeltaLogP => p_value_change(before, after_var, cfg)?,
        CriterionId::Lcl => Some(lcl_change(before, after_var, cfg)?),
        CriterionId::Kl => Some(kl_expected_impact(before, after_var, cfg)?),
        CriterionId::DeltaE => Some(expectation_change(projected)?),
        CriterionId::Bf => Some(bayes_factors(projected, cfg)?.ln_after),
        CriterionId::BfdrInput => Some(spike_states(projected)?.1.exclusion_prob()),
    };
    Ok(value)
}

/// All seven criteria for one covariate. The BFDR entry is left
/// `Unranked`; its category comes from the cross-covariate selection.
pub fn assess(
    projected: &ProjectedEvidence,
    cfg: &CriterionConfig,
) -> Result<Vec<CriterionResult>> {
    CriterionId::ALL
        .iter()
        .map(|&criterion| {
            let value = criterion_value(criterion, projected, cfg)?;
            let category = match criterion {
                CriterionId::BfdrInput => Category::Unranked,
                _ => classify(criterion, projected, cfg)?,
            };
            Ok(CriterionResult {
                criterion,
                value,
                category,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::{project_full, StudyPlan};
    use approx::assert_relative_eq;

    fn ns(m: f64, se: f64) -> NormalSummary {
        NormalSummary::from_se(m, se).unwrap()
    }

    fn same_size(m: f64, se: f64) -> ProjectedEvidence {
        let plan = StudyPlan::with_variance(se * se, 0.0).unwrap();
        project_full(ns(m, se), &plan, 1e-6).unwrap()
    }

    fn round(x: f64, dp: i32) -> f64 {
        let f = 10f64.powi(dp);
        (x * f).round() / f
    }

    #[test]
    fn conditional_power_table_rows() {
        let cfg = CriterionConfig::default();
        for &(m, se, want) in &[
            (0.045, 0.009, 1.00),
            (0.031, 0.010, 0.90),
            (0.042, 0.018, 0.21),
        ] {
            let cp = conditional_power(&ns(m, se), se * se / 2.0, &cfg).unwrap();
            assert_eq!(round(cp, 2), want, "{m} {se}: {cp}");
        }
    }

    #[test]
    fn conditional_power_requires_reduction() {
        let cfg = CriterionConfig::default();
        let b = ns(0.04, 0.01);
        assert!(conditional_power(&b, 1e-4, &cfg).is_err());
        assert!(conditional_power(&b, 2e-4, &cfg).is_err());
    }

    #[test]
    fn p_value_change_rows() {
        let cfg = CriterionConfig::default();
        let lepr = p_value_change(&ns(0.045, 0.009), 0.009 * 0.009 / 2.0, &cfg)
            .unwrap()
            .unwrap();
        assert_eq!(round(lepr, 1), 1.6);
        let il1f10 = p_value_change(&ns(0.072, 0.017), 0.017 * 0.017 / 2.0, &cfg)
            .unwrap()
            .unwrap();
        assert_eq!(round(il1f10, 1), 3.3);
        let at_delta = p_value_change(&ns(0.03 + 1e-12, 0.01), 5e-5, &cfg)
            .unwrap()
            .unwrap();
        assert!(at_delta.abs() < 1e-9);
        assert_eq!(p_value_change(&ns(0.004, 0.010), 5e-5, &cfg).unwrap(), None);
    }

    #[test]
    fn lcl_rows_and_clipping() {
        let cfg = CriterionConfig::default();
        let lepr = lcl_change(&ns(0.045, 0.009), 0.009 * 0.009 / 2.0, &cfg).unwrap();
        assert_eq!(round(lepr, 3), 0.009);
        let sall1 = lcl_change(&ns(0.089, 0.028), 0.028 * 0.028 / 2.0, &cfg).unwrap();
        assert_eq!(round(sall1, 3), 0.022);
        assert_eq!(lcl_change(&ns(0.0, 0.01), 5e-5, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn kl_rows_and_no_information_limit() {
        let cfg = CriterionConfig::default();
        let lepr = kl_expected_impact(&ns(0.045, 0.009), 0.009 * 0.009 / 2.0, &cfg).unwrap();
        assert_eq!((lepr * 1000.0).round(), 931.0);
        let il6r = kl_expected_impact(&ns(0.045, 0.010), 0.010 * 0.010 / 2.0, &cfg).unwrap();
        assert_eq!((il6r * 1000.0).round(), 995.0);
        let none = kl_expected_impact(&ns(0.045, 0.010), 1e-4, &cfg).unwrap();
        assert!(none.abs() <= 1e-5);
    }

    #[test]
    fn expectation_change_rows() {
        assert_eq!(
            round(expectation_change(&same_size(0.045, 0.009)).unwrap(), 3),
            0.035
        );
        assert_eq!(
            round(expectation_change(&same_size(0.072, 0.017)).unwrap(), 3),
            0.070
        );
        assert_eq!(
            round(expectation_change(&same_size(0.031, 0.010)).unwrap(), 3),
            0.000
        );

        let plain = crate::evidence::project_plain(
            ns(0.1, 0.01),
            &StudyPlan::with_variance(1e-4, 0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(expectation_change(&plain), Err(Error::MissingSpikeState));
    }

    #[test]
    fn bayes_factor_rows() {
        let cfg = CriterionConfig::default();
        let gckr = bayes_factors(&same_size(0.031, 0.010), &cfg).unwrap();
        assert!(
            gckr.before() > 100.0 && gckr.before() < 150.0,
            "{}",
            gckr.before()
        );
        assert!(gckr.after() > 1e4 && gckr.after() < 1e5, "{}", gckr.after());
        assert_eq!(gckr.category(cfg.bf_limit), Category::III);

        let crp = bayes_factors(&same_size(0.086, 0.010), &cfg).unwrap();
        assert!(crp.before() > 1e6);
        assert_eq!(crp.bits(cfg.bf_limit), (true, true));
        assert_eq!(crp.category(cfg.bf_limit), Category::I);

        // no stage-1 information: zero estimate
        let flat = bayes_factors(&same_size(0.0, 0.010), &cfg).unwrap();
        assert_relative_eq!(flat.before(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn classification_examples() {
        let cfg = CriterionConfig::default();
        let crp = same_size(0.086, 0.010);
        assert_eq!(classify(CriterionId::Lcl, &crp, &cfg).unwrap(), Category::I);
        let lepr = same_size(0.045, 0.009);
        assert_eq!(
            classify(CriterionId::Lcl, &lepr, &cfg).unwrap(),
            Category::II
        );
        assert_eq!(
            classify(CriterionId::Cp, &lepr, &cfg).unwrap(),
            Category::II
        );
        assert_eq!(
            classify(CriterionId::Bf, &lepr, &cfg).unwrap(),
            Category::II
        );
        let rora = same_size(0.004, 0.010);
        assert_eq!(
            classify(CriterionId::DeltaLogP, &rora, &cfg).unwrap(),
            Category::III
        );
        assert_eq!(
            classify(CriterionId::Kl, &rora, &cfg).unwrap(),
            Category::III
        );
        assert!(classify(CriterionId::BfdrInput, &rora, &cfg).is_err());

        let plain = crate::evidence::project_plain(
            ns(0.1, 0.01),
            &StudyPlan::with_variance(1e-4, 0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(
            classify(CriterionId::Kl, &plain, &cfg).unwrap(),
            Category::Unranked
        );
    }

    #[test]
    fn criterion_ids_parse() {
        for id in CriterionId::ALL {
            assert_eq!(id.as_str().parse::<CriterionId>().unwrap(), id);
        }
        assert!("XYZ".parse::<CriterionId>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(CriterionConfig::default().validate().is_ok());
        let bad = CriterionConfig {
            bf_limit: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = CriterionConfig {
            alpha: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
