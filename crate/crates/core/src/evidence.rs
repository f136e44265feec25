//! Evidence states and the projection of what a planned study is expected to
//! leave behind.
//!
//! Two models are supported. The plain model keeps a normal summary
//! `N(mean, variance)` per covariate and shrinks its variance. The
//! spike-and-slab model additionally carries the probability that the effect
//! is non-zero; that probability is stored as log-odds so that updates at
//! large z-scores neither underflow nor saturate at exactly 1.

use crate::error::{finite, open_unit, positive, Error, Result};
use crate::stat_core::{ln_normal_pdf, Probability, WeightedEstimate};

/// Normal evidence state `N(mean, variance)` for one covariate.
pub type NormalSummary = WeightedEstimate;

/// Inclusion probability plus the slab distribution of a non-zero effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeSlabState {
    log_odds: f64,
    pub slab: NormalSummary,
}

impl SpikeSlabState {
    pub fn new(inclusion_prob: Probability, slab: NormalSummary) -> Self {
        Self {
            log_odds: log_odds(inclusion_prob.value()),
            slab,
        }
    }

    /// Build from log-odds `ln(π / (1 - π))`; ±∞ encode π = 1 and π = 0.
    pub fn from_log_odds(log_odds: f64, slab: NormalSummary) -> Result<Self> {
        if log_odds.is_nan() {
            return Err(Error::NonFinite("log-odds"));
        }
        Ok(Self { log_odds, slab })
    }

    pub fn log_odds(&self) -> f64 {
        self.log_odds
    }

    pub fn inclusion_prob(&self) -> f64 {
        logistic(self.log_odds)
    }

    /// `1 - π`, accurate when π is within rounding of 1.
    pub fn exclusion_prob(&self) -> f64 {
        logistic(-self.log_odds)
    }
}

pub(crate) fn log_odds(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        p.ln() - (-p).ln_1p()
    }
}

fn logistic(l: f64) -> f64 {
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

/// Where the planned study's within-study variance comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanVariance {
    Direct(f64),
    /// Sample size `n` with a reference pair: variance `v_ref` observed at `n_ref`.
    Scaled {
        n: f64,
        n_ref: f64,
        v_ref: f64,
    },
}

/// A planned new study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyPlan {
    within: PlanVariance,
    heterogeneity: f64,
}

impl StudyPlan {
    pub fn with_variance(within_variance: f64, heterogeneity: f64) -> Result<Self> {
        positive("within-study variance", within_variance)?;
        Self::checked(PlanVariance::Direct(within_variance), heterogeneity)
    }

    /// Variance scales as `v_ref * n_ref / n`.
    pub fn from_sample_size(n: f64, n_ref: f64, v_ref: f64, heterogeneity: f64) -> Result<Self> {
        positive("sample size", n)?;
        positive("reference sample size", n_ref)?;
        positive("reference variance", v_ref)?;
        let plan = Self::checked(PlanVariance::Scaled { n, n_ref, v_ref }, heterogeneity)?;
        positive("within-study variance", plan.within_variance())?;
        Ok(plan)
    }

    fn checked(within: PlanVariance, heterogeneity: f64) -> Result<Self> {
        finite("heterogeneity", heterogeneity)?;
        if heterogeneity < 0.0 {
            return Err(Error::OutOfRange {
                name: "heterogeneity",
                range: "[0, inf)",
                value: heterogeneity,
            });
        }
        Ok(Self {
            within,
            heterogeneity,
        })
    }

    pub fn within_variance(&self) -> f64 {
        match self.within {
            PlanVariance::Direct(v) => v,
            PlanVariance::Scaled { n, n_ref, v_ref } => v_ref * n_ref / n,
        }
    }

    pub fn heterogeneity(&self) -> f64 {
        self.heterogeneity
    }

    pub fn sample_size(&self) -> Option<f64> {
        match self.within {
            PlanVariance::Direct(_) => None,
            PlanVariance::Scaled { n, .. } => Some(n),
        }
    }

    /// Variance of the new study's estimate around the common effect.
    pub fn observation_variance(&self) -> f64 {
        self.within_variance() + self.heterogeneity
    }
}

/// Current and expected post-study evidence for one covariate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedEvidence {
    pub before: NormalSummary,
    pub after: NormalSummary,
    pub spike_before: Option<SpikeSlabState>,
    pub spike_after: Option<SpikeSlabState>,
    pub planned_observation: NormalSummary,
}

pub fn project_variance_fixed(sigma1_sq: f64, v: f64) -> Result<f64> {
    positive("current variance", sigma1_sq)?;
    positive("within-study variance", v)?;
    Ok(1.0 / (1.0 / sigma1_sq + 1.0 / v))
}

/// Post-study variance under between-study heterogeneity `gamma_sq`.
pub fn project_variance_random(sigma1_sq: f64, v: f64, gamma_sq: f64) -> Result<f64> {
    positive("current variance", sigma1_sq)?;
    positive("within-study variance", v)?;
    finite("heterogeneity", gamma_sq)?;
    if gamma_sq < 0.0 {
        return Err(Error::OutOfRange {
            name: "heterogeneity",
            range: "[0, inf)",
            value: gamma_sq,
        });
    }
    let w = v + gamma_sq;
    Ok(sigma1_sq * w / (w + sigma1_sq))
}

/// Update the prior inclusion probability `pi0` with a first-stage estimate.
///
/// The initial slab is flat, so the slab marginal likelihood is the density of
/// the estimate at its own mean.
pub fn init_spike_slab(pi0: f64, observed: NormalSummary) -> Result<SpikeSlabState> {
    open_unit("pi0", pi0)?;
    positive("observed variance", observed.variance)?;
    let ln_slab = ln_normal_pdf(observed.mean, observed.mean, observed.variance)?;
    let ln_null = ln_normal_pdf(observed.mean, 0.0, observed.variance)?;
    SpikeSlabState::from_log_odds(log_odds(pi0) + ln_slab - ln_null, observed)
}

/// Expected spike-and-slab state after the planned study.
///
/// The planned observation is centred on the current slab mean. Its variance
/// is the plan's within-study variance plus heterogeneity.
pub fn project_spike_slab(state: SpikeSlabState, plan: &StudyPlan) -> Result<ProjectedEvidence> {
    let slab = state.slab;
    let v = positive("observation variance", plan.observation_variance())?;
    let after_var = project_variance_fixed(slab.variance, v)?;
    let observed_mean = slab.mean;
    let after_mean = after_var * (slab.mean / slab.variance + observed_mean / v);
    let after = NormalSummary::new(after_mean, after_var)?;

    let log_odds = if state.log_odds == f64::NEG_INFINITY || state.log_odds == f64::INFINITY {
        state.log_odds
    } else {
        let ln_slab = ln_normal_pdf(observed_mean, after_mean, v)?;
        let ln_null = ln_normal_pdf(observed_mean, 0.0, v)?;
        state.log_odds + ln_slab - ln_null
    };

    Ok(ProjectedEvidence {
        before: slab,
        after,
        spike_before: Some(state),
        spike_after: Some(SpikeSlabState::from_log_odds(log_odds, after)?),
        planned_observation: NormalSummary::new(observed_mean, v)?,
    })
}

/// Projection under the plain normal model: mean kept, variance shrunk.
pub fn project_plain(summary: NormalSummary, plan: &StudyPlan) -> Result<ProjectedEvidence> {
    let after_var = project_variance_random(
        summary.variance,
        plan.within_variance(),
        plan.heterogeneity(),
    )?;
    Ok(ProjectedEvidence {
        before: summary,
        after: NormalSummary::new(summary.mean, after_var)?,
        spike_before: None,
        spike_after: None,
        planned_observation: NormalSummary::new(summary.mean, plan.observation_variance())?,
    })
}

/// Both projections at once: normal summaries from the plain model and the
/// spike-and-slab states seeded from `pi0`.
pub fn project_full(
    summary: NormalSummary,
    plan: &StudyPlan,
    pi0: f64,
) -> Result<ProjectedEvidence> {
    let spike = project_spike_slab(init_spike_slab(pi0, summary)?, plan)?;
    let plain = project_plain(summary, plan)?;
    Ok(ProjectedEvidence {
        spike_before: spike.spike_before,
        spike_after: spike.spike_after,
        ..plain
    })
}
