//! Design-space exploration: evaluate every covariate across a grid of
//! planned sample sizes or prior inclusion probabilities, and search for the
//! smallest sample size that reaches a target criterion value.

use crate::criteria::{
    assess, classify, criterion_value, Category, CriterionConfig, CriterionId, CriterionResult,
};
use crate::error::{open_unit, positive, Error, Result};
use crate::evidence::{project_full, NormalSummary, ProjectedEvidence, StudyPlan};
use crate::selection::{bfdr_categorize, BfdrOutcome, LfdrEntry};

/// Current evidence for one covariate plus the within-study variance a new
/// study of reference size would have.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariate {
    pub id: String,
    pub stage1: NormalSummary,
    pub new_study_variance: f64,
}

impl Covariate {
    pub fn new(
        id: impl Into<String>,
        stage1: NormalSummary,
        new_study_variance: f64,
    ) -> Result<Self> {
        positive("new-study variance", new_study_variance)?;
        Ok(Self {
            id: id.into(),
            stage1,
            new_study_variance,
        })
    }

    fn project(&self, plan: &StudyPlan, pi0: f64) -> Result<ProjectedEvidence> {
        project_full(self.stage1, plan, pi0)
    }

    fn reference_plan(&self, heterogeneity: f64) -> Result<StudyPlan> {
        StudyPlan::with_variance(self.new_study_variance, heterogeneity)
    }

    fn sized_plan(&self, n: f64, n_ref: f64, heterogeneity: f64) -> Result<StudyPlan> {
        StudyPlan::from_sample_size(n, n_ref, self.new_study_variance, heterogeneity)
    }
}

/// All criteria for one covariate, with the BFDR category filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub covariate_id: String,
    pub projected: ProjectedEvidence,
    pub results: Vec<CriterionResult>,
    pub bfdr: BfdrOutcome,
}

impl Assessment {
    pub fn result(&self, criterion: CriterionId) -> &CriterionResult {
        self.results
            .iter()
            .find(|r| r.criterion == criterion)
            .expect("assess covers every criterion")
    }
}

fn lfdr_entries(
    ids: &[&str],
    projected: &[ProjectedEvidence],
) -> Result<(Vec<LfdrEntry>, Vec<LfdrEntry>)> {
    let mut before = Vec::with_capacity(ids.len());
    let mut after = Vec::with_capacity(ids.len());
    for (id, p) in ids.iter().zip(projected) {
        let (b, a) = match (p.spike_before, p.spike_after) {
            (Some(b), Some(a)) => (b, a),
            _ => return Err(Error::MissingSpikeState),
        };
        before.push(LfdrEntry::new(*id, b.exclusion_prob())?);
        after.push(LfdrEntry::new(*id, a.exclusion_prob())?);
    }
    Ok((before, after))
}

/// Evaluate every criterion for a new study of reference size.
pub fn assess_all(
    covariates: &[Covariate],
    cfg: &CriterionConfig,
    heterogeneity: f64,
) -> Result<Vec<Assessment>> {
    cfg.validate()?;
    let projected = covariates
        .iter()
        .map(|c| c.project(&c.reference_plan(heterogeneity)?, cfg.pi0))
        .collect::<Result<Vec<_>>>()?;
    let ids: Vec<&str> = covariates.iter().map(|c| c.id.as_str()).collect();
    let (before, after) = lfdr_entries(&ids, &projected)?;
    let outcomes = bfdr_categorize(&before, &after, cfg.bfdr_level)?;

    covariates
        .iter()
        .zip(projected)
        .zip(outcomes)
        .map(|((c, p), bfdr)| {
            let mut results = assess(&p, cfg)?;
            for r in results
                .iter_mut()
                .filter(|r| r.criterion == CriterionId::BfdrInput)
            {
                r.category = bfdr.category().unwrap_or(Category::Unranked);
            }
            Ok(Assessment {
                covariate_id: c.id.clone(),
                projected: p,
                results,
                bfdr,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    SampleSize,
    PriorProb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub criterion: CriterionId,
    /// Sample size at which each covariate's new-study variance applies.
    pub n_ref: Option<f64>,
    pub heterogeneity: f64,
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (points - 1) as f64;
            let mut g: Vec<f64> = (0..points).map(|i| (a + step * i as f64).exp()).collect();
            g[0] = lo;
            g[points - 1] = hi;
            g
        }
    }
}

impl SweepSpec {
    /// 200 log-spaced sample sizes over [1000, 200 000].
    pub fn sample_size(criterion: CriterionId, n_ref: f64) -> Self {
        Self {
            axis: SweepAxis::SampleSize,
            grid: log_grid(1000.0, 200_000.0, 200),
            criterion,
            n_ref: Some(n_ref),
            heterogeneity: 0.0,
        }
    }

    /// π₀ = 10^x for x = -16, -15.8, ..., -0.2.
    pub fn prior(criterion: CriterionId) -> Self {
        Self {
            axis: SweepAxis::PriorProb,
            grid: (0..80)
                .map(|i| 10f64.powf((-160 + 2 * i) as f64 / 10.0))
                .collect(),
            criterion,
            n_ref: None,
            heterogeneity: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Empty("sweep grid"));
        }
        if self
            .grid
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::Unsupported(
                "sweep grid must be strictly increasing".into(),
            ));
        }
        for &x in &self.grid {
            match self.axis {
                SweepAxis::SampleSize => positive("sample size", x)?,
                SweepAxis::PriorProb => open_unit("prior probability", x)?,
            };
        }
        if self.axis == SweepAxis::SampleSize {
            positive(
                "n_ref",
                self.n_ref.ok_or(Error::Unsupported(
                    "sample-size sweep needs a reference sample size".into(),
                ))?,
            )?;
        }
        Ok(())
    }
}

/// Criterion values and categories indexed `[covariate][grid point]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub criterion: CriterionId,
    pub grid: Vec<f64>,
    pub covariate_ids: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
    pub categories: Vec<Vec<Category>>,
    /// (covariate, grid value) pairs selected by BFDR before but not after.
    pub anomalies: Vec<(String, f64)>,
}

impl SweepResult {
    /// Covariate with the largest applicable value at grid point `j`; ties go
    /// to the smaller id.
    pub fn argmax_at(&self, j: usize) -> Option<&str> {
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in self.values.iter().enumerate() {
            if let Some(v) = row[j] {
                let better = match best {
                    None => true,
                    Some((bi, bv)) => {
                        v > bv || (v == bv && self.covariate_ids[i] < self.covariate_ids[bi])
                    }
                };
                if better {
                    best = Some((i, v));
                }
            }
        }
        best.map(|(i, _)| self.covariate_ids[i].as_str())
    }

    /// Grid points where the argmax covariate changes, starting with the
    /// first grid point.
    pub fn leader_changes(&self) -> Vec<(f64, String)> {
        let mut out: Vec<(f64, String)> = Vec::new();
        for j in 0..self.grid.len() {
            if let Some(id) = self.argmax_at(j) {
                if out.last().is_none_or(|(_, prev)| prev != id) {
                    out.push((self.grid[j], id.to_string()));
                }
            }
        }
        out
    }

    pub fn row(&self, covariate_id: &str) -> Option<usize> {
        self.covariate_ids.iter().position(|id| id == covariate_id)
    }
}

fn categorize_point(
    ids: &[&str],
    projected: &[ProjectedEvidence],
    cfg: &CriterionConfig,
    criterion: CriterionId,
) -> Result<(Vec<Category>, Vec<String>)> {
    if criterion != CriterionId::BfdrInput {
        let cats = projected
            .iter()
            .map(|p| classify(criterion, p, cfg))
            .collect::<Result<Vec<_>>>()?;
        return Ok((cats, Vec::new()));
    }
    let (before, after) = lfdr_entries(ids, projected)?;
    let outcomes = bfdr_categorize(&before, &after, cfg.bfdr_level)?;
    let anomalies = outcomes
        .iter()
        .filter(|o| o.is_anomaly())
        .map(|o| o.covariate_id.clone())
        .collect();
    let cats = outcomes
        .iter()
        .map(|o| o.category().unwrap_or(Category::Unranked))
        .collect();
    Ok((cats, anomalies))
}

fn run_sweep<F>(
    covariates: &[Covariate],
    spec: &SweepSpec,
    cfg: &CriterionConfig,
    mut point: F,
) -> Result<SweepResult>
where
    F: FnMut(&Covariate, f64) -> Result<(ProjectedEvidence, CriterionConfig)>,
{
    spec.validate()?;
    cfg.validate()?;
    let ids: Vec<&str> = covariates.iter().map(|c| c.id.as_str()).collect();
    let k = covariates.len();
    let mut values = vec![Vec::with_capacity(spec.grid.len()); k];
    let mut categories = vec![Vec::with_capacity(spec.grid.len()); k];
    let mut anomalies = Vec::new();

    for &x in &spec.grid {
        let mut projected = Vec::with_capacity(k);
        let mut point_cfg = *cfg;
        for c in covariates {
            let (p, pc) = point(c, x)?;
            point_cfg = pc;
            projected.push(p);
        }
        for (i, p) in projected.iter().enumerate() {
            values[i].push(criterion_value(spec.criterion, p, &point_cfg)?);
        }
        let (cats, odd) = categorize_point(&ids, &projected, &point_cfg, spec.criterion)?;
        for (i, c) in cats.into_iter().enumerate() {
            categories[i].push(c);
        }
        anomalies.extend(odd.into_iter().map(|id| (id, x)));
    }

    Ok(SweepResult {
        axis: spec.axis,
        criterion: spec.criterion,
        grid: spec.grid.clone(),
        covariate_ids: ids.iter().map(|s| s.to_string()).collect(),
        values,
        categories,
        anomalies,
    })
}

/// Evaluate `spec.criterion` for every covariate at each planned sample size.
pub fn sweep_sample_size(
    covariates: &[Covariate],
    cfg: &CriterionConfig,
    spec: &SweepSpec,
) -> Result<SweepResult> {
    if spec.axis != SweepAxis::SampleSize {
        return Err(Error::Unsupported("expected a sample-size sweep".into()));
    }
    let n_ref = spec.n_ref.unwrap_or(f64::NAN);
    run_sweep(covariates, spec, cfg, |c, n| {
        let plan = c.sized_plan(n, n_ref, spec.heterogeneity)?;
        Ok((c.project(&plan, cfg.pi0)?, *cfg))
    })
}

/// Re-run the analysis for each prior inclusion probability in the grid.
/// Categories come from `spec.criterion`; with the BFDR criterion (the usual
/// choice) they are the before/after BFDR comparison.
pub fn sweep_prior(
    covariates: &[Covariate],
    cfg: &CriterionConfig,
    spec: &SweepSpec,
) -> Result<SweepResult> {
    if spec.axis != SweepAxis::PriorProb {
        return Err(Error::Unsupported(
            "expected a prior-probability sweep".into(),
        ));
    }
    run_sweep(covariates, spec, cfg, |c, pi0| {
        let point_cfg = CriterionConfig { pi0, ..*cfg };
        let plan = c.reference_plan(spec.heterogeneity)?;
        Ok((c.project(&plan, pi0)?, point_cfg))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSizeSearch {
    pub lower: f64,
    pub upper: f64,
    pub n_ref: f64,
    pub heterogeneity: f64,
    /// Log-spaced points used to check monotonicity (and for the fallback scan).
    pub check_points: usize,
}

impl SampleSizeSearch {
    pub fn new(lower: f64, upper: f64, n_ref: f64) -> Self {
        Self {
            lower,
            upper,
            n_ref,
            heterogeneity: 0.0,
            check_points: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    /// Integer bisection; the criterion was nondecreasing on the check grid.
    Bisection,
    /// The criterion was not monotone; first passing check-grid point.
    GridScan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinSampleSize {
    Attained {
        n: f64,
        value: f64,
        method: SearchMethod,
    },
    Unattainable {
        value_at_upper: Option<f64>,
    },
}

/// Smallest sample size in `[lower, upper]` at which `criterion` reaches
/// `target`. BF values are natural-log Bayes factors.
pub fn min_sample_size(
    covariate: &Covariate,
    cfg: &CriterionConfig,
    criterion: CriterionId,
    target: f64,
    search: &SampleSizeSearch,
) -> Result<MinSampleSize> {
    cfg.validate()?;
    positive("target", target)?;
    positive("lower bound", search.lower)?;
    positive("n_ref", search.n_ref)?;
    if search.upper.partial_cmp(&search.lower) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Unsupported(
            "upper bound must exceed lower bound".into(),
        ));
    }
    let eval = |n: f64| -> Result<Option<f64>> {
        let plan = covariate.sized_plan(n, search.n_ref, search.heterogeneity)?;
        criterion_value(criterion, &covariate.project(&plan, cfg.pi0)?, cfg)
    };
    let meets = |v: Option<f64>| v.is_some_and(|v| v >= target);

    let lo = search.lower.ceil();
    let hi = search.upper.floor();
    let at_lo = eval(lo)?;
    if meets(at_lo) {
        return Ok(MinSampleSize::Attained {
            n: lo,
            value: at_lo.unwrap_or(f64::NAN),
            method: SearchMethod::Bisection,
        });
    }
    let at_hi = eval(hi)?;

    let grid = log_grid(lo, hi, search.check_points.max(2));
    let vals = grid.iter().map(|&n| eval(n)).collect::<Result<Vec<_>>>()?;
    let key = |v: &Option<f64>| v.unwrap_or(f64::NEG_INFINITY);
    let monotone = vals.windows(2).all(|w| {
        let (a, b) = (key(&w[0]), key(&w[1]));
        b >= a - 1e-12 * a.abs().max(1e-300)
    });

    if monotone {
        if !meets(at_hi) {
            return Ok(MinSampleSize::Unattainable {
                value_at_upper: at_hi,
            });
        }
        let (mut fail, mut pass) = (lo, hi);
        while pass - fail > 1.0 {
            let mid = ((fail + pass) / 2.0).floor();
            if meets(eval(mid)?) {
                pass = mid;
            } else {
                fail = mid;
            }
        }
        return Ok(MinSampleSize::Attained {
            n: pass,
            value: eval(pass)?.unwrap_or(f64::NAN),
            method: SearchMethod::Bisection,
        });
    }

    match grid.iter().zip(&vals).find(|(_, v)| meets(**v)) {
        Some((&n, v)) => Ok(MinSampleSize::Attained {
            n: n.ceil(),
            value: v.unwrap_or(f64::NAN),
            method: SearchMethod::GridScan,
        }),
        None => Ok(MinSampleSize::Unattainable {
            value_at_upper: at_hi,
        }),
    }
}
