//! The pipelines behind each subcommand. Each returns a [`Table`]; rendering
//! and output are left to the caller.

use covprio_core::planner::log_grid;
use covprio_core::{
    assess_all, bayes_factors, min_sample_size, rank_covariates, sweep_prior, sweep_sample_size,
    Assessment, Category, Covariate, CriterionId, MinSampleSize, SampleSizeSearch, SearchMethod,
    SweepResult, SweepSpec,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::records::CovariateRecord;
use crate::report::{exact, fixed, Table};

pub fn covariates(
    records: &[CovariateRecord],
    cfg: &RunConfig,
) -> Result<Vec<Covariate>, CliError> {
    records
        .iter()
        .map(|r| r.to_covariate(cfg.evidence_source).map_err(CliError::from))
        .collect()
}

fn assess(records: &[CovariateRecord], cfg: &RunConfig) -> Result<Vec<Assessment>, CliError> {
    cfg.validate()?;
    Ok(assess_all(
        &covariates(records, cfg)?,
        &cfg.criteria,
        cfg.gamma_sq,
    )?)
}

fn bit(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

fn starred(text: String, category: Category) -> String {
    if category == Category::I {
        text + "*"
    } else {
        text
    }
}

pub const RANK_COLUMNS: [&str; 10] = [
    "id", "label", "sublabel", "CP", "DLOGP", "LCL", "KL1000", "DE", "BF", "BFDR",
];

/// The per-covariate criterion table. A trailing `*` marks category I under
/// that criterion's own rule; BF and BFDR show `after-before` selection bits.
pub fn rank(records: &[CovariateRecord], cfg: &RunConfig) -> Result<Table, CliError> {
    let assessed = assess(records, cfg)?;
    let mut table = Table::new(RANK_COLUMNS);
    for (rec, a) in records.iter().zip(&assessed) {
        let cell = |c: CriterionId, fmt: &dyn Fn(f64) -> String| {
            let r = a.result(c);
            match r.value {
                Some(v) => starred(fmt(v), r.category),
                None => "--".to_string(),
            }
        };
        let (bf_after, bf_before) =
            bayes_factors(&a.projected, &cfg.criteria)?.bits(cfg.criteria.bf_limit);
        table.push(vec![
            rec.id.clone(),
            rec.label.clone(),
            rec.sublabel.clone(),
            cell(CriterionId::Cp, &|v| fixed(v, 2)),
            cell(CriterionId::DeltaLogP, &|v| fixed(v, 1)),
            cell(CriterionId::Lcl, &|v| fixed(v, 3)),
            cell(CriterionId::Kl, &|v| fixed((v * 1000.0).round(), 0)),
            cell(CriterionId::DeltaE, &|v| fixed(v, 3)),
            format!("{}-{}", bit(bf_after), bit(bf_before)),
            format!(
                "{}-{}",
                bit(a.bfdr.selected_after),
                bit(a.bfdr.selected_before)
            ),
        ]);
    }
    Ok(table)
}

/// Per-criterion prioritization orders, category-I covariates excluded,
/// followed by the covariates that every order places in its top `top_k`.
pub fn priorities(
    records: &[CovariateRecord],
    cfg: &RunConfig,
    top_k: usize,
) -> Result<Table, CliError> {
    let assessed = assess(records, cfg)?;
    let input: Vec<_> = assessed
        .iter()
        .map(|a| (a.covariate_id.clone(), a.results.clone()))
        .collect();
    let ranked = rank_covariates(&input, top_k);
    let mut table = Table::new(["criterion", "position", "covariate_id", "value"]);
    for c in CriterionId::ALL {
        for (i, e) in ranked.order(c).iter().enumerate() {
            table.push(vec![
                c.to_string(),
                (i + 1).to_string(),
                e.covariate_id.clone(),
                exact(Some(e.value)),
            ]);
        }
    }
    for (i, id) in ranked.consensus.iter().enumerate() {
        table.push(vec![
            format!("CONSENSUS_TOP{top_k}"),
            (i + 1).to_string(),
            id.clone(),
            "NA".into(),
        ]);
    }
    Ok(table)
}

/// Category of every covariate under every criterion.
pub fn classify(records: &[CovariateRecord], cfg: &RunConfig) -> Result<Table, CliError> {
    let assessed = assess(records, cfg)?;
    let mut columns = vec!["id".to_string()];
    columns.extend(CriterionId::ALL.iter().map(|c| c.to_string()));
    let mut table = Table::new(columns);
    for a in &assessed {
        let mut row = vec![a.covariate_id.clone()];
        for c in CriterionId::ALL {
            let label = if c == CriterionId::BfdrInput && a.bfdr.is_anomaly() {
                "ANOMALY".to_string()
            } else {
                a.result(c).category.to_string()
            };
            row.push(label);
        }
        table.push(row);
    }
    Ok(table)
}

/// Long-format rows sorted by covariate id, then axis value.
fn long_table(result: &SweepResult, axis_name: &str) -> Table {
    let mut table = Table::new(["covariate_id", axis_name, "criterion_value", "category"]);
    let mut order: Vec<usize> = (0..result.covariate_ids.len()).collect();
    order.sort_by(|&a, &b| result.covariate_ids[a].cmp(&result.covariate_ids[b]));
    let mut points: Vec<usize> = (0..result.grid.len()).collect();
    points.sort_by(|&a, &b| result.grid[a].total_cmp(&result.grid[b]));
    for i in order {
        let id = &result.covariate_ids[i];
        for &j in &points {
            let x = result.grid[j];
            let category = if result.anomalies.iter().any(|(a, ax)| a == id && *ax == x) {
                "ANOMALY".to_string()
            } else {
                result.categories[i][j].to_string()
            };
            table.push(vec![
                id.clone(),
                exact(Some(x)),
                exact(result.values[i][j]),
                category,
            ]);
        }
    }
    table
}

/// Points where the covariate with the largest criterion value changes.
pub fn leader_table(result: &SweepResult, axis_name: &str) -> Table {
    let mut table = Table::new([axis_name, "previous", "leader"]);
    let mut previous = "NA".to_string();
    for (x, leader) in result.leader_changes() {
        table.push(vec![exact(Some(x)), previous.clone(), leader.clone()]);
        previous = leader;
    }
    table
}

pub fn sample_size_grid(lower: f64, upper: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if !(lower > 0.0 && upper > lower && points >= 1) || !upper.is_finite() {
        return Err(CliError::Input(format!(
            "sample-size grid needs 0 < n-min < n-max and at least one point (got {lower}, {upper}, {points})"
        )));
    }
    Ok(if points == 1 {
        vec![lower]
    } else {
        log_grid(lower, upper, points)
    })
}

pub fn run_sweep_n(
    records: &[CovariateRecord],
    cfg: &RunConfig,
    criterion: CriterionId,
    grid: Vec<f64>,
) -> Result<SweepResult, CliError> {
    cfg.validate()?;
    let mut spec = SweepSpec::sample_size(criterion, cfg.n_ref);
    spec.grid = grid;
    spec.heterogeneity = cfg.gamma_sq;
    spec.validate()
        .map_err(|e| CliError::Input(format!("invalid grid: {e}")))?;
    Ok(sweep_sample_size(
        &covariates(records, cfg)?,
        &cfg.criteria,
        &spec,
    )?)
}

pub fn sweep_n_table(result: &SweepResult) -> Table {
    long_table(result, "n")
}

pub fn run_sweep_prior(
    records: &[CovariateRecord],
    cfg: &RunConfig,
    criterion: CriterionId,
    grid: Option<Vec<f64>>,
) -> Result<SweepResult, CliError> {
    cfg.validate()?;
    let mut spec = SweepSpec::prior(criterion);
    if let Some(g) = grid {
        spec.grid = g;
    }
    spec.heterogeneity = cfg.gamma_sq;
    spec.validate()
        .map_err(|e| CliError::Input(format!("invalid grid: {e}")))?;
    Ok(sweep_prior(
        &covariates(records, cfg)?,
        &cfg.criteria,
        &spec,
    )?)
}

pub fn sweep_prior_table(result: &SweepResult) -> Table {
    long_table(result, "pi0")
}

#[derive(Debug, Clone)]
pub struct MinNRequest {
    pub criterion: CriterionId,
    pub target: f64,
    pub lower: f64,
    pub upper: f64,
    pub check_points: usize,
    /// Restrict to these ids; all covariates when empty.
    pub ids: Vec<String>,
}

pub fn min_n(
    records: &[CovariateRecord],
    cfg: &RunConfig,
    req: &MinNRequest,
) -> Result<Table, CliError> {
    cfg.validate()?;
    if req.criterion == CriterionId::BfdrInput {
        return Err(CliError::Input(
            "min-n needs a criterion that grows with evidence; BFDR is a set-level selection"
                .into(),
        ));
    }
    if !(req.target > 0.0 && req.target.is_finite()) {
        return Err(CliError::Input(format!(
            "target must be positive, got {}",
            req.target
        )));
    }
    if !(req.lower > 0.0 && req.upper > req.lower && req.upper.is_finite()) {
        return Err(CliError::Input(format!(
            "need 0 < lower < upper, got {} and {}",
            req.lower, req.upper
        )));
    }
    for id in &req.ids {
        if !records.iter().any(|r| &r.id == id) {
            return Err(CliError::Input(format!("unknown covariate id '{id}'")));
        }
    }
    let search = SampleSizeSearch {
        lower: req.lower,
        upper: req.upper,
        n_ref: cfg.n_ref,
        heterogeneity: cfg.gamma_sq,
        check_points: req.check_points.max(2),
    };
    let mut table = Table::new([
        "covariate_id",
        "criterion",
        "target",
        "status",
        "n",
        "value",
        "method",
    ]);
    for rec in records
        .iter()
        .filter(|r| req.ids.is_empty() || req.ids.contains(&r.id))
    {
        let cov = rec.to_covariate(cfg.evidence_source)?;
        let row = match min_sample_size(&cov, &cfg.criteria, req.criterion, req.target, &search)? {
            MinSampleSize::Attained { n, value, method } => vec![
                "attained".into(),
                exact(Some(n)),
                exact(Some(value)),
                match method {
                    SearchMethod::Bisection => "bisection",
                    SearchMethod::GridScan => "grid_scan",
                }
                .into(),
            ],
            MinSampleSize::Unattainable { value_at_upper } => {
                vec![
                    "unattainable".into(),
                    "NA".into(),
                    exact(value_at_upper),
                    "NA".into(),
                ]
            }
        };
        let mut full = vec![
            rec.id.clone(),
            req.criterion.to_string(),
            exact(Some(req.target)),
        ];
        full.extend(row);
        table.push(full);
    }
    Ok(table)
}
