use std::hint::black_box;

use covprio_core::{
    assess_all, sweep_prior, sweep_sample_size, Covariate, CriterionConfig, CriterionId,
    NormalSummary, SweepSpec,
};
use criterion::{criterion_group, criterion_main, Criterion};

// replication-panel estimates for the 17 CRP loci
const LOCI: [(&str, f64, f64); 17] = [
    ("CRP", 0.086, 0.010),
    ("APOC1", 0.200, 0.032),
    ("HNF1A", 0.122, 0.021),
    ("LEPR", 0.045, 0.009),
    ("IL6R", 0.045, 0.010),
    ("GCKR", 0.031, 0.010),
    ("NLRP3", 0.042, 0.018),
    ("IL1F10", 0.072, 0.017),
    ("PPP1R3B", 0.003, 0.031),
    ("ASCL1", 0.018, 0.015),
    ("HNF4A", 0.023, 0.026),
    ("RORA", 0.004, 0.010),
    ("SALL1", 0.089, 0.028),
    ("PABPC4", 0.035, 0.017),
    ("BCL7B", 0.049, 0.025),
    ("PSMG1", 0.013, 0.011),
    ("RGS6", 0.001, 0.012),
];

fn covariates() -> Vec<Covariate> {
    LOCI.iter()
        .map(|&(id, m, se)| {
            Covariate::new(id, NormalSummary::from_se(m, se).unwrap(), se * se).unwrap()
        })
        .collect()
}

fn bench_assess(c: &mut Criterion) {
    let covs = covariates();
    let cfg = CriterionConfig::default();
    c.bench_function("assess_all_17", |b| {
        b.iter(|| assess_all(black_box(&covs), black_box(&cfg), 0.0).unwrap())
    });
}

fn bench_sweeps(c: &mut Criterion) {
    let covs = covariates();
    let cfg = CriterionConfig::default();
    let n_spec = SweepSpec::sample_size(CriterionId::DeltaE, 16540.0);
    let p_spec = SweepSpec::prior(CriterionId::BfdrInput);
    c.bench_function("sweep_sample_size_200", |b| {
        b.iter(|| sweep_sample_size(black_box(&covs), &cfg, &n_spec).unwrap())
    });
    c.bench_function("sweep_prior_80", |b| {
        b.iter(|| sweep_prior(black_box(&covs), &cfg, &p_spec).unwrap())
    });
}

criterion_group!(benches, bench_assess, bench_sweeps);
criterion_main!(benches);
