#![allow(dead_code)]

use covprio_core::{Covariate, NormalSummary};

/// Replication-panel estimates (β, SE) for the 17 CRP loci.
pub const LOCI: [(&str, f64, f64); 17] = [
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

pub fn covariates() -> Vec<Covariate> {
    LOCI.iter()
        .map(|&(id, m, se)| {
            Covariate::new(id, NormalSummary::from_se(m, se).unwrap(), se * se).unwrap()
        })
        .collect()
}

pub fn summary(id: &str) -> NormalSummary {
    let &(_, m, se) = LOCI.iter().find(|l| l.0 == id).unwrap();
    NormalSummary::from_se(m, se).unwrap()
}
