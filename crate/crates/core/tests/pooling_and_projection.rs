//! Algebraic laws of pooling and evidence projection.

use covprio_core::evidence::{init_spike_slab, project_spike_slab};
use covprio_core::{
    pool_fixed, project_variance_fixed, project_variance_random, NormalSummary, Probability,
    SpikeSlabState, StudyPlan, WeightedEstimate,
};
use proptest::prelude::*;

fn est() -> impl Strategy<Value = WeightedEstimate> {
    (-1.0f64..1.0, 1e-4f64..1.0).prop_map(|(m, v)| WeightedEstimate::new(m, v).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b.abs().max(1e-300)).abs()
}

proptest! {
    #[test]
    fn pooled_variance_below_every_input(es in prop::collection::vec(est(), 1..8)) {
        let p = pool_fixed(&es).unwrap();
        let min = es.iter().map(|e| e.variance).fold(f64::INFINITY, f64::min);
        if es.len() == 1 {
            prop_assert_eq!(p.variance, min);
        } else {
            prop_assert!(p.variance < min);
        }
    }

    #[test]
    fn pooling_is_permutation_invariant(mut es in prop::collection::vec(est(), 2..8), seed in any::<u64>()) {
        let a = pool_fixed(&es).unwrap();
        let n = es.len();
        es.rotate_left((seed as usize) % n);
        es.swap(0, n - 1);
        let b = pool_fixed(&es).unwrap();
        prop_assert!(rel(a.variance, b.variance) < 1e-12);
        prop_assert!((a.mean - b.mean).abs() < 1e-12 * (1.0 + a.mean.abs()));
    }

    #[test]
    fn pairwise_pooling_is_associative(x in est(), y in est(), z in est()) {
        let left = pool_fixed(&[pool_fixed(&[x, y]).unwrap(), z]).unwrap();
        let right = pool_fixed(&[x, pool_fixed(&[y, z]).unwrap()]).unwrap();
        let all = pool_fixed(&[x, y, z]).unwrap();
        prop_assert!(rel(left.variance, all.variance) < 1e-12);
        prop_assert!(rel(right.variance, all.variance) < 1e-12);
        prop_assert!((left.mean - all.mean).abs() < 1e-12 * (1.0 + all.mean.abs()));
        prop_assert!((right.mean - all.mean).abs() < 1e-12 * (1.0 + all.mean.abs()));
    }

    #[test]
    fn random_projection_increases_with_heterogeneity(s in 1e-5f64..1.0, v in 1e-5f64..1.0, g in 0.0f64..1.0, dg in 1e-6f64..1.0) {
        let a = project_variance_random(s, v, g).unwrap();
        let b = project_variance_random(s, v, g + dg).unwrap();
        prop_assert!(b > a);
        prop_assert!(b < s);
    }

    #[test]
    fn chained_projection_composes(s in 1e-5f64..1.0, va in 1e-5f64..1.0, vb in 1e-5f64..1.0) {
        let chained = project_variance_fixed(project_variance_fixed(s, va).unwrap(), vb).unwrap();
        let combined = project_variance_fixed(s, 1.0 / (1.0 / va + 1.0 / vb)).unwrap();
        prop_assert!(rel(chained, combined) < 1e-12);
    }

    #[test]
    fn inclusion_probability_never_decreases(
        pi in 1e-12f64..0.999,
        m in -0.5f64..0.5,
        se in 1e-3f64..0.2,
        v in 1e-6f64..1.0,
        g in 0.0f64..0.1,
    ) {
        let slab = NormalSummary::from_se(m, se).unwrap();
        let st = SpikeSlabState::new(Probability::new(pi).unwrap(), slab);
        let p = project_spike_slab(st, &StudyPlan::with_variance(v, g).unwrap()).unwrap();
        let after = p.spike_after.unwrap();
        prop_assert!(after.log_odds() >= st.log_odds());
        prop_assert!(p.after.variance < slab.variance || p.after.variance == slab.variance && v > 1e6 * slab.variance);
        prop_assert!((p.after.mean - m).abs() <= 1e-12 * (1.0 + m.abs()));
    }

    #[test]
    fn spike_projection_variance_agrees_with_random_effects(m in -0.5f64..0.5, se in 1e-3f64..0.2, v in 1e-6f64..1.0, g in 0.0f64..0.1) {
        let slab = NormalSummary::from_se(m, se).unwrap();
        let st = init_spike_slab(1e-6, slab).unwrap();
        let p = project_spike_slab(st, &StudyPlan::with_variance(v, g).unwrap()).unwrap();
        let want = project_variance_random(slab.variance, v, g).unwrap();
        prop_assert!(rel(p.after.variance, want) < 1e-12);
    }
}
