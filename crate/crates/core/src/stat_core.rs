//! Scalar normal-distribution building blocks and inverse-variance pooling.
//!
//! Tail probabilities are evaluated through the complementary error function
//! so that `1 - Φ(x)` keeps full relative precision for large `x`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::erf::erfc;

use crate::error::{finite, open_unit, positive, Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::OutOfRange {
                name: "probability",
                range: "[0, 1]",
                value,
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// An effect estimate with its squared standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEstimate {
    pub mean: f64,
    pub variance: f64,
}

impl WeightedEstimate {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        finite("mean", mean)?;
        positive("variance", variance)?;
        Ok(Self { mean, variance })
    }

    pub fn from_se(mean: f64, se: f64) -> Result<Self> {
        positive("standard error", se)?;
        Self::new(mean, se * se)
    }

    pub fn se(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn precision(&self) -> f64 {
        1.0 / self.variance
    }
}

/// Density of `N(mean, variance)` at `x`.
pub fn normal_pdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    ln_normal_pdf(x, mean, variance).map(f64::exp)
}

/// Log density of `N(mean, variance)` at `x`.
pub fn ln_normal_pdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    finite("x", x)?;
    finite("mean", mean)?;
    positive("variance", variance)?;
    let d = x - mean;
    Ok(-LN_SQRT_2PI - 0.5 * variance.ln() - d * d / (2.0 * variance))
}

/// Standard normal distribution function Φ(x).
pub fn normal_cdf(x: f64) -> Result<Probability> {
    finite("x", x)?;
    Ok(Probability(std_normal_cdf(x)))
}

/// Φ(x) without input validation; NaN propagates.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(x)` evaluated without cancellation.
#[inline]
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// `ln(1 - Φ(x))`, finite for every finite `x`.
pub fn ln_std_normal_sf(x: f64) -> f64 {
    if x < 35.0 {
        return std_normal_sf(x).ln();
    }
    // erfc underflows here; use the Mills-ratio asymptotic series.
    let r = 1.0 / (x * x);
    let series = 1.0 - r * (1.0 - r * (3.0 - 15.0 * r));
    -0.5 * x * x - (x * SQRT_2PI).ln() + series.ln()
}

#[inline]
fn std_normal_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

// Acklam's rational approximation, relative error about 1.15e-9 before polishing.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

fn acklam_lower(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Quantile for `p <= 0.5`, where Φ(x) is computed with full relative accuracy.
fn quantile_lower(p: f64) -> f64 {
    let mut x = acklam_lower(p);
    for _ in 0..2 {
        let err = std_normal_cdf(x) - p;
        let u = err / std_normal_density(x);
        // Halley step
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Standard normal quantile Φ⁻¹(p) for `p` strictly inside `(0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    open_unit("p", p)?;
    if p <= 0.5 {
        Ok(quantile_lower(p))
    } else {
        // 1 - p is exact for p >= 0.5
        Ok(-quantile_lower(1.0 - p))
    }
}

/// Two-sided critical value `Φ⁻¹(1 - α/2)`.
pub fn two_sided_critical(alpha: f64) -> Result<f64> {
    open_unit("alpha", alpha)?;
    Ok(-quantile_lower(0.5 * alpha))
}

/// Fixed-effects inverse-variance pooling.
pub fn pool_fixed(estimates: &[WeightedEstimate]) -> Result<WeightedEstimate> {
    if estimates.is_empty() {
        return Err(Error::Empty("pool_fixed needs at least one estimate"));
    }
    if let [single] = estimates {
        return WeightedEstimate::new(single.mean, single.variance);
    }
    let mut precision = 0.0;
    let mut weighted = 0.0;
    for e in estimates {
        positive("variance", e.variance)?;
        finite("mean", e.mean)?;
        precision += 1.0 / e.variance;
        weighted += e.mean / e.variance;
    }
    WeightedEstimate::new(weighted / precision, 1.0 / precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn pdf_peak_and_reference() {
        assert_relative_eq!(
            normal_pdf(0.0, 0.0, 1.0).unwrap(),
            0.398_942_280_401_432_7,
            max_relative = 1e-15
        );
        for &(m, v) in &[(0.3, 2.0), (-1.0, 1e-6), (5.0, 0.009 * 0.009)] {
            let peak = 1.0 / (2.0 * PI * v).sqrt();
            assert_relative_eq!(normal_pdf(m, m, v).unwrap(), peak, max_relative = 1e-14);
        }
        // 40-digit reference
        assert_relative_eq!(
            normal_pdf(0.045, 0.0, 0.009 * 0.009).unwrap(),
            1.651_910_571_926_997_5e-4,
            max_relative = 1e-12
        );
    }

    #[test]
    fn pdf_rejects_bad_input() {
        assert!(normal_pdf(0.0, 0.0, 0.0).is_err());
        assert!(normal_pdf(0.0, 0.0, -1.0).is_err());
        assert!(normal_pdf(f64::NAN, 0.0, 1.0).is_err());
        assert!(normal_pdf(0.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn cdf_basics() {
        assert_eq!(normal_cdf(0.0).unwrap().value(), 0.5);
        for &x in &[0.1, 1.0, 2.5, 3.393, 6.0, 7.9] {
            let s = normal_cdf(x).unwrap().value() + normal_cdf(-x).unwrap().value();
            assert!((s - 1.0).abs() <= 1e-15, "{x}: {s}");
        }
        assert!(normal_cdf(f64::NAN).is_err());
    }

    #[test]
    fn log_tail_is_continuous_across_switch() {
        let below = ln_std_normal_sf(35.0 - 1e-9);
        let above = ln_std_normal_sf(35.0);
        assert!((below - above).abs() < 1e-6);
        // asymptotic branch against the closed form
        let x = 40.0_f64;
        let approx = -0.5 * x * x - (x * SQRT_2PI).ln();
        assert!((ln_std_normal_sf(x) - approx).abs() < 1e-3);
    }

    #[test]
    fn quantile_anchors() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert_relative_eq!(
            normal_quantile(0.975).unwrap(),
            1.959_963_984_540_054,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            two_sided_critical(6.9e-4).unwrap(),
            3.393_522_063_267_677,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            normal_quantile(1e-10).unwrap(),
            -6.361_340_902_404_056,
            max_relative = 1e-13
        );
    }

    #[test]
    fn quantile_rejects_boundaries() {
        for p in [0.0, 1.0, -0.1, 1.1, f64::NAN] {
            assert!(normal_quantile(p).is_err(), "{p}");
        }
    }

    #[test]
    fn pooling_identities() {
        let p = pool_fixed(&[
            WeightedEstimate::new(1.0, 1.0).unwrap(),
            WeightedEstimate::new(3.0, 1.0).unwrap(),
        ])
        .unwrap();
        assert_eq!((p.mean, p.variance), (2.0, 0.5));

        let single = WeightedEstimate::new(0.3, 0.02).unwrap();
        assert_eq!(pool_fixed(&[single]).unwrap(), single);
        assert!(pool_fixed(&[]).is_err());
    }

    #[test]
    fn pooling_crp_panels_matches_rational_oracle() {
        // exact: mean = 11757/74500, variance = 49/1490000
        let p = pool_fixed(&[
            WeightedEstimate::from_se(0.193, 0.007).unwrap(),
            WeightedEstimate::from_se(0.086, 0.010).unwrap(),
        ])
        .unwrap();
        assert_relative_eq!(p.mean, 11757.0 / 74500.0, max_relative = 1e-14);
        assert_relative_eq!(p.variance, 49.0 / 1_490_000.0, max_relative = 1e-14);
    }

    #[test]
    fn probability_range() {
        assert!(Probability::new(-1e-12).is_err());
        assert!(Probability::new(1.0 + 1e-12).is_err());
        assert_eq!(Probability::new(0.25).unwrap().complement().value(), 0.75);
    }
}
