//! Order statistics of user radii in a uniformly populated disk and
//! placement-averaged outage.
//!
//! With N users uniform in a disk of radius R each radius has density
//! f(r) = 2r/R² and CDF F(r) = r²/R². The near user sits at the minimum
//! radius and the far user at the maximum.
//!
//! Averages apply Gauss–Legendre directly in r, restricted to the interval
//! that carries all but [`NEGLECTED_MASS`] of the order statistic: [0, r_hi]
//! for the minimum and [r_lo, R] for the maximum. At N = 100 the densities
//! are sharply peaked, and clipping away the empty part of the disk lets a
//! fixed rule resolve both the peak and the outage curve. The joint
//! near/far average treats both radii as independent.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{count_events, McConfig, McEstimate};
use crate::quad::GaussLegendre;

/// Probability mass of an order statistic left outside the integration interval.
pub const NEGLECTED_MASS: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlacementModel {
    pub n_users: usize,
    pub cell_radius_m: f64,
}

impl Default for PlacementModel {
    fn default() -> Self {
        PlacementModel {
            n_users: 100,
            cell_radius_m: 500.0,
        }
    }
}

impl PlacementModel {
    pub fn new(n_users: usize, cell_radius_m: f64) -> Result<Self> {
        let pm = PlacementModel { n_users, cell_radius_m };
        pm.validate()?;
        Ok(pm)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_users < 2 {
            return Err(Error::Contract(format!(
                "placement needs at least two users, got {}",
                self.n_users
            )));
        }
        if !(self.cell_radius_m > 0.0 && self.cell_radius_m.is_finite()) {
            return Err(Error::Contract(format!(
                "cell radius must be positive, got {}",
                self.cell_radius_m
            )));
        }
        Ok(())
    }

    fn unit(&self, r: f64) -> Option<f64> {
        let big_r = self.cell_radius_m;
        (0.0..=big_r).contains(&r).then(|| r / big_r)
    }

    /// Density of the minimum radius: N(1 − F)^{N−1} f. Zero outside [0, R].
    pub fn pdf_rmin(&self, r: f64) -> f64 {
        let Some(x) = self.unit(r) else { return 0.0 };
        let n = self.n_users as f64;
        n * (1.0 - x * x).powf(n - 1.0) * 2.0 * x / self.cell_radius_m
    }

    /// Density of the maximum radius: N F^{N−1} f. Zero outside [0, R].
    pub fn pdf_rmax(&self, r: f64) -> f64 {
        let Some(x) = self.unit(r) else { return 0.0 };
        let n = self.n_users as f64;
        n * (x * x).powf(n - 1.0) * 2.0 * x / self.cell_radius_m
    }

    pub fn cdf_rmin(&self, r: f64) -> f64 {
        let x = (r / self.cell_radius_m).clamp(0.0, 1.0);
        1.0 - (1.0 - x * x).powf(self.n_users as f64)
    }

    pub fn cdf_rmax(&self, r: f64) -> f64 {
        let x = (r / self.cell_radius_m).clamp(0.0, 1.0);
        (x * x).powf(self.n_users as f64)
    }

    /// Inverse CDF of the minimum radius.
    pub fn quantile_rmin(&self, u: f64) -> f64 {
        let n = self.n_users as f64;
        // 1 − (1 − u)^{1/N} without cancellation for small u
        let s = -((-u).ln_1p() / n).exp_m1();
        self.cell_radius_m * s.clamp(0.0, 1.0).sqrt()
    }

    /// Inverse CDF of the maximum radius.
    pub fn quantile_rmax(&self, u: f64) -> f64 {
        self.cell_radius_m * u.powf(0.5 / self.n_users as f64)
    }

    /// Interval holding all but [`NEGLECTED_MASS`] of the minimum radius.
    pub fn support_rmin(&self) -> (f64, f64) {
        (0.0, self.quantile_rmin(1.0 - NEGLECTED_MASS))
    }

    /// Interval holding all but [`NEGLECTED_MASS`] of the maximum radius.
    pub fn support_rmax(&self) -> (f64, f64) {
        (self.quantile_rmax(NEGLECTED_MASS), self.cell_radius_m)
    }

    /// E[r_max] = R·2N/(2N+1).
    pub fn mean_rmax(&self) -> f64 {
        let n = self.n_users as f64;
        self.cell_radius_m * 2.0 * n / (2.0 * n + 1.0)
    }

    /// E[r_min] = R·Γ(N+1)Γ(3/2)/Γ(N+3/2).
    pub fn mean_rmin(&self) -> f64 {
        use crate::specfun::log_gamma;
        let n = self.n_users as f64;
        let ln = log_gamma(n + 1.0).unwrap() + log_gamma(1.5).unwrap() - log_gamma(n + 1.5).unwrap();
        self.cell_radius_m * ln.exp()
    }

    /// Draws the (minimum, maximum) radius of one snapshot of N users.
    pub fn sample_extremes<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for _ in 0..self.n_users {
            let u: f64 = rng.random();
            lo = lo.min(u);
            hi = hi.max(u);
        }
        (self.cell_radius_m * lo.sqrt(), self.cell_radius_m * hi.sqrt())
    }
}

/// Which user radii an outage expression depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Only the near user's radius.
    Near,
    /// Only the far user's radius.
    Far,
    /// Both radii, under the product-density approximation.
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlacementQuadrature {
    /// Gauss–Legendre order for single-radius averages.
    pub order_1d: usize,
    /// Gauss–Legendre order per axis for the joint average.
    pub order_2d: usize,
    /// Largest accepted difference between order n and order n/2.
    pub tolerance: f64,
}

impl Default for PlacementQuadrature {
    fn default() -> Self {
        PlacementQuadrature {
            order_1d: 64,
            order_2d: 64,
            tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementAverage {
    pub value: f64,
    /// |Q(n) − Q(n/2)| for the rule order n that produced `value`.
    pub error_estimate: f64,
}

fn nodes(rule: &GaussLegendre, (lo, hi): (f64, f64), pdf: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    rule.mapped(lo, hi).map(|(r, w)| (r, w * pdf(r))).collect()
}

fn average_1d<F>(nodes: &[(f64, f64)], f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut acc = 0.0;
    for &(r, w) in nodes {
        acc += w * f(r)?;
    }
    Ok(acc)
}

fn average_2d<F>(near: &[(f64, f64)], far: &[(f64, f64)], f: &F) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let mut acc = 0.0;
    for &(r1, w1) in near {
        for &(r2, w2) in far {
            acc += w1 * w2 * f(r1, r2)?;
        }
    }
    Ok(acc)
}

/// Placement-averaged value of `outage(r_near, r_far)`.
///
/// For [`Averaging::Near`] and [`Averaging::Far`] the unused radius is held at
/// its mean. The result is the order-n rule; the error estimate compares it
/// against order n/2 and must stay below `quad.tolerance`.
pub fn expected_outage<F>(
    pm: &PlacementModel,
    averaging: Averaging,
    outage: F,
    quad: &PlacementQuadrature,
) -> Result<PlacementAverage>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    pm.validate()?;
    let order = match averaging {
        Averaging::Joint => quad.order_2d,
        _ => quad.order_1d,
    };
    if order < 2 {
        return Err(Error::Contract("placement quadrature order must be at least 2".into()));
    }
    let fine = GaussLegendre::new(order);
    let coarse = GaussLegendre::new(order / 2);
    let eval = |rule: &GaussLegendre| -> Result<f64> {
        let near = || nodes(rule, pm.support_rmin(), |r| pm.pdf_rmin(r));
        let far = || nodes(rule, pm.support_rmax(), |r| pm.pdf_rmax(r));
        match averaging {
            Averaging::Near => {
                let r2 = pm.mean_rmax();
                average_1d(&near(), |r1| outage(r1, r2))
            }
            Averaging::Far => {
                let r1 = pm.mean_rmin();
                average_1d(&far(), |r2| outage(r1, r2))
            }
            Averaging::Joint => average_2d(&near(), &far(), &outage),
        }
    };
    let value = eval(&fine)?;
    let error_estimate = (value - eval(&coarse)?).abs();
    if error_estimate.is_nan() || error_estimate > quad.tolerance {
        return Err(Error::Quadrature {
            residual: error_estimate,
        });
    }
    Ok(PlacementAverage {
        value: value.clamp(0.0, 1.0),
        error_estimate,
    })
}

/// Monte-Carlo estimate over random snapshots: every trial scatters N users,
/// keeps the nearest and farthest, and asks `event` whether the tracked user
/// is in outage at those radii.
pub fn simulate_snapshots<F>(pm: &PlacementModel, cfg: &McConfig, event: F) -> Result<McEstimate>
where
    F: Fn(f64, f64, &mut ChaCha8Rng) -> bool + Sync,
{
    pm.validate()?;
    count_events(cfg, |rng| {
        let (r_min, r_max) = pm.sample_extremes(rng);
        event(r_min, r_max, rng)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_user_densities_reduce_to_uniform_disk() {
        let pm = PlacementModel {
            n_users: 1,
            cell_radius_m: 2.0,
        };
        for r in [0.0, 0.5, 1.7] {
            assert!((pm.pdf_rmin(r) - r / 2.0).abs() < 1e-15);
            assert!((pm.pdf_rmax(r) - r / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn densities_vanish_outside_disk() {
        let pm = PlacementModel::default();
        assert_eq!(pm.pdf_rmin(-1.0), 0.0);
        assert_eq!(pm.pdf_rmax(501.0), 0.0);
    }

    #[test]
    fn quantiles_invert_cdfs() {
        let pm = PlacementModel::default();
        for u in [1e-9, 0.01, 0.3, 0.5, 0.9, 0.999] {
            assert!((pm.cdf_rmin(pm.quantile_rmin(u)) - u).abs() < 1e-12);
            assert!((pm.cdf_rmax(pm.quantile_rmax(u)) - u).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_rmax_closed_form() {
        let pm = PlacementModel::default();
        assert!((pm.mean_rmax() - 497.512_437_810_945_3).abs() < 1e-9);
    }

    #[test]
    fn constant_outage_averages_to_itself() {
        let pm = PlacementModel::default();
        let quad = PlacementQuadrature::default();
        for averaging in [Averaging::Near, Averaging::Far, Averaging::Joint] {
            let avg = expected_outage(&pm, averaging, |_, _| Ok(0.37), &quad).unwrap();
            assert!((avg.value - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_disk_evaluates_at_origin() {
        let pm = PlacementModel::new(100, 1e-9).unwrap();
        let g = |r1: f64, r2: f64| Ok(0.2 + 0.1 * (r1 + r2) / (1.0 + r1 + r2));
        let avg = expected_outage(&pm, Averaging::Joint, g, &PlacementQuadrature::default()).unwrap();
        assert!((avg.value - 0.2).abs() < 1e-9);
    }

    #[test]
    fn rejects_invalid_models() {
        assert!(PlacementModel::new(1, 10.0).is_err());
        assert!(PlacementModel::new(5, 0.0).is_err());
    }

    #[test]
    fn snapshot_extremes_are_ordered() {
        use rand::SeedableRng;
        let pm = PlacementModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (lo, hi) = pm.sample_extremes(&mut rng);
            assert!(0.0 <= lo && lo <= hi && hi <= 500.0);
        }
    }
}
