//! Physical link parameters and their evaluation with either engine.
//!
//! [`LinkParams`] carries the watts, metres and fading constants a
//! configuration file talks about. [`LinkParams::scenario`] turns them into
//! a normalized [`LinkScenario`] for given user radii, and [`evaluate_analytic`]
//! and [`evaluate_mc`] produce outage probabilities, averaged over user placement
//! when the radii are random.

use serde::{Deserialize, Serialize};

use crate::channel::{link_gain, EnvironmentParams, Geometry, LinkDomain};
use crate::error::{Error, Result};
use crate::fading::FadingSpec;
use crate::mc::{self, McConfig, McEstimate};
use crate::outage::{self, Direction, LinkScenario, Power, Scheme, User};
use crate::placement::{self, Averaging, PlacementModel, PlacementQuadrature};
use crate::specfun::SeriesControl;

/// Receiver noise: n₀ = PSD × bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    pub noise_psd_w_per_hz: f64,
    pub bandwidth_hz: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        // 1 Hz keeps P/n₀ at the values the figure setups are drawn with
        NoiseModel {
            noise_psd_w_per_hz: 1e-10,
            bandwidth_hz: 1.0,
        }
    }
}

impl NoiseModel {
    pub fn noise_power_w(&self) -> f64 {
        self.noise_psd_w_per_hz * self.bandwidth_hz
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_psd_w_per_hz > 0.0 && self.noise_psd_w_per_hz.is_finite()) {
            return Err(Error::Contract("noise_psd_w_per_hz must be positive".into()));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::Contract("bandwidth_hz must be positive".into()));
        }
        Ok(())
    }
}

/// How the near and far user radii are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Radii {
    /// Average over random placement of N users in the cell.
    PlacementAverage,
    /// Fixed horizontal distances.
    Fixed { near_m: f64, far_m: f64 },
}

/// Shared physical parameters of a two-user link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkParams {
    /// UAV altitude; ignored by terrestrial links.
    pub altitude_m: f64,
    pub target_rate_bps_per_hz: f64,
    /// Downlink base-station power.
    pub total_power_w: f64,
    /// Downlink share a₁ of the near user.
    pub near_power_share: f64,
    pub near_power_w: f64,
    pub far_power_w: f64,
    pub rice_k: f64,
    pub rician_omega: f64,
    pub rayleigh_lambda: f64,
    pub radii: Radii,
}

impl Default for LinkParams {
    fn default() -> Self {
        LinkParams {
            altitude_m: 1500.0,
            target_rate_bps_per_hz: 1.0,
            total_power_w: 5.0,
            near_power_share: 0.1,
            near_power_w: 1.0,
            far_power_w: 1.0,
            rice_k: 10.0,
            rician_omega: 1.0,
            rayleigh_lambda: 1.0,
            radii: Radii::PlacementAverage,
        }
    }
}

/// Direction, domain and scheme of one evaluated link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkKind {
    pub direction: Direction,
    pub domain: LinkDomain,
    pub scheme: Scheme,
}

/// Everything needed to turn [`LinkParams`] into numbers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalContext {
    pub env: EnvironmentParams,
    pub noise: NoiseModel,
    pub placement: PlacementModel,
    pub series: SeriesControl,
    pub quadrature: PlacementQuadrature,
}

impl EvalContext {
    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.noise.validate()?;
        self.placement.validate()?;
        self.series.validate()
    }
}

impl LinkParams {
    pub fn fading(&self, domain: LinkDomain) -> FadingSpec {
        match domain {
            LinkDomain::Terrestrial => FadingSpec::Rayleigh {
                lambda: self.rayleigh_lambda,
            },
            LinkDomain::Aerial => FadingSpec::Rician {
                k_factor: self.rice_k,
                omega: self.rician_omega,
            },
        }
    }

    /// Normalized scenario with the users at horizontal distances `r_near`, `r_far`.
    pub fn scenario(&self, ctx: &EvalContext, kind: LinkKind, r_near: f64, r_far: f64) -> Result<LinkScenario> {
        let altitude = match kind.domain {
            LinkDomain::Terrestrial => 0.0,
            LinkDomain::Aerial => self.altitude_m,
        };
        let gain = |r: f64| link_gain(&ctx.env, kind.domain, Geometry::new(altitude, r)?);
        let n0 = ctx.noise.noise_power_w();
        let power = match kind.direction {
            Direction::Downlink => Power::Downlink {
                total: self.total_power_w / n0,
                near_share: self.near_power_share,
            },
            Direction::Uplink => Power::Uplink {
                near: self.near_power_w / n0,
                far: self.far_power_w / n0,
            },
        };
        let fading = self.fading(kind.domain);
        let scn = LinkScenario {
            direction: kind.direction,
            domain: kind.domain,
            scheme: kind.scheme,
            gains: [gain(r_near)?, gain(r_far)?],
            power,
            target_rate: self.target_rate_bps_per_hz,
            fading: [fading, fading],
        };
        scn.validate()?;
        Ok(scn)
    }
}

/// Radii an outage expression reads, which fixes the placement average used.
pub fn averaging_for(kind: LinkKind, user: User) -> Averaging {
    match (kind.scheme, kind.direction, user) {
        (Scheme::Noma, Direction::Uplink, User::Near) => Averaging::Joint,
        (_, _, User::Near) => Averaging::Near,
        (_, _, User::Far) => Averaging::Far,
    }
}

/// Analytic outage for `user`, placement-averaged when the radii are random.
pub fn evaluate_analytic(params: &LinkParams, ctx: &EvalContext, kind: LinkKind, user: User) -> Result<f64> {
    let at = |r1: f64, r2: f64| -> Result<f64> {
        let scn = params.scenario(ctx, kind, r1, r2)?;
        Ok(outage::outage(&scn, user, ctx.series)?.probability)
    };
    match params.radii {
        Radii::Fixed { near_m, far_m } => at(near_m, far_m),
        Radii::PlacementAverage => {
            Ok(placement::expected_outage(&ctx.placement, averaging_for(kind, user), at, &ctx.quadrature)?.value)
        }
    }
}

/// Monte-Carlo outage for `user`; random radii are redrawn per snapshot.
pub fn evaluate_mc(
    params: &LinkParams,
    ctx: &EvalContext,
    kind: LinkKind,
    user: User,
    cfg: &McConfig,
) -> Result<McEstimate> {
    match params.radii {
        Radii::Fixed { near_m, far_m } => {
            let scn = params.scenario(ctx, kind, near_m, far_m)?;
            mc::simulate_outage(&scn, user, cfg)
        }
        Radii::PlacementAverage => {
            // validate once up front so the trial closure can assume success
            let probe = params.scenario(ctx, kind, ctx.placement.mean_rmin(), ctx.placement.mean_rmax())?;
            let fading = probe.fading;
            let target = params.target_rate_bps_per_hz;
            placement::simulate_snapshots(&ctx.placement, cfg, |r1, r2, rng| {
                let draw = [fading[0].sample(rng), fading[1].sample(rng)];
                // r = 0 breaks the terrestrial log-distance law; nudge to the nearest representable radius
                let scn = match params.scenario(ctx, kind, r1.max(f64::MIN_POSITIVE), r2) {
                    Ok(s) => s,
                    Err(_) => return true,
                };
                mc::capacity(&scn, user, draw) < target
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(direction: Direction, domain: LinkDomain, scheme: Scheme) -> LinkKind {
        LinkKind {
            direction,
            domain,
            scheme,
        }
    }

    #[test]
    fn scenario_normalizes_power_by_noise() {
        let ctx = EvalContext::default();
        let p = LinkParams::default();
        let scn = p
            .scenario(
                &ctx,
                kind(Direction::Downlink, LinkDomain::Aerial, Scheme::Noma),
                10.0,
                400.0,
            )
            .unwrap();
        match scn.power {
            Power::Downlink { total, near_share } => {
                assert!((total - 5e10).abs() < 1.0);
                assert_eq!(near_share, 0.1);
            }
            _ => panic!("wrong power"),
        }
        assert!(scn.gains[0] > scn.gains[1]);
    }

    #[test]
    fn terrestrial_ignores_altitude() {
        let ctx = EvalContext::default();
        let k = kind(Direction::Uplink, LinkDomain::Terrestrial, Scheme::Noma);
        let a = LinkParams::default().scenario(&ctx, k, 50.0, 400.0).unwrap();
        let b = LinkParams {
            altitude_m: 10.0,
            ..LinkParams::default()
        }
        .scenario(&ctx, k, 50.0, 400.0)
        .unwrap();
        assert_eq!(a.gains, b.gains);
    }

    #[test]
    fn fixed_radii_match_direct_outage() {
        let ctx = EvalContext::default();
        let params = LinkParams {
            radii: Radii::Fixed {
                near_m: 30.0,
                far_m: 450.0,
            },
            ..LinkParams::default()
        };
        let k = kind(Direction::Downlink, LinkDomain::Aerial, Scheme::Noma);
        let direct = outage::dl_noma_outage(&params.scenario(&ctx, k, 30.0, 450.0).unwrap(), User::Far)
            .unwrap()
            .probability;
        assert_eq!(evaluate_analytic(&params, &ctx, k, User::Far).unwrap(), direct);
    }

    #[test]
    fn averaging_choice() {
        let up = kind(Direction::Uplink, LinkDomain::Aerial, Scheme::Noma);
        assert_eq!(averaging_for(up, User::Near), Averaging::Joint);
        assert_eq!(averaging_for(up, User::Far), Averaging::Far);
        let oma = kind(Direction::Uplink, LinkDomain::Aerial, Scheme::Oma);
        assert_eq!(averaging_for(oma, User::Near), Averaging::Near);
    }
}
