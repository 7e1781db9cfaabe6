//! Large-scale propagation: terrestrial log-distance loss, UAV air-to-ground
//! loss with an elevation-dependent LOS weight, and dB → linear gain.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// Propagation constants shared by both link domains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentParams {
    pub carrier_frequency_hz: f64,
    pub speed_of_light_m_per_s: f64,
    /// Terrestrial path-loss exponent.
    pub terrestrial_exponent: f64,
    /// Terrestrial excess loss added to the free-space constant.
    pub terrestrial_excess_loss_db: f64,
    pub los_excess_loss_db: f64,
    pub nlos_excess_loss_db: f64,
    /// Sigmoid constant `a` of the LOS probability (dimensionless).
    pub los_a: f64,
    /// Sigmoid slope `b` of the LOS probability, per degree of elevation.
    pub los_b_per_deg: f64,
}

impl Default for EnvironmentParams {
    fn default() -> Self {
        EnvironmentParams {
            carrier_frequency_hz: 2.5e9,
            speed_of_light_m_per_s: SPEED_OF_LIGHT,
            terrestrial_exponent: 3.0,
            terrestrial_excess_loss_db: 1.0,
            los_excess_loss_db: 1.6,
            nlos_excess_loss_db: 23.0,
            los_a: 12.8,
            los_b_per_deg: 0.11,
        }
    }
}

impl EnvironmentParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Contract(format!("environment: {what}")));
        if !(self.carrier_frequency_hz > 0.0 && self.carrier_frequency_hz.is_finite()) {
            return bad("carrier_frequency_hz must be positive");
        }
        if !(self.speed_of_light_m_per_s > 0.0 && self.speed_of_light_m_per_s.is_finite()) {
            return bad("speed_of_light_m_per_s must be positive");
        }
        if !(self.terrestrial_exponent >= 2.0 && self.terrestrial_exponent.is_finite()) {
            return bad("terrestrial_exponent must be at least 2");
        }
        if !self.terrestrial_excess_loss_db.is_finite() || !self.los_excess_loss_db.is_finite() {
            return bad("excess losses must be finite");
        }
        if !(self.nlos_excess_loss_db >= self.los_excess_loss_db && self.nlos_excess_loss_db.is_finite()) {
            return bad("nlos_excess_loss_db must not be below los_excess_loss_db");
        }
        if !(self.los_a > 0.0 && self.los_a.is_finite()) {
            return bad("los_a must be positive");
        }
        if !(self.los_b_per_deg > 0.0 && self.los_b_per_deg.is_finite()) {
            return bad("los_b_per_deg must be positive");
        }
        Ok(())
    }

    /// 20·log₁₀(4π f_c / c).
    pub fn free_space_constant_db(&self) -> f64 {
        20.0 * (4.0 * PI * self.carrier_frequency_hz / self.speed_of_light_m_per_s).log10()
    }
}

/// Position of a ground user relative to the base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Base-station altitude; zero for a terrestrial site.
    pub altitude_m: f64,
    /// Horizontal distance from the cell centre.
    pub horizontal_m: f64,
}

impl Geometry {
    pub fn new(altitude_m: f64, horizontal_m: f64) -> Result<Self> {
        if !(altitude_m >= 0.0 && altitude_m.is_finite()) {
            return Err(Error::domain(
                "Geometry",
                format!("altitude must be >= 0, got {altitude_m}"),
            ));
        }
        if !(horizontal_m >= 0.0 && horizontal_m.is_finite()) {
            return Err(Error::domain(
                "Geometry",
                format!("horizontal distance must be >= 0, got {horizontal_m}"),
            ));
        }
        Ok(Geometry {
            altitude_m,
            horizontal_m,
        })
    }

    pub fn terrestrial(horizontal_m: f64) -> Result<Self> {
        Self::new(0.0, horizontal_m)
    }

    /// Euclidean distance √(h² + r²).
    pub fn distance(&self) -> f64 {
        self.altitude_m.hypot(self.horizontal_m)
    }

    /// Elevation angle seen from the user, in degrees.
    pub fn elevation_deg(&self) -> f64 {
        self.altitude_m.atan2(self.horizontal_m).to_degrees()
    }
}

/// Which large-scale model a link follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkDomain {
    Terrestrial,
    Aerial,
}

impl LinkDomain {
    pub fn as_str(&self) -> &'static str {
        match self {
            LinkDomain::Terrestrial => "terrestrial",
            LinkDomain::Aerial => "aerial",
        }
    }
}

/// 10·α·log₁₀(d) + β with β = 20·log₁₀(4π f_c/c) + η.
pub fn terrestrial_path_loss_db(env: &EnvironmentParams, d: f64) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::domain(
            "terrestrial_path_loss_db",
            format!("distance must be positive, got {d}"),
        ));
    }
    Ok(10.0 * env.terrestrial_exponent * d.log10() + env.free_space_constant_db() + env.terrestrial_excess_loss_db)
}

/// Probability of a line-of-sight link, with the elevation angle in degrees.
pub fn p_los(env: &EnvironmentParams, h: f64, r: f64) -> Result<f64> {
    if !(h >= 0.0 && h.is_finite()) || !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain(
            "p_los",
            format!("need h >= 0 and r >= 0, got h={h}, r={r}"),
        ));
    }
    if h == 0.0 && r == 0.0 {
        return Err(Error::domain("p_los", "elevation undefined at h = r = 0"));
    }
    let theta = h.atan2(r).to_degrees();
    Ok(1.0 / (1.0 + env.los_a * (-env.los_b_per_deg * (theta - env.los_a)).exp()))
}

/// 20·log₁₀(d) + A·P_LOS + B with A = η_LOS − η_NLOS and B = 20·log₁₀(4π f_c/c) + η_NLOS.
pub fn aerial_path_loss_db(env: &EnvironmentParams, h: f64, r: f64) -> Result<f64> {
    let p = p_los(env, h, r)
        .map_err(|_| Error::domain("aerial_path_loss_db", format!("degenerate geometry h={h}, r={r}")))?;
    let excess_a = env.los_excess_loss_db - env.nlos_excess_loss_db;
    let excess_b = env.free_space_constant_db() + env.nlos_excess_loss_db;
    Ok(20.0 * h.hypot(r).log10() + excess_a * p + excess_b)
}

/// Linear power gain 10^{−L/10}.
pub fn channel_gain(loss_db: f64) -> Result<f64> {
    if !loss_db.is_finite() {
        return Err(Error::domain(
            "channel_gain",
            format!("loss must be finite, got {loss_db}"),
        ));
    }
    Ok(10f64.powf(-0.1 * loss_db))
}

/// Path loss for the given domain; the terrestrial model ignores the altitude.
pub fn path_loss_db(env: &EnvironmentParams, domain: LinkDomain, geo: Geometry) -> Result<f64> {
    match domain {
        LinkDomain::Terrestrial => terrestrial_path_loss_db(env, geo.horizontal_m),
        LinkDomain::Aerial => aerial_path_loss_db(env, geo.altitude_m, geo.horizontal_m),
    }
}

/// Linear large-scale gain for the given domain.
pub fn link_gain(env: &EnvironmentParams, domain: LinkDomain, geo: Geometry) -> Result<f64> {
    channel_gain(path_loss_db(env, domain, geo)?)
}
