//! JSON configuration, parameter sweeps, validation grids and CSV output.
//!
//! A [`Config`] bundles the environment, the base [`LinkParams`] and
//! optional `sweep` and `validate` blocks. Every physical field carries its
//! unit in the key, unknown keys are rejected and omitted keys take their
//! documented defaults. Sweep points are evaluated on a worker pool and the
//! rows come back in sweep order, so output is byte-identical for any worker
//! count.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{EnvironmentParams, LinkDomain};
use crate::error::{Error, Result};
use crate::fading::FadingSpec;
use crate::mc::{self, McConfig};
use crate::outage::{self, Direction, LinkScenario, Power, Scheme, User};
use crate::placement::{PlacementModel, PlacementQuadrature};
use crate::scenario::{evaluate_analytic, evaluate_mc, EvalContext, LinkKind, LinkParams, NoiseModel};
use crate::specfun::SeriesControl;

/// Which estimator fills a result row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Analytic,
    MonteCarlo,
    Both,
}

impl Engine {
    pub fn analytic(&self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }

    pub fn monte_carlo(&self) -> bool {
        matches!(self, Engine::MonteCarlo | Engine::Both)
    }
}

/// Swept quantity; the serialized name is also the CSV column header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    TargetRateBpsPerHz,
    AltitudeM,
    /// Downlink near-user share a₁.
    NearPowerShare,
    /// Both uplink transmit powers.
    UserPowerW,
    RiceK,
}

impl SweepVariable {
    pub fn column(&self) -> &'static str {
        match self {
            SweepVariable::TargetRateBpsPerHz => "target_rate_bps_per_hz",
            SweepVariable::AltitudeM => "altitude_m",
            SweepVariable::NearPowerShare => "near_power_share",
            SweepVariable::UserPowerW => "user_power_w",
            SweepVariable::RiceK => "rice_k",
        }
    }

    pub fn apply(&self, p: &mut LinkParams, v: f64) {
        match self {
            SweepVariable::TargetRateBpsPerHz => p.target_rate_bps_per_hz = v,
            SweepVariable::AltitudeM => p.altitude_m = v,
            SweepVariable::NearPowerShare => p.near_power_share = v,
            SweepVariable::UserPowerW => {
                p.near_power_w = v;
                p.far_power_w = v;
            }
            SweepVariable::RiceK => p.rice_k = v,
        }
    }
}

/// Per-case replacements for fields of the base [`LinkParams`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub altitude_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_rate_bps_per_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_power_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near_power_share: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near_power_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub far_power_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rice_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rician_omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rayleigh_lambda: Option<f64>,
}

impl LinkOverrides {
    pub fn apply(&self, base: &LinkParams) -> LinkParams {
        let mut p = *base;
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut p.altitude_m, self.altitude_m);
        set(&mut p.target_rate_bps_per_hz, self.target_rate_bps_per_hz);
        set(&mut p.total_power_w, self.total_power_w);
        set(&mut p.near_power_share, self.near_power_share);
        set(&mut p.near_power_w, self.near_power_w);
        set(&mut p.far_power_w, self.far_power_w);
        set(&mut p.rice_k, self.rice_k);
        set(&mut p.rician_omega, self.rician_omega);
        set(&mut p.rayleigh_lambda, self.rayleigh_lambda);
        p
    }
}

/// A labelled variant of the base link, e.g. one Rician K per curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCase {
    pub tag: String,
    #[serde(default)]
    pub set: LinkOverrides,
}

/// One requested output: a user of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub scheme: Scheme,
    pub direction: Direction,
    pub domain: LinkDomain,
    pub user: User,
}

impl OutputSpec {
    pub fn kind(&self) -> LinkKind {
        LinkKind {
            direction: self.direction,
            domain: self.domain,
            scheme: self.scheme,
        }
    }

    fn with_scheme(&self, scheme: Scheme) -> OutputSpec {
        OutputSpec { scheme, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    /// Number of points including both ends, at least 2.
    pub steps: usize,
    #[serde(default = "default_cases")]
    pub cases: Vec<SweepCase>,
    pub outputs: Vec<OutputSpec>,
}

fn default_cases() -> Vec<SweepCase> {
    vec![SweepCase {
        tag: "base".into(),
        set: LinkOverrides::default(),
    }]
}

impl SweepSpec {
    /// Evenly spaced values from `start` to `stop`; equal ends repeat the point.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Config(format!(
                "sweep steps must be at least 2, got {}",
                self.steps
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config("sweep range must be finite".into()));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("sweep needs at least one output".into()));
        }
        if self.cases.is_empty() {
            return Err(Error::Config("sweep needs at least one case".into()));
        }
        for c in &self.cases {
            if c.tag.is_empty() {
                return Err(Error::Config("sweep case tags must be non-empty".into()));
            }
        }
        Ok(())
    }
}

/// Analytic against Monte-Carlo check of the uplink near-user expression
/// on a grid of normalized coefficients.
///
/// The grid gives α₁ and α₂ at 1 bit/s/Hz; at other target rates both scale
/// with the SINR threshold 2^R − 1, so R = 0 means no outage anywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSpec {
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub near_fading: FadingSpec,
    pub far_fading: FadingSpec,
    #[serde(default = "one")]
    pub target_rate_bps_per_hz: f64,
    #[serde(default = "default_abs_tolerance")]
    pub abs_tolerance: f64,
    #[serde(default = "default_se_multiplier")]
    pub se_multiplier: f64,
}

fn one() -> f64 {
    1.0
}

fn default_abs_tolerance() -> f64 {
    5e-3
}

fn default_se_multiplier() -> f64 {
    4.0
}

impl ValidateSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alpha1.is_empty() || self.alpha2.is_empty() {
            return Err(Error::Config("validation grid must not be empty".into()));
        }
        for &a in self.alpha1.iter().chain(&self.alpha2) {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Config(format!("validation alphas must be positive, got {a}")));
            }
        }
        self.near_fading.validate().map_err(to_config)?;
        self.far_fading.validate().map_err(to_config)?;
        if self.near_fading.is_rayleigh() != self.far_fading.is_rayleigh() {
            return Err(Error::Config(
                "near and far fading must both be rayleigh or both rician".into(),
            ));
        }
        if !(self.target_rate_bps_per_hz >= 0.0 && self.target_rate_bps_per_hz.is_finite()) {
            return Err(Error::Config("validation target rate must be >= 0".into()));
        }
        if !(self.abs_tolerance >= 0.0 && self.se_multiplier >= 0.0) {
            return Err(Error::Config("validation tolerances must be >= 0".into()));
        }
        Ok(())
    }

    /// Uplink scenario whose near-user coefficients are the grid point scaled
    /// by 2^R − 1: unit gains, p₁ = 1/α₂ and p₂ = α₁/α₂.
    pub fn scenario(&self, alpha1: f64, alpha2: f64) -> LinkScenario {
        LinkScenario {
            direction: Direction::Uplink,
            domain: if self.near_fading.is_rayleigh() {
                LinkDomain::Terrestrial
            } else {
                LinkDomain::Aerial
            },
            scheme: Scheme::Noma,
            gains: [1.0, 1.0],
            power: Power::Uplink {
                near: 1.0 / alpha2,
                far: alpha1 / alpha2,
            },
            target_rate: self.target_rate_bps_per_hz,
            fading: [self.near_fading, self.far_fading],
        }
    }
}

/// Complete run configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub environment: EnvironmentParams,
    pub noise: NoiseModel,
    pub placement: PlacementModel,
    pub series: SeriesControl,
    pub quadrature: PlacementQuadrature,
    pub link: LinkParams,
    pub monte_carlo: McConfig,
    pub engine: Engine,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validate: Option<ValidateSpec>,
}

fn to_config(e: Error) -> Error {
    match e {
        Error::Contract(msg) => Error::Config(msg),
        Error::Domain { func, reason } => Error::Config(format!("{func}: {reason}")),
        other => other,
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn context(&self) -> EvalContext {
        EvalContext {
            env: self.environment,
            noise: self.noise,
            placement: self.placement,
            series: self.series,
            quadrature: self.quadrature,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.context().validate().map_err(to_config)?;
        self.monte_carlo.validate().map_err(to_config)?;
        if self.quadrature.order_1d < 2 || self.quadrature.order_2d < 2 {
            return Err(Error::Config("placement quadrature orders must be at least 2".into()));
        }
        if self.quadrature.tolerance.is_nan() || self.quadrature.tolerance <= 0.0 {
            return Err(Error::Config("placement quadrature tolerance must be positive".into()));
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        if let Some(v) = &self.validate {
            v.validate()?;
        }
        Ok(())
    }

    fn sweep_spec(&self) -> Result<&SweepSpec> {
        self.sweep
            .as_ref()
            .ok_or_else(|| Error::Config("configuration has no sweep block".into()))
    }

    fn validate_spec(&self) -> Result<&ValidateSpec> {
        self.validate
            .as_ref()
            .ok_or_else(|| Error::Config("configuration has no validate block".into()))
    }
}

fn worker_pool(n: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Contract(format!("worker pool: {e}")))
}

/// Point estimates of one output.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimates {
    pub analytic: Option<f64>,
    /// Probability and its standard error.
    pub monte_carlo: Option<(f64, f64)>,
}

impl Estimates {
    /// Analytic value when present, otherwise the simulated one.
    pub fn preferred(&self) -> Option<f64> {
        self.analytic.or(self.monte_carlo.map(|m| m.0))
    }
}

fn estimate(
    params: &LinkParams,
    ctx: &EvalContext,
    out: OutputSpec,
    engine: Engine,
    mc_cfg: &McConfig,
) -> Result<Estimates> {
    let analytic = if engine.analytic() {
        Some(evaluate_analytic(params, ctx, out.kind(), out.user)?)
    } else {
        None
    };
    let monte_carlo = if engine.monte_carlo() {
        let e = evaluate_mc(params, ctx, out.kind(), out.user, mc_cfg)?;
        Some((e.probability(), e.std_error))
    } else {
        None
    };
    Ok(Estimates { analytic, monte_carlo })
}

/// Estimates for `outputs` and their NOMA/OMA counterparts at one link.
fn estimate_point(
    params: &LinkParams,
    ctx: &EvalContext,
    outputs: &[OutputSpec],
    engine: Engine,
    mc_cfg: &McConfig,
) -> Result<Vec<(OutputSpec, Estimates, f64)>> {
    let mut cache: HashMap<OutputSpec, Estimates> = HashMap::new();
    let mut get = |o: OutputSpec| -> Result<Estimates> {
        if let Some(e) = cache.get(&o) {
            return Ok(*e);
        }
        let e = estimate(params, ctx, o, engine, mc_cfg)?;
        cache.insert(o, e);
        Ok(e)
    };
    outputs
        .iter()
        .map(|&o| {
            let own = get(o)?;
            let other = get(o.with_scheme(o.scheme.other()))?;
            let (noma, oma) = match o.scheme {
                Scheme::Noma => (own, other),
                Scheme::Oma => (other, own),
            };
            let gain = oma.preferred().unwrap_or(f64::NAN) - noma.preferred().unwrap_or(f64::NAN);
            Ok((o, own, gain))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `<case>/<direction>/<domain>`.
    pub tag: String,
    pub output: OutputSpec,
    pub estimates: Estimates,
    /// P_out(OMA) − P_out(NOMA) for the same user and link.
    pub noma_gain: f64,
}

/// Evaluates every case, value and output of the sweep block.
pub fn run_sweep(cfg: &Config) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let spec = cfg.sweep_spec()?;
    let ctx = cfg.context();
    let values = spec.values();
    let points: Vec<(&SweepCase, f64)> = spec
        .cases
        .iter()
        .flat_map(|c| values.iter().map(move |&v| (c, v)))
        .collect();
    // parallelism lives at the point level; each simulation runs single-threaded
    let mc_cfg = McConfig {
        n_workers: 1,
        ..cfg.monte_carlo
    };
    let eval = |&(case, v): &(&SweepCase, f64)| -> Result<Vec<SweepRow>> {
        let mut params = case.set.apply(&cfg.link);
        spec.variable.apply(&mut params, v);
        let rows = estimate_point(&params, &ctx, &spec.outputs, cfg.engine, &mc_cfg)?;
        Ok(rows
            .into_iter()
            .map(|(o, estimates, noma_gain)| SweepRow {
                value: v,
                tag: format!("{}/{}/{}", case.tag, o.direction.as_str(), o.domain.as_str()),
                output: o,
                estimates,
                noma_gain,
            })
            .collect())
    };
    let pool = worker_pool(cfg.monte_carlo.n_workers)?;
    let chunks: Vec<Result<Vec<SweepRow>>> = pool.install(|| points.par_iter().map(eval).collect());
    let mut rows = Vec::new();
    for c in chunks {
        rows.extend(c?);
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("cannot write output: {e}"))
}

/// Writes sweep rows as CSV with header
/// `<variable>,tag,user,scheme,analytic_p,mc_p,mc_se,noma_gain`.
pub fn write_sweep_csv<W: Write>(out: W, variable: SweepVariable, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        variable.column(),
        "tag",
        "user",
        "scheme",
        "analytic_p",
        "mc_p",
        "mc_se",
        "noma_gain",
    ])
    .map_err(io_err)?;
    for r in rows {
        let gain = if r.noma_gain.is_nan() {
            String::new()
        } else {
            r.noma_gain.to_string()
        };
        w.write_record([
            r.value.to_string(),
            r.tag.clone(),
            r.output.user.as_str().to_string(),
            r.output.scheme.as_str().to_string(),
            opt(r.estimates.analytic),
            opt(r.estimates.monte_carlo.map(|m| m.0)),
            opt(r.estimates.monte_carlo.map(|m| m.1)),
            gain,
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateRow {
    pub alpha1: f64,
    pub alpha2: f64,
    pub analytic: f64,
    pub truncation_bound: f64,
    pub mc: f64,
    pub mc_se: f64,
    /// max(abs_tolerance, se_multiplier · SE).
    pub allowed: f64,
}

impl ValidateRow {
    pub fn abs_diff(&self) -> f64 {
        (self.analytic - self.mc).abs()
    }

    pub fn pass(&self) -> bool {
        self.abs_diff() <= self.allowed
    }
}

/// Analytic and simulated near-user uplink outage over the validation grid.
pub fn run_validate(cfg: &Config) -> Result<Vec<ValidateRow>> {
    cfg.validate()?;
    let spec = cfg.validate_spec()?;
    let grid: Vec<(f64, f64)> = spec
        .alpha1
        .iter()
        .flat_map(|&a1| spec.alpha2.iter().map(move |&a2| (a1, a2)))
        .collect();
    let mc_cfg = McConfig {
        n_workers: 1,
        ..cfg.monte_carlo
    };
    let eval = |&(alpha1, alpha2): &(f64, f64)| -> Result<ValidateRow> {
        let scn = spec.scenario(alpha1, alpha2);
        let exact = outage::ul_noma_outage_near(&scn, cfg.series)?;
        let sim = mc::simulate_outage(&scn, User::Near, &mc_cfg)?;
        Ok(ValidateRow {
            alpha1,
            alpha2,
            analytic: exact.probability,
            truncation_bound: exact.truncation_bound,
            mc: sim.probability(),
            mc_se: sim.std_error,
            allowed: spec.abs_tolerance.max(spec.se_multiplier * sim.std_error),
        })
    };
    let pool = worker_pool(cfg.monte_carlo.n_workers)?;
    pool.install(|| grid.par_iter().map(eval).collect())
}

pub fn write_validate_csv<W: Write>(out: W, rows: &[ValidateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "alpha1",
        "alpha2",
        "analytic_p",
        "truncation_bound",
        "mc_p",
        "mc_se",
        "abs_diff",
        "allowed",
        "pass",
    ])
    .map_err(io_err)?;
    for r in rows {
        w.write_record([
            r.alpha1.to_string(),
            r.alpha2.to_string(),
            r.analytic.to_string(),
            r.truncation_bound.to_string(),
            r.mc.to_string(),
            r.mc_se.to_string(),
            r.abs_diff().to_string(),
            r.allowed.to_string(),
            r.pass().to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainRow {
    pub direction: Direction,
    pub domain: LinkDomain,
    pub user: User,
    pub noma: Estimates,
    pub oma: Estimates,
}

impl GainRow {
    pub fn analytic_gain(&self) -> Option<f64> {
        Some(self.oma.analytic? - self.noma.analytic?)
    }

    pub fn mc_gain(&self) -> Option<f64> {
        Some(self.oma.monte_carlo?.0 - self.noma.monte_carlo?.0)
    }
}

/// NOMA and OMA outage of every user, direction and domain at the base link.
pub fn run_gain(cfg: &Config) -> Result<Vec<GainRow>> {
    cfg.validate()?;
    let ctx = cfg.context();
    let mut rows = Vec::new();
    for direction in [Direction::Downlink, Direction::Uplink] {
        for domain in [LinkDomain::Terrestrial, LinkDomain::Aerial] {
            for user in [User::Near, User::Far] {
                let out = |scheme| OutputSpec {
                    scheme,
                    direction,
                    domain,
                    user,
                };
                rows.push(GainRow {
                    direction,
                    domain,
                    user,
                    noma: estimate(&cfg.link, &ctx, out(Scheme::Noma), cfg.engine, &cfg.monte_carlo)?,
                    oma: estimate(&cfg.link, &ctx, out(Scheme::Oma), cfg.engine, &cfg.monte_carlo)?,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_gain_csv<W: Write>(out: W, rows: &[GainRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "direction",
        "domain",
        "user",
        "analytic_noma_p",
        "analytic_oma_p",
        "analytic_gain",
        "mc_noma_p",
        "mc_oma_p",
        "mc_gain",
    ])
    .map_err(io_err)?;
    for r in rows {
        w.write_record([
            r.direction.as_str().to_string(),
            r.domain.as_str().to_string(),
            r.user.as_str().to_string(),
            opt(r.noma.analytic),
            opt(r.oma.analytic),
            opt(r.analytic_gain()),
            opt(r.noma.monte_carlo.map(|m| m.0)),
            opt(r.oma.monte_carlo.map(|m| m.0)),
            opt(r.mc_gain()),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep_config(steps: usize, start: f64, stop: f64) -> Config {
        Config {
            sweep: Some(SweepSpec {
                variable: SweepVariable::TargetRateBpsPerHz,
                start,
                stop,
                steps,
                cases: default_cases(),
                outputs: vec![OutputSpec {
                    scheme: Scheme::Noma,
                    direction: Direction::Downlink,
                    domain: LinkDomain::Terrestrial,
                    user: User::Far,
                }],
            }),
            ..Config::default()
        }
    }

    #[test]
    fn values_hit_both_ends() {
        let s = sweep_config(5, 0.5, 2.5).sweep.unwrap();
        assert_eq!(s.values(), vec![0.5, 1.0, 1.5, 2.0, 2.5]);
    }

    #[test]
    fn degenerate_range_repeats_point() {
        let rows = run_sweep(&sweep_config(2, 1.0, 1.0)).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], rows[1]);
    }

    #[test]
    fn single_step_rejected() {
        assert!(matches!(run_sweep(&sweep_config(1, 1.0, 2.0)), Err(Error::Config(_))));
    }

    #[test]
    fn defaults_round_trip() {
        let cfg = sweep_config(3, 0.0, 1.0);
        let back = Config::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = Config::from_json(r#"{"link": {"altitude": 100}}"#).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn empty_config_is_default() {
        assert_eq!(Config::from_json("{}").unwrap(), Config::default());
    }

    #[test]
    fn validate_scenario_reproduces_grid() {
        let spec = ValidateSpec {
            alpha1: vec![0.5],
            alpha2: vec![0.25],
            near_fading: FadingSpec::Rician {
                k_factor: 10.0,
                omega: 1.0,
            },
            far_fading: FadingSpec::Rician {
                k_factor: 10.0,
                omega: 1.0,
            },
            target_rate_bps_per_hz: 1.0,
            abs_tolerance: 5e-3,
            se_multiplier: 4.0,
        };
        let scn = spec.scenario(0.5, 0.25);
        let Power::Uplink { near, far } = scn.power else {
            unreachable!()
        };
        let (a1, a2) = outage::uplink_coefficients(1.0, 1.0, near, far, 1.0);
        assert!((a1 - 0.5).abs() < 1e-15 && (a2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let cfg = Config {
            engine: Engine::Analytic,
            ..sweep_config(2, 1.0, 2.0)
        };
        let rows = run_sweep(&cfg).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, SweepVariable::TargetRateBpsPerHz, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "target_rate_bps_per_hz,tag,user,scheme,analytic_p,mc_p,mc_se,noma_gain"
        );
        assert!(lines[1].starts_with("1,base/downlink/terrestrial,far,noma,"));
        assert!(lines[1].contains(",,,"));
        assert_eq!(lines.len(), 3);
    }
}
