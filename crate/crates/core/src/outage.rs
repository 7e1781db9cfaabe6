//! Rate-outage probabilities of a two-user cluster.
//!
//! User 1 is the near user and user 2 the far user throughout. Powers are
//! normalized to the receiver noise power, gains are linear large-scale
//! gains, and the fading laws are unit-free power gains.
//!
//! The uplink near user sees the far user as interference, so its outage is
//! P{y < α₁x + α₂} with y the near and x the far fading gain. For Rician
//! fading both laws are Poisson(K) mixtures of Erlang(k+1, (1+K)/Ω)
//! variables, and each Erlang pair integrates to a finite sum of Tricomi U
//! values. The series below sums those pairs under Poisson weights and
//! reports the Poisson mass it left out.

use serde::{Deserialize, Serialize};

use crate::channel::LinkDomain;
use crate::error::{Error, Result};
use crate::fading::{FadingSpec, Rician};
use crate::quad::{self, Tolerance};
use crate::specfun::SeriesControl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Uplink,
    Downlink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Noma,
    Oma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum User {
    Near,
    Far,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Uplink => "uplink",
            Direction::Downlink => "downlink",
        }
    }
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Noma => "noma",
            Scheme::Oma => "oma",
        }
    }

    pub fn other(&self) -> Scheme {
        match self {
            Scheme::Noma => Scheme::Oma,
            Scheme::Oma => Scheme::Noma,
        }
    }
}

impl User {
    pub fn index(&self) -> usize {
        match self {
            User::Near => 0,
            User::Far => 1,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            User::Near => "near",
            User::Far => "far",
        }
    }
}

/// Transmit powers normalized to the noise power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "snake_case")]
pub enum Power {
    /// Base-station total `P`, with `a₁ = near_share` going to the near user.
    Downlink { total: f64, near_share: f64 },
    /// Per-user transmit powers.
    Uplink { near: f64, far: f64 },
}

impl Power {
    /// Power a user gets on its own orthogonal half of the resource.
    pub fn orthogonal(&self, user: User) -> f64 {
        match (*self, user) {
            (Power::Downlink { total, .. }, _) => total,
            (Power::Uplink { near, .. }, User::Near) => near,
            (Power::Uplink { far, .. }, User::Far) => far,
        }
    }
}

/// One two-user link configuration with its large-scale gains already resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkScenario {
    pub direction: Direction,
    pub domain: LinkDomain,
    pub scheme: Scheme,
    /// Linear large-scale gains `[near, far]`.
    pub gains: [f64; 2],
    pub power: Power,
    /// Target spectral efficiency in bit/s/Hz.
    pub target_rate: f64,
    /// Fading laws `[near, far]`.
    pub fading: [FadingSpec; 2],
}

impl LinkScenario {
    pub fn validate(&self) -> Result<()> {
        for (g, name) in self.gains.iter().zip(["near", "far"]) {
            if !(*g > 0.0 && g.is_finite()) {
                return Err(Error::Contract(format!("{name} gain must be positive, got {g}")));
            }
        }
        if !(self.target_rate >= 0.0 && self.target_rate.is_finite()) {
            return Err(Error::Contract(format!(
                "target rate must be >= 0, got {}",
                self.target_rate
            )));
        }
        match (self.direction, self.power) {
            (Direction::Downlink, Power::Downlink { total, near_share }) => {
                if !(total > 0.0 && total.is_finite()) {
                    return Err(Error::Contract(format!("total power must be positive, got {total}")));
                }
                if self.scheme == Scheme::Noma && !(near_share > 0.0 && near_share < 1.0) {
                    return Err(Error::Contract(format!(
                        "near power share must lie in (0, 1), got {near_share}"
                    )));
                }
            }
            (Direction::Uplink, Power::Uplink { near, far }) => {
                if !(near > 0.0 && near.is_finite() && far > 0.0 && far.is_finite()) {
                    return Err(Error::Contract(format!(
                        "uplink powers must be positive, got near={near}, far={far}"
                    )));
                }
            }
            (d, _) => {
                return Err(Error::Contract(format!(
                    "power description does not match the {} direction",
                    d.as_str()
                )))
            }
        }
        for f in &self.fading {
            f.validate()?;
            let consistent = match self.domain {
                LinkDomain::Terrestrial => f.is_rayleigh(),
                LinkDomain::Aerial => !f.is_rayleigh(),
            };
            if !consistent {
                return Err(Error::Contract(format!(
                    "{} links use {} fading",
                    self.domain.as_str(),
                    if self.domain == LinkDomain::Aerial {
                        "rician"
                    } else {
                        "rayleigh"
                    }
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Series,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageResult {
    pub probability: f64,
    pub method: Method,
    /// Series terms summed (product of both axes), series only.
    pub terms_used: Option<usize>,
    /// Upper bound on the probability mass the series left out.
    pub truncation_bound: f64,
    /// Set when the SINR can never reach the target (downlink far user).
    pub infeasible: bool,
}

impl OutageResult {
    fn closed_form(probability: f64) -> Self {
        OutageResult {
            probability: probability.clamp(0.0, 1.0),
            method: Method::ClosedForm,
            terms_used: None,
            truncation_bound: 0.0,
            infeasible: false,
        }
    }
}

/// SINR threshold 2^{rate/prelog} − 1.
pub fn sinr_threshold(rate: f64, prelog: f64) -> f64 {
    (rate * std::f64::consts::LN_2 / prelog).exp_m1()
}

fn expect(scn: &LinkScenario, direction: Option<Direction>, scheme: Scheme, op: &str) -> Result<()> {
    scn.validate()?;
    if scn.scheme != scheme {
        return Err(Error::Contract(format!("{op} needs a {} scenario", scheme.as_str())));
    }
    if let Some(d) = direction {
        if scn.direction != d {
            return Err(Error::Contract(format!("{op} needs a {} scenario", d.as_str())));
        }
    }
    Ok(())
}

/// OMA outage: each user owns half the resource at full power, hence the 2·R exponent.
pub fn oma_outage(scn: &LinkScenario, user: User) -> Result<OutageResult> {
    expect(scn, None, Scheme::Oma, "oma_outage")?;
    if scn.target_rate == 0.0 {
        return Ok(OutageResult::closed_form(0.0));
    }
    let i = user.index();
    let x = sinr_threshold(scn.target_rate, 0.5) / (scn.power.orthogonal(user) * scn.gains[i]);
    Ok(OutageResult::closed_form(scn.fading[i].cdf(x)?))
}

/// Downlink NOMA outage. The near user decodes after SIC; the far user treats
/// the near user's share as interference, which caps its SINR at a₂/a₁.
pub fn dl_noma_outage(scn: &LinkScenario, user: User) -> Result<OutageResult> {
    expect(scn, Some(Direction::Downlink), Scheme::Noma, "dl_noma_outage")?;
    let Power::Downlink { total, near_share } = scn.power else {
        unreachable!("validated above")
    };
    if scn.target_rate == 0.0 {
        return Ok(OutageResult::closed_form(0.0));
    }
    let g = sinr_threshold(scn.target_rate, 1.0);
    let (a1, a2) = (near_share, 1.0 - near_share);
    match user {
        User::Near => {
            let beta = g / (a1 * total * scn.gains[0]);
            Ok(OutageResult::closed_form(scn.fading[0].cdf(beta)?))
        }
        User::Far => {
            let margin = a2 - g * a1;
            if margin <= 0.0 {
                return Ok(OutageResult {
                    infeasible: true,
                    ..OutageResult::closed_form(1.0)
                });
            }
            let beta = g / (total * scn.gains[1]) / margin;
            Ok(OutageResult::closed_form(scn.fading[1].cdf(beta)?))
        }
    }
}

/// Uplink NOMA outage of the far user, decoded last and interference free.
pub fn ul_noma_outage_far(scn: &LinkScenario) -> Result<OutageResult> {
    expect(scn, Some(Direction::Uplink), Scheme::Noma, "ul_noma_outage_far")?;
    if scn.target_rate == 0.0 {
        return Ok(OutageResult::closed_form(0.0));
    }
    let alpha = sinr_threshold(scn.target_rate, 1.0) / (scn.power.orthogonal(User::Far) * scn.gains[1]);
    Ok(OutageResult::closed_form(scn.fading[1].cdf(alpha)?))
}

/// (α₁, α₂) of the near-user event y < α₁x + α₂.
pub fn uplink_coefficients(g1: f64, g2: f64, p1: f64, p2: f64, r_th: f64) -> (f64, f64) {
    let g = sinr_threshold(r_th, 1.0);
    (g * p2 * g2 / (p1 * g1), g / (p1 * g1))
}

fn check_coefficients(alpha1: f64, alpha2: f64) -> Result<()> {
    if !(alpha1 >= 0.0 && alpha1.is_finite() && alpha2 >= 0.0 && alpha2.is_finite()) {
        return Err(Error::Contract(format!(
            "interference coefficients must be finite and >= 0, got ({alpha1}, {alpha2})"
        )));
    }
    Ok(())
}

/// P{y < α₁x + α₂} for independent exponential y (rate λ₁) and x (rate λ₂).
pub fn near_outage_exponential(alpha1: f64, alpha2: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    check_coefficients(alpha1, alpha2)?;
    if !(lambda1 > 0.0 && lambda2 > 0.0) {
        return Err(Error::Contract("exponential rates must be positive".into()));
    }
    let survive = lambda2 * (-alpha2 * lambda1).exp() / (lambda2 + alpha1 * lambda1);
    Ok((1.0 - survive).clamp(0.0, 1.0))
}

/// Uplink terrestrial near-user outage under exponential fading on both links.
pub fn ul_noma_outage_near_terrestrial(
    g1: f64,
    g2: f64,
    p1: f64,
    p2: f64,
    r_th: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<OutageResult> {
    if r_th == 0.0 {
        return Ok(OutageResult::closed_form(0.0));
    }
    let (alpha1, alpha2) = uplink_coefficients(g1, g2, p1, p2, r_th);
    Ok(OutageResult::closed_form(near_outage_exponential(
        alpha1, alpha2, lambda1, lambda2,
    )?))
}

/// Uplink aerial near-user outage under Rician fading on both links.
#[allow(clippy::too_many_arguments)]
pub fn ul_noma_outage_near_aerial(
    g1: f64,
    g2: f64,
    p1: f64,
    p2: f64,
    r_th: f64,
    near: Rician,
    far: Rician,
    ctl: SeriesControl,
) -> Result<OutageResult> {
    if r_th == 0.0 {
        return Ok(OutageResult::closed_form(0.0));
    }
    let (alpha1, alpha2) = uplink_coefficients(g1, g2, p1, p2, r_th);
    near_outage_rician_series(alpha1, alpha2, near, far, ctl)
}

/// Log Poisson(K) weights covering at least 1 − rel_tol of the mass,
/// plus the mass they cover.
fn poisson_log_weights(k_factor: f64, ctl: &SeriesControl) -> Result<(Vec<f64>, f64)> {
    if k_factor == 0.0 {
        return Ok((vec![0.0], 1.0));
    }
    let ln_k = k_factor.ln();
    let mut weights = Vec::new();
    let mut mass = 0.0;
    let mut lw = -k_factor;
    for j in 0..ctl.max_terms {
        if j > 0 {
            lw += ln_k - (j as f64).ln();
        }
        weights.push(lw);
        mass += lw.exp();
        if mass >= 1.0 - ctl.rel_tol {
            return Ok((weights, mass.min(1.0)));
        }
    }
    Err(Error::Truncation {
        terms: ctl.max_terms,
        bound: (1.0 - mass).max(0.0),
    })
}

/// Σ_{j₁,j₂} w₁(j₁) w₂(j₂) B(j₁, j₂) for the Erlang pair with rates n₁, n₂.
///
/// With c = n₁α₂ and z = (n₂ + n₁α₁)α₂/α₁ the bracket needs
/// S(j₁) = Σ_{i≤j₁} c^i/i! · z^a U(a, a+1+i, z) for a = j₂ + 1. The
/// contiguous relation z U(a,b+1) = (b+z−1) U(a,b) − (b−a−1) U(a,b−1)
/// carried over T_i = c^i/i! · z^a U(a, a+1+i, z) reads
/// T_{i+1} = (c(a+i+z) T_i − c² T_{i−1}) / ((i+1) z), T₀ = 1,
/// so every bracket costs O(1) instead of a fresh polynomial sum.
fn rician_series_sum(alpha1: f64, alpha2: f64, n1: f64, n2: f64, w_near: &[f64], w_far: &[f64]) -> f64 {
    const RESCALE: f64 = 1e200;
    let c = n1 * alpha2;
    let z = (n2 + n1 * alpha1) * alpha2 / alpha1;
    // z^{-a}(n₂α₂/α₁)^a = (n₂/(n₂ + n₁α₁))^a
    let ln_ratio = (n2 / (n2 + n1 * alpha1)).ln();
    let mut total = 0.0;
    for (j2, lw2) in w_far.iter().enumerate() {
        let a = (j2 + 1) as f64;
        // running values carry a common factor e^{-ln_scale}
        let mut ln_scale = -c + a * ln_ratio;
        let (mut t_prev, mut t) = (0.0, 1.0);
        let mut partial = 0.0;
        for (i, lw1) in w_near.iter().enumerate() {
            if i > 0 {
                let k = (i - 1) as f64;
                let next = (c * (a + k + z) * t - c * c * t_prev) / ((k + 1.0) * z);
                t_prev = t;
                t = next;
            }
            partial += t;
            if partial > RESCALE {
                partial /= RESCALE;
                t /= RESCALE;
                t_prev /= RESCALE;
                ln_scale += RESCALE.ln();
            }
            let survive = partial * ln_scale.exp();
            total += (lw1 + lw2).exp() * (1.0 - survive).clamp(0.0, 1.0);
        }
    }
    total
}

/// P{y < α₁x + α₂} with y ~ Rician(near) and x ~ Rician(far) as a double
/// Poisson-weighted series of Erlang pair probabilities.
///
/// For Erlang y (shape j₁+1, rate n₁) and x (shape j₂+1, rate n₂), with
/// z = (n₂ + n₁α₁)α₂/α₁,
///
/// P{y < α₁x + α₂} = 1 − e^{−n₁α₂} (n₂α₂/α₁)^{j₂+1}
///                     Σ_{i≤j₁} (n₁α₂)ⁱ/i! · U(j₂+1, j₂+i+2, z).
pub fn near_outage_rician_series(
    alpha1: f64,
    alpha2: f64,
    near: Rician,
    far: Rician,
    ctl: SeriesControl,
) -> Result<OutageResult> {
    check_coefficients(alpha1, alpha2)?;
    ctl.validate()?;
    FadingSpec::Rician {
        k_factor: near.k_factor,
        omega: near.omega,
    }
    .validate()?;
    FadingSpec::Rician {
        k_factor: far.k_factor,
        omega: far.omega,
    }
    .validate()?;
    if alpha2 == 0.0 && alpha1 == 0.0 {
        return Ok(OutageResult::closed_form(0.0));
    }
    if alpha1 == 0.0 {
        let cdf = FadingSpec::Rician {
            k_factor: near.k_factor,
            omega: near.omega,
        }
        .cdf(alpha2)?;
        return Ok(OutageResult::closed_form(cdf));
    }
    if alpha2 == 0.0 {
        // the Erlang reduction divides by α₂; fall back to the integral
        return near_outage_quadrature(
            alpha1,
            alpha2,
            &FadingSpec::Rician {
                k_factor: near.k_factor,
                omega: near.omega,
            },
            &FadingSpec::Rician {
                k_factor: far.k_factor,
                omega: far.omega,
            },
        );
    }

    let (w_near, mass_near) = poisson_log_weights(near.k_factor, &ctl)?;
    let (w_far, mass_far) = poisson_log_weights(far.k_factor, &ctl)?;
    let n1 = near.rate();
    let n2 = far.rate();
    let total = rician_series_sum(alpha1, alpha2, n1, n2, &w_near, &w_far);
    let bound = (1.0 - mass_near * mass_far).max(0.0);
    Ok(OutageResult {
        probability: total.clamp(0.0, 1.0),
        method: Method::Series,
        terms_used: Some(w_near.len() * w_far.len()),
        truncation_bound: bound,
        infeasible: false,
    })
}

/// P{y < α₁x + α₂} = ∫₀^∞ F_near(α₁x + α₂) f_far(x) dx by adaptive quadrature.
///
/// Works for any pair of fading laws and shares no code with the series.
pub fn near_outage_quadrature(alpha1: f64, alpha2: f64, near: &FadingSpec, far: &FadingSpec) -> Result<OutageResult> {
    check_coefficients(alpha1, alpha2)?;
    near.validate()?;
    far.validate()?;
    let integrand = |x: f64| match (near.cdf(alpha1 * x + alpha2), far.pdf(x)) {
        (Ok(c), Ok(p)) => c * p,
        _ => f64::NAN,
    };
    let tol = Tolerance { abs: 1e-15, rel: 1e-12 };
    let split = far.mean();
    let head = quad::integrate(integrand, 0.0, split, tol)?;
    let tail = quad::integrate_to_infinity(integrand, split, tol)?;
    let value = head.value + tail.value;
    if !value.is_finite() {
        return Err(Error::Quadrature {
            residual: head.abs_error + tail.abs_error,
        });
    }
    Ok(OutageResult {
        probability: value.clamp(0.0, 1.0),
        method: Method::Quadrature,
        terms_used: None,
        truncation_bound: 0.0,
        infeasible: false,
    })
}

/// Uplink NOMA outage of the near user, dispatched on the link domain.
pub fn ul_noma_outage_near(scn: &LinkScenario, ctl: SeriesControl) -> Result<OutageResult> {
    expect(scn, Some(Direction::Uplink), Scheme::Noma, "ul_noma_outage_near")?;
    let Power::Uplink { near, far } = scn.power else {
        unreachable!("validated above")
    };
    let [g1, g2] = scn.gains;
    match (scn.fading[0], scn.fading[1]) {
        (FadingSpec::Rayleigh { lambda: l1 }, FadingSpec::Rayleigh { lambda: l2 }) => {
            ul_noma_outage_near_terrestrial(g1, g2, near, far, scn.target_rate, l1, l2)
        }
        (f1, f2) => ul_noma_outage_near_aerial(g1, g2, near, far, scn.target_rate, f1.as_rician(), f2.as_rician(), ctl),
    }
}

/// Outage of `user` under whatever direction and scheme the scenario names.
pub fn outage(scn: &LinkScenario, user: User, ctl: SeriesControl) -> Result<OutageResult> {
    match (scn.scheme, scn.direction, user) {
        (Scheme::Oma, _, _) => oma_outage(scn, user),
        (Scheme::Noma, Direction::Downlink, _) => dl_noma_outage(scn, user),
        (Scheme::Noma, Direction::Uplink, User::Far) => ul_noma_outage_far(scn),
        (Scheme::Noma, Direction::Uplink, User::Near) => ul_noma_outage_near(scn, ctl),
    }
}

/// OMA outage minus NOMA outage; positive when NOMA does better.
pub fn noma_gain(p_oma: &OutageResult, p_noma: &OutageResult) -> f64 {
    p_oma.probability - p_noma.probability
}
