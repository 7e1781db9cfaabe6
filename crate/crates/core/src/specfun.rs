//! Special functions behind the outage expressions: modified Bessel I₀,
//! first-order Marcum Q, Tricomi's confluent hypergeometric U and ln Γ.
//!
//! Everything that multiplies factorials and large powers is assembled in
//! log space; Rice factors around 10 already overflow the direct products.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// Truncation control for the infinite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesControl {
    /// Relative tolerance on the neglected mass of each series axis.
    pub rel_tol: f64,
    /// Hard cap on the number of terms per axis.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-10,
            max_terms: 512,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        let ctl = SeriesControl { rel_tol, max_terms };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Contract(format!(
                "series rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::Contract("series max_terms must be at least 1".into()));
        }
        Ok(())
    }
}

/// Above this argument I₀ switches from its Taylor series to the asymptotic expansion.
const BESSEL_SERIES_LIMIT: f64 = 25.0;

fn check_nonnegative(func: &'static str, name: &str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::domain(func, format!("{name} must be finite, got {x}")));
    }
    if x < 0.0 {
        return Err(Error::domain(func, format!("{name} must be nonnegative, got {x}")));
    }
    Ok(())
}

fn bessel_i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term <= f64::EPSILON * 1e-2 * sum {
            return sum;
        }
        k += 1.0;
    }
}

/// ln of the bracket in I₀(x) ~ eˣ/√(2πx) · Σ ((2k−1)!!)² / (k! 8ᵏ xᵏ).
fn bessel_i0_asymptotic_log_sum(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0) * (2.0 * kf - 1.0) / (8.0 * kf * x);
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term <= f64::EPSILON * 1e-2 * sum {
            break;
        }
    }
    sum.ln()
}

/// Modified Bessel function of the first kind, order zero.
///
/// Overflows to `+inf` beyond x ≈ 713; use [`log_bessel_i0`] there.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check_nonnegative("bessel_i0", "x", x)?;
    if x <= BESSEL_SERIES_LIMIT {
        Ok(bessel_i0_series(x))
    } else {
        Ok(log_bessel_i0(x)?.exp())
    }
}

/// ln I₀(x), finite for every finite x ≥ 0.
pub fn log_bessel_i0(x: f64) -> Result<f64> {
    check_nonnegative("log_bessel_i0", "x", x)?;
    if x <= BESSEL_SERIES_LIMIT {
        Ok(bessel_i0_series(x).ln())
    } else {
        Ok(x - 0.5 * (2.0 * PI * x).ln() + bessel_i0_asymptotic_log_sum(x))
    }
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln(n!) for n = 0..=170, accumulated exactly from ln k.
fn log_factorial_table() -> &'static [f64; 171] {
    static TABLE: OnceLock<[f64; 171]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 171];
        for n in 2..171 {
            t[n] = t[n - 1] + (n as f64).ln();
        }
        t
    })
}

fn lanczos_log_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return lanczos_log_gamma(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// ln Γ(x) for x > 0. Integer arguments up to 171 come from an exact factorial table.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(
            "log_gamma",
            format!("x must be positive and finite, got {x}"),
        ));
    }
    if x.fract() == 0.0 && x <= 171.0 {
        return Ok(log_factorial_table()[x as usize - 1]);
    }
    Ok(lanczos_log_gamma(x))
}

/// ln(n!) without the `Result` wrapper, for internal loops over term indices.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    if n < 171 {
        log_factorial_table()[n]
    } else {
        lanczos_log_gamma(n as f64 + 1.0)
    }
}

/// P(N_inner ≤ N_outer − shift) for independent Poisson counts with the given means.
///
/// Summed over the outer pmf with log-domain weights; every term is
/// nonnegative so small results keep their relative accuracy.
fn poisson_order_prob(outer: f64, inner: f64, shift: usize) -> f64 {
    if outer == 0.0 {
        return if shift == 0 { (-inner).exp() } else { 0.0 };
    }
    let ln_outer = outer.ln();
    let ln_inner = if inner > 0.0 { inner.ln() } else { f64::NEG_INFINITY };
    let hard_cap = (outer + 40.0 * outer.sqrt() + 1000.0) as usize;

    let mut lp_outer = -outer;
    let mut lp_inner = -inner;
    let mut inner_cdf = 0.0;
    let mut sum = 0.0;
    for k in 0..=hard_cap {
        if k > 0 {
            lp_outer += ln_outer - (k as f64).ln();
        }
        // inner_cdf tracks F_inner(k - shift)
        if k >= shift {
            let j = k - shift;
            if inner == 0.0 {
                inner_cdf = 1.0;
            } else {
                if j > 0 {
                    lp_inner += ln_inner - (j as f64).ln();
                }
                inner_cdf = (inner_cdf + lp_inner.exp()).min(1.0);
            }
        }
        sum += lp_outer.exp() * inner_cdf;
        let kf = k as f64;
        if kf > outer + 1.0 {
            // geometric bound on the remaining outer mass
            let next = (lp_outer + ln_outer - (kf + 1.0).ln()).exp();
            let tail = next / (1.0 - outer / (kf + 2.0));
            if tail <= 1e-3 * f64::EPSILON * sum || tail < 1e-300 {
                break;
            }
        }
    }
    sum.min(1.0)
}

/// (Q₁(a, b), 1 − Q₁(a, b)), each computed directly where it is the smaller side.
fn marcum_pair(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        return (1.0, 0.0);
    }
    let mu = 0.5 * a * a;
    let nu = 0.5 * b * b;
    // Q₁(a,b) = P(N_ν ≤ N_μ) with N_μ ~ Poisson(a²/2), N_ν ~ Poisson(b²/2)
    if b > a {
        let q = poisson_order_prob(mu, nu, 0);
        (q, 1.0 - q)
    } else {
        let c = poisson_order_prob(nu, mu, 1);
        (1.0 - c, c)
    }
}

/// First-order Marcum Q function Q₁(a, b) = ∫_b^∞ x e^{−(a²+x²)/2} I₀(ax) dx.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    check_nonnegative("marcum_q1", "a", a)?;
    check_nonnegative("marcum_q1", "b", b)?;
    Ok(marcum_pair(a, b).0)
}

/// 1 − Q₁(a, b), accurate when Q₁ is close to one.
pub fn marcum_q1_complement(a: f64, b: f64) -> Result<f64> {
    check_nonnegative("marcum_q1_complement", "a", a)?;
    check_nonnegative("marcum_q1_complement", "b", b)?;
    Ok(marcum_pair(a, b).1)
}

fn is_integer(x: f64) -> bool {
    x.is_finite() && x.fract() == 0.0
}

/// ln U(a, b, z), the Tricomi confluent hypergeometric function of the second kind,
/// defined through U = Γ(a)⁻¹ ∫₀^∞ e^{−zt} t^{a−1} (1+t)^{b−a−1} dt.
///
/// When a is a positive integer and b − a − 1 a nonnegative integer the binomial
/// expansion of (1+t)^{b−a−1} turns the integral into a finite sum of positive
/// terms, which is the case for every use inside the outage series. Other
/// arguments fall back to adaptive quadrature of the integral.
pub fn log_tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::domain("tricomi_u", "arguments must be finite"));
    }
    if a <= 0.0 {
        return Err(Error::domain("tricomi_u", format!("a must be positive, got {a}")));
    }
    if z <= 0.0 {
        return Err(Error::domain("tricomi_u", format!("z must be positive, got {z}")));
    }
    let m = b - a - 1.0;
    if is_integer(a) && is_integer(m) && m >= 0.0 {
        return Ok(log_tricomi_u_polynomial(a as usize, m as usize, z));
    }
    log_tricomi_u_quadrature(a, m, z)
}

/// Tricomi U(a, b, z); see [`log_tricomi_u`].
pub fn tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    Ok(log_tricomi_u(a, b, z)?.exp())
}

/// ln U(a, a+m+1, z) = −a ln z + ln Σₗ C(m,l) Γ(a+l)/Γ(a) z^{−l}.
pub(crate) fn log_tricomi_u_polynomial(a: usize, m: usize, z: f64) -> f64 {
    let ln_z = z.ln();
    let ln_gamma_a = ln_factorial(a - 1);
    let ln_m_fact = ln_factorial(m);
    // running log-sum-exp over l
    let mut max = f64::NEG_INFINITY;
    let mut acc = 0.0;
    for l in 0..=m {
        let ln_binom = ln_m_fact - ln_factorial(l) - ln_factorial(m - l);
        let t = ln_binom + ln_factorial(a + l - 1) - ln_gamma_a - l as f64 * ln_z;
        if t > max {
            acc = acc * (max - t).exp() + 1.0;
            max = t;
        } else {
            acc += (t - max).exp();
        }
    }
    -(a as f64) * ln_z + max + acc.ln()
}

fn log_tricomi_u_quadrature(a: f64, m: f64, z: f64) -> Result<f64> {
    // With t = s/z: U = z^{-a} Γ(a)^{-1} ∫ e^{-s} s^{a-1} (1+s/z)^m ds.
    // For a < 1 the substitution s = u^{1/a} removes the endpoint singularity.
    let (log_integrand, scale): (Box<dyn Fn(f64) -> f64>, f64) = if a < 1.0 {
        let p = 1.0 / a;
        (
            Box::new(move |u: f64| {
                let s = u.powf(p);
                -s + m * (s / z).ln_1p()
            }),
            -a.ln(),
        )
    } else {
        (
            Box::new(move |s: f64| {
                if s == 0.0 {
                    return if a == 1.0 { 0.0 } else { f64::NEG_INFINITY };
                }
                -s + (a - 1.0) * s.ln() + m * (s / z).ln_1p()
            }),
            0.0,
        )
    };
    // shift by the largest value seen on a coarse geometric grid
    let shift = (-30..=40)
        .map(|j| log_integrand(2f64.powf(j as f64 * 0.25)))
        .fold(f64::NEG_INFINITY, f64::max);
    let f = |s: f64| (log_integrand(s) - shift).exp();
    let split = 1.0 + a + m.abs();
    let tol = Tolerance {
        abs: 1e-300,
        rel: 1e-13,
    };
    let head = quad::integrate(f, 0.0, split, tol)?;
    let tail = quad::integrate_to_infinity(f, split, tol)?;
    let integral = head.value + tail.value;
    if integral.is_nan() || integral <= 0.0 {
        return Err(Error::Quadrature {
            residual: head.abs_error + tail.abs_error,
        });
    }
    Ok(-a * z.ln() - log_gamma(a)? + scale + shift + integral.ln())
}
