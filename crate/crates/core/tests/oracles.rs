//! Sanity checks of the test oracles against textbook values, so a broken
//! oracle cannot silently vouch for a broken implementation.

mod common;

use std::f64::consts::PI;

#[test]
fn tanh_sinh_polynomial_and_endpoint_singularity() {
    let v = common::tanh_sinh(|x| x * x, 0.0, 3.0, 1e-14);
    assert!((v - 9.0).abs() < 1e-13);
    // ∫₀¹ x^{-1/2} dx = 2
    let v = common::tanh_sinh(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-14);
    assert!((v - 2.0).abs() < 1e-12);
}

#[test]
fn semi_infinite_exponential() {
    let v = common::to_infinity(|x| (-x).exp(), 0.0, 1.0, 1e-14);
    assert!((v - 1.0).abs() < 1e-13);
}

#[test]
fn bessel_reference_values() {
    assert!((common::bessel_i0(0.0) - 1.0).abs() < 1e-15);
    assert!((common::bessel_i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-14);
    assert!(common::rel_diff(common::bessel_i0(10.0), 2_815.716_628_466_254).abs() < 1e-13);
}

#[test]
fn gamma_reference_values() {
    assert!(common::rel_diff(common::gamma(0.5), PI.sqrt()) < 1e-12);
    assert!(common::rel_diff(common::gamma(5.0), 24.0) < 1e-12);
    assert!(common::rel_diff(common::gamma(7.5), 1_871.254_305_797_789) < 1e-12);
}

#[test]
fn tricomi_power_law_case() {
    // U(a, a + 1, z) = z^{-a}
    for &(a, z) in &[(0.5, 0.3), (1.0, 2.0), (3.0, 0.7), (6.5, 10.0)] {
        assert!(
            common::rel_diff(common::tricomi_u(a, a + 1.0, z), z.powf(-a)) < 1e-11,
            "{a} {z}"
        );
    }
}

#[test]
fn marcum_zero_offset() {
    for b in [0.2f64, 1.0, 3.0, 6.0] {
        assert!(
            common::rel_diff(common::marcum_q1(0.0, b), (-0.5 * b * b).exp()) < 1e-11,
            "{b}"
        );
    }
}

#[test]
fn exponential_region_reference() {
    // λ₁ = λ₂ = 1, α₂ = 0, α₁ = 1: P{Y < X} = 1/2
    assert!((common::exponential_region(1.0, 0.0, 1.0, 1.0) - 0.5).abs() < 1e-11);
}
