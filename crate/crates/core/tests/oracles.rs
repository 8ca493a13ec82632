//! The quadrature oracles themselves against textbook values.

mod common;

use common::{ei_oracle, exp_sinh, rel_diff, tanh_sinh, upper_gamma_oracle};

#[test]
fn tanh_sinh_integrates_polynomials_and_endpoint_singularities() {
    assert!(rel_diff(tanh_sinh(|x| x * x, 0.0, 1.0, 1e-15), 1.0 / 3.0) < 1e-14);
    // ∫₀¹ ln x dx = -1, singular at the left endpoint
    assert!(rel_diff(tanh_sinh(f64::ln, 0.0, 1.0, 1e-15), -1.0) < 1e-12);
}

#[test]
fn exp_sinh_integrates_decaying_tails() {
    assert!(rel_diff(exp_sinh(|x| (-x).exp(), 0.0, 1e-15), 1.0) < 1e-14);
    // ∫₀^∞ x e^{-x} dx = 1
    assert!(rel_diff(exp_sinh(|x| x * (-x).exp(), 0.0, 1e-15), 1.0) < 1e-14);
}

#[test]
fn ei_oracle_reference_values() {
    assert!(rel_diff(ei_oracle(1.0), 1.895_117_816_355_936_8) < 1e-14);
    assert!(rel_diff(ei_oracle(-1.0), -0.219_383_934_395_520_27) < 1e-14);
    assert!(rel_diff(ei_oracle(10.0), 2_492.228_976_241_877_8) < 1e-14);
}

#[test]
fn upper_gamma_oracle_reference_values() {
    // Γ(3, 1) = 5/e and Γ(1, x) = e^{-x}
    assert!(rel_diff(upper_gamma_oracle(3, 1.0), 5.0 / std::f64::consts::E) < 1e-14);
    assert!(rel_diff(upper_gamma_oracle(1, 2.5), (-2.5f64).exp()) < 1e-14);
    assert!(rel_diff(upper_gamma_oracle(5, 0.0), 24.0) < 1e-14);
}
