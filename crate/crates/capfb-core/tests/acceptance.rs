//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured quantities. Tolerances live in `capfb_core::verify`.

use capfb_core::verify::{self, CheckResult};

fn assert_pass(criterion: usize, r: CheckResult) {
    println!(
        "[{}] criterion {criterion}: {} - {}",
        if r.pass { "PASS" } else { "FAIL" },
        r.name,
        r.detail
    );
    assert!(r.pass, "criterion {criterion} ({}) failed: {}", r.name, r.detail);
}

#[test]
fn criterion_1_gaussian_unstable_threshold() {
    assert_pass(1, verify::gaussian_unstable_threshold());
}

#[test]
fn criterion_2_gaussian_stable_degeneration() {
    assert_pass(2, verify::gaussian_stable_degeneration());
}

#[test]
fn criterion_3_riccati_cross_check() {
    assert_pass(3, verify::riccati_cross_check());
}

#[test]
fn criterion_4_q1_r1_curve() {
    assert_pass(4, verify::q1_r1_curve());
}

#[test]
fn criterion_5_finite_memoryless_oracle() {
    assert_pass(5, verify::finite_memoryless_oracle());
}

#[test]
fn criterion_6_information_structure_theorem() {
    assert_pass(6, verify::information_structure_theorem());
}

#[test]
fn criterion_7_variational_equality() {
    assert_pass(7, verify::variational_equality_suite());
}

#[test]
fn criterion_8_constrained_duality() {
    assert_pass(8, verify::constrained_duality());
}

#[test]
fn criterion_9_per_unit_time_consistency() {
    assert_pass(9, verify::per_unit_time_consistency());
}
