//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line with the measured quantities (run with `--nocapture` to always see
//! them; failures carry the same line in the panic message).

use tfspec::verify;

fn check(result: verify::CriterionResult) {
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_01_operator_round_trip() {
    check(verify::criterion_01_round_trip());
}

#[test]
fn criterion_02_closed_form_vs_convolution_oracle() {
    check(verify::criterion_02_closed_vs_numeric());
}

#[test]
fn criterion_03_adjoint_identity() {
    check(verify::criterion_03_adjoint());
}

#[test]
fn criterion_04_coercivity() {
    check(verify::criterion_04_coercivity());
}

#[test]
fn criterion_05_a2_sign_symmetry() {
    check(verify::criterion_05_a2_sign_symmetry());
}

#[test]
fn criterion_06_jump_solution_rates() {
    check(verify::criterion_06_jump_rates());
}

#[test]
fn criterion_07_smooth_solution_rates() {
    check(verify::criterion_07_smooth_rates());
}

#[test]
fn criterion_08_dterm_rates() {
    check(verify::criterion_08_dterm_rates());
}

#[test]
fn criterion_09_diffusion_rates() {
    check(verify::criterion_09_diffusion_rates());
}

#[test]
fn criterion_10_superalgebraic_decay() {
    check(verify::criterion_10_superalgebraic());
}

#[test]
fn criterion_11_manufactured_consistency() {
    check(verify::criterion_11_manufactured());
}

#[test]
fn criterion_12_quadrature_exactness() {
    check(verify::criterion_12_quadrature_exactness());
}
