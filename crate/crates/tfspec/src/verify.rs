//! The acceptance checklist behind `tfspec verify` and the `acceptance`
//! integration test target: twelve numbered criteria, each returning a
//! pass/fail verdict with the measured quantities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::advection::{assemble_a2, advection_trial_term, solve_advection, ProblemSpec};
use crate::diffusion::{diffusion_trial_term, solve_diffusion};
use crate::fracops::{
    rl_derivative_jacobi, rl_integral_jacobi, rl_integral_numeric, singular_inner_product,
    tempered_derivative_on_basis, tempered_integral, FunctionSpec, Side, SingularTerm,
    WeightedJacobiTerm,
};
use crate::harness::{l2_error, run_case, CaseId, ExampleCase};
use crate::quadrature::{gauss_jacobi, jacobi_weight_moments};
use crate::specfun::{jacobi_eval, JacobiParams};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(index: usize, name: &'static str, passed: bool, detail: String) -> Self {
        CriterionResult { index, name, passed, detail }
    }

    /// One line suitable for terminal output.
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<28} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.index,
            self.name,
            self.detail
        )
    }
}

/// Criterion 1: closed-form derivative∘integral is the identity on 200
/// random weighted Jacobi terms, to 1e-12 relative coefficient error.
pub fn criterion_01_round_trip() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(2001);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(0..=24);
        let delta = rng.gen_range(-0.9..3.0);
        let gamma_p = rng.gen_range(-1.4..1.4);
        let alpha = rng.gen_range(1e-3..2.0);
        let coeff = rng.gen_range(-10.0..10.0_f64);
        let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
        let term = match side {
            Side::Left => WeightedJacobiTerm {
                coeff,
                mu: delta,
                nu: 0.0,
                n,
                params: JacobiParams::new(gamma_p, delta),
                side,
            },
            Side::Right => WeightedJacobiTerm {
                coeff,
                mu: 0.0,
                nu: delta,
                n,
                params: JacobiParams::new(delta, gamma_p),
                side,
            },
        };
        let back = rl_derivative_jacobi(&rl_integral_jacobi(&term, alpha).unwrap(), alpha).unwrap();
        worst = worst.max((back.coeff - coeff).abs() / coeff.abs().max(1e-300));
    }
    CriterionResult::new(
        1,
        "operator round-trip",
        worst <= 1e-12,
        format!("max relative coefficient error {worst:.3e} (tol 1e-12)"),
    )
}

/// Criterion 2: closed-form fractional integrals of Legendre polynomials
/// match the numeric convolution oracle at 20 interior points.
pub fn criterion_02_closed_vs_numeric() -> CriterionResult {
    let mut worst = 0.0f64;
    for &alpha in &[0.3, 0.7, 1.4] {
        for n in 0..=10usize {
            let closed = rl_integral_jacobi(&WeightedJacobiTerm::legendre(n, Side::Left), alpha)
                .unwrap();
            let spec = FunctionSpec::smooth(move |x| crate::specfun::legendre_eval(n, x));
            for j in 0..20 {
                let x = -0.95 + 0.1 * j as f64;
                let numeric = rl_integral_numeric(&spec, alpha, Side::Left, x, 256).unwrap();
                let a = closed.eval(x);
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-3);
                worst = worst.max(rel);
            }
        }
    }
    CriterionResult::new(
        2,
        "closed form vs convolution",
        worst <= 1e-8,
        format!("max relative deviation {worst:.3e} (tol 1e-8)"),
    )
}

fn random_poly(rng: &mut ChaCha8Rng) -> FunctionSpec {
    let coeffs: Vec<f64> = (0..=8).map(|_| rng.gen_range(-1.0..1.0)).collect();
    FunctionSpec::smooth(move |x| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c))
}

/// Criterion 3: the tempered integral adjoint identity over the randomized
/// polynomial suite.
pub fn criterion_03_adjoint() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(2003);
    let mut worst = 0.0f64;
    for &alpha in &[0.3, 0.8, 1.5] {
        for &lambda in &[0.0, 1.0] {
            for _ in 0..10 {
                let u = random_poly(&mut rng);
                let v = random_poly(&mut rng);
                let lhs = singular_inner_product(128, alpha, 0.0, |x| {
                    tempered_integral(&u, alpha, lambda, Side::Left, x, 96).unwrap() * v.eval(x)
                })
                .unwrap();
                let rhs = singular_inner_product(128, 0.0, alpha, |x| {
                    u.eval(x) * tempered_integral(&v, alpha, lambda, Side::Right, x, 96).unwrap()
                })
                .unwrap();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    CriterionResult::new(
        3,
        "adjoint identity",
        worst <= 1e-8,
        format!("max |(Iu,v)-(u,Iv)| = {worst:.3e} (tol 1e-8)"),
    )
}

/// Criterion 4: the cross inner product of left/right tempered integrals
/// dominates cos(πα) times the squared norm.
pub fn criterion_04_coercivity() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(2004);
    let mut worst_margin = f64::INFINITY;
    for &alpha in &[0.1, 0.25, 0.45] {
        for &lambda in &[0.0, 1.0] {
            for _ in 0..6 {
                let f = random_poly(&mut rng);
                let cross = singular_inner_product(128, alpha, alpha, |x| {
                    tempered_integral(&f, alpha, lambda, Side::Left, x, 96).unwrap()
                        * tempered_integral(&f, alpha, lambda, Side::Right, x, 96).unwrap()
                })
                .unwrap();
                let left_sq = singular_inner_product(128, 2.0 * alpha, 0.0, |x| {
                    let il = tempered_integral(&f, alpha, lambda, Side::Left, x, 96).unwrap();
                    il * il
                })
                .unwrap();
                worst_margin =
                    worst_margin.min(cross - (std::f64::consts::PI * alpha).cos() * left_sq);
            }
        }
    }
    CriterionResult::new(
        4,
        "coercivity",
        worst_margin >= -1e-8,
        format!("smallest margin over cos(πα)·norm² is {worst_margin:.3e} (≥ -1e-8)"),
    )
}

/// Criterion 5: sign-symmetry of the advection coupling matrix.
pub fn criterion_05_a2_sign_symmetry() -> CriterionResult {
    let mut worst = 0.0f64;
    for &gap in &[0.1, 0.5, 0.9] {
        let alpha1 = 0.95;
        let alpha2 = alpha1 - gap;
        let n = 32;
        let a2 = assemble_a2(n, alpha1, alpha2).unwrap();
        for k in 0..n {
            for j in 0..n {
                let sign = if (k + j) % 2 == 0 { 1.0 } else { -1.0 };
                worst = worst.max((a2.get(k, j) - sign * a2.get(j, k)).abs());
            }
        }
    }
    CriterionResult::new(
        5,
        "A2 sign-symmetry",
        worst <= 1e-12,
        format!("max |(A2)_kn - (-1)^(n+k)(A2)_nk| = {worst:.3e} (tol 1e-12)"),
    )
}

/// Criterion 6: jump-solution advection rates inside [0.40, 0.65].
pub fn criterion_06_jump_rates() -> CriterionResult {
    let case = ExampleCase::new(CaseId::AdvJump);
    let mut detail = String::new();
    let mut passed = true;
    for &alpha1 in &[0.3, 0.6, 0.9] {
        let report =
            run_case(&case, alpha1, 0.0, 0.0, 1.0, &crate::harness::DEFAULT_NS).unwrap();
        let ok = (0.40..=0.65).contains(&report.fitted_rate);
        passed &= ok;
        detail.push_str(&format!("a1={alpha1}: rate {:.3}; ", report.fitted_rate));
    }
    detail.push_str("band [0.40, 0.65]");
    CriterionResult::new(6, "jump-solution L2 rates", passed, detail)
}

/// Criterion 7: three extra orders of smoothness give rate >= 2.7.
pub fn criterion_07_smooth_rates() -> CriterionResult {
    let case = ExampleCase::new(CaseId::AdvH3);
    let mut detail = String::new();
    let mut passed = true;
    for &alpha1 in &[0.3, 0.6, 0.9] {
        let report =
            run_case(&case, alpha1, 0.0, 0.0, 1.0, &crate::harness::DEFAULT_NS).unwrap();
        let ok = report.fitted_rate >= 2.7;
        passed &= ok;
        detail.push_str(&format!("a1={alpha1}: rate {:.3}; ", report.fitted_rate));
    }
    detail.push_str("floor 2.7");
    CriterionResult::new(7, "smooth-solution L2 rates", passed, detail)
}

/// Criterion 8: the d-term case at d = ±500 keeps rate >= 2.7 (m = 3), and
/// the rough case (m = 0, d = 5) lands in the [0.40, 0.65] band.
pub fn criterion_08_dterm_rates() -> CriterionResult {
    let mut detail = String::new();
    let mut passed = true;
    // |d| = 500 sits far outside the solvability bound; the discrete system
    // stays well conditioned up to N = 64 (beyond that, for a1 near 1 and
    // d = -500, it visibly degenerates), so the rate is fitted there
    let ns = [8usize, 16, 32, 64];
    let smooth = ExampleCase::new(CaseId::AdvDterm { m: 3.0, gamma: 0.3 });
    for &d in &[-500.0, 500.0] {
        for &alpha1 in &[0.3, 0.6, 0.9] {
            let report = run_case(&smooth, alpha1, 0.0, d, 1.0, &ns).unwrap();
            let ok = report.fitted_rate >= 2.7;
            passed &= ok;
            detail.push_str(&format!("m=3 d={d} a1={alpha1}: {:.2}; ", report.fitted_rate));
        }
    }
    let rough = ExampleCase::new(CaseId::AdvDterm { m: 0.0, gamma: 0.3 });
    for &alpha1 in &[0.3, 0.6, 0.9] {
        let report =
            run_case(&rough, alpha1, 0.0, 5.0, 1.0, &crate::harness::DEFAULT_NS).unwrap();
        let ok = (0.40..=0.65).contains(&report.fitted_rate);
        passed &= ok;
        detail.push_str(&format!("m=0 d=5 a1={alpha1}: {:.3}; ", report.fitted_rate));
    }
    CriterionResult::new(8, "d-term rates", passed, detail)
}

/// Criterion 9: diffusion rates >= 2.7 for three (a1, a2) pairs, and at
/// a1 = 1.99 the rate varies by at most 0.5 across a2.
pub fn criterion_09_diffusion_rates() -> CriterionResult {
    let case = ExampleCase::new(CaseId::DiffMlPoly);
    // errors reach the f64 floor by N = 256 (the rates exceed 5), so the
    // fit stops at N = 128
    let ns = [8usize, 16, 32, 64, 128];
    let mut detail = String::new();
    let mut passed = true;
    for &(a1, a2) in &[(1.5, 1.1), (1.8, 1.2), (1.99, 1.5)] {
        let report = run_case(&case, a1, a2, -1.0, 1.0, &ns).unwrap();
        let ok = report.fitted_rate >= 2.7;
        passed &= ok;
        detail.push_str(&format!("({a1},{a2}): {:.2}; ", report.fitted_rate));
    }
    let mut rates = Vec::new();
    for &a2 in &[1.1, 1.5, 1.9] {
        let report = run_case(&case, 1.99, a2, -1.0, 1.0, &ns).unwrap();
        rates.push(report.fitted_rate);
    }
    let spread = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - rates.iter().cloned().fold(f64::INFINITY, f64::min);
    passed &= spread <= 0.5;
    detail.push_str(&format!(
        "a1=1.99 rates {:.2}/{:.2}/{:.2}, spread {spread:.3} (≤ 0.5)",
        rates[0], rates[1], rates[2]
    ));
    CriterionResult::new(9, "diffusion rates", passed, detail)
}

/// Criterion 10: super-algebraic decay when the solution lies in the trial
/// space's closure: error(48)/error(24) <= 1e-4.
pub fn criterion_10_superalgebraic() -> CriterionResult {
    let case = ExampleCase::new(CaseId::DiffMlExp);
    let (a1, a2) = (1.5, 1.1);
    let problem = case.problem(a1, a2, 100.0, 1.0).unwrap();
    let exact = case.exact(a1, a2, 100.0, 1.0).unwrap().unwrap();
    let e24 = l2_error(&solve_diffusion(&problem, 24).unwrap(), &exact, 128).unwrap();
    let e48 = l2_error(&solve_diffusion(&problem, 48).unwrap(), &exact, 160).unwrap();
    let ratio = e48 / e24;
    CriterionResult::new(
        10,
        "super-algebraic decay",
        ratio <= 1e-4,
        format!("e(24)={e24:.3e}, e(48)={e48:.3e}, ratio {ratio:.3e} (≤ 1e-4)"),
    )
}

/// Criterion 11: a solution placed exactly in the trial space is recovered
/// to 1e-11 in the coefficients, in both regimes.
pub fn criterion_11_manufactured() -> CriterionResult {
    let mut worst = 0.0f64;

    // advection regime, u = φ_2
    {
        let (alpha1, alpha2, d, lambda) = (0.8, 0.2, 3.0, 1.0);
        let trial = advection_trial_term(2, alpha1);
        let lead = rl_derivative_jacobi(&trial, alpha1).unwrap();
        let low = rl_derivative_jacobi(&trial, alpha2).unwrap();
        let rhs = FunctionSpec::from_terms(vec![
            SingularTerm::new(-1.0, 1.0, lead.mu, 0.0, {
                let (c, p, n) = (lead.coeff, lead.params, lead.n);
                move |x: f64| (-lambda * x).exp() * c * jacobi_eval(n, p, x)
            })
            .unwrap(),
            SingularTerm::new(-1.0, 1.0, low.mu, 0.0, {
                let (c, p, n) = (low.coeff * d, low.params, low.n);
                move |x: f64| (-lambda * x).exp() * c * jacobi_eval(n, p, x)
            })
            .unwrap(),
        ])
        .unwrap();
        let p = ProblemSpec::advection(alpha1, alpha2, d, lambda, rhs).unwrap();
        let sol = solve_advection(&p, 6).unwrap();
        for (k, &c) in sol.coeffs.iter().enumerate() {
            let expected = if k == 2 { 1.0 } else { 0.0 };
            worst = worst.max((c - expected).abs());
        }
    }

    // diffusion regime, u = φ_1
    {
        let (alpha1, alpha2, d, lambda) = (1.5, 1.2, -1.0, 1.0);
        let trial = diffusion_trial_term(1, alpha1);
        let lead = rl_derivative_jacobi(&trial, alpha1).unwrap();
        let low = rl_derivative_jacobi(&trial, alpha2).unwrap();
        let rhs = FunctionSpec::from_terms(vec![
            SingularTerm::new(-1.0, 1.0, lead.mu, 0.0, {
                let (c, p, n) = (lead.coeff, lead.params, lead.n);
                move |x: f64| (-lambda * x).exp() * c * jacobi_eval(n, p, x)
            })
            .unwrap(),
            SingularTerm::new(-1.0, 1.0, low.mu, 0.0, {
                let (c, p, n) = (low.coeff * d, low.params, low.n);
                move |x: f64| (-lambda * x).exp() * c * jacobi_eval(n, p, x)
            })
            .unwrap(),
        ])
        .unwrap();
        let ub = tempered_derivative_on_basis(&trial, alpha1 - 1.0, lambda, &[1.0]).unwrap()[0];
        let p = ProblemSpec::diffusion(alpha1, alpha2, d, lambda, rhs, ub).unwrap();
        let sol = solve_diffusion(&p, 6).unwrap();
        for (k, &c) in sol.coeffs.iter().enumerate() {
            let expected = if k == 1 { 1.0 } else { 0.0 };
            worst = worst.max((c - expected).abs());
        }
    }

    CriterionResult::new(
        11,
        "manufactured consistency",
        worst <= 1e-11,
        format!("max coefficient error {worst:.3e} (tol 1e-11)"),
    )
}

/// Criterion 12: quadrature exactness on monomials of degree <= 2n-1
/// against the closed-form Jacobi moments.
pub fn criterion_12_quadrature_exactness() -> CriterionResult {
    let mut worst = 0.0f64;
    for &n in &[1usize, 2, 3, 5, 8, 13, 21, 33, 48, 64] {
        for &(a, b) in &[(0.0, 0.0), (0.3, -0.4), (-0.5, 1.25), (2.0, 0.5)] {
            let rule = gauss_jacobi(n, a, b).unwrap();
            let moments = jacobi_weight_moments(a, b, 2 * n - 1);
            let scale = moments[0].abs();
            for (j, &m) in moments.iter().enumerate() {
                let q = rule.apply(|x| x.powi(j as i32));
                worst = worst.max((q - m).abs() / (m.abs() + scale));
            }
        }
    }
    CriterionResult::new(
        12,
        "quadrature exactness",
        worst <= 1e-11,
        format!("max scaled moment deviation {worst:.3e} (tol 1e-11)"),
    )
}

/// Run all twelve acceptance criteria in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_01_round_trip(),
        criterion_02_closed_vs_numeric(),
        criterion_03_adjoint(),
        criterion_04_coercivity(),
        criterion_05_a2_sign_symmetry(),
        criterion_06_jump_rates(),
        criterion_07_smooth_rates(),
        criterion_08_dterm_rates(),
        criterion_09_diffusion_rates(),
        criterion_10_superalgebraic(),
        criterion_11_manufactured(),
        criterion_12_quadrature_exactness(),
    ]
}
