//! Petrov-Galerkin tau scheme for the tempered fractional diffusion problem
//! `D^{a1,λ}u + d·D^{a2,λ}u = f` with `1 < a2 < a1 < 2` and the boundary
//! conditions `D^{a1-1,λ}u(-1) = 0`, `D^{a1-1,λ}u(1) = ub`.
//!
//! Trial functions are `e^{-λx} I^{(a1-1)/2}(L_n + L_{n+1})`; the pairing
//! `L_n + L_{n+1} = (1+x)·J_n^{0,1}` keeps the closed operator identities
//! applicable and makes the left boundary condition automatic. Test
//! functions are right integrals of order `(a1+1)/2` of `L_k`, `k ≤ N-2`;
//! the N-th equation is an explicit boundary row enforcing the datum at
//! x = +1 (kept unscaled by `d`, so the condition holds for every `d`).

use crate::advection::{check_residual, ProblemSpec, Regime, SpectralSolution};
use crate::error::{Error, Result};
use crate::fracops::{rl_integral_jacobi, Side, WeightedJacobiTerm};
use crate::linalg::{lu_solve, DenseMatrix};
use crate::quadrature::gauss_jacobi;
use crate::specfun::{gamma_raw, gamma_ratio, jacobi_table, JacobiParams};

/// Trial basis pre-image `I^{(a1-1)/2}(L_n + L_{n+1}) =
/// I^{(a1-1)/2}[(1+x) J_n^{0,1}]` as a weighted Jacobi term; the full trial
/// function carries `e^{-λx}`.
pub fn diffusion_trial_term(n: usize, alpha1: f64) -> WeightedJacobiTerm {
    let pre = WeightedJacobiTerm {
        coeff: 1.0,
        mu: 1.0,
        nu: 0.0,
        n,
        params: JacobiParams::new(0.0, 1.0),
        side: Side::Left,
    };
    rl_integral_jacobi(&pre, 0.5 * (alpha1 - 1.0))
        .expect("the paired-Legendre term always matches the integral pattern")
}

/// Test basis pre-image: right-sided `I^{(a1+1)/2} L_k`; the full test
/// function carries `e^{+λx}`.
pub fn diffusion_test_term(k: usize, alpha1: f64) -> WeightedJacobiTerm {
    rl_integral_jacobi(&WeightedJacobiTerm::legendre(k, Side::Right), 0.5 * (alpha1 + 1.0))
        .expect("Legendre terms always match the integral pattern")
}

/// Galerkin rows of the leading-order term: (N-1)×N matrix with
/// entry (k, n) = ∫ (L_n + L_{n+1}) L_k dx = γ_k (δ_{k,n} + δ_{k,n+1}).
pub fn assemble_b1(n: usize) -> DenseMatrix {
    assert!(n >= 2, "the tau system needs at least one Galerkin row");
    let mut b = DenseMatrix::zeros(n - 1, n);
    for k in 0..n - 1 {
        let gamma_k = 2.0 / (2.0 * k as f64 + 1.0);
        b.set(k, k, gamma_k);
        if k >= 1 {
            b.set(k, k - 1, gamma_k);
        }
    }
    b
}

/// Galerkin rows of the lower-order term: entry (k, n) pairs the
/// order-((a2-1)/2) derivative of trial n with the order-((a2+1)/2)
/// derivative of test k, carrying the weight
/// `(1-x)^{s}(1+x)^{s+1}`, s = (a1-a2)/2.
pub fn assemble_b2(n: usize, alpha1: f64, alpha2: f64) -> Result<DenseMatrix> {
    if !(1.0 < alpha2 && alpha2 < alpha1 && alpha1 < 2.0) {
        return Err(Error::domain(format!(
            "assemble_b2 needs 1 < a2 < a1 < 2, got a1 = {alpha1}, a2 = {alpha2}"
        )));
    }
    assert!(n >= 2);
    let s = 0.5 * (alpha1 - alpha2);
    let rule = gauss_jacobi(n + 32, s, s + 1.0)?;
    let xs = rule.nodes();
    let trial = jacobi_table(n - 1, JacobiParams::new(-s, s + 1.0), xs);
    let test = jacobi_table(n - 2, JacobiParams::new(s, -s), xs);
    let trial_ratio: Vec<f64> =
        (0..n).map(|m| gamma_ratio(m as f64 + 2.0, m as f64 + 2.0 + s)).collect();
    let test_ratio: Vec<f64> =
        (0..n - 1).map(|m| gamma_ratio(m as f64 + 1.0, m as f64 + 1.0 + s)).collect();
    let mut b2 = DenseMatrix::zeros(n - 1, n);
    for k in 0..n - 1 {
        for j in 0..n {
            let mut acc = 0.0;
            for (i, &w) in rule.weights().iter().enumerate() {
                acc += w * test[k][i] * trial[j][i];
            }
            b2.set(k, j, trial_ratio[j] * test_ratio[k] * acc);
        }
    }
    Ok(b2)
}

/// The tau boundary row: applied to the coefficient vector it yields
/// `2^{(a1-3)/2} e^{λ} ub`, enforcing `D^{a1-1,λ} u_N (1) = ub`. Entry n is
/// `(n+1)Γ(n+1+(a1-1)/2) / (Γ(n+2-(a1-1)/2) Γ((a1+1)/2))`.
pub fn assemble_boundary_row(n: usize, alpha1: f64) -> Vec<f64> {
    let half = 0.5 * (alpha1 - 1.0);
    (0..n)
        .map(|m| {
            let mf = m as f64;
            (mf + 1.0) * gamma_ratio(mf + 1.0 + half, mf + 2.0 - half)
                / gamma_raw(0.5 * (alpha1 + 1.0))
        })
        .collect()
}

/// Load vector: entries 0..N-2 are ∫ f ψ_k dx with the test weight
/// `(1-x)^{(a1+1)/2}` and the declared rhs singularities absorbed; the last
/// entry is the boundary datum `2^{(a1-3)/2} e^{λ} ub`.
pub fn assemble_diffusion_rhs(p: &ProblemSpec, n: usize) -> Result<Vec<f64>> {
    assert!(n >= 2);
    let mut f = crate::advection::assemble_rhs_against_tests(
        &p.rhs,
        p.lambda,
        0.5 * (p.alpha1 + 1.0),
        n - 1,
        n + 64,
    )?;
    f.push(2f64.powf(0.5 * (p.alpha1 - 3.0)) * p.lambda.exp() * p.ub);
    Ok(f)
}

/// Assemble and solve the tau system: N-1 Galerkin rows of `B1 + d·B2`
/// plus the unscaled boundary row.
pub fn solve_diffusion(p: &ProblemSpec, n: usize) -> Result<SpectralSolution> {
    if p.regime != Regime::Diffusion {
        return Err(Error::domain(
            "solve_diffusion needs a diffusion-regime problem".to_string(),
        ));
    }
    if n < 2 {
        return Err(Error::domain("the tau system needs a truncation of at least 2".to_string()));
    }
    let galerkin = assemble_b1(n).add_scaled(&assemble_b2(n, p.alpha1, p.alpha2)?, p.d);
    let boundary = assemble_boundary_row(n, p.alpha1);
    let mut b = DenseMatrix::zeros(n, n);
    for k in 0..n - 1 {
        b.row_mut(k).copy_from_slice(galerkin.row(k));
    }
    b.row_mut(n - 1).copy_from_slice(&boundary);
    let f = assemble_diffusion_rhs(p, n)?;
    let u = lu_solve(&b, &f, "diffusion solve")?;
    check_residual(&b, &u, &f)?;
    Ok(SpectralSolution { coeffs: u, alpha1: p.alpha1, lambda: p.lambda, regime: Regime::Diffusion })
}

/// Evaluate a diffusion-regime solution:
/// `u_N(x) = e^{-λx}(1+x)^{(1+a1)/2} Σ û_n c_n J_n^{(1-a1)/2, (1+a1)/2}(x)`
/// with `c_n = Γ(n+2)/Γ(n+2+(a1-1)/2)`.
pub fn evaluate_diffusion(sol: &SpectralSolution, xs: &[f64]) -> Vec<f64> {
    let n = sol.coeffs.len();
    let half = 0.5 * (sol.alpha1 - 1.0);
    let q = 0.5 * (1.0 + sol.alpha1);
    let table = jacobi_table(n - 1, JacobiParams::new(0.5 * (1.0 - sol.alpha1), q), xs);
    let ratios: Vec<f64> =
        (0..n).map(|m| gamma_ratio(m as f64 + 2.0, m as f64 + 2.0 + half)).collect();
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let poly: f64 = (0..n).map(|m| sol.coeffs[m] * ratios[m] * table[m][i]).sum();
            (-sol.lambda * x).exp() * (1.0 + x).powf(q) * poly
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::{rl_derivative_jacobi, tempered_derivative_on_basis, FunctionSpec, SingularTerm};
    use crate::quadrature::gauss_legendre;
    use crate::specfun::{gamma, jacobi_eval, legendre_eval};
    use approx::assert_relative_eq;

    #[test]
    fn b1_rows_match_orthogonality() {
        let b = assemble_b1(3);
        assert_eq!(b.rows(), 2);
        assert_eq!(b.cols(), 3);
        assert_eq!(b.row(0), &[2.0, 0.0, 0.0]);
        assert_relative_eq!(b.row(1)[0], 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(b.row(1)[1], 2.0 / 3.0, max_relative = 1e-15);
        assert_eq!(b.row(1)[2], 0.0);
    }

    #[test]
    fn b1_matches_numeric_legendre_integrals() {
        let n = 9;
        let b = assemble_b1(n);
        let gl = gauss_legendre(128).unwrap();
        for k in 0..n - 1 {
            for j in 0..n {
                let numeric = gl.apply(|x| {
                    (legendre_eval(j, x) + legendre_eval(j + 1, x)) * legendre_eval(k, x)
                });
                assert!(
                    (b.get(k, j) - numeric).abs() <= 1e-13,
                    "entry ({k},{j}): {} vs {numeric}",
                    b.get(k, j)
                );
            }
        }
    }

    #[test]
    fn b2_top_left_entry_beta_moment() {
        // a1 - a2 = 0.5: entry (0,0) = ratio·∫(1-x)^{1/4}(1+x)^{5/4} dx
        let (alpha1, alpha2) = (1.75, 1.25);
        let s = 0.25;
        let b2 = assemble_b2(4, alpha1, alpha2).unwrap();
        let moment = 2f64.powf(2.0 * s + 2.0) * gamma(s + 1.0).unwrap() * gamma(s + 2.0).unwrap()
            / gamma(2.0 * s + 3.0).unwrap();
        let expected = gamma_ratio(2.0, 2.0 + s) * gamma_ratio(1.0, 1.0 + s) * moment;
        assert_relative_eq!(b2.get(0, 0), expected, max_relative = 1e-12);
    }

    #[test]
    fn b2_off_diagonal_entry_reference() {
        // mpmath, 30 digits: s = 0.2, entry (1, 2); the trial index carries
        // Γ(n+2)/Γ(n+2+s) and the test index Γ(k+1)/Γ(k+1+s)
        let b2 = assemble_b2(4, 1.7, 1.3).unwrap();
        assert_relative_eq!(b2.get(1, 2), -0.15884471585239112, max_relative = 1e-12);
    }

    #[test]
    fn b2_is_insensitive_to_quadrature_size() {
        let (alpha1, alpha2) = (1.9, 1.3);
        let n = 10;
        let coarse = assemble_b2(n, alpha1, alpha2).unwrap();
        // same entries from a rule 64 points larger
        let s = 0.5 * (alpha1 - alpha2);
        let rule = gauss_jacobi(n + 96, s, s + 1.0).unwrap();
        let xs = rule.nodes();
        let trial = jacobi_table(n - 1, JacobiParams::new(-s, s + 1.0), xs);
        let test = jacobi_table(n - 2, JacobiParams::new(s, -s), xs);
        for k in 0..n - 1 {
            for j in 0..n {
                let mut acc = 0.0;
                for (i, &w) in rule.weights().iter().enumerate() {
                    acc += w * test[k][i] * trial[j][i];
                }
                let fine = gamma_ratio(j as f64 + 2.0, j as f64 + 2.0 + s)
                    * gamma_ratio(k as f64 + 1.0, k as f64 + 1.0 + s)
                    * acc;
                assert!(
                    (coarse.get(k, j) - fine).abs() <= 1e-12 * fine.abs().max(1.0),
                    "entry ({k},{j}) moved: {} vs {fine}",
                    coarse.get(k, j)
                );
            }
        }
    }

    #[test]
    fn b2_approaches_b1_as_orders_merge() {
        // s → 0: weight → (1+x), families → J^{0,1} and Legendre, which is
        // exactly the pairing behind B1
        let n = 6;
        let b1 = assemble_b1(n);
        let b2 = assemble_b2(n, 1.5, 1.5 - 1e-10).unwrap();
        for k in 0..n - 1 {
            for j in 0..n {
                assert!((b1.get(k, j) - b2.get(k, j)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn boundary_row_values() {
        let alpha1 = 1.5;
        let half = 0.25;
        let row = assemble_boundary_row(4, alpha1);
        let expected0 = gamma(1.0 + half).unwrap()
            / (gamma(2.0 - half).unwrap() * gamma(0.5 * (alpha1 + 1.0)).unwrap());
        assert_relative_eq!(row[0], expected0, max_relative = 1e-13);
        // a1 → 1: every entry collapses to 1
        let near_one = assemble_boundary_row(6, 1.0 + 1e-12);
        for v in near_one {
            assert_relative_eq!(v, 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn boundary_row_is_the_closed_form_derivative_at_one() {
        // row · û must equal 2^{(a1-3)/2} e^{λ} ub where ub comes from the
        // closed-form tempered derivative of the trial functions at x = 1
        let alpha1 = 1.6;
        let lambda = 1.0;
        let n = 5;
        let row = assemble_boundary_row(n, alpha1);
        let coeffs = [0.0, 0.0, 1.0, 0.0, 0.0]; // u = φ_2
        let trial = diffusion_trial_term(2, alpha1);
        let ub = tempered_derivative_on_basis(&trial, alpha1 - 1.0, lambda, &[1.0]).unwrap()[0];
        let lhs: f64 = row.iter().zip(&coeffs).map(|(&r, &c)| r * c).sum();
        let rhs = 2f64.powf(0.5 * (alpha1 - 3.0)) * lambda.exp() * ub;
        assert_relative_eq!(lhs, rhs, max_relative = 1e-11);
    }

    #[test]
    fn left_boundary_derivative_vanishes() {
        // D^{a1-1,λ} of every trial function is 0 at x = -1: the closed
        // form carries the factor (1+x)^{(3-a1)/2}
        let alpha1 = 1.8;
        for n in 0..4usize {
            let trial = diffusion_trial_term(n, alpha1);
            let d = rl_derivative_jacobi(&trial, alpha1 - 1.0).unwrap();
            assert_relative_eq!(d.mu, 0.5 * (3.0 - alpha1), max_relative = 1e-12);
            let vals = tempered_derivative_on_basis(&trial, alpha1 - 1.0, 1.0, &[-1.0]).unwrap();
            assert_eq!(vals[0], 0.0);
        }
    }

    /// Manufactured diffusion problem with exact solution u = φ_idx.
    pub(crate) fn manufactured_problem(
        idx: usize,
        alpha1: f64,
        alpha2: f64,
        d: f64,
        lambda: f64,
    ) -> ProblemSpec {
        let trial = diffusion_trial_term(idx, alpha1);
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
        let ub =
            tempered_derivative_on_basis(&trial, alpha1 - 1.0, lambda, &[1.0]).unwrap()[0];
        ProblemSpec::diffusion(alpha1, alpha2, d, lambda, rhs, ub).unwrap()
    }

    #[test]
    fn manufactured_basis_function_is_recovered() {
        let p = manufactured_problem(1, 1.5, 1.2, -1.0, 1.0);
        let sol = solve_diffusion(&p, 6).unwrap();
        for (k, &c) in sol.coeffs.iter().enumerate() {
            let expected = if k == 1 { 1.0 } else { 0.0 };
            assert!((c - expected).abs() <= 1e-11, "coefficient {k} = {c}, expected {expected}");
        }
    }

    #[test]
    fn manufactured_recovery_with_large_d() {
        let p = manufactured_problem(2, 1.9, 1.15, 100.0, 1.0);
        let sol = solve_diffusion(&p, 7).unwrap();
        for (k, &c) in sol.coeffs.iter().enumerate() {
            let expected = if k == 2 { 1.0 } else { 0.0 };
            assert!((c - expected).abs() <= 1e-10, "coefficient {k} = {c}, expected {expected}");
        }
    }

    #[test]
    fn tau_rows_satisfy_variational_identity() {
        // B2(u_N, ψ_k) = <f, ψ_k> for k ≤ N-2, recomputed through closed
        // forms and singularity-aware quadrature
        let (alpha1, alpha2, d, lambda) = (1.7, 1.3, -1.0, 1.0);
        let p = manufactured_problem(1, alpha1, alpha2, d, lambda);
        let n = 8;
        let sol = solve_diffusion(&p, n).unwrap();
        let s = 0.5 * (alpha1 - alpha2);
        let fresh_rhs = crate::advection::assemble_rhs_against_tests(
            &p.rhs,
            lambda,
            0.5 * (alpha1 + 1.0),
            n - 1,
            n + 96,
        )
        .unwrap();
        let gl = gauss_legendre(n + 32).unwrap();
        for k in 0..n - 1 {
            let lead: f64 = gl.apply(|x| {
                let du: f64 = (0..n)
                    .map(|m| sol.coeffs[m] * (legendre_eval(m, x) + legendre_eval(m + 1, x)))
                    .sum();
                du * legendre_eval(k, x)
            });
            let low = crate::fracops::singular_inner_product(n + 48, s + 1.0, s, |x| {
                let du: f64 = (0..n)
                    .map(|m| {
                        let t = rl_derivative_jacobi(
                            &diffusion_trial_term(m, alpha1),
                            0.5 * (alpha2 - 1.0),
                        )
                        .unwrap();
                        sol.coeffs[m] * t.eval(x)
                    })
                    .sum();
                let tv = rl_derivative_jacobi(
                    &diffusion_test_term(k, alpha1),
                    0.5 * (alpha2 + 1.0),
                )
                .unwrap()
                .eval(x);
                du * tv
            })
            .unwrap();
            let b2 = lead + d * low;
            assert!(
                (b2 - fresh_rhs[k]).abs() <= 1e-8,
                "tau residual at k={k}: {b2} vs {}",
                fresh_rhs[k]
            );
        }
    }

    #[test]
    fn boundary_datum_is_enforced() {
        let (alpha1, alpha2, d, lambda) = (1.5, 1.1, -1.0, 1.0);
        let p = manufactured_problem(3, alpha1, alpha2, d, lambda);
        let n = 9;
        let sol = solve_diffusion(&p, n).unwrap();
        // evaluate D^{a1-1}(e^{λx} u_N) at x = 1 through the closed forms
        let mut at_one = 0.0;
        for m in 0..n {
            let t = rl_derivative_jacobi(&diffusion_trial_term(m, alpha1), alpha1 - 1.0).unwrap();
            at_one += sol.coeffs[m] * t.eval(1.0);
        }
        assert_relative_eq!(at_one, lambda.exp() * p.ub, max_relative = 1e-9);
        // and at x = -1 it vanishes identically
        let mut at_minus = 0.0;
        for m in 0..n {
            let t = rl_derivative_jacobi(&diffusion_trial_term(m, alpha1), alpha1 - 1.0).unwrap();
            at_minus += sol.coeffs[m] * t.eval(-1.0);
        }
        assert_eq!(at_minus, 0.0);
    }

    #[test]
    fn last_rhs_entry_is_the_boundary_datum() {
        let rhs = FunctionSpec::smooth(|_| 0.0);
        let p = ProblemSpec::diffusion(1.5, 1.2, -1.0, 1.0, rhs, 2.0).unwrap();
        let f = assemble_diffusion_rhs(&p, 5).unwrap();
        assert!(f[..4].iter().all(|&v| v == 0.0));
        assert_relative_eq!(
            f[4],
            2f64.powf(-0.75) * 1f64.exp() * 2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn evaluation_formula_spot_checks() {
        let sol = SpectralSolution {
            coeffs: vec![1.0],
            alpha1: 1.5,
            lambda: 1.0,
            regime: Regime::Diffusion,
        };
        // û_0 = 1 at x = 0: Γ(2)/Γ(2.25)
        let v = evaluate_diffusion(&sol, &[0.0])[0];
        assert_relative_eq!(v, 1.0 / gamma(2.25).unwrap(), max_relative = 1e-13);
        assert_eq!(evaluate_diffusion(&sol, &[-1.0])[0], 0.0);
        let zero = SpectralSolution {
            coeffs: vec![0.0; 3],
            alpha1: 1.5,
            lambda: 1.0,
            regime: Regime::Diffusion,
        };
        assert!(evaluate_diffusion(&zero, &[0.2]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        let rhs = || FunctionSpec::smooth(|_| 0.0);
        assert!(ProblemSpec::diffusion(0.9, 0.5, 0.0, 1.0, rhs(), 0.0).is_err());
        assert!(ProblemSpec::diffusion(1.5, 1.7, 0.0, 1.0, rhs(), 0.0).is_err());
        assert!(assemble_b2(4, 1.5, 1.6).is_err());
        let p = ProblemSpec::diffusion(1.5, 1.2, 0.0, 1.0, rhs(), 0.0).unwrap();
        assert!(solve_diffusion(&p, 1).is_err());
    }
}
