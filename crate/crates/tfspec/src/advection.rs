//! Petrov-Galerkin spectral scheme for the tempered fractional advection
//! problem `D^{a1,λ}u + d·D^{a2,λ}u = f` with `0 ≤ a2 < a1 < 1`.
//!
//! Trial functions are tempered fractional integrals of Legendre
//! polynomials, test functions their right-sided mirrors. In these bases the
//! highest-order term is the diagonal Legendre mass matrix and the lower
//! term is a Jacobi-weighted coupling matrix, so the discrete system is
//! `(A1 + d·A2) u = f`.

use crate::error::{Error, Result};
use crate::fracops::{rl_integral_jacobi, FunctionSpec, Side, WeightedJacobiTerm};
use crate::linalg::{lu_solve, DenseMatrix};
use crate::quadrature::gauss_jacobi;
use crate::specfun::{gamma_ratio, jacobi_table, JacobiParams};

/// Which of the two boundary-value regimes a problem belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `0 ≤ a2 < a1 < 1`; no boundary datum.
    Advection,
    /// `1 < a2 < a1 < 2`; right-endpoint datum `ub`.
    Diffusion,
}

/// A tempered fractional two-point boundary problem on [-1, 1].
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub alpha1: f64,
    pub alpha2: f64,
    pub d: f64,
    pub lambda: f64,
    pub rhs: FunctionSpec,
    /// Boundary datum; used only by the diffusion regime.
    pub ub: f64,
    pub regime: Regime,
}

impl ProblemSpec {
    pub fn advection(
        alpha1: f64,
        alpha2: f64,
        d: f64,
        lambda: f64,
        rhs: FunctionSpec,
    ) -> Result<Self> {
        if !(0.0 <= alpha2 && alpha2 < alpha1 && alpha1 < 1.0) {
            return Err(Error::domain(format!(
                "advection regime needs 0 <= a2 < a1 < 1, got a1 = {alpha1}, a2 = {alpha2}"
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::domain(format!(
                "tempering parameter must be positive, got {lambda}"
            )));
        }
        let s = 0.5 * (alpha1 - alpha2);
        let bound = -gamma_ratio(s + 1.0, 1.0).powi(2) / 2f64.powf(alpha1 - alpha2);
        if d <= bound {
            // the solvability theory wants d above this bound, but in
            // practice far larger |d| still solves cleanly
            log::warn!("d = {d} is below the theoretical bound {bound:.4}; proceeding anyway");
        }
        Ok(ProblemSpec { alpha1, alpha2, d, lambda, rhs, ub: 0.0, regime: Regime::Advection })
    }

    pub fn diffusion(
        alpha1: f64,
        alpha2: f64,
        d: f64,
        lambda: f64,
        rhs: FunctionSpec,
        ub: f64,
    ) -> Result<Self> {
        if !(1.0 < alpha2 && alpha2 < alpha1 && alpha1 < 2.0) {
            return Err(Error::domain(format!(
                "diffusion regime needs 1 < a2 < a1 < 2, got a1 = {alpha1}, a2 = {alpha2}"
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::domain(format!(
                "tempering parameter must be positive, got {lambda}"
            )));
        }
        let s = 0.5 * (alpha1 - alpha2);
        let bound = gamma_ratio(s + 1.0, 1.0).powi(2) / 2f64.powf(alpha1 - alpha2 + 1.0);
        if d.abs() >= bound {
            log::warn!(
                "|d| = {} exceeds the theoretical bound {bound:.4}; proceeding anyway",
                d.abs()
            );
        }
        Ok(ProblemSpec { alpha1, alpha2, d, lambda, rhs, ub, regime: Regime::Diffusion })
    }
}

/// Coefficients of a solve in the generalized-Jacobi trial basis, plus the
/// metadata needed to evaluate it.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    pub coeffs: Vec<f64>,
    pub alpha1: f64,
    pub lambda: f64,
    pub regime: Regime,
}

impl SpectralSolution {
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// Pointwise evaluation, dispatching on the regime's trial basis.
    pub fn eval(&self, xs: &[f64]) -> Vec<f64> {
        match self.regime {
            Regime::Advection => evaluate_advection(self, xs),
            Regime::Diffusion => crate::diffusion::evaluate_diffusion(self, xs),
        }
    }

    /// The solution as a declared-singularity function: the trial basis
    /// fixes the endpoint exponent `(1+x)^q`, the rest is analytic.
    pub fn as_function_spec(&self) -> FunctionSpec {
        let q = match self.regime {
            Regime::Advection => 0.5 * self.alpha1,
            Regime::Diffusion => 0.5 * (1.0 + self.alpha1),
        };
        let sol = self.clone();
        FunctionSpec::power_weighted(q, 0.0, move |x| sol.eval(&[x])[0] * (1.0 + x).powf(-q))
            .expect("trial-basis exponent is integrable")
    }
}

/// Trial basis pre-image: `I^{a1/2} L_n` as a weighted Jacobi term. The
/// full trial function is `e^{-λx}` times this term.
pub fn advection_trial_term(n: usize, alpha1: f64) -> WeightedJacobiTerm {
    rl_integral_jacobi(&WeightedJacobiTerm::legendre(n, Side::Left), 0.5 * alpha1)
        .expect("Legendre terms always match the integral pattern")
}

/// Test basis pre-image: right-sided `I^{a1/2} L_n`; the full test function
/// carries `e^{+λx}`.
pub fn advection_test_term(n: usize, alpha1: f64) -> WeightedJacobiTerm {
    rl_integral_jacobi(&WeightedJacobiTerm::legendre(n, Side::Right), 0.5 * alpha1)
        .expect("Legendre terms always match the integral pattern")
}

/// Diagonal Legendre mass matrix, entry (n, n) = 2/(2n+1).
pub fn assemble_a1(n: usize) -> DenseMatrix {
    let mut a = DenseMatrix::zeros(n, n);
    for k in 0..n {
        a.set(k, k, 2.0 / (2.0 * k as f64 + 1.0));
    }
    a
}

/// Lower-order coupling matrix: entry (k, n) is the Jacobi-weighted inner
/// product of the order-(a2/2) derivatives of trial n and test k, carrying
/// the weight `(1-x^2)^{(a1-a2)/2}`.
pub fn assemble_a2(n: usize, alpha1: f64, alpha2: f64) -> Result<DenseMatrix> {
    if !(0.0 <= alpha2 && alpha2 < alpha1 && alpha1 < 1.0) {
        return Err(Error::domain(format!(
            "assemble_a2 needs 0 <= a2 < a1 < 1, got a1 = {alpha1}, a2 = {alpha2}"
        )));
    }
    let s = 0.5 * (alpha1 - alpha2);
    let rule = gauss_jacobi(n + 32, s, s)?;
    let xs = rule.nodes();
    let trial = jacobi_table(n - 1, JacobiParams::new(-s, s), xs);
    let test = jacobi_table(n - 1, JacobiParams::new(s, -s), xs);
    let ratios: Vec<f64> =
        (0..n).map(|m| gamma_ratio(m as f64 + 1.0, m as f64 + 1.0 + s)).collect();
    let mut a2 = DenseMatrix::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for (i, &w) in rule.weights().iter().enumerate() {
                acc += w * test[k][i] * trial[j][i];
            }
            a2.set(k, j, ratios[k] * ratios[j] * acc);
        }
    }
    Ok(a2)
}

/// Load vector f_k = ∫ f(x) ψ_k(x) dx against the test functions. The test
/// weight `(1-x)^{a1/2}` and the right-hand side's declared singularities
/// are absorbed into the quadrature.
pub fn assemble_advection_rhs(p: &ProblemSpec, n: usize) -> Result<Vec<f64>> {
    assemble_rhs_against_tests(&p.rhs, p.lambda, 0.5 * p.alpha1, n, n + 64)
}

pub(crate) fn assemble_rhs_against_tests(
    rhs: &FunctionSpec,
    lambda: f64,
    test_order: f64,
    n: usize,
    npts: usize,
) -> Result<Vec<f64>> {
    let samples = rhs.weighted_samples(npts, 0.0, test_order)?;
    let xs: Vec<f64> = samples.iter().map(|&(x, _)| x).collect();
    let table = jacobi_table(n - 1, JacobiParams::new(test_order, -test_order), &xs);
    let mut f = vec![0.0; n];
    for (k, fk) in f.iter_mut().enumerate() {
        let ratio = gamma_ratio(k as f64 + 1.0, k as f64 + 1.0 + test_order);
        let mut acc = 0.0;
        for (i, &(x, w)) in samples.iter().enumerate() {
            acc += w * (lambda * x).exp() * table[k][i];
        }
        *fk = ratio * acc;
    }
    Ok(f)
}

/// Assemble and solve `(A1 + d·A2) u = f` for the advection regime.
pub fn solve_advection(p: &ProblemSpec, n: usize) -> Result<SpectralSolution> {
    if p.regime != Regime::Advection {
        return Err(Error::domain(
            "solve_advection needs an advection-regime problem".to_string(),
        ));
    }
    if n == 0 {
        return Err(Error::domain("truncation must be at least 1".to_string()));
    }
    let f = assemble_advection_rhs(p, n)?;
    let coeffs = if p.d == 0.0 {
        // A is just the diagonal Legendre mass matrix
        f.iter().enumerate().map(|(k, &fk)| (2.0 * k as f64 + 1.0) / 2.0 * fk).collect()
    } else {
        let a = assemble_a1(n).add_scaled(&assemble_a2(n, p.alpha1, p.alpha2)?, p.d);
        let u = lu_solve(&a, &f, "advection solve")?;
        check_residual(&a, &u, &f)?;
        u
    };
    Ok(SpectralSolution { coeffs, alpha1: p.alpha1, lambda: p.lambda, regime: Regime::Advection })
}

pub(crate) fn check_residual(a: &DenseMatrix, u: &[f64], f: &[f64]) -> Result<()> {
    let f_norm = f.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let res = a
        .matvec(u)
        .iter()
        .zip(f)
        .map(|(&au, &fv)| (au - fv).abs())
        .fold(0.0f64, f64::max);
    if res > 1e-10 * f_norm.max(f64::MIN_POSITIVE) {
        return Err(Error::domain(format!(
            "solve residual {res:.3e} exceeds 1e-10·|f| = {:.3e}",
            1e-10 * f_norm
        )));
    }
    Ok(())
}

/// Evaluate an advection-regime solution at the given points:
/// `u_N(x) = e^{-λx}(1+x)^{a1/2} Σ û_n c_n J_n^{-a1/2, a1/2}(x)`.
pub fn evaluate_advection(sol: &SpectralSolution, xs: &[f64]) -> Vec<f64> {
    let n = sol.coeffs.len();
    let q = 0.5 * sol.alpha1;
    let table = jacobi_table(n - 1, JacobiParams::new(-q, q), xs);
    let ratios: Vec<f64> =
        (0..n).map(|m| gamma_ratio(m as f64 + 1.0, m as f64 + 1.0 + q)).collect();
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let poly: f64 = (0..n).map(|m| sol.coeffs[m] * ratios[m] * table[m][i]).sum();
            (-sol.lambda * x).exp() * (1.0 + x).powf(q) * poly
        })
        .collect()
}
