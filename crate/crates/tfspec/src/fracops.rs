//! Tempered and Riemann-Liouville fractional integrals and derivatives.
//!
//! Two routes are provided and kept strictly independent so each can check
//! the other:
//!
//! - closed forms on weighted Jacobi terms, via the operator identities
//!   `I^a [(1+x)^d J_n^{g,d}] = (Γ(n+d+1)/Γ(n+d+a+1)) (1+x)^{d+a} J_n^{g-a,d+a}`
//!   and their right-sided / differentiated mirrors;
//! - a numeric convolution oracle that absorbs the kernel singularity and
//!   the operand's endpoint singularities into Gauss-Jacobi weights.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi, QuadratureRule};
use crate::specfun::{gamma_ratio, jacobi_eval, JacobiParams};

/// Which endpoint the fractional operator integrates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Operators anchored at x = -1.
    Left,
    /// Operators anchored at x = +1.
    Right,
}

/// A term `coeff · (1+x)^mu · (1-x)^nu · J_n^{params}(x)`.
///
/// Terms of this shape are closed under fractional integration and
/// differentiation from the side they are anchored to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedJacobiTerm {
    pub coeff: f64,
    pub mu: f64,
    pub nu: f64,
    pub n: usize,
    pub params: JacobiParams,
    pub side: Side,
}

const PATTERN_TOL: f64 = 1e-12;

impl WeightedJacobiTerm {
    /// The Legendre polynomial L_n as a term anchored to `side`.
    pub fn legendre(n: usize, side: Side) -> Self {
        WeightedJacobiTerm {
            coeff: 1.0,
            mu: 0.0,
            nu: 0.0,
            n,
            params: JacobiParams::new(0.0, 0.0),
            side,
        }
    }

    /// Pointwise value of the term.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeff
            * (1.0 + x).powf(self.mu)
            * (1.0 - x).powf(self.nu)
            * jacobi_eval(self.n, self.params, x)
    }

    /// Exponent at the endpoint the operator is anchored to.
    fn active_exponent(&self) -> f64 {
        match self.side {
            Side::Left => self.mu,
            Side::Right => self.nu,
        }
    }

    fn passive_exponent(&self) -> f64 {
        match self.side {
            Side::Left => self.nu,
            Side::Right => self.mu,
        }
    }
}

impl fmt::Display for WeightedJacobiTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}·(1+x)^{}·(1-x)^{}·J_{}^({},{})",
            self.coeff, self.mu, self.nu, self.n, self.params.a, self.params.b
        )
    }
}

fn check_pattern(t: &WeightedJacobiTerm, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::domain(format!("fractional order must be >= 0, got {alpha}")));
    }
    if t.passive_exponent().abs() > PATTERN_TOL {
        return Err(Error::PatternMismatch(format!(
            "term {t} carries a weight at the opposite endpoint"
        )));
    }
    let exponent = t.active_exponent();
    let matching = match t.side {
        Side::Left => t.params.b,
        Side::Right => t.params.a,
    };
    if (exponent - matching).abs() > PATTERN_TOL {
        return Err(Error::PatternMismatch(format!(
            "term {t}: endpoint exponent {exponent} does not match the Jacobi parameter {matching}"
        )));
    }
    Ok(exponent)
}

/// Riemann-Liouville fractional integral of order `alpha` of a weighted
/// Jacobi term, in closed form. `alpha = 0` is the identity.
pub fn rl_integral_jacobi(t: &WeightedJacobiTerm, alpha: f64) -> Result<WeightedJacobiTerm> {
    let delta = check_pattern(t, alpha)?;
    if !(delta > -1.0) {
        return Err(Error::PatternMismatch(format!(
            "term {t}: endpoint exponent {delta} must exceed -1"
        )));
    }
    if alpha == 0.0 {
        return Ok(*t);
    }
    let nf = t.n as f64;
    let ratio = gamma_ratio(nf + delta + 1.0, nf + delta + alpha + 1.0);
    let mut out = *t;
    out.coeff = t.coeff * ratio;
    match t.side {
        Side::Left => {
            out.mu = delta + alpha;
            out.params = JacobiParams::new(t.params.a - alpha, delta + alpha);
        }
        Side::Right => {
            out.nu = delta + alpha;
            out.params = JacobiParams::new(delta + alpha, t.params.b - alpha);
        }
    }
    Ok(out)
}

/// Riemann-Liouville fractional derivative of order `alpha` of a weighted
/// Jacobi term, in closed form; exact inverse of [`rl_integral_jacobi`].
pub fn rl_derivative_jacobi(t: &WeightedJacobiTerm, alpha: f64) -> Result<WeightedJacobiTerm> {
    let exponent = check_pattern(t, alpha)?;
    if alpha == 0.0 {
        return Ok(*t);
    }
    let delta = exponent - alpha;
    if !(delta > -1.0) {
        return Err(Error::PatternMismatch(format!(
            "term {t}: derivative of order {alpha} leaves exponent {delta} <= -1"
        )));
    }
    let nf = t.n as f64;
    let ratio = gamma_ratio(nf + delta + alpha + 1.0, nf + delta + 1.0);
    let mut out = *t;
    out.coeff = t.coeff * ratio;
    match t.side {
        Side::Left => {
            out.mu = delta;
            out.params = JacobiParams::new(t.params.a + alpha, delta);
        }
        Side::Right => {
            out.nu = delta;
            out.params = JacobiParams::new(delta, t.params.b + alpha);
        }
    }
    Ok(out)
}

/// Pointwise values of the tempered fractional derivative of the basis
/// function `e^{∓λx}·term(x)` (left-anchored bases carry `e^{-λx}`),
/// computed entirely through the closed-form Jacobi identity.
pub fn tempered_derivative_on_basis(
    term: &WeightedJacobiTerm,
    alpha: f64,
    lambda: f64,
    xs: &[f64],
) -> Result<Vec<f64>> {
    let d = rl_derivative_jacobi(term, alpha)?;
    let sign = match term.side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    Ok(xs.iter().map(|&x| (sign * lambda * x).exp() * d.eval(x)).collect())
}

/// One power-law piece of a [`FunctionSpec`]:
/// `smooth(x) · (x - lo)^{exp_lo} · (hi - x)^{exp_hi}` on `[lo, hi]`,
/// zero elsewhere.
#[derive(Clone)]
pub struct SingularTerm {
    lo: f64,
    hi: f64,
    exp_lo: f64,
    exp_hi: f64,
    smooth: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl SingularTerm {
    pub fn new(
        lo: f64,
        hi: f64,
        exp_lo: f64,
        exp_hi: f64,
        smooth: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(lo >= -1.0 && hi <= 1.0 && lo < hi) {
            return Err(Error::domain(format!(
                "term support [{lo}, {hi}] must be a nonempty subinterval of [-1, 1]"
            )));
        }
        if !(exp_lo > -1.0) {
            return Err(Error::Singularity { exponent: exp_lo, location: lo });
        }
        if !(exp_hi > -1.0) {
            return Err(Error::Singularity { exponent: exp_hi, location: hi });
        }
        Ok(SingularTerm { lo, hi, exp_lo, exp_hi, smooth: Arc::new(smooth) })
    }

    fn eval(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        (self.smooth)(x) * (x - self.lo).powf(self.exp_lo) * (self.hi - x).powf(self.exp_hi)
    }
}

impl fmt::Debug for SingularTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SingularTerm")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("exp_lo", &self.exp_lo)
            .field("exp_hi", &self.exp_hi)
            .finish()
    }
}

/// An evaluable scalar function on (-1, 1) with declared endpoint
/// singularity exponents, stored as a sum of power-law pieces so quadrature
/// can absorb every singular factor exactly.
#[derive(Clone, Debug)]
pub struct FunctionSpec {
    terms: Vec<SingularTerm>,
    left_exponent: f64,
    right_exponent: f64,
}

impl FunctionSpec {
    /// A function smooth on all of [-1, 1].
    pub fn smooth(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        FunctionSpec {
            terms: vec![SingularTerm::new(-1.0, 1.0, 0.0, 0.0, f).unwrap()],
            left_exponent: 0.0,
            right_exponent: 0.0,
        }
    }

    /// `(1+x)^{exp_lo} (1-x)^{exp_hi} · f(x)` with smooth `f`.
    pub fn power_weighted(
        exp_lo: f64,
        exp_hi: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Ok(FunctionSpec {
            terms: vec![SingularTerm::new(-1.0, 1.0, exp_lo, exp_hi, f)?],
            left_exponent: exp_lo,
            right_exponent: exp_hi,
        })
    }

    /// Sum of power-law pieces. The declared endpoint exponents are the
    /// most singular exponents among pieces touching each endpoint.
    pub fn from_terms(terms: Vec<SingularTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("a FunctionSpec needs at least one term".to_string()));
        }
        let left = terms
            .iter()
            .filter(|t| t.lo == -1.0)
            .map(|t| t.exp_lo)
            .fold(f64::INFINITY, f64::min);
        let right = terms
            .iter()
            .filter(|t| t.hi == 1.0)
            .map(|t| t.exp_hi)
            .fold(f64::INFINITY, f64::min);
        Ok(FunctionSpec {
            terms,
            left_exponent: if left.is_finite() { left } else { 0.0 },
            right_exponent: if right.is_finite() { right } else { 0.0 },
        })
    }

    /// σ₋: `eval(x)·(1+x)^{-σ₋}` stays bounded near -1.
    pub fn left_exponent(&self) -> f64 {
        self.left_exponent
    }

    /// σ₊: the analogous exponent at +1.
    pub fn right_exponent(&self) -> f64 {
        self.right_exponent
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// Interior panel edges (term boundaries strictly inside (-1, 1)),
    /// sorted, each with the most singular exponent declared there.
    pub(crate) fn interior_breaks(&self) -> Vec<(f64, f64)> {
        let mut breaks: Vec<(f64, f64)> = Vec::new();
        for t in &self.terms {
            for (x, e) in [(t.lo, t.exp_lo), (t.hi, t.exp_hi)] {
                if x > -1.0 && x < 1.0 {
                    match breaks.iter_mut().find(|(bx, _)| (*bx - x).abs() < 1e-14) {
                        Some(entry) => entry.1 = entry.1.min(e),
                        None => breaks.push((x, e)),
                    }
                }
            }
        }
        breaks.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        breaks
    }

    /// The same function multiplied by `e^{sigma x}`.
    pub fn exp_scaled(&self, sigma: f64) -> FunctionSpec {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let inner = Arc::clone(&t.smooth);
                SingularTerm {
                    lo: t.lo,
                    hi: t.hi,
                    exp_lo: t.exp_lo,
                    exp_hi: t.exp_hi,
                    smooth: Arc::new(move |x| (sigma * x).exp() * inner(x)),
                }
            })
            .collect();
        FunctionSpec {
            terms,
            left_exponent: self.left_exponent,
            right_exponent: self.right_exponent,
        }
    }

    /// Sampling plan for `∫ f(x) (1+x)^{pow_minus} (1-x)^{pow_plus} S(x) dx`
    /// with smooth `S`: returns points and weights such that the integral is
    /// `Σ w_i S(x_i)`. Every power-law factor, including the extra endpoint
    /// powers, is absorbed into per-piece Gauss-Jacobi rules.
    pub fn weighted_samples(
        &self,
        npts: usize,
        pow_minus: f64,
        pow_plus: f64,
    ) -> Result<Vec<(f64, f64)>> {
        let mut samples = Vec::new();
        for t in &self.terms {
            let b_exp = t.exp_lo + if t.lo == -1.0 { pow_minus } else { 0.0 };
            let a_exp = t.exp_hi + if t.hi == 1.0 { pow_plus } else { 0.0 };
            if !(b_exp > -1.0) {
                return Err(Error::Singularity { exponent: b_exp, location: t.lo });
            }
            if !(a_exp > -1.0) {
                return Err(Error::Singularity { exponent: a_exp, location: t.hi });
            }
            let rule = gauss_jacobi(npts, a_exp, b_exp)?;
            let h = 0.5 * (t.hi - t.lo);
            let mid = 0.5 * (t.hi + t.lo);
            let jac = h.powf(1.0 + a_exp + b_exp);
            for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
                let x = mid + h * u;
                let mut ww = jac * w * (t.smooth)(x);
                if t.lo != -1.0 {
                    ww *= (1.0 + x).powf(pow_minus);
                }
                if t.hi != 1.0 {
                    ww *= (1.0 - x).powf(pow_plus);
                }
                samples.push((x, ww));
            }
        }
        Ok(samples)
    }

    /// `∫ f(x) (1+x)^{pow_minus} (1-x)^{pow_plus} S(x) dx` for smooth `S`.
    pub fn integrate_against(
        &self,
        npts: usize,
        pow_minus: f64,
        pow_plus: f64,
        s: impl Fn(f64) -> f64,
    ) -> Result<f64> {
        Ok(self
            .weighted_samples(npts, pow_minus, pow_plus)?
            .iter()
            .map(|&(x, w)| w * s(x))
            .sum())
    }
}

/// Inner product `∫ h(x) dx` of a pointwise-evaluable integrand whose
/// endpoint behavior `(1+x)^{exp_minus} (1-x)^{exp_plus}` is known: the
/// powers are divided out of the samples and absorbed into a Gauss-Jacobi
/// weight, so fractional endpoint kinks do not degrade the rule.
pub fn singular_inner_product(
    npts: usize,
    exp_minus: f64,
    exp_plus: f64,
    h: impl Fn(f64) -> f64,
) -> Result<f64> {
    let rule = gauss_jacobi(npts, exp_plus, exp_minus)?;
    Ok(rule.apply(|x| h(x) * (1.0 + x).powf(-exp_minus) * (1.0 - x).powf(-exp_plus)))
}

/// Apply a quadrature rule to a [`FunctionSpec`] sampled as the smooth
/// factor: `Σ w_j f(x_j)`; the rule's own weight stays implicit. Non-finite
/// values at nodes are reported as evaluation errors.
pub fn integrate(rule: &QuadratureRule, f: &FunctionSpec) -> Result<f64> {
    let mut total = 0.0;
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let v = f.eval(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteValue { x, value: v });
        }
        total += w * v;
    }
    Ok(total)
}

/// Riemann-Liouville fractional integral of `f` of order `alpha` at `x`,
/// by Gauss-Jacobi quadrature with the kernel singularity `|x-s|^{alpha-1}`
/// and the operand's declared singularities absorbed into the rule weights.
pub fn rl_integral_numeric(
    f: &FunctionSpec,
    alpha: f64,
    side: Side,
    x: f64,
    npts: usize,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("integral order must be positive, got {alpha}")));
    }
    let inv_gamma = 1.0 / crate::specfun::gamma(alpha)?;
    let mut total = 0.0;
    for t in &f.terms {
        // clip the piece's support to the integration range
        let (p, q) = match side {
            Side::Left => (t.lo, t.hi.min(x)),
            Side::Right => (t.lo.max(x), t.hi),
        };
        if p >= q {
            continue;
        }
        // kernel exponent lands on whichever panel edge touches x
        let (kernel_lo, kernel_hi) = match side {
            Side::Left => (0.0, if q == x { alpha - 1.0 } else { 0.0 }),
            Side::Right => (if p == x { alpha - 1.0 } else { 0.0 }, 0.0),
        };
        let b_exp = kernel_lo + if p == t.lo { t.exp_lo } else { 0.0 };
        let a_exp = kernel_hi + if q == t.hi { t.exp_hi } else { 0.0 };
        if !(b_exp > -1.0) {
            return Err(Error::Singularity { exponent: b_exp, location: p });
        }
        if !(a_exp > -1.0) {
            return Err(Error::Singularity { exponent: a_exp, location: q });
        }
        let rule = gauss_jacobi(npts, a_exp, b_exp)?;
        let h = 0.5 * (q - p);
        let mid = 0.5 * (q + p);
        let jac = h.powf(1.0 + a_exp + b_exp);
        let mut part = 0.0;
        for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
            let s = mid + h * u;
            let mut v = (t.smooth)(s);
            // factors not absorbed into the rule weight stay in the sample
            match side {
                Side::Left => {
                    if q != x {
                        v *= (x - s).powf(alpha - 1.0);
                    }
                    if q != t.hi {
                        v *= (t.hi - s).powf(t.exp_hi);
                    }
                }
                Side::Right => {
                    if p != x {
                        v *= (s - x).powf(alpha - 1.0);
                    }
                    if p != t.lo {
                        v *= (s - t.lo).powf(t.exp_lo);
                    }
                }
            }
            part += w * v;
        }
        total += jac * part;
    }
    Ok(inv_gamma * total)
}

/// Tempered fractional integral `I^{alpha,lambda} f` at `x`:
/// `e^{∓λx} I^{alpha}(e^{±λs} f(s))(x)`, signs by `side`.
pub fn tempered_integral(
    f: &FunctionSpec,
    alpha: f64,
    lambda: f64,
    side: Side,
    x: f64,
    npts: usize,
) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::domain(format!("tempering parameter must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return rl_integral_numeric(f, alpha, side, x, npts);
    }
    match side {
        Side::Left => {
            let scaled = f.exp_scaled(lambda);
            Ok((-lambda * x).exp() * rl_integral_numeric(&scaled, alpha, side, x, npts)?)
        }
        Side::Right => {
            let scaled = f.exp_scaled(-lambda);
            Ok((lambda * x).exp() * rl_integral_numeric(&scaled, alpha, side, x, npts)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use crate::specfun::{gamma, legendre_eval};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn legendre_spec(n: usize) -> FunctionSpec {
        FunctionSpec::smooth(move |x| legendre_eval(n, x))
    }

    fn random_poly(rng: &mut impl rand::Rng) -> FunctionSpec {
        let coeffs: Vec<f64> = (0..=8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        FunctionSpec::smooth(move |x| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c))
    }

    #[test]
    fn integral_of_constant_half_order() {
        let one = WeightedJacobiTerm::legendre(0, Side::Left);
        let out = rl_integral_jacobi(&one, 0.5).unwrap();
        assert_relative_eq!(out.coeff, 1.0 / gamma(1.5).unwrap(), max_relative = 1e-14);
        assert_eq!(out.mu, 0.5);
        assert_eq!(out.nu, 0.0);
        assert_eq!(out.params, JacobiParams::new(-0.5, 0.5));
        let x = 0.3;
        assert_relative_eq!(
            out.eval(x),
            (1.0f64 + x).sqrt() / gamma(1.5).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn zero_order_is_identity() {
        let t = WeightedJacobiTerm::legendre(4, Side::Left);
        assert_eq!(rl_integral_jacobi(&t, 0.0).unwrap(), t);
        assert_eq!(rl_derivative_jacobi(&t, 0.0).unwrap(), t);
    }

    #[test]
    fn derivative_undoes_integral() {
        let t = WeightedJacobiTerm::legendre(3, Side::Left);
        let alpha = 0.7;
        let back = rl_derivative_jacobi(&rl_integral_jacobi(&t, alpha).unwrap(), alpha).unwrap();
        assert_relative_eq!(back.coeff, 1.0, max_relative = 1e-13);
        assert!(back.mu.abs() < 1e-12 && back.nu.abs() < 1e-12);
        assert!(back.params.a.abs() < 1e-12 && back.params.b.abs() < 1e-12);
    }

    #[test]
    fn derivative_of_half_integrated_constant() {
        let t = WeightedJacobiTerm {
            coeff: 1.0,
            mu: 0.5,
            nu: 0.0,
            n: 0,
            params: JacobiParams::new(-0.5, 0.5),
            side: Side::Left,
        };
        let out = rl_derivative_jacobi(&t, 0.5).unwrap();
        assert_relative_eq!(out.coeff, gamma(1.5).unwrap(), max_relative = 1e-14);
        assert_eq!(out.mu, 0.0);
        assert_eq!(out.params, JacobiParams::new(0.0, 0.0));
    }

    #[test]
    fn pattern_violations_are_rejected() {
        let t = WeightedJacobiTerm {
            coeff: 1.0,
            mu: 0.0,
            nu: 0.5,
            n: 2,
            params: JacobiParams::new(0.5, 0.0),
            side: Side::Left,
        };
        assert!(matches!(rl_integral_jacobi(&t, 0.5), Err(Error::PatternMismatch(_))));
        let t2 = WeightedJacobiTerm {
            coeff: 1.0,
            mu: 0.4,
            nu: 0.0,
            n: 2,
            params: JacobiParams::new(0.0, 0.7),
            side: Side::Left,
        };
        assert!(matches!(rl_integral_jacobi(&t2, 0.5), Err(Error::PatternMismatch(_))));
        // derivative order larger than the available exponent
        let t3 = WeightedJacobiTerm {
            coeff: 1.0,
            mu: 0.3,
            nu: 0.0,
            n: 1,
            params: JacobiParams::new(-0.3, 0.3),
            side: Side::Left,
        };
        assert!(matches!(rl_derivative_jacobi(&t3, 1.5), Err(Error::PatternMismatch(_))));
    }

    #[test]
    fn closed_form_integral_matches_convolution() {
        for &alpha in &[0.3, 0.7, 1.4] {
            for n in 0..=6usize {
                let term = WeightedJacobiTerm::legendre(n, Side::Left);
                let closed = rl_integral_jacobi(&term, alpha).unwrap();
                let spec = legendre_spec(n);
                for &x in &[-0.62, 0.25, 0.83] {
                    let numeric = rl_integral_numeric(&spec, alpha, Side::Left, x, 256).unwrap();
                    assert_relative_eq!(
                        closed.eval(x),
                        numeric,
                        max_relative = 1e-9,
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn right_sided_closed_form_matches_convolution() {
        let term = WeightedJacobiTerm::legendre(3, Side::Right);
        let alpha = 0.6;
        let closed = rl_integral_jacobi(&term, alpha).unwrap();
        let spec = legendre_spec(3);
        for &x in &[-0.5, 0.1, 0.7] {
            let numeric = rl_integral_numeric(&spec, alpha, Side::Right, x, 256).unwrap();
            assert_relative_eq!(closed.eval(x), numeric, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn convolution_of_constant() {
        let one = FunctionSpec::smooth(|_| 1.0);
        for &x in &[-0.7, 0.0, 0.4, 1.0] {
            assert_relative_eq!(
                rl_integral_numeric(&one, 1.0, Side::Left, x, 64).unwrap(),
                x + 1.0,
                max_relative = 1e-13,
                epsilon = 1e-13
            );
        }
        assert_relative_eq!(
            rl_integral_numeric(&one, 0.5, Side::Left, 0.0, 64).unwrap(),
            1.0 / gamma(1.5).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn convolution_of_power_law() {
        // I^{0.65} (1+s)^{0.25} at 0.8 = Γ(1.25)/Γ(1.9)·1.8^{0.9}
        let f = FunctionSpec::power_weighted(0.25, 0.0, |_| 1.0).unwrap();
        let v = rl_integral_numeric(&f, 0.65, Side::Left, 0.8, 64).unwrap();
        assert_relative_eq!(v, 1.5995469580197155, max_relative = 1e-13);
    }

    #[test]
    fn tempered_reduces_to_plain_at_lambda_zero() {
        let f = legendre_spec(2);
        for &x in &[-0.2, 0.6] {
            assert_eq!(
                tempered_integral(&f, 0.4, 0.0, Side::Left, x, 128).unwrap(),
                rl_integral_numeric(&f, 0.4, Side::Left, x, 128).unwrap()
            );
        }
    }

    #[test]
    fn tempered_integral_of_constant_first_order() {
        let one = FunctionSpec::smooth(|_| 1.0);
        for &x in &[-0.9, -0.1, 0.5, 1.0] {
            assert_relative_eq!(
                tempered_integral(&one, 1.0, 1.0, Side::Left, x, 64).unwrap(),
                1.0 - (-x - 1.0f64).exp(),
                max_relative = 1e-13,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn tempered_integral_reference_value() {
        // mpmath: e^{-0.3}/Γ(0.4)·∫_{-1}^{0.3} (0.3-s)^{-0.6} e^{s} L_2(s) ds
        let f = legendre_spec(2);
        let v = tempered_integral(&f, 0.4, 1.0, Side::Left, 0.3, 512).unwrap();
        assert_relative_eq!(v, -0.3240088503099109, max_relative = 1e-12);
        let coarse = tempered_integral(&f, 0.4, 1.0, Side::Left, 0.3, 64).unwrap();
        assert_relative_eq!(coarse, v, max_relative = 1e-10);
    }

    #[test]
    fn basis_derivative_recovers_legendre() {
        // order-α/2 derivative of I^{α/2} L_n is L_n; with the tempering
        // factor the basis derivative is e^{-λx} L_n(x)
        let alpha_half = 0.35;
        let lambda = 1.0;
        let xs = [-0.8, -0.15, 0.44, 0.9];
        for n in 0..5usize {
            let term =
                rl_integral_jacobi(&WeightedJacobiTerm::legendre(n, Side::Left), alpha_half)
                    .unwrap();
            let vals = tempered_derivative_on_basis(&term, alpha_half, lambda, &xs).unwrap();
            for (&x, &v) in xs.iter().zip(&vals) {
                assert_relative_eq!(
                    v,
                    (-lambda * x).exp() * legendre_eval(n, x),
                    max_relative = 1e-12,
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn basis_derivative_matches_finite_difference() {
        // oracle: D^β g = d/dx I^{1-β} g, centered difference of the numeric
        // integral; operand g = I^{0.8} L_3 given in closed form
        let n = 3;
        let alpha = 0.8;
        let beta = 0.3;
        let base =
            rl_integral_jacobi(&WeightedJacobiTerm::legendre(n, Side::Left), alpha).unwrap();
        let closed = rl_derivative_jacobi(&base, beta).unwrap();
        let (c, params) = (base.coeff, base.params);
        let g = FunctionSpec::power_weighted(alpha, 0.0, move |x| c * jacobi_eval(n, params, x))
            .unwrap();
        let x = 0.6;
        let h = 1e-4;
        let up = rl_integral_numeric(&g, 1.0 - beta, Side::Left, x + h, 256).unwrap();
        let dn = rl_integral_numeric(&g, 1.0 - beta, Side::Left, x - h, 256).unwrap();
        let fd = (up - dn) / (2.0 * h);
        assert_relative_eq!(closed.eval(x), fd, max_relative = 1e-6);
    }

    #[test]
    fn function_spec_piecewise_eval() {
        // f = -(1+x)^{-0.2} + 2·H(x)·x^{-0.2}
        let t1 = SingularTerm::new(-1.0, 1.0, -0.2, 0.0, |_| -1.0).unwrap();
        let t2 = SingularTerm::new(0.0, 1.0, -0.2, 0.0, |_| 2.0).unwrap();
        let f = FunctionSpec::from_terms(vec![t1, t2]).unwrap();
        assert_eq!(f.left_exponent(), -0.2);
        assert_relative_eq!(f.eval(-0.5), -(0.5f64).powf(-0.2), max_relative = 1e-14);
        assert_relative_eq!(
            f.eval(0.5),
            -(1.5f64).powf(-0.2) + 2.0 * 0.5f64.powf(-0.2),
            max_relative = 1e-14
        );
        assert_eq!(f.interior_breaks(), vec![(0.0, -0.2)]);
    }

    #[test]
    fn weighted_samples_integrate_piecewise_powers() {
        // ∫_0^1 x^{-0.3}(1-x)^{0.5} dx = B(0.7, 1.5)
        let t = SingularTerm::new(0.0, 1.0, -0.3, 0.5, |_| 1.0).unwrap();
        let f = FunctionSpec::from_terms(vec![t]).unwrap();
        let v = f.integrate_against(48, 0.0, 0.0, |_| 1.0).unwrap();
        let beta = gamma(0.7).unwrap() * gamma(1.5).unwrap() / gamma(2.2).unwrap();
        assert_relative_eq!(v, beta, max_relative = 1e-13);
    }

    #[test]
    fn rejects_nonintegrable_singularities() {
        assert!(SingularTerm::new(-1.0, 1.0, -1.0, 0.0, |_| 1.0).is_err());
        // kernel exponent -0.7 lands on the same endpoint as the -0.6 power
        let f = FunctionSpec::power_weighted(0.0, -0.6, |_| 1.0).unwrap();
        assert!(matches!(
            rl_integral_numeric(&f, 0.3, Side::Left, 1.0, 64),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn integrate_rule_detects_nonfinite() {
        let rule = gauss_legendre(8).unwrap();
        let f = FunctionSpec::smooth(|x| x.exp());
        assert!(integrate(&rule, &f).is_ok());
        let rule1 = gauss_legendre(1).unwrap(); // its only node is x = 0
        let singular_at_zero = FunctionSpec::smooth(|x| 1.0 / x);
        assert!(matches!(
            integrate(&rule1, &singular_at_zero),
            Err(Error::NonFiniteValue { .. })
        ));
    }

    #[test]
    fn adjoint_identity_for_tempered_integrals() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for &alpha in &[0.3, 0.8, 1.5] {
            for &lambda in &[0.0, 1.0] {
                for _ in 0..3 {
                    let u = random_poly(&mut rng);
                    let v = random_poly(&mut rng);
                    // I_left u carries a (1+x)^α factor, I_right v a (1-x)^α
                    let lhs = singular_inner_product(128, alpha, 0.0, |x| {
                        tempered_integral(&u, alpha, lambda, Side::Left, x, 96).unwrap()
                            * v.eval(x)
                    })
                    .unwrap();
                    let rhs = singular_inner_product(128, 0.0, alpha, |x| {
                        u.eval(x)
                            * tempered_integral(&v, alpha, lambda, Side::Right, x, 96).unwrap()
                    })
                    .unwrap();
                    assert!(
                        (lhs - rhs).abs() <= 1e-8,
                        "adjoint mismatch {lhs} vs {rhs} (alpha={alpha}, lambda={lambda})"
                    );
                }
            }
        }
    }

    #[test]
    fn coercivity_bound_for_small_orders() {
        use rand::SeedableRng;
        use std::f64::consts::PI;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &alpha in &[0.1, 0.25, 0.45] {
            for &lambda in &[0.0, 1.0] {
                for _ in 0..2 {
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
                    assert!(
                        cross >= (PI * alpha).cos() * left_sq - 1e-8,
                        "coercivity violated: cross={cross}, bound={}",
                        (PI * alpha).cos() * left_sq
                    );
                }
            }
        }
    }

    #[test]
    fn left_right_norms_agree_for_even_functions() {
        for &lambda in &[0.0, 1.0] {
            let f = FunctionSpec::smooth(|x| 1.0 + x * x - 0.5 * x.powi(4));
            let alpha = 0.3;
            let left_sq = singular_inner_product(128, 2.0 * alpha, 0.0, |x| {
                let il = tempered_integral(&f, alpha, lambda, Side::Left, x, 96).unwrap();
                il * il
            })
            .unwrap();
            let right_sq = singular_inner_product(128, 0.0, 2.0 * alpha, |x| {
                let ir = tempered_integral(&f, alpha, lambda, Side::Right, x, 96).unwrap();
                ir * ir
            })
            .unwrap();
            assert!(
                (left_sq - right_sq).abs() <= 1e-8,
                "norm mismatch {left_sq} vs {right_sq} at lambda={lambda}"
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn round_trip_is_identity(
            n in 0usize..16,
            delta in -0.9f64..3.0,
            gamma_p in -1.4f64..1.4,
            alpha in 0.01f64..2.0,
            coeff in -10.0f64..10.0,
            right in proptest::bool::ANY,
        ) {
            let side = if right { Side::Right } else { Side::Left };
            let term = match side {
                Side::Left => WeightedJacobiTerm {
                    coeff, mu: delta, nu: 0.0, n,
                    params: JacobiParams::new(gamma_p, delta), side,
                },
                Side::Right => WeightedJacobiTerm {
                    coeff, mu: 0.0, nu: delta, n,
                    params: JacobiParams::new(delta, gamma_p), side,
                },
            };
            let back = rl_derivative_jacobi(&rl_integral_jacobi(&term, alpha).unwrap(), alpha)
                .unwrap();
            prop_assert!((back.coeff - coeff).abs() <= 1e-12 * coeff.abs().max(1.0));
            prop_assert!((back.mu - term.mu).abs() <= 1e-12);
            prop_assert!((back.nu - term.nu).abs() <= 1e-12);
            prop_assert!((back.params.a - term.params.a).abs() <= 1e-12);
            prop_assert!((back.params.b - term.params.b).abs() <= 1e-12);
        }
    }
}
