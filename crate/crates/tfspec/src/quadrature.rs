//! Gauss-Legendre and Gauss-Jacobi quadrature on [-1, 1].
//!
//! Rules are built by the Golub-Welsch procedure: the symmetric tridiagonal
//! matrix of recurrence coefficients is diagonalized by implicit QL with
//! Wilkinson shifts, eigenvalues give the nodes and squared first eigenvector
//! components (scaled by the zeroth moment) give the weights.

use crate::error::{Error, Result};
use crate::specfun::gamma_ratio;

/// Hard cap on rule size.
pub const MAX_RULE_SIZE: usize = 2048;

/// Nodes and weights of a Gauss rule with Jacobi weight
/// `(1-x)^a (1+x)^b` absorbed into the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    weight_exponents: (f64, f64),
}

impl QuadratureRule {
    /// Strictly increasing nodes, all interior to (-1, 1).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Positive weights, one per node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Exponent pair `(a, b)` of the absorbed weight `(1-x)^a (1+x)^b`.
    pub fn weight_exponents(&self) -> (f64, f64) {
        self.weight_exponents
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Apply the rule to the smooth factor `f`: returns `Σ w_j f(x_j)`.
    /// The rule's weight function is implicit.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// n-point Gauss-Legendre rule (weight exponents (0, 0)), exact for
/// polynomials of degree <= 2n-1.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// n-point Gauss-Jacobi rule for the weight `(1-x)^a (1+x)^b`, a, b > -1.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if !(1..=MAX_RULE_SIZE).contains(&n) {
        return Err(Error::RuleSize { n, max: MAX_RULE_SIZE });
    }
    if !(a > -1.0) || !a.is_finite() {
        return Err(Error::WeightExponent { which: "a", value: a });
    }
    if !(b > -1.0) || !b.is_finite() {
        return Err(Error::WeightExponent { which: "b", value: b });
    }

    // zeroth moment of the weight
    let mu0 = 2f64.powf(a + b + 1.0) * gamma_ratio(a + 1.0, a + b + 2.0)
        * crate::specfun::gamma_raw(b + 1.0);

    // monic-recurrence coefficients of the Jacobi weight
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    diag[0] = (b - a) / (a + b + 2.0);
    for k in 1..n {
        let q = 2.0 * k as f64 + a + b;
        diag[k] = (b * b - a * a) / (q * (q + 2.0));
    }
    for k in 1..n {
        let kf = k as f64;
        let q = 2.0 * kf + a + b;
        let beta_k = if k == 1 {
            4.0 * (a + 1.0) * (b + 1.0) / ((a + b + 2.0) * (a + b + 2.0) * (a + b + 3.0))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (q * q * (q + 1.0) * (q - 1.0))
        };
        off[k - 1] = beta_k.sqrt();
    }

    let mut first = vec![0.0; n];
    first[0] = 1.0;
    tridiag_ql_implicit(&mut diag, &mut off, &mut first)?;

    let mut pairs: Vec<(f64, f64)> = diag
        .iter()
        .zip(&first)
        .map(|(&x, &z)| (x, mu0 * z * z))
        .collect();
    pairs.sort_unstable_by(|p, q| p.0.partial_cmp(&q.0).unwrap());

    let mut nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();

    // symmetric weight: enforce the exact node/weight symmetry
    if a == b {
        for i in 0..n / 2 {
            let x = 0.5 * (nodes[i] - nodes[n - 1 - i]);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            let w = 0.5 * (weights[i] + weights[n - 1 - i]);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
    }

    Ok(QuadratureRule { nodes, weights, weight_exponents: (a, b) })
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `diag` is overwritten with the eigenvalues; `first` (initialized to e_0)
/// accumulates the first component of each eigenvector.
fn tridiag_ql_implicit(diag: &mut [f64], off: &mut [f64], first: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    // e[i] couples rows i and i+1; e[n-1] is workspace
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::domain(
                    "tridiagonal QL iteration failed to converge".to_string(),
                ));
            }
            // Wilkinson shift from the leading 2x2 block
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - bb;
                // accumulate the rotation on the tracked eigenvector row
                f = first[i + 1];
                first[i + 1] = s * first[i] + c * f;
                first[i] = c * first[i] - s * f;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Monomial moments `∫ (1-x)^a (1+x)^b x^j dx`, j = 0..=jmax, computed by
/// the boundary-term-free integration-by-parts recurrence
/// `M_j = ((b-a) M_{j-1} + (j-1) M_{j-2}) / (a+b+j+1)`.
///
/// Closed-form and quadrature-free, which makes it a fitting exactness
/// oracle for the Gauss rules built here.
pub fn jacobi_weight_moments(a: f64, b: f64, jmax: usize) -> Vec<f64> {
    let m0 = 2f64.powf(a + b + 1.0) * gamma_ratio(a + 1.0, a + b + 2.0)
        * crate::specfun::gamma_raw(b + 1.0);
    let mut ms = vec![m0];
    if jmax >= 1 {
        ms.push((b - a) * m0 / (a + b + 2.0));
    }
    for j in 2..=jmax {
        let next = ((b - a) * ms[j - 1] + (j - 1) as f64 * ms[j - 2]) / (a + b + j as f64 + 1.0);
        ms.push(next);
    }
    ms
}
