//! Scalar special functions: the Euler gamma function, Jacobi polynomials with
//! general real parameters, Legendre polynomials, and the two-parameter
//! Mittag-Leffler function.
//!
//! Jacobi polynomials here are the Rodrigues-normalized family
//! `J_n^{a,b}`, defined for *all* real parameters `(a, b)`, not only the
//! classical orthogonality range `a, b > -1`. The solver bases need
//! parameters well below -1.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest argument for which Γ(x) is representable in f64.
const GAMMA_OVERFLOW: f64 = 171.62;

/// Lanczos coefficients, g = 7, 9 terms (Godfrey's set, as used by GSL).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFF: [f64; 9] = [
    0.9999999999998099,
    676.5203681218851,
    -1259.1392167224028,
    771.3234287776531,
    -176.6150291621406,
    12.507343278686905,
    -0.13857109526572012,
    9.984369578019572e-06,
    1.5056327351493116e-07,
];

/// sin(πx) with exact zeros at integers and argument reduction done on `x`
/// itself, so large arguments do not lose precision.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r < 0.5 {
        (PI * r).sin()
    } else if r < 1.0 {
        (PI * (1.0 - r)).sin()
    } else if r < 1.5 {
        -(PI * (r - 1.0)).sin()
    } else {
        -(PI * (2.0 - r)).sin()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Lanczos series for x >= 0.5. The power factor is assembled in log space
/// so intermediates do not overflow before e^{-t} pulls the value back.
fn lanczos_positive(x: f64) -> f64 {
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFF[0];
    for (i, c) in LANCZOS_COEFF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * ((z + 0.5) * t.ln() - t).exp() * acc
}

/// Γ(x) without argument checking: NaN at poles, ±inf on overflow.
pub(crate) fn gamma_raw(x: f64) -> f64 {
    if x >= 0.5 {
        if x > GAMMA_OVERFLOW {
            f64::INFINITY
        } else {
            lanczos_positive(x)
        }
    } else {
        let s = sin_pi(x);
        if s == 0.0 {
            return f64::NAN;
        }
        let y = 1.0 - x;
        if y > 170.0 {
            // go through logs so values down in the subnormal range survive
            let ln = PI.ln() - s.abs().ln() - ln_gamma(y);
            let v = ln.exp();
            if s < 0.0 {
                -v
            } else {
                v
            }
        } else {
            PI / (s * lanczos_positive(y))
        }
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma needs a positive argument, got {x}");
    if x < 0.5 {
        return ln_gamma(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFF[0];
    for (i, c) in LANCZOS_COEFF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// The Euler gamma function Γ(x).
///
/// Errors at the poles x ∈ {0, -1, -2, …} and when |Γ(x)| exceeds the f64
/// range.
pub fn gamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    let v = gamma_raw(x);
    if !v.is_finite() {
        return Err(Error::Overflow { context: "gamma", argument: x });
    }
    Ok(v)
}

/// Γ(num)/Γ(den), stable for large positive arguments (computed through
/// ln Γ where a direct quotient would overflow). A pole of Γ in the
/// denominator yields 0.
pub fn gamma_ratio(num: f64, den: f64) -> f64 {
    if is_nonpositive_integer(den) {
        return 0.0;
    }
    if num > 0.0 && den > 0.0 {
        if num < GAMMA_OVERFLOW && den < GAMMA_OVERFLOW {
            gamma_raw(num) / gamma_raw(den)
        } else {
            (ln_gamma(num) - ln_gamma(den)).exp()
        }
    } else {
        gamma_raw(num) / gamma_raw(den)
    }
}

/// Exponent pair of a Jacobi polynomial `J_n^{a,b}`. Any finite real values
/// are admissible; there is no `a, b > -1` restriction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub a: f64,
    pub b: f64,
}

impl JacobiParams {
    pub fn new(a: f64, b: f64) -> Self {
        debug_assert!(a.is_finite() && b.is_finite());
        JacobiParams { a, b }
    }

    /// Parameters with the roles of the two endpoints exchanged.
    pub fn swapped(self) -> Self {
        JacobiParams { a: self.b, b: self.a }
    }
}

/// Generalized binomial coefficient C(t, k) as a product, exact as a
/// polynomial in `t` (no Γ quotients, hence no pole bookkeeping).
fn binom_general(t: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (t - i as f64) / (k - i) as f64;
    }
    acc
}

/// Explicit finite-sum expansion of the Rodrigues formula,
/// `J_n^{a,b}(x) = Σ_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^{n-s}`.
///
/// Valid for all real parameters; accumulating cancellation limits it to
/// small n in f64, which is why it only seeds or backstops the recurrence.
fn jacobi_explicit_sum(n: usize, p: JacobiParams, x: f64) -> f64 {
    let u = (x - 1.0) / 2.0;
    let v = (x + 1.0) / 2.0;
    let mut sum = 0.0;
    for s in 0..=n {
        let c = binom_general(n as f64 + p.a, n - s) * binom_general(n as f64 + p.b, s);
        sum += c * u.powi(s as i32) * v.powi((n - s) as i32);
    }
    sum
}

/// Degree recurrence seeded at J_0, J_1, J_2 is division-free up to the
/// seeds and, from k = 2 on, all recurrence denominators stay away from
/// zero whenever a + b exceeds this bound.
const RECURRENCE_PARAM_FLOOR: f64 = -2.95;

fn jacobi_seeds(p: JacobiParams, x: f64) -> (f64, f64, f64) {
    let (a, b) = (p.a, p.b);
    let j0 = 1.0;
    let j1 = 0.5 * ((a + b + 2.0) * x + (a - b));
    let j2 = jacobi_explicit_sum(2, p, x);
    (j0, j1, j2)
}

/// One recurrence step: J_{k+1} from (J_{k-1}, J_k) at degree k.
#[inline]
fn jacobi_step(k: usize, p: JacobiParams, x: f64, jm1: f64, j: f64) -> f64 {
    let (a, b) = (p.a, p.b);
    let kf = k as f64;
    let q = 2.0 * kf + a + b;
    let a_k = 2.0 * (kf + 1.0) * (kf + a + b + 1.0) * q;
    let b_k = (q + 1.0) * (a * a - b * b);
    let c_k = q * (q + 1.0) * (q + 2.0);
    let d_k = 2.0 * (kf + a) * (kf + b) * (q + 2.0);
    ((b_k + c_k * x) * j - d_k * jm1) / a_k
}

/// Evaluate the degree-n Jacobi polynomial `J_n^{a,b}(x)` for arbitrary real
/// parameters. Supported up to n = 512.
pub fn jacobi_eval(n: usize, p: JacobiParams, x: f64) -> f64 {
    if p.a + p.b <= RECURRENCE_PARAM_FLOOR {
        return jacobi_explicit_sum(n, p, x);
    }
    let (j0, j1, j2) = jacobi_seeds(p, x);
    match n {
        0 => return j0,
        1 => return j1,
        2 => return j2,
        _ => {}
    }
    let (mut jm1, mut j) = (j1, j2);
    for k in 2..n {
        let next = jacobi_step(k, p, x, jm1, j);
        jm1 = j;
        j = next;
    }
    j
}

/// Table of `J_n^{a,b}(xs[j])` for n = 0..=nmax; row n, column j. Each row
/// is bit-identical to the corresponding scalar `jacobi_eval` calls.
pub fn jacobi_table(nmax: usize, p: JacobiParams, xs: &[f64]) -> Vec<Vec<f64>> {
    let mut table = vec![vec![0.0; xs.len()]; nmax + 1];
    if p.a + p.b <= RECURRENCE_PARAM_FLOOR {
        for (n, row) in table.iter_mut().enumerate() {
            for (j, &x) in xs.iter().enumerate() {
                row[j] = jacobi_explicit_sum(n, p, x);
            }
        }
        return table;
    }
    for (j, &x) in xs.iter().enumerate() {
        let (j0, j1, j2) = jacobi_seeds(p, x);
        let seeds = [j0, j1, j2];
        for (n, &s) in seeds.iter().enumerate().take(nmax + 1) {
            table[n][j] = s;
        }
        if nmax >= 3 {
            let (mut jm1, mut jj) = (j1, j2);
            for k in 2..nmax {
                let next = jacobi_step(k, p, x, jm1, jj);
                jm1 = jj;
                jj = next;
                table[k + 1][j] = jj;
            }
        }
    }
    table
}

/// Legendre polynomial L_n(x) = J_n^{0,0}(x), by the standard three-term
/// recurrence.
pub fn legendre_eval(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut lm1, mut l) = (1.0, x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * l - kf * lm1) / (kf + 1.0);
        lm1 = l;
        l = next;
    }
    l
}

/// Unevaluated double-length float, used to keep the alternating
/// Mittag-Leffler series from losing digits to cancellation.
#[derive(Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn from(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let t = s - a;
        DoubleDouble { hi: s, lo: (a - (s - t)) + (b - t) }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        DoubleDouble { hi: s, lo: b - (s - a) }
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        DoubleDouble { hi: p, lo: a.mul_add(b, -p) }
    }

    fn add(self, other: Self) -> Self {
        let s = Self::two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        Self::quick_two_sum(s.hi, lo)
    }

    fn mul(self, other: Self) -> Self {
        let p = Self::two_prod(self.hi, other.hi);
        let lo = p.lo + self.hi * other.lo + self.lo * other.hi;
        Self::quick_two_sum(p.hi, lo)
    }

    fn div(self, other: Self) -> Self {
        let q1 = self.hi / other.hi;
        let r = self.add(other.mul(Self::from(-q1)));
        let q2 = r.hi / other.hi;
        let r2 = r.add(other.mul(Self::from(-q2)));
        let q3 = r2.hi / other.hi;
        Self::quick_two_sum(q1, q2).add(Self::from(q3))
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Alternating-series branch: g a small positive integer, b > 0, z < 0.
/// Γ(g(k+1)+b)/Γ(gk+b) is then a short product of exactly representable
/// factors, so the whole sum can run in double-length arithmetic and only
/// the final 1/Γ(b) factor carries ordinary rounding.
fn mittag_leffler_alternating(g_int: u32, b: f64, z: f64) -> f64 {
    let mut term = DoubleDouble::from(1.0);
    let mut sum = term;
    let zdd = DoubleDouble::from(z);
    let mut small_streak = 0;
    for k in 0..512u32 {
        let mut next = term.mul(zdd);
        for j in 0..g_int {
            let factor = DoubleDouble::two_sum(b, (g_int * k + j) as f64);
            next = next.div(factor);
        }
        term = next;
        sum = sum.add(term);
        if term.value().abs() < 1e-16 * (1.0 + sum.value().abs()) {
            small_streak += 1;
            if small_streak >= 2 {
                break;
            }
        } else {
            small_streak = 0;
        }
    }
    sum.value() / gamma_raw(b)
}

/// Two-parameter Mittag-Leffler function E_{g,b}(z) = Σ_k z^k / Γ(gk + b).
///
/// Direct series, summed until the term magnitude drops below
/// 1e-16·(1 + |partial sum|). Terms whose Γ argument lands on a pole
/// contribute zero. Requires g > 0.
pub fn mittag_leffler(g: f64, b: f64, z: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::domain(format!(
            "mittag_leffler needs g > 0, got g = {g}"
        )));
    }
    if z < 0.0 && b > 0.0 && g == g.floor() && g <= 4.0 {
        return Ok(mittag_leffler_alternating(g as u32, b, z));
    }
    // do not test the stopping rule before the Γ argument has cleared every
    // pole and the terms can only shrink
    let k_min = 4 + ((1.0 - b) / g).max(0.0).ceil() as usize;
    let ln_abs_z = if z == 0.0 { f64::NEG_INFINITY } else { z.abs().ln() };
    let mut sum = 0.0;
    let mut small_streak = 0;
    for k in 0..512usize {
        let arg = g * k as f64 + b;
        let term = if arg > 0.5 {
            if k == 0 {
                1.0 / gamma_raw(arg)
            } else {
                let magnitude = (k as f64 * ln_abs_z - ln_gamma(arg)).exp();
                if z < 0.0 && k % 2 == 1 {
                    -magnitude
                } else {
                    magnitude
                }
            }
        } else {
            let den = gamma_raw(arg);
            if den.is_nan() || den.is_infinite() {
                0.0
            } else {
                z.powi(k as i32) / den
            }
        };
        sum += term;
        if term.abs() < 1e-16 * (1.0 + sum.abs()) {
            small_streak += 1;
            if k >= k_min && small_streak >= 2 {
                break;
            }
        } else {
            small_streak = 0;
        }
    }
    Ok(sum)
}
