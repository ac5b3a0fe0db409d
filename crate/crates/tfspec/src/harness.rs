//! Convergence-study driver: the built-in example problems, L2-error
//! measurement against exact or reference solutions, log-log rate fitting,
//! and CSV/SVG report emission.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::advection::{solve_advection, ProblemSpec, Regime, SpectralSolution};
use crate::diffusion::solve_diffusion;
use crate::error::{Error, Result};
use crate::fracops::{FunctionSpec, SingularTerm};
use crate::quadrature::gauss_jacobi;
use crate::specfun::{gamma_ratio, mittag_leffler};

/// Truncations used when the caller does not specify a list.
pub const DEFAULT_NS: [usize; 6] = [8, 16, 32, 64, 128, 256];

/// Identifier (plus case-specific knobs) of a built-in example problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseId {
    /// Advection; the fractional derivative of the exact solution is a jump,
    /// so the L2 error decays like N^{-1/2}.
    AdvJump,
    /// Advection with three extra orders of smoothness: rate 3.
    AdvH3,
    /// Advection with `f(x) = (1+x)^{-a1/2-0.3}` and no closed-form
    /// solution; errors are measured against a refined reference solve.
    AdvSingularRhs,
    /// Advection with `u = e^{-λx}(1+x)^{m+a1/2-g}`, exercising d ≠ 0.
    AdvDterm { m: f64, gamma: f64 },
    /// Diffusion with a Mittag-Leffler exact solution, β = 4: rate ≥ 3.
    DiffMlPoly,
    /// Diffusion with β = (a1+1)/2 + 1: the solution lies in the closure of
    /// the trial space and the errors decay super-algebraically.
    DiffMlExp,
}

/// A built-in convergence experiment.
#[derive(Debug, Clone, Copy)]
pub struct ExampleCase {
    pub id: CaseId,
    pub expected_rate: Option<f64>,
}

impl ExampleCase {
    pub fn new(id: CaseId) -> Self {
        let expected_rate = match id {
            CaseId::AdvJump => Some(0.5),
            CaseId::AdvH3 => Some(3.0),
            CaseId::AdvSingularRhs => None,
            CaseId::AdvDterm { m, .. } => Some(if m == 0.0 { 0.5 } else { m }),
            CaseId::DiffMlPoly => Some(3.0),
            CaseId::DiffMlExp => None,
        };
        ExampleCase { id, expected_rate }
    }

    /// Parse a CLI/config case name; `m` and `gamma` feed the d-term case.
    pub fn from_name(name: &str, m: f64, gamma: f64) -> Result<Self> {
        let id = match name {
            "adv_jump" => CaseId::AdvJump,
            "adv_h3" => CaseId::AdvH3,
            "adv_singular_rhs" => CaseId::AdvSingularRhs,
            "adv_dterm" => CaseId::AdvDterm { m, gamma },
            "diff_ml_poly" => CaseId::DiffMlPoly,
            "diff_ml_exp" => CaseId::DiffMlExp,
            other => {
                return Err(Error::Case(format!(
                    "unknown case '{other}' (expected adv_jump, adv_h3, adv_singular_rhs, \
                     adv_dterm, diff_ml_poly, diff_ml_exp)"
                )))
            }
        };
        Ok(ExampleCase::new(id))
    }

    pub fn label(&self) -> String {
        match self.id {
            CaseId::AdvJump => "adv_jump".to_string(),
            CaseId::AdvH3 => "adv_h3".to_string(),
            CaseId::AdvSingularRhs => "adv_singular_rhs".to_string(),
            CaseId::AdvDterm { m, gamma } => format!("adv_dterm[m={m},gamma={gamma}]"),
            CaseId::DiffMlPoly => "diff_ml_poly".to_string(),
            CaseId::DiffMlExp => "diff_ml_exp".to_string(),
        }
    }

    pub fn regime(&self) -> Regime {
        match self.id {
            CaseId::AdvJump | CaseId::AdvH3 | CaseId::AdvSingularRhs | CaseId::AdvDterm { .. } => {
                Regime::Advection
            }
            CaseId::DiffMlPoly | CaseId::DiffMlExp => Regime::Diffusion,
        }
    }

    /// Second Mittag-Leffler parameter of the diffusion cases.
    fn ml_beta(&self, alpha1: f64) -> f64 {
        match self.id {
            CaseId::DiffMlPoly => 4.0,
            CaseId::DiffMlExp => 0.5 * (alpha1 + 1.0) + 1.0,
            _ => unreachable!("ml_beta only applies to diffusion cases"),
        }
    }

    /// The closed-form exact solution, when the case has one.
    pub fn exact(&self, alpha1: f64, alpha2: f64, d: f64, lambda: f64) -> Result<Option<FunctionSpec>> {
        let _ = (alpha2, d);
        match self.id {
            CaseId::AdvJump | CaseId::AdvH3 => {
                // u = e^{-λx}[2 x^q H(x) - (1+x)^q]/Γ(q+1), q = a1/2 (+3)
                let q = 0.5 * alpha1 + if self.id == CaseId::AdvH3 { 3.0 } else { 0.0 };
                let inv = 1.0 / crate::specfun::gamma(q + 1.0)?;
                Ok(Some(FunctionSpec::from_terms(vec![
                    SingularTerm::new(-1.0, 1.0, q, 0.0, move |x: f64| {
                        -inv * (-lambda * x).exp()
                    })?,
                    SingularTerm::new(0.0, 1.0, q, 0.0, move |x: f64| {
                        2.0 * inv * (-lambda * x).exp()
                    })?,
                ])?))
            }
            CaseId::AdvSingularRhs => Ok(None),
            CaseId::AdvDterm { m, gamma } => {
                let sigma = m + 0.5 * alpha1 - gamma;
                Ok(Some(FunctionSpec::power_weighted(sigma, 0.0, move |x: f64| {
                    (-lambda * x).exp()
                })?))
            }
            CaseId::DiffMlPoly | CaseId::DiffMlExp => {
                let beta = self.ml_beta(alpha1);
                let g = 1.0;
                Ok(Some(FunctionSpec::power_weighted(beta - 1.0, 0.0, move |x: f64| {
                    (-lambda * x).exp() * mittag_leffler(g, beta, (x + 1.0).powf(g)).unwrap()
                })?))
            }
        }
    }

    /// The load producing the case's exact solution (or, for the
    /// reference-solution case, the prescribed singular load).
    pub fn rhs(&self, alpha1: f64, alpha2: f64, d: f64, lambda: f64) -> Result<FunctionSpec> {
        match self.id {
            CaseId::AdvJump | CaseId::AdvH3 => {
                let q = 0.5 * alpha1 + if self.id == CaseId::AdvH3 { 3.0 } else { 0.0 };
                let mut terms = Vec::new();
                for (order, scale) in [(alpha1, 1.0), (alpha2, d)] {
                    if scale == 0.0 {
                        continue;
                    }
                    // D^{order,λ} of both power pieces shifts q down by order
                    let inv = scale * gamma_ratio(q + 1.0, q + 1.0 - order)
                        / crate::specfun::gamma(q + 1.0)?;
                    terms.push(SingularTerm::new(-1.0, 1.0, q - order, 0.0, move |x: f64| {
                        -inv * (-lambda * x).exp()
                    })?);
                    terms.push(SingularTerm::new(0.0, 1.0, q - order, 0.0, move |x: f64| {
                        2.0 * inv * (-lambda * x).exp()
                    })?);
                }
                FunctionSpec::from_terms(terms)
            }
            CaseId::AdvSingularRhs => {
                FunctionSpec::power_weighted(-0.5 * alpha1 - 0.3, 0.0, |_| 1.0)
            }
            CaseId::AdvDterm { m, gamma } => {
                let sigma = m + 0.5 * alpha1 - gamma;
                let mut terms = Vec::new();
                for (order, scale) in [(alpha1, 1.0), (alpha2, d)] {
                    if scale == 0.0 {
                        continue;
                    }
                    let c = scale * gamma_ratio(sigma + 1.0, sigma + 1.0 - order);
                    terms.push(SingularTerm::new(-1.0, 1.0, sigma - order, 0.0, move |x: f64| {
                        c * (-lambda * x).exp()
                    })?);
                }
                FunctionSpec::from_terms(terms)
            }
            CaseId::DiffMlPoly | CaseId::DiffMlExp => {
                let beta = self.ml_beta(alpha1);
                let g = 1.0;
                let mut terms = Vec::new();
                for (order, scale) in [(alpha1, 1.0), (alpha2, d)] {
                    if scale == 0.0 {
                        continue;
                    }
                    terms.push(SingularTerm::new(
                        -1.0,
                        1.0,
                        beta - 1.0 - order,
                        0.0,
                        move |x: f64| {
                            scale
                                * (-lambda * x).exp()
                                * mittag_leffler(g, beta - order, (x + 1.0).powf(g)).unwrap()
                        },
                    )?);
                }
                FunctionSpec::from_terms(terms)
            }
        }
    }

    /// Right-endpoint boundary datum of the diffusion cases.
    pub fn boundary_datum(&self, alpha1: f64, lambda: f64) -> Result<f64> {
        match self.id {
            CaseId::DiffMlPoly | CaseId::DiffMlExp => {
                let beta = self.ml_beta(alpha1);
                let g = 1.0;
                Ok((-lambda).exp()
                    * 2f64.powf(beta - alpha1)
                    * mittag_leffler(g, beta - alpha1 + 1.0, 2f64.powf(g))?)
            }
            _ => Ok(0.0),
        }
    }

    /// Assemble the full problem for this case.
    pub fn problem(&self, alpha1: f64, alpha2: f64, d: f64, lambda: f64) -> Result<ProblemSpec> {
        let rhs = self.rhs(alpha1, alpha2, d, lambda)?;
        match self.regime() {
            Regime::Advection => ProblemSpec::advection(alpha1, alpha2, d, lambda, rhs),
            Regime::Diffusion => {
                let ub = self.boundary_datum(alpha1, lambda)?;
                ProblemSpec::diffusion(alpha1, alpha2, d, lambda, rhs, ub)
            }
        }
    }
}

/// Per-truncation errors, the fitted rate, and run metadata of one sweep.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub case: String,
    pub alpha1: f64,
    pub alpha2: f64,
    pub d: f64,
    pub lambda: f64,
    /// (N, L2 error), sorted by N.
    pub rows: Vec<(usize, f64)>,
    /// Positive decay rate from the least-squares slope over the largest
    /// four truncations.
    pub fitted_rate: f64,
    /// Seconds per solve, aligned with `rows`.
    pub wall_times: Vec<f64>,
}

/// `‖u_N - u‖_2`, with quadrature panels split at the exact solution's
/// interior breakpoints and the endpoint weight exponents `min(0, 2σ)`
/// absorbing any non-integrable-squared growth.
pub fn l2_error(sol: &SpectralSolution, exact: &FunctionSpec, npts: usize) -> Result<f64> {
    if 2.0 * exact.left_exponent() <= -1.0 {
        return Err(Error::Singularity { exponent: 2.0 * exact.left_exponent(), location: -1.0 });
    }
    if 2.0 * exact.right_exponent() <= -1.0 {
        return Err(Error::Singularity { exponent: 2.0 * exact.right_exponent(), location: 1.0 });
    }
    // panel edges: endpoints plus the exact solution's breakpoints, each
    // edge carrying the exponent absorbed on the adjacent panels
    let mut edges = vec![(-1.0, (2.0 * exact.left_exponent()).min(0.0))];
    for (x, e) in exact.interior_breaks() {
        edges.push((x, (2.0 * e).min(0.0)));
    }
    edges.push((1.0, (2.0 * exact.right_exponent()).min(0.0)));

    let mut total = 0.0;
    for win in edges.windows(2) {
        let (p, b_exp) = win[0];
        let (q, a_exp) = win[1];
        let rule = gauss_jacobi(npts, a_exp, b_exp)?;
        let h = 0.5 * (q - p);
        let mid = 0.5 * (q + p);
        let jac = h.powf(1.0 + a_exp + b_exp);
        let xs: Vec<f64> = rule.nodes().iter().map(|&u| mid + h * u).collect();
        let approx = sol.eval(&xs);
        for (i, (&w, &x)) in rule.weights().iter().zip(&xs).enumerate() {
            let diff = approx[i] - exact.eval(x);
            total += jac * w * diff * diff * (x - p).powf(-b_exp) * (q - x).powf(-a_exp);
        }
    }
    Ok(total.sqrt())
}

/// Positive decay rate: the negated least-squares slope of ln(error)
/// against ln(N).
pub fn fit_rate(rows: &[(usize, f64)]) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 rows, got {}", rows.len())));
    }
    if let Some(&(n, e)) = rows.iter().find(|&&(_, e)| !(e > 0.0)) {
        return Err(Error::DegenerateFit(format!("non-positive error {e} at N = {n}")));
    }
    let pts: Vec<(f64, f64)> =
        rows.iter().map(|&(n, e)| ((n as f64).ln(), e.ln())).collect();
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    Ok(-slope)
}

/// Solve the case at each truncation, measure errors against the exact (or
/// a refined reference) solution, and fit the rate over the largest four
/// truncations.
pub fn run_case(
    case: &ExampleCase,
    alpha1: f64,
    alpha2: f64,
    d: f64,
    lambda: f64,
    ns: &[usize],
) -> Result<ConvergenceReport> {
    if ns.is_empty() {
        return Err(Error::Case("need at least one truncation".to_string()));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let problem = case.problem(alpha1, alpha2, d, lambda).map_err(|e| {
        Error::Case(format!("case {}: {e}", case.label()))
    })?;
    let solve = |n: usize| -> Result<SpectralSolution> {
        match case.regime() {
            Regime::Advection => solve_advection(&problem, n),
            Regime::Diffusion => solve_diffusion(&problem, n),
        }
    };
    let exact = match case.exact(alpha1, alpha2, d, lambda)? {
        Some(spec) => spec,
        None => {
            let n_ref = 2 * ns.last().unwrap();
            solve(n_ref)?.as_function_spec()
        }
    };
    let mut rows = Vec::with_capacity(ns.len());
    let mut wall_times = Vec::with_capacity(ns.len());
    for &n in &ns {
        let started = Instant::now();
        let sol = solve(n)?;
        wall_times.push(started.elapsed().as_secs_f64());
        let npts = (2 * n + 64).max(128);
        let err = l2_error(&sol, &exact, npts)?;
        if !err.is_finite() {
            return Err(Error::Case(format!("non-finite error at N = {n}")));
        }
        rows.push((n, err));
    }
    let tail = &rows[rows.len().saturating_sub(4)..];
    let fitted_rate = fit_rate(tail)?;
    Ok(ConvergenceReport {
        case: case.label(),
        alpha1,
        alpha2,
        d,
        lambda,
        rows,
        fitted_rate,
        wall_times,
    })
}

fn fmt_float(v: f64) -> String {
    // 17 significant digits, enough to round-trip any f64
    format!("{v:.16e}")
}

/// Write reports as RFC-4180 CSV (CRLF line endings, '.' decimals).
pub fn write_csv(reports: &[ConvergenceReport], path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("case,alpha1,alpha2,d,lambda,N,l2_error,rate\r\n");
    for r in reports {
        for &(n, err) in &r.rows {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{}\r\n",
                r.case,
                fmt_float(r.alpha1),
                fmt_float(r.alpha2),
                fmt_float(r.d),
                fmt_float(r.lambda),
                n,
                fmt_float(err),
                fmt_float(r.fitted_rate),
            );
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

const SVG_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Write a log-log error chart: one polyline per report plus a dashed
/// guide segment showing each fitted slope.
pub fn write_svg(reports: &[ConvergenceReport], path: &Path) -> Result<()> {
    let (width, height) = (720.0, 540.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 20.0, 50.0);
    let plot_w = width - ml - mr;
    let plot_h = height - mt - mb;

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in reports {
        for &(n, e) in &r.rows {
            if e > 0.0 {
                xs.push((n as f64).log10());
                ys.push(e.log10());
            }
        }
    }
    let (x_min, x_max) = bounds(&xs, 0.0, 1.0);
    let (y_min, y_max) = bounds(&ys, -1.0, 0.0);
    let to_px = |lx: f64, ly: f64| -> (f64, f64) {
        (
            ml + (lx - x_min) / (x_max - x_min) * plot_w,
            mt + (y_max - ly) / (y_max - y_min) * plot_h,
        )
    };

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" \
         stroke=\"black\"/>"
    );
    // decade ticks on the error axis
    let mut dec = y_min.floor() as i64;
    while (dec as f64) <= y_max.ceil() {
        let ly = dec as f64;
        if ly >= y_min && ly <= y_max {
            let (_, py) = to_px(x_min, ly);
            let _ = write!(
                svg,
                "<line x1=\"{}\" y1=\"{py}\" x2=\"{}\" y2=\"{py}\" stroke=\"#cccccc\"/>\n\
                 <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">1e{dec}</text>\n",
                ml,
                ml + plot_w,
                ml - 6.0,
                py + 4.0
            );
        }
        dec += 1;
    }
    // truncation ticks
    if let Some(r0) = reports.first() {
        for &(n, _) in &r0.rows {
            let (px, _) = to_px((n as f64).log10(), y_min);
            let _ = write!(
                svg,
                "<line x1=\"{px}\" y1=\"{}\" x2=\"{px}\" y2=\"{}\" stroke=\"#cccccc\"/>\n\
                 <text x=\"{px}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{n}</text>\n",
                mt,
                mt + plot_h,
                mt + plot_h + 16.0
            );
        }
    }
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">N</text>\n\
         <text x=\"16\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 16 {})\" \
         text-anchor=\"middle\">L2 error</text>\n",
        ml + plot_w / 2.0,
        height - 12.0,
        mt + plot_h / 2.0,
        mt + plot_h / 2.0
    );

    for (idx, r) in reports.iter().enumerate() {
        let color = SVG_COLORS[idx % SVG_COLORS.len()];
        let mut points = String::new();
        for &(n, e) in &r.rows {
            if e > 0.0 {
                let (px, py) = to_px((n as f64).log10(), e.log10());
                let _ = write!(points, "{px:.2},{py:.2} ");
            }
        }
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            points.trim_end()
        );
        // dashed guide with the fitted slope, anchored below the tail
        if let (Some(&(n0, e0)), Some(&(n1, _))) = (r.rows.first(), r.rows.last()) {
            if e0 > 0.0 {
                let lx0 = (n0 as f64).log10();
                let lx1 = (n1 as f64).log10();
                let ly0 = e0.log10() - 0.4;
                let ly1 = ly0 - r.fitted_rate * (lx1 - lx0);
                let (px0, py0) = to_px(lx0, ly0);
                let (px1, py1) = to_px(lx1, ly1);
                let _ = writeln!(
                    svg,
                    "<line x1=\"{px0:.2}\" y1=\"{py0:.2}\" x2=\"{px1:.2}\" y2=\"{py1:.2}\" \
                     stroke=\"{color}\" stroke-dasharray=\"5,4\" stroke-width=\"1\"/>"
                );
            }
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{} a1={} a2={} d={} \
             (rate {:.2})</text>",
            ml + 10.0,
            mt + 18.0 + 16.0 * idx as f64,
            xml_escape(&r.case),
            r.alpha1,
            r.alpha2,
            r.d,
            r.fitted_rate
        );
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).map_err(|e| Error::io(path.display().to_string(), e))
}

fn bounds(vals: &[f64], fallback_lo: f64, fallback_hi: f64) -> (f64, f64) {
    if vals.is_empty() {
        return (fallback_lo, fallback_hi);
    }
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if (hi - lo).abs() < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo))
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Emit one report to CSV and, optionally, an SVG chart.
pub fn emit_report(r: &ConvergenceReport, csv_path: &Path, svg_path: Option<&Path>) -> Result<()> {
    write_csv(std::slice::from_ref(r), csv_path)?;
    if let Some(svg) = svg_path {
        write_svg(std::slice::from_ref(r), svg)?;
    }
    Ok(())
}
