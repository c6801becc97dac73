//! Grid certification of quasi-minimality, relative nullity, the adapted
//! frame, the curvature equations and the chart coefficients.

pub mod convergence;
pub mod curvature;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use convergence::{
    convergence_study, ode_order, residual_orders, ConvergenceReport, OdeProblem, OrderEstimate,
    ODE_COARSE_STEP, ODE_MIN_ORDER, RESIDUAL_COARSE_STEP, RESIDUAL_MIN_ORDER, RESIDUAL_NOISE_FLOOR,
};
pub use curvature::{curvature_residuals, curvature_residuals_with_step, CurvatureResiduals, CURVATURE_STEP};

use crate::error::{Error, Result};
use crate::families::{chart_pde_residuals, ChartPdeResiduals, GeneratedSurface, Prop32Chart};
use crate::immersion::{
    frame_of, fundamental_data, null_space_of, structure_coefficients, FrameResiduals, FrameTolerances,
    Immersion, Rect, StructureCoefficients,
};
use crate::linalg::{causal_character, CausalCharacter};

/// Thresholds for every certified property.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative light-like test on `H`.
    pub lightlike: f64,
    /// `H` must exceed this in Euclidean norm.
    pub nonzero: f64,
    /// Adapted-frame relations.
    pub frame: f64,
    /// Gauss, Codazzi and Ricci residuals.
    pub residual: f64,
    /// Measured vs closed-form `phi`, `omega`, `gamma` (relative to `max(1, |expected|)`).
    pub structure: f64,
    /// Intrinsic chart PDEs.
    pub pde: f64,
    pub on_form: f64,
    /// Grid points with a singular-locus value at most this are skipped.
    pub singular_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lightlike: 1e-6,
            nonzero: 1e-6,
            frame: 1e-6,
            residual: 1e-4,
            structure: 1e-5,
            pde: 1e-6,
            on_form: crate::space_forms::ON_FORM_TOL,
            singular_margin: 0.05,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("lightlike", self.lightlike),
            ("nonzero", self.nonzero),
            ("frame", self.frame),
            ("residual", self.residual),
            ("structure", self.structure),
            ("pde", self.pde),
            ("on_form", self.on_form),
            ("singular_margin", self.singular_margin),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "tolerance `{name}` must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn frame_tolerances(&self) -> FrameTolerances {
        FrameTolerances {
            lightlike: self.lightlike,
            nonzero: self.nonzero,
        }
    }
}

/// `ns x nt` nodes spanning a rectangle, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct Grid2D {
    pub ns: usize,
    pub nt: usize,
}

impl Grid2D {
    pub fn new(ns: usize, nt: usize) -> Result<Self> {
        if ns < 2 || nt < 2 {
            return Err(Error::Config(format!(
                "grid {ns}x{nt} needs at least 2 nodes per axis"
            )));
        }
        Ok(Grid2D { ns, nt })
    }

    pub fn len(&self) -> usize {
        self.ns * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axis(range: [f64; 2], n: usize, k: usize) -> f64 {
        if k + 1 == n {
            range[1]
        } else {
            range[0] + (range[1] - range[0]) * k as f64 / (n - 1) as f64
        }
    }

    /// Nodes in row-major order: `s` outer, `t` inner.
    pub fn nodes(&self, domain: &Rect) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.ns {
            for j in 0..self.nt {
                out.push([Self::axis(domain.s, self.ns, i), Self::axis(domain.t, self.nt, j)]);
            }
        }
        out
    }

    /// Nodes nearest the quarter points of each axis (up to 9 points).
    pub fn probe_nodes(&self, domain: &Rect) -> Vec<[f64; 2]> {
        let pick = |n: usize| {
            let mut v: Vec<usize> = [0.25, 0.5, 0.75]
                .iter()
                .map(|q| (q * (n - 1) as f64).round() as usize)
                .collect();
            v.dedup();
            v
        };
        let mut out = Vec::new();
        for i in pick(self.ns) {
            for j in pick(self.nt) {
                out.push([Self::axis(domain.s, self.ns, i), Self::axis(domain.t, self.nt, j)]);
            }
        }
        out
    }
}

impl TryFrom<[usize; 2]> for Grid2D {
    type Error = Error;
    fn try_from(v: [usize; 2]) -> Result<Self> {
        Grid2D::new(v[0], v[1])
    }
}

impl From<Grid2D> for [usize; 2] {
    fn from(g: Grid2D) -> Self {
        [g.ns, g.nt]
    }
}

impl FromStr for Grid2D {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("grid must look like NxM, got `{s}`"));
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        Grid2D::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )
    }
}

impl fmt::Display for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.ns, self.nt)
    }
}

/// One certified property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    QuasiMinimal,
    PositiveRelativeNullity,
    LemmaFrame,
    CurvatureEquations,
    StructureCoefficients,
    IntrinsicPde,
    OnForm,
}

impl Check {
    pub fn as_str(self) -> &'static str {
        match self {
            Check::QuasiMinimal => "quasi_minimal",
            Check::PositiveRelativeNullity => "positive_relative_nullity",
            Check::LemmaFrame => "lemma_frame",
            Check::CurvatureEquations => "curvature_equations",
            Check::StructureCoefficients => "structure_coefficients",
            Check::IntrinsicPde => "intrinsic_pde",
            Check::OnForm => "on_form",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureCheck {
    pub measured: StructureCoefficients,
    pub expected: StructureCoefficients,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub check: Check,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub s: f64,
    pub t: f64,
    pub mean_curvature: Option<Vec<f64>>,
    pub h_causal: Option<CausalCharacter>,
    pub h_norm: Option<f64>,
    /// `|<H, H>| / |H|^2` (Euclidean denominator).
    pub h_lightlike_defect: Option<f64>,
    pub nullity: Option<usize>,
    pub frame: Option<FrameResiduals>,
    pub structure: Option<StructureCheck>,
    pub curvature: Option<CurvatureResiduals>,
    pub pde: Option<ChartPdeResiduals>,
    pub on_form_residual: f64,
    pub failures: Vec<Failure>,
}

impl PointRecord {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, check: Check, reason: impl Into<String>) {
        self.failures.push(Failure {
            check,
            reason: reason.into(),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub s: f64,
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyVerdict {
    pub check: Check,
    pub pass: bool,
    pub checked: usize,
    pub failed: usize,
    /// Largest residual of the property over evaluated points (for
    /// quasi-minimality: the relative light-like defect of `H`).
    pub max_residual: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullitySummary {
    pub min: usize,
    pub max: usize,
    pub exactly_one: bool,
    /// Points with a two-dimensional null space: positive nullity, but not
    /// compatible with quasi-minimality.
    pub degenerate_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub label: String,
    pub form: &'static str,
    pub domain: Rect,
    pub grid: Grid2D,
    pub tolerances: Tolerances,
    pub pass: bool,
    pub properties: Vec<PropertyVerdict>,
    pub nullity: Option<NullitySummary>,
    pub skipped: Vec<SkippedPoint>,
    pub points: Vec<PointRecord>,
    pub convergence: Option<ConvergenceReport>,
}

impl CertificationReport {
    pub fn property(&self, check: Check) -> Option<&PropertyVerdict> {
        self.properties.iter().find(|p| p.check == check)
    }

    /// Attaches a convergence study; the report passes only if it does.
    pub fn with_convergence(mut self, study: ConvergenceReport) -> Self {
        self.pass &= study.pass;
        self.convergence = Some(study);
        self
    }

    /// One line per property.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for p in &self.properties {
            out.push_str(&format!(
                "{:<26} {}  checked {:>4}  failed {:>4}",
                p.check.as_str(),
                if p.pass { "PASS" } else { "FAIL" },
                p.checked,
                p.failed
            ));
            if let Some(r) = p.max_residual {
                out.push_str(&format!("  max {r:.3e}"));
            }
            if let Some(n) = &p.note {
                out.push_str(&format!("  ({n})"));
            }
            out.push('\n');
        }
        if let Some(c) = &self.convergence {
            let fmt_order = |e: &OrderEstimate| match e.order {
                Some(p) => format!("{p:.2}"),
                None => "noise floor".into(),
            };
            out.push_str(&format!(
                "convergence order {:<16} {} (required >= {}) {}\n",
                "ode",
                fmt_order(&c.ode),
                c.ode.required,
                if c.ode.pass { "PASS" } else { "FAIL" }
            ));
            for r in &c.residuals {
                out.push_str(&format!(
                    "convergence order {:<16} {} (required >= {}) {}\n",
                    r.quantity,
                    fmt_order(r),
                    r.required,
                    if r.pass { "PASS" } else { "FAIL" }
                ));
            }
        }
        out.push_str(&format!(
            "{}: {} ({} points, {} skipped)\n",
            self.label,
            if self.pass { "PASS" } else { "FAIL" },
            self.points.len(),
            self.skipped.len()
        ));
        out
    }
}

enum Outcome {
    Skipped(SkippedPoint),
    Evaluated(Box<PointRecord>),
}

fn evaluate_point(
    f: &Immersion,
    chart: Option<&Prop32Chart>,
    [s, t]: [f64; 2],
    tol: &Tolerances,
    checks: &[Check],
) -> Outcome {
    if let Some(reason) = f.singular_reason(s, t, tol.singular_margin) {
        return Outcome::Skipped(SkippedPoint { s, t, reason });
    }
    let wants = |c: Check| checks.contains(&c);
    let mut rec = PointRecord {
        s,
        t,
        mean_curvature: None,
        h_causal: None,
        h_norm: None,
        h_lightlike_defect: None,
        nullity: None,
        frame: None,
        structure: None,
        curvature: None,
        pde: None,
        on_form_residual: f.on_form_residual(s, t),
        failures: Vec::new(),
    };
    if wants(Check::OnForm) && !(rec.on_form_residual <= tol.on_form) {
        let r = rec.on_form_residual;
        rec.fail(Check::OnForm, format!("quadric drift {r:e}"));
    }
    if let Some(chart) = chart.filter(|_| wants(Check::IntrinsicPde)) {
        let r = chart_pde_residuals(chart, s, t);
        if !(r.max() <= tol.pde) {
            rec.fail(Check::IntrinsicPde, format!("chart PDE residual {:e}", r.max()));
        }
        rec.pde = Some(r);
    }
    let needs_data = [
        Check::QuasiMinimal,
        Check::PositiveRelativeNullity,
        Check::LemmaFrame,
        Check::StructureCoefficients,
    ]
    .into_iter()
    .any(wants);
    if needs_data {
        match fundamental_data(f, s, t) {
            Err(e) => {
                for c in [
                    Check::QuasiMinimal,
                    Check::PositiveRelativeNullity,
                    Check::LemmaFrame,
                    Check::StructureCoefficients,
                ] {
                    if wants(c) {
                        rec.fail(c, e.to_string());
                    }
                }
            }
            Ok(data) => {
                let h = data.mean_curvature;
                let causal = causal_character(&h, tol.lightlike);
                rec.mean_curvature = Some(h.coords().to_vec());
                rec.h_causal = Some(causal);
                rec.h_norm = Some(h.euclid_norm());
                let n2 = h.euclid_norm_sq();
                rec.h_lightlike_defect = (n2 > 0.0).then(|| h.self_pairing().abs() / n2);
                if wants(Check::QuasiMinimal) {
                    if causal == CausalCharacter::Zero {
                        rec.fail(Check::QuasiMinimal, "H = 0");
                    } else if causal != CausalCharacter::Lightlike {
                        rec.fail(Check::QuasiMinimal, format!("H is {causal:?}"));
                    } else if !(h.euclid_norm() > tol.nonzero) {
                        rec.fail(Check::QuasiMinimal, "H = 0");
                    }
                }
                match null_space_of(&data) {
                    Ok(ns) => {
                        rec.nullity = Some(ns.dimension);
                        if wants(Check::PositiveRelativeNullity) && ns.dimension == 0 {
                            rec.fail(Check::PositiveRelativeNullity, "relative null space is trivial");
                        }
                    }
                    Err(e) if wants(Check::PositiveRelativeNullity) => {
                        rec.fail(Check::PositiveRelativeNullity, e.to_string())
                    }
                    Err(_) => {}
                }
                if wants(Check::LemmaFrame) || wants(Check::StructureCoefficients) {
                    match frame_of(&data, &tol.frame_tolerances()) {
                        Err(e) => {
                            for c in [Check::LemmaFrame, Check::StructureCoefficients] {
                                if wants(c) {
                                    rec.fail(c, format!("no adapted frame: {e}"));
                                }
                            }
                        }
                        Ok(frame) => {
                            rec.frame = Some(frame.residuals);
                            if wants(Check::LemmaFrame) && !(frame.residuals.max() <= tol.frame) {
                                rec.fail(
                                    Check::LemmaFrame,
                                    format!("frame relation residual {:e}", frame.residuals.max()),
                                );
                            }
                            if let Some(chart) = chart.filter(|_| wants(Check::StructureCoefficients)) {
                                check_structure(f, chart, &frame, tol, &mut rec);
                            }
                        }
                    }
                }
            }
        }
    }
    if wants(Check::CurvatureEquations) {
        match curvature_residuals(f, s, t) {
            Ok(r) => {
                if !(r.max() <= tol.residual) {
                    rec.fail(
                        Check::CurvatureEquations,
                        format!("curvature residual {:e}", r.max()),
                    );
                }
                rec.curvature = Some(r);
            }
            Err(e) => rec.fail(Check::CurvatureEquations, e.to_string()),
        }
    }
    Outcome::Evaluated(Box::new(rec))
}

fn check_structure(
    f: &Immersion,
    chart: &Prop32Chart,
    frame: &crate::immersion::AdaptedFrame,
    tol: &Tolerances,
    rec: &mut PointRecord,
) {
    let [s, t] = frame.point;
    match structure_coefficients(f, frame) {
        Ok(measured) => {
            let expected = chart.expected_structure(s, t);
            let rel = |m: f64, e: f64| (m - e).abs() / e.abs().max(1.0);
            let error = rel(measured.phi, expected.phi)
                .max(rel(measured.omega, expected.omega))
                .max(rel(measured.gamma, expected.gamma));
            if !(error <= tol.structure) {
                rec.fail(
                    Check::StructureCoefficients,
                    format!("structure mismatch {error:e}"),
                );
            }
            rec.structure = Some(StructureCheck {
                measured,
                expected,
                error,
            });
        }
        Err(e) => rec.fail(Check::StructureCoefficients, e.to_string()),
    }
}

fn verdict(check: Check, points: &[PointRecord]) -> PropertyVerdict {
    let failed = points
        .iter()
        .filter(|p| p.failures.iter().any(|x| x.check == check))
        .count();
    let fold = |it: &mut dyn Iterator<Item = f64>| {
        it.fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
    };
    let max_residual = match check {
        Check::QuasiMinimal => fold(&mut points.iter().filter_map(|p| p.h_lightlike_defect)),
        Check::PositiveRelativeNullity => None,
        Check::LemmaFrame => fold(&mut points.iter().filter_map(|p| Some(p.frame?.max()))),
        Check::CurvatureEquations => fold(&mut points.iter().filter_map(|p| Some(p.curvature?.max()))),
        Check::StructureCoefficients => fold(&mut points.iter().filter_map(|p| Some(p.structure?.error))),
        Check::IntrinsicPde => fold(&mut points.iter().filter_map(|p| Some(p.pde?.max()))),
        Check::OnForm => fold(&mut points.iter().map(|p| p.on_form_residual)),
    };
    let note = match check {
        Check::QuasiMinimal => {
            let min = points
                .iter()
                .filter_map(|p| p.h_norm)
                .fold(f64::INFINITY, f64::min);
            min.is_finite().then(|| format!("min |H| = {min:.3e}"))
        }
        _ => None,
    };
    let checked = points.len();
    PropertyVerdict {
        check,
        pass: failed == 0 && checked > 0,
        checked,
        failed,
        max_residual,
        note: if checked == 0 {
            Some("no admissible points".into())
        } else {
            note
        },
    }
}

fn nullity_summary(points: &[PointRecord]) -> Option<NullitySummary> {
    let dims: Vec<usize> = points.iter().filter_map(|p| p.nullity).collect();
    let min = *dims.iter().min()?;
    let max = *dims.iter().max()?;
    Some(NullitySummary {
        min,
        max,
        exactly_one: min == 1 && max == 1 && dims.len() == points.len(),
        degenerate_points: dims.iter().filter(|&&d| d == 2).count(),
    })
}

/// Certifies `checks` at every node of `grid` over the immersion's domain.
pub fn certify(
    f: &Immersion,
    chart: Option<&Prop32Chart>,
    grid: Grid2D,
    tol: &Tolerances,
    checks: &[Check],
) -> CertificationReport {
    let domain = f.domain();
    let outcomes: Vec<Outcome> = grid
        .nodes(&domain)
        .into_par_iter()
        .map(|p| evaluate_point(f, chart, p, tol, checks))
        .collect();
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Skipped(s) => skipped.push(s),
            Outcome::Evaluated(r) => points.push(*r),
        }
    }
    let properties: Vec<PropertyVerdict> = checks.iter().map(|&c| verdict(c, &points)).collect();
    let nullity = nullity_summary(&points);
    CertificationReport {
        label: f.label().to_string(),
        form: f.form().name(),
        domain,
        grid,
        tolerances: *tol,
        pass: properties.iter().all(|p| p.pass),
        properties,
        nullity,
        skipped,
        points,
        convergence: None,
    }
}

/// `H` light-like and nonzero at every admissible node.
pub fn certify_quasi_minimal(f: &Immersion, grid: Grid2D, tol: &Tolerances) -> CertificationReport {
    certify(f, None, grid, tol, &[Check::QuasiMinimal])
}

/// Relative null space of dimension at least one at every admissible node.
pub fn certify_positive_relative_nullity(
    f: &Immersion,
    grid: Grid2D,
    tol: &Tolerances,
) -> CertificationReport {
    certify(f, None, grid, tol, &[Check::PositiveRelativeNullity])
}

/// Adapted frame exists and satisfies its relations at every admissible node.
pub fn certify_lemma_frame(f: &Immersion, grid: Grid2D, tol: &Tolerances) -> CertificationReport {
    certify(f, None, grid, tol, &[Check::LemmaFrame])
}

/// Gauss, Codazzi and Ricci residuals at every admissible node.
pub fn certify_curvature(f: &Immersion, grid: Grid2D, tol: &Tolerances) -> CertificationReport {
    certify(f, None, grid, tol, &[Check::CurvatureEquations])
}

/// The checks that apply to `f` (and to its chart, when given).
pub fn applicable_checks(f: &Immersion, chart: Option<&Prop32Chart>) -> Vec<Check> {
    let mut checks = vec![
        Check::QuasiMinimal,
        Check::PositiveRelativeNullity,
        Check::LemmaFrame,
        Check::CurvatureEquations,
    ];
    if chart.is_some() {
        checks.extend([Check::StructureCoefficients, Check::IntrinsicPde]);
    }
    if f.form().curvature() != 0 {
        checks.push(Check::OnForm);
    }
    checks
}

/// Every applicable check on a generated surface.
pub fn certify_surface(surface: &GeneratedSurface, grid: Grid2D, tol: &Tolerances) -> CertificationReport {
    let chart = surface.chart.as_ref();
    let checks = applicable_checks(&surface.immersion, chart);
    certify(&surface.immersion, chart, grid, tol, &checks)
}
