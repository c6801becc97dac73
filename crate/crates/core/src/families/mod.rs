//! Generators for the classified families, the local chart coefficients and
//! the control surfaces.

pub mod chart;
pub mod curves;
pub mod spec;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use chart::{chart_pde_residuals, prop32_chart, ChartBlock, ChartPdeResiduals, Prop32Chart};
pub use curves::{
    circle, frenet_apparatus, frenet_round_trip, CurveCausality, FnCurve, SpaceCurve, SpacelikeCircle,
    SphericalCurve, TimelikeCircle,
};
pub use spec::{CurveParams, E42Params, FamilySpec, ProfileParams};

use crate::error::{Condition, Error, Result};
use crate::immersion::{Immersion, Rect, StructureCoefficients};
use crate::linalg::{IndefiniteSpace, Vector};
use crate::numerics::{
    cumulative_integral, solve_lode2, Antiderivative, DerivativeFn, Expr, GridSpec, ProductFn, ScalarFn,
    ScalarFn1,
};
use crate::space_forms::SpaceForm;

/// Extra span beyond the chart domain covered by ODE and quadrature grids,
/// so that difference stencils near the boundary stay inside.
pub const GRID_MARGIN: f64 = 1.0;

/// Number of `t` samples in an admissibility scan.
pub const SCAN_SAMPLES: usize = 1001;

/// A condition value counts as vanishing when `|value| <= SCAN_REL_TOL * (1 + sum |terms|)`.
pub const SCAN_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    #[serde(rename = "E42-i")]
    E42I,
    #[serde(rename = "E42-ii")]
    E42Ii,
    #[serde(rename = "S42-trig")]
    S42Trig,
    #[serde(rename = "S42-hyp")]
    S42Hyp,
    #[serde(rename = "S42-curve-timelike")]
    S42CurveTimelike,
    #[serde(rename = "S42-curve-spacelike")]
    S42CurveSpacelike,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 6] = [
        FamilyTag::E42I,
        FamilyTag::E42Ii,
        FamilyTag::S42Trig,
        FamilyTag::S42Hyp,
        FamilyTag::S42CurveTimelike,
        FamilyTag::S42CurveSpacelike,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::E42I => "E42-i",
            FamilyTag::E42Ii => "E42-ii",
            FamilyTag::S42Trig => "S42-trig",
            FamilyTag::S42Hyp => "S42-hyp",
            FamilyTag::S42CurveTimelike => "S42-curve-timelike",
            FamilyTag::S42CurveSpacelike => "S42-curve-spacelike",
        }
    }

    pub fn parse(s: &str) -> Option<FamilyTag> {
        FamilyTag::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// The admissibility condition of the family.
    pub fn condition(self) -> Condition {
        match self {
            FamilyTag::E42I | FamilyTag::E42Ii => Condition::ForcingNonVanishing,
            FamilyTag::S42Trig => Condition::TrigAdmissible,
            FamilyTag::S42Hyp => Condition::HypAdmissible,
            FamilyTag::S42CurveTimelike => Condition::TimelikeCurveAdmissible,
            FamilyTag::S42CurveSpacelike => Condition::SpacelikeCurveAdmissible,
        }
    }

    /// Additional conditions beyond [`FamilyTag::condition`].
    pub fn extra_conditions(self) -> &'static [Condition] {
        match self {
            FamilyTag::S42CurveTimelike | FamilyTag::S42CurveSpacelike => &[Condition::CurvatureNonVanishing],
            _ => &[],
        }
    }

    pub fn form(self) -> SpaceForm {
        match self {
            FamilyTag::E42I | FamilyTag::E42Ii => SpaceForm::FLAT,
            _ => SpaceForm::SPHERE,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FamilyTag::E42I => "E^4_2, b'' - b = F, (s sinh t, s cosh t) slots",
            FamilyTag::E42Ii => "E^4_2, b'' - b = F, (s cosh t, s sinh t) slots",
            FamilyTag::S42Trig => "S^4_2, (b cos s, cos s sinh t, sin s, cos s cosh t, b cos s)",
            FamilyTag::S42Hyp => "S^4_2, (b cosh s, sinh s, cosh s cos t, cosh s sin t, b cosh s)",
            FamilyTag::S42CurveTimelike => "S^4_2 over a timelike arc-length curve in S^2_1",
            FamilyTag::S42CurveSpacelike => "S^4_2 over a spacelike arc-length curve in S^2_1",
        }
    }
}

impl std::fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of sampling an admissibility condition over the `t` span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityScan {
    pub condition: Condition,
    pub message: String,
    pub samples: usize,
    pub t_span: [f64; 2],
    /// Smallest `|value|` seen and where.
    pub min_abs_value: f64,
    pub min_at: f64,
    pub admissible: bool,
}

impl AdmissibilityScan {
    pub fn into_result(self) -> Result<Self> {
        if self.admissible {
            Ok(self)
        } else {
            Err(Error::InadmissibleFamily {
                condition: self.condition,
                t: self.min_at,
                value: self.min_abs_value,
            })
        }
    }
}

/// Samples `value(t) -> (value, sum of |terms|)` at [`SCAN_SAMPLES`] points.
pub fn scan_condition<F>(condition: Condition, span: [f64; 2], value: F) -> Result<AdmissibilityScan>
where
    F: Fn(f64) -> (f64, f64),
{
    let n = SCAN_SAMPLES;
    let mut min_abs = f64::INFINITY;
    let mut min_at = span[0];
    let mut admissible = true;
    let mut first_bad = None;
    for i in 0..n {
        let t = span[0] + (span[1] - span[0]) * i as f64 / (n - 1) as f64;
        let (v, terms) = value(t);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "admissibility condition",
                at: t,
            });
        }
        if v.abs() <= SCAN_REL_TOL * (1.0 + terms) {
            admissible = false;
            first_bad.get_or_insert((t, v.abs()));
        }
        if v.abs() < min_abs {
            min_abs = v.abs();
            min_at = t;
        }
    }
    if let Some((t, v)) = first_bad {
        min_at = t;
        min_abs = v;
    }
    Ok(AdmissibilityScan {
        condition,
        message: condition.as_str().to_string(),
        samples: n,
        t_span: span,
        min_abs_value: min_abs,
        min_at,
        admissible,
    })
}

/// A generated surface with what is known about it in closed form.
#[derive(Debug, Clone)]
pub struct GeneratedSurface {
    pub tag: Option<FamilyTag>,
    pub immersion: Immersion,
    /// Chart coefficients the surface must reproduce.
    pub chart: Option<Prop32Chart>,
    pub scan: Option<AdmissibilityScan>,
}

impl GeneratedSurface {
    pub fn label(&self) -> &str {
        self.immersion.label()
    }

    /// Expected structure coefficients from the chart, see
    /// [`Prop32Chart::expected_structure`].
    pub fn expected_structure(&self, s: f64, t: f64) -> Option<StructureCoefficients> {
        Some(self.chart.as_ref()?.expected_structure(s, t))
    }
}

/// `g'/g`.
struct LogDerivative(ScalarFn1);

impl ScalarFn for LogDerivative {
    fn value(&self, t: f64) -> f64 {
        self.0.derivative(t, 1) / self.0.value(t)
    }
}

fn constant(c: f64) -> ScalarFn1 {
    Expr::constant(c).into_fn()
}

fn span_grid(domain: &Rect, t0: f64) -> Result<GridSpec> {
    GridSpec::with_default_step(
        domain.t[0].min(t0) - GRID_MARGIN,
        domain.t[1].max(t0) + GRID_MARGIN,
    )
}

fn e52(c: [f64; 5]) -> Vector {
    Vector::from_slice(IndefiniteSpace::E52, &c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum E42Kind {
    I,
    Ii,
}

/// The pseudo-Euclidean families: `b'' - b = F` from `(t0, b0, db0)`, and
///
/// kind i: `(b s + int m b', s sinh t + int m cosh, s cosh t + int m sinh, b s + int m b')`,
/// kind ii: the middle slots become `s cosh t + int m sinh`, `s sinh t + int m cosh`.
pub fn make_e42(
    kind: E42Kind,
    m: ScalarFn1,
    forcing: ScalarFn1,
    b_init: (f64, f64),
    t0: Option<f64>,
    domain: Rect,
) -> Result<GeneratedSurface> {
    let t0 = t0.unwrap_or(domain.t[0]);
    let scan = scan_condition(Condition::ForcingNonVanishing, domain.t, |t| {
        let v = forcing.value(t);
        (v, v.abs())
    })?
    .into_result()?;
    let grid = span_grid(&domain, t0)?;
    let b: ScalarFn1 = Arc::new(solve_lode2(1.0, forcing.clone(), t0, b_init.0, b_init.1, grid)?);
    let db: ScalarFn1 = Arc::new(DerivativeFn {
        inner: b.clone(),
        shift: 1,
    });
    let integral = |g: ScalarFn1| -> Result<Antiderivative> {
        cumulative_integral(Arc::new(ProductFn(m.clone(), g)), t0, grid)
    };
    let i1 = integral(db)?;
    let i2 = integral(Expr::named("cosh").expect("builtin").into_fn())?;
    let i3 = integral(Expr::named("sinh").expect("builtin").into_fn())?;
    let (tag, eps) = match kind {
        E42Kind::I => (FamilyTag::E42I, 1.0),
        E42Kind::Ii => (FamilyTag::E42Ii, -1.0),
    };
    let bb = b.clone();
    let map = move |s: f64, t: f64| {
        let x = bb.value(t) * s + i1.value(t);
        let (sh, ch) = (s * t.sinh() + i2.value(t), s * t.cosh() + i3.value(t));
        let (y, z) = match kind {
            E42Kind::I => (sh, ch),
            E42Kind::Ii => (s * t.cosh() + i3.value(t), s * t.sinh() + i2.value(t)),
        };
        Vector::from_slice(IndefiniteSpace::E42, &[x, y, z, x])
    };
    let mm = m.clone();
    let immersion = Immersion::from_fn(map, SpaceForm::FLAT, domain)
        .with_label(tag.as_str())
        .with_singular_locus("s + m(t)", move |s, t| s + mm.value(t));
    let gamma0: ScalarFn1 = Arc::new(LogDerivative(forcing));
    let chart = prop32_chart(0, eps, constant(1.0), m, gamma0)?;
    Ok(GeneratedSurface {
        tag: Some(tag),
        immersion,
        chart: Some(chart),
        scan: Some(scan),
    })
}

/// `b'' - b` (trigonometric) or `b'' + b` (hyperbolic).
struct Profile {
    b: ScalarFn1,
    sign: f64,
}

impl ScalarFn for Profile {
    fn value(&self, t: f64) -> f64 {
        self.b.derivative(t, 2) + self.sign * self.b.value(t)
    }

    fn derivative(&self, t: f64, order: u32) -> f64 {
        self.b.derivative(t, order + 2) + self.sign * self.b.derivative(t, order)
    }
}

/// `(b cos s, cos s sinh t, sin s, cos s cosh t, b cos s)` in S^4_2; needs `b'' - b != 0`.
pub fn make_s42_trig(b: ScalarFn1, domain: Rect) -> Result<GeneratedSurface> {
    let profile = Profile {
        b: b.clone(),
        sign: -1.0,
    };
    let scan = scan_condition(Condition::TrigAdmissible, domain.t, |t| {
        let (d2, v) = (b.derivative(t, 2), b.value(t));
        (d2 - v, d2.abs() + v.abs())
    })?
    .into_result()?;
    let bb = b.clone();
    let map = move |s: f64, t: f64| {
        let (c, sn) = (s.cos(), s.sin());
        let bc = bb.value(t) * c;
        e52([bc, c * t.sinh(), sn, c * t.cosh(), bc])
    };
    let immersion = Immersion::from_fn(map, SpaceForm::SPHERE, domain)
        .with_label(FamilyTag::S42Trig.as_str())
        .with_singular_locus("cos s", |s, _| s.cos());
    let gamma0: ScalarFn1 = Arc::new(LogDerivative(Arc::new(profile)));
    let chart = prop32_chart(1, 1.0, constant(1.0), constant(0.0), gamma0)?;
    Ok(GeneratedSurface {
        tag: Some(FamilyTag::S42Trig),
        immersion,
        chart: Some(chart),
        scan: Some(scan),
    })
}

/// `(b cosh s, sinh s, cosh s cos t, cosh s sin t, b cosh s)` in S^4_2; needs `b'' + b != 0`.
pub fn make_s42_hyp(b: ScalarFn1, domain: Rect) -> Result<GeneratedSurface> {
    let profile = Profile {
        b: b.clone(),
        sign: 1.0,
    };
    let scan = scan_condition(Condition::HypAdmissible, domain.t, |t| {
        let (d2, v) = (b.derivative(t, 2), b.value(t));
        (d2 + v, d2.abs() + v.abs())
    })?
    .into_result()?;
    let bb = b.clone();
    let map = move |s: f64, t: f64| {
        let (c, sn) = (s.cosh(), s.sinh());
        let bc = bb.value(t) * c;
        e52([bc, sn, c * t.cos(), c * t.sin(), bc])
    };
    let immersion = Immersion::from_fn(map, SpaceForm::SPHERE, domain).with_label(FamilyTag::S42Hyp.as_str());
    let gamma0: ScalarFn1 = Arc::new(LogDerivative(Arc::new(profile)));
    let chart = prop32_chart(1, -1.0, constant(1.0), constant(0.0), gamma0)?;
    Ok(GeneratedSurface {
        tag: Some(FamilyTag::S42Hyp),
        immersion,
        chart: Some(chart),
        scan: Some(scan),
    })
}

/// `b'' - kappa int kappa b' -+ b` for the timelike (`sign = -1`) or
/// spacelike (`sign = +1`) curve family.
struct CurveProfile {
    b: ScalarFn1,
    curve: SphericalCurve,
    integral: Antiderivative,
    sign: f64,
}

impl CurveProfile {
    fn terms(&self, t: f64) -> [f64; 3] {
        [
            self.b.derivative(t, 2),
            -self.curve.kappa(t) * self.integral.value(t),
            self.sign * self.b.value(t),
        ]
    }
}

impl ScalarFn for CurveProfile {
    fn value(&self, t: f64) -> f64 {
        self.terms(t).iter().sum()
    }

    fn derivative(&self, t: f64, order: u32) -> f64 {
        if order != 1 {
            return crate::numerics::functions::fd_derivative(|x| self.value(x), t, order);
        }
        let kappa = self.curve.kappa(t);
        let dkappa = self.curve.kappa_fn().derivative(t, 1);
        self.b.derivative(t, 3) - dkappa * self.integral.value(t) - kappa * kappa * self.b.derivative(t, 1)
            + self.sign * self.b.derivative(t, 1)
    }
}

/// Surfaces over an arc-length curve `alpha` on S^2_1 with normal `N`:
///
/// timelike: `cos s (b, alpha, b) + sin s (I, N, I)`,
/// spacelike: `cosh s (b, alpha, b) + eps sinh s (I, N, I)`,
///
/// with `I = int_{t0}^t kappa b'`.
pub fn make_s42_curve(
    curve: SphericalCurve,
    b: ScalarFn1,
    eps_sign: f64,
    t0: Option<f64>,
    domain: Rect,
) -> Result<GeneratedSurface> {
    if eps_sign != 1.0 && eps_sign != -1.0 {
        return Err(Error::InvalidParameter(format!(
            "eps must be +1 or -1, got {eps_sign}"
        )));
    }
    let t0 = t0.unwrap_or(domain.t[0]);
    let causal = curve.causal();
    let (tag, condition, sign) = match causal {
        CurveCausality::Timelike => (
            FamilyTag::S42CurveTimelike,
            Condition::TimelikeCurveAdmissible,
            -1.0,
        ),
        CurveCausality::Spacelike => (
            FamilyTag::S42CurveSpacelike,
            Condition::SpacelikeCurveAdmissible,
            1.0,
        ),
    };
    let kappa = curve.kappa_fn();
    let grid = span_grid(&domain, t0)?;
    let db: ScalarFn1 = Arc::new(DerivativeFn {
        inner: b.clone(),
        shift: 1,
    });
    let integral = cumulative_integral(Arc::new(ProductFn(kappa.clone(), db)), t0, grid)?;

    scan_condition(Condition::CurvatureNonVanishing, domain.t, |t| {
        (kappa.value(t), 0.0)
    })?
    .into_result()
    .map_err(|e| match e {
        Error::InadmissibleFamily { t, value, .. } => Error::VanishingCurvature { t, kappa: value },
        other => other,
    })?;
    let profile = CurveProfile {
        b: b.clone(),
        curve: curve.clone(),
        integral: integral.clone(),
        sign,
    };
    let scan = scan_condition(condition, domain.t, |t| {
        let terms = profile.terms(t);
        (terms.iter().sum(), terms.iter().map(|x| x.abs()).sum())
    })?
    .into_result()?;

    let (c2, bb, ii) = (curve.clone(), b.clone(), integral.clone());
    let map = move |s: f64, t: f64| {
        let (p, q) = match causal {
            CurveCausality::Timelike => (s.cos(), s.sin()),
            CurveCausality::Spacelike => (s.cosh(), eps_sign * s.sinh()),
        };
        let a = c2.alpha(t);
        let n = c2.normal(t);
        let (bv, iv) = (bb.value(t), ii.value(t));
        let x = p * bv + q * iv;
        e52([
            x,
            p * a[0] + q * n[0],
            p * a[1] + q * n[1],
            p * a[2] + q * n[2],
            x,
        ])
    };
    let k2 = kappa.clone();
    let immersion = Immersion::from_fn(map, SpaceForm::SPHERE, domain).with_label(tag.as_str());
    let immersion = match causal {
        CurveCausality::Timelike => immersion.with_singular_locus("kappa(t) sin s + cos s", move |s, t| {
            k2.value(t) * s.sin() + s.cos()
        }),
        CurveCausality::Spacelike => immersion
            .with_singular_locus("cosh s + eps kappa(t) sinh s", move |s, t| {
                s.cosh() + eps_sign * k2.value(t) * s.sinh()
            }),
    };

    // Chart identification: phi equals the conformal factor above.
    let (eps, a, m): (f64, ScalarFn1, ScalarFn1) = match causal {
        CurveCausality::Timelike => {
            let k = kappa.clone();
            let a = crate::numerics::scalar_fn(move |t| (1.0 + k.value(t).powi(2)).sqrt());
            let k = kappa.clone();
            let m = crate::numerics::scalar_fn(move |t| -k.value(t).atan());
            (1.0, a, m)
        }
        CurveCausality::Spacelike => {
            let k = kappa.clone();
            if let Some(t) = sample_points(domain.t).find(|&t| (eps_sign * k.value(t)).abs() >= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "spacelike curve needs |kappa| < 1 for the chart identification (t = {t})"
                )));
            }
            let a = crate::numerics::scalar_fn(move |t| (1.0 - k.value(t).powi(2)).sqrt());
            let k = kappa.clone();
            let m = crate::numerics::scalar_fn(move |t| (eps_sign * k.value(t)).atanh());
            (-1.0, a, m)
        }
    };
    // gamma0 = (F'/F - A'/A) / A.
    let aa = a.clone();
    let p2 = Arc::new(profile);
    let gamma0 = crate::numerics::scalar_fn(move |t| {
        let a = aa.value(t);
        (p2.derivative(t, 1) / p2.value(t) - aa.derivative(t, 1) / a) / a
    });
    let chart = prop32_chart(1, eps, a, m, gamma0)?;
    Ok(GeneratedSurface {
        tag: Some(tag),
        immersion,
        chart: Some(chart),
        scan: Some(scan),
    })
}

fn sample_points(span: [f64; 2]) -> impl Iterator<Item = f64> {
    (0..SCAN_SAMPLES).map(move |i| span[0] + (span[1] - span[0]) * i as f64 / (SCAN_SAMPLES - 1) as f64)
}

/// The totally geodesic plane `(0, 0, s, t)` in E^4_2.
pub fn control_flat_plane(domain: Rect) -> GeneratedSurface {
    let immersion = Immersion::from_fn(
        |s, t| Vector::from_slice(IndefiniteSpace::E42, &[0.0, 0.0, s, t]),
        SpaceForm::FLAT,
        domain,
    )
    .with_label("control-flat-plane");
    GeneratedSurface {
        tag: None,
        immersion,
        chart: None,
        scan: None,
    }
}

/// The graph `(0, s t, s, t)` in E^4_2, which has no relative nullity.
pub fn control_graph(domain: Rect) -> GeneratedSurface {
    let immersion = Immersion::from_fn(
        |s, t| Vector::from_slice(IndefiniteSpace::E42, &[0.0, s * t, s, t]),
        SpaceForm::FLAT,
        domain,
    )
    .with_label("control-graph");
    GeneratedSurface {
        tag: None,
        immersion,
        chart: None,
        scan: None,
    }
}
