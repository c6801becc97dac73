//! Pointwise extrinsic geometry of a surface chart: fundamental forms, mean
//! curvature, relative null space, the adapted frame and its connection
//! coefficients.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    causal_character, kernel_with_floor, lightlike_partner_tol, orthogonal_component, CausalCharacter,
    Vector, RANK_TOL,
};
use crate::numerics::partial_derivs;
use crate::space_forms::{intrinsic_second_fundamental_form, AmbientPoint, SpaceForm};

/// Chart map into flat ambient coordinates.
pub type ChartMap = Arc<dyn Fn(f64, f64) -> Vector + Send + Sync>;

/// Scalar function on the chart whose zero set is excluded.
pub type LocusFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `|det g|` below this fraction of `|f_s|^2 |f_t|^2` counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Singular values of the stacked second fundamental form below this are
/// zero regardless of the largest one.
pub const NULLITY_FLOOR: f64 = 1e-7;

/// Closed chart rectangle `[s0, s1] x [t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub s: [f64; 2],
    pub t: [f64; 2],
}

impl Rect {
    pub fn new(s: [f64; 2], t: [f64; 2]) -> Result<Self> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if !ok(s) || !ok(t) {
            return Err(Error::InvalidParameter(format!(
                "domain {s:?} x {t:?} must be a non-empty finite rectangle"
            )));
        }
        Ok(Self { s, t })
    }

    pub fn contains(&self, s: f64, t: f64) -> bool {
        s >= self.s[0] && s <= self.s[1] && t >= self.t[0] && t <= self.t[1]
    }

    /// Largest side length, at least 1.
    pub fn scale(&self) -> f64 {
        (self.s[1] - self.s[0]).max(self.t[1] - self.t[0]).max(1.0)
    }
}

/// A named excluded set `{ value(s, t) = 0 }`.
#[derive(Clone)]
pub struct SingularLocus {
    pub label: String,
    pub value: LocusFn,
}

impl fmt::Debug for SingularLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SingularLocus({})", self.label)
    }
}

/// A surface chart into one of the space forms.
#[derive(Clone)]
pub struct Immersion {
    map: ChartMap,
    form: SpaceForm,
    domain: Rect,
    loci: Vec<SingularLocus>,
    label: String,
}

impl fmt::Debug for Immersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Immersion")
            .field("label", &self.label)
            .field("form", &self.form.name())
            .field("domain", &self.domain)
            .field("loci", &self.loci)
            .finish()
    }
}

impl Immersion {
    pub fn new(map: ChartMap, form: SpaceForm, domain: Rect) -> Self {
        Self {
            map,
            form,
            domain,
            loci: Vec::new(),
            label: String::from("surface"),
        }
    }

    pub fn from_fn<F>(f: F, form: SpaceForm, domain: Rect) -> Self
    where
        F: Fn(f64, f64) -> Vector + Send + Sync + 'static,
    {
        Self::new(Arc::new(f), form, domain)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_singular_locus<F>(mut self, label: impl Into<String>, value: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.loci.push(SingularLocus {
            label: label.into(),
            value: Arc::new(value),
        });
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn form(&self) -> SpaceForm {
        self.form
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn singular_loci(&self) -> &[SingularLocus] {
        &self.loci
    }

    pub fn map(&self) -> &ChartMap {
        &self.map
    }

    pub fn eval(&self, s: f64, t: f64) -> Vector {
        (self.map)(s, t)
    }

    /// Label of the first singular locus with `|value| <= margin` at `(s, t)`.
    pub fn singular_reason(&self, s: f64, t: f64, margin: f64) -> Option<String> {
        self.loci.iter().find_map(|l| {
            let v = (l.value)(s, t);
            (!v.is_finite() || v.abs() <= margin).then(|| format!("{} = 0", l.label))
        })
    }

    fn check_point(&self, s: f64, t: f64) -> Result<()> {
        if let Some(reason) = self.singular_reason(s, t, 1e-9) {
            return Err(Error::SingularPoint { s, t, reason });
        }
        Ok(())
    }

    /// Quadric drift `|<f, f> - target|` at `(s, t)`.
    pub fn on_form_residual(&self, s: f64, t: f64) -> f64 {
        self.form.constraint_residual(&self.eval(s, t))
    }
}

/// First- and second-order extrinsic data at one chart point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FundamentalData {
    pub point: [f64; 2],
    #[serde(skip)]
    pub position: Vector,
    #[serde(skip)]
    pub fs: Vector,
    #[serde(skip)]
    pub ft: Vector,
    /// `[[g_ss, g_st], [g_st, g_tt]]`.
    pub metric: [[f64; 2]; 2],
    /// `alpha_ss, alpha_st, alpha_tt` in the space form.
    #[serde(skip)]
    pub alpha: [Vector; 3],
    /// Normal components of the flat second partials (before the quadric correction).
    #[serde(skip)]
    pub alpha_hat: [Vector; 3],
    #[serde(skip)]
    pub mean_curvature: Vector,
    /// Two vectors spanning the normal plane of the surface inside the space form.
    #[serde(skip)]
    pub normal: [Vector; 2],
}

impl FundamentalData {
    pub fn det(&self) -> f64 {
        let g = &self.metric;
        g[0][0] * g[1][1] - g[0][1] * g[1][0]
    }

    pub fn inverse_metric(&self) -> [[f64; 2]; 2] {
        let g = &self.metric;
        let d = self.det();
        [[g[1][1] / d, -g[0][1] / d], [-g[1][0] / d, g[0][0] / d]]
    }

    /// `alpha(X, Y)` for chart coefficient vectors `X`, `Y`.
    pub fn alpha_of(&self, x: [f64; 2], y: [f64; 2]) -> Vector {
        let [ss, st, tt] = self.alpha;
        ss.scaled(x[0] * y[0]) + st.scaled(x[0] * y[1] + x[1] * y[0]) + tt.scaled(x[1] * y[1])
    }

    /// `g(X, Y)` for chart coefficient vectors.
    pub fn g_of(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        let g = &self.metric;
        x[0] * (g[0][0] * y[0] + g[0][1] * y[1]) + x[1] * (g[1][0] * y[0] + g[1][1] * y[1])
    }

    /// Ambient vector of a chart coefficient vector.
    pub fn tangent(&self, x: [f64; 2]) -> Vector {
        self.fs.scaled(x[0]) + self.ft.scaled(x[1])
    }

    /// Largest `|<alpha_ij, f_k>|` (and `|<alpha_ij, fhat>|` off the flat form),
    /// relative to the Euclidean sizes involved.
    pub fn tangency_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut against = vec![self.fs, self.ft];
        if self.position.space().dim() == 5 {
            against.push(self.position);
        }
        for a in &self.alpha {
            for w in &against {
                let scale = (a.euclid_norm() * w.euclid_norm()).max(1.0);
                worst = worst.max(a.dot(w).abs() / scale);
            }
        }
        worst
    }

    /// `|H - 1/2 g^ij alpha_ij|`.
    pub fn trace_residual(&self) -> f64 {
        (self.mean_curvature - trace_half(&self.inverse_metric(), &self.alpha)).euclid_norm()
    }
}

fn trace_half(inv: &[[f64; 2]; 2], alpha: &[Vector; 3]) -> Vector {
    (alpha[0].scaled(inv[0][0]) + alpha[1].scaled(2.0 * inv[0][1]) + alpha[2].scaled(inv[1][1])).scaled(0.5)
}

/// Two ambient basis vectors whose components orthogonal to `span` are the
/// most independent (largest Euclidean area).
pub(crate) fn normal_indices(span: &[Vector]) -> Option<(usize, usize)> {
    let space = span.first()?.space();
    let comps: Vec<Vector> = (0..space.dim())
        .map(|i| orthogonal_component(span, &space.basis(i)))
        .collect::<Option<_>>()?;
    let mut best = None;
    let mut best_area = 0.0;
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            let (u, v) = (&comps[i], &comps[j]);
            let uv: f64 = u.coords().iter().zip(v.coords()).map(|(a, b)| a * b).sum();
            let area = u.euclid_norm_sq() * v.euclid_norm_sq() - uv * uv;
            if area > best_area {
                best_area = area;
                best = Some((i, j));
            }
        }
    }
    best
}

/// Normal-plane basis from fixed ambient basis indices.
pub(crate) fn normal_from_indices(span: &[Vector], idx: (usize, usize)) -> Option<[Vector; 2]> {
    let space = span[0].space();
    Some([
        orthogonal_component(span, &space.basis(idx.0))?,
        orthogonal_component(span, &space.basis(idx.1))?,
    ])
}

/// The spanning set the normal space is orthogonal to.
pub(crate) fn tangent_span(form: SpaceForm, position: &Vector, fs: &Vector, ft: &Vector) -> Vec<Vector> {
    if form.curvature() == 0 {
        vec![*fs, *ft]
    } else {
        vec![*fs, *ft, *position]
    }
}

/// Metric, second fundamental form and mean curvature from the flat partials.
pub(crate) fn fundamental_from_partials(
    form: SpaceForm,
    point: [f64; 2],
    position: Vector,
    fs: Vector,
    ft: Vector,
    second: [Vector; 3],
) -> Result<FundamentalData> {
    let [s, t] = point;
    let metric = [[fs.dot(&fs), fs.dot(&ft)], [fs.dot(&ft), ft.dot(&ft)]];
    let det = metric[0][0] * metric[1][1] - metric[0][1] * metric[0][1];
    let scale = fs.euclid_norm_sq() * ft.euclid_norm_sq();
    if !(det.abs() > DEGENERACY_TOL * scale) {
        return Err(Error::SingularPoint {
            s,
            t,
            reason: format!("degenerate induced metric (det g = {det:e})"),
        });
    }
    let degenerate = || Error::SingularPoint {
        s,
        t,
        reason: "tangent plane and position are dependent".into(),
    };
    let span = [fs, ft];
    let fhat = AmbientPoint::new_unchecked(position, form);
    let g = [metric[0][0], metric[0][1], metric[1][1]];
    let mut alpha_hat = [fs; 3];
    let mut alpha = [fs; 3];
    for k in 0..3 {
        alpha_hat[k] = orthogonal_component(&span, &second[k]).ok_or_else(degenerate)?;
        alpha[k] = if form.curvature() == 0 {
            alpha_hat[k]
        } else {
            intrinsic_second_fundamental_form(&alpha_hat[k], g[k], &fhat)
        };
    }
    let inv = [
        [metric[1][1] / det, -metric[0][1] / det],
        [-metric[0][1] / det, metric[0][0] / det],
    ];
    let mean_curvature = trace_half(&inv, &alpha);
    let tspan = tangent_span(form, &position, &fs, &ft);
    let idx = normal_indices(&tspan).ok_or_else(degenerate)?;
    let normal = normal_from_indices(&tspan, idx).ok_or_else(degenerate)?;
    Ok(FundamentalData {
        point,
        position,
        fs,
        ft,
        metric,
        alpha,
        alpha_hat,
        mean_curvature,
        normal,
    })
}

/// Induced metric, second fundamental form, mean curvature and normal plane at `(s, t)`.
pub fn fundamental_data(f: &Immersion, s: f64, t: f64) -> Result<FundamentalData> {
    f.check_point(s, t)?;
    let map = |a: f64, b: f64| f.eval(a, b);
    let p = partial_derivs(&map, s, t, 2)?;
    let second = p.second().expect("order 2 partials");
    if p.value.space() != f.form.ambient() {
        return Err(Error::DimensionMismatch {
            expected: f.form.ambient().dim(),
            got: p.value.dim(),
        });
    }
    fundamental_from_partials(f.form, [s, t], p.value, p.ds, p.dt, second)
}

/// Dimension and chart-coefficient basis of the relative null space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeNullSpace {
    pub dimension: usize,
    pub basis: Vec<[f64; 2]>,
}

/// Relative null space from already computed data.
pub fn null_space_of(data: &FundamentalData) -> Result<RelativeNullSpace> {
    let [ss, st, tt] = data.alpha;
    let n = ss.dim();
    let mut rows = Vec::with_capacity(2 * n);
    for k in 0..n {
        rows.push(vec![ss[k], st[k]]);
        rows.push(vec![st[k], tt[k]]);
    }
    let basis = kernel_with_floor(&rows, 2, RANK_TOL, NULLITY_FLOOR)?;
    Ok(RelativeNullSpace {
        dimension: basis.len(),
        basis: basis.into_iter().map(|b| [b[0], b[1]]).collect(),
    })
}

/// `{X : alpha(X, Y) = 0 for all Y}` at `(s, t)`.
pub fn relative_null_space(f: &Immersion, s: f64, t: f64) -> Result<RelativeNullSpace> {
    null_space_of(&fundamental_data(f, s, t)?)
}

/// Tolerances for the adapted frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTolerances {
    /// Relative lightlike test for H and for the null direction.
    pub lightlike: f64,
    /// Euclidean norm below which H counts as zero.
    pub nonzero: f64,
}

impl Default for FrameTolerances {
    fn default() -> Self {
        Self {
            lightlike: 1e-6,
            nonzero: 1e-6,
        }
    }
}

/// Deviations of a computed frame from the frame relations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FrameResiduals {
    /// Worst of the pairing relations among e1..e4.
    pub metric: f64,
    pub alpha_e1e1: f64,
    pub alpha_e1e2: f64,
    /// `|alpha(e2, e2) - e3| / |e3|`.
    pub alpha_e2e2: f64,
    /// `max |<alpha(e_i, e_j), e3>| / |e3|^2`, i.e. the shape operator of e3.
    pub shape_e3: f64,
}

impl FrameResiduals {
    pub fn max(&self) -> f64 {
        [
            self.metric,
            self.alpha_e1e1,
            self.alpha_e1e2,
            self.alpha_e2e2,
            self.shape_e3,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Tangent frame `e1` (relative null direction), `e2`, and the
/// pseudo-orthonormal normal frame `e3 = -2 eps H`, `e4`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdaptedFrame {
    pub point: [f64; 2],
    /// Sign of `<e1, e1>`.
    pub epsilon: f64,
    /// Chart coefficients of e1 and e2.
    pub e1_coeffs: [f64; 2],
    pub e2_coeffs: [f64; 2],
    #[serde(skip)]
    pub e1: Vector,
    #[serde(skip)]
    pub e2: Vector,
    #[serde(skip)]
    pub e3: Vector,
    #[serde(skip)]
    pub e4: Vector,
    pub residuals: FrameResiduals,
}

/// Checks that `H` is lightlike and nonzero.
pub fn check_quasi_minimal(h: &Vector, tol: &FrameTolerances) -> Result<()> {
    if h.euclid_norm() <= tol.nonzero {
        return Err(Error::NotQuasiMinimal(format!(
            "mean curvature vanishes (|H| = {:e})",
            h.euclid_norm()
        )));
    }
    match causal_character(h, tol.lightlike) {
        CausalCharacter::Lightlike => Ok(()),
        other => Err(Error::NotQuasiMinimal(format!(
            "mean curvature is {other:?} (<H,H>/|H|^2 = {:e})",
            h.self_pairing() / h.euclid_norm_sq()
        ))),
    }
}

/// Adapted frame from already computed data.
pub fn frame_of(data: &FundamentalData, tol: &FrameTolerances) -> Result<AdaptedFrame> {
    let null = null_space_of(data)?;
    if null.dimension != 1 {
        return Err(Error::NullityMismatch(null.dimension));
    }
    check_quasi_minimal(&data.mean_curvature, tol)?;

    let mut c1 = null.basis[0];
    // Orient by the dominant chart component.
    if c1[0].abs() >= c1[1].abs() && c1[0] < 0.0 || c1[0].abs() < c1[1].abs() && c1[1] < 0.0 {
        c1 = [-c1[0], -c1[1]];
    }
    let q1 = data.g_of(c1, c1);
    let x1 = data.tangent(c1);
    if q1.abs() <= tol.lightlike * x1.euclid_norm_sq() {
        return Err(Error::DegenerateNullSpace);
    }
    let epsilon = q1.signum();
    let n1 = q1.abs().sqrt();
    let c1 = [c1[0] / n1, c1[1] / n1];

    let g = &data.metric;
    let mut c2 = [
        -(g[0][1] * c1[0] + g[1][1] * c1[1]),
        g[0][0] * c1[0] + g[0][1] * c1[1],
    ];
    let q2 = data.g_of(c2, c2);
    let n2 = q2.abs().sqrt();
    c2 = [c2[0] / n2, c2[1] / n2];
    if c1[0] * c2[1] - c1[1] * c2[0] < 0.0 {
        c2 = [-c2[0], -c2[1]];
    }

    let e1 = data.tangent(c1);
    let e2 = data.tangent(c2);
    let e3 = data.mean_curvature.scaled(-2.0 * epsilon);
    let e4 = lightlike_partner_tol(&e3, &data.normal, tol.lightlike)?;

    let e3n = e3.euclid_norm();
    let a11 = data.alpha_of(c1, c1);
    let a12 = data.alpha_of(c1, c2);
    let a22 = data.alpha_of(c2, c2);
    let e3sq = e3n * e3n;
    let e4n = e4.euclid_norm();
    let metric = [
        (e1.dot(&e1) - epsilon).abs(),
        (e2.dot(&e2) + epsilon).abs(),
        e1.dot(&e2).abs(),
        e3.dot(&e3).abs() / e3sq,
        e4.dot(&e4).abs() / (e4n * e4n),
        (e3.dot(&e4) + 1.0).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let shape_e3 = [a11, a12, a22]
        .iter()
        .map(|a| a.dot(&e3).abs() / e3sq)
        .fold(0.0, f64::max);
    Ok(AdaptedFrame {
        point: data.point,
        epsilon,
        e1_coeffs: c1,
        e2_coeffs: c2,
        e1,
        e2,
        e3,
        e4,
        residuals: FrameResiduals {
            metric,
            alpha_e1e1: a11.euclid_norm() / e3n,
            alpha_e1e2: a12.euclid_norm() / e3n,
            alpha_e2e2: (a22 - e3).euclid_norm() / e3n,
            shape_e3,
        },
    })
}

/// The adapted frame at `(s, t)`.
pub fn adapted_frame(f: &Immersion, s: f64, t: f64) -> Result<AdaptedFrame> {
    frame_of(&fundamental_data(f, s, t)?, &FrameTolerances::default())
}

/// Normal connection form on the frame and the metric coefficient:
/// `D_{e1} e3 = omega e3`, `D_{e2} e3 = gamma e3`, `phi = sqrt(|det g| / |g_ss|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureCoefficients {
    pub omega: f64,
    pub gamma: f64,
    pub phi: f64,
}

/// Relative step for differentiating `e3` along coordinate lines.
pub const FRAME_STEP: f64 = 1e-3;

/// `omega`, `gamma`, `phi` at the frame's point, by a fourth-order stencil
/// on `e3 = -2 eps H` along the coordinate lines.
pub fn structure_coefficients(f: &Immersion, frame: &AdaptedFrame) -> Result<StructureCoefficients> {
    let [s, t] = frame.point;
    let eps = frame.epsilon;
    let e3_at = |a: f64, b: f64| -> Result<Vector> {
        Ok(fundamental_data(f, a, b)?.mean_curvature.scaled(-2.0 * eps))
    };
    let hs = diff_step(s);
    let ht = diff_step(t);
    let zero = frame.e3.space().zero();
    let (mut d_s, mut d_t) = (zero, zero);
    for (k, w) in STENCIL {
        d_s += e3_at(s + k * hs, t)?.scaled(w);
        d_t += e3_at(s, t + k * ht)?.scaled(w);
    }
    d_s = d_s.scaled(1.0 / (12.0 * hs));
    d_t = d_t.scaled(1.0 / (12.0 * ht));
    let along = |c: [f64; 2]| d_s.scaled(c[0]) + d_t.scaled(c[1]);
    let data = fundamental_data(f, s, t)?;
    let phi = (data.det().abs() / data.metric[0][0].abs()).sqrt();
    Ok(StructureCoefficients {
        omega: -along(frame.e1_coeffs).dot(&frame.e4),
        gamma: -along(frame.e2_coeffs).dot(&frame.e4),
        phi,
    })
}

const STENCIL: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

fn diff_step(x: f64) -> f64 {
    let h = FRAME_STEP * x.abs().max(1.0);
    (x + h) - x
}
