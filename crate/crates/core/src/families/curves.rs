//! Arc-length curves on the de Sitter plane S^2_1 and their Frenet apparatus.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{IndefiniteSpace, Vector};
use crate::numerics::functions::fd_derivative;
use crate::numerics::{cumulative_integral, scalar_fn, GridSpec, ScalarFn, ScalarFn1};

/// Causal type of the tangent `alpha'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveCausality {
    Timelike,
    Spacelike,
}

impl CurveCausality {
    /// `<alpha', alpha'>` for an arc-length curve of this type.
    pub fn tangent_norm(self) -> f64 {
        match self {
            CurveCausality::Timelike => -1.0,
            CurveCausality::Spacelike => 1.0,
        }
    }
}

/// A smooth curve in E^3_1. `derivative` defaults to finite differences.
pub trait SpaceCurve: Send + Sync {
    fn position(&self, t: f64) -> [f64; 3];

    fn derivative(&self, t: f64, order: u32) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, x) in out.iter_mut().enumerate() {
            *x = fd_derivative(|u| self.position(u)[i], t, order);
        }
        out
    }
}

fn e31(c: [f64; 3]) -> Vector {
    Vector::from_slice(IndefiniteSpace::E31, &c)
}

/// `(a sinh(t/a), b, a cosh(t/a))` with `a^2 + b^2 = 1`: timelike, `kappa = b/a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelikeCircle {
    a: f64,
    b: f64,
}

impl TimelikeCircle {
    /// `0 < a <= 1`; `a = 1` is the great circle.
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "timelike circle radius {a} not in (0, 1]"
            )));
        }
        Ok(Self {
            a,
            b: (1.0 - a * a).sqrt(),
        })
    }

    /// The circle with constant curvature `kappa >= 0`.
    pub fn with_curvature(kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("curvature {kappa} must be >= 0")));
        }
        Self::new(1.0 / (1.0 + kappa * kappa).sqrt())
    }

    pub fn curvature(&self) -> f64 {
        self.b / self.a
    }
}

impl SpaceCurve for TimelikeCircle {
    fn position(&self, t: f64) -> [f64; 3] {
        let u = t / self.a;
        [self.a * u.sinh(), self.b, self.a * u.cosh()]
    }

    fn derivative(&self, t: f64, order: u32) -> [f64; 3] {
        if order == 0 {
            return self.position(t);
        }
        let u = t / self.a;
        let k = self.a.powi(1 - order as i32);
        let (x, z) = if order % 2 == 0 {
            (u.sinh(), u.cosh())
        } else {
            (u.cosh(), u.sinh())
        };
        [k * x, 0.0, k * z]
    }
}

/// `(b, a cos(t/a), a sin(t/a))` with `a^2 - b^2 = 1`: spacelike, `kappa = b/a < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacelikeCircle {
    a: f64,
    b: f64,
}

impl SpacelikeCircle {
    /// `a >= 1`; `a = 1` is the great circle.
    pub fn new(a: f64) -> Result<Self> {
        if !(a >= 1.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "spacelike circle radius {a} must be >= 1"
            )));
        }
        Ok(Self {
            a,
            b: (a * a - 1.0).sqrt(),
        })
    }

    /// The circle with constant curvature `0 <= kappa < 1`.
    pub fn with_curvature(kappa: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&kappa) {
            return Err(Error::InvalidParameter(format!(
                "spacelike circle curvature {kappa} must lie in [0, 1)"
            )));
        }
        Self::new(1.0 / (1.0 - kappa * kappa).sqrt())
    }

    pub fn curvature(&self) -> f64 {
        self.b / self.a
    }
}

impl SpaceCurve for SpacelikeCircle {
    fn position(&self, t: f64) -> [f64; 3] {
        let u = t / self.a;
        [self.b, self.a * u.cos(), self.a * u.sin()]
    }

    fn derivative(&self, t: f64, order: u32) -> [f64; 3] {
        if order == 0 {
            return self.position(t);
        }
        let u = t / self.a;
        let k = self.a.powi(1 - order as i32);
        let (c, s) = (u.cos(), u.sin());
        let (y, z) = match order % 4 {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        };
        [0.0, k * y, k * z]
    }
}

/// Wraps a closure as a curve with finite-difference derivatives.
pub struct FnCurve<F>(pub F);

impl<F: Fn(f64) -> [f64; 3] + Send + Sync> SpaceCurve for FnCurve<F> {
    fn position(&self, t: f64) -> [f64; 3] {
        (self.0)(t)
    }
}

/// An arc-length curve on S^2_1 with its curvature and unit normal:
/// `alpha'' = kappa N + alpha` (timelike) or `alpha'' = kappa N - alpha`
/// (spacelike), `N' = kappa alpha'`, `kappa >= 0`.
#[derive(Clone)]
pub struct SphericalCurve {
    curve: Arc<dyn SpaceCurve>,
    causal: CurveCausality,
}

impl fmt::Debug for SphericalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SphericalCurve({:?})", self.causal)
    }
}

impl SphericalCurve {
    pub fn causal(&self) -> CurveCausality {
        self.causal
    }

    pub fn alpha(&self, t: f64) -> Vector {
        e31(self.curve.position(t))
    }

    pub fn alpha_derivative(&self, t: f64, order: u32) -> Vector {
        e31(self.curve.derivative(t, order))
    }

    /// `kappa N`: `alpha'' - alpha` or `alpha'' + alpha`.
    fn kappa_normal(&self, t: f64) -> Vector {
        let a = self.alpha(t);
        let a2 = self.alpha_derivative(t, 2);
        match self.causal {
            CurveCausality::Timelike => a2 - a,
            CurveCausality::Spacelike => a2 + a,
        }
    }

    pub fn kappa(&self, t: f64) -> f64 {
        self.kappa_normal(t).self_pairing().abs().sqrt()
    }

    pub fn normal(&self, t: f64) -> Vector {
        let kn = self.kappa_normal(t);
        kn.scaled(1.0 / kn.self_pairing().abs().sqrt())
    }

    /// `kappa` as a scalar function (finite-difference derivatives).
    pub fn kappa_fn(&self) -> ScalarFn1 {
        let me = self.clone();
        scalar_fn(move |t| me.kappa(t))
    }

    /// `|N' - kappa alpha'|` with `N'` by finite differences.
    pub fn frenet_residual(&self, t: f64) -> f64 {
        let mut dn = [0.0; 3];
        for (i, x) in dn.iter_mut().enumerate() {
            *x = fd_derivative(|u| self.normal(u)[i], t, 1);
        }
        (e31(dn) - self.alpha_derivative(t, 1).scaled(self.kappa(t))).euclid_norm()
    }
}

/// Validation tolerances for [`frenet_apparatus`].
pub const CURVE_TOL: f64 = 1e-8;
pub const FRENET_TOL: f64 = 1e-6;

/// Validates `curve` on `span` (at `samples` points) and returns its Frenet apparatus.
pub fn frenet_apparatus(
    curve: Arc<dyn SpaceCurve>,
    causal: CurveCausality,
    span: [f64; 2],
    samples: usize,
) -> Result<SphericalCurve> {
    let out = SphericalCurve { curve, causal };
    let n = samples.max(2);
    for i in 0..n {
        let t = span[0] + (span[1] - span[0]) * i as f64 / (n - 1) as f64;
        let a = out.alpha(t);
        if !a.is_finite() {
            return Err(Error::NonFinite { what: "curve", at: t });
        }
        let q = a.self_pairing();
        if (q - 1.0).abs() > CURVE_TOL {
            return Err(Error::OffQuadric { t, value: q });
        }
        let d = out.alpha_derivative(t, 1).self_pairing();
        if d.signum() != causal.tangent_norm() {
            return Err(Error::WrongCausalType { t });
        }
        if (d - causal.tangent_norm()).abs() > CURVE_TOL {
            return Err(Error::NotArcLength { t, value: d });
        }
        let kn = out.kappa_normal(t);
        let kappa = out.kappa(t);
        if kappa <= CURVE_TOL {
            return Err(Error::VanishingCurvature { t, kappa });
        }
        // N must be spacelike for timelike curves and timelike for spacelike ones.
        if kn.self_pairing().signum() != -causal.tangent_norm() {
            return Err(Error::WrongCausalType { t });
        }
        let r = out.frenet_residual(t);
        if r > FRENET_TOL * kappa.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "Frenet equation N' = kappa alpha' fails at t = {t} (residual {r:e})"
            )));
        }
    }
    Ok(out)
}

/// Built-in constant-curvature curve of the given causal type.
pub fn circle(causal: CurveCausality, kappa: f64) -> Result<Arc<dyn SpaceCurve>> {
    Ok(match causal {
        CurveCausality::Timelike => Arc::new(TimelikeCircle::with_curvature(kappa)?),
        CurveCausality::Spacelike => Arc::new(SpacelikeCircle::with_curvature(kappa)?),
    })
}

/// Integrates `N' = kappa alpha'` from `t0` and returns the largest deviation
/// from the computed `N` on `span`.
pub fn frenet_round_trip(c: &SphericalCurve, t0: f64, span: [f64; 2]) -> Result<f64> {
    let grid = GridSpec::with_default_step(span[0], span[1])?;
    let n0 = c.normal(t0);
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let me = c.clone();
        let g = scalar_fn(move |t| me.kappa(t) * me.alpha_derivative(t, 1)[i]);
        let integral = cumulative_integral(g, t0, grid)?;
        for k in 0..=50 {
            let t = span[0] + (span[1] - span[0]) * k as f64 / 50.0;
            worst = worst.max((n0[i] + integral.value(t) - c.normal(t)[i]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn timelike_circle_closed_form() {
        let c = TimelikeCircle::new(0.6).unwrap();
        assert_abs_diff_eq!(c.curvature(), 4.0 / 3.0, epsilon = 1e-15);
        let t = 0.37;
        let p = e31(c.position(t));
        assert_abs_diff_eq!(p.self_pairing(), 1.0, epsilon = 1e-14);
        // Oracle: alpha' = (cosh(t/a), 0, sinh(t/a)).
        let d = c.derivative(t, 1);
        assert_abs_diff_eq!(d[0], (t / 0.6).cosh(), epsilon = 1e-15);
        assert_abs_diff_eq!(d[2], (t / 0.6).sinh(), epsilon = 1e-15);
        let fd = FnCurve(move |u| c.position(u));
        for order in 1..=2 {
            let (a, b) = (c.derivative(t, order), fd.derivative(t, order));
            for i in 0..3 {
                assert_abs_diff_eq!(a[i], b[i], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn spacelike_circle_closed_form() {
        let c = SpacelikeCircle::new(2f64.sqrt()).unwrap();
        assert_abs_diff_eq!(c.curvature(), 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        let fd = FnCurve(move |u| c.position(u));
        for order in 1..=3 {
            let (a, b) = (c.derivative(0.8, order), fd.derivative(0.8, order));
            for i in 0..3 {
                assert_abs_diff_eq!(a[i], b[i], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn frenet_of_circles() {
        let tl = frenet_apparatus(
            circle(CurveCausality::Timelike, 4.0 / 3.0).unwrap(),
            CurveCausality::Timelike,
            [-1.0, 1.0],
            21,
        )
        .unwrap();
        assert_abs_diff_eq!(tl.kappa(0.3), 4.0 / 3.0, epsilon = 1e-12);
        // N = (b sinh, -a, b cosh) with a = 0.6, b = 0.8.
        let n = tl.normal(0.3);
        assert_abs_diff_eq!(n[1], -0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(n[0], 0.8 * (0.5f64).sinh(), epsilon = 1e-12);

        let sl = frenet_apparatus(
            circle(CurveCausality::Spacelike, 0.5).unwrap(),
            CurveCausality::Spacelike,
            [-1.0, 1.0],
            21,
        )
        .unwrap();
        assert_abs_diff_eq!(sl.kappa(-0.4), 0.5, epsilon = 1e-12);
        assert!(sl.normal(0.1).self_pairing() < 0.0);
        assert!(frenet_round_trip(&sl, 0.0, [-1.0, 1.0]).unwrap() < 1e-5);
    }

    #[test]
    fn frenet_errors() {
        let great = Arc::new(TimelikeCircle::new(1.0).unwrap());
        assert!(matches!(
            frenet_apparatus(great, CurveCausality::Timelike, [0.0, 1.0], 5),
            Err(Error::VanishingCurvature { .. })
        ));
        let tl = Arc::new(TimelikeCircle::new(0.6).unwrap());
        assert!(matches!(
            frenet_apparatus(tl, CurveCausality::Spacelike, [0.0, 1.0], 5),
            Err(Error::WrongCausalType { .. })
        ));
        // Twice the speed: not arc-length.
        let fast = Arc::new(FnCurve(|t: f64| {
            let u = 2.0 * t / 0.6;
            [0.6 * u.sinh(), 0.8, 0.6 * u.cosh()]
        }));
        assert!(matches!(
            frenet_apparatus(fast, CurveCausality::Timelike, [0.0, 1.0], 5),
            Err(Error::NotArcLength { .. })
        ));
        let off = Arc::new(FnCurve(|t: f64| [t.sinh(), 0.5, t.cosh()]));
        assert!(matches!(
            frenet_apparatus(off, CurveCausality::Timelike, [0.0, 1.0], 5),
            Err(Error::OffQuadric { .. })
        ));
        assert!(SpacelikeCircle::with_curvature(1.0).is_err());
    }
}
