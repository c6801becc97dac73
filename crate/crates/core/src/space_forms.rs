//! The ambient space forms: E^4_2 itself, and S^4_2, H^4_2 as quadrics in
//! E^5_2 and E^5_3.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{IndefiniteSpace, Vector};

/// Drift allowed for points of generated families on their quadric.
pub const ON_FORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct SpaceForm {
    c: i8,
    ambient: IndefiniteSpace,
}

impl SpaceForm {
    /// E^4_2.
    pub const FLAT: SpaceForm = SpaceForm {
        c: 0,
        ambient: IndefiniteSpace::E42,
    };
    /// S^4_2 inside E^5_2.
    pub const SPHERE: SpaceForm = SpaceForm {
        c: 1,
        ambient: IndefiniteSpace::E52,
    };
    /// H^4_2 inside E^5_3.
    pub const HYPERBOLIC: SpaceForm = SpaceForm {
        c: -1,
        ambient: IndefiniteSpace::E53,
    };

    pub fn new(c: i32) -> Result<Self> {
        match c {
            0 => Ok(Self::FLAT),
            1 => Ok(Self::SPHERE),
            -1 => Ok(Self::HYPERBOLIC),
            _ => Err(Error::InvalidParameter(format!(
                "space form curvature must be -1, 0 or 1, got {c}"
            ))),
        }
    }

    pub fn curvature(&self) -> i32 {
        i32::from(self.c)
    }

    pub fn c(&self) -> f64 {
        f64::from(self.c)
    }

    pub fn ambient(&self) -> IndefiniteSpace {
        self.ambient
    }

    /// `<x, x>` on the quadric, or `None` for the flat form.
    pub fn target(&self) -> Option<f64> {
        match self.c {
            0 => None,
            c => Some(f64::from(c)),
        }
    }

    /// `|<x, x> - target|`, zero for the flat form.
    pub fn constraint_residual(&self, x: &Vector) -> f64 {
        match self.target() {
            None => 0.0,
            Some(t) => (x.self_pairing() - t).abs(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.c {
            0 => "E^4_2",
            1 => "S^4_2",
            _ => "H^4_2",
        }
    }
}

impl TryFrom<i32> for SpaceForm {
    type Error = Error;

    fn try_from(c: i32) -> Result<Self> {
        SpaceForm::new(c)
    }
}

impl From<SpaceForm> for i32 {
    fn from(f: SpaceForm) -> i32 {
        f.curvature()
    }
}

pub fn on_form(x: &Vector, form: &SpaceForm, tol: f64) -> bool {
    form.constraint_residual(x) <= tol
}

/// A point of a space form, given by its flat ambient coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientPoint {
    x: Vector,
    form: SpaceForm,
}

impl AmbientPoint {
    pub fn new(x: Vector, form: SpaceForm) -> Result<Self> {
        if x.space() != form.ambient() {
            return Err(Error::DimensionMismatch {
                expected: form.ambient().dim(),
                got: x.dim(),
            });
        }
        let r = form.constraint_residual(&x);
        if r > ON_FORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "point is off {} by {r:e}",
                form.name()
            )));
        }
        Ok(Self { x, form })
    }

    /// Skips the quadric check; used for points whose drift is reported separately.
    pub fn new_unchecked(x: Vector, form: SpaceForm) -> Self {
        Self { x, form }
    }

    pub fn x(&self) -> &Vector {
        &self.x
    }

    pub fn form(&self) -> SpaceForm {
        self.form
    }
}

/// Second fundamental form of a surface in the space form from that of its
/// flat composite: `alpha = alpha_hat + c * g(X, Y) * fhat`.
///
/// `alpha_hat` is normal to the surface in the flat ambient; the result is
/// also orthogonal to `fhat`.
pub fn intrinsic_second_fundamental_form(alpha_hat: &Vector, g_xy: f64, fhat: &AmbientPoint) -> Vector {
    *alpha_hat + fhat.x.scaled(fhat.form.c() * g_xy)
}

/// Inverse of [`intrinsic_second_fundamental_form`].
pub fn flat_second_fundamental_form(alpha: &Vector, g_xy: f64, fhat: &AmbientPoint) -> Vector {
    *alpha - fhat.x.scaled(fhat.form.c() * g_xy)
}
