//! Fixed-dimension linear algebra under indefinite inner products.
//!
//! Coordinates list the negative (timelike) directions first: in a space of
//! index `s` the basis vectors `0..s` pair to `-1` with themselves and the
//! rest to `+1`.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ambient dimension handled (E⁵₂, E⁵₃).
pub const MAX_DIM: usize = 5;

/// Default relative tolerance for the lightlike test.
pub const LIGHTLIKE_TOL: f64 = 1e-8;

/// Default relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndefiniteSpace {
    dim: usize,
    index: usize,
}

impl IndefiniteSpace {
    pub const E31: IndefiniteSpace = IndefiniteSpace { dim: 3, index: 1 };
    pub const E42: IndefiniteSpace = IndefiniteSpace { dim: 4, index: 2 };
    pub const E52: IndefiniteSpace = IndefiniteSpace { dim: 5, index: 2 };
    pub const E53: IndefiniteSpace = IndefiniteSpace { dim: 5, index: 3 };

    pub fn new(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM || index > dim {
            return Err(Error::InvalidSignature { dim, index });
        }
        Ok(Self { dim, index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Self-pairing of the `i`-th basis vector.
    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        if i < self.index {
            -1.0
        } else {
            1.0
        }
    }

    pub fn vector(&self, coords: &[f64]) -> Result<Vector> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: coords.len(),
            });
        }
        let mut c = [0.0; MAX_DIM];
        c[..self.dim].copy_from_slice(coords);
        Ok(Vector {
            coords: c,
            space: *self,
        })
    }

    pub fn zero(&self) -> Vector {
        Vector {
            coords: [0.0; MAX_DIM],
            space: *self,
        }
    }

    pub fn basis(&self, i: usize) -> Vector {
        let mut v = self.zero();
        v.coords[i] = 1.0;
        v
    }
}

/// A vector of an [`IndefiniteSpace`]. Stored inline; `Copy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector {
    coords: [f64; MAX_DIM],
    space: IndefiniteSpace,
}

impl Vector {
    /// Builds a vector from exactly `space.dim()` leading entries of `coords`.
    /// Panics if `coords` is shorter; use [`IndefiniteSpace::vector`] for a checked build.
    pub fn from_slice(space: IndefiniteSpace, coords: &[f64]) -> Self {
        let mut c = [0.0; MAX_DIM];
        c[..space.dim].copy_from_slice(&coords[..space.dim]);
        Vector { coords: c, space }
    }

    pub fn space(&self) -> IndefiniteSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.space.dim]
    }

    /// Indefinite pairing without the space check. Callers guarantee both
    /// vectors live in the same space.
    #[inline]
    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.space, other.space);
        let s = self.space.index;
        let mut acc = 0.0;
        for i in 0..self.space.dim {
            let p = self.coords[i] * other.coords[i];
            if i < s {
                acc -= p;
            } else {
                acc += p;
            }
        }
        acc
    }

    /// `<v, v>` under the indefinite metric.
    pub fn self_pairing(&self) -> f64 {
        self.dot(self)
    }

    pub fn euclid_norm_sq(&self) -> f64 {
        self.coords().iter().map(|x| x * x).sum()
    }

    pub fn euclid_norm(&self) -> f64 {
        self.euclid_norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coords().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|x| x.is_finite())
    }

    pub fn scaled(&self, k: f64) -> Vector {
        let mut out = *self;
        for x in out.coords[..self.space.dim].iter_mut() {
            *x *= k;
        }
        out
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(mut self, rhs: Vector) -> Vector {
        self += rhs;
        self
    }
}

impl AddAssign for Vector {
    fn add_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.space, rhs.space);
        for i in 0..self.space.dim {
            self.coords[i] += rhs.coords[i];
        }
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(mut self, rhs: Vector) -> Vector {
        self -= rhs;
        self
    }
}

impl SubAssign for Vector {
    fn sub_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.space, rhs.space);
        for i in 0..self.space.dim {
            self.coords[i] -= rhs.coords[i];
        }
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    fn mul(self, k: f64) -> Vector {
        self.scaled(k)
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    fn mul(self, v: Vector) -> Vector {
        v.scaled(self)
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scaled(-1.0)
    }
}

/// Checked indefinite inner product.
pub fn inner(u: &Vector, v: &Vector) -> Result<f64> {
    if u.space != v.space {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    Ok(u.dot(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
    Zero,
}

/// Classifies `v`. The lightlike test is relative to the Euclidean norm
/// square so that it is invariant under rescaling.
pub fn causal_character(v: &Vector, tol: f64) -> CausalCharacter {
    if v.max_abs() <= tol {
        return CausalCharacter::Zero;
    }
    let q = v.self_pairing();
    if q.abs() <= tol * v.euclid_norm_sq() {
        CausalCharacter::Lightlike
    } else if q > 0.0 {
        CausalCharacter::Spacelike
    } else {
        CausalCharacter::Timelike
    }
}

/// Euclidean-orthonormal basis of `{x : row · x = 0 for every row}`.
///
/// All rows must have `ncols` entries. The numerical rank counts singular
/// values above `tol * sigma_max`; an empty row set yields the full space.
pub fn kernel(rows: &[Vec<f64>], ncols: usize, tol: f64) -> Result<Vec<Vec<f64>>> {
    kernel_with_floor(rows, ncols, tol, 0.0)
}

/// [`kernel`] with an additional absolute threshold: singular values at or
/// below `max(tol * sigma_max, floor)` count as zero.
pub fn kernel_with_floor(rows: &[Vec<f64>], ncols: usize, tol: f64, floor: f64) -> Result<Vec<Vec<f64>>> {
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch {
            expected: ncols,
            got: bad.len(),
        });
    }
    if rows.is_empty() {
        return Ok((0..ncols)
            .map(|i| {
                let mut e = vec![0.0; ncols];
                e[i] = 1.0;
                e
            })
            .collect());
    }
    // Pad to a square-or-tall matrix so the thin SVD carries a full V.
    let nrows = rows.len().max(ncols);
    let mut m = DMatrix::<f64>::zeros(nrows, ncols);
    for (i, r) in rows.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let threshold = (tol * sigma_max).max(floor);
    let mut basis = Vec::new();
    for (k, sv) in svd.singular_values.iter().enumerate() {
        if sigma_max == 0.0 || *sv <= threshold {
            basis.push(v_t.row(k).iter().cloned().collect());
        }
    }
    Ok(basis)
}

/// Solves the Gram system of `span` against `v`: coefficients `x` with
/// `<v - sum x_i span_i, span_j> = 0` for all `j`.
pub fn gram_coefficients(span: &[Vector], v: &Vector) -> Option<Vec<f64>> {
    let n = span.len();
    let gram = DMatrix::<f64>::from_fn(n, n, |i, j| span[i].dot(&span[j]));
    let rhs = nalgebra::DVector::<f64>::from_fn(n, |i, _| v.dot(&span[i]));
    let sol = gram.lu().solve(&rhs)?;
    if sol.iter().all(|x| x.is_finite()) {
        Some(sol.iter().cloned().collect())
    } else {
        None
    }
}

/// Component of `v` orthogonal (under the indefinite metric) to `span`.
pub fn orthogonal_component(span: &[Vector], v: &Vector) -> Option<Vector> {
    let coeffs = gram_coefficients(span, v)?;
    let mut out = *v;
    for (c, w) in coeffs.iter().zip(span) {
        out -= w.scaled(*c);
    }
    Some(out)
}

/// The lightlike `n2` in the plane spanned by `normal_basis` with `<n1, n2> = -1`.
pub fn lightlike_partner(n1: &Vector, normal_basis: &[Vector]) -> Result<Vector> {
    lightlike_partner_tol(n1, normal_basis, LIGHTLIKE_TOL)
}

/// [`lightlike_partner`] with an explicit relative lightlike tolerance for `n1`.
pub fn lightlike_partner_tol(n1: &Vector, normal_basis: &[Vector], tol: f64) -> Result<Vector> {
    if normal_basis.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "normal plane needs 2 basis vectors, got {}",
            normal_basis.len()
        )));
    }
    for w in normal_basis {
        if w.space() != n1.space() {
            return Err(Error::DimensionMismatch {
                expected: n1.dim(),
                got: w.dim(),
            });
        }
    }
    let n1_sq = n1.euclid_norm_sq();
    if n1_sq == 0.0 {
        return Err(Error::NotLightlike(f64::NAN));
    }
    let rel = n1.self_pairing() / n1_sq;
    if rel.abs() > tol {
        return Err(Error::NotLightlike(rel));
    }
    // n1 must lie in the plane.
    let residual = match orthogonal_component_euclid(normal_basis, n1) {
        Some(r) => r,
        None => return Err(Error::DegeneratePlane),
    };
    if residual > 1e-6 * n1_sq.sqrt() {
        return Err(Error::InvalidParameter(
            "n1 does not lie in the normal plane".into(),
        ));
    }
    // Pick the basis vector that pairs most strongly with n1.
    let (w, pairing) = normal_basis
        .iter()
        .map(|w| (w, w.dot(n1) / w.euclid_norm().max(f64::MIN_POSITIVE)))
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("two basis vectors");
    if pairing.abs() <= 1e-10 * n1_sq.sqrt() {
        return Err(Error::DegeneratePlane);
    }
    let wn = w.dot(n1);
    let mu = -w.self_pairing() / (2.0 * wn);
    let lambda = -1.0 / wn;
    Ok((*w + n1.scaled(mu)).scaled(lambda))
}

/// Euclidean distance from `v` to the span of two vectors.
fn orthogonal_component_euclid(span: &[Vector], v: &Vector) -> Option<f64> {
    let n = span.len();
    let euclid =
        |a: &Vector, b: &Vector| -> f64 { a.coords().iter().zip(b.coords()).map(|(x, y)| x * y).sum() };
    let gram = DMatrix::<f64>::from_fn(n, n, |i, j| euclid(&span[i], &span[j]));
    let rhs = nalgebra::DVector::<f64>::from_fn(n, |i, _| euclid(v, &span[i]));
    let sol = gram.lu().solve(&rhs)?;
    let mut r = *v;
    for (c, w) in sol.iter().zip(span) {
        r -= w.scaled(*c);
    }
    Some(r.euclid_norm())
}
