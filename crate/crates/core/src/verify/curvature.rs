//! Gauss, Codazzi and Ricci residuals from a 5x5 finite-difference stencil.
//!
//! The metric, second fundamental form and a normal frame are sampled at the
//! 25 stencil nodes. Christoffel symbols and their derivatives come from
//! differences of the sampled metric only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::immersion::{
    fundamental_data, normal_from_indices, normal_indices, tangent_span, FundamentalData, Immersion,
};
use crate::linalg::{gram_coefficients, orthogonal_component, Vector};

/// Default relative outer step of the curvature stencil.
pub const CURVATURE_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CurvatureResiduals {
    pub gauss: f64,
    pub codazzi: f64,
    pub ricci: f64,
}

impl CurvatureResiduals {
    pub fn max(&self) -> f64 {
        self.gauss.max(self.codazzi).max(self.ricci)
    }
}

const D1: [(isize, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
const D2: [(isize, f64); 5] = [(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)];

trait Lin: Copy {
    fn add(self, o: Self) -> Self;
    fn mul(self, k: f64) -> Self;
}

impl Lin for f64 {
    fn add(self, o: f64) -> f64 {
        self + o
    }
    fn mul(self, k: f64) -> f64 {
        self * k
    }
}

impl Lin for Vector {
    fn add(self, o: Vector) -> Vector {
        self + o
    }
    fn mul(self, k: f64) -> Vector {
        self.scaled(k)
    }
}

impl<T: Lin, const N: usize> Lin for [T; N] {
    fn add(mut self, o: Self) -> Self {
        for (a, b) in self.iter_mut().zip(o) {
            *a = a.add(b);
        }
        self
    }
    fn mul(mut self, k: f64) -> Self {
        for a in self.iter_mut() {
            *a = a.mul(k);
        }
        self
    }
}

fn combine<T: Lin>(terms: impl Iterator<Item = (f64, T)>) -> T {
    let mut acc: Option<T> = None;
    for (w, v) in terms {
        let v = v.mul(w);
        acc = Some(match acc {
            None => v,
            Some(a) => a.add(v),
        });
    }
    acc.expect("non-empty stencil")
}

/// Values on the 5x5 stencil, indexed `[i][j]` for offsets `(i - 2) hs, (j - 2) ht`.
struct Stencil<T> {
    v: [[T; 5]; 5],
    hs: f64,
    ht: f64,
}

fn at(k: isize) -> usize {
    (k + 2) as usize
}

impl<T: Copy> Stencil<T> {
    fn centre(&self) -> T {
        self.v[2][2]
    }
}

impl<T: Lin> Stencil<T> {
    /// d/ds at stencil column `j`.
    fn ds_at(&self, j: usize) -> T {
        combine(D1.iter().map(|&(k, w)| (w / (12.0 * self.hs), self.v[at(k)][j])))
    }

    /// d/dt at stencil row `i`.
    fn dt_at(&self, i: usize) -> T {
        combine(D1.iter().map(|&(k, w)| (w / (12.0 * self.ht), self.v[i][at(k)])))
    }

    fn d(&self, axis: usize) -> T {
        if axis == 0 {
            self.ds_at(2)
        } else {
            self.dt_at(2)
        }
    }

    fn dd(&self, a: usize, b: usize) -> T {
        match (a, b) {
            (0, 0) => combine(
                D2.iter()
                    .map(|&(k, w)| (w / (12.0 * self.hs * self.hs), self.v[at(k)][2])),
            ),
            (1, 1) => combine(
                D2.iter()
                    .map(|&(k, w)| (w / (12.0 * self.ht * self.ht), self.v[2][at(k)])),
            ),
            _ => combine(D1.iter().flat_map(|&(k, wk)| {
                D1.iter()
                    .map(move |&(l, wl)| (wk * wl / (144.0 * self.hs * self.ht), self.v[at(k)][at(l)]))
            })),
        }
    }
}

fn stencil_of<T, U: Copy>(src: &Stencil<U>, f: impl Fn(&U) -> T) -> Stencil<T> {
    Stencil {
        v: std::array::from_fn(|i| std::array::from_fn(|j| f(&src.v[i][j]))),
        hs: src.hs,
        ht: src.ht,
    }
}

fn step(x: f64, rel: f64) -> f64 {
    let h = rel * x.abs().max(1.0);
    (x + h) - x
}

/// Residuals of the Gauss, Codazzi and Ricci equations at `(s, t)` with the
/// default stencil step.
pub fn curvature_residuals(f: &Immersion, s: f64, t: f64) -> Result<CurvatureResiduals> {
    curvature_residuals_with_step(f, s, t, CURVATURE_STEP)
}

/// Same, with relative outer step `rel_step`.
pub fn curvature_residuals_with_step(
    f: &Immersion,
    s: f64,
    t: f64,
    rel_step: f64,
) -> Result<CurvatureResiduals> {
    if !(rel_step > 0.0 && rel_step.is_finite()) {
        return Err(Error::InvalidParameter(format!("stencil step {rel_step}")));
    }
    let hs = step(s, rel_step);
    let ht = step(t, rel_step);
    check_loci(f, s, t, hs, ht)?;

    let mut nodes: Vec<FundamentalData> = Vec::with_capacity(25);
    for i in -2..=2 {
        for j in -2..=2 {
            nodes.push(fundamental_data(f, s + i as f64 * hs, t + j as f64 * ht)?);
        }
    }
    let data = Stencil {
        v: std::array::from_fn(|i| std::array::from_fn(|j| nodes[5 * i + j])),
        hs,
        ht,
    };
    let c = data.centre();
    let form = f.form();
    let singular = |reason: &str| Error::SingularPoint {
        s,
        t,
        reason: reason.into(),
    };

    let cspan = tangent_span(form, &c.position, &c.fs, &c.ft);
    let idx = normal_indices(&cspan).ok_or_else(|| singular("no normal plane"))?;
    let mut normals = [[[c.fs; 2]; 5]; 5];
    let mut bases: Vec<Vec<Vector>> = Vec::with_capacity(25);
    for i in 0..5 {
        for j in 0..5 {
            let d = &data.v[i][j];
            let span = tangent_span(form, &d.position, &d.fs, &d.ft);
            let xi = normal_from_indices(&span, idx).ok_or_else(|| singular("normal frame degenerates"))?;
            normals[i][j] = xi;
            let mut basis = vec![xi[0], xi[1]];
            basis.extend(span);
            bases.push(basis);
        }
    }
    let xi = Stencil { v: normals, hs, ht };

    let gauss = gauss_residual(&data, form.c());
    let codazzi = codazzi_residual(&data, &cspan)?;
    let ricci = ricci_residual(&data, &xi, &bases).ok_or_else(|| singular("normal frame degenerates"))?;
    let out = CurvatureResiduals {
        gauss,
        codazzi,
        ricci,
    };
    if [gauss, codazzi, ricci].iter().all(|r| r.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NonFinite {
            what: "curvature residual",
            at: s,
        })
    }
}

/// Refuses stencils that cross an excluded locus.
fn check_loci(f: &Immersion, s: f64, t: f64, hs: f64, ht: f64) -> Result<()> {
    for locus in f.singular_loci() {
        let v0 = (locus.value)(s, t);
        for i in -2..=2 {
            for j in -2..=2 {
                let v = (locus.value)(s + i as f64 * hs, t + j as f64 * ht);
                if !(v.is_finite() && v != 0.0 && v.signum() == v0.signum()) {
                    return Err(Error::SingularPoint {
                        s,
                        t,
                        reason: format!("stencil crosses {} = 0", locus.label),
                    });
                }
            }
        }
    }
    Ok(())
}

type Mat2 = [[f64; 2]; 2];

fn inverse(g: &Mat2) -> Mat2 {
    let d = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    [[g[1][1] / d, -g[0][1] / d], [-g[1][0] / d, g[0][0] / d]]
}

fn alpha_ij(d: &FundamentalData, i: usize, j: usize) -> Vector {
    d.alpha[i + j]
}

/// `Gamma^l_ij` and `d_k Gamma^l_ij`, indexed `[l][i][j]` and `[k][l][i][j]`.
fn christoffel(g: &Stencil<Mat2>) -> ([[[f64; 2]; 2]; 2], [[[[f64; 2]; 2]; 2]; 2]) {
    let g0 = g.centre();
    let inv = inverse(&g0);
    let dg = [g.d(0), g.d(1)];
    let ddg = [[g.dd(0, 0), g.dd(0, 1)], [g.dd(1, 0), g.dd(1, 1)]];
    let t = |m: usize, i: usize, j: usize| dg[i][m][j] + dg[j][m][i] - dg[m][i][j];
    let dt = |k: usize, m: usize, i: usize, j: usize| ddg[k][i][m][j] + ddg[k][j][m][i] - ddg[k][m][i][j];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    let mut dgamma = [[[[0.0; 2]; 2]; 2]; 2];
    for l in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                gamma[l][i][j] = 0.5 * (0..2).map(|m| inv[l][m] * t(m, i, j)).sum::<f64>();
                for k in 0..2 {
                    let mut acc = 0.0;
                    for m in 0..2 {
                        let mut dinv = 0.0;
                        for a in 0..2 {
                            for b in 0..2 {
                                dinv -= inv[l][a] * dg[k][a][b] * inv[b][m];
                            }
                        }
                        acc += dinv * t(m, i, j) + inv[l][m] * dt(k, m, i, j);
                    }
                    dgamma[k][l][i][j] = 0.5 * acc;
                }
            }
        }
    }
    (gamma, dgamma)
}

fn gauss_residual(data: &Stencil<FundamentalData>, c: f64) -> f64 {
    let metric = stencil_of(data, |d| d.metric);
    let (gm, dgm) = christoffel(&metric);
    let d = data.centre();
    let g = d.metric;
    let inv = inverse(&g);
    let mut worst: f64 = 0.0;
    for k in 0..2 {
        let mut coeffs = [0.0; 2];
        for (l, coeff) in coeffs.iter_mut().enumerate() {
            let mut r = dgm[0][l][1][k] - dgm[1][l][0][k];
            for m in 0..2 {
                r += gm[l][0][m] * gm[m][1][k] - gm[l][1][m] * gm[m][0][k];
            }
            let delta = |a: usize| if a == l { 1.0 } else { 0.0 };
            r -= c * (g[1][k] * delta(0) - g[0][k] * delta(1));
            for m in 0..2 {
                r -= inv[l][m] * alpha_ij(&d, 0, m).dot(&alpha_ij(&d, 1, k));
                r += inv[l][m] * alpha_ij(&d, 1, m).dot(&alpha_ij(&d, 0, k));
            }
            *coeff = r;
        }
        worst = worst.max(d.tangent(coeffs).euclid_norm());
    }
    worst
}

fn codazzi_residual(data: &Stencil<FundamentalData>, span: &[Vector]) -> Result<f64> {
    let metric = stencil_of(data, |d| d.metric);
    let (gm, _) = christoffel(&metric);
    let alpha = stencil_of(data, |d| d.alpha);
    let d_alpha = [alpha.d(0), alpha.d(1)];
    let d = data.centre();
    let [s, t] = d.point;
    let normal_part = |v: &Vector| {
        orthogonal_component(span, v).ok_or_else(|| Error::SingularPoint {
            s,
            t,
            reason: "tangent plane and position are dependent".into(),
        })
    };
    // (nabla_i alpha)_jk
    let cov = |i: usize, j: usize, k: usize| -> Result<Vector> {
        let mut v = normal_part(&d_alpha[i][j + k])?;
        for m in 0..2 {
            v -= alpha_ij(&d, m, k).scaled(gm[m][i][j]);
            v -= alpha_ij(&d, j, m).scaled(gm[m][i][k]);
        }
        Ok(v)
    };
    let mut worst: f64 = 0.0;
    for k in 0..2 {
        worst = worst.max((cov(0, 1, k)? - cov(1, 0, k)?).euclid_norm());
    }
    Ok(worst)
}

/// `omega[a][b]` with `nabla_X xi_a = omega[a][b] xi_b`, from an ambient derivative.
fn connection(basis: &[Vector], dxi: &[Vector; 2]) -> Option<[[f64; 2]; 2]> {
    let mut w = [[0.0; 2]; 2];
    for a in 0..2 {
        let c = gram_coefficients(basis, &dxi[a])?;
        w[a] = [c[0], c[1]];
    }
    Some(w)
}

fn ricci_residual(
    data: &Stencil<FundamentalData>,
    xi: &Stencil<[Vector; 2]>,
    bases: &[Vec<Vector>],
) -> Option<f64> {
    let basis = |i: usize, j: usize| &bases[5 * i + j];
    // omega_s along the centre column (varying t), omega_t along the centre row.
    let mut w_s = [[[0.0; 2]; 2]; 5];
    let mut w_t = [[[0.0; 2]; 2]; 5];
    for n in 0..5 {
        w_s[n] = connection(basis(2, n), &xi.ds_at(n))?;
        w_t[n] = connection(basis(n, 2), &xi.dt_at(n))?;
    }
    let dt_ws = combine(D1.iter().map(|&(k, w)| (w / (12.0 * xi.ht), w_s[at(k)])));
    let ds_wt = combine(D1.iter().map(|&(k, w)| (w / (12.0 * xi.hs), w_t[at(k)])));
    let (ws, wt) = (w_s[2], w_t[2]);

    let d = data.centre();
    let inv = d.inverse_metric();
    let frame = xi.centre();
    let centre_basis = basis(2, 2);
    let mut worst: f64 = 0.0;
    for a in 0..2 {
        // A_xi d_j in chart coefficients.
        let shape = |j: usize| -> [f64; 2] {
            let p = [
                alpha_ij(&d, j, 0).dot(&frame[a]),
                alpha_ij(&d, j, 1).dot(&frame[a]),
            ];
            [
                inv[0][0] * p[0] + inv[0][1] * p[1],
                inv[1][0] * p[0] + inv[1][1] * p[1],
            ]
        };
        let rhs = d.alpha_of([1.0, 0.0], shape(1)) - d.alpha_of(shape(0), [0.0, 1.0]);
        let rhs_c = gram_coefficients(centre_basis, &rhs)?;
        let mut res = d.position.space().zero();
        for b in 0..2 {
            let mut lhs = ds_wt[a][b] - dt_ws[a][b];
            for m in 0..2 {
                lhs += wt[a][m] * ws[m][b] - ws[a][m] * wt[m][b];
            }
            res += frame[b].scaled(lhs - rhs_c[b]);
        }
        worst = worst.max(res.euclid_norm());
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::Rect;
    use crate::linalg::IndefiniteSpace;
    use crate::space_forms::SpaceForm;

    fn e42(c: [f64; 4]) -> Vector {
        IndefiniteSpace::E42.vector(&c).unwrap()
    }

    #[test]
    fn flat_plane_has_zero_residuals() {
        let d = Rect::new([-1.0, 1.0], [-1.0, 1.0]).unwrap();
        let f = Immersion::from_fn(|s, t| e42([0.0, 0.0, s, t]), SpaceForm::FLAT, d);
        let r = curvature_residuals(&f, 0.2, -0.3).unwrap();
        assert!(r.max() < 1e-9, "{r:?}");
    }

    #[test]
    fn curved_graph_in_flat_space() {
        let f = curved_graph();
        let r = curvature_residuals(&f, 0.8, 0.4).unwrap();
        assert!(r.max() < 1e-6, "{r:?}");
    }

    fn curved_graph() -> Immersion {
        let d = Rect::new([0.5, 1.2], [0.0, 1.0]).unwrap();
        Immersion::from_fn(
            |u, v| e42([0.3 * u.sin() * v.cos(), 0.2 * u * v * v, u, v]),
            SpaceForm::FLAT,
            d,
        )
    }

    #[test]
    fn gauss_term_sees_ambient_curvature() {
        let f = curved_graph();
        let (s, t, h) = (0.8, 0.4, 1e-2);
        let data = Stencil {
            v: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    fundamental_data(&f, s + (i as f64 - 2.0) * h, t + (j as f64 - 2.0) * h).unwrap()
                })
            }),
            hs: h,
            ht: h,
        };
        assert!(gauss_residual(&data, 0.0) < 1e-6);
        assert!(gauss_residual(&data, 1.0) > 0.5);
    }

    #[test]
    fn totally_geodesic_sphere_in_s42() {
        let d = Rect::new([0.5, 1.2], [0.0, 1.0]).unwrap();
        let f = Immersion::from_fn(
            |u, v| {
                IndefiniteSpace::E52
                    .vector(&[0.0, 0.0, u.sin() * v.cos(), u.sin() * v.sin(), u.cos()])
                    .unwrap()
            },
            SpaceForm::SPHERE,
            d,
        );
        let r = curvature_residuals(&f, 0.9, 0.3).unwrap();
        assert!(r.max() < 1e-6, "{r:?}");
    }

    #[test]
    fn stencil_across_locus_is_refused() {
        let d = Rect::new([-1.0, 1.0], [-1.0, 1.0]).unwrap();
        let f = Immersion::from_fn(|s, t| e42([0.0, 0.0, s, t]), SpaceForm::FLAT, d)
            .with_singular_locus("s", |s, _| s);
        assert!(matches!(
            curvature_residuals(&f, 0.015, 0.0),
            Err(Error::SingularPoint { .. })
        ));
    }
}
