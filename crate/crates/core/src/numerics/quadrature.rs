//! Cumulative Simpson quadrature with dense output.

use super::functions::{ScalarFn, ScalarFn1};
use super::hermite::{Grid1D, QuinticTable};
use super::ode::GridSpec;
use crate::error::{Error, Result};

/// `t -> ∫_{t0}^t g`, dense between nodes; its derivatives delegate to `g`.
#[derive(Clone)]
pub struct Antiderivative {
    integrand: ScalarFn1,
    table: QuinticTable,
    t0: f64,
}

impl std::fmt::Debug for Antiderivative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Antiderivative")
            .field("t0", &self.t0)
            .field("grid", &self.table.grid)
            .finish()
    }
}

impl Antiderivative {
    pub fn base_point(&self) -> f64 {
        self.t0
    }

    pub fn grid(&self) -> Grid1D {
        self.table.grid
    }
}

impl ScalarFn for Antiderivative {
    fn value(&self, t: f64) -> f64 {
        self.table.eval(t, 0)
    }

    fn derivative(&self, t: f64, order: u32) -> f64 {
        let (a, b) = self.domain();
        if !(t >= a && t <= b) {
            return f64::NAN;
        }
        match order {
            0 => self.value(t),
            k => self.integrand.derivative(t, k - 1),
        }
    }

    fn domain(&self) -> (f64, f64) {
        (self.table.grid.origin, self.table.grid.end())
    }
}

/// Cumulative integral of `g` from `t0`, vanishing at `t0`.
///
/// Each cell uses Simpson's rule with its midpoint, so node values carry
/// `O(h^4)` error; between nodes the antiderivative is a quintic Hermite
/// interpolant built from `g` and `g'`.
pub fn cumulative_integral(g: ScalarFn1, t0: f64, grid: GridSpec) -> Result<Antiderivative> {
    let start = grid.start.min(t0);
    let end = grid.end.max(t0);
    let (nodes, anchor) = Grid1D::anchored(t0, start, end, grid.step);
    let h = nodes.step;
    let at = |t: f64| -> Result<f64> {
        let v = g.value(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                what: "integrand",
                at: t,
            })
        }
    };
    let gv: Vec<f64> = (0..nodes.len).map(|k| at(nodes.node(k))).collect::<Result<_>>()?;
    let cell = |k: usize| -> Result<f64> {
        let mid = at(nodes.node(k) + 0.5 * h)?;
        Ok(h / 6.0 * (gv[k] + 4.0 * mid + gv[k + 1]))
    };
    let mut y = vec![0.0; nodes.len];
    for k in anchor..nodes.len - 1 {
        y[k + 1] = y[k] + cell(k)?;
    }
    for k in (0..anchor).rev() {
        y[k] = y[k + 1] - cell(k)?;
    }
    let dg: Vec<f64> = nodes.nodes().map(|t| g.derivative(t, 1)).collect();
    if let Some(k) = dg.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "integrand derivative",
            at: nodes.node(k),
        });
    }
    Ok(Antiderivative {
        table: QuinticTable::new(nodes, y, gv, dg),
        integrand: g,
        t0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::functions::{scalar_fn, Expr, ProductFn};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn constant_integrand() {
        let one = Expr::constant(1.0).into_fn();
        let a = cumulative_integral(one, 0.0, GridSpec::new(-1.0, 1.0, 1e-3).unwrap()).unwrap();
        for t in [-0.77, 0.0, 0.3331, 1.0] {
            assert_abs_diff_eq!(a.value(t), t, epsilon = 1e-13);
        }
    }

    #[test]
    fn cosine_to_sine() {
        let cos = Expr::named("cos").unwrap().into_fn();
        let a = cumulative_integral(cos, 0.0, GridSpec::new(0.0, PI, 1e-3).unwrap()).unwrap();
        let worst = (0..=1000)
            .map(|i| PI * i as f64 / 1000.0 * 0.99999)
            .map(|t| (a.value(t) - t.sin()).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-10, "worst {worst}");
        assert_abs_diff_eq!(a.derivative(1.0, 1), 1f64.cos(), epsilon = 1e-15);
    }

    #[test]
    fn kappa_times_identity_derivative() {
        // g = kappa * b' with kappa = 4/3 and b(t) = t.
        let kappa = Expr::constant(4.0 / 3.0).into_fn();
        let db = Expr::constant(1.0).into_fn();
        let g = std::sync::Arc::new(ProductFn(kappa, db));
        let a = cumulative_integral(g, 0.0, GridSpec::new(0.0, 2.0, 1e-3).unwrap()).unwrap();
        assert_abs_diff_eq!(a.value(1.5), 2.0, epsilon = 1e-13);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let bad = scalar_fn(|t| if t > 0.5 { f64::INFINITY } else { 1.0 });
        assert!(cumulative_integral(bad, 0.0, GridSpec::new(0.0, 1.0, 0.1).unwrap()).is_err());
    }
}
