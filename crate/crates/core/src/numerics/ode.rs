//! Classical RK4 for `b'' = sigma * b + rhs(t)` with quintic dense output.

use serde::{Deserialize, Serialize};

use super::functions::{ScalarFn, ScalarFn1};
use super::hermite::{Grid1D, QuinticTable};
use crate::error::{Error, Result};

/// Requested span and step of a 1-D grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl GridSpec {
    pub const DEFAULT_STEP: f64 = 1e-3;

    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(end >= start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid [{start}, {end}] with step {step}"
            )));
        }
        Ok(Self { start, end, step })
    }

    pub fn with_default_step(start: f64, end: f64) -> Result<Self> {
        Self::new(start, end, Self::DEFAULT_STEP)
    }
}

/// Dense solution of `b'' = sigma * b + rhs` on a uniform grid.
///
/// `b` and `b'` are quintic Hermite interpolants; `b''` and higher derivatives
/// are recovered from the equation itself.
#[derive(Clone)]
pub struct OdeSolution {
    sigma: f64,
    rhs: ScalarFn1,
    b: QuinticTable,
    db: QuinticTable,
}

impl std::fmt::Debug for OdeSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OdeSolution")
            .field("sigma", &self.sigma)
            .field("grid", &self.b.grid)
            .finish()
    }
}

impl OdeSolution {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn grid(&self) -> Grid1D {
        self.b.grid
    }

    /// Node values of `b`.
    pub fn node_values(&self) -> &[f64] {
        &self.b.y
    }

    /// Node values of `b'`.
    pub fn node_derivatives(&self) -> &[f64] {
        &self.db.y
    }

    pub fn rhs(&self) -> &ScalarFn1 {
        &self.rhs
    }
}

impl ScalarFn for OdeSolution {
    fn value(&self, t: f64) -> f64 {
        self.b.eval(t, 0)
    }

    fn derivative(&self, t: f64, order: u32) -> f64 {
        match order {
            0 => self.b.eval(t, 0),
            1 => self.db.eval(t, 0),
            // b^(k) = sigma b^(k-2) + rhs^(k-2)
            k => self.sigma * self.derivative(t, k - 2) + self.rhs.derivative(t, k - 2),
        }
    }

    fn domain(&self) -> (f64, f64) {
        (self.b.grid.origin, self.b.grid.end())
    }
}

fn check(x: f64, what: &'static str, at: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite { what, at })
    }
}

/// Integrates `b'' = sigma * b + rhs(t)` from `(t0, b0, db0)` over `grid`,
/// forward and backward from `t0`.
///
/// `sigma` is `+1` for `b'' - b = rhs` and `-1` for `b'' + b = rhs`.
pub fn solve_lode2(
    sigma: f64,
    rhs: ScalarFn1,
    t0: f64,
    b0: f64,
    db0: f64,
    grid: GridSpec,
) -> Result<OdeSolution> {
    if sigma != 1.0 && sigma != -1.0 {
        return Err(Error::InvalidParameter(format!(
            "sigma must be +1 or -1, got {sigma}"
        )));
    }
    solve_linear_second_order(sigma, rhs, t0, b0, db0, grid)
}

/// Same integrator for any real coefficient `b'' = coef * b + rhs(t)`.
pub fn solve_linear_second_order(
    coef: f64,
    rhs: ScalarFn1,
    t0: f64,
    b0: f64,
    db0: f64,
    grid: GridSpec,
) -> Result<OdeSolution> {
    if !coef.is_finite() || !b0.is_finite() || !db0.is_finite() {
        return Err(Error::InvalidParameter("non-finite ODE data".into()));
    }
    let start = grid.start.min(t0);
    let end = grid.end.max(t0);
    let (g, anchor) = Grid1D::anchored(t0, start, end, grid.step);
    let mut b = vec![0.0; g.len];
    let mut db = vec![0.0; g.len];
    b[anchor] = b0;
    db[anchor] = db0;

    let accel = |t: f64, y: f64| -> Result<f64> {
        let r = check(rhs.value(t), "ode right-hand side", t)?;
        Ok(coef * y + r)
    };
    let step = |t: f64, y: f64, v: f64, h: f64| -> Result<(f64, f64)> {
        let k1y = v;
        let k1v = accel(t, y)?;
        let k2y = v + 0.5 * h * k1v;
        let k2v = accel(t + 0.5 * h, y + 0.5 * h * k1y)?;
        let k3y = v + 0.5 * h * k2v;
        let k3v = accel(t + 0.5 * h, y + 0.5 * h * k2y)?;
        let k4y = v + h * k3v;
        let k4v = accel(t + h, y + h * k3y)?;
        Ok((
            y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
            v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        ))
    };

    for k in anchor..g.len - 1 {
        let (y, v) = step(g.node(k), b[k], db[k], g.step)?;
        b[k + 1] = y;
        db[k + 1] = v;
    }
    for k in (1..=anchor).rev() {
        let (y, v) = step(g.node(k), b[k], db[k], -g.step)?;
        b[k - 1] = y;
        db[k - 1] = v;
    }

    let mut d2b = Vec::with_capacity(g.len);
    let mut d3b = Vec::with_capacity(g.len);
    for k in 0..g.len {
        let t = g.node(k);
        d2b.push(coef * b[k] + check(rhs.value(t), "ode right-hand side", t)?);
        d3b.push(coef * db[k] + check(rhs.derivative(t, 1), "ode right-hand side", t)?);
    }
    Ok(OdeSolution {
        sigma: coef,
        rhs,
        b: QuinticTable::new(g, b, db.clone(), d2b.clone()),
        db: QuinticTable::new(g, db, d2b, d3b),
    })
}
