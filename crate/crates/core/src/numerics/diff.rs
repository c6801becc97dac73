//! Fourth-order central finite differences of chart maps.

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::numerics::functions::exact_step;

/// `(eps)^(1/6)`: balances truncation and roundoff for 4th-order second derivatives.
pub fn second_order_step(x: f64) -> f64 {
    f64::EPSILON.powf(1.0 / 6.0) * x.abs().max(1.0)
}

/// `(eps)^(1/5)`: same balance for 4th-order first derivatives.
pub fn first_order_step(x: f64) -> f64 {
    f64::EPSILON.powf(0.2) * x.abs().max(1.0)
}

const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
const D2: [(f64, f64); 5] = [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)];

/// Partial derivatives of a chart map at one point.
#[derive(Debug, Clone, Copy)]
pub struct Partials {
    pub value: Vector,
    pub ds: Vector,
    pub dt: Vector,
    pub dss: Option<Vector>,
    pub dst: Option<Vector>,
    pub dtt: Option<Vector>,
}

impl Partials {
    pub fn second(&self) -> Option<[Vector; 3]> {
        Some([self.dss?, self.dst?, self.dtt?])
    }
}

fn eval<F: Fn(f64, f64) -> Vector>(f: &F, s: f64, t: f64) -> Result<Vector> {
    let v = f(s, t);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::EvaluationFailure { s, t })
    }
}

/// First (and optionally second) partials of `f` at `(s, t)`.
///
/// `order` is 1 or 2. First derivatives use a step of `eps^(1/5)`, second
/// and mixed derivatives `eps^(1/6)`, both scaled by `max(1, |coordinate|)`.
pub fn partial_derivs<F>(f: &F, s: f64, t: f64, order: u32) -> Result<Partials>
where
    F: Fn(f64, f64) -> Vector,
{
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidParameter(format!("derivative order {order}")));
    }
    let value = eval(f, s, t)?;
    let zero = value.space().zero();

    let hs = exact_step(s, first_order_step(s));
    let ht = exact_step(t, first_order_step(t));
    let mut ds = zero;
    let mut dt = zero;
    for (k, w) in D1 {
        ds += eval(f, s + k * hs, t)?.scaled(w);
        dt += eval(f, s, t + k * ht)?.scaled(w);
    }
    ds = ds.scaled(1.0 / (12.0 * hs));
    dt = dt.scaled(1.0 / (12.0 * ht));

    let mut out = Partials {
        value,
        ds,
        dt,
        dss: None,
        dst: None,
        dtt: None,
    };
    if order == 1 {
        return Ok(out);
    }

    let hs = exact_step(s, second_order_step(s));
    let ht = exact_step(t, second_order_step(t));
    let mut dss = zero;
    let mut dtt = zero;
    for (k, w) in D2 {
        let (a, b) = if k == 0.0 {
            (value, value)
        } else {
            (eval(f, s + k * hs, t)?, eval(f, s, t + k * ht)?)
        };
        dss += a.scaled(w);
        dtt += b.scaled(w);
    }
    let mut dst = zero;
    for (i, wi) in D1 {
        for (j, wj) in D1 {
            dst += eval(f, s + i * hs, t + j * ht)?.scaled(wi * wj);
        }
    }
    out.dss = Some(dss.scaled(1.0 / (12.0 * hs * hs)));
    out.dtt = Some(dtt.scaled(1.0 / (12.0 * ht * ht)));
    out.dst = Some(dst.scaled(1.0 / (144.0 * hs * ht)));
    Ok(out)
}
