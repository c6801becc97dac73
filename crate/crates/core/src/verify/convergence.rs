//! Observed orders of the ODE integrator and of the curvature residuals
//! under step halving.

use std::fmt;

use serde::Serialize;

use super::curvature::curvature_residuals_with_step;
use crate::error::{Error, Result};
use crate::immersion::Immersion;
use crate::numerics::{scalar_fn, solve_lode2, GridSpec, ScalarFn, ScalarFn1};

/// Coarsest ODE step of the study; finer runs halve it.
pub const ODE_COARSE_STEP: f64 = 0.1;
/// Coarse relative stencil step for the residual study; the fine run halves it.
pub const RESIDUAL_COARSE_STEP: f64 = 0.08;
/// Coarse residuals at or below this are roundoff, and carry no order.
pub const RESIDUAL_NOISE_FLOOR: f64 = 1e-8;
/// ODE errors at or below this are roundoff.
pub const ODE_NOISE_FLOOR: f64 = 1e-12;
pub const ODE_MIN_ORDER: f64 = 3.0;
pub const RESIDUAL_MIN_ORDER: f64 = 2.0;

/// `b'' = sigma b + rhs` with initial data at `t0`, integrated over `span`.
#[derive(Clone)]
pub struct OdeProblem {
    pub label: String,
    pub sigma: f64,
    pub rhs: ScalarFn1,
    pub t0: f64,
    pub b0: f64,
    pub db0: f64,
    pub span: [f64; 2],
    pub exact: Option<ScalarFn1>,
}

impl fmt::Debug for OdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeProblem")
            .field("label", &self.label)
            .field("sigma", &self.sigma)
            .field("t0", &self.t0)
            .field("span", &self.span)
            .finish()
    }
}

impl OdeProblem {
    /// `b'' = b`, `b(0) = b'(0) = 1` on `[0, 1]`, solved by `e^t`.
    pub fn reference() -> Self {
        OdeProblem {
            label: "reference b'' = b, b = e^t".into(),
            sigma: 1.0,
            rhs: scalar_fn(|_| 0.0),
            t0: 0.0,
            b0: 1.0,
            db0: 1.0,
            span: [0.0, 1.0],
            exact: Some(scalar_fn(f64::exp)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub quantity: String,
    pub steps: Vec<f64>,
    /// Errors (or successive differences) at the listed steps.
    pub errors: Vec<f64>,
    pub order: Option<f64>,
    pub at_noise_floor: bool,
    pub required: f64,
    pub pass: bool,
}

fn estimate(quantity: String, steps: Vec<f64>, errors: Vec<f64>, floor: f64, required: f64) -> OrderEstimate {
    let (coarse, fine) = (errors[errors.len() - 2], errors[errors.len() - 1]);
    let at_noise_floor = coarse <= floor;
    let order = (!at_noise_floor).then(|| (coarse / fine).log2());
    let pass = at_noise_floor || order.is_some_and(|p| p >= required);
    OrderEstimate {
        quantity,
        steps,
        errors,
        order,
        at_noise_floor,
        pass,
        required,
    }
}

/// Observed order of the integrator on `problem`: against the exact solution
/// when known, otherwise from three successive halvings.
pub fn ode_order(problem: &OdeProblem, coarse_step: f64) -> Result<OrderEstimate> {
    let [a, b] = problem.span;
    let run = |h: f64| {
        let grid = GridSpec::new(a, b, h)?;
        solve_lode2(
            problem.sigma,
            problem.rhs.clone(),
            problem.t0,
            problem.b0,
            problem.db0,
            grid,
        )
    };
    let n = ((problem.t0 - a) / coarse_step).floor() as i64;
    let m = ((b - problem.t0) / coarse_step).floor() as i64;
    let probes: Vec<f64> = (-n..=m).map(|k| problem.t0 + k as f64 * coarse_step).collect();
    let sup = |f: &dyn Fn(f64) -> f64| probes.iter().map(|&t| f(t).abs()).fold(0.0, f64::max);
    let (steps, errors) = match &problem.exact {
        Some(exact) => {
            let steps = vec![coarse_step, coarse_step / 2.0];
            let errs = steps
                .iter()
                .map(|&h| {
                    let sol = run(h)?;
                    Ok(sup(&|t| sol.value(t) - exact.value(t)))
                })
                .collect::<Result<Vec<_>>>()?;
            (steps, errs)
        }
        None => {
            let steps = vec![coarse_step, coarse_step / 2.0, coarse_step / 4.0];
            let sols = steps.iter().map(|&h| run(h)).collect::<Result<Vec<_>>>()?;
            let errs = vec![
                sup(&|t| sols[0].value(t) - sols[1].value(t)),
                sup(&|t| sols[1].value(t) - sols[2].value(t)),
            ];
            (steps, errs)
        }
    };
    Ok(estimate(
        problem.label.clone(),
        steps,
        errors,
        ODE_NOISE_FLOOR,
        ODE_MIN_ORDER,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub ode: OrderEstimate,
    pub residuals: Vec<OrderEstimate>,
    pub points: Vec<[f64; 2]>,
    /// Probe points whose coarse stencil reached an excluded locus.
    pub skipped: Vec<[f64; 2]>,
    pub pass: bool,
}

/// Gauss, Codazzi and Ricci residual orders at `points` (max over points) when
/// the stencil step goes from `coarse` to `coarse / 2`.
pub fn residual_orders(
    f: &Immersion,
    points: &[[f64; 2]],
    coarse: f64,
) -> Result<(Vec<OrderEstimate>, Vec<[f64; 2]>, Vec<[f64; 2]>)> {
    let steps = [coarse, coarse / 2.0];
    let mut maxima = [[0.0f64; 3]; 2];
    let (mut used, mut skipped) = (Vec::new(), Vec::new());
    for &[s, t] in points {
        let pair = steps
            .iter()
            .map(|&h| curvature_residuals_with_step(f, s, t, h))
            .collect::<Result<Vec<_>>>();
        match pair {
            Ok(pair) => {
                for (k, r) in pair.iter().enumerate() {
                    for (slot, v) in maxima[k].iter_mut().zip([r.gauss, r.codazzi, r.ricci]) {
                        *slot = slot.max(v);
                    }
                }
                used.push([s, t]);
            }
            Err(Error::SingularPoint { .. }) => skipped.push([s, t]),
            Err(e) => return Err(e),
        }
    }
    if used.is_empty() {
        return Err(Error::InvalidParameter(
            "no probe point admits the coarse curvature stencil".into(),
        ));
    }
    let names = ["gauss", "codazzi", "ricci"];
    let out = (0..3)
        .map(|k| {
            estimate(
                format!("{} residual", names[k]),
                steps.to_vec(),
                vec![maxima[0][k], maxima[1][k]],
                RESIDUAL_NOISE_FLOOR,
                RESIDUAL_MIN_ORDER,
            )
        })
        .collect();
    Ok((out, used, skipped))
}

/// Full study: integrator order on `ode` and residual orders at `points`.
pub fn convergence_study(f: &Immersion, ode: &OdeProblem, points: &[[f64; 2]]) -> Result<ConvergenceReport> {
    let ode = ode_order(ode, ODE_COARSE_STEP)?;
    let (residuals, points, skipped) = residual_orders(f, points, RESIDUAL_COARSE_STEP)?;
    let pass = ode.pass && residuals.iter().all(|r| r.pass);
    Ok(ConvergenceReport {
        ode,
        residuals,
        points,
        skipped,
        pass,
    })
}
