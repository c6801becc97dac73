//! Closed-form coefficients `phi`, `omega`, `gamma` of the local chart
//! `g = eps (ds^2 - phi^2 dt^2)` for the three values of `eps * c`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::immersion::StructureCoefficients;
use crate::numerics::ScalarFn1;

/// Which closed-form block applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartBlock {
    /// `c = 0`: `phi = A (s + m)`.
    Flat,
    /// `eps c = 1`: `phi = A cos(s + m)`.
    Circular,
    /// `eps c = -1`: `phi = A cosh(s + m)`.
    Hyperbolic,
}

#[derive(Debug, Clone)]
pub struct Prop32Chart {
    pub c: i32,
    pub eps: f64,
    pub block: ChartBlock,
    pub a: ScalarFn1,
    pub m: ScalarFn1,
    pub gamma0: ScalarFn1,
}

/// The chart functions for curvature `c`, sign `eps`, gauge `a > 0` and free
/// functions `m`, `gamma0`.
pub fn prop32_chart(c: i32, eps: f64, a: ScalarFn1, m: ScalarFn1, gamma0: ScalarFn1) -> Result<Prop32Chart> {
    if eps != 1.0 && eps != -1.0 {
        return Err(Error::InvalidParameter(format!(
            "eps must be +1 or -1, got {eps}"
        )));
    }
    let block = match (c, eps * f64::from(c)) {
        (0, _) => ChartBlock::Flat,
        (1 | -1, e) if e > 0.0 => ChartBlock::Circular,
        (1 | -1, _) => ChartBlock::Hyperbolic,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "curvature must be -1, 0 or 1, got {c}"
            )))
        }
    };
    Ok(Prop32Chart {
        c,
        eps,
        block,
        a,
        m,
        gamma0,
    })
}

impl Prop32Chart {
    /// `eps * c`.
    pub fn eps_c(&self) -> f64 {
        self.eps * f64::from(self.c)
    }

    fn u(&self, s: f64, t: f64) -> f64 {
        s + self.m.value(t)
    }

    pub fn phi(&self, s: f64, t: f64) -> f64 {
        let u = self.u(s, t);
        let a = self.a.value(t);
        match self.block {
            ChartBlock::Flat => a * u,
            ChartBlock::Circular => a * u.cos(),
            ChartBlock::Hyperbolic => a * u.cosh(),
        }
    }

    pub fn omega(&self, s: f64, t: f64) -> f64 {
        let u = self.u(s, t);
        match self.block {
            ChartBlock::Flat => -1.0 / u,
            ChartBlock::Circular => u.tan(),
            ChartBlock::Hyperbolic => -u.tanh(),
        }
    }

    pub fn gamma(&self, s: f64, t: f64) -> f64 {
        let u = self.u(s, t);
        let a = self.a.value(t);
        let dm = self.m.derivative(t, 1);
        let g0 = self.gamma0.value(t);
        match self.block {
            ChartBlock::Flat => g0 / u - dm / (a * u * u),
            ChartBlock::Circular => (g0 + u.tan() * dm / a) / u.cos(),
            ChartBlock::Hyperbolic => (g0 - u.tanh() * dm / a) / u.cosh(),
        }
    }

    /// `(|phi|, omega, gamma)` in the orientation the adapted frame uses
    /// (`e2` along `+d/dt`, so gamma picks up the sign of phi).
    pub fn expected_structure(&self, s: f64, t: f64) -> StructureCoefficients {
        let phi = self.phi(s, t);
        StructureCoefficients {
            omega: self.omega(s, t),
            gamma: phi.signum() * self.gamma(s, t),
            phi: phi.abs(),
        }
    }

    /// Zero set of `phi` excluded from the chart: `s + m(t)` (flat) or
    /// `cos(s + m(t))` (circular); the hyperbolic block has none.
    pub fn singular_value(&self, s: f64, t: f64) -> Option<f64> {
        let u = self.u(s, t);
        match self.block {
            ChartBlock::Flat => Some(u),
            ChartBlock::Circular => Some(u.cos()),
            ChartBlock::Hyperbolic => None,
        }
    }
}

/// Residuals of `phi_s = -phi omega`, `omega_s = omega^2 + eps c` and
/// `gamma_s = omega gamma + omega_t / phi` at one point, by central differences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ChartPdeResiduals {
    pub phi: f64,
    pub omega: f64,
    pub gamma: f64,
}

impl ChartPdeResiduals {
    pub fn max(&self) -> f64 {
        self.phi.max(self.omega).max(self.gamma)
    }
}

fn d4(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-3 * x.abs().max(1.0);
    let h = (x + h) - x;
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

pub fn chart_pde_residuals(chart: &Prop32Chart, s: f64, t: f64) -> ChartPdeResiduals {
    let phi = chart.phi(s, t);
    let omega = chart.omega(s, t);
    let gamma = chart.gamma(s, t);
    let phi_s = d4(|x| chart.phi(x, t), s);
    let omega_s = d4(|x| chart.omega(x, t), s);
    let omega_t = d4(|y| chart.omega(s, y), t);
    let gamma_s = d4(|x| chart.gamma(x, t), s);
    ChartPdeResiduals {
        phi: (phi_s + phi * omega).abs(),
        omega: (omega_s - omega * omega - chart.eps_c()).abs(),
        gamma: (gamma_s - omega * gamma - omega_t / phi).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Expr;
    use approx::assert_abs_diff_eq;

    fn k(c: f64) -> ScalarFn1 {
        Expr::constant(c).into_fn()
    }

    #[test]
    fn flat_block_with_constant_m() {
        let g0 = Expr::named("sin").unwrap().into_fn();
        let ch = prop32_chart(0, 1.0, k(1.0), k(0.0), g0).unwrap();
        assert_eq!(ch.block, ChartBlock::Flat);
        assert_abs_diff_eq!(ch.phi(2.0, 0.4), 2.0);
        assert_abs_diff_eq!(ch.omega(2.0, 0.4), -0.5);
        assert_abs_diff_eq!(ch.gamma(2.0, 0.4), 0.4f64.sin() / 2.0, epsilon = 1e-15);
        // Same chart for either eps.
        assert_eq!(
            prop32_chart(0, -1.0, k(1.0), k(0.0), k(0.0)).unwrap().block,
            ChartBlock::Flat
        );
    }

    #[test]
    fn circular_block_at_zero() {
        let a = Expr::poly(&[2.0, 0.5]).into_fn();
        let ch = prop32_chart(1, 1.0, a, k(0.0), k(0.3)).unwrap();
        assert_eq!(ch.block, ChartBlock::Circular);
        assert_abs_diff_eq!(ch.omega(0.0, 1.0), 0.0);
        assert_abs_diff_eq!(ch.phi(0.0, 1.0), 2.5);
        assert_eq!(
            prop32_chart(-1, -1.0, k(1.0), k(0.0), k(0.0)).unwrap().block,
            ChartBlock::Circular
        );
    }

    #[test]
    fn hyperbolic_block_trivial_gamma() {
        let ch = prop32_chart(1, -1.0, k(1.0), k(0.0), k(0.0)).unwrap();
        assert_eq!(ch.block, ChartBlock::Hyperbolic);
        for (s, t) in [(0.0, 0.0), (1.3, -0.2), (-0.7, 2.0)] {
            assert_eq!(ch.gamma(s, t), 0.0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(prop32_chart(2, 1.0, k(1.0), k(0.0), k(0.0)).is_err());
        assert!(prop32_chart(1, 0.5, k(1.0), k(0.0), k(0.0)).is_err());
    }

    #[test]
    fn pdes_hold_with_varying_gauge() {
        let a = Expr::Sum(vec![Expr::constant(1.5), Expr::named("sin").unwrap()]).into_fn();
        let m = Expr::poly(&[0.1, 0.2, -0.3]).into_fn();
        let g0 = Expr::named("cos").unwrap().into_fn();
        for (c, eps) in [(0, 1.0), (1, 1.0), (1, -1.0)] {
            let ch = prop32_chart(c, eps, a.clone(), m.clone(), g0.clone()).unwrap();
            let r = chart_pde_residuals(&ch, 0.9, 0.4);
            assert!(r.max() < 1e-8, "{c} {eps}: {r:?}");
        }
    }
}
