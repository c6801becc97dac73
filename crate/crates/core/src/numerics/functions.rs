//! Scalar functions of one variable with derivative access.

use std::fmt;
use std::sync::Arc;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

/// A smooth real function on an interval.
///
/// `derivative` defaults to central finite differences; implementations with
/// closed forms override it.
pub trait ScalarFn: Send + Sync {
    fn value(&self, t: f64) -> f64;

    fn derivative(&self, t: f64, order: u32) -> f64 {
        fd_derivative(|x| self.value(x), t, order)
    }

    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

pub type ScalarFn1 = Arc<dyn ScalarFn>;

impl fmt::Debug for dyn ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.domain();
        write!(f, "ScalarFn on [{a}, {b}]")
    }
}

/// Central differences of order 4 (orders 1, 2) or 2 (order 3).
pub(crate) fn fd_derivative<F: Fn(f64) -> f64>(f: F, t: f64, order: u32) -> f64 {
    let scale = t.abs().max(1.0);
    match order {
        0 => f(t),
        1 => {
            let h = exact_step(t, f64::EPSILON.powf(0.2) * scale);
            (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
        }
        2 => {
            let h = exact_step(t, f64::EPSILON.powf(1.0 / 6.0) * scale);
            (-f(t - 2.0 * h) + 16.0 * f(t - h) - 30.0 * f(t) + 16.0 * f(t + h) - f(t + 2.0 * h))
                / (12.0 * h * h)
        }
        3 => {
            let h = exact_step(t, f64::EPSILON.powf(0.2) * scale);
            (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h * h * h)
        }
        _ => f64::NAN,
    }
}

/// Rounds `h` so that `x + h` is exactly representable relative to `x`.
#[inline]
pub(crate) fn exact_step(x: f64, h: f64) -> f64 {
    let tmp = x + h;
    tmp - x
}

/// Wraps a closure as a [`ScalarFn`] with finite-difference derivatives.
pub struct FnScalar<F>(pub F);

impl<F: Fn(f64) -> f64 + Send + Sync> ScalarFn for FnScalar<F> {
    fn value(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

pub fn scalar_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> ScalarFn1 {
    Arc::new(FnScalar(f))
}

/// Pointwise product of two functions, derivatives by the Leibniz rule.
pub struct ProductFn(pub ScalarFn1, pub ScalarFn1);

impl ScalarFn for ProductFn {
    fn value(&self, t: f64) -> f64 {
        self.0.value(t) * self.1.value(t)
    }

    fn derivative(&self, t: f64, order: u32) -> f64 {
        (0..=order)
            .map(|k| binomial(order, k) * self.0.derivative(t, k) * self.1.derivative(t, order - k))
            .sum()
    }

    fn domain(&self) -> (f64, f64) {
        intersect(self.0.domain(), self.1.domain())
    }
}

/// The `shift`-th derivative of another function, as a function.
pub struct DerivativeFn {
    pub inner: ScalarFn1,
    pub shift: u32,
}

impl ScalarFn for DerivativeFn {
    fn value(&self, t: f64) -> f64 {
        self.inner.derivative(t, self.shift)
    }

    fn derivative(&self, t: f64, order: u32) -> f64 {
        self.inner.derivative(t, self.shift + order)
    }

    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }
}

fn intersect(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0.max(b.0), a.1.min(b.1))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Parameters of a named built-in `amp * g(freq * t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wave {
    #[serde(default = "one")]
    pub amp: f64,
    #[serde(default = "one")]
    pub freq: f64,
    #[serde(default)]
    pub phase: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for Wave {
    fn default() -> Self {
        Wave {
            amp: 1.0,
            freq: 1.0,
            phase: 0.0,
        }
    }
}

/// Closed grammar of smooth functions: named built-ins with real parameters,
/// and sums and products of them. Values and derivatives of every order are
/// exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Const(f64),
    /// Coefficients in increasing degree.
    Poly(Vec<f64>),
    Sin(Wave),
    Cos(Wave),
    Sinh(Wave),
    Cosh(Wave),
    Exp(Wave),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ExprRepr {
    Const(f64),
    Poly(Vec<f64>),
    Sin(Wave),
    Cos(Wave),
    Sinh(Wave),
    Cosh(Wave),
    Exp(Wave),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ExprInput {
    Name(String),
    Number(f64),
    Tagged(ExprRepr),
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ExprInput::deserialize(d)? {
            ExprInput::Number(c) => Ok(Expr::Const(c)),
            ExprInput::Name(name) => {
                Expr::named(&name).ok_or_else(|| de::Error::custom(format!("unknown function name `{name}`")))
            }
            ExprInput::Tagged(r) => Ok(match r {
                ExprRepr::Const(c) => Expr::Const(c),
                ExprRepr::Poly(c) => Expr::Poly(c),
                ExprRepr::Sin(w) => Expr::Sin(w),
                ExprRepr::Cos(w) => Expr::Cos(w),
                ExprRepr::Sinh(w) => Expr::Sinh(w),
                ExprRepr::Cosh(w) => Expr::Cosh(w),
                ExprRepr::Exp(w) => Expr::Exp(w),
                ExprRepr::Sum(v) => Expr::Sum(v),
                ExprRepr::Product(v) => Expr::Product(v),
            }),
        }
    }
}

impl Expr {
    /// Unit-parameter built-in by name (`sin`, `cos`, `sinh`, `cosh`, `exp`).
    pub fn named(name: &str) -> Option<Expr> {
        let w = Wave::default();
        Some(match name {
            "sin" => Expr::Sin(w),
            "cos" => Expr::Cos(w),
            "sinh" => Expr::Sinh(w),
            "cosh" => Expr::Cosh(w),
            "exp" => Expr::Exp(w),
            _ => return None,
        })
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn poly(coeffs: &[f64]) -> Expr {
        Expr::Poly(coeffs.to_vec())
    }

    /// Nesting depth of sums and products (a bare built-in has depth 0).
    pub fn depth(&self) -> usize {
        match self {
            Expr::Sum(v) | Expr::Product(v) => 1 + v.iter().map(Expr::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn into_fn(self) -> ScalarFn1 {
        Arc::new(self)
    }

    fn eval(&self, t: f64, order: u32) -> f64 {
        match self {
            Expr::Const(c) => {
                if order == 0 {
                    *c
                } else {
                    0.0
                }
            }
            Expr::Poly(coeffs) => {
                // Horner on the differentiated coefficients.
                let n = coeffs.len();
                let k = order as usize;
                if k >= n {
                    return 0.0;
                }
                let mut acc = 0.0;
                for j in (k..n).rev() {
                    let falling = ((j - k + 1)..=j).fold(1.0, |p, x| p * x as f64);
                    acc = acc * t + coeffs[j] * falling;
                }
                acc
            }
            Expr::Sin(w) => {
                let arg = w.freq * t + w.phase;
                w.amp * w.freq.powi(order as i32) * sin_derivative(arg, order)
            }
            Expr::Cos(w) => {
                let arg = w.freq * t + w.phase;
                w.amp * w.freq.powi(order as i32) * cos_derivative(arg, order)
            }
            Expr::Sinh(w) => {
                let arg = w.freq * t + w.phase;
                let base = if order % 2 == 0 { arg.sinh() } else { arg.cosh() };
                w.amp * w.freq.powi(order as i32) * base
            }
            Expr::Cosh(w) => {
                let arg = w.freq * t + w.phase;
                let base = if order % 2 == 0 { arg.cosh() } else { arg.sinh() };
                w.amp * w.freq.powi(order as i32) * base
            }
            Expr::Exp(w) => w.amp * w.freq.powi(order as i32) * (w.freq * t + w.phase).exp(),
            Expr::Sum(terms) => terms.iter().map(|e| e.eval(t, order)).sum(),
            Expr::Product(factors) => product_derivative(factors, t, order),
        }
    }
}

fn sin_derivative(x: f64, order: u32) -> f64 {
    match order % 4 {
        0 => x.sin(),
        1 => x.cos(),
        2 => -x.sin(),
        _ => -x.cos(),
    }
}

fn cos_derivative(x: f64, order: u32) -> f64 {
    match order % 4 {
        0 => x.cos(),
        1 => -x.sin(),
        2 => -x.cos(),
        _ => x.sin(),
    }
}

fn product_derivative(factors: &[Expr], t: f64, order: u32) -> f64 {
    match factors {
        [] => {
            if order == 0 {
                1.0
            } else {
                0.0
            }
        }
        [only] => only.eval(t, order),
        [head, rest @ ..] => (0..=order)
            .map(|k| binomial(order, k) * head.eval(t, k) * product_derivative(rest, t, order - k))
            .sum(),
    }
}

impl ScalarFn for Expr {
    fn value(&self, t: f64) -> f64 {
        self.eval(t, 0)
    }

    fn derivative(&self, t: f64, order: u32) -> f64 {
        self.eval(t, order)
    }
}
