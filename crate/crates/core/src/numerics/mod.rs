//! Differentiation, quadrature and second-order linear ODE machinery.

pub mod diff;
pub mod functions;
pub mod hermite;
pub mod ode;
pub mod quadrature;

pub use diff::{partial_derivs, Partials};
pub use functions::{scalar_fn, DerivativeFn, Expr, FnScalar, ProductFn, ScalarFn, ScalarFn1, Wave};
pub use hermite::{Grid1D, QuinticTable};
pub use ode::{solve_linear_second_order, solve_lode2, GridSpec, OdeSolution};
pub use quadrature::{cumulative_integral, Antiderivative};
