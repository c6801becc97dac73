//! Quintic Hermite dense output on a uniform grid.

use serde::Serialize;

/// Uniform nodes `origin + k * step`, `k = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    pub origin: f64,
    pub step: f64,
    pub len: usize,
}

impl Grid1D {
    /// Nodes `anchor + k * step` covering `[start, end]`, with `anchor` itself a node.
    pub fn anchored(anchor: f64, start: f64, end: f64, step: f64) -> (Grid1D, usize) {
        let back = ((anchor - start) / step).ceil().max(0.0) as usize;
        let fwd = ((end - anchor) / step).ceil().max(0.0) as usize;
        (
            Grid1D {
                origin: anchor - back as f64 * step,
                step,
                len: back + fwd + 1,
            },
            back,
        )
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.node(self.len - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |k| self.node(k))
    }

    /// Cell index and local coordinate in `[0, 1]`; `None` outside the grid.
    #[inline]
    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        if self.len < 2 || !t.is_finite() {
            return None;
        }
        let x = (t - self.origin) / self.step;
        let last = (self.len - 1) as f64;
        // Allow rounding slack at the ends.
        if x < -1e-9 || x > last + 1e-9 {
            return None;
        }
        let k = (x.floor().max(0.0) as usize).min(self.len - 2);
        Some((k, (x - k as f64).clamp(0.0, 1.0)))
    }
}

// Basis polynomial coefficients (powers u^0..u^5) for, in order:
// p0, h*m0, h^2*a0, h^2*a1, h*m1, p1.
const BASIS: [[f64; 6]; 6] = [
    [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
    [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
    [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
    [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
    [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
];

fn basis_eval(coeffs: &[f64; 6], u: f64, order: u32) -> f64 {
    let mut acc = 0.0;
    for j in (order as usize..6).rev() {
        let falling = ((j + 1 - order as usize)..=j).fold(1.0, |p, x| p * x as f64);
        acc = acc * u + coeffs[j] * falling;
    }
    acc
}

/// Values with first and second derivatives at the nodes of a [`Grid1D`].
#[derive(Debug, Clone)]
pub struct QuinticTable {
    pub grid: Grid1D,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    pub d2y: Vec<f64>,
}

impl QuinticTable {
    pub fn new(grid: Grid1D, y: Vec<f64>, dy: Vec<f64>, d2y: Vec<f64>) -> Self {
        debug_assert!(y.len() == grid.len && dy.len() == grid.len && d2y.len() == grid.len);
        Self { grid, y, dy, d2y }
    }

    /// Interpolant or its derivative (order ≤ 2); NaN outside the grid.
    pub fn eval(&self, t: f64, order: u32) -> f64 {
        let Some((k, u)) = self.grid.locate(t) else {
            return f64::NAN;
        };
        let h = self.grid.step;
        let data = [
            self.y[k],
            h * self.dy[k],
            h * h * self.d2y[k],
            h * h * self.d2y[k + 1],
            h * self.dy[k + 1],
            self.y[k + 1],
        ];
        let mut acc = 0.0;
        for (b, d) in BASIS.iter().zip(data) {
            acc += basis_eval(b, u, order) * d;
        }
        acc / h.powi(order as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_interpolates_end_data() {
        // Each basis function has exactly one unit datum among the six end conditions.
        let ends = |b: &[f64; 6]| {
            [
                basis_eval(b, 0.0, 0),
                basis_eval(b, 0.0, 1),
                basis_eval(b, 0.0, 2),
                basis_eval(b, 1.0, 2),
                basis_eval(b, 1.0, 1),
                basis_eval(b, 1.0, 0),
            ]
        };
        for (i, b) in BASIS.iter().enumerate() {
            let e = ends(b);
            for (j, x) in e.iter().enumerate() {
                assert_abs_diff_eq!(*x, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn reproduces_quintic_polynomials() {
        let p = |t: f64| 1.0 - 2.0 * t + 0.5 * t.powi(3) + 0.1 * t.powi(5);
        let dp = |t: f64| -2.0 + 1.5 * t * t + 0.5 * t.powi(4);
        let d2p = |t: f64| 3.0 * t + 2.0 * t.powi(3);
        let (grid, _) = Grid1D::anchored(0.0, -1.0, 1.0, 0.25);
        let table = QuinticTable::new(
            grid,
            grid.nodes().map(p).collect(),
            grid.nodes().map(dp).collect(),
            grid.nodes().map(d2p).collect(),
        );
        for t in [-0.93, -0.31, 0.0, 0.12, 0.77, 1.0] {
            assert_abs_diff_eq!(table.eval(t, 0), p(t), epsilon = 1e-13);
            assert_abs_diff_eq!(table.eval(t, 1), dp(t), epsilon = 1e-12);
            assert_abs_diff_eq!(table.eval(t, 2), d2p(t), epsilon = 1e-11);
        }
        assert!(table.eval(1.5, 0).is_nan());
    }

    #[test]
    fn anchored_grid_contains_anchor() {
        let (g, k) = Grid1D::anchored(0.3, -1.0, 2.0, 0.1);
        assert_abs_diff_eq!(g.node(k), 0.3, epsilon = 1e-15);
        assert!(g.origin <= -1.0 + 1e-12 && g.end() >= 2.0 - 1e-12);
    }
}
