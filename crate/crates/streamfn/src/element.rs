//! The Bogner-Fox-Schmit rectangle: bicubic Hermite shape functions on the
//! reference square `[0,1]^2` with value, d/dx, d/dy and d2/dxdy degrees of
//! freedom at each vertex, plus tensor-product Gauss-Legendre quadrature.
//!
//! Local DOF ordering is fixed: vertices counter-clockwise from the
//! lower-left `(LL, LR, UR, UL)`, and per vertex the kinds
//! `(Value, Dx, Dy, Dxy)`, giving local index `4 * vertex + kind`.
//!
//! Reference shapes are tensor products of the 1D cubic Hermite pair on
//! `[0,1]`; the value pair is `1 - 3t^2 + 2t^3` / `3t^2 - 2t^3` and the
//! slope pair `t - 2t^2 + t^3` / `-t^2 + t^3`. On a physical `hx x hy`
//! rectangle a derivative DOF's shape picks up the factor from
//! [`physical_scaling`] so the global coefficients are physical derivatives.

use crate::Error;

/// The four Hermite degrees of freedom stored at every node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    Value,
    Dx,
    Dy,
    Dxy,
}

impl DofKind {
    pub const ALL: [DofKind; 4] = [DofKind::Value, DofKind::Dx, DofKind::Dy, DofKind::Dxy];

    pub fn index(self) -> usize {
        match self {
            DofKind::Value => 0,
            DofKind::Dx => 1,
            DofKind::Dy => 2,
            DofKind::Dxy => 3,
        }
    }
}

/// Number of local degrees of freedom on one rectangle.
pub const N_LOCAL: usize = 16;

/// All 16 shape functions and their reference derivatives at one point.
#[derive(Debug, Clone)]
pub struct BasisEval {
    pub value: [f64; N_LOCAL],
    pub dxi: [f64; N_LOCAL],
    pub deta: [f64; N_LOCAL],
    pub dxixi: [f64; N_LOCAL],
    pub dxieta: [f64; N_LOCAL],
    pub detaeta: [f64; N_LOCAL],
}

// 1D cubic Hermite basis on [0,1]: (value at 0, value at 1, slope at 0,
// slope at 1), each returned with first and second derivative.
fn hermite1d(t: f64) -> [[f64; 3]; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        [1.0 - 3.0 * t2 + 2.0 * t3, -6.0 * t + 6.0 * t2, -6.0 + 12.0 * t],
        [3.0 * t2 - 2.0 * t3, 6.0 * t - 6.0 * t2, 6.0 - 12.0 * t],
        [t - 2.0 * t2 + t3, 1.0 - 4.0 * t + 3.0 * t2, -4.0 + 6.0 * t],
        [-t2 + t3, -2.0 * t + 3.0 * t2, -2.0 + 6.0 * t],
    ]
}

// Vertex order LL, LR, UR, UL as (a, b) coordinates of the reference square.
const VERTEX_COORDS: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Evaluates all 16 reference shape functions at `(xi, eta)`.
///
/// Points outside `[0,1]^2` are permitted (polynomial extrapolation).
pub fn shape_eval(xi: f64, eta: f64) -> BasisEval {
    let hx = hermite1d(xi);
    let hy = hermite1d(eta);

    let mut out = BasisEval {
        value: [0.0; N_LOCAL],
        dxi: [0.0; N_LOCAL],
        deta: [0.0; N_LOCAL],
        dxixi: [0.0; N_LOCAL],
        dxieta: [0.0; N_LOCAL],
        detaeta: [0.0; N_LOCAL],
    };

    for (v, &(a, b)) in VERTEX_COORDS.iter().enumerate() {
        // per-kind 1D factor selection: Value = (val_a, val_b),
        // Dx = (slope_a, val_b), Dy = (val_a, slope_b), Dxy = (slope_a, slope_b)
        let factors = [(a, b), (a + 2, b), (a, b + 2), (a + 2, b + 2)];
        for (kind, &(fa, fb)) in factors.iter().enumerate() {
            let k = 4 * v + kind;
            let fx = hx[fa];
            let fy = hy[fb];
            out.value[k] = fx[0] * fy[0];
            out.dxi[k] = fx[1] * fy[0];
            out.deta[k] = fx[0] * fy[1];
            out.dxixi[k] = fx[2] * fy[0];
            out.dxieta[k] = fx[1] * fy[1];
            out.detaeta[k] = fx[0] * fy[2];
        }
    }
    out
}

/// Per-DOF factors converting reference shapes to physical ones on an
/// `hx x hy` rectangle: derivative DOFs scale by the widths they
/// differentiate along, so global coefficients stay physical derivatives.
pub fn physical_scaling(hx: f64, hy: f64) -> [f64; N_LOCAL] {
    let mut scale = [1.0; N_LOCAL];
    for v in 0..4 {
        scale[4 * v + DofKind::Dx.index()] = hx;
        scale[4 * v + DofKind::Dy.index()] = hy;
        scale[4 * v + DofKind::Dxy.index()] = hx * hy;
    }
    scale
}

/// Tensor-product Gauss-Legendre rule on the reference square.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
    /// Points per axis.
    pub order: usize,
}

/// Gauss-Legendre nodes and weights on [0, 1], `n` points.
fn gauss_1d(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on the Legendre polynomial, standard starting guesses.
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        // map from [-1,1] to [0,1]
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

// Legendre polynomial P_n and derivative at x via the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Builds the `n x n` tensor Gauss rule, `1 <= n <= 10`.
pub fn gauss_rule(n: usize) -> Result<QuadratureRule, Error> {
    if n == 0 || n > 10 {
        return Err(Error::InvalidArgument(format!(
            "quadrature order must be in 1..=10, got {n}"
        )));
    }
    let (nodes, w) = gauss_1d(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            points.push((nodes[i], nodes[j]));
            weights.push(w[i] * w[j]);
        }
    }
    Ok(QuadratureRule { points, weights, order: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    // applies the reference DOF functional (value / d_xi / d_eta / d_xieta
    // at a vertex) to shape j by evaluating at that vertex
    fn dof_functional(dof: usize, j: usize) -> f64 {
        let v = dof / 4;
        let kind = dof % 4;
        let (a, b) = VERTEX_COORDS[v];
        let basis = shape_eval(a as f64, b as f64);
        match kind {
            0 => basis.value[j],
            1 => basis.dxi[j],
            2 => basis.deta[j],
            _ => basis.dxieta[j],
        }
    }

    #[test]
    fn kronecker_property() {
        for dof in 0..N_LOCAL {
            for j in 0..N_LOCAL {
                let expect = if dof == j { 1.0 } else { 0.0 };
                assert!(
                    (dof_functional(dof, j) - expect).abs() < 1e-14,
                    "functional {dof} on shape {j}"
                );
            }
        }
    }

    #[test]
    fn lower_left_value_shape_at_origin() {
        let basis = shape_eval(0.0, 0.0);
        assert_eq!(basis.value[0], 1.0);
        for k in 1..N_LOCAL {
            assert_eq!(basis.value[k], 0.0, "shape {k} at origin");
        }
    }

    #[test]
    fn constant_reproduction() {
        for &(xi, eta) in &[(0.3, 0.7), (0.0, 1.0), (0.5, 0.5), (0.9, 0.1)] {
            let basis = shape_eval(xi, eta);
            let mut sum = 0.0;
            let mut grad = (0.0, 0.0);
            for v in 0..4 {
                let k = 4 * v; // Value kind
                sum += basis.value[k];
                grad.0 += basis.dxi[k];
                grad.1 += basis.deta[k];
            }
            assert!((sum - 1.0).abs() < 1e-14);
            assert!(grad.0.abs() < 1e-14 && grad.1.abs() < 1e-14);
        }
    }

    #[test]
    fn second_derivatives_match_finite_differences() {
        let (xi, eta) = (0.37, 0.61);
        let step = 1e-5;
        let b = shape_eval(xi, eta);
        let bp = shape_eval(xi + step, eta);
        let bm = shape_eval(xi - step, eta);
        for k in 0..N_LOCAL {
            let fd = (bp.dxi[k] - bm.dxi[k]) / (2.0 * step);
            if b.dxixi[k].abs() > 1e-10 {
                assert!(
                    ((fd - b.dxixi[k]) / b.dxixi[k]).abs() < 1e-6,
                    "shape {k}: fd {fd} vs {}",
                    b.dxixi[k]
                );
            }
            let fd_mixed = (bp.deta[k] - bm.deta[k]) / (2.0 * step);
            if b.dxieta[k].abs() > 1e-10 {
                assert!(((fd_mixed - b.dxieta[k]) / b.dxieta[k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn physical_scaling_factors() {
        let unit = physical_scaling(1.0, 1.0);
        assert!(unit.iter().all(|&s| s == 1.0));
        let scale = physical_scaling(0.125, 0.25);
        assert_eq!(scale[DofKind::Value.index()], 1.0);
        assert_eq!(scale[DofKind::Dx.index()], 0.125);
        assert_eq!(scale[DofKind::Dy.index()], 0.25);
        assert_eq!(scale[DofKind::Dxy.index()], 0.03125);
    }

    #[test]
    fn midpoint_rule() {
        let rule = gauss_rule(1).unwrap();
        assert_eq!(rule.points, vec![(0.5, 0.5)]);
        assert_eq!(rule.weights, vec![1.0]);
    }

    #[test]
    fn rejects_out_of_range_order() {
        assert!(gauss_rule(0).is_err());
        assert!(gauss_rule(11).is_err());
    }

    #[test]
    fn fourth_order_rule_is_exact_to_degree_seven() {
        let rule = gauss_rule(4).unwrap();
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
        // integral of xi^7 eta^7 over the unit square is 1/64
        let integral: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(&(x, y), &w)| w * x.powi(7) * y.powi(7))
            .sum();
        assert!((integral - 1.0 / 64.0).abs() < 1e-14, "got {integral}");
    }

    #[test]
    fn all_rules_have_positive_unit_weights() {
        for n in 1..=10 {
            let rule = gauss_rule(n).unwrap();
            assert_eq!(rule.points.len(), n * n);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-14, "n={n}: {total}");
            // per-axis degree 2n-1 monomial integrates exactly
            let d = (2 * n - 1) as i32;
            let exact = 1.0 / (d as f64 + 1.0);
            let got: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(&(x, _), &w)| w * x.powi(d))
                .sum();
            assert!((got - exact).abs() < 1e-13, "n={n} degree {d}");
        }
    }
}
