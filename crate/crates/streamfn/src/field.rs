//! Finite element functions: a mesh plus DOF coefficients, evaluable with
//! derivatives up to second order anywhere in the closed unit square.

use crate::assembly::{dof_index, DofVector, DOFS_PER_NODE};
use crate::element::{physical_scaling, shape_eval, DofKind};
use crate::mesh::RectMesh;

/// Value and derivatives of a field at one point.
#[derive(Debug, Clone, Copy, Default)]
pub struct PointEval {
    pub value: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dxy: f64,
    pub dyy: f64,
}

/// A discrete stream function.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    pub mesh: RectMesh,
    pub values: DofVector,
}

impl DiscreteField {
    pub fn new(mesh: RectMesh, values: DofVector) -> Self {
        assert_eq!(values.len(), DOFS_PER_NODE * mesh.n_nodes());
        DiscreteField { mesh, values }
    }

    /// Evaluates the field at `(x, y)`; boundary points resolve to the
    /// adjacent element (the field is C1, so the choice is immaterial).
    pub fn eval(&self, x: f64, y: f64) -> PointEval {
        self.eval_in_element(self.mesh.element_containing(x, y), x, y)
    }

    /// Evaluates using a specific element's polynomial, which also permits
    /// extrapolation; used to check continuity across edges.
    pub fn eval_in_element(&self, elem: usize, x: f64, y: f64) -> PointEval {
        let (hx, hy) = (self.mesh.hx, self.mesh.hy);
        let (x0, y0) = self.mesh.element_origin(elem);
        let basis = shape_eval((x - x0) / hx, (y - y0) / hy);
        let scale = physical_scaling(hx, hy);

        let mut out = PointEval::default();
        let nodes = self.mesh.elements[elem];
        for (v, &node) in nodes.iter().enumerate() {
            for kind in DofKind::ALL {
                let k = DOFS_PER_NODE * v + kind.index();
                let coeff = self.values[dof_index(node, kind)] * scale[k];
                out.value += coeff * basis.value[k];
                out.dx += coeff * basis.dxi[k] / hx;
                out.dy += coeff * basis.deta[k] / hy;
                out.dxx += coeff * basis.dxixi[k] / (hx * hx);
                out.dxy += coeff * basis.dxieta[k] / (hx * hy);
                out.dyy += coeff * basis.detaeta[k] / (hy * hy);
            }
        }
        out
    }

    /// Velocity `(u, v) = (psi_y, -psi_x)`.
    pub fn velocity(&self, x: f64, y: f64) -> (f64, f64) {
        let e = self.eval(x, y);
        (e.dy, -e.dx)
    }
}

/// Nodal Hermite interpolant: each node takes the value, both first
/// derivatives and the mixed derivative of the given function.
pub fn hermite_interpolant<F, Fx, Fy, Fxy>(
    mesh: &RectMesh,
    f: F,
    fx: Fx,
    fy: Fy,
    fxy: Fxy,
) -> DofVector
where
    F: Fn(f64, f64) -> f64,
    Fx: Fn(f64, f64) -> f64,
    Fy: Fn(f64, f64) -> f64,
    Fxy: Fn(f64, f64) -> f64,
{
    let mut values = DofVector::zeros(DOFS_PER_NODE * mesh.n_nodes());
    for (node, &(x, y)) in mesh.nodes.iter().enumerate() {
        values.set(node, DofKind::Value, f(x, y));
        values.set(node, DofKind::Dx, fx(x, y));
        values.set(node, DofKind::Dy, fy(x, y));
        values.set(node, DofKind::Dxy, fxy(x, y));
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_uniform;

    // deterministic pseudo-random stream for test fields
    fn splitmix(state: &mut u64) -> f64 {
        *state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    #[test]
    fn reproduces_bicubic_on_one_element() {
        // g = x^3 y^2 lies in the local polynomial space
        let mesh = build_uniform(1, 1).unwrap();
        let vals = hermite_interpolant(
            &mesh,
            |x, y| x.powi(3) * y * y,
            |x, y| 3.0 * x * x * y * y,
            |x, y| 2.0 * x.powi(3) * y,
            |x, y| 6.0 * x * x * y,
        );
        let field = DiscreteField::new(mesh, vals);
        let mut state = 0x5eed;
        for _ in 0..20 {
            let x = 0.5 + 0.49 * splitmix(&mut state);
            let y = 0.5 + 0.49 * splitmix(&mut state);
            let exact = x.powi(3) * y * y;
            let got = field.eval(x, y).value;
            assert!(
                (got - exact).abs() <= 1e-12 * exact.abs().max(1e-3),
                "at ({x},{y}): {got} vs {exact}"
            );
        }
    }

    #[test]
    fn linear_function_on_scaled_elements() {
        let mesh = build_uniform(8, 8).unwrap();
        let vals = hermite_interpolant(&mesh, |x, _| x, |_, _| 1.0, |_, _| 0.0, |_, _| 0.0);
        for node in 0..mesh.n_nodes() {
            assert_eq!(vals.get(node, DofKind::Dx), 1.0);
            assert_eq!(vals.get(node, DofKind::Dy), 0.0);
            assert_eq!(vals.get(node, DofKind::Dxy), 0.0);
        }
        let field = DiscreteField::new(mesh, vals);
        for &(x, y) in &[(0.03, 0.97), (0.5, 0.5), (1.0, 0.2), (0.77, 0.31)] {
            let e = field.eval(x, y);
            assert!((e.value - x).abs() < 1e-13);
            assert!((e.dx - 1.0).abs() < 1e-13);
            assert!(e.dy.abs() < 1e-13);
        }
    }

    #[test]
    fn quartic_interpolation_accuracy() {
        // g = x^2(x-1)^2 y^2(y-1)^2 is degree 4, so interpolation on an
        // (8,8) mesh is O(h^4) accurate rather than exact
        let g = |t: f64| t * t * (t - 1.0) * (t - 1.0);
        let dg = |t: f64| 2.0 * t * (t - 1.0) * (2.0 * t - 1.0);
        let mesh = build_uniform(8, 8).unwrap();
        let vals = hermite_interpolant(
            &mesh,
            |x, y| g(x) * g(y),
            |x, y| dg(x) * g(y),
            |x, y| g(x) * dg(y),
            |x, y| dg(x) * dg(y),
        );
        let field = DiscreteField::new(mesh, vals);
        let exact = g(0.3) * g(0.7);
        assert!((field.eval(0.3, 0.7).value - exact).abs() <= 1e-4);
    }

    #[test]
    fn monomial_reproduction_to_cubic() {
        let mesh = build_uniform(3, 2).unwrap();
        let mut state = 0xabcdef;
        for a in 0..=3i32 {
            for b in 0..=3i32 {
                let f = move |x: f64, y: f64| x.powi(a) * y.powi(b);
                let fx = move |x: f64, y: f64| a as f64 * x.powi((a - 1).max(0)) * y.powi(b);
                let fy = move |x: f64, y: f64| b as f64 * x.powi(a) * y.powi((b - 1).max(0));
                let fxy = move |x: f64, y: f64| {
                    a as f64 * b as f64 * x.powi((a - 1).max(0)) * y.powi((b - 1).max(0))
                };
                let field =
                    DiscreteField::new(mesh.clone(), hermite_interpolant(&mesh, f, fx, fy, fxy));
                for _ in 0..5 {
                    let x = 0.5 + 0.5 * splitmix(&mut state);
                    let y = 0.5 + 0.5 * splitmix(&mut state);
                    let err = (field.eval(x, y).value - f(x, y)).abs();
                    assert!(err <= 1e-12 * f(x, y).abs().max(1.0), "x^{a} y^{b} at ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn c1_continuity_across_interior_edges() {
        // random coefficients still give matching value and gradient from
        // both sides of an edge
        let mesh = build_uniform(4, 3).unwrap();
        let mut state = 0x1234;
        let mut values = DofVector::zeros(DOFS_PER_NODE * mesh.n_nodes());
        for i in 0..values.len() {
            values[i] = splitmix(&mut state);
        }
        let field = DiscreteField::new(mesh.clone(), values);

        // vertical edge between elements (1,1) and (2,1) at x = 0.5
        let left = 1 * mesh.nx + 1;
        let right = 1 * mesh.nx + 2;
        for s in 0..10 {
            let y = (1.0 + (s as f64 + 0.5) / 10.0) * mesh.hy;
            let a = field.eval_in_element(left, 0.5, y);
            let b = field.eval_in_element(right, 0.5, y);
            assert!((a.value - b.value).abs() < 1e-12);
            assert!((a.dx - b.dx).abs() < 1e-12);
            assert!((a.dy - b.dy).abs() < 1e-12);
        }

        // horizontal edge between elements (2,0) and (2,1) at y = hy
        let below = 2;
        let above = mesh.nx + 2;
        for s in 0..10 {
            let x = (2.0 + (s as f64 + 0.5) / 10.0) * mesh.hx;
            let a = field.eval_in_element(below, x, mesh.hy);
            let b = field.eval_in_element(above, x, mesh.hy);
            assert!((a.value - b.value).abs() < 1e-12);
            assert!((a.dx - b.dx).abs() < 1e-12);
            assert!((a.dy - b.dy).abs() < 1e-12);
        }
    }
}
