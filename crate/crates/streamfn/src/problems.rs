//! Problem definitions and error measurement.
//!
//! The manufactured problem prescribes the smooth stream function
//! `psi = x^2 (x-1)^2 y^2 (y-1)^2` and pressure `p = x^3 + y^3 - 0.5`,
//! and derives the body force `f = -Re^-1 lap(u) + (u . grad) u + grad p`
//! with `u = (psi_y, -psi_x)`, so the solver's output can be compared
//! against closed forms. The cavity problem is the classic driven lid:
//! zero force, unit lid speed.

use crate::assembly::dof_index;
use crate::element::{gauss_rule, physical_scaling, shape_eval, DofKind};
use crate::field::{DiscreteField, PointEval};
use crate::Error;
use serde::Serialize;

/// Anything evaluable with derivatives to second order; the reference side
/// of an error computation.
pub trait StreamFunction {
    fn eval_exact(&self, x: f64, y: f64) -> PointEval;
}

// 1D factor t^2 (1-t)^2 of the manufactured solution and its derivatives.
fn g(t: f64) -> f64 {
    let s = t * (1.0 - t);
    s * s
}

fn dg(t: f64) -> f64 {
    2.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
}

fn d2g(t: f64) -> f64 {
    2.0 - 12.0 * t + 12.0 * t * t
}

fn d3g(t: f64) -> f64 {
    -12.0 + 24.0 * t
}

/// Manufactured solution of the convergence studies.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedProblem {
    pub reynolds: f64,
}

impl ManufacturedProblem {
    pub fn new(reynolds: f64) -> Self {
        assert!(reynolds > 0.0, "Reynolds number must be positive");
        ManufacturedProblem { reynolds }
    }

    pub fn psi(&self, x: f64, y: f64) -> f64 {
        g(x) * g(y)
    }

    pub fn pressure(&self, x: f64, y: f64) -> f64 {
        x.powi(3) + y.powi(3) - 0.5
    }

    /// Velocity `u = (psi_y, -psi_x)`.
    pub fn velocity(&self, x: f64, y: f64) -> (f64, f64) {
        (g(x) * dg(y), -dg(x) * g(y))
    }

    /// Closed-form body force `f = -Re^-1 lap(u) + (u . grad) u + grad p`.
    pub fn body_force(&self, x: f64, y: f64) -> (f64, f64) {
        let inv_re = 1.0 / self.reynolds;
        // lap(u1) = g''(x) g'(y) + g(x) g'''(y); lap(u2) = -g'''(x) g(y) - g'(x) g''(y)
        let lap_u1 = d2g(x) * dg(y) + g(x) * d3g(y);
        let lap_u2 = -d3g(x) * g(y) - dg(x) * d2g(y);
        // (u . grad) u, using u1 = g(x) g'(y), u2 = -g'(x) g(y)
        let conv1 = g(x) * dg(x) * (dg(y) * dg(y) - g(y) * d2g(y));
        let conv2 = g(y) * dg(y) * (dg(x) * dg(x) - g(x) * d2g(x));
        let (px, py) = (3.0 * x * x, 3.0 * y * y);
        (-inv_re * lap_u1 + conv1 + px, -inv_re * lap_u2 + conv2 + py)
    }
}

impl StreamFunction for ManufacturedProblem {
    fn eval_exact(&self, x: f64, y: f64) -> PointEval {
        PointEval {
            value: g(x) * g(y),
            dx: dg(x) * g(y),
            dy: g(x) * dg(y),
            dxx: d2g(x) * g(y),
            dxy: dg(x) * dg(y),
            dyy: g(x) * d2g(y),
        }
    }
}

impl StreamFunction for DiscreteField {
    fn eval_exact(&self, x: f64, y: f64) -> PointEval {
        self.eval(x, y)
    }
}

/// Closure form of the manufactured body force.
pub fn manufactured_f(reynolds: f64) -> impl Fn(f64, f64) -> (f64, f64) + Clone {
    let problem = ManufacturedProblem::new(reynolds);
    move |x, y| problem.body_force(x, y)
}

/// The lid-driven cavity: no body force, unit lid speed.
#[derive(Debug, Clone, Copy)]
pub struct CavityProblem {
    pub reynolds: f64,
    pub lid_speed: f64,
}

impl CavityProblem {
    pub fn new(reynolds: f64) -> Self {
        CavityProblem { reynolds, lid_speed: 1.0 }
    }
}

/// Sobolev error norms of a discrete field against a reference.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorReport {
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
}

/// Full norms (orders 0..j summed) or seminorms (order-j terms only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormFamily {
    Full,
    Semi,
}

/// L2/H1/H2 norms of `field - exact` by element-wise Gauss quadrature in
/// full-norm convention; second-order terms count each multi-index once.
pub fn error_norms<E: StreamFunction>(
    field: &DiscreteField,
    exact: &E,
    quad_order: usize,
) -> Result<ErrorReport, Error> {
    error_norms_with(field, exact, quad_order, NormFamily::Full)
}

/// As [`error_norms`], with the norm family selectable.
pub fn error_norms_with<E: StreamFunction>(
    field: &DiscreteField,
    exact: &E,
    quad_order: usize,
    family: NormFamily,
) -> Result<ErrorReport, Error> {
    let rule = gauss_rule(quad_order)?;
    let mesh = &field.mesh;
    let (hx, hy) = (mesh.hx, mesh.hy);
    let jac = hx * hy;
    let scale = physical_scaling(hx, hy);

    let mut sq0 = 0.0;
    let mut sq1 = 0.0;
    let mut sq2 = 0.0;
    for elem in 0..mesh.n_elements() {
        let (x0, y0) = mesh.element_origin(elem);
        let nodes = mesh.elements[elem];
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let (x, y) = (x0 + xi * hx, y0 + eta * hy);
            // inline element evaluation avoids re-locating the element
            let basis = shape_eval(xi, eta);
            let mut fe = PointEval::default();
            for (v, &node) in nodes.iter().enumerate() {
                for kind in DofKind::ALL {
                    let k = 4 * v + kind.index();
                    let coeff = field.values[dof_index(node, kind)] * scale[k];
                    fe.value += coeff * basis.value[k];
                    fe.dx += coeff * basis.dxi[k] / hx;
                    fe.dy += coeff * basis.deta[k] / hy;
                    fe.dxx += coeff * basis.dxixi[k] / (hx * hx);
                    fe.dxy += coeff * basis.dxieta[k] / (hx * hy);
                    fe.dyy += coeff * basis.detaeta[k] / (hy * hy);
                }
            }
            let ex = exact.eval_exact(x, y);
            let w = rule.weights[q] * jac;
            let e0 = fe.value - ex.value;
            let (e1x, e1y) = (fe.dx - ex.dx, fe.dy - ex.dy);
            let (e2xx, e2xy, e2yy) = (fe.dxx - ex.dxx, fe.dxy - ex.dxy, fe.dyy - ex.dyy);
            sq0 += w * e0 * e0;
            sq1 += w * (e1x * e1x + e1y * e1y);
            sq2 += w * (e2xx * e2xx + e2xy * e2xy + e2yy * e2yy);
        }
    }

    let report = match family {
        NormFamily::Full => ErrorReport {
            l2: sq0.sqrt(),
            h1: (sq0 + sq1).sqrt(),
            h2: (sq0 + sq1 + sq2).sqrt(),
        },
        NormFamily::Semi => ErrorReport { l2: sq0.sqrt(), h1: sq1.sqrt(), h2: sq2.sqrt() },
    };
    Ok(report)
}

/// One record of a sampled field.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
}

/// Samples stream function and velocity on a uniform `n x n` grid that
/// includes the boundary; rows run over y, columns over x.
pub fn sample_field(field: &DiscreteField, resolution: usize) -> Result<Vec<FieldSample>, Error> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "sampling needs at least a 2x2 grid, got {resolution}"
        )));
    }
    let step = 1.0 / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        let y = (j as f64 * step).min(1.0);
        for i in 0..resolution {
            let x = (i as f64 * step).min(1.0);
            let e = field.eval(x, y);
            out.push(FieldSample { x, y, psi: e.value, u: e.dy, v: -e.dx });
        }
    }
    Ok(out)
}

/// A sampling line for velocity profiles.
#[derive(Debug, Clone, Copy)]
pub enum ProfileLine {
    /// `x = c`: reports `(y, u)` with `u = psi_y`.
    Vertical(f64),
    /// `y = c`: reports `(x, v)` with `v = -psi_x`.
    Horizontal(f64),
}

/// Velocity component along a mesh line, `samples` evenly spaced points
/// including both ends.
pub fn velocity_profile(
    field: &DiscreteField,
    line: ProfileLine,
    samples: usize,
) -> Result<Vec<(f64, f64)>, Error> {
    let c = match line {
        ProfileLine::Vertical(c) | ProfileLine::Horizontal(c) => c,
    };
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidArgument(format!("profile line {c} outside the unit square")));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("profile needs at least 2 samples".into()));
    }
    let step = 1.0 / (samples - 1) as f64;
    let mut out = Vec::with_capacity(samples);
    for s in 0..samples {
        let t = (s as f64 * step).min(1.0);
        let record = match line {
            ProfileLine::Vertical(x) => (t, field.eval(x, t).dy),
            ProfileLine::Horizontal(y) => (t, -field.eval(t, y).dx),
        };
        out.push(record);
    }
    Ok(out)
}
