//! Weak-form assembly for the stream-function formulation.
//!
//! The discrete problem seeks the stream function coefficients from
//!
//! ```text
//!   a(psi, phi) + b(psi; psi, phi) = l(phi)   for all test functions phi,
//! ```
//!
//! with the biharmonic form `a(psi,phi) = Re^-1 ∫ lap(psi) lap(phi)`, the
//! convection form `b(xi; psi, phi) = ∫ lap(xi) (psi_y phi_x - psi_x phi_y)`
//! and the load `l(phi) = ∫ f . (phi_y, -phi_x)`. Constrained DOFs are
//! eliminated: assembled matrices act on free DOFs only, and the coupling
//! of fixed values into free equations is returned as a correction vector,
//! so the iterative solver sees exactly the reduced operator.

use crate::element::{self, gauss_rule, DofKind, QuadratureRule, N_LOCAL};
use crate::mesh::{classify_boundary, BoundaryInfo, NodeLocation, RectMesh, Side};
use crate::sparse::CsrMatrix;

pub const DOFS_PER_NODE: usize = 4;

/// Global equation index of `(node, kind)`.
pub fn dof_index(node: usize, kind: DofKind) -> usize {
    node * DOFS_PER_NODE + kind.index()
}

/// Constraint state of one global DOF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofStatus {
    Free,
    Fixed(f64),
}

/// Essential boundary conditions supported by the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundarySpec {
    /// Value, both first derivatives and the mixed derivative fixed to zero
    /// at every boundary node.
    ClampedHomogeneous,
    /// As clamped, except `d/dy` at top-side nodes strictly between the
    /// corners is fixed to `lid_speed` (the non-leaky regularized cavity:
    /// the corners stay at zero, so the walls win).
    LidDriven { lid_speed: f64 },
}

/// Coefficient vector over all DOFs; fixed entries hold prescribed values.
#[derive(Debug, Clone, PartialEq)]
pub struct DofVector(pub Vec<f64>);

impl DofVector {
    pub fn zeros(n: usize) -> Self {
        DofVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, node: usize, kind: DofKind) -> f64 {
        self.0[dof_index(node, kind)]
    }

    pub fn set(&mut self, node: usize, kind: DofKind, v: f64) {
        self.0[dof_index(node, kind)] = v;
    }
}

impl std::ops::Index<usize> for DofVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for DofVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

const UNCONSTRAINED: usize = usize::MAX;

/// Finite element space: mesh, DOF numbering, constraints and the shared
/// free-DOF sparsity pattern. Immutable once the boundary condition has
/// been applied; safe to share across threads.
#[derive(Debug, Clone)]
pub struct FeSpace {
    pub mesh: RectMesh,
    pub boundary: BoundaryInfo,
    /// Assembly quadrature points per axis.
    pub quad_order: usize,
    status: Vec<DofStatus>,
    free_index: Vec<usize>,
    free_to_global: Vec<usize>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl FeSpace {
    /// Space with every DOF free and the default 4x4 assembly quadrature.
    pub fn new(mesh: RectMesh) -> Self {
        Self::with_quad(mesh, 4)
    }

    pub fn with_quad(mesh: RectMesh, quad_order: usize) -> Self {
        let boundary = classify_boundary(&mesh);
        let n_dofs = DOFS_PER_NODE * mesh.n_nodes();
        let mut space = FeSpace {
            mesh,
            boundary,
            quad_order,
            status: vec![DofStatus::Free; n_dofs],
            free_index: Vec::new(),
            free_to_global: Vec::new(),
            row_ptr: Vec::new(),
            col_idx: Vec::new(),
        };
        space.rebuild_indexing();
        space
    }

    pub fn n_dofs(&self) -> usize {
        self.status.len()
    }

    pub fn n_free(&self) -> usize {
        self.free_to_global.len()
    }

    pub fn n_fixed(&self) -> usize {
        self.n_dofs() - self.n_free()
    }

    pub fn is_free(&self, global: usize) -> bool {
        matches!(self.status[global], DofStatus::Free)
    }

    pub fn status(&self, global: usize) -> DofStatus {
        self.status[global]
    }

    /// Free-equation index of a global DOF, if it is free.
    pub fn free_of(&self, global: usize) -> Option<usize> {
        match self.free_index[global] {
            UNCONSTRAINED => None,
            i => Some(i),
        }
    }

    pub fn free_to_global(&self) -> &[usize] {
        &self.free_to_global
    }

    /// Applies essential boundary conditions and rebuilds the free-DOF
    /// numbering and sparsity pattern.
    pub fn apply_bc(&mut self, bc: BoundarySpec) {
        for node in 0..self.mesh.n_nodes() {
            let class = self.boundary.classes[node];
            if class == NodeLocation::Interior {
                continue;
            }
            for kind in DofKind::ALL {
                self.status[dof_index(node, kind)] = DofStatus::Fixed(0.0);
            }
            if let BoundarySpec::LidDriven { lid_speed } = bc {
                // u = psi_y on the moving lid; corners keep the wall value
                if class == NodeLocation::Side(Side::Top) {
                    self.status[dof_index(node, DofKind::Dy)] = DofStatus::Fixed(lid_speed);
                }
            }
        }
        self.rebuild_indexing();
    }

    /// Full-length vector holding the prescribed values on fixed DOFs and
    /// zeros on free ones.
    pub fn constrained_vector(&self) -> DofVector {
        let mut v = DofVector::zeros(self.n_dofs());
        for (g, s) in self.status.iter().enumerate() {
            if let DofStatus::Fixed(val) = s {
                v[g] = *val;
            }
        }
        v
    }

    /// Restriction of a full vector to the free DOFs.
    pub fn restrict(&self, full: &DofVector) -> Vec<f64> {
        self.free_to_global.iter().map(|&g| full[g]).collect()
    }

    /// Expands free-DOF coefficients to a full vector, filling fixed
    /// entries with their prescribed values.
    pub fn expand(&self, free: &[f64]) -> DofVector {
        assert_eq!(free.len(), self.n_free());
        let mut full = self.constrained_vector();
        for (i, &g) in self.free_to_global.iter().enumerate() {
            full[g] = free[i];
        }
        full
    }

    /// Global DOF indices of an element's 16 local DOFs in local order.
    pub fn element_dofs(&self, elem: usize) -> [usize; N_LOCAL] {
        let nodes = self.mesh.elements[elem];
        let mut out = [0usize; N_LOCAL];
        for (v, &node) in nodes.iter().enumerate() {
            for kind in DofKind::ALL {
                out[DOFS_PER_NODE * v + kind.index()] = dof_index(node, kind);
            }
        }
        out
    }

    fn rebuild_indexing(&mut self) {
        self.free_index = vec![UNCONSTRAINED; self.n_dofs()];
        self.free_to_global.clear();
        for (g, s) in self.status.iter().enumerate() {
            if matches!(s, DofStatus::Free) {
                self.free_index[g] = self.free_to_global.len();
                self.free_to_global.push(g);
            }
        }
        self.rebuild_pattern();
    }

    fn rebuild_pattern(&mut self) {
        let n_free = self.n_free();
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n_free];
        for elem in 0..self.mesh.n_elements() {
            let dofs = self.element_dofs(elem);
            for &gr in &dofs {
                let Some(fr) = self.free_of(gr) else { continue };
                for &gc in &dofs {
                    if let Some(fc) = self.free_of(gc) {
                        rows[fr].push(fc);
                    }
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(n_free + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
    }

    /// Empty matrix with the space's free-DOF sparsity pattern.
    pub fn pattern_matrix(&self) -> CsrMatrix {
        CsrMatrix::from_pattern(self.n_free(), self.n_free(), self.row_ptr.clone(), self.col_idx.clone())
    }
}

/// Physical basis data at the assembly quadrature points, shared by every
/// element of a uniform mesh.
pub(crate) struct ElementBasis {
    pub rule: QuadratureRule,
    /// `hx * hy`, the Jacobian determinant.
    pub jac: f64,
    /// Physical first derivatives `(d/dx, d/dy)` of all 16 shapes per point.
    pub dx: Vec<[f64; N_LOCAL]>,
    pub dy: Vec<[f64; N_LOCAL]>,
    /// Physical Laplacian of all 16 shapes per point.
    pub lap: Vec<[f64; N_LOCAL]>,
}

impl ElementBasis {
    pub fn new(mesh: &RectMesh, quad_order: usize) -> Self {
        let rule = gauss_rule(quad_order).expect("assembly quadrature order validated upstream");
        let (hx, hy) = (mesh.hx, mesh.hy);
        let scale = element::physical_scaling(hx, hy);
        let mut dx = Vec::with_capacity(rule.points.len());
        let mut dy = Vec::with_capacity(rule.points.len());
        let mut lap = Vec::with_capacity(rule.points.len());
        for &(xi, eta) in &rule.points {
            let b = element::shape_eval(xi, eta);
            let mut dxq = [0.0; N_LOCAL];
            let mut dyq = [0.0; N_LOCAL];
            let mut lapq = [0.0; N_LOCAL];
            for k in 0..N_LOCAL {
                dxq[k] = scale[k] * b.dxi[k] / hx;
                dyq[k] = scale[k] * b.deta[k] / hy;
                lapq[k] = scale[k] * (b.dxixi[k] / (hx * hx) + b.detaeta[k] / (hy * hy));
            }
            dx.push(dxq);
            dy.push(dyq);
            lap.push(lapq);
        }
        ElementBasis { rule, jac: hx * hy, dx, dy, lap }
    }
}

/// Scatters element matrices into the reduced system. Entries whose column
/// is fixed are folded against the prescribed values into `correction`, so
/// `(M x)_free = M_ff x_f + correction` whenever `x` carries the prescribed
/// values on fixed DOFs.
fn assemble<F>(space: &FeSpace, mut element_matrix: F) -> (CsrMatrix, Vec<f64>)
where
    F: FnMut(usize, &mut [[f64; N_LOCAL]; N_LOCAL]),
{
    let mut matrix = space.pattern_matrix();
    let mut correction = vec![0.0; space.n_free()];
    let mut local = [[0.0; N_LOCAL]; N_LOCAL];
    for elem in 0..space.mesh.n_elements() {
        for row in local.iter_mut() {
            row.fill(0.0);
        }
        element_matrix(elem, &mut local);
        let dofs = space.element_dofs(elem);
        for (k, &gr) in dofs.iter().enumerate() {
            let Some(fr) = space.free_of(gr) else { continue };
            for (l, &gc) in dofs.iter().enumerate() {
                match space.status(gc) {
                    DofStatus::Free => {
                        matrix.add_at(fr, space.free_of(gc).unwrap(), local[k][l]);
                    }
                    DofStatus::Fixed(g) => {
                        correction[fr] += local[k][l] * g;
                    }
                }
            }
        }
    }
    (matrix, correction)
}

/// Assembles the biharmonic form `Re^-1 ∫ lap(trial) lap(test)`.
///
/// Returns the free-DOF matrix and the fixed-value coupling correction.
pub fn assemble_a(space: &FeSpace, reynolds: f64) -> (CsrMatrix, Vec<f64>) {
    assert!(reynolds > 0.0, "Reynolds number must be positive");
    let basis = ElementBasis::new(&space.mesh, space.quad_order);
    let inv_re = 1.0 / reynolds;
    assemble(space, |_, local| {
        for (q, w) in basis.rule.weights.iter().enumerate() {
            let scale = inv_re * w * basis.jac;
            let lap = &basis.lap[q];
            for k in 0..N_LOCAL {
                let lk = scale * lap[k];
                if lk == 0.0 {
                    continue;
                }
                for l in 0..N_LOCAL {
                    local[k][l] += lk * lap[l];
                }
            }
        }
    })
}

/// Assembles the convection matrix in the first (frozen) slot:
/// `entry(test k, trial l) = ∫ lap(xi) (N_l_y N_k_x - N_l_x N_k_y)`, so
/// `phi^T B(xi) psi = b(xi; psi, phi)`.
pub fn assemble_b_first_slot(space: &FeSpace, xi: &DofVector) -> (CsrMatrix, Vec<f64>) {
    assert_eq!(xi.len(), space.n_dofs(), "coefficient vector does not match space");
    let basis = ElementBasis::new(&space.mesh, space.quad_order);
    assemble(space, |elem, local| {
        let dofs = space.element_dofs(elem);
        for (q, w) in basis.rule.weights.iter().enumerate() {
            let lap = &basis.lap[q];
            let mut lap_xi = 0.0;
            for (m, &g) in dofs.iter().enumerate() {
                lap_xi += xi[g] * lap[m];
            }
            let scale = w * basis.jac * lap_xi;
            if scale == 0.0 {
                continue;
            }
            let (dx, dy) = (&basis.dx[q], &basis.dy[q]);
            for k in 0..N_LOCAL {
                for l in 0..N_LOCAL {
                    local[k][l] += scale * (dy[l] * dx[k] - dx[l] * dy[k]);
                }
            }
        }
    })
}

/// Assembles the convection matrix in the middle slot, the remaining Newton
/// Jacobian block: `entry(test k, trial l) = ∫ lap(N_l) (psi_y N_k_x -
/// psi_x N_k_y)`, so `phi^T C(psi) delta = b(delta; psi, phi)`.
pub fn assemble_b_middle_slot(space: &FeSpace, psi: &DofVector) -> (CsrMatrix, Vec<f64>) {
    assert_eq!(psi.len(), space.n_dofs(), "coefficient vector does not match space");
    let basis = ElementBasis::new(&space.mesh, space.quad_order);
    assemble(space, |elem, local| {
        let dofs = space.element_dofs(elem);
        for (q, w) in basis.rule.weights.iter().enumerate() {
            let (dx, dy) = (&basis.dx[q], &basis.dy[q]);
            let mut psi_x = 0.0;
            let mut psi_y = 0.0;
            for (m, &g) in dofs.iter().enumerate() {
                psi_x += psi[g] * dx[m];
                psi_y += psi[g] * dy[m];
            }
            let scale = w * basis.jac;
            let lap = &basis.lap[q];
            for k in 0..N_LOCAL {
                let test = scale * (psi_y * dx[k] - psi_x * dy[k]);
                if test == 0.0 {
                    continue;
                }
                for l in 0..N_LOCAL {
                    local[k][l] += test * lap[l];
                }
            }
        }
    })
}

/// Assembles the load `l(phi) = ∫ (f1 phi_y - f2 phi_x)` over free DOFs.
pub fn assemble_load<F>(space: &FeSpace, f: F) -> Vec<f64>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let basis = ElementBasis::new(&space.mesh, space.quad_order);
    let mut load = vec![0.0; space.n_free()];
    for elem in 0..space.mesh.n_elements() {
        let (x0, y0) = space.mesh.element_origin(elem);
        let dofs = space.element_dofs(elem);
        for (q, w) in basis.rule.weights.iter().enumerate() {
            let (xi, eta) = basis.rule.points[q];
            let (f1, f2) = f(x0 + xi * space.mesh.hx, y0 + eta * space.mesh.hy);
            let scale = w * basis.jac;
            let (dx, dy) = (&basis.dx[q], &basis.dy[q]);
            for (k, &g) in dofs.iter().enumerate() {
                if let Some(fr) = space.free_of(g) {
                    load[fr] += scale * (f1 * dy[k] - f2 * dx[k]);
                }
            }
        }
    }
    load
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::hermite_interpolant;
    use crate::mesh::build_uniform;

    fn clamped_space(n: usize) -> FeSpace {
        let mut space = FeSpace::new(build_uniform(n, n).unwrap());
        space.apply_bc(BoundarySpec::ClampedHomogeneous);
        space
    }

    #[test]
    fn clamped_dof_counts_on_eight_mesh() {
        let space = clamped_space(8);
        assert_eq!(space.n_dofs(), 324);
        assert_eq!(space.n_fixed(), 128);
        assert_eq!(space.n_free(), 196);
    }

    #[test]
    fn lid_driven_fixes_seven_nonzero_dofs() {
        let mut space = FeSpace::new(build_uniform(8, 8).unwrap());
        space.apply_bc(BoundarySpec::LidDriven { lid_speed: 1.0 });
        let nonzero: Vec<usize> = (0..space.n_dofs())
            .filter(|&g| matches!(space.status(g), DofStatus::Fixed(v) if v != 0.0))
            .collect();
        assert_eq!(nonzero.len(), 7);
        for g in nonzero {
            assert_eq!(g % DOFS_PER_NODE, DofKind::Dy.index());
            let node = g / DOFS_PER_NODE;
            let (x, y) = space.mesh.nodes[node];
            assert_eq!(y, 1.0);
            assert!(x > 0.0 && x < 1.0);
        }
        // the corner value DOF stays fixed at zero under both specs
        assert_eq!(space.status(dof_index(0, DofKind::Value)), DofStatus::Fixed(0.0));
        let clamped = clamped_space(8);
        assert_eq!(clamped.status(dof_index(0, DofKind::Value)), DofStatus::Fixed(0.0));
    }

    #[test]
    fn a_form_is_symmetric() {
        let space = clamped_space(8);
        let (a, _) = assemble_a(&space, 1.0);
        let at = a.transpose();
        let scale: f64 = a.values().iter().fold(0.0, |m, v| m.max(v.abs()));
        for r in 0..a.n_rows() {
            let (cols, vals) = a.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                assert!((v - at.get(r, c)).abs() <= 1e-12 * scale, "A[{r}][{c}]");
            }
        }
    }

    #[test]
    fn a_form_scales_inversely_with_reynolds() {
        let space = clamped_space(4);
        let (a1, _) = assemble_a(&space, 10.0);
        let (a2, _) = assemble_a(&space, 20.0);
        for (v1, v2) in a1.values().iter().zip(a2.values()) {
            assert_eq!(v2 * 2.0, *v1);
        }
    }

    #[test]
    fn b_form_vanishes_for_zero_coefficient() {
        let space = clamped_space(4);
        let zero = DofVector::zeros(space.n_dofs());
        let (b, corr) = assemble_b_first_slot(&space, &zero);
        assert!(b.values().iter().all(|&v| v == 0.0));
        assert!(corr.iter().all(|&v| v == 0.0));
        let (c, _) = assemble_b_middle_slot(&space, &zero);
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_body_force_gives_zero_load() {
        let space = clamped_space(4);
        let load = assemble_load(&space, |_, _| (0.0, 0.0));
        assert!(load.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_load_is_orthogonal_to_curls() {
        // f = grad(x^3 + y^3 - 0.5) integrates to zero against curl(phi)
        // for every clamped test function; degree fits the 4x4 rule.
        let space = clamped_space(8);
        let load = assemble_load(&space, |x, y| (3.0 * x * x, 3.0 * y * y));
        for (i, &v) in load.iter().enumerate() {
            assert!(v.abs() <= 1e-13, "entry {i} = {v}");
        }
    }

    #[test]
    fn assembly_is_element_order_independent() {
        // same element matrices scattered in reverse order agree to 1e-15
        // relative; exercised against the forward assembly of the a-form
        let space = clamped_space(4);
        let (a, _) = assemble_a(&space, 7.0);

        let basis = ElementBasis::new(&space.mesh, space.quad_order);
        let mut reversed = space.pattern_matrix();
        let inv_re = 1.0 / 7.0;
        for elem in (0..space.mesh.n_elements()).rev() {
            let dofs = space.element_dofs(elem);
            let mut local = [[0.0; N_LOCAL]; N_LOCAL];
            for (q, w) in basis.rule.weights.iter().enumerate() {
                let lap = &basis.lap[q];
                for k in 0..N_LOCAL {
                    for l in 0..N_LOCAL {
                        local[k][l] += inv_re * w * basis.jac * lap[k] * lap[l];
                    }
                }
            }
            for (k, &gr) in dofs.iter().enumerate() {
                let Some(fr) = space.free_of(gr) else { continue };
                for (l, &gc) in dofs.iter().enumerate() {
                    if let Some(fc) = space.free_of(gc) {
                        reversed.add_at(fr, fc, local[k][l]);
                    }
                }
            }
        }
        let scale: f64 = a.values().iter().fold(0.0, |m, v| m.max(v.abs()));
        for (x, y) in a.values().iter().zip(reversed.values()) {
            assert!((x - y).abs() <= 1e-15 * scale);
        }
    }

    #[test]
    fn antisymmetry_of_convection_form() {
        // integrand psi_y psi_x - psi_x psi_y cancels pointwise
        let space = clamped_space(4);
        let xi = hermite_interpolant(
            &space.mesh,
            |x, y| (x * x * y).sin(),
            |x, y| 2.0 * x * y * (x * x * y).cos(),
            |x, y| x * x * (x * x * y).cos(),
            |x, y| {
                2.0 * x * (x * x * y).cos()
                    - 2.0 * x * x * x * y * (x * x * y).sin()
            },
        );
        let psi = hermite_interpolant(
            &space.mesh,
            |x, y| x * y * y + 0.3 * x,
            |_, y| y * y + 0.3,
            |x, y| 2.0 * x * y,
            |_, y| 2.0 * y,
        );
        let (b, corr) = assemble_b_first_slot(&space, &xi);
        let psi_f = space.restrict(&psi);
        let b_psi = crate::sparse::spmv(&b, &psi_f);
        let quad: f64 = psi_f.iter().zip(&b_psi).map(|(x, y)| x * y).sum::<f64>()
            + psi_f.iter().zip(&corr).map(|(x, y)| x * y).sum::<f64>();
        let b_scale: f64 = b.values().iter().fold(0.0, |m, v| m.max(v.abs()));
        let psi_scale: f64 = psi_f.iter().map(|v| v * v).sum::<f64>();
        assert!(quad.abs() <= 1e-12 * b_scale * psi_scale.max(1.0), "got {quad}");
    }
}
