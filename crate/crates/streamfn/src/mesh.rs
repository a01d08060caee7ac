//! Uniform rectangular meshes of the unit square.
//!
//! Nodes are numbered lexicographically with x running fastest, so node
//! `(i, j)` on an `nx x ny` mesh has index `j * (nx + 1) + i`. Element
//! `(i, j)` spans `[i*hx, (i+1)*hx] x [j*hy, (j+1)*hy]` and stores its
//! corner nodes counter-clockwise from the lower-left.

use crate::Error;

/// Uniform partition of the unit square into `nx * ny` rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMesh {
    /// Element count along x.
    pub nx: usize,
    /// Element count along y.
    pub ny: usize,
    /// Element width along x (`1/nx`).
    pub hx: f64,
    /// Element width along y (`1/ny`).
    pub hy: f64,
    /// Node coordinates, `(nx+1)*(ny+1)` entries, x fastest.
    pub nodes: Vec<(f64, f64)>,
    /// Corner node indices per element, counter-clockwise from lower-left.
    pub elements: Vec<[usize; 4]>,
}

/// Which part of the boundary a node sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeLocation {
    Interior,
    Side(Side),
    Corner(Corner),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    BottomLeft,
    BottomRight,
    TopRight,
    TopLeft,
}

/// Per-node boundary classification for a mesh.
#[derive(Debug, Clone)]
pub struct BoundaryInfo {
    pub classes: Vec<NodeLocation>,
}

impl BoundaryInfo {
    pub fn is_boundary(&self, node: usize) -> bool {
        self.classes[node] != NodeLocation::Interior
    }

    pub fn boundary_node_count(&self) -> usize {
        self.classes.iter().filter(|c| **c != NodeLocation::Interior).count()
    }
}

/// Builds the uniform `nx x ny` mesh of the unit square.
pub fn build_uniform(nx: usize, ny: usize) -> Result<RectMesh, Error> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(format!(
            "mesh needs at least one element per axis, got nx={nx}, ny={ny}"
        )));
    }
    let hx = 1.0 / nx as f64;
    let hy = 1.0 / ny as f64;

    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push((i as f64 * hx, j as f64 * hy));
        }
    }

    let stride = nx + 1;
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let ll = j * stride + i;
            elements.push([ll, ll + 1, ll + stride + 1, ll + stride]);
        }
    }

    Ok(RectMesh { nx, ny, hx, hy, nodes, elements })
}

/// Halves the mesh spacing in both directions. Every coarse node coincides
/// with a fine node and every coarse element is the union of four fine ones.
pub fn refine_halve(mesh: &RectMesh) -> RectMesh {
    build_uniform(2 * mesh.nx, 2 * mesh.ny).expect("doubling a valid mesh stays valid")
}

/// Classifies every node as interior, side, or corner.
pub fn classify_boundary(mesh: &RectMesh) -> BoundaryInfo {
    let (nx, ny) = (mesh.nx, mesh.ny);
    let mut classes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let class = match (i == 0, i == nx, j == 0, j == ny) {
                (true, _, true, _) => NodeLocation::Corner(Corner::BottomLeft),
                (_, true, true, _) => NodeLocation::Corner(Corner::BottomRight),
                (_, true, _, true) => NodeLocation::Corner(Corner::TopRight),
                (true, _, _, true) => NodeLocation::Corner(Corner::TopLeft),
                (true, _, _, _) => NodeLocation::Side(Side::Left),
                (_, true, _, _) => NodeLocation::Side(Side::Right),
                (_, _, true, _) => NodeLocation::Side(Side::Bottom),
                (_, _, _, true) => NodeLocation::Side(Side::Top),
                _ => NodeLocation::Interior,
            };
            classes.push(class);
        }
    }
    BoundaryInfo { classes }
}

impl RectMesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Mesh width `h = max(hx, hy)`.
    pub fn width(&self) -> f64 {
        self.hx.max(self.hy)
    }

    /// Node index of grid position `(i, j)`.
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    /// Element index containing `(x, y)`, clamped to the mesh so boundary
    /// points resolve to the adjacent element.
    pub fn element_containing(&self, x: f64, y: f64) -> usize {
        let i = ((x / self.hx).floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let j = ((y / self.hy).floor() as isize).clamp(0, self.ny as isize - 1) as usize;
        j * self.nx + i
    }

    /// Lower-left corner coordinates of an element.
    pub fn element_origin(&self, elem: usize) -> (f64, f64) {
        let i = elem % self.nx;
        let j = elem / self.nx;
        (i as f64 * self.hx, j as f64 * self.hy)
    }

    /// True if every node of `coarse` is a node of `self`.
    pub fn nests(&self, coarse: &RectMesh) -> bool {
        self.nx % coarse.nx == 0 && self.ny % coarse.ny == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smallest_mesh_is_all_corners() {
        let mesh = build_uniform(1, 1).unwrap();
        assert_eq!(mesh.n_nodes(), 4);
        assert_eq!(mesh.n_elements(), 1);
        let info = classify_boundary(&mesh);
        assert!(info.classes.iter().all(|c| matches!(c, NodeLocation::Corner(_))));
    }

    #[test]
    fn eight_by_eight_counts() {
        let mesh = build_uniform(8, 8).unwrap();
        assert_eq!(mesh.n_nodes(), 81);
        assert_eq!(mesh.n_elements(), 64);
        assert_eq!(mesh.width(), 1.0 / 8.0);
        assert_eq!(classify_boundary(&mesh).boundary_node_count(), 32);
    }

    #[test]
    fn rejects_zero_counts() {
        assert!(build_uniform(0, 3).is_err());
        assert!(build_uniform(3, 0).is_err());
    }

    #[test]
    fn lexicographic_numbering_four_by_two() {
        let mesh = build_uniform(4, 2).unwrap();
        assert_eq!(mesh.n_nodes(), 15);
        assert_eq!(mesh.n_elements(), 8);
        // node 7 = (i=2, j=1) -> (0.5, 0.5), interior
        assert_eq!(mesh.nodes[7], (0.5, 0.5));
        assert_eq!(classify_boundary(&mesh).classes[7], NodeLocation::Interior);
        // element (i=1, j=1) has index 5 and corners counter-clockwise
        assert_eq!(mesh.elements[5], [6, 7, 12, 11]);
    }

    #[test]
    fn refine_keeps_coarse_nodes() {
        let coarse = build_uniform(4, 4).unwrap();
        let fine = refine_halve(&coarse);
        assert_eq!((fine.nx, fine.ny), (8, 8));
        for &(x, y) in &coarse.nodes {
            assert!(
                fine.nodes.iter().any(|&(fx, fy)| fx == x && fy == y),
                "coarse node ({x},{y}) missing from fine mesh"
            );
        }
        // the paper-style pairs with odd counts refine exactly as well
        let seven = build_uniform(7, 7).unwrap();
        let fourteen = refine_halve(&seven);
        assert_eq!((fourteen.nx, fourteen.ny), (14, 14));
        for &(x, y) in &seven.nodes {
            assert!(fourteen.nodes.iter().any(|&(fx, fy)| fx == x && fy == y));
        }
        let eight = build_uniform(8, 8).unwrap();
        assert_eq!(refine_halve(&eight).nx, 16);
    }

    #[test]
    fn top_side_classification() {
        let mesh = build_uniform(8, 8).unwrap();
        let info = classify_boundary(&mesh);
        let node = mesh.node_index(4, 8); // (0.5, 1.0)
        assert_eq!(mesh.nodes[node], (0.5, 1.0));
        assert_eq!(info.classes[node], NodeLocation::Side(Side::Top));
    }

    #[test]
    fn element_lookup_covers_boundary_points() {
        let mesh = build_uniform(4, 4).unwrap();
        assert_eq!(mesh.element_containing(0.0, 0.0), 0);
        assert_eq!(mesh.element_containing(1.0, 1.0), 15);
        assert_eq!(mesh.element_containing(0.3, 0.9), mesh.nx * 3 + 1);
    }

    proptest! {
        #[test]
        fn incidence_and_boundary_counts(nx in 1usize..=16, ny in 1usize..=16) {
            let mesh = build_uniform(nx, ny).unwrap();
            prop_assert_eq!(mesh.n_nodes(), (nx + 1) * (ny + 1));
            prop_assert_eq!(mesh.n_elements(), nx * ny);

            // each element touches 4 nodes, so incidence sums to 4*nx*ny
            let mut incidence = vec![0usize; mesh.n_nodes()];
            for elem in &mesh.elements {
                for &n in elem {
                    incidence[n] += 1;
                }
            }
            prop_assert_eq!(incidence.iter().sum::<usize>(), 4 * nx * ny);

            let info = classify_boundary(&mesh);
            prop_assert_eq!(info.boundary_node_count(), 2 * (nx + ny));
            for (node, class) in info.classes.iter().enumerate() {
                let (x, y) = mesh.nodes[node];
                let on_boundary = x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0;
                prop_assert_eq!(*class != NodeLocation::Interior, on_boundary);
                if *class == NodeLocation::Interior {
                    prop_assert_eq!(incidence[node], 4);
                }
                if matches!(class, NodeLocation::Corner(_)) {
                    prop_assert_eq!(incidence[node], 1);
                }
            }
        }

        #[test]
        fn refine_twice_matches_quadruple(nx in 1usize..=8, ny in 1usize..=8) {
            let twice = refine_halve(&refine_halve(&build_uniform(nx, ny).unwrap()));
            let direct = build_uniform(4 * nx, 4 * ny).unwrap();
            prop_assert_eq!(twice, direct);
        }
    }
}
