use serde::{Deserialize, Serialize};

use crate::mesh::{BoundaryTag, Mesh, Point};

/// Location class of a P2 node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeClass {
    Interior,
    Dirichlet,
    Neumann,
    Contact,
}

impl NodeClass {
    fn priority(self) -> u8 {
        match self {
            NodeClass::Interior => 0,
            NodeClass::Neumann => 1,
            NodeClass::Contact => 2,
            NodeClass::Dirichlet => 3,
        }
    }
}

impl From<BoundaryTag> for NodeClass {
    fn from(tag: BoundaryTag) -> Self {
        match tag {
            BoundaryTag::Dirichlet => NodeClass::Dirichlet,
            BoundaryTag::Neumann => NodeClass::Neumann,
            BoundaryTag::Contact => NodeClass::Contact,
        }
    }
}

/// P2 node numbering: mesh vertices first, then one midpoint per edge.
/// Vector dof `2 * node + component`.
#[derive(Debug, Clone)]
pub struct DofMap {
    num_vertices: usize,
    coords: Vec<Point>,
    classes: Vec<NodeClass>,
    triangle_nodes: Vec<[usize; 6]>,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> DofMap {
        let nv = mesh.num_vertices();
        let ne = mesh.num_edges();
        let mut coords = Vec::with_capacity(nv + ne);
        coords.extend_from_slice(mesh.vertices());
        coords.extend((0..ne).map(|e| mesh.edge_midpoint(e)));

        let mut classes = vec![NodeClass::Interior; nv + ne];
        for (e, tag) in mesh.boundary_edges() {
            let class = NodeClass::from(tag);
            classes[nv + e] = class;
            for v in mesh.edge(e) {
                if class.priority() > classes[v].priority() {
                    classes[v] = class;
                }
            }
        }

        let triangle_nodes = (0..mesh.num_triangles())
            .map(|t| {
                let [a, b, c] = mesh.triangle(t);
                let [e0, e1, e2] = mesh.triangle_edges(t);
                [a, b, c, nv + e0, nv + e1, nv + e2]
            })
            .collect();

        DofMap {
            num_vertices: nv,
            coords,
            classes,
            triangle_nodes,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn num_dofs(&self) -> usize {
        2 * self.coords.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn coord(&self, node: usize) -> Point {
        self.coords[node]
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn class(&self, node: usize) -> NodeClass {
        self.classes[node]
    }

    pub fn is_vertex(&self, node: usize) -> bool {
        node < self.num_vertices
    }

    /// Edge whose midpoint is `node`, or `None` for vertex nodes.
    pub fn edge_of(&self, node: usize) -> Option<usize> {
        node.checked_sub(self.num_vertices)
    }

    pub fn edge_node(&self, edge: usize) -> usize {
        self.num_vertices + edge
    }

    pub fn triangle_nodes(&self, t: usize) -> [usize; 6] {
        self.triangle_nodes[t]
    }

    pub fn nodes_of_class(&self, class: NodeClass) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(move |&p| self.classes[p] == class)
    }

    /// Local coefficients `[u_1, u_2]` of triangle `t` from a global vector.
    pub fn local_coeffs(&self, t: usize, u: &[f64]) -> [[f64; 2]; 6] {
        let nodes = self.triangle_nodes[t];
        let mut c = [[0.0; 2]; 6];
        for (a, &n) in nodes.iter().enumerate() {
            c[a] = [u[2 * n], u[2 * n + 1]];
        }
        c
    }

    /// Nodal interpolant of a vector field.
    pub fn interpolate(&self, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
        let mut u = vec![0.0; self.num_dofs()];
        for (p, &x) in self.coords.iter().enumerate() {
            let v = f(x);
            u[2 * p] = v[0];
            u[2 * p + 1] = v[1];
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::SideTags;

    #[test]
    fn counts_and_corner_classes() {
        let mesh = Mesh::unit_square(2, SideTags::bottom_contact()).unwrap();
        let dofs = DofMap::new(&mesh);
        assert_eq!(dofs.num_nodes(), mesh.num_vertices() + mesh.num_edges());
        assert_eq!(dofs.num_nodes(), 25);
        let at = |x: Point| (0..dofs.num_nodes()).find(|&p| dofs.coord(p) == x).unwrap();
        // Bottom corners touch contact and Neumann edges.
        assert_eq!(dofs.class(at([0.0, 0.0])), NodeClass::Contact);
        assert_eq!(dofs.class(at([1.0, 0.0])), NodeClass::Contact);
        // Top corners touch Dirichlet and Neumann edges.
        assert_eq!(dofs.class(at([0.0, 1.0])), NodeClass::Dirichlet);
        assert_eq!(dofs.class(at([0.25, 0.0])), NodeClass::Contact);
        assert_eq!(dofs.class(at([0.0, 0.25])), NodeClass::Neumann);
        assert_eq!(dofs.class(at([0.5, 0.5])), NodeClass::Interior);
        assert_eq!(dofs.nodes_of_class(NodeClass::Contact).count(), 5);
        assert_eq!(dofs.nodes_of_class(NodeClass::Dirichlet).count(), 5);
    }

    #[test]
    fn triangle_nodes_are_midpoints() {
        let mesh = Mesh::unit_square(2, SideTags::right_contact()).unwrap();
        let dofs = DofMap::new(&mesh);
        for t in 0..mesh.num_triangles() {
            let nodes = dofs.triangle_nodes(t);
            let tri = mesh.triangle(t);
            for i in 0..3 {
                let m = dofs.coord(nodes[3 + i]);
                let a = mesh.vertex(tri[(i + 1) % 3]);
                let b = mesh.vertex(tri[(i + 2) % 3]);
                assert_eq!(m, [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            }
        }
    }
}
